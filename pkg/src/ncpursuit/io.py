"""File formats: headerless matrix CSV, score CSV, recovery/truth JSON."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .linalg import SubspaceBasis
from .recovery import RecoveryResult, SelectionStrategy, strategy_name
from .scoring import ScoreVector
from .synth import Dataset, spec_to_dict


class MatrixFormatError(ValueError):
    pass


def read_matrix_csv(path) -> np.ndarray:
    """One line per row, comma-separated decimal fields, no header."""
    rows: list[list[float]] = []
    width = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            fields = line.split(",")
            try:
                values = [float(f) for f in fields]
            except ValueError:
                bad = next(f for f in fields if not _is_float(f))
                raise MatrixFormatError(f"{path}:{lineno}: non-numeric field {bad.strip()!r}") from None
            if width is None:
                width = len(values)
            elif len(values) != width:
                raise MatrixFormatError(
                    f"{path}:{lineno}: ragged row with {len(values)} fields, expected {width}")
            rows.append(values)
    if not rows:
        raise MatrixFormatError(f"{path}: empty matrix file")
    M = np.array(rows)
    if not np.all(np.isfinite(M)):
        raise MatrixFormatError(f"{path}: non-finite entries")
    return M


def _is_float(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def write_matrix_csv(path, M) -> None:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    with open(path, "w", encoding="utf-8") as fh:
        for row in M:
            fh.write(",".join(repr(float(v)) for v in row))
            fh.write("\n")


def write_scores_csv(path, scores: ScoreVector) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("index,score,method\n")
        for i, v in enumerate(scores.values):
            fh.write(f"{i},{float(v)!r},{scores.method}\n")


def read_scores_csv(path) -> ScoreVector:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "index,score,method":
            raise MatrixFormatError(f"{path}: unexpected header {header!r}")
        values, method = [], None
        for line in fh:
            if line.strip():
                _, score, method = line.strip().split(",")
                values.append(float(score))
    return ScoreVector(method or "", np.array(values))


def recovery_to_dict(result: RecoveryResult, method: str, strat: SelectionStrategy) -> dict:
    return {
        "selected": [int(j) for j in result.selected],
        "dim": result.dim,
        "basis": [[float(v) for v in col] for col in result.basis.basis.T],
        "method": method,
        "strategy": strategy_name(strat),
    }


def basis_from_columns(cols) -> SubspaceBasis:
    """Inverse of the column-major ``basis`` encoding used in the JSON files."""
    cols = np.asarray(cols, dtype=float)
    if cols.size == 0:
        raise ValueError("empty basis")
    return SubspaceBasis(cols.T)


def dataset_truth(ds: Dataset) -> dict:
    return {
        "mask": [bool(b) for b in ds.outlier_mask],
        "U": [[float(v) for v in col] for col in ds.U_true.basis.T],
        "spec": spec_to_dict(ds.spec),
        "seed": ds.seed,
        "psi": ds.psi,
        "snr": ds.snr,
    }


def write_dataset(out_dir, ds: Dataset) -> tuple[Path, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    data_path, truth_path = out / "data.csv", out / "truth.json"
    write_matrix_csv(data_path, ds.D)
    with open(truth_path, "w", encoding="utf-8") as fh:
        json.dump(dataset_truth(ds), fh, indent=1)
        fh.write("\n")
    return data_path, truth_path
