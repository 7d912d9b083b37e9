import math
import re

import numpy as np
import pytest

from ncpursuit.experiments import (
    ExperimentConfig,
    ResultRow,
    ResultTable,
    build_dataset,
    grid_points,
    run_experiment,
    trial_seed,
)
from ncpursuit.heatmap import heatmap_matrix, render_heatmap, render_svg


def _table(rates, xs=(1, 2), ys=(10, 20)):
    cfg = ExperimentConfig(kind="phase", grid={"x": list(xs), "y": list(ys)}, methods=("SNCP",), trials=1)
    rows, k = [], 0
    for x in xs:
        for y in ys:
            rows.append(ResultRow({"x": x, "y": y}, "SNCP", rates[k], 0.0, 0.0, 1, 0))
            k += 1
    return ResultTable(cfg, rows)


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(kind="phase", grid={"n_i": [8]}, trials=0)
    with pytest.raises(ValueError):
        ExperimentConfig(kind="phase", grid={})
    with pytest.raises(ValueError):
        ExperimentConfig(kind="phase", grid={"n_i": [8]}, methods=())
    with pytest.raises(ValueError):
        ExperimentConfig(kind="phase", grid={"n_i": [8]}, methods=("pca",))
    with pytest.raises(ValueError):
        ExperimentConfig(kind="bogus", grid={"n_i": [8]})
    cfg = ExperimentConfig(kind="separation", grid={"n_o": [40]}, methods=("sncp", "cop"))
    assert cfg.methods == ("SNCP", "CoP") and cfg.trials == 50 and cfg.success_rule == "score"


def test_config_round_trip_and_hash():
    cfg = ExperimentConfig(kind="phase", grid={"n_i": [8, 16]}, fixed={"M1": 50, "r": 4, "n_o": 100})
    again = ExperimentConfig.from_dict(cfg.to_dict())
    assert again == cfg and again.config_hash() == cfg.config_hash()
    other = ExperimentConfig(kind="phase", grid={"n_i": [8, 16]}, fixed={"M1": 50, "r": 4, "n_o": 101})
    assert other.config_hash() != cfg.config_hash()
    with pytest.raises(ValueError, match="unknown config field"):
        ExperimentConfig.from_dict({**cfg.to_dict(), "extra": 1})


def test_trial_seeds_do_not_collide():
    cfg = ExperimentConfig(kind="phase", grid={"n_i": [8, 16, 24], "n_o": [100, 500]}, trials=20)
    seeds = {trial_seed(cfg, p, t) for p in grid_points(cfg) for t in range(cfg.trials)}
    assert len(seeds) == 6 * 20


def test_row_count_and_rates():
    cfg = ExperimentConfig(kind="phase", grid={"n_i": [8, 24], "n_o": [20, 40]},
                           fixed={"M1": 20, "r": 2}, methods=("ANCP", "SNCP", "CoP"), trials=3)
    table = run_experiment(cfg)
    assert len(table.rows) == 4 * 3
    for row in table.rows:
        assert 0 <= row.success_rate <= 1 and row.trials == 3


def test_phase_example_high_inlier_ratio():
    cfg = ExperimentConfig(kind="phase", grid={"n_i": [40], "n_o": [2000]},
                           fixed={"M1": 50, "r": 4}, methods=("SNCP",), trials=20, master_seed=1)
    assert run_experiment(cfg).rows[0].success_rate >= 0.9


def test_noise_sweep_high_snr_example():
    cfg = ExperimentConfig(kind="noise-sweep", grid={"snr": [100]},
                           fixed={"M1": 200, "r": 5, "r_o": 10, "n_i": 100, "n_o": 100},
                           methods=("SNCP",), trials=20, master_seed=1)
    assert run_experiment(cfg).rows[0].success_rate == 1.0


def test_determinism_single_trial():
    cfg = ExperimentConfig(kind="phase", grid={"n_i": [10]}, fixed={"M1": 20, "r": 2, "n_o": 30},
                           trials=1, master_seed=42)
    assert run_experiment(cfg).to_csv(timing=False) == run_experiment(cfg).to_csv(timing=False)


def test_parallel_matches_sequential():
    cfg = ExperimentConfig(kind="phase", grid={"n_i": [6, 12]}, fixed={"M1": 20, "r": 2, "n_o": 30},
                           trials=2, master_seed=3)
    assert run_experiment(cfg, workers=2).to_csv(timing=False) == run_experiment(cfg).to_csv(timing=False)


def test_methods_share_datasets():
    # paired design: the same method listed in different configs sees the same data
    a = ExperimentConfig(kind="phase", grid={"n_i": [10]}, fixed={"M1": 20, "r": 2, "n_o": 30},
                         methods=("ANCP",), trials=3, master_seed=5)
    b = ExperimentConfig(kind="phase", grid={"n_i": [10]}, fixed={"M1": 20, "r": 2, "n_o": 30},
                         methods=("SNCP", "ANCP"), trials=3, master_seed=5)
    ra, rb = run_experiment(a), run_experiment(b)
    assert ra.lookup("ANCP", n_i=10).mean_error == rb.lookup("ANCP", n_i=10).mean_error


def test_csv_header_and_error_rows():
    cfg = ExperimentConfig(kind="phase", grid={"n_i": [10], "n_o": [5]},
                           fixed={"M1": 20, "r": 30}, methods=("ANCP",), trials=1)
    table = run_experiment(cfg)
    lines = table.to_csv(timing=False).splitlines()
    assert lines[0] == "grid_n_i,grid_n_o,method,success_rate,mean_error,mean_ms,trials,seed"
    assert table.rows[0].error and "r must lie" in table.rows[0].error
    assert math.isnan(table.rows[0].success_rate)
    assert ",nan," in lines[1]


def test_build_dataset_snr_wraps_noise():
    ds = build_dataset("noise-sweep", {"M1": 30, "r": 2, "r_o": 3, "n_i": 20, "n_o": 20, "snr": 4}, seed=0)
    assert ds.snr == pytest.approx(4.0)
    with pytest.raises(ValueError, match="missing parameter"):
        build_dataset("phase", {"M1": 30, "n_i": 5, "n_o": 5}, seed=0)
    ds = build_dataset("perm-reg", {"d": 3, "m": 3, "n_i": 20, "n_o": 4}, seed=0)
    assert ds.D.shape == (6, 24)


def test_heatmap_single_white_cell():
    cfg = ExperimentConfig(kind="phase", grid={"x": [1], "y": [2]}, methods=("SNCP",), trials=1)
    table = ResultTable(cfg, [ResultRow({"x": 1, "y": 2}, "SNCP", 1.0, 0.0, 0.0, 1, 0)])
    svg = render_svg(table, "x", "y")
    assert re.findall(r'fill="(rgb\([^)]*\))"', svg) == ["rgb(255,255,255)"]


def test_heatmap_checkerboard():
    # rates listed with x outer, y inner: (x1,y1)=0, (x1,y2)=1, (x2,y1)=1, (x2,y2)=0
    xs, ys, rates, _ = heatmap_matrix(_table([0.0, 1.0, 1.0, 0.0]), "x", "y")
    assert rates == [[0.0, 1.0], [1.0, 0.0]]
    fills = re.findall(r'fill="(rgb\([^)]*\))"', render_svg(_table([0.0, 1.0, 1.0, 0.0]), "x", "y"))
    white, black = "rgb(255,255,255)", "rgb(0,0,0)"
    # top row is the largest y
    assert fills == [white, black, black, white]


def test_heatmap_is_byte_stable_and_written(tmp_path):
    t = _table([0.25, 0.5, 0.75, 1.0])
    path = tmp_path / "h.svg"
    render_heatmap(t, "x", "y", path)
    assert path.read_text() == render_svg(t, "x", "y")
    assert render_svg(t, "x", "y") == render_svg(_table([0.25, 0.5, 0.75, 1.0]), "x", "y")


def test_heatmap_rejects_non_2d():
    cfg = ExperimentConfig(kind="phase", grid={"x": [1, 2], "y": [1], "z": [1, 2]}, methods=("SNCP",))
    rows = [ResultRow({"x": x, "y": 1, "z": z}, "SNCP", 1.0, 0, 0, 1, 0) for x in (1, 2) for z in (1, 2)]
    with pytest.raises(ValueError, match="not 2-D"):
        heatmap_matrix(ResultTable(cfg, rows), "x", "y")


def test_phase_map_brightens_with_inliers():
    cfg = ExperimentConfig(kind="phase", grid={"n_i": [8, 16, 24, 32, 40], "n_o": [100, 500]},
                           fixed={"M1": 50, "r": 4}, methods=("SNCP",), trials=5, master_seed=2)
    xs, ys, rates, _ = heatmap_matrix(run_experiment(cfg), "n_i", "n_o")
    for row in rates:
        assert row[-1] >= row[0]
        # nondecreasing up to Monte-Carlo noise of one trial
        assert all(b >= a - 0.2 for a, b in zip(row, row[1:]))
