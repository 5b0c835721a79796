import math

import pytest

from pareto_irg.core.ensemble import EnsembleSpec
from pareto_irg.core.experiments import (
    TAIL_THRESHOLDS,
    experiment_coarse_grain,
    experiment_degree_law,
    experiment_dust_scan,
    experiment_joint,
)
from pareto_irg.errors import ParameterError
from pareto_irg.sampling.graphgen import ModelParams
from pareto_irg.theory import oracles
from pareto_irg.utils.results_utils import StatTable


def make_spec(n=100, replicas=40, **changes):
    return EnsembleSpec(params=ModelParams.critical(n, 0.5), replicas=replicas, master_seed=3, **changes)


def test_dust_scan_table(tmp_path):
    out = str(tmp_path / "dust.csv")
    table = experiment_dust_scan(0.5, [0.05, 3.0], [100, 200], replicas=5, master_seed=1, output_path=out)
    assert [(r["k"], r["n"]) for r in table.rows] == [(0.05, 100), (0.05, 200), (3.0, 100), (3.0, 200)]
    k1, k2 = oracles.dust_thresholds(0.5)
    assert table.metadata["k1_star"] == k1
    assert table.metadata["k2_star"] == k2
    directions = table.metadata["directions"]
    assert directions["0.05"]["regime"] == "below_k1"
    assert directions["3.0"]["regime"] == "above_k2"
    for row in table.rows:
        assert 0.0 <= row["fraction_dust"] <= 1.0
        assert row["eps"] == pytest.approx(row["k"] * row["n"] ** -2.0)
        assert row["limit_isolated_fraction"] == oracles.isolated_probability_limit(row["k"], 0.5)
    assert StatTable.from_csv(out).equals(table)


def test_dust_scan_rows_survive_appended_k():
    short = experiment_dust_scan(0.5, [0.05], [100], replicas=4, master_seed=9)
    longer = experiment_dust_scan(0.5, [0.05, 1.0], [100], replicas=4, master_seed=9)
    assert longer.rows[0] == short.rows[0]


@pytest.mark.parametrize("kwargs", [
    {"k_grid": [], "n_grid": [100]},
    {"k_grid": [1.0], "n_grid": [200, 100]},
    {"k_grid": [-1.0], "n_grid": [100]},
])
def test_dust_scan_rejects_bad_grids(kwargs):
    with pytest.raises(ParameterError):
        experiment_dust_scan(0.5, replicas=2, **kwargs)


def test_joint_experiment(tmp_path):
    spec = make_spec(pgf_grid=((0.5, 0.5), (0.9, 0.9)), output_path=str(tmp_path / "joint.csv"))
    replicas, pgf, tails = experiment_joint(spec)
    assert "d1" in replicas.columns
    assert len(pgf) == 2
    for row in pgf.rows:
        assert row["empirical_product"] == pytest.approx(row["empirical_joint"] - row["gap"])
        assert row["limit_gap"] == pytest.approx(row["limit_joint"] - row["limit_product"])
        assert 0.0 < row["empirical_joint"] <= 1.0
    assert [r["threshold"] for r in tails.rows] == [float(x) for x in TAIL_THRESHOLDS]
    assert (tmp_path / "joint_pgf.csv").exists()
    assert (tmp_path / "joint_tails.csv").exists()


def test_degree_law_table():
    table = experiment_degree_law(make_spec(n=200, replicas=100), max_degree=10)
    assert len(table) == 11
    assert table.rows[-1]["pooled"] is True
    assert sum(r["count"] for r in table.rows) == 100
    assert sum(r["model"] for r in table.rows) == pytest.approx(1.0, abs=1e-12)
    assert 0.0 <= table.metadata["total_variation"] <= 1.0
    assert table.metadata["labelled_node"] == 0


def test_coarse_grain_experiment():
    table = experiment_coarse_grain(make_spec(replicas=3), block_sizes=(2, 5))
    assert table.metadata["experiment"] == "coarse-grain"
    for row in table.rows:
        assert row["cg5_n"] == 20
        assert row["cg2_edges"] <= row["n_edges"]
        assert row["cg5_mean_degree"] == pytest.approx(2 * row["cg5_edges"] / 20)
        assert not math.isnan(row["mean_degree"])
