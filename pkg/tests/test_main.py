import logging
import os

import pytest

from pareto_irg.main import main, setup_argument_parser
from pareto_irg.utils.results_utils import StatTable, read_edge_list, read_weights


@pytest.fixture(autouse=True)
def isolated_environment(monkeypatch, tmp_path):
    monkeypatch.chdir(tmp_path)
    for key in list(os.environ):
        if key.startswith("PARETO_IRG_"):
            monkeypatch.delenv(key)


def run(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    return exc.value.code


def test_generate_writes_edges_and_weights(tmp_path):
    edges, weights = tmp_path / "g.edges", tmp_path / "w.csv"
    code = run(["generate", "--n", "60", "--seed", "3", "--out", str(edges), "--weights-out", str(weights)])
    assert code == 0
    header, pairs = read_edge_list(str(edges))
    assert header["n"] == 60
    assert pairs.shape[1] == 2
    assert read_weights(str(weights)).size == 60


def test_degree_command_writes_table(tmp_path, capsys):
    out = tmp_path / "deg.csv"
    assert run(["degree", "--n", "80", "--replicas", "3", "--out", str(out)]) == 0
    assert len(StatTable.from_csv(str(out))) == 3
    assert "Validated parameters" in capsys.readouterr().out


def test_config_file_is_used(tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("n=50\nreplicas=2\n")
    out = tmp_path / "m.csv"
    assert run(["motifs", "--config", str(conf), "--out", str(out)]) == 0
    table = StatTable.from_csv(str(out))
    assert table.metadata["n"] == 50
    assert "triangles_total" in table.columns


def test_invalid_parameters_exit_with_one(capsys):
    assert run(["degree", "--alpha", "1.5", "--replicas", "1"]) == 1
    assert "alpha" in capsys.readouterr().out
    assert run(["verify", "--criteria", "x"]) == 1


def test_verify_analytic_criterion(tmp_path):
    out = tmp_path / "report.json"
    assert run(["verify", "--criteria", "4", "--out", str(out)]) == 0
    assert out.exists()


def test_eps_and_k_critical_are_exclusive():
    with pytest.raises(SystemExit) as exc:
        setup_argument_parser().parse_args(["degree", "--eps", "0.1", "--k-critical", "1"])
    assert exc.value.code == 2


def test_debug_from_config_file_enables_tracebacks(tmp_path, capsys):
    conf = tmp_path / "debug.conf"
    conf.write_text("debug=true\nn=50\nreplicas=1\n")
    root = logging.getLogger()
    previous = root.level
    try:
        assert run(["degree", "--config", str(conf), "--out", "/etc/pareto_irg.csv"]) == 1
        assert root.level == logging.DEBUG
    finally:
        root.setLevel(previous)
    assert "Traceback" in capsys.readouterr().err
