import pytest

from pareto_irg.errors import ParameterError
from pareto_irg.validation.config import (
    RunConfig,
    config_keys,
    load_config,
    parse_pgf_grid,
    parse_statistics,
    read_environment,
)


def test_defaults():
    config = load_config(environ={})
    assert config == RunConfig()
    assert config.resolved_scale() == {"eps": None, "k_critical": 1.0}


def test_parsers():
    assert parse_pgf_grid("0.5:0.5, 0.9:0.8") == ((0.5, 0.5), (0.9, 0.8))
    assert parse_statistics("triangles,degree") == ("degree", "triangles")
    with pytest.raises(ParameterError):
        parse_pgf_grid("0.5")
    with pytest.raises(ParameterError):
        parse_statistics("degree,cliques")


def test_precedence_cli_over_file_over_environment(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text("# run settings\nn=300\nalpha=0.3\nk-grid=0.1,1\n")
    environ = {"PARETO_IRG_N": "100", "PARETO_IRG_REPLICAS": "7", "HOME": "/root"}
    config = load_config(str(path), overrides={"alpha": 0.7, "seed": None}, environ=environ)
    assert config.n == 300
    assert config.alpha == 0.7
    assert config.replicas == 7
    assert config.k_grid == (0.1, 1.0)
    assert config.seed == RunConfig.seed
    assert config.sources["n"] == str(path)
    assert config.sources["alpha"] == "command line"
    assert config.sources["replicas"] == "environment"


def test_eps_on_command_line_replaces_file_k_critical(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text("k_critical=2.0\n")
    config = load_config(str(path), overrides={"eps": 1e-4}, environ={})
    assert config.k_critical is None
    assert config.resolved_scale() == {"eps": 1e-4, "k_critical": None}


def test_eps_and_k_critical_in_one_layer_conflict():
    config = load_config(overrides={"eps": 1e-4, "k_critical": 1.0}, environ={})
    with pytest.raises(ParameterError):
        config.resolved_scale()


def test_unknown_file_key_is_rejected(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text("nodes=10\n")
    with pytest.raises(ParameterError):
        load_config(str(path), environ={})


def test_missing_file_and_bad_values(tmp_path):
    with pytest.raises(ParameterError):
        load_config(str(tmp_path / "absent.conf"), environ={})
    with pytest.raises(ParameterError):
        load_config(overrides={"sampler": "quantum"}, environ={})
    with pytest.raises(ParameterError):
        load_config(environ={"PARETO_IRG_N": "many"})


def test_environment_ignores_foreign_keys():
    assert read_environment({"PARETO_IRG_DEBUG": "yes", "PARETO_IRG_COLOUR": "red"}) == {"debug": "yes"}
    assert load_config(environ={"PARETO_IRG_DEBUG": "yes"}).debug is True


def test_config_keys_cover_run_config():
    keys = config_keys()
    assert "sources" not in keys
    assert {"n", "alpha", "eps", "k_critical", "pgf_grid"} <= set(keys)
