import json

import pytest
from click.testing import CliRunner

from wmc.cli import main
from wmc.patterns import SamplePattern, circulant_band


@pytest.fixture
def runner():
    return CliRunner()


def test_certify_json_output(runner, tmp_path):
    path = tmp_path / "full.pat"
    SamplePattern.full(4, 4).save(path)
    result = runner.invoke(main, ["certify", "--pattern", str(path), "--json"])
    assert result.exit_code == 0, result.output
    record = json.loads(result.output)
    assert record["mu"] == pytest.approx(2.0)
    assert record["lambda"] == pytest.approx(0.0, abs=1e-8)
    assert "rank_bound" in record and "maxnorm_bound" in record


def test_certify_plain_output(runner, tmp_path):
    path = tmp_path / "circ.pat"
    circulant_band(6, 3).save(path)
    result = runner.invoke(main, ["certify", "--pattern", str(path)])
    assert result.exit_code == 0
    assert "lambda:" in result.output


def test_run_with_config_file(runner, tmp_path):
    cfg = tmp_path / "cfg.toml"
    out = tmp_path / "out.csv"
    cfg.write_text(
        'd = 40\ndata_rank = 2\ny_grid = [0.3]\nm_grid = [400]\n'
        'trials = 1\nnoise_repeats = 1\n'
    )
    result = runner.invoke(
        main, ["run", "sample_w", "--config", str(cfg), "--seed", "3", "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    assert out.exists()
    assert "wrote 2 rows" in result.output


def test_run_preset_rejects_unknown_experiment(runner):
    result = runner.invoke(main, ["run", "walzer"])
    assert result.exit_code == 2


def test_run_config_error_exit_code(runner, tmp_path):
    cfg = tmp_path / "cfg.toml"
    cfg.write_text("banana = 1\n")
    result = runner.invoke(main, ["run", "sample_w", "--config", str(cfg)])
    assert result.exit_code == 2
    assert "error" in result.output


def test_run_missing_dataset_is_data_error(runner, tmp_path):
    cfg = tmp_path / "cfg.toml"
    cfg.write_text(
        'dataset_path = "/nonexistent/u.data"\ndataset_format = "movielens"\n'
        'rank_grid = [1]\n'
    )
    result = runner.invoke(main, ["run", "real_pattern", "--config", str(cfg)])
    assert result.exit_code == 3


def test_certify_capacity_is_numerical_error(runner, tmp_path):
    path = tmp_path / "big.pat"
    d = 3000  # diagonal pattern: no empty lines, but past the dense guard
    SamplePattern(d, d, range(d), range(d)).save(path)
    result = runner.invoke(main, ["certify", "--pattern", str(path)])
    assert result.exit_code == 4


def test_certify_malformed_pattern_is_data_error(runner, tmp_path):
    path = tmp_path / "bad.pat"
    path.write_text("2 2\n")
    result = runner.invoke(main, ["certify", "--pattern", str(path)])
    assert result.exit_code == 3
