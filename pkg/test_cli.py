"""Test the command-line interface and run configs."""

from pathlib import Path

import pytest
import yaml

from src.cli import load_run_config, main, parse_overrides
from src.common.errors import (
    EXIT_CONFIG_ERROR,
    EXIT_IO_ERROR,
    EXIT_OK,
    CheckpointError,
    ConfigError,
)

REFERENCE = Path(__file__).parent / "data" / "table1_reference.csv"

TINY_RUN = {
    "problem": "bsb",
    "dim": 2,
    "network": "desk-fc",
    "hidden_layers": 1,
    "hidden_width": 4,
    "scheme": "s2",
    "n_steps": 4,
    "batch": 8,
    "schedule": "smoke",
    "seed": 3,
    "log_every": 1,
    "verify_paths": 10,
    "verify_steps": 8,
    "sample_paths": 2,
}


def _config_file(tmp_path: Path, **overrides) -> str:
    path = tmp_path / "run.yaml"
    path.write_text(yaml.safe_dump({**TINY_RUN, **overrides}))
    return str(path)


def test_parse_overrides():
    """Values are parsed as YAML scalars."""
    parsed = parse_overrides(["seed=7", "beta1=0.5", "scheme=s3", "n_list=[12, 48]", "extrapolate=false"])
    assert parsed == {"seed": 7, "beta1": 0.5, "scheme": "s3", "n_list": [12, 48], "extrapolate": False}
    with pytest.raises(ConfigError):
        parse_overrides(["seed"])
    print("✅ Override parsing works!")


def test_load_run_config(tmp_path):
    config = load_run_config(_config_file(tmp_path), {"seed": 9})
    assert config.seed == 9 and config.dim == 2

    with pytest.raises(ConfigError):
        load_run_config(_config_file(tmp_path), {"learning_rate": 1e-3})
    with pytest.raises(ConfigError):
        load_run_config(_config_file(tmp_path), {"beta1": -0.1})
    with pytest.raises(ConfigError):
        load_run_config(_config_file(tmp_path, network={"name": "desk-fc"}))
    with pytest.raises(CheckpointError):
        load_run_config(tmp_path / "missing.yaml")
    print("✅ Run config loading works!")


def test_config_hash_ignores_output_dir(tmp_path):
    a = load_run_config(_config_file(tmp_path), {"output_dir": "x"})
    b = load_run_config(_config_file(tmp_path), {"output_dir": "y"})
    c = load_run_config(_config_file(tmp_path), {"seed": 4})
    assert a.config_hash == b.config_hash
    assert a.config_hash != c.config_hash
    assert len(a.config_hash) == 64
    print("✅ Config hash works!")


def test_exit_codes_for_bad_configs(tmp_path):
    config = _config_file(tmp_path)
    out = str(tmp_path / "out")
    assert main(["train", "--config", config, "--output", out, "--set", "beta1=-1"]) == EXIT_CONFIG_ERROR
    assert main(["train", "--config", config, "--output", out, "--set", "colour=blue"]) == EXIT_CONFIG_ERROR
    assert main(["train", "--config", config, "--output", out, "--set", "gamma=8"]) == EXIT_CONFIG_ERROR
    assert main(["train", "--config", str(tmp_path / "nope.yaml")]) == EXIT_IO_ERROR
    assert main(["convergence", "--config", config, "--output", out, "--n-list", "12,36"]) == EXIT_CONFIG_ERROR
    print("✅ Bad configs map to exit codes!")


def test_train_is_byte_reproducible(tmp_path):
    """Two runs of the same config write identical loss logs."""
    config = _config_file(tmp_path)
    for name in ("a", "b"):
        assert main(["train", "--config", config, "--output", str(tmp_path / name)]) == EXIT_OK
    for name in ("final.npz", "loss_log.csv", "config.yaml", "metadata.json"):
        assert (tmp_path / "a" / name).exists(), name
    assert (tmp_path / "a" / "loss_log.csv").read_bytes() == (tmp_path / "b" / "loss_log.csv").read_bytes()
    print("✅ Training runs are byte-reproducible!")


def test_train_then_evaluate(tmp_path):
    config = _config_file(tmp_path)
    run = tmp_path / "run"
    assert main(["train", "--config", config, "--output", str(run)]) == EXIT_OK

    report = tmp_path / "report"
    code = main(["evaluate", "--config", config, "--checkpoint", str(run / "final.npz"),
                 "--output", str(report), "--predict-paths"])
    assert code == EXIT_OK
    for name in ("errors.csv", "errors.svg", "sample_paths.csv", "sample_paths.svg"):
        assert (report / name).exists(), name

    mismatched = main(["evaluate", "--config", config, "--set", "hidden_width=5",
                       "--checkpoint", str(run / "final.npz"), "--output", str(report)])
    assert mismatched == EXIT_IO_ERROR
    print("✅ Train then evaluate works!")


def test_evaluate_exact_solution(tmp_path):
    """The exact stub has zero error; the neighborhood study writes its own file."""
    config = _config_file(tmp_path)
    out = tmp_path / "exact"
    assert main(["evaluate", "--config", config, "--checkpoint", "exact", "--output", str(out)]) == EXIT_OK
    assert main(["evaluate", "--config", config, "--checkpoint", "exact", "--output", str(out),
                 "--radius", "0.25"]) == EXIT_OK

    lines = (out / "errors.csv").read_text().splitlines()
    assert lines[0].startswith("# config_hash=")
    assert lines[1] == "station,t,mean,sd,mean_plus_2sd"
    assert all(line.split(",")[2] == "0" for line in lines[2:])
    assert (out / "neighborhood_R0.25.csv").exists()
    print("✅ Exact-solution evaluation works!")


def test_deep_bsde_run(tmp_path):
    config = _config_file(tmp_path, scheme="deep_bsde")
    run = tmp_path / "deep"
    assert main(["train", "--config", config, "--output", str(run)]) == EXIT_OK
    assert main(["evaluate", "--config", config, "--checkpoint", str(run / "final.npz"),
                 "--output", str(run)]) == EXIT_OK
    assert (run / "y0_error.json").exists()
    print("✅ Deep BSDE run works!")


def test_paths_dump(tmp_path):
    config = _config_file(tmp_path)
    out = tmp_path / "paths"
    assert main(["paths-dump", "--config", config, "--output", str(out), "--paths", "3", "--steps", "5"]) == EXIT_OK
    lines = (out / "paths.csv").read_text().splitlines()
    assert lines[1] == "path_id,n,t,X_1,X_2,Y,Z_1,Z_2"
    assert len(lines) == 2 + 3 * 6
    print("✅ Paths dump works!")


def test_unwritable_output_is_an_io_error(tmp_path):
    """An output path below a plain file maps to the I/O exit code."""
    config = _config_file(tmp_path)
    blocker = tmp_path / "blocker"
    blocker.write_text("not a directory")
    assert main(["paths-dump", "--config", config, "--output", str(blocker / "sub")]) == EXIT_IO_ERROR
    assert main(["train", "--config", config, "--output", str(blocker / "sub")]) == EXIT_IO_ERROR
    print("✅ Unwritable outputs map to exit code 4!")


def test_preset_aliases_in_run_configs(tmp_path):
    """Published-setting aliases name the same run as the canonical ids."""
    alias = load_run_config(_config_file(tmp_path, network="paper-fc", mscale_network="paper-ms4",
                                         schedule="paper"))
    canonical = load_run_config(_config_file(tmp_path, network="full-fc", mscale_network="full-ms4",
                                             schedule="full"))
    assert (alias.network, alias.mscale_network, alias.schedule) == ("full-fc", "full-ms4", "full")
    assert alias.config_hash == canonical.config_hash
    assert alias.build_network_config() == canonical.build_network_config()
    print("✅ Preset aliases work in run configs!")


def test_n_list_is_part_of_the_run(tmp_path):
    """Different N lists hash to different run directories."""
    config = _config_file(tmp_path, n_list=[2, 8])
    out = tmp_path / "conv"
    assert main(["convergence", "--config", config, "--output", str(out)]) == EXIT_OK
    assert yaml.safe_load((out / "config.yaml").read_text())["n_list"] == [2, 8]

    assert main(["convergence", "--config", config, "--output", str(out), "--n-list", "2,8,32"]) == EXIT_OK
    assert yaml.safe_load((out / "config.yaml").read_text())["n_list"] == [2, 8, 32]

    short = load_run_config(config)
    longer = load_run_config(config, {"n_list": [2, 8, 32]})
    assert short.config_hash != longer.config_hash
    print("✅ The N list is hashed with the run!")


def test_table(tmp_path, capsys):
    out = tmp_path / "table.csv"
    assert main(["table", "--reference", str(REFERENCE), "--output", str(out)]) == EXIT_OK
    printed = capsys.readouterr().out
    assert "s2 raw" in printed and "4.29e-04" in printed
    assert out.read_text().splitlines()[1] == "scheme,N,raw_error,extrapolated_error"
    assert main(["table", "--reference", str(tmp_path / "missing.csv")]) == EXIT_IO_ERROR
    print("✅ Table rendering works!")


if __name__ == "__main__":
    import tempfile

    test_parse_overrides()
    for test in (
        test_load_run_config,
        test_config_hash_ignores_output_dir,
        test_exit_codes_for_bad_configs,
        test_train_is_byte_reproducible,
        test_train_then_evaluate,
        test_evaluate_exact_solution,
        test_deep_bsde_run,
        test_paths_dump,
        test_unwritable_output_is_an_io_error,
        test_preset_aliases_in_run_configs,
        test_n_list_is_part_of_the_run,
    ):
        with tempfile.TemporaryDirectory() as tmp:
            test(Path(tmp))

    print("\n" + "=" * 70)
    print("ALL CLI TESTS PASSED! ✅")
    print("=" * 70)
