import pytest
from click.testing import CliRunner

from fblmimo.core._cli.fblmimo_cli import main


CLEAN_ENV = {"FBLMIMO_SEED": None, "FBLMIMO_TRIALS": None, "FBLMIMO_WORKERS": None}


@pytest.fixture
def runner():
    return CliRunner(mix_stderr=False)


@pytest.fixture
def invoke(runner, tmp_path):
    """Runs the cli against a config file that does not exist, so only flags and env apply"""
    config = str(tmp_path / "missing.ini")

    def run(*args, env=None):
        return runner.invoke(main, ["--config", config, *args], env={**CLEAN_ENV, **(env or {})})

    return run


def test_q_inv(invoke):
    result = invoke("q-inv", "--epsilon", "0.5")
    assert result.exit_code == 0
    assert result.stdout == "x=0\n"


def test_q_inv_domain(invoke):
    result = invoke("q-inv", "--epsilon", "1.5")
    assert result.exit_code == 2
    assert "DomainError" in result.stderr


def test_blocklength(invoke):
    result = invoke("blocklength", "--m", "4", "--snr-db", "15", "--epsilon", "1e-7", "--rate-fraction", "0.8")
    assert result.exit_code == 0
    assert result.stdout.startswith("n=7 n_real=6.6837")


def test_blocklength_takes_one_target(invoke):
    result = invoke("blocklength", "--m", "4", "--snr-db", "15", "--rate-fraction", "0.8", "--rate", "10")
    assert result.exit_code == 2


def test_dispersion(invoke):
    result = invoke("dispersion", "--M", "8", "--N", "4", "--snr-db", "10")
    assert result.exit_code == 0
    assert result.stdout.startswith("mean=3.89666")
    assert "validity" not in result.stdout


def test_dispersion_refuses_square(invoke):
    result = invoke("dispersion", "--M", "4", "--N", "4", "--snr-db", "10")
    assert result.exit_code == 2
    assert "ValidityError" in result.stderr
    assert "dispersion_mean:" in result.stderr
    assert "undefined" in result.stderr


def test_snr_flags_are_equivalent(invoke):
    db = invoke("dispersion", "--M", "8", "--N", "4", "--snr-db", "10", "--method", "high-snr")
    linear = invoke("dispersion", "--M", "8", "--N", "4", "--snr-linear", "10", "--method", "high-snr")
    assert db.exit_code == linear.exit_code == 0
    assert db.stdout == linear.stdout


def test_snr_needs_exactly_one_flag(invoke):
    assert invoke("dispersion", "--M", "8", "--N", "4").exit_code == 2
    assert invoke("dispersion", "--M", "8", "--N", "4", "--snr-db", "10", "--snr-linear", "10").exit_code == 2


def test_mc_is_worker_independent(invoke):
    args = ("mc", "--target", "capacity", "--M", "4", "--N", "3", "--snr-db", "10", "--trials", "2500", "--seed", "1")
    one = invoke(*args, "--workers", "1")
    four = invoke(*args, "--workers", "4")
    assert one.exit_code == four.exit_code == 0
    assert one.stdout == four.stdout


def test_mc_compare(invoke):
    result = invoke("mc", "--target", "inv-eigen-sum", "--M", "10", "--N", "4", "--snr-db", "5",
                    "--trials", "20000", "--compare")
    assert result.exit_code == 0
    assert "closed=0.666666666667" in result.stdout
    assert "agrees=true" in result.stdout


def test_trials_from_environment(invoke):
    result = invoke("mc", "--target", "capacity", "--M", "2", "--N", "2", "--snr-db", "0",
                    env={"FBLMIMO_TRIALS": "50"})
    assert result.exit_code == 0
    assert "trials=50 " in result.stdout

    flagged = invoke("mc", "--target", "capacity", "--M", "2", "--N", "2", "--snr-db", "0", "--trials", "60",
                     env={"FBLMIMO_TRIALS": "50"})
    assert "trials=60 " in flagged.stdout


def test_malformed_environment(invoke):
    result = invoke("mc", "--target", "capacity", "--M", "2", "--N", "2", "--snr-db", "0",
                    env={"FBLMIMO_TRIALS": "many"})
    assert result.exit_code == 2
    assert "ConfigError" in result.stderr


def test_empty_sweep_writes_nothing(invoke, tmp_path):
    out = tmp_path / "empty.csv"
    result = invoke("sweep", "--var", "rho_db", "--from", "5", "--to", "4", "--quantity", "dispersion-mean",
                    "--method", "closed", "--out", str(out))
    assert result.exit_code == 2
    assert not out.exists()


def test_failed_sweep_leaves_no_file(invoke, tmp_path):
    out = tmp_path / "bad.csv"
    result = invoke("sweep", "--var", "M", "--from", "0", "--to", "4", "--quantity", "dispersion-mean",
                    "--method", "closed", "--out", str(out))
    assert result.exit_code == 2
    assert "DomainError" in result.stderr
    assert not out.exists()

    result = invoke("sweep", "--var", "m", "--from", "1", "--to", "2", "--quantity", "blocklength",
                    "--method", "high-snr", "--epsilon", "0.6", "--out", str(out))
    assert result.exit_code == 2
    assert not out.exists()


def test_failed_sweep_prints_no_rows(invoke):
    result = invoke("sweep", "--var", "M", "--from", "0", "--to", "4", "--quantity", "dispersion-mean",
                    "--method", "closed")
    assert result.exit_code == 2
    assert result.stdout == ""


def test_figure_sweep_is_reproducible(invoke, tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (first, second):
        assert invoke("sweep", "--figure", "7", "--seed", "42", "--out", str(out)).exit_code == 0
    assert first.read_bytes() == second.read_bytes()
    assert first.read_text(encoding="utf-8").startswith("# fblmimo ")


def test_figure_and_preset_are_aliases(invoke, tmp_path):
    by_figure, by_name = tmp_path / "a.csv", tmp_path / "b.csv"
    assert invoke("sweep", "--figure", "7", "--out", str(by_figure)).exit_code == 0
    assert invoke("sweep", "--preset", "blocklength-dof", "--out", str(by_name)).exit_code == 0
    assert by_figure.read_bytes() == by_name.read_bytes()
    assert "preset=blocklength-dof" in by_figure.read_text(encoding="utf-8")

    assert invoke("sweep", "--figure", "7", "--preset", "blocklength-dof", "--out", str(by_name)).exit_code == 0
    assert invoke("sweep", "--figure", "7", "--preset", "dispersion-wide").exit_code == 2
    assert invoke("sweep", "--figure", "8").exit_code == 2


def test_sweep_takes_either_snr_flag(invoke):
    args = ("sweep", "--var", "M", "--from", "10", "--to", "14", "--step", "2", "--N", "4",
            "--quantity", "dispersion-mean", "--method", "closed")
    db = invoke(*args, "--snr-db", "10")
    linear = invoke(*args, "--snr-linear", "10")
    default = invoke(*args)
    assert db.exit_code == linear.exit_code == default.exit_code == 0
    assert db.stdout == linear.stdout == default.stdout
    assert invoke(*args, "--snr-db", "10", "--snr-linear", "10").exit_code == 2


def test_sweep_to_stdout(invoke):
    result = invoke("sweep", "--var", "rho_db", "--from", "0", "--to", "4", "--step", "2",
                    "--quantity", "shifted-inv-sum", "--method", "closed", "--M", "8", "--N", "8")
    assert result.exit_code == 0
    lines = [line for line in result.stdout.splitlines() if not line.startswith("#")]
    assert lines[0].startswith("row,M,N,m,rho_db")
    assert len(lines) == 4


def test_init(runner, tmp_path):
    folder = tmp_path / "cfg"
    first = runner.invoke(main, ["init", str(folder)])
    assert first.exit_code == 0
    assert "trials = 100000" in (folder / "config.ini").read_text(encoding="utf-8")
    second = runner.invoke(main, ["init", str(folder)])
    assert "already exists" in second.stderr


def test_config_file_is_read(runner, tmp_path):
    config = tmp_path / "config.ini"
    config.write_text("[DEFAULT]\ntrials = 40\nseed = 3\n", encoding="utf-8")
    result = runner.invoke(main, ["--config", str(config), "mc", "--target", "capacity",
                                  "--M", "2", "--N", "2", "--snr-db", "0"], env=CLEAN_ENV)
    assert result.exit_code == 0
    assert "seed=3 trials=40 " in result.stdout
