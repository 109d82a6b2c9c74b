from pathlib import Path

from pytest import mark, raises

from src.cli import SCHEMAS, parse_config, run
from src.cli.runner import FIGURE_HEADER, _guard, figure_rows, main
from src.errors import CheckFailure, UsageError
from src.hardfn import dump_construction
from src.stability import construction_series
from src.utils.checks import REPORT_HEADER, CheckReport
from src.utils.csv_utils import read_csv

SMALL = ["--eta", "1", "--eps", "1e-2"]


def test_defaults_and_sources():
    config = parse_config(["quadnorm"], environ={})
    assert config.command == "quadnorm"
    assert config["T"] == 100 and config["seed"] == 0
    assert config.sources == {}
    assert set(config.params) == set(SCHEMAS["quadnorm"])
    assert not config.debug


def test_precedence_file_env_flag(tmp_path):
    cfg = tmp_path / "lab.cfg"
    cfg.write_text("# sweep\nT = 1e3\ntrials = 3\nseed = 1\n", encoding="utf-8")
    config = parse_config(
        ["quadnorm", "--config", str(cfg), "--seed", "7"],
        environ={"NAGLAB_SEED": "5", "NAGLAB_TRIALS": "4"},
    )
    assert config["T"] == 1000
    assert config["trials"] == 4
    assert config["seed"] == 7
    assert config.sources["T"].startswith("file")
    assert config.sources["trials"] == "environment"
    assert config.sources["seed"] == "flag"


def test_environment_seed_override():
    config = parse_config(["variants"], environ={"NAGLAB_SEED": "11"})
    assert config["seed"] == 11
    assert "seed = 11  (environment)" in config.echo()


def test_auto_values_fall_back():
    config = parse_config(["diverge"], environ={})
    assert config["T"] is None
    assert config.get("T", 42) == 42
    assert "T = auto  (default)" in config.echo()


def test_flags_and_debug_after_command():
    config = parse_config(["construct", "--debug", "--out-path", "cr.txt"], environ={})
    assert config.debug
    assert config["out_path"] == Path("cr.txt")


@mark.parametrize(
    "argv",
    [
        ["nonsense"],
        ["construct", "--eta", "2"],
        ["construct", "--eta", "abc"],
        ["construct", "--eps", "0.5"],
        ["uniform", "--n", "3"],
        ["verify", "--T", "0"],
        ["quadnorm", "--T", "1.5"],
        ["quadnorm", "--seed", "-1"],
        ["construct", "--bogus", "1"],
    ],
)
def test_usage_errors(argv):
    with raises(UsageError):
        parse_config(argv, environ={})
    assert main(argv) == 2


def test_config_file_errors(tmp_path):
    unknown = tmp_path / "unknown.cfg"
    unknown.write_text("colour = blue\n", encoding="utf-8")
    broken = tmp_path / "broken.cfg"
    broken.write_text("T 10\n", encoding="utf-8")
    for path in (unknown, broken, tmp_path / "missing.cfg"):
        with raises(UsageError):
            parse_config(["quadnorm", "--config", str(path)], environ={})


def test_guard_turns_failures_into_records():
    report = CheckReport()

    def failing():
        raise CheckFailure("demo.check", 1.0, 2.0, t=3)

    assert _guard(report, "demo", failing) is None
    assert _guard(report, "demo.value", lambda: 0.5) == 0.5
    assert _guard(report, "demo.flag", lambda: True)
    assert [r.name for r in report] == ["demo.check", "demo.value", "demo.flag"]
    assert [r.passed for r in report] == [False, True, True]
    assert report.records[0].context == {"t": 3}


def test_construct_writes_file_and_report(tmp_path, capsys):
    out = tmp_path / "cr.txt"
    report = tmp_path / "report.csv"
    code = main(["construct", *SMALL, "--out-path", str(out), "--report-path", str(report)])
    assert code == 0
    assert out.read_text(encoding="utf-8").splitlines()[0].split()[2] == "1"
    header, rows = read_csv(report)
    assert header == REPORT_HEADER
    assert rows and all(row[1] in ("pass", "info") for row in rows)
    assert "nag-lab construct: PASS" in capsys.readouterr().out


def test_report_lines_go_to_stdout(capsys):
    assert main(["variants", "--trials", "1", "--T", "20"]) == 0
    out = capsys.readouterr().out
    assert ",".join(REPORT_HEADER) in out
    assert "variants.variant1,pass" in out


def test_figure2_zero_steps_writes_header_only(tmp_path):
    out = tmp_path / "fig.csv"
    assert main(["figure2", *SMALL, "--T", "0", "--out-path", str(out)]) == 0
    assert out.read_text(encoding="utf-8") == ",".join(FIGURE_HEADER) + "\n"


def test_figure2_rows(tmp_path, small_construction):
    out = tmp_path / "fig.csv"
    T = small_construction.checkpoints[-1] + 5
    assert main(["figure2", *SMALL, "--T", str(T), "--out-path", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == FIGURE_HEADER
    assert len(rows) == T + 1
    marked = [int(row[0]) for row in rows if row[-1] == "1"]
    assert marked[: len(small_construction.checkpoints)] == list(small_construction.checkpoints)


def test_figure_curve_is_capped_at_floor(small_construction):
    rows = figure_rows(small_construction, construction_series(small_construction, 200))
    assert all(row[3] <= row[4] for row in rows)
    assert rows[0][3] < rows[0][4]
    assert rows[-1][3] == rows[-1][4]


def test_figure2_records_sign_changes(tmp_path, small_construction):
    T = str(small_construction.checkpoints[-1])
    argv = ["figure2", *SMALL, "--T", T, "--out-path", str(tmp_path / "fig.csv")]
    record = run(parse_config(argv, environ={}))
    (changes,) = record.report.named("divergence.sign_changes")
    assert changes.passed
    assert record.results["sign_changes"] >= small_construction.M - 1


def test_failed_computation_is_not_a_usage_error(capsys):
    assert main(["diverge", *SMALL, "--T", "5"]) == 1
    assert "diverge failed" in capsys.readouterr().err


def test_diverge_with_stored_construction(tmp_path, small_construction):
    path = tmp_path / "cr.txt"
    path.write_text(dump_construction(small_construction), encoding="utf-8")
    out = tmp_path / "div.csv"
    assert main(["diverge", "--construction", str(path), "--out-path", str(out)]) == 0
    assert out.exists()


def test_corrupted_construction_fails_with_exit_one(tmp_path, small_construction, capsys):
    lines = dump_construction(small_construction).splitlines()
    j, n_j, a, b = lines[1].split()
    lines[1] = " ".join([j, n_j, a, repr(float(b) + small_construction.params.eps / 2)])
    path = tmp_path / "corrupted.txt"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    assert main(["diverge", "--construction", str(path), "--T", "100"]) == 1
    out = capsys.readouterr().out
    assert "FAIL" in out
    assert "construction.endpoints,fail" in out


def _early_second_interval(cr) -> str:
    lines = dump_construction(cr).splitlines()
    b_1 = float(lines[1].split()[3])
    j, n_j, a, b = lines[2].split()
    lines[2] = " ".join([j, n_j, repr(b_1 + 0.25 * (float(a) - b_1)), b])
    return "\n".join(lines) + "\n"


def test_interval_entered_early_fails_consistency(tmp_path, small_construction, capsys):
    assert small_construction.M >= 2
    path = tmp_path / "early.txt"
    path.write_text(_early_second_interval(small_construction), encoding="utf-8")
    assert main(["diverge", "--construction", str(path), "--T", "100"]) == 1
    assert "construction.consistency,fail" in capsys.readouterr().out


@mark.slow
def test_verify_rejects_corrupted_construction(tmp_path, small_construction, capsys):
    path = tmp_path / "early.txt"
    path.write_text(_early_second_interval(small_construction), encoding="utf-8")
    argv = ["verify", "--construction", str(path), "--trials", "1", "--T", "50"]
    assert main(argv) == 1
    out = capsys.readouterr().out
    assert "nag-lab verify: FAIL" in out
    assert "construction.consistency,fail" in out


def test_uniform_writes_scenario_and_construction(tmp_path):
    out = tmp_path / "uniform.txt"
    assert main(["uniform", "--n", "4", "--out-path", str(out)]) == 0
    assert out.read_text(encoding="utf-8").startswith("n = 4\n")
    assert (tmp_path / "uniform_construction.txt").exists()


def test_quadnorm_small_sweep():
    record = run(parse_config(["quadnorm", "--trials", "2", "--T", "30"], environ={}))
    assert record.passed
    assert record.results["max_norm_ratio"] <= 1.0 + 1e-9
    assert record.report.named("counterexample.norm")
    assert record.exit_code == 0


@mark.slow
def test_verify_all(capsys):
    assert main(["verify", "--trials", "2", "--T", "50"]) == 0
    assert "nag-lab verify: PASS" in capsys.readouterr().out
