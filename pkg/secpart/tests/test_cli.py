"""Tests for the command-line verbs."""

import json
from pathlib import Path

import pytest

from secpart.harness.cli import EXIT_ERROR, EXIT_FAILED, main
from secpart.lang import alpha_equal, parse_file

EXAMPLES = Path(__file__).resolve().parent.parent / "examples"
MILLIONAIRES = EXAMPLES / "millionaires"
HOSTS = ["--hosts", str(MILLIONAIRES / "hosts.txt")]


@pytest.fixture(autouse=True)
def _isolated(monkeypatch: pytest.MonkeyPatch, tmp_path: Path) -> None:
    """Keep stray `.env` files and SECPART_* variables out of the tests."""
    monkeypatch.chdir(tmp_path)
    for name in ("DOMAIN", "ENV_DOMAIN", "DEPTH", "BRANCHING", "LOG_LEVEL"):
        monkeypatch.delenv(f"SECPART_{name}", raising=False)


def _program(name: str) -> str:
    return str(MILLIONAIRES / name)


# ===== Static checks =====


def test_typecheck_json(capsys: pytest.CaptureFixture[str]) -> None:
    """Test a machine-readable typing report."""
    assert main(["typecheck", _program("choreography.prog"), *HOSTS, "--json"]) == 0
    assert json.loads(capsys.readouterr().out) == {"ok": True, "diagnostics": []}


def test_synccheck_reports_missing_sync(capsys: pytest.CaptureFixture[str]) -> None:
    """Test that an unsynchronized output fails the check."""
    assert main(["synccheck", _program("choreography_nosync.prog"), *HOSTS]) == EXIT_FAILED
    assert "Sync-External" in capsys.readouterr().out


@pytest.mark.parametrize(
    ("choreography", "status", "first_line"),
    [("choreography.prog", 0, "ok"), ("choreography_nosync.prog", EXIT_FAILED, "failed: sync")],
)
def test_validate(capsys: pytest.CaptureFixture[str], choreography: str, status: int, first_line: str) -> None:
    """Test synthesis validation of both millionaires' choreographies."""
    assert main(["validate", _program("source.prog"), _program(choreography), *HOSTS]) == status
    assert capsys.readouterr().out.splitlines()[0] == first_line


# ===== Transformations =====


def test_corrupt_equivocation(capsys: pytest.CaptureFixture[str]) -> None:
    """Test that the printed corruption parses back to the expected choreography."""
    folder = EXAMPLES / "equivocation"
    args = ["corrupt", str(folder / "choreography.prog"), "--hosts", str(folder / "hosts.txt")]
    assert main([*args, "--attack", str(folder / "alice_malicious.attack")]) == 0
    printed = parse_file(capsys.readouterr().out).stmt
    assert alpha_equal(printed, parse_file((folder / "corrupted.prog").read_text()).stmt)


def test_project_prints_every_host(capsys: pytest.CaptureFixture[str]) -> None:
    """Test projection to standard output, minus the hosts the attack controls."""
    attack = ["--attack", _program("alice_malicious.attack")]
    assert main(["project", _program("choreography.prog"), *HOSTS, *attack]) == 0
    out = capsys.readouterr().out
    assert "host = alice" not in out
    assert "host = bob" in out
    assert "host = mpc" in out


def test_project_then_run(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    """Test running the directory that projection writes."""
    assert main(["project", _program("choreography.prog"), *HOSTS, "-o", str(tmp_path / "out")]) == 0
    assert (tmp_path / "out" / "mpc.prog").exists()
    capsys.readouterr()
    inputs = ["--inputs", "alice=1", "--inputs", "bob=2"]
    assert main(["run", str(tmp_path / "out"), *HOSTS, *inputs, "--json"]) == 0
    env_trace = json.loads(capsys.readouterr().out)["env_trace"]
    assert len(env_trace) == 4


# ===== Runs =====


def test_run_source(capsys: pytest.CaptureFixture[str]) -> None:
    """Test the trace of the source program under the dummy adversary."""
    assert main(["run", _program("source.prog"), *HOSTS, "--inputs", "alice=1", "--inputs", "bob=2"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[:2] == ["in env->alice 1", "in env->bob 2"]
    assert [line for line in lines if line.endswith("->env true")] == ["out alice->env true", "out bob->env true"]


def test_run_rejects_invalid_script(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    """Test that a script forging an honest host's message is refused before running."""
    script = tmp_path / "forge.adv"
    script.write_text("emit alice->mpc 1\n")
    assert main(["run", _program("choreography.prog"), *HOSTS, "--adv", str(script)]) == EXIT_FAILED
    assert "Adv-Forge" in capsys.readouterr().out


# ===== Harness verbs =====


def test_simcheck_json(capsys: pytest.CaptureFixture[str]) -> None:
    """Test a shallow end-to-end simulation check."""
    args = ["simcheck", _program("choreography.prog"), *HOSTS, "--depth", "1", "--env-domain", "0", "--json"]
    assert main(args) == 0
    (verdict,) = json.loads(capsys.readouterr().out)
    assert verdict["stage"] == "all"
    assert verdict["passed"] is True


def test_simcheck_finds_reordering(capsys: pytest.CaptureFixture[str]) -> None:
    """Test that the missing sync message is caught end to end."""
    args = ["simcheck", _program("choreography_nosync.prog"), *HOSTS, "--depth", "6", "--env-domain", "0"]
    assert main(args) == EXIT_FAILED
    assert "all under" in capsys.readouterr().out


def test_rhpcheck_writes_csv(tmp_path: Path) -> None:
    """Test robust preservation over every attack with a CSV report."""
    report = tmp_path / "rhp.csv"
    args = ["rhpcheck", _program("choreography.prog"), *HOSTS, "--depth", "1", "--branching", "1"]
    assert main([*args, "--domain", "unit,0", "--env-domain", "0", "--csv", str(report)]) == 0
    assert len(report.read_text().splitlines()) == 10


# ===== Errors =====


def test_missing_file(capsys: pytest.CaptureFixture[str]) -> None:
    """Test that unreadable input is an error, not a failed check."""
    assert main(["typecheck", "missing.prog", *HOSTS]) == EXIT_ERROR
    assert capsys.readouterr().err.startswith("error:")


def test_attack_with_unknown_atoms(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    """Test that attacks must use the hosts' atoms."""
    attack = tmp_path / "bad.attack"
    attack.write_text("public = [C]\nuntrusted = []\n")
    assert main(["typecheck", _program("choreography.prog"), *HOSTS, "--attack", str(attack)]) == EXIT_ERROR
    assert "unknown atoms ['C']" in capsys.readouterr().err


def test_inputs_for_undeclared_host(capsys: pytest.CaptureFixture[str]) -> None:
    """Test that inputs name a declared host."""
    assert main(["run", _program("source.prog"), *HOSTS, "--inputs", "carol=1"]) == EXIT_ERROR
    assert "carol=1" in capsys.readouterr().err


def test_bad_setting_from_environment(monkeypatch: pytest.MonkeyPatch, capsys: pytest.CaptureFixture[str]) -> None:
    """Test that invalid SECPART_* variables stop the command."""
    monkeypatch.setenv("SECPART_DEPTH", "-1")
    assert main(["typecheck", _program("choreography.prog"), *HOSTS]) == EXIT_ERROR
    assert "depth must be non-negative" in capsys.readouterr().err
