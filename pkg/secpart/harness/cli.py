"""Command-line entry point: `secpart <verb> ...`."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from pathlib import Path

from dotenv import load_dotenv

from secpart import Adversary
from secpart.adversary.dummy import DummyAdversary
from secpart.adversary.scripted import Script, ScriptedAdversary, validate_script
from secpart.checking import check_stmt, check_sync
from secpart.enums import ProgramKind, SemanticsMode, Stage
from secpart.errors import SecpartError
from secpart.harness.config import LOG_LEVELS, HarnessSettings
from secpart.harness.reports import summarize, verdict_frame, write_report
from secpart.harness.runner import (
    choreography_config,
    distributed_config,
    make_semantics,
    run,
    source_config,
)
from secpart.harness.simulation import Verdict, rhp_suite, simulation_suite
from secpart.labels import EMPTY_ATTACK, Attack, HostEnvironment, enumerate_attacks
from secpart.lang.parser import Program, parse_file
from secpart.lang.printer import format_program
from secpart.lang.values import ENVIRONMENT, Endpoint, parse_domain, parse_value
from secpart.semantics import Action, Configuration, format_trace, trace_to_json
from secpart.transform import DistributedProgram, corrupt_config, corrupt_stmt, partition, validate_synthesis

logger = logging.getLogger(__name__)

#: Exit status of a check that found a problem.
EXIT_FAILED = 1

#: Exit status of unreadable or invalid input.
EXIT_ERROR = 2

_MODES = {mode.name.lower().replace("_", "-"): mode for mode in SemanticsMode}
_STAGES = [stage.value for stage in Stage]


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--hosts", type=Path, required=True, help="Host declaration file")
    parser.add_argument("--attack", type=Path, help="Attack file; no corruption when omitted")
    parser.add_argument("--json", action="store_true", help="Print a machine-readable report")
    parser.add_argument("--log-level", choices=LOG_LEVELS, type=str.upper, help="Logging level")


def _add_harness(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--depth", type=int, help="Scheduling decisions the adversary family varies")
    parser.add_argument("--branching", type=int, help="Ready channels considered per varied decision")
    parser.add_argument("--domain", type=parse_domain, help="Values the adversary may send, e.g. unit,true,0")
    parser.add_argument("--env-domain", type=parse_domain, help="Values the environment inputs, e.g. 0,1,2")
    parser.add_argument("--csv", type=Path, help="Also write the verdict table to this CSV file")


def build_parser() -> argparse.ArgumentParser:
    """The argument parser of every verb."""
    parser = argparse.ArgumentParser(prog="secpart", description="Secure program partitioning toolkit")
    verbs = parser.add_subparsers(dest="verb", required=True)

    typecheck = verbs.add_parser("typecheck", help="Information-flow check a program")
    typecheck.add_argument("program", type=Path)
    _add_common(typecheck)

    synccheck = verbs.add_parser("synccheck", help="Synchronization check a choreography")
    synccheck.add_argument("program", type=Path)
    _add_common(synccheck)

    validate = verbs.add_parser("validate", help="Check a choreography against its source program")
    validate.add_argument("source", type=Path)
    validate.add_argument("choreography", type=Path)
    _add_common(validate)

    corrupt = verbs.add_parser("corrupt", help="Print the corrupted choreography")
    corrupt.add_argument("program", type=Path)
    _add_common(corrupt)

    project = verbs.add_parser("project", help="Project a choreography onto every host")
    project.add_argument("program", type=Path)
    project.add_argument("-o", "--output", type=Path, help="Directory for the host programs and manifest")
    _add_common(project)

    run_verb = verbs.add_parser("run", help="Run a program against one adversary and print the trace")
    run_verb.add_argument("program", type=Path, help="Program file, or a directory written by `project`")
    run_verb.add_argument("--mode", choices=sorted(_MODES), help="Stepping discipline; by program kind if omitted")
    run_verb.add_argument("--adv", default="dummy", help="Adversary script file, or `dummy`")
    run_verb.add_argument("--inputs", action="append", default=[], help="Environment input `host=value`, repeatable")
    _add_common(run_verb)

    simcheck = verbs.add_parser("simcheck", help="Check that every compilation step is simulated")
    simcheck.add_argument("program", type=Path)
    simcheck.add_argument("--stage", choices=_STAGES, default=Stage.ALL.value, help="Pipeline step to check")
    simcheck.add_argument("--all-attacks", action="store_true", help="Check every valid attack over the atoms")
    _add_common(simcheck)
    _add_harness(simcheck)

    rhpcheck = verbs.add_parser("rhpcheck", help="Check robust preservation under every valid attack")
    rhpcheck.add_argument("program", type=Path)
    _add_common(rhpcheck)
    _add_harness(rhpcheck)
    return parser


# ===== Loading =====


def _load(args: argparse.Namespace) -> tuple[HostEnvironment, Attack]:
    env = HostEnvironment.load(args.hosts)
    attack = Attack.parse(args.attack.read_text()) if args.attack else EMPTY_ATTACK
    attack.check_atoms(env.atoms)
    return env, attack


def _program(path: Path, env: HostEnvironment) -> Program:
    logger.info("Parsing %s", path)
    return parse_file(path.read_text(), list(env))


def _emit(args: argparse.Namespace, payload: dict[str, object], text: str) -> None:
    print(json.dumps(payload, indent=2) if args.json else text)


def _report_text(report_ok: bool, diagnostics: Sequence[object]) -> str:
    return "ok" if report_ok else "\n".join(str(d) for d in diagnostics)


# ===== Verbs =====


def _typecheck(args: argparse.Namespace) -> int:
    env, attack = _load(args)
    report = check_stmt(None, _program(args.program, env).stmt, env, attack)
    _emit(args, report.to_dict(), _report_text(report.ok, report.diagnostics))
    return 0 if report.ok else EXIT_FAILED


def _synccheck(args: argparse.Namespace) -> int:
    env, attack = _load(args)
    report = check_sync(None, _program(args.program, env).stmt, env, attack)
    _emit(args, report.to_dict(), _report_text(report.ok, report.diagnostics))
    return 0 if report.ok else EXIT_FAILED


def _validate(args: argparse.Namespace) -> int:
    env, attack = _load(args)
    source = _program(args.source, env).stmt
    choreography = _program(args.choreography, env).stmt
    report = validate_synthesis(source, choreography, env, attack)
    lines = ["ok"] if report.ok else [f"failed: {', '.join(report.failures)}"]
    if report.extraction_message:
        lines.append(report.extraction_message)
    lines.extend(str(d) for d in [*report.typing.diagnostics, *report.sync.diagnostics])
    _emit(args, report.to_dict(), "\n".join(lines))
    return 0 if report.ok else EXIT_FAILED


def _corrupt(args: argparse.Namespace) -> int:
    env, attack = _load(args)
    corrupted = corrupt_stmt(_program(args.program, env).stmt, env, attack)
    text = format_program(corrupted, ProgramKind.CHOREOGRAPHY)
    _emit(args, {"program": text}, text.rstrip("\n"))
    return 0


def _project(args: argparse.Namespace) -> int:
    env, attack = _load(args)
    distributed = corrupt_config(partition(_program(args.program, env).stmt, env), env, attack)
    if args.output:
        manifest = distributed.write(args.output)
        _emit(args, {"manifest": str(manifest)}, f"wrote {manifest}")
        return 0
    texts = {
        host: format_program(program.stmt, ProgramKind.DISTRIBUTED, Endpoint.host(host))
        for host, program in distributed.programs.items()
    }
    _emit(args, {"programs": texts}, "\n".join(texts.values()).rstrip("\n"))
    return 0


def _run_config(args: argparse.Namespace, env: HostEnvironment, attack: Attack) -> Configuration:
    if args.program.is_dir():
        mode = _MODES[args.mode] if args.mode else SemanticsMode.REAL_CONCURRENT
        return distributed_config(DistributedProgram.load(args.program), make_semantics(mode, env, attack))
    program = _program(args.program, env)
    if program.kind is ProgramKind.SOURCE:
        mode = _MODES[args.mode] if args.mode else SemanticsMode.IDEAL_SEQUENTIAL
        return source_config(program.stmt, make_semantics(mode, env, attack))
    if program.kind is ProgramKind.DISTRIBUTED:
        raise SecpartError("Run a distributed program through the directory `project` wrote")
    mode = _MODES[args.mode] if args.mode else SemanticsMode.REAL_CONCURRENT
    return choreography_config(corrupt_stmt(program.stmt, env, attack), make_semantics(mode, env, attack))


def _inputs(entries: Sequence[str], env: HostEnvironment) -> list[Action]:
    inputs = []
    for entry in entries:
        host, sep, value = entry.partition("=")
        if not sep or host not in env:
            raise SecpartError(f"Expected --inputs <declared host>=<value>, got {entry!r}")
        inputs.append(Action.receive(ENVIRONMENT, Endpoint.host(host), parse_value(value)))
    return inputs


def _run(args: argparse.Namespace) -> int:
    env, attack = _load(args)
    config = _run_config(args, env, attack)
    adversary: Adversary
    if args.adv == "dummy":
        adversary = DummyAdversary()
    else:
        script = Script.load(args.adv)
        report = validate_script(script, env, attack)
        if not report.ok:
            _emit(args, report.to_dict(), _report_text(report.ok, report.diagnostics))
            return EXIT_FAILED
        adversary = ScriptedAdversary(script)
    result = run(config, adversary, _inputs(args.inputs, env))
    payload = {"trace": trace_to_json(result.trace), "env_trace": trace_to_json(result.env_trace)}
    _emit(args, payload, format_trace(result.trace))
    return 0


def _verdicts(args: argparse.Namespace, verdicts: list[Verdict]) -> int:
    if args.csv:
        write_report(verdicts, args.csv)
    frame = verdict_frame(verdicts)
    if args.json:
        print(json.dumps([v.to_dict() for v in verdicts], indent=2))
    else:
        print(frame.select("attack", "stage", "adversaries", "runs", "passed"))
        print(summarize(frame))
        for verdict in verdicts:
            if not verdict.passed:
                print(f"{verdict.stage} under {verdict.attack}: {verdict.detail}")
    return 0 if all(v.passed for v in verdicts) else EXIT_FAILED


def _simcheck(args: argparse.Namespace, settings: HarnessSettings) -> int:
    env, attack = _load(args)
    choreography = _program(args.program, env).stmt
    attacks = list(enumerate_attacks(sorted(env.atoms))) if args.all_attacks else [attack]
    verdicts = simulation_suite(
        choreography,
        env,
        attacks,
        [Stage(args.stage)],
        settings.domain,
        settings.env_domain,
        settings.depth,
        settings.branching,
    )
    return _verdicts(args, verdicts)


def _rhpcheck(args: argparse.Namespace, settings: HarnessSettings) -> int:
    env, _ = _load(args)
    choreography = _program(args.program, env).stmt
    verdicts = rhp_suite(choreography, env, settings.domain, settings.env_domain, settings.depth, settings.branching)
    return _verdicts(args, verdicts)


def main(argv: list[str] | None = None) -> int:
    """Parse arguments, run a verb and return its exit status."""
    load_dotenv()
    args = build_parser().parse_args(argv)
    try:
        settings = HarnessSettings.from_env(dotenv=False).override(
            log_level=args.log_level,
            depth=getattr(args, "depth", None),
            branching=getattr(args, "branching", None),
            domain=getattr(args, "domain", None),
            env_domain=getattr(args, "env_domain", None),
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    logging.basicConfig(level=settings.log_level, format="%(levelname)s %(name)s: %(message)s")
    handlers = {
        "typecheck": _typecheck,
        "synccheck": _synccheck,
        "validate": _validate,
        "corrupt": _corrupt,
        "project": _project,
        "run": _run,
    }
    try:
        if args.verb == "simcheck":
            return _simcheck(args, settings)
        if args.verb == "rhpcheck":
            return _rhpcheck(args, settings)
        return handlers[args.verb](args)
    except (SecpartError, OSError) as exc:
        logger.debug("Command failed", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
