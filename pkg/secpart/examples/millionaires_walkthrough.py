"""Walk the millionaires' problem through the whole pipeline: check, corrupt, project, run and simulate."""

import logging
from pathlib import Path

from dotenv import load_dotenv

from secpart.adversary import DummyAdversary
from secpart.enums import ProgramKind, Stage
from secpart.harness import (
    HarnessSettings,
    Pipeline,
    check_functional,
    check_stage,
    env_input_assignments,
    run,
    summarize,
    verdict_frame,
)
from secpart.labels import Attack, HostEnvironment
from secpart.lang import Endpoint, format_program, parse_file
from secpart.semantics import format_trace
from secpart.transform import validate_synthesis

HERE = Path(__file__).parent / "millionaires"


def main() -> None:
    """Validate the choreography, then check every pipeline step under each sample attack."""
    settings = HarnessSettings.from_env(dotenv=False)
    env = HostEnvironment.load(HERE / "hosts.txt")
    hosts = list(env)
    source = parse_file((HERE / "source.prog").read_text(), hosts).stmt
    choreography = parse_file((HERE / "choreography.prog").read_text(), hosts).stmt

    report = validate_synthesis(source, choreography, env)
    print(f"validate: {'ok' if report.ok else report.failures}")

    honest = Pipeline(choreography, env, domain=settings.domain)
    for host, program in honest.distributed.programs.items():
        print(format_program(program.stmt, ProgramKind.DISTRIBUTED, Endpoint.host(host)))

    inputs = next(iter(env_input_assignments(honest.source(), settings.env_domain)))
    print(format_trace(run(honest.target(), DummyAdversary(), inputs).trace))
    print(f"functional: {check_functional(honest.source(), honest.target(), settings.env_domain).passed}")

    verdicts = []
    for name in ("alice_malicious", "bob_malicious", "alice_semi_honest"):
        attack = Attack.parse((HERE / f"{name}.attack").read_text())
        pipeline = Pipeline(choreography, env, attack, settings.domain)
        for stage in Stage:
            verdicts.append(check_stage(pipeline, stage, settings.env_domain, depth=2, branching=settings.branching))
    print(verdict_frame(verdicts).select("attack", "stage", "runs", "passed"))
    print(summarize(verdict_frame(verdicts)))


if __name__ == "__main__":
    # Load SECPART_* settings from a .env file
    load_dotenv()
    logging.basicConfig(level=logging.INFO)
    main()
