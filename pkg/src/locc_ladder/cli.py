"""Command-line front end.

Each invocation reads one JSON problem document from stdin and writes one
result document (JSON transcript or human-readable text) to stdout.

Exit codes: 0 success, 1 input error, 2 majorization fails,
3 pair is feasible but the ladder construction is not.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional, Sequence, TextIO

from .errors import LadderInfeasible, LoccLadderError, NotMajorized, ValidationError
from .ladder import InfeasibilityCertificate, greatest_first_chain, plan_full
from .oracle import sample_trajectories, verify_plan
from .schmidt import majorizes
from .transcript import (
    ProblemSpec,
    Transcript,
    certificate_section,
    chain_section,
    frequencies_section,
    majorization_section,
    steps_section,
    verification_section,
)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NOT_MAJORIZED = 2
EXIT_LADDER_INFEASIBLE = 3

SEED_ENV_VAR = "DLT_SEED"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="locc-ladder",
        description=(
            "Plan, simulate and verify deterministic transformations of "
            "bipartite pure states. Reads a JSON problem document "
            '{"source": [...], "target": [...]} from stdin.'
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument(
            "--squared",
            action="store_true",
            help="interpret input entries as squared coefficients",
        )
        p.add_argument(
            "--autosort",
            action="store_true",
            help="sort unsorted input instead of rejecting it",
        )
        p.add_argument(
            "--format",
            choices=("human", "machine"),
            default="human",
            help="human-readable text or the JSON transcript",
        )

    common(sub.add_parser("check", help="test the majorization condition"))
    common(sub.add_parser("plan", help="build and verify the full ladder plan"))

    sim = sub.add_parser("simulate", help="Monte Carlo sample plan trajectories")
    common(sim)
    sim.add_argument("--shots", type=int, default=10000, help="number of trajectories")
    sim.add_argument(
        "--seed",
        type=int,
        default=None,
        help=f"master seed (default: ${SEED_ENV_VAR} or 0)",
    )
    sim.add_argument(
        "--workers", type=int, default=1, help="worker threads for sampling"
    )

    demo = sub.add_parser(
        "demo-infeasible",
        help="show why transforming the greatest coefficients first breaks down",
    )
    common(demo)
    demo.add_argument(
        "--m", type=int, default=2, help="block size for the demonstrator chain"
    )
    return parser


def _read_problem(args, stdin: TextIO) -> ProblemSpec:
    text = stdin.read()
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"stdin is not valid JSON: {exc}") from exc
    return ProblemSpec.from_payload(
        payload, squared=args.squared, autosort=args.autosort
    )


def _emit(transcript: Transcript, args, stdout: TextIO, human_lines) -> None:
    if args.format == "machine":
        stdout.write(transcript.to_json())
    else:
        for line in human_lines:
            stdout.write(line + "\n")


def _fmt_state(squares) -> str:
    return "(" + ", ".join(f"{x:.12g}" for x in squares) + ")"


def cmd_check(args, stdin: TextIO, stdout: TextIO) -> int:
    spec = _read_problem(args, stdin)
    source, target = spec.parse()
    report = majorizes(source, target)
    transcript = Transcript(
        command="check",
        problem=spec.echo(),
        majorization=majorization_section(report),
    )
    lines = [
        f"source  lambda = {_fmt_state(source.squares)}",
        f"target  lambda = {_fmt_state(target.squares)}",
        f"majorization holds: {report.holds}",
    ]
    if not report.holds:
        lines.append(f"first failing tail index k = {report.failing_k}")
    _emit(transcript, args, stdout, lines)
    return EXIT_OK if report.holds else EXIT_NOT_MAJORIZED


def cmd_plan(args, stdin: TextIO, stdout: TextIO) -> int:
    spec = _read_problem(args, stdin)
    source, target = spec.parse()
    report = majorizes(source, target)
    if not report.holds:
        transcript = Transcript(
            command="plan",
            problem=spec.echo(),
            majorization=majorization_section(report),
        )
        _emit(
            transcript,
            args,
            stdout,
            [f"majorization fails at k={report.failing_k}; no deterministic plan"],
        )
        return EXIT_NOT_MAJORIZED
    try:
        plan = plan_full(source, target)
    except LadderInfeasible as exc:
        transcript = Transcript(
            command="plan",
            problem=spec.echo(),
            majorization=majorization_section(report),
            certificate=certificate_section(exc.certificate),
            note="pair is majorization-feasible but the ladder construction is not",
        )
        _emit(
            transcript,
            args,
            stdout,
            [
                "majorization holds, but the smallest-first ladder cannot",
                "realize this pair:",
                f"  {exc.certificate}",
            ],
        )
        return EXIT_LADDER_INFEASIBLE
    verification = verify_plan(plan)
    transcript = Transcript(
        command="plan",
        problem=spec.echo(),
        majorization=majorization_section(report),
        chain=chain_section(plan.chain),
        steps=steps_section(plan),
        verification=verification_section(verification),
    )
    lines = [
        f"majorization holds; plan has {len(plan.steps)} step(s)",
    ]
    for k, step in enumerate(plan.steps):
        probs = ", ".join(f"{br.prob:.12g}" for br in step.branches)
        window = "all" if step.window is None else str(list(step.window))
        lines.append(
            f"step {k}: {step.case_tag} on indices {window}, outcome probs [{probs}]"
        )
    lines.append(
        f"verification: {'PASS' if verification.passed else 'FAIL'}"
        f" (max deviation {verification.max_deviation:.3e})"
    )
    _emit(transcript, args, stdout, lines)
    return EXIT_OK if verification.passed else EXIT_INPUT


def cmd_simulate(args, stdin: TextIO, stdout: TextIO) -> int:
    if args.shots < 1:
        raise ValidationError(f"--shots must be >= 1, got {args.shots}")
    if args.workers < 1:
        raise ValidationError(f"--workers must be >= 1, got {args.workers}")
    seed = args.seed
    if seed is None:
        env = os.environ.get(SEED_ENV_VAR)
        try:
            seed = int(env) if env is not None else 0
        except ValueError as exc:
            raise ValidationError(f"${SEED_ENV_VAR}={env!r} is not an integer") from exc
    spec = _read_problem(args, stdin)
    source, target = spec.parse()
    report = majorizes(source, target)
    if not report.holds:
        _emit(
            Transcript(
                command="simulate",
                problem=spec.echo(),
                majorization=majorization_section(report),
            ),
            args,
            stdout,
            [f"majorization fails at k={report.failing_k}; nothing to simulate"],
        )
        return EXIT_NOT_MAJORIZED
    try:
        plan = plan_full(source, target)
    except LadderInfeasible as exc:
        _emit(
            Transcript(
                command="simulate",
                problem=spec.echo(),
                majorization=majorization_section(report),
                certificate=certificate_section(exc.certificate),
            ),
            args,
            stdout,
            [f"ladder construction infeasible: {exc.certificate}"],
        )
        return EXIT_LADDER_INFEASIBLE
    verification = verify_plan(plan)
    freq = sample_trajectories(plan, args.shots, seed, workers=args.workers)
    transcript = Transcript(
        command="simulate",
        problem=spec.echo(),
        majorization=majorization_section(report),
        chain=chain_section(plan.chain),
        steps=steps_section(plan),
        verification=verification_section(verification),
        seed=seed,
        shots=args.shots,
        frequencies=frequencies_section(freq),
    )
    lines = [
        f"simulated {args.shots} trajectories with seed {seed}",
        f"target arrival rate: {freq.match_rate:.6f}"
        f" (max final deviation {freq.max_final_dev:.3e})",
    ]
    for k, freqs in enumerate(freq.branch_frequencies):
        shown = ", ".join(f"{f:.6f}" for f in freqs)
        lines.append(f"step {k} branch frequencies: [{shown}]")
    _emit(transcript, args, stdout, lines)
    return EXIT_OK


def cmd_demo_infeasible(args, stdin: TextIO, stdout: TextIO) -> int:
    if args.m < 2:
        raise ValidationError(f"--m must be >= 2, got {args.m}")
    spec = _read_problem(args, stdin)
    source, target = spec.parse()
    report = majorizes(source, target)
    if not report.holds:
        _emit(
            Transcript(
                command="demo-infeasible",
                problem=spec.echo(),
                majorization=majorization_section(report),
            ),
            args,
            stdout,
            [f"majorization fails at k={report.failing_k}"],
        )
        return EXIT_NOT_MAJORIZED
    result = greatest_first_chain(source, target, args.m)
    if isinstance(result, InfeasibilityCertificate):
        transcript = Transcript(
            command="demo-infeasible",
            problem=spec.echo(),
            majorization=majorization_section(report),
            certificate=certificate_section(result),
        )
        lines = [
            "greatest-first construction is infeasible:",
            f"  {result}",
        ]
    else:
        transcript = Transcript(
            command="demo-infeasible",
            problem=spec.echo(),
            majorization=majorization_section(report),
            chain=chain_section(result),
            note="greatest-first chain is feasible for this pair",
        )
        lines = ["greatest-first chain is feasible for this pair:"]
        for k, state in enumerate(result.states):
            lines.append(f"  state {k}: lambda = {_fmt_state(state.squares)}")
    _emit(transcript, args, stdout, lines)
    return EXIT_OK


_COMMANDS = {
    "check": cmd_check,
    "plan": cmd_plan,
    "simulate": cmd_simulate,
    "demo-infeasible": cmd_demo_infeasible,
}


def main(
    argv: Optional[Sequence[str]] = None,
    stdin: Optional[TextIO] = None,
    stdout: Optional[TextIO] = None,
    stderr: Optional[TextIO] = None,
) -> int:
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args, stdin, stdout)
    except NotMajorized as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_NOT_MAJORIZED
    except LadderInfeasible as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_LADDER_INFEASIBLE
    except (LoccLadderError, ValueError) as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
