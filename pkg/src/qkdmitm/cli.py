"""Command-line entry point: ``qkdmitm run`` and ``qkdmitm montecarlo``.

Exit codes: 0 completed, 1 configuration/usage/I-O error, 2 policy abort.
"""
from __future__ import annotations

import argparse
import os
import sys

from .adversary import EveStrategy, StrategyKind
from .campaign import reports_to_csv, run_campaign
from .channels import (
    ConfigurationError,
    MessageOrdering,
    PolicyConfig,
    SessionConfig,
    load_fixture,
    run_session,
)
from .protocol import Mode
from .render import render_csv, render_table

SCENARIOS = ["bb84", "intercept-z", "intercept-x", "intercept-random", "attack1", "attack2"]
EXIT_OK, EXIT_ERROR, EXIT_ABORT = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scenario", choices=SCENARIOS)
    p.add_argument("--qubits", type=int, help="number of qubits 2n (even, >= 2)")
    p.add_argument("--mode", choices=[m.value for m in Mode], default="symbolic")
    p.add_argument("--policy", choices=["none", "single-send", "ordered-basis", "both"], default="none")
    p.add_argument("--seed", type=int, help="64-bit seed (falls back to $QKD_SEED, then 0)")
    p.add_argument("--fixture", help="named golden fixture, e.g. paper-table-1")
    p.add_argument("--copies", type=int, default=1, help="attack1 passes per basis")
    p.add_argument("--sample-fraction", type=float, default=0.5)
    p.add_argument("--sample-size", type=int, help="compare exactly this many sifted bits")
    p.add_argument("--qber-threshold", type=float, default=0.0)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qkdmitm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one session and print its trace")
    _common(run)
    run.add_argument("--format", choices=["table", "json", "csv"], default="table")
    run.add_argument("--unicode", action="store_true", help="ket glyphs in table output")

    mc = sub.add_parser("montecarlo", help="run many seeded sessions and aggregate")
    _common(mc)
    mc.add_argument("--trials", type=int, required=True)
    mc.add_argument("--format", choices=["json", "csv"])
    mc.add_argument("--out", help="report path (.json or .csv)")
    mc.add_argument("--jobs", type=int, default=1)
    return parser


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("QKD_SEED")
    if env is None:
        return 0
    try:
        return int(env, 0)
    except ValueError:
        raise UsageError(f"QKD_SEED is not an integer: {env!r}") from None


def config_from_args(args, *, campaign: bool = False) -> SessionConfig:
    scenario = args.scenario
    fixture = load_fixture(args.fixture) if args.fixture else None
    if scenario is None:
        scenario = fixture.get("scenario", "bb84") if fixture else "bb84"
    if args.copies < 1:
        raise UsageError("--copies must be >= 1")

    ordering = MessageOrdering.standard()
    adversary = None
    if scenario == "attack1":
        adversary = EveStrategy.attack1(args.copies)
        ordering = MessageOrdering.retransmit(2 * args.copies)
    elif scenario == "attack2":
        adversary = EveStrategy(StrategyKind.ATTACK2)
        ordering = MessageOrdering.early_basis()
    elif scenario != "bb84":
        kind = {
            "intercept-z": StrategyKind.INTERCEPT_ALL_I,
            "intercept-x": StrategyKind.INTERCEPT_ALL_H,
            "intercept-random": StrategyKind.INTERCEPT_RANDOM,
        }[scenario]
        adversary = EveStrategy(kind)

    policy = PolicyConfig.named(
        args.policy,
        sample_fraction=args.sample_fraction,
        qber_threshold=args.qber_threshold,
        sample_size=args.sample_size,
    )
    common = dict(
        mode=Mode(args.mode),
        ordering=ordering,
        adversary=adversary,
        policy=policy,
        seed=_seed(args),
    )
    if fixture is not None:
        if args.qubits is not None and args.qubits != fixture["length"]:
            raise UsageError(f"fixture {args.fixture} has {fixture['length']} qubits")
        cfg = SessionConfig.from_fixture(args.fixture, with_eve_guesses=not campaign, **common)
    else:
        cfg = SessionConfig(length=8 if args.qubits is None else args.qubits, **common)
    cfg.validate()
    return cfg


def _cmd_run(args) -> int:
    cfg = config_from_args(args)
    t = run_session(cfg)
    if args.format == "json":
        sys.stdout.write(t.to_jsonl())
    elif args.format == "csv":
        sys.stdout.write(render_csv(t))
    else:
        sys.stdout.write(render_table(t, unicode=args.unicode))
    return EXIT_ABORT if t.aborted else EXIT_OK


def _cmd_montecarlo(args) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    if args.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    cfg = config_from_args(args, campaign=True)
    scenario = args.scenario or (load_fixture(args.fixture).get("scenario") if args.fixture else "bb84")
    report = run_campaign(cfg, args.trials, cfg.seed, jobs=args.jobs, scenario=scenario)
    fmt = args.format
    if fmt is None:
        fmt = "json" if args.out and args.out.endswith(".json") else "csv"
    text = report.to_json() if fmt == "json" else reports_to_csv([report])
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"qkdmitm: cannot write {args.out}: {exc}", file=sys.stderr)
            return EXIT_ERROR
    elif args.format:
        # stdout carries the machine-readable report; keep it parseable
        sys.stdout.write(text)
        print(report.summary(), file=sys.stderr)
        return EXIT_OK
    print(report.summary())
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_montecarlo(args)
    except (UsageError, ConfigurationError, ValueError) as exc:
        parser.print_usage(sys.stderr)
        print(f"qkdmitm: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
