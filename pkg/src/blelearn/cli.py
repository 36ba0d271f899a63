"""Operator entry point.

Subcommands: learn (run a session against a simulated target), compare
(two DOT models), fingerprint (derive a distinguishing sequence from a
model directory), export-models (write catalog models as DOT), catalog
(print the manifest).

Exit codes: 0 success, 1 domain failure (learning abort, non-distinct
fingerprint, inequivalent models), 2 usage error. Every flag can be
preset through a BLELEARN_<NAME> environment variable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import catalog, fingerprint, mealy
from .oracle import OracleConfig
from .robust import RobustConfig
from .runner import RunConfig, run_learning
from .session import ChannelNoiseConfig

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2


def _env(name, default=None):
    return os.environ.get(f"BLELEARN_{name.upper().replace('-', '_')}", default)


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="blelearn",
        description="Learn, compare and fingerprint simulated BLE peripherals")
    sub = p.add_subparsers(dest="command", required=True)

    learn = sub.add_parser("learn", help="learn one target's behavior model")
    learn.add_argument("--target", default=_env("target"),
                       help="SoC id, e.g. cc2650")
    learn.add_argument("--procedure", default=_env("procedure", "connection"),
                       choices=["connection", "pairing"])
    learn.add_argument("--loss", type=float, default=float(_env("loss", 0.0)))
    learn.add_argument("--delay", type=float, default=float(_env("delay", 0.0)))
    learn.add_argument("--seed", type=int, default=int(_env("seed", 0)))
    learn.add_argument("--n-test", type=int, default=_env("n-test"))
    learn.add_argument("--n-len", type=int, default=_env("n-len"))
    learn.add_argument("--n-error", type=int, default=_env("n-error"))
    learn.add_argument("--n-cache", type=int, default=_env("n-cache"))
    learn.add_argument("--n-nondet", type=int, default=_env("n-nondet"))
    learn.add_argument("--quirks", default=_env("quirks", "off"),
                       choices=["on", "off"])
    learn.add_argument("--drop", action="append", default=[],
                       metavar="SYMBOL",
                       help="remove an input from the learning alphabet")
    learn.add_argument("--out", default=_env("out"),
                       help="write the learned model as DOT")
    learn.add_argument("--stats", default=_env("stats"),
                       help="write the run statistics as JSON")
    learn.add_argument("--dump-suite", default=_env("dump-suite"),
                       help="write the last conformance suite, one trace "
                            "per line")

    cmp_ = sub.add_parser("compare", help="check two DOT models for "
                                          "equivalence")
    cmp_.add_argument("model_a")
    cmp_.add_argument("model_b")

    fp = sub.add_parser("fingerprint", help="derive a fingerprinting "
                                            "sequence from DOT models")
    fp.add_argument("--models-dir", required=True)
    fp.add_argument("--out", default=_env("out"))

    exp = sub.add_parser("export-models", help="write catalog device models "
                                               "as DOT files")
    exp.add_argument("--out-dir", required=True)
    exp.add_argument("--procedure", default="connection",
                     choices=["connection", "pairing"])
    exp.add_argument("--view", default="device",
                     choices=["device", "reference"])

    sub.add_parser("catalog", help="print the catalog manifest as JSON")
    return p


def _robust_config(args, procedure) -> RobustConfig | None:
    fields = {}
    for name in ("n_error", "n_cache", "n_nondet"):
        v = getattr(args, name)
        if v is not None:
            fields[name] = int(v)
    if not fields:
        return None
    from .robust import CONNECTION_DEFAULTS, PAIRING_DEFAULTS
    base = PAIRING_DEFAULTS if procedure == "pairing" else CONNECTION_DEFAULTS
    return RobustConfig(
        n_error=fields.get("n_error", base.n_error),
        n_cache=fields.get("n_cache", base.n_cache),
        n_nondet=fields.get("n_nondet", base.n_nondet))


def cmd_learn(args) -> int:
    if not args.target:
        print("error: --target is required", file=sys.stderr)
        return EXIT_USAGE
    try:
        catalog.entry(args.target, args.procedure)
    except catalog.UnknownTargetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    oracle_fields = {}
    if args.n_test is not None:
        oracle_fields["n_test"] = int(args.n_test)
    if args.n_len is not None:
        oracle_fields["n_len"] = int(args.n_len)
    cfg = RunConfig(
        target=args.target,
        procedure=args.procedure,
        noise=ChannelNoiseConfig(args.loss, args.delay, args.seed),
        robust=_robust_config(args, args.procedure),
        oracle=OracleConfig(seed=args.seed, **oracle_fields),
        quirks_on=args.quirks == "on",
        drop_inputs=tuple(args.drop),
    )
    result = run_learning(cfg)
    stats_doc = result.stats.as_dict(None)
    for key, value in result.counters.items():
        if key in stats_doc:
            stats_doc[key] = value
    stats_doc["target"] = catalog.entry(args.target, args.procedure).soc_id
    stats_doc["procedure"] = args.procedure
    stats_doc["seed"] = args.seed
    if args.stats:
        Path(args.stats).write_text(
            json.dumps(stats_doc, indent=2, sort_keys=True) + "\n")
    if args.dump_suite:
        Path(args.dump_suite).write_text(
            "\n".join(" ".join(t) for t in result.suite) + "\n")
    if result.aborted:
        print(f"aborted: {result.aborted}")
        for key in ("nondet_outputs", "connection_errors", "hard_resets",
                    "cache_updates"):
            print(f"  {key}: {result.counters.get(key, 0)}")
        return EXIT_DOMAIN
    if args.out:
        Path(args.out).write_text(mealy.to_dot(result.machine))
    print(f"learned {stats_doc['states']} states in "
          f"{stats_doc['learning_rounds']} round(s); "
          f"{stats_doc['output_queries']} output queries, "
          f"{stats_doc['conformance_tests']} conformance tests")
    return EXIT_OK


def cmd_compare(args) -> int:
    try:
        a = mealy.from_dot(Path(args.model_a).read_text())
        b = mealy.from_dot(Path(args.model_b).read_text())
    except (OSError, mealy.MealyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        cex = mealy.equivalent(a, b)
    except mealy.AlphabetMismatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if cex is None:
        print("equivalent")
        return EXIT_OK
    print("separating sequence: " + " ".join(cex))
    print("outputs A: " + " ".join(mealy.run(a, cex)))
    print("outputs B: " + " ".join(mealy.run(b, cex)))
    return EXIT_DOMAIN


def cmd_fingerprint(args) -> int:
    models = []
    model_dir = Path(args.models_dir)
    if not model_dir.is_dir():
        print(f"error: not a directory: {model_dir}", file=sys.stderr)
        return EXIT_USAGE
    for path in sorted(model_dir.glob("*.dot")):
        try:
            models.append((path.stem, mealy.from_dot(path.read_text())))
        except mealy.MealyError as exc:
            print(f"error: {path.name}: {exc}", file=sys.stderr)
            return EXIT_USAGE
    if not models:
        print("error: no .dot models found", file=sys.stderr)
        return EXIT_USAGE
    try:
        report = fingerprint.derive_fingerprint(models)
    except (fingerprint.FingerprintError,
            mealy.AlphabetMismatchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.out:
        Path(args.out).write_text(report.dump() + "\n")
    if not report.distinct:
        a, b = report.indistinguishable_pair
        print(f"not distinct: {a} and {b} are behaviorally equivalent")
        return EXIT_DOMAIN
    print("fingerprint sequence: " + " ".join(report.sequence))
    return EXIT_OK


def cmd_export_models(args) -> int:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    count = 0
    for e in catalog.entries():
        if e.procedure != args.procedure:
            continue
        machine = (catalog.device_machine(e.soc_id, e.procedure)
                   if args.view == "device" else e.reference_machine())
        (out / f"{e.soc_id}.dot").write_text(mealy.to_dot(machine))
        count += 1
    print(f"wrote {count} models to {out}")
    return EXIT_OK


def cmd_catalog(_args) -> int:
    print(json.dumps(catalog.manifest(), indent=2))
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    handlers = {
        "learn": cmd_learn,
        "compare": cmd_compare,
        "fingerprint": cmd_fingerprint,
        "export-models": cmd_export_models,
        "catalog": cmd_catalog,
    }
    try:
        return handlers[args.command](args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
