"""Command-line entry point: attack / ablate / verify subcommands.

Exit codes: 0 success, 1 usage or config error, 2 attack below threshold,
3 verification failure.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .attack import ConfigError, run_attack, variant_wiring, write_trace
from .config import (attack_config_from, config_hash, load_config,
                     oracle_spec_from, suite_from)
from .io import export_png, write_zgv
from .metrics import format_summary
from .oracle import make_surrogate
from .probes import run_verification
from .suite import oracle_from_spec, run_suite


def _write_manifest(out_dir: Path, sections: dict, seed: int, extra: dict) -> None:
    lines = [
        f"config_hash = {config_hash(sections)}",
        f"seed = {seed}",
        f"version = {__version__}",
        f"timestamp = {time.strftime('%Y-%m-%dT%H:%M:%SZ', time.gmtime())}",
        "layout = manifest.txt, trace.rows, vectors/*.zgv, exports/*.png",
    ]
    lines += [f"{k} = {v}" for k, v in extra.items()]
    (out_dir / "manifest.txt").write_text("\n".join(lines) + "\n")


def cmd_attack(args) -> int:
    sections = load_config(args.config)
    spec = oracle_spec_from(sections)
    config = attack_config_from(sections)
    if args.seed is not None:
        sections.setdefault("attack", {})["seed"] = str(args.seed)
        config = config.override(seed=args.seed)

    oracle = oracle_from_spec(spec)
    suite = suite_from(sections)  # reuses [suite] input_lo/hi for x0 generation
    input_sec = sections.get("input", {})
    if "path" in input_sec:
        from .io import read_zgv
        x0 = read_zgv(input_sec["path"])
    else:
        x0 = suite.input_vector(0, oracle.n)

    surrogate = None
    if variant_wiring(config.variant).prior == "transfer":
        surrogate = make_surrogate(oracle, config.surrogate_scale,
                                   suite.seed + 997)

    result, trace = run_attack(oracle, x0, config, surrogate=surrogate)

    out_dir = Path(args.out)
    vec_dir = out_dir / "vectors"
    vec_dir.mkdir(parents=True, exist_ok=True)
    write_trace(out_dir / "trace.rows", trace)
    write_zgv(vec_dir / "x0.zgv", x0)

    x_star = result.final_x if result.final_x is not None else x0
    write_zgv(vec_dir / "x_star.zgv", x_star)

    if args.export_png and oracle.shape is not None:
        exp = out_dir / "exports"
        exp.mkdir(exist_ok=True)
        export_png(exp / "original.png", x0, oracle.shape)
        export_png(exp / "attacked.png", x_star, oracle.shape)
        export_png(exp / "expected.png", np.clip(oracle.raw(x0), 0, 1),
                   oracle.shape)
        export_png(exp / "nullified.png", np.clip(oracle.raw(x_star), 0, 1),
                   oracle.shape)

    _write_manifest(out_dir, sections, config.seed, {
        "success": str(result.success).lower(),
        "score": format(result.final_score, ".17g"),
        "queries": str(result.queries),
        "iterations": str(result.iterations),
    })
    print(f"success={result.success} score={result.final_score:.4f} "
          f"queries={result.queries}")
    return 0 if result.success else 2


def cmd_ablate(args) -> int:
    sections = load_config(args.config)
    suite = suite_from(sections)
    if args.seed is not None:
        sections.setdefault("suite", {})["seed"] = str(args.seed)
        suite.seed = args.seed
    out_dir = Path(args.out)
    trace_dir = out_dir / "traces"
    out_dir.mkdir(parents=True, exist_ok=True)

    rows, _records = run_suite(suite, parallel=args.parallel,
                               trace_dir=trace_dir)
    table = format_summary(rows)
    print(table)
    (out_dir / "summary.rows").write_text(table + "\n")
    _write_manifest(out_dir, sections, suite.seed,
                    {"runs": str(sum(r.runs for r in rows))})
    return 0


def cmd_verify(args) -> int:
    reports = run_verification(args.level)
    ok = True
    for rep in reports:
        print(rep.line())
        ok = ok and rep.passed
    return 0 if ok else 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nullattack",
        description="Constrained zeroth-order nullifying attacks on "
                    "image-translation oracles.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_attack = sub.add_parser("attack", help="run a single attack")
    p_attack.add_argument("--config", required=True)
    p_attack.add_argument("--seed", type=int, default=None,
                          help="override the config seed")
    p_attack.add_argument("--out", default="out")
    p_attack.add_argument("--export-png", action="store_true")
    p_attack.set_defaults(func=cmd_attack)

    p_ablate = sub.add_parser("ablate", help="run the variant ablation suite")
    p_ablate.add_argument("--config", required=True)
    p_ablate.add_argument("--seed", type=int, default=None)
    p_ablate.add_argument("--out", default="out")
    p_ablate.add_argument("--parallel", type=int,
                          default=os.cpu_count() or 1)
    p_ablate.set_defaults(func=cmd_ablate)

    p_verify = sub.add_parser("verify", help="run the property probes")
    p_verify.add_argument("--level", choices=("fast", "full"), default="fast")
    p_verify.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
