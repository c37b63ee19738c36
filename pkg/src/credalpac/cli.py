"""Command-line entry point.

Exit codes: 0 success, 1 invalid input, 2 a campaign found an analytic bound
exceeded beyond Monte Carlo slack.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import bounds
from .complexity import LossClass, empirical_rademacher_exact, empirical_rademacher_mc, rademacher_complexity
from .core import is_realisable, sample_dataset
from .credal import per_vertex_minimisers, realisability_report
from .errors import ConfigError
from .harness.campaign import estimate_violation_probability, select_training_distribution
from .harness.config import ExperimentConfig, Instance, from_dict, load_config
from .harness.report import emit_report

EXIT_OK, EXIT_INVALID, EXIT_VIOLATED = 0, 1, 2

log = logging.getLogger("credalpac")


def _load(args) -> ExperimentConfig:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = from_dict({**cfg.model_dump(), "seed": args.seed})
    return cfg


def _write(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj, out: str | None) -> None:
    _write(json.dumps(obj, indent=2) + "\n", out)


def cmd_run(args) -> int:
    cfg = _load(args)
    report = estimate_violation_probability(cfg, threads=args.threads)
    log.info("wall time %.3fs", report.wall_time)
    _write(emit_report(report, args.format), args.out)
    return EXIT_VIOLATED if report.violated else EXIT_OK


def cmd_bounds(args) -> int:
    out = {
        "inputs": {"class_size": args.class_size, "delta": args.delta, "n": args.n},
        "eps_finite_realisable": bounds.eps_finite_realisable(args.class_size, args.delta, args.n),
        "eps_finite_agnostic": bounds.eps_finite_agnostic(args.class_size, args.delta, args.n),
        "sample_complexity_realisable": None,
    }
    if args.rademacher is not None:
        out["eps_rademacher"] = bounds.eps_rademacher(args.rademacher, args.delta, args.n)
    if args.target_eps is not None:
        out["sample_complexity_realisable"] = bounds.sample_complexity_realisable(
            args.class_size, args.delta, args.target_eps
        )
    tails = []
    for eps in args.eps or []:
        tails.append(
            {
                "eps": eps,
                "hoeffding": bounds.hoeffding_tail(args.n, eps, [1.0] * args.n).to_dict(),
                "gn_tail": bounds.gn_tail(args.n, eps).to_dict(),
                "realisable_tail": bounds.realisable_tail(args.class_size, args.n, eps).to_dict(),
                "agnostic_tail": bounds.agnostic_tail(args.class_size, args.n, eps).to_dict(),
            }
        )
    out["tails"] = tails
    if args.format == "csv":
        lines = ["eps,hoeffding,gn_tail,realisable_tail,agnostic_tail"]
        for t in tails:
            lines.append(",".join(repr(v) for v in [t["eps"]] + [t[k]["clipped_value"] for k in list(t)[1:]]))
        _write("\n".join(lines) + "\n", args.out)
    else:
        _dump(out, args.out)
    return EXIT_OK


def cmd_rademacher(args) -> int:
    cfg = _load(args)
    inst = Instance(cfg)
    A = LossClass.of(inst.hypotheses, inst.loss)
    p = select_training_distribution(
        inst.credal_set, cfg.training_mode, inst.hypotheses, inst.loss, inst.seed.child(1), cfg.training_vertex
    )
    d = sample_dataset(p, cfg.n, inst.seed.child(0))
    if args.method == "exact":
        empirical = empirical_rademacher_exact(A, d)
        sign_draws = None
    else:
        empirical = empirical_rademacher_mc(A, d, args.draws, inst.seed.child(2))
        sign_draws = args.draws
    averaged = rademacher_complexity(A, p, cfg.n, args.dataset_draws, sign_draws, inst.seed.child(3))
    out = {
        "config_digest": cfg.digest(),
        "seed": cfg.seed,
        "empirical": empirical.to_dict(),
        "averaged": averaged.to_dict(),
    }
    if 0 < cfg.delta < 1:
        out["eps_rademacher"] = bounds.eps_rademacher(averaged.value, cfg.delta, cfg.n)
    _dump(out, args.out)
    return EXIT_OK


def cmd_check(args) -> int:
    cfg = _load(args)
    inst = Instance(cfg)
    report = realisability_report(inst.hypotheses, inst.credal_set, args.tol, inst.loss)
    out = {"config_digest": cfg.digest(), "mode": "classical" if cfg.classical else "credal", **report.to_dict()}
    out["per_vertex_minimisers"] = [
        {"vertex": v, "hypothesis": h, "risk": r}
        for v, h, r in per_vertex_minimisers(inst.hypotheses, inst.credal_set, inst.loss)
    ]
    if cfg.classical:
        out["realisable"] = is_realisable(inst.hypotheses, inst.credal_set.vertices[0], inst.loss, args.tol)
    _dump(out, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="override the config's master seed")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", metavar="PATH", default=None)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="credalpac", description="PAC bounds and credal realisability experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", parents=[common], help="run a Monte Carlo campaign and emit a violation report")
    p.add_argument("config")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("bounds", parents=[common], help="print analytic epsilon and tail values")
    p.add_argument("--class-size", type=int, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rademacher", type=float, default=None)
    p.add_argument("--target-eps", type=float, default=None, help="also report the realisable sample complexity")
    p.add_argument("--eps", type=float, nargs="*", help="tail probabilities at these thresholds")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("rademacher", parents=[common], help="Rademacher complexity of a config's loss class")
    p.add_argument("config")
    p.add_argument("--method", choices=("exact", "mc"), default="exact")
    p.add_argument("--draws", type=int, default=10_000, help="sign vectors per sample (mc)")
    p.add_argument("--dataset-draws", type=int, default=20)
    p.set_defaults(func=cmd_rademacher)

    p = sub.add_parser("check-realisability", parents=[common], help="credal and uniform credal realisability")
    p.add_argument("config")
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
