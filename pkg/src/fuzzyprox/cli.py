"""Command-line entry point: ``sweep``, ``constants`` and ``verify``."""

from __future__ import annotations

import argparse
import logging
import sys

from .bridge import gamma_estimates, verify_function_bridge
from .berezin import delta_estimate
from .errors import FuzzyProxError
from .sweep import SweepConfig, consistency_violations, emit_report, run_sweep

EXIT_OK, EXIT_VERIFY, EXIT_INCONSISTENT = 0, 2, 3


def _pairs(text: str) -> tuple:
    out = []
    for item in text.split(","):
        m, _, n = item.strip().partition(":")
        try:
            out.append((int(m), int(n)))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad pair {item!r}, expected m:n") from None
    return tuple(out)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fuzzyprox", description="Certified proximity bounds for fuzzy spheres.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sweep", help="constants and prox bounds over a range of n")
    s.add_argument("--n-min", type=int, required=True)
    s.add_argument("--n-max", type=int, required=True)
    s.add_argument("--pairs", type=_pairs, default=None, help="comma-separated m:n list")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--family-size", type=int, default=64)
    s.add_argument("--samples", type=int, default=32)
    s.add_argument("--epsilon", type=float, default=0.05)
    s.add_argument("--margin", type=int, default=2, help="quadrature margin added to m+n")
    s.add_argument("--out", required=True)
    s.add_argument("--format", choices=("csv", "json"), default="csv")

    c = sub.add_parser("constants", help="print delta, gammaA, gammaB for one n")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--family-size", type=int, default=64)

    v = sub.add_parser("verify", help="check the bridge condition for one n")
    v.add_argument("--n", type=int, required=True)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--family-size", type=int, default=64)
    v.add_argument("--epsilon", type=float, default=0.05)
    v.add_argument("--gamma", type=float, default=None, help="override the estimated constant")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "sweep":
            cfg = SweepConfig(args.n_min, args.n_max, args.pairs, args.margin, args.family_size, args.samples,
                              args.seed, args.epsilon, args.out, args.format)
            result = run_sweep(cfg)
            emit_report(result, cfg.format, cfg.output_path)
            bad = consistency_violations(result.reports)
            for r in bad:
                print(f"inconsistent: ({r.m},{r.n}) empirical {r.empirical_hausdorff:.6g} > "
                      f"certified {r.certified_bound:.6g}", file=sys.stderr)
            return EXIT_INCONSISTENT if bad else EXIT_OK
        if args.command == "constants":
            d = delta_estimate(args.n, trials=max(1, args.family_size // 8), seed=args.seed)
            g = gamma_estimates(args.n, family_size=args.family_size, seed=args.seed)
            print(f"n={args.n} delta={d:.6f} gammaA={g.gamma_A:.6f} gammaB={g.gamma_B:.6f}")
            return EXIT_OK
        if args.command == "verify":
            gamma = args.gamma
            if gamma is None:
                gamma = gamma_estimates(args.n, family_size=args.family_size, seed=args.seed).gamma
            report = verify_function_bridge(args.n, gamma, args.family_size, args.seed, args.epsilon)
            print(report.summary())
            return EXIT_OK if report.passed else EXIT_VERIFY
    except FuzzyProxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 1


if __name__ == "__main__":
    sys.exit(main())
