"""Command-line entry point.

    regretlearn --example 1 --n 0 1 2 4 --procedures closest-to-optimal ml --out results/ex1
    regretlearn --verify all
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .core import ConfigurationError
from .experiments import ExperimentConfig, run_experiment
from .learning import BudgetError
from .verify import SUITES, run_suites, violations_json

log = logging.getLogger("regretlearn")

# flag name -> ExperimentConfig field
_FIELDS = {
    "example": "example", "n": "n", "procedures": "procedures", "epsilon": "epsilon",
    "grid_step": "grid_step", "theta_step": "theta_step", "out": "out", "schedule": "schedule",
    "max_iter": "max_iter", "quantizer_width": "quantizer_width", "step_scale": "step_scale",
    "seed": "seed",
}

EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_UNCONVERGED = 3


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="regretlearn", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--config", type=Path, help="JSON file with the same keys as the flags")
    p.add_argument("--example", type=int, help="experiment 1-4")
    p.add_argument("--n", type=int, nargs="+", help="learning sample sizes (default 0 1 2 4)")
    p.add_argument("--procedures", nargs="+",
                   help="closest-to-optimal, ml, robbins, consistent, minimax")
    p.add_argument("--epsilon", type=float, help="required accuracy of the solvers (default 0.01)")
    p.add_argument("--grid-step", type=float, help="signal discretization step")
    p.add_argument("--theta-step", type=float, help="model grid step")
    p.add_argument("--quantizer-width", type=float, help="cell width of quantized signal samples")
    p.add_argument("--schedule", help="step schedule: sqrt or harmonic")
    p.add_argument("--step-scale", type=float, help="gamma_0 of the step schedule")
    p.add_argument("--max-iter", type=int, help="solver iteration cap")
    p.add_argument("--seed", type=int, help="reserved; pipelines are deterministic")
    p.add_argument("--out", help="output directory (default results)")
    p.add_argument("--verify", metavar="SUITE",
                   help=f"run a verification suite: {', '.join(SUITES)} or all")
    p.add_argument("--verify-scale", type=float, default=1.0,
                   help="fraction of the default trial counts")
    return p


def _config(args: argparse.Namespace) -> ExperimentConfig:
    values = {}
    if args.config is not None:
        values.update(json.loads(args.config.read_text()))
        unknown = set(values) - set(_FIELDS.values())
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
    for flag, name in _FIELDS.items():
        v = getattr(args, flag)
        if v is not None:
            values[name] = v
    return ExperimentConfig(**values)


def _verify(args, parser) -> int:
    try:
        reports = run_suites(args.verify, seed=args.seed or 0, scale=args.verify_scale)
    except KeyError:
        parser.print_usage(sys.stderr)
        print(f"regretlearn: unknown suite {args.verify!r}; choose from "
              f"{', '.join(SUITES)} or all", file=sys.stderr)
        return EXIT_USAGE
    for r in reports:
        print(r.summary())
    if all(r.passed for r in reports):
        return 0
    out = Path(args.out or ".") / "verify_violations.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(violations_json(reports))
    print(f"violating inputs written to {out}", file=sys.stderr)
    return EXIT_VIOLATION


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.verify is not None:
        return _verify(args, parser)
    try:
        config = _config(args)
        results = run_experiment(config)
    except ConfigurationError as exc:
        print(f"regretlearn: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetError as exc:
        print(f"regretlearn: error: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    unconverged = []
    for (proc, n), curve in results.items():
        extra = ""
        if curve.solver is not None:
            extra = f" S={curve.solver.upper:.4f} s={curve.solver.lower:.4f} iterations={curve.solver.iterations}"
            if not curve.solver.converged:
                unconverged.append((proc, n))
        log.info("%-18s n=%-3d max regret %.4f  max risk %.4f  [%s]%s", proc, n,
                 curve.max_regret, curve.risks.max(), curve.status, extra)
    log.info("wrote results to %s", config.out)
    if unconverged:
        print(f"regretlearn: warning: solver did not converge for {unconverged}", file=sys.stderr)
        return EXIT_UNCONVERGED
    return 0


if __name__ == "__main__":
    sys.exit(main())
