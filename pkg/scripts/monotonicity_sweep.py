"""Monte-Carlo monotonicity sweep over generators and dimensions.

Prints one row per (generator, d): violation count, largest excess and the
dilation criterion's verdict.
"""

import argparse
import time

from spinfactor.divergence import generator_from_spec
from spinfactor.monotonicity import dilation_criterion, empirical_monotonicity

DEFAULT_GENERATORS = ["shannon", "quadratic", "e_lambda:1", "tsallis:0.5", "tsallis:1.5", "tsallis:2.5", "tsallis:4", "tsallis:7"]


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--gens", nargs="+", default=DEFAULT_GENERATORS)
    p.add_argument("--dims", nargs="+", type=int, default=[1, 2, 3])
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dilations-only", action="store_true")
    args = p.parse_args()

    print(f"{'generator':<14} {'d':>2} {'violations':>10} {'max excess':>12} {'criterion':>10} {'secs':>6}")
    for spec in args.gens:
        f = generator_from_spec(spec)
        verdict = "monotone" if dilation_criterion(f).monotone else "fails"
        for d in args.dims:
            t0 = time.perf_counter()
            rep = empirical_monotonicity(f, d, args.trials, args.seed, dilations_only=args.dilations_only)
            dt = time.perf_counter() - t0
            print(f"{spec:<14} {d:>2} {len(rep.violations):>10} {rep.max_excess:>12.3e} {verdict:>10} {dt:>6.1f}")


if __name__ == "__main__":
    main()
