"""Find and replay a dilation witness against Tsallis monotonicity.

The witness is a pair of states on a one-dimensional ball and a dilation
towards a pure state that increases the divergence.
"""

import argparse
import json

from spinfactor.divergence import tsallis
from spinfactor.monotonicity import dilation_criterion, dilation_violation_search, tsallis_classification


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("alphas", nargs="*", type=float, default=[2.5, 2.9, 6.5, 7.0])
    p.add_argument("--tol", type=float, default=1e-9)
    args = p.parse_args()

    for a in args.alphas:
        f = tsallis(a)
        cls = tsallis_classification(a)
        crit = dilation_criterion(f)
        w = dilation_violation_search(f, tol=args.tol)
        row = {"alpha": a, "classification": cls.monotone, "reason": cls.reason, "criterion": crit.monotone}
        if w is not None:
            before, after = w.replay(f)
            row["witness"] = w.to_json()
            row["replay"] = {"before": before, "after": after, "excess": after - before}
        else:
            row["witness"] = None
        print(json.dumps(row, indent=2))


if __name__ == "__main__":
    main()
