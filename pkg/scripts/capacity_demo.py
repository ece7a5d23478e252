"""Minimax regret of random and symmetric state sets against the ball's closed form.

For each configuration the finite solver's value, gap and distance of the
optimal barycentre from the centre are printed next to the closed form.
"""

import argparse
import math

import numpy as np

from spinfactor.algebra import pure_state, random_state
from spinfactor.capacity import capacity_closed_form, capacity_finite
from spinfactor.divergence import generator_from_spec


def polygon(n, d):
    out = []
    for k in range(n):
        u = np.zeros(d)
        u[0], u[1] = math.cos(2 * math.pi * k / n), math.sin(2 * math.pi * k / n)
        out.append(pure_state(u))
    return out


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--gen", default="shannon")
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    f = generator_from_spec(args.gen)
    rng = np.random.default_rng(args.seed)
    closed = capacity_closed_form(f, args.d)
    print(f"closed form over the ball: {closed.value!r}")
    sets = {f"{n}-gon": polygon(n, args.d) for n in (2, 3, 5, 8)}
    for n in (3, 6, 12):
        sets[f"{n} random pure"] = [pure_state(u / np.linalg.norm(u)) for u in rng.standard_normal((n, args.d))]
        sets[f"{n} random mixed"] = [random_state(rng, args.d) for _ in range(n)]
    print(f"{'set':<18} {'value':>12} {'gap':>9} {'iters':>6} {'|opt - centre|':>15}")
    for name, states in sets.items():
        res = capacity_finite(f, states)
        dist = float(np.linalg.norm(res.optimizer.v))
        print(f"{name:<18} {res.value:>12.9f} {res.gap:>9.1e} {res.iterations:>6} {dist:>15.2e}")


if __name__ == "__main__":
    main()
