"""Gap between approximate and exact success probability versus perturbation scale.

For random small ensembles, the linearized probability 1/2 + sum|dn|/2 and the
second-order-accurate expansion are compared with exact bitstring enumeration.

    python3 scripts/distinguishability_scaling.py [--ensembles 200] [--seed 0]
"""
import argparse

import numpy as np

from fluxsize.distinguish import (
    ModeEnsembleSpec,
    exact_trace_distance_oracle,
    first_order_trace_distance,
    p_n_linearized,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ensembles", type=int, default=200)
    ap.add_argument("--max-modes", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    eps = np.logspace(-3, -1, 5)
    lin_slopes, first_slopes = [], []
    for _ in range(args.ensembles):
        n = int(rng.integers(1, args.max_modes + 1))
        base = rng.uniform(0.05, 0.95, n)
        d = rng.uniform(-0.04, 0.04, n)
        lin, first = [], []
        for e in eps:
            spec = ModeEnsembleSpec.explicit(base + e * d, base)
            exact = exact_trace_distance_oracle(spec)
            lin.append(p_n_linearized(e * d).value - exact)
            first.append(abs(first_order_trace_distance(spec) - exact))
        if max(lin) > 1e-15:
            lin_slopes.append(np.polyfit(np.log(eps), np.log(lin), 1)[0])
        if max(first) > 1e-15:
            first_slopes.append(np.polyfit(np.log(eps), np.log(first), 1)[0])

    for label, s in (("linearized - exact", lin_slopes), ("expansion - exact", first_slopes)):
        s = np.asarray(s)
        print(f"{label:<20} slope median {np.median(s):.4f}  range [{s.min():.4f}, {s.max():.4f}]  "
              f"({s.size} ensembles)")


if __name__ == "__main__":
    main()
