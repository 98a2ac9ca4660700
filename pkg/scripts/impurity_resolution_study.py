"""First-order impurity residual against energy resolution of the shell grid.

    python3 scripts/impurity_resolution_study.py [--n-energy 640 900 1300 2000]
"""
import argparse

from fluxsize.bcs_core import BranchPair, make_material
from fluxsize.errors import ResolutionError
from fluxsize.greens import ImpurityEnsemble, impurity_first_order_residual, impurity_grid


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-energy", type=int, nargs="+", default=[256, 640, 900, 1300, 2000])
    ap.add_argument("--impurities", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    mat = make_material("Al", 2.02e6, tc=1.2)
    branches = BranchPair.symmetric((0.0, 0.0, mat.critical_velocity / 200))
    ens = ImpurityEnsemble.random(args.impurities, (2e-7,) * 3, 1e-48, seed=args.seed)
    print(f"{'n_E':>6}{'modes':>9}{'dE/Delta':>11}{'zeroth':>12}{'first':>12}{'residual':>12}")
    for n in args.n_energy:
        try:
            r = impurity_first_order_residual(impurity_grid(n), ens, branches, mat)
        except ResolutionError as exc:
            print(f"{n:>6}  {exc}")
            continue
        print(f"{n:>6}{r.modes:>9}{r.max_energy_spacing:>11.4f}"
              f"{r.zeroth_order:>12.2e}{r.first_order:>12.2e}{r.residual:>12.2e}")


if __name__ == "__main__":
    main()
