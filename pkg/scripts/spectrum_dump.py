"""Write delta n over the Fermi shell for a material and branch velocity difference.

    python3 scripts/spectrum_dump.py --material Al --delta-vs 0.5 -o al_spectrum.csv
"""
import argparse
from pathlib import Path

import numpy as np

from fluxsize import device_io as dio


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--material", default="Al")
    ap.add_argument("--delta-vs", type=float, default=0.5, help="m/s")
    ap.add_argument("--n-energy", type=int, default=201)
    ap.add_argument("--n-cos", type=int, default=17)
    ap.add_argument("--window", type=float, default=20.0)
    ap.add_argument("-o", "--output", type=Path)
    args = ap.parse_args()

    mat = dio.load_material(args.material)
    rows = dio.emit_spectrum(mat, args.delta_vs, n_energy=args.n_energy,
                             n_cos=args.n_cos, window=args.window)
    text = dio.spectrum_to_csv(rows)
    if args.output:
        args.output.write_text(text)
        peak = float(np.max(np.abs(rows[:, 2])))
        print(f"wrote {rows.shape[0]} rows to {args.output}; max |delta n| = {peak:.3e}")
    else:
        print(text, end="")


if __name__ == "__main__":
    main()
