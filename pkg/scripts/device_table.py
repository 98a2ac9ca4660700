"""Print the bulk mode-count table for the bundled devices.

    python3 scripts/device_table.py [--delta 0.1] [--n-modes 1e9] [--out csv]
"""
import argparse
import warnings

from fluxsize import device_io as dio
from fluxsize.errors import GeometryWarning


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--delta", type=float, default=0.1)
    ap.add_argument("--n-modes", type=float, default=1e9)
    ap.add_argument("--out", choices=("text", "json", "csv"), default="text")
    args = ap.parse_args()

    config = dio.RunConfig(precision=args.delta, n_modes=args.n_modes,
                           out_format="json" if args.out == "text" else args.out)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", GeometryWarning)
        reports = [dio.run_pipeline(dio.load_device(p), config) for p in dio.bundled_device_paths()]
    if args.out != "text":
        print(dio.write_reports(reports, config.out_format), end="")
        return

    print(f"{'device':<10}{'L (um)':>9}{'dI_p (nA)':>16}{'dN_tot':>18}{'reported':>14}{'dmu (mu_B)':>22}")
    for r in reports:
        lo, hi = r.delta_n_bulk
        i_lo, i_hi = (x * 1e9 for x in r.persistent_current_diff)
        cur = f"{i_lo:.0f}" if i_lo == i_hi else f"{i_lo:.0f}-{i_hi:.0f}"
        dn = f"{lo:.1f}" if lo == hi else f"{lo:.0f}-{hi:.0f}"
        rep = r.delta_n_bulk_reported
        rep = str(rep[0]) if rep[0] == rep[1] else f"{rep[0]}-{rep[1]}"
        m_lo, m_hi = r.delta_mu_bohr
        mu = f"{m_lo:.3g}" if m_lo == m_hi else f"{m_lo:.2g}-{m_hi:.2g}"
        print(f"{r.name:<10}{r.loop_length * 1e6:>9.0f}{cur:>16}{dn:>18}{rep:>14}{mu:>22}")
        if r.delta_n_tunnel:
            v, t_lo, t_hi = r.delta_n_tunnel
            print(f"{'':<10}tunnelling estimate {v:.1f} [{t_lo:.1f}, {t_hi:.1f}]")


if __name__ == "__main__":
    main()
