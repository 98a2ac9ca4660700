"""Command-line interface: ``fluxsize compute|table|spectrum|distinguish|verify``.

Exit codes: 0 ok, 1 input error, 2 verification failure.
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

from . import device_io as io_
from .distinguish import (
    ModeEnsembleSpec,
    exact_trace_distance_oracle,
    n_min_and_size,
    p_n_average,
    p_n_linearized,
)
from .errors import FluxsizeError

EXIT_OK, EXIT_INPUT, EXIT_VERIFY = 0, 1, 2


def _emit(text, out_path):
    if out_path:
        Path(out_path).write_text(text)
    else:
        sys.stdout.write(text)


def _config(args, **extra):
    return io_.RunConfig(out_format=getattr(args, "out", "json"),
                         precision=getattr(args, "delta", 0.1),
                         n_modes=getattr(args, "n_modes", 1e9), **extra)


def cmd_compute(args):
    config = _config(args, devices=(args.device,))
    report = io_.run_pipeline(io_.load_device(args.device), config)
    _emit(io_.write_reports([report], config.out_format), args.output)
    return EXIT_OK


def cmd_table(args):
    config = _config(args)
    if args.devices:
        paths = sorted(Path(args.devices).glob("*.json"))
        if not paths:
            raise io_.SchemaError({"devices": f"no *.json files in {args.devices}"})
    else:
        paths = io_.bundled_device_paths()
    reports = [io_.run_pipeline(io_.load_device(p), config) for p in paths]
    _emit(io_.write_reports(reports, config.out_format), args.output)
    return EXIT_OK


def cmd_spectrum(args):
    material = io_.load_material(args.material)
    rows = io_.emit_spectrum(material, args.delta_vs, n_energy=args.n_energy,
                             n_cos=args.n_cos, window=args.window)
    text = io_.spectrum_to_csv(rows) if args.out == "csv" else io_.spectrum_to_json(rows)
    _emit(text, args.output)
    return EXIT_OK


def cmd_distinguish(args):
    if args.ensemble:
        doc = io_._read_json(args.ensemble)
        missing = {k: "missing" for k in ("occupations_A", "occupations_B") if k not in doc}
        if missing:
            raise io_.SchemaError(missing, args.ensemble)
        spec = ModeEnsembleSpec.explicit(doc["occupations_A"], doc["occupations_B"], args.delta)
        a, b = spec.occupations_a, spec.occupations_b
        lin = p_n_linearized([x - y for x, y in zip(a, b)])
        out = {
            "n_modes": spec.n_modes,
            "delta_n_tot": spec.delta_n_tot,
            "p_linearized": lin.value,
            "saturated": lin.saturated,
            "p_exact": exact_trace_distance_oracle(spec),
        }
    else:
        if args.n_modes is None or args.delta_n_tot is None:
            raise io_.SchemaError({"--n-modes/--delta-n-tot": "required without --ensemble"})
        spec = ModeEnsembleSpec(args.n_modes, args.delta_n_tot, args.delta)
        n_min, size = n_min_and_size(spec)
        p = p_n_average(n_min, spec.n_modes, spec.delta_n_tot)
        out = {
            "n_modes": spec.n_modes,
            "delta_n_tot": spec.delta_n_tot,
            "precision": spec.precision,
            "n_min": n_min,
            "size": size,
            "p_at_n_min": p.value,
            "size_bound": spec.delta_n_tot / (1 - 2 * spec.precision),
        }
    _emit(json.dumps(out, indent=2) + "\n", args.output)
    return EXIT_OK


def cmd_verify(args):
    extra = {}
    if args.impurity_n_energy:
        extra["impurity_n_energy"] = tuple(args.impurity_n_energy)
    if args.quick:
        extra.update(basis_matrices=100, oracle_ensembles=100)
    config = io_.RunConfig(seed=args.seed, **extra)
    code, results = io_.verify(config, only=args.only)
    for r in results:
        print(r.line())
    n_fail = sum(not r.passed and not r.informational for r in results)
    print(f"{len(results) - n_fail} ok, {n_fail} failed")
    return code


def build_parser():
    p = argparse.ArgumentParser(prog="fluxsize", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, delta=True):
        sp.add_argument("--out", choices=("json", "csv"), default="json")
        sp.add_argument("--output", "-o", help="write to this file instead of stdout")
        if delta:
            sp.add_argument("--delta", type=float, default=0.1, help="tolerated error (default 0.1)")
            sp.add_argument("--n-modes", type=float, default=1e9, help="total mode count N")

    sp = sub.add_parser("compute", help="size report for one device file")
    sp.add_argument("--device", required=True, help="device JSON path or bundled name")
    common(sp)
    sp.set_defaults(func=cmd_compute)

    sp = sub.add_parser("table", help="size reports for every device in a directory")
    sp.add_argument("--devices", help="directory of device JSON files (default: bundled)")
    common(sp)
    sp.set_defaults(func=cmd_table)

    sp = sub.add_parser("spectrum", help="delta n over the Fermi shell")
    sp.add_argument("--material", required=True, help="material JSON path or bundled name")
    sp.add_argument("--delta-vs", type=float, required=True, help="branch velocity difference (m/s)")
    sp.add_argument("--n-energy", type=int, default=201)
    sp.add_argument("--n-cos", type=int, default=17)
    sp.add_argument("--window", type=float, default=20.0, help="half-width in gaps")
    common(sp, delta=False)
    sp.set_defaults(func=cmd_spectrum, out="csv")

    sp = sub.add_parser("distinguish", help="n_min and size, or exact small-ensemble probabilities")
    sp.add_argument("--ensemble", help='JSON {"occupations_A": [...], "occupations_B": [...]}')
    sp.add_argument("--n-modes", type=int)
    sp.add_argument("--delta-n-tot", type=float)
    sp.add_argument("--delta", type=float, default=0.1)
    sp.add_argument("--output", "-o")
    sp.set_defaults(func=cmd_distinguish)

    sp = sub.add_parser("verify", help="run the self-check suite")
    sp.add_argument("--only", nargs="+", choices=sorted(io_.CHECKS))
    sp.add_argument("--impurity-n-energy", type=int, nargs="+",
                    help="energy node counts for the impurity resolution study")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--quick", action="store_true", help="smaller Monte Carlo runs")
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            code = args.func(args)
        except (FluxsizeError, OSError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            code = EXIT_INPUT
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
