"""Material/device files, the size pipeline, report emission and self-checks."""
from __future__ import annotations

import csv
import io
import json
import math
import time
import warnings
from dataclasses import asdict, dataclass, fields
from importlib import resources
from pathlib import Path

import numpy as np

from . import constants as C
from .bcs_core import BranchPair, make_material, occupation, occupation_difference_bound, solve_gap
from .distinguish import (
    ModeEnsembleSpec,
    basis_optimality_check,
    exact_trace_distance_oracle,
    first_order_trace_distance,
    n_min_and_size,
    p_n_linearized,
    random_hermitian,
)
from .errors import (
    DomainError,
    FluxsizeError,
    IndistinguishableBranchesError,
    PerturbationDomainError,
    ResolutionError,
    SchemaError,
)
from .greens import ImpurityEnsemble, impurity_first_order_residual, impurity_grid, occupation_from_g
from .grids import fermi_shell_grid
from .junction import JunctionSpec, golden_rule_calibration, junction_total
from .sizecalc import (
    DeviceSpec,
    gap_energy_integral,
    kernel_K1,
    kernel_K1_closed,
    kernel_K2,
    kernel_K2_closed,
    magnetic_moment_difference,
    round_half_even,
    total_mode_change,
)

BUNDLED_MATERIALS = {"al": "al.json", "nb": "nb.json"}
BUNDLED_DEVICES = ("delft", "berkeley", "suny")

NOT_ADDITIVE_NOTE = (
    "bulk and tunnelling counts are not simply additive: both count the same "
    "kind of mode change in overlapping regions; the sum is indicative only")


# -- configuration ----------------------------------------------------------------

@dataclass(frozen=True)
class RunConfig:
    """Settings for one pipeline or verification run."""

    devices: tuple = ()
    out_format: str = "json"
    precision: float = 0.1
    n_modes: float = 1e9
    n_energy: int = 201
    n_cos: int = 16
    energy_window: float = 20.0
    impurity_n_energy: tuple = (640, 900, 1300)
    impurity_count: int = 100
    oracle_ensembles: int = 500
    basis_matrices: int = 1000
    basis_trials: int = 100
    spectrum_configs: int = 10
    seed: int = 0
    verbosity: int = 0

    def __post_init__(self):
        problems = {}
        if self.out_format not in ("json", "csv"):
            problems["out_format"] = f"must be json or csv, got {self.out_format!r}"
        if not 0 < self.precision < 0.5:
            problems["precision"] = "must lie in (0, 1/2)"
        if not self.n_modes > 0:
            problems["n_modes"] = "must be > 0"
        for name in ("n_energy", "n_cos"):
            if getattr(self, name) < 8:
                problems[name] = "node counts must be >= 8"
        if any(n < 8 for n in self.impurity_n_energy):
            problems["impurity_n_energy"] = "node counts must be >= 8"
        if self.energy_window < 10:
            problems["energy_window"] = "energy window must be >= 10 gaps"
        if problems:
            raise SchemaError(problems, "RunConfig")
        object.__setattr__(self, "devices", tuple(str(d) for d in self.devices))
        object.__setattr__(self, "impurity_n_energy", tuple(int(n) for n in self.impurity_n_energy))


# -- loading -------------------------------------------------------------------------

def _read_json(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SchemaError({"<file>": f"cannot read: {exc.strerror}"}, str(path)) from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError({"<file>": f"parse error at line {exc.lineno} col {exc.colno}: {exc.msg}"},
                          str(path)) from exc
    if not isinstance(doc, dict):
        raise SchemaError({"<root>": "expected a JSON object"}, str(path))
    return doc


def _bundled(kind, filename):
    return json.loads(resources.files("fluxsize").joinpath("data", kind, filename).read_text())


def _number(doc, key, problems, prefix, *, positive=True, required=True):
    if key not in doc:
        if required:
            problems[prefix + key] = "missing"
        return None
    val = doc[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)) or not math.isfinite(val):
        problems[prefix + key] = f"expected a finite number, got {val!r}"
        return None
    if positive and not val > 0:
        problems[prefix + key] = f"must be > 0, got {val!r}"
        return None
    return float(val)


def material_from_dict(doc, source=None, prefix=""):
    """Build a Material from its JSON description, reporting every bad field."""
    problems = {}
    name = doc.get("name")
    if not isinstance(name, str) or not name:
        problems[prefix + "name"] = "missing or not a string"
    v_f = _number(doc, "fermi_velocity_m_per_s", problems, prefix)
    gap = _number(doc, "gap_joule", problems, prefix, required=False)
    tc = _number(doc, "tc_kelvin", problems, prefix, required=False)
    debye = _number(doc, "debye_energy_joule", problems, prefix, required=False)
    coupling = _number(doc, "dimensionless_coupling", problems, prefix, required=False)
    given = [k for k in ("gap_joule", "tc_kelvin", "dimensionless_coupling") if k in doc]
    if len(given) != 1:
        problems[prefix + "gap_joule"] = (
            "give exactly one of gap_joule, tc_kelvin, dimensionless_coupling"
            + (f" (got {', '.join(given)})" if given else ""))
    if "dimensionless_coupling" in doc and "debye_energy_joule" not in doc:
        problems[prefix + "debye_energy_joule"] = "required with dimensionless_coupling"
    if problems:
        raise SchemaError(problems, source)
    try:
        return make_material(name, v_f, gap=gap, tc=tc, debye_energy=debye, coupling=coupling)
    except FluxsizeError as exc:
        raise SchemaError({prefix + "<material>": str(exc)}, source) from exc


def load_material(ref):
    """Material from a bundled name ("Al", "Nb"), a JSON file path, or a dict."""
    if isinstance(ref, dict):
        return material_from_dict(ref)
    key = str(ref).lower()
    if key in BUNDLED_MATERIALS:
        return material_from_dict(_bundled("materials", BUNDLED_MATERIALS[key]), f"bundled:{ref}")
    path = Path(ref)
    if not path.exists():
        known = ", ".join(sorted(BUNDLED_MATERIALS))
        raise SchemaError({"material": f"unknown material {ref!r} (bundled: {known})"})
    return material_from_dict(_read_json(path), str(path))


def _junction_from_dict(doc, material, problems, prefix="junction."):
    if not isinstance(doc, dict):
        problems[prefix.rstrip(".")] = "expected an object"
        return None
    if doc.get("strategy") == "golden_rule":
        r_n = _number(doc, "r_normal_ohm", problems, prefix)
        area = _number(doc, "junction_area_m2", problems, prefix)
        window = _number(doc, "energy_window_gaps", problems, prefix, required=False) or 5.0
        if r_n is None or area is None:
            return None
        return golden_rule_calibration(material, r_n, area, energy_window=window,
                                       phase_difference=doc.get("phase_difference_rad", 0.0),
                                       spread=doc.get("spread", 0.0))
    t_amp = _number(doc, "t_amp_joule", problems, prefix, positive=False, required=False)
    rel = _number(doc, "t_amp_over_gap", problems, prefix, positive=False, required=False)
    if t_amp is not None and rel is not None:
        problems[prefix + "t_amp_joule"] = "give t_amp_joule or t_amp_over_gap, not both"
    if rel is not None:
        t_amp = rel * material.gap
    t_range = None
    for key, scale in (("t_amp_range_joule", 1.0), ("t_amp_range_over_gap", material.gap)):
        if key in doc:
            val = doc[key]
            if (not isinstance(val, list) or len(val) != 2
                    or not all(isinstance(x, (int, float)) for x in val)):
                problems[prefix + key] = "expected [lo, hi]"
            else:
                t_range = (val[0] * scale, val[1] * scale)
    mode_count = _number(doc, "mode_count", problems, prefix, positive=False, required=False)
    window = _number(doc, "energy_window_gaps", problems, prefix, required=False)
    phase = _number(doc, "phase_difference_rad", problems, prefix, positive=False, required=False)
    note = doc.get("calibration_note", "")
    if any(k.startswith(prefix) for k in problems):
        return None
    try:
        return JunctionSpec(t_amp, mode_count, phase or 0.0, window or 5.0, t_range, note)
    except DomainError as exc:
        problems[prefix + "<junction>"] = str(exc)
        return None


def device_from_dict(doc, source=None):
    """Build a DeviceSpec from its JSON description, reporting every bad field."""
    problems = {}
    name = doc.get("name")
    if not isinstance(name, str) or not name:
        problems["name"] = "missing or not a string"
    material = None
    mref = doc.get("material")
    if mref is None:
        problems["material"] = "missing"
    else:
        try:
            material = (material_from_dict(mref, source, "material.") if isinstance(mref, dict)
                        else load_material(mref))
        except SchemaError as exc:
            problems.update(exc.problems)
    length = _number(doc, "loop_length_m", problems, "")
    area = _number(doc, "enclosed_area_m2", problems, "")
    has_single = "persistent_current_diff_A" in doc
    has_range = "persistent_current_diff_A_range" in doc
    current = None
    if has_single == has_range:
        problems["persistent_current_diff_A"] = (
            "give exactly one of persistent_current_diff_A, persistent_current_diff_A_range")
    elif has_single:
        val = _number(doc, "persistent_current_diff_A", problems, "", positive=False)
        if val is not None:
            if val < 0:
                problems["persistent_current_diff_A"] = f"must be >= 0, got {val!r}"
            current = (val, val)
    else:
        val = doc["persistent_current_diff_A_range"]
        if (not isinstance(val, list) or len(val) != 2
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in val)
                or not 0 <= val[0] <= val[1]):
            problems["persistent_current_diff_A_range"] = "expected [lo, hi] with 0 <= lo <= hi"
        else:
            current = (float(val[0]), float(val[1]))
    junction = None
    if "junction" in doc and material is not None:
        junction = _junction_from_dict(doc["junction"], material, problems)
    provenance = doc.get("provenance", {})
    if not isinstance(provenance, dict):
        problems["provenance"] = "expected an object"
    if problems:
        raise SchemaError(problems, source)
    return DeviceSpec(name, material, length, area, current, junction, provenance)


def load_device(path):
    """DeviceSpec from a JSON file path or a bundled device name."""
    key = str(path).lower()
    if key in BUNDLED_DEVICES and not Path(path).exists():
        return device_from_dict(_bundled("devices", f"{key}.json"), f"bundled:{key}")
    return device_from_dict(_read_json(path), str(path))


def bundled_device_paths():
    """Paths of the bundled example devices."""
    root = resources.files("fluxsize").joinpath("data", "devices")
    return [Path(str(root.joinpath(f"{name}.json"))) for name in BUNDLED_DEVICES]


# -- pipeline ------------------------------------------------------------------------

@dataclass(frozen=True)
class SizeReport:
    """Outcome of the size pipeline for one device; ranges are (lo, hi)."""

    name: str
    material: str
    fermi_velocity: float
    gap: float
    loop_length: float
    enclosed_area: float
    persistent_current_diff: tuple
    delta_n_bulk: tuple
    delta_n_bulk_reported: tuple
    delta_mu_joule_per_tesla: tuple
    delta_mu_bohr: tuple
    delta_n_tunnel: tuple | None
    delta_n_sum: tuple | None
    precision: float
    n_modes: float
    n_min: tuple | None
    effective_size: tuple | None
    size_bound: tuple
    notes: tuple = ()

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, doc):
        kwargs = {}
        for f in fields(cls):
            val = doc[f.name]
            kwargs[f.name] = tuple(val) if isinstance(val, list) else val
        return cls(**kwargs)


def _attributed(stage, fn, *args, **kwargs):
    """Run one pipeline stage, prefixing any library error with the stage name."""
    try:
        return fn(*args, **kwargs)
    except SchemaError:
        raise
    except FluxsizeError as exc:
        raise type(exc)(f"[{stage}] {exc}") from exc


def run_pipeline(device: DeviceSpec, config: RunConfig = RunConfig()) -> SizeReport:
    notes = []
    bulk = _attributed("sizecalc", total_mode_change, device)
    mu_jt, mu_b = _attributed("sizecalc", magnetic_moment_difference, device)
    tunnel = None
    total = None
    if device.junction is not None:
        est = _attributed("junction", junction_total, device.junction, device.material)
        tunnel = (est.value, est.lo, est.hi)
        total = (bulk[0] + est.lo, bulk[1] + est.hi)
        notes.append(NOT_ADDITIVE_NOTE)
        if device.junction.calibration_note:
            notes.append("junction calibration: " + device.junction.calibration_note)
    n_min = size = None
    try:
        pairs = [n_min_and_size(ModeEnsembleSpec(config.n_modes, dn, config.precision))
                 for dn in bulk]
        # the larger Delta N needs fewer modes
        n_min = (pairs[1][0], pairs[0][0])
        size = (pairs[0][1], pairs[1][1])
    except IndistinguishableBranchesError:
        notes.append("Delta N_tot = 0: the branches cannot be distinguished by mode occupations")
    except FluxsizeError as exc:
        raise type(exc)(f"[distinguish] {exc}") from exc
    bound = tuple(dn / (1 - 2 * config.precision) for dn in bulk)
    return SizeReport(
        name=device.name,
        material=device.material.name,
        fermi_velocity=device.material.fermi_velocity,
        gap=device.material.gap,
        loop_length=device.loop_length,
        enclosed_area=device.enclosed_area,
        persistent_current_diff=device.persistent_current_diff,
        delta_n_bulk=bulk,
        delta_n_bulk_reported=tuple(round_half_even(x) for x in bulk),
        delta_mu_joule_per_tesla=mu_jt,
        delta_mu_bohr=mu_b,
        delta_n_tunnel=tunnel,
        delta_n_sum=total,
        precision=config.precision,
        n_modes=config.n_modes,
        n_min=n_min,
        effective_size=size,
        size_bound=bound,
        notes=tuple(notes),
    )


# -- emission ------------------------------------------------------------------------

def render_number(x):
    """Shortest-round-trip decimal (17 significant digits at most)."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def reports_to_json(reports):
    return json.dumps([r.to_dict() for r in reports], indent=2, sort_keys=False) + "\n"


CSV_COLUMNS = (
    "name", "material", "v_F", "L", "A", "delta_I_p_lo", "delta_I_p_hi",
    "delta_mu_muB_lo", "delta_mu_muB_hi", "delta_N_tot_lo", "delta_N_tot_hi",
    "delta_N_tot_reported_lo", "delta_N_tot_reported_hi",
    "delta_N_T", "delta_N_T_lo", "delta_N_T_hi", "delta_N_sum_lo", "delta_N_sum_hi",
    "precision", "n_modes", "n_min_lo", "n_min_hi", "size_lo", "size_hi",
    "size_bound_lo", "size_bound_hi",
)


def _csv_row(r: SizeReport):
    t = r.delta_n_tunnel or (None, None, None)
    s = r.delta_n_sum or (None, None)
    n = r.n_min or (None, None)
    z = r.effective_size or (None, None)
    vals = (r.name, r.material, r.fermi_velocity, r.loop_length, r.enclosed_area,
            *r.persistent_current_diff, *r.delta_mu_bohr, *r.delta_n_bulk,
            *r.delta_n_bulk_reported, *t, *s, r.precision, r.n_modes, *n, *z, *r.size_bound)
    return [v if isinstance(v, str) else render_number(v) for v in vals]


def reports_to_csv(reports):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in reports:
        writer.writerow(_csv_row(r))
    return buf.getvalue()


def write_reports(reports, out_format="json"):
    return reports_to_json(reports) if out_format == "json" else reports_to_csv(reports)


# -- spectrum ------------------------------------------------------------------------

SPECTRUM_COLUMNS = ("energy_over_gap", "cos_theta", "delta_n", "mode_density_weight")


def emit_spectrum(material, delta_vs, *, n_energy=201, n_cos=17, window=20.0):
    """Branch occupation difference over the Fermi shell.

    Returns an ``(rows, 4)`` array: E/Delta, cos(theta) measured from
    delta v_s, delta n, and the mode density (per m^3, both spins,
    azimuth integrated) each row stands for.  Energies use an odd
    Gauss-Legendre rule and cos(theta) a Gauss-Lobatto rule, so the rows
    E = 0, cos(theta) = +-1 are always present.
    """
    dv = float(delta_vs)
    if not math.isfinite(dv):
        raise DomainError("delta_vs must be finite")
    v_crit = material.critical_velocity
    if abs(dv) >= 2 * v_crit:
        raise PerturbationDomainError(
            f"|delta v_s| = {abs(dv):.6g} m/s >= 2 v_crit = {2 * v_crit:.6g} m/s")
    n_energy += 1 - n_energy % 2
    grid = fermi_shell_grid(n_energy, n_cos, window=window, cos_rule="lobatto")
    q, density = grid.wavevectors(material)
    e, c, _, _ = grid.flat()
    branches = BranchPair.symmetric((0.0, 0.0, 0.5 * dv))
    branches.validate(material)
    om = np.hypot(e * material.gap, material.gap)
    dn = 0.5 * material.gap**2 / om**3 * material.hbar * (q @ np.asarray(branches.delta_vs))
    return np.column_stack([e, c, dn, density])


def spectrum_to_csv(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SPECTRUM_COLUMNS)
    for row in rows:
        writer.writerow([render_number(x) for x in row])
    return buf.getvalue()


def spectrum_to_json(rows):
    return json.dumps({"columns": list(SPECTRUM_COLUMNS), "rows": rows.tolist()}) + "\n"


# -- verification ----------------------------------------------------------------------

@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    expected: str
    actual: str
    tolerance: str
    hint: str = ""
    informational: bool = False
    seconds: float = 0.0

    def line(self):
        tag = "INFO" if self.informational else ("PASS" if self.passed else "FAIL")
        text = f"{tag} {self.name}: expected {self.expected}, got {self.actual} (tol {self.tolerance})"
        return text + (f" -- {self.hint}" if self.hint and not self.passed else "")


TABLE_GOLDEN = {
    # device: (raw Delta N_tot lo, hi, reported, delta mu in mu_B lo, hi)
    "delft": (41.7, 41.7, 42, 2.4e6, 2.4e6),
    "berkeley": (123.8, 123.8, 124, 4.23e7, 4.23e7),
    "suny": (3800.0, 5750.0, None, 5.5e9, 8.3e9),
}

ROUNDOFF_FLOOR = 1e-13


def check_table(config=None):
    out = []
    for key, (lo, hi, reported, mu_lo, mu_hi) in TABLE_GOLDEN.items():
        t0 = time.perf_counter()
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            dev = load_device(key)
        n_lo, n_hi = total_mode_change(dev)
        (_, _), (b_lo, b_hi) = magnetic_moment_difference(dev)
        dt = time.perf_counter() - t0
        if reported is not None:
            ok = abs(n_lo - lo) <= 0.5 and round_half_even(n_lo) == reported
            out.append(CheckResult(f"table:{key}:delta_N_tot", ok, f"{lo} (reported {reported})",
                                   f"{n_lo:.4f} (reported {round_half_even(n_lo)})", "+-0.5",
                                   "check |e|, v_F and loop length", seconds=dt))
        else:
            ok = abs(n_lo / lo - 1) <= 0.01 and abs(n_hi / hi - 1) <= 0.01
            out.append(CheckResult(f"table:{key}:delta_N_tot", ok, f"[{lo}, {hi}]",
                                   f"[{n_lo:.1f}, {n_hi:.1f}]", "1% per endpoint",
                                   "check |e|, v_F and loop length", seconds=dt))
        ok = abs(b_lo / mu_lo - 1) <= 0.01 and abs(b_hi / mu_hi - 1) <= 0.01
        out.append(CheckResult(f"table:{key}:delta_mu", ok, f"[{mu_lo:.3g}, {mu_hi:.3g}] mu_B",
                               f"[{b_lo:.4g}, {b_hi:.4g}] mu_B", "1%",
                               "check mu_B and the bundled enclosed area"))
    return out


def check_gap(config=None):
    debye = C.BOLTZMANN * 300.0
    worst = 0.0
    t0 = time.perf_counter()
    for lam in (0.1, 0.2, 0.3, 0.4, 0.5):
        delta = solve_gap(lam, debye)
        worst = max(worst, abs(delta / (debye / math.sinh(1 / lam)) - 1))
    dt = time.perf_counter() - t0
    return [CheckResult("gap:closed_form", worst <= 1e-9 and dt < 0.1,
                        "omega_D / sinh(1/lambda), < 100 ms", f"max rel err {worst:.2e}, {dt * 1e3:.1f} ms",
                        "1e-9", "gap solver tolerance or bracket", seconds=dt)]


def check_kernels(config=None):
    out = []
    for key in ("al", "nb"):
        mat = load_material(key)
        e1 = abs(kernel_K1(mat) / kernel_K1_closed(mat) - 1)
        e2 = abs(kernel_K2(mat) / kernel_K2_closed(mat) - 1)
        out.append(CheckResult(f"kernels:{key}", max(e1, e2) <= 1e-6, "K1, K2 closed forms",
                               f"rel err K1 {e1:.2e}, K2 {e2:.2e}", "1e-6",
                               "raise the radial node count"))
    errs = [abs(gap_energy_integral(g) - 1) for g in np.logspace(-25, -21, 9)]
    out.append(CheckResult("kernels:energy_integral", max(errs) <= 1e-8, "1 for every gap",
                           f"max |I - 1| = {max(errs):.2e}", "1e-8", "raise node count"))
    return out


def check_green_consistency(config=None):
    mat = load_material("al")
    vs = np.array([0.0, 0.0, mat.critical_velocity / 100])
    e, c = np.meshgrid(np.linspace(-20, 20, 40), np.linspace(-1, 1, 25), indexing="ij")
    e, c = e.ravel(), c.ravel()
    q = np.sqrt(2 * mat.electron_mass * (mat.chemical_potential + e * mat.gap)) / mat.hbar
    vec = np.stack([q * np.sqrt(1 - c**2), np.zeros_like(q), q * c], axis=1)
    a = occupation_from_g(vec, vs, mat)
    b = occupation(vec, vs, mat)
    err = float(np.max(np.abs(a - b) / np.abs(b)))
    return [CheckResult("greens:occupation", err <= 1e-12, "G-function occupation = BCS occupation",
                        f"max rel err {err:.2e} over {vec.shape[0]} modes", "1e-12",
                        "sign of the equal-time limit or delta G_vs prefactor")]


def check_impurity(config: RunConfig):
    mat = load_material("al")
    branches = BranchPair.symmetric((0.0, 0.0, mat.critical_velocity / 200))
    box = (2e-7, 2e-7, 2e-7)
    ens = ImpurityEnsemble.random(config.impurity_count, box, 1e-48, seed=config.seed)
    residuals = []
    for n in config.impurity_n_energy:
        try:
            res = impurity_first_order_residual(impurity_grid(n), ens, branches, mat)
        except ResolutionError as exc:
            return [CheckResult("impurity:cancellation", False, "residual < 1e-6 at 3 resolutions",
                                f"n_energy={n} unresolved", "1e-6", str(exc))]
        residuals.append(res.residual)
    small = all(r < 1e-6 for r in residuals)
    refined = all(b <= a or b <= ROUNDOFF_FLOOR for a, b in zip(residuals, residuals[1:]))
    ok = small and refined and len(residuals) >= 3
    return [CheckResult("impurity:cancellation", ok,
                        f"< 1e-6, nonincreasing or below {ROUNDOFF_FLOOR:g}, >= 3 resolutions",
                        ", ".join(f"{r:.2e}" for r in residuals), "1e-6",
                        "add more energy resolutions")]


def _random_ensemble(rng, max_modes=10):
    n = int(rng.integers(2, max_modes + 1))
    base = rng.uniform(0.05, 0.95, n)
    direction = rng.uniform(-1, 1, n)
    return base, direction


EXACT_GAP = 1e-15


def _loglog_slope(eps, gaps):
    return float(np.polyfit(np.log(eps), np.log(gaps), 1)[0])


def oracle_scaling(config: RunConfig, *, n_ensembles=100):
    """Log-log slopes of the linearized and first-order gaps to the exact oracle.

    Ensembles whose gap vanishes at every scale are left out of the fit.
    """
    rng = np.random.default_rng(config.seed + 1)
    eps = np.logspace(-3, -1, 5)
    lin_slopes, first_slopes = [], []
    for _ in range(n_ensembles):
        base, direction = _random_ensemble(rng)
        direction *= 0.04
        lin, first = [], []
        for e in eps:
            spec = ModeEnsembleSpec.explicit(base + e * direction, base)
            exact = exact_trace_distance_oracle(spec)
            lin.append(p_n_linearized(e * direction).value - exact)
            first.append(abs(first_order_trace_distance(spec) - exact))
        # a gap that is zero at every scale has no slope (the expansion is exact)
        if max(lin) > EXACT_GAP:
            lin_slopes.append(_loglog_slope(eps, lin))
        if max(first) > EXACT_GAP:
            first_slopes.append(_loglog_slope(eps, first))
    return np.array(lin_slopes), np.array(first_slopes)


def check_oracle(config: RunConfig):
    rng = np.random.default_rng(config.seed)
    violations = 0
    worst = -math.inf
    for _ in range(config.oracle_ensembles):
        base, direction = _random_ensemble(rng)
        a = np.clip(base + 0.5 * direction * rng.uniform(0, 1), 0, 1)
        spec = ModeEnsembleSpec.explicit(a, base)
        gap = p_n_linearized(a - base).value - exact_trace_distance_oracle(spec)
        worst = max(worst, -gap)
        violations += gap < -1e-12
    out = [CheckResult("distinguish:upper_bound", violations == 0,
                       f"linearized >= exact on {config.oracle_ensembles} ensembles",
                       f"{violations} violations", "1e-12")]
    lin, first = oracle_scaling(config)
    # ensembles whose second-order coefficient nearly cancels pick up third-order
    # curvature over the fitted range, so the median carries the verdict
    inside = float(np.mean(np.abs(first - 2) <= 0.1))
    ok = abs(float(np.median(first)) - 2) <= 0.1 and inside >= 0.9
    out.append(CheckResult("distinguish:first_order_scaling", ok,
                           "median slope 2 for |first-order expansion - exact|, >= 90% of fits within tolerance",
                           f"median {np.median(first):.3f}, range {first.min():.3f}..{first.max():.3f}, "
                           f"{inside:.0%} of {first.size} fits within", "+-0.1"))
    out.append(CheckResult("distinguish:linearized_gap_slope", bool(np.all(np.abs(lin - 2) <= 0.1)),
                           "slope of (linearized - exact)",
                           f"slopes {lin.min():.3f}..{lin.max():.3f}", "report only",
                           "the linearized sum bound is tight only to first order "
                           "in a single mode; with several modes its gap is linear",
                           informational=True))
    return out


def check_basis(config: RunConfig):
    rng = np.random.default_rng(config.seed + 2)
    violations = 0
    t0 = time.perf_counter()
    for i in range(config.basis_matrices):
        dim = int(rng.integers(2, 9))
        d = random_hermitian(dim, rng, 0.1)
        rep = basis_optimality_check(d, config.basis_trials, seed=config.seed + 1000 + i)
        violations += rep.violations
    return [CheckResult("distinguish:basis_optimality", violations == 0,
                        f"0 violations over {config.basis_matrices} x {config.basis_trials}",
                        f"{violations}", "relative 1e-12", seconds=time.perf_counter() - t0)]


def check_tunnel(config=None):
    dev = load_device("delft")
    est = junction_total(dev.junction, dev.material)
    ok = 10 <= est.lo and est.hi <= 100
    out = [CheckResult("junction:order_of_magnitude", ok, "[10, 100]",
                       f"{est.value:.2f} [{est.lo:.2f}, {est.hi:.2f}]", "order of magnitude",
                       "bundled Delft junction calibration")]
    within = 33 - 0.5 <= est.lo and est.hi <= 43 + 0.5
    out.append(CheckResult("junction:interval_33_43", within, "[33, 43]",
                           f"[{est.lo:.2f}, {est.hi:.2f}]", "report only", informational=True))
    return out


def random_spectrum_configs(count, seed):
    """(material, delta v) pairs with random Fermi velocity, gap and flow direction sign."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        v_f = rng.uniform(0.5e6, 2.5e6)
        tc = rng.uniform(0.5, 10.0)
        mat = make_material("Al" if tc < 3 else "Nb", v_f, tc=tc)
        dv = rng.uniform(-1.9, 1.9) * mat.critical_velocity
        out.append((mat, dv))
    return out


def check_spectrum(config: RunConfig):
    worst = 0.0
    rows = 0
    for mat, dv in random_spectrum_configs(config.spectrum_configs, config.seed + 3):
        spec = emit_spectrum(mat, dv, n_energy=config.n_energy, n_cos=17, window=config.energy_window)
        e, c, dn = spec[:, 0], spec[:, 1], spec[:, 2]
        q = np.sqrt(2 * mat.electron_mass * (mat.chemical_potential + e * mat.gap)) / mat.hbar
        bound = occupation_difference_bound(np.stack([0 * q, 0 * q, q * c], axis=1),
                                            (0.0, 0.0, dv), mat)
        excess = np.abs(dn) - bound * (1 + 1e-12)
        worst = max(worst, float(np.max(excess)))
        rows += spec.shape[0]
    return [CheckResult("spectrum:per_mode_bound", worst <= 0, "|delta n| <= hbar|q.dv|/(2 Delta)",
                        f"max excess {worst:.2e} over {rows} rows", "relative 1e-12")]


CHECKS = {
    "gap": check_gap,
    "kernels": check_kernels,
    "greens": check_green_consistency,
    "impurity": check_impurity,
    "oracle": check_oracle,
    "basis": check_basis,
    "junction": check_tunnel,
    "spectrum": check_spectrum,
    "table": check_table,
}


def verify(config: RunConfig = RunConfig(), only=None):
    """Run the self-check suite; returns ``(exit_code, results)``.

    The exit code is 0 when every non-informational check passes, 2
    otherwise.  A check that raises is reported as failed with the error.
    """
    results = []
    for key, fn in CHECKS.items():
        if only and key not in only:
            continue
        try:
            results.extend(fn(config))
        except FluxsizeError as exc:
            results.append(CheckResult(key, False, "completes", type(exc).__name__, "-", str(exc)))
    failed = any(not r.passed and not r.informational for r in results)
    return (2 if failed else 0), results
