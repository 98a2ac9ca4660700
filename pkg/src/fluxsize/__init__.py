"""Superposition size of flux-qubit current states from BCS mode occupations."""
from .bcs_core import BranchPair, Material, Mode, make_material, occupation, solve_gap
from .device_io import RunConfig, SizeReport, emit_spectrum, load_device, load_material, run_pipeline, verify
from .distinguish import ModeEnsembleSpec, n_min_and_size, p_n_average, p_n_linearized
from .junction import JunctionSpec, junction_total
from .sizecalc import DeviceSpec, magnetic_moment_difference, total_mode_change

__version__ = "0.1.0"
