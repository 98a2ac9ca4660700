"""Physical constants (SI, CODATA 2018 exact/recommended values).

Every module reads constants through this table so that a single edit
(or a monkeypatch in tests) changes them everywhere.
"""

ELEMENTARY_CHARGE = 1.602176634e-19  # C
HBAR = 1.054571817e-34  # J s
ELECTRON_MASS = 9.1093837015e-31  # kg
BOHR_MAGNETON = 9.2740100783e-24  # J/T
BOLTZMANN = 1.380649e-23  # J/K
PLANCK = 2.0 * 3.141592653589793 * HBAR  # J s

# weak-coupling BCS ratio Delta(0) / (k_B T_c)
BCS_GAP_RATIO = 1.764
