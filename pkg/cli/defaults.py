"""
Tabela única de padrões da CLI.

Qualquer mudança em um valor daqui muda os artefatos gerados, então
DEFAULTS_VERSION deve ser incrementada junto.
"""

import copy

DEFAULTS_VERSION = 2

STANDARD_LADDER = (1e6, 1e9, 1e12, 1e18, 1e24, 1e36)

DEFAULTS: dict = {
    "version": DEFAULTS_VERSION,
    "params": {"alpha": 1.0, "beta": 1.0},
    "grid": {
        # half_width None → 40/((α + 2β)/4)
        "half_width": None,
        "n": 8193,
    },
    "solver": {
        "max_iter": 20000,
        "tol_energy": 1e-13,
        "tol_grad": 1e-6,
        "step_init": 1.0,
        "step_shrink": 0.5,
        "recenter_every": 50,
    },
    "ladder": {
        "fields": list(STANDARD_LADDER),
        "model": "polaron",
        # half_width = scale/μ(B)
        "scale": 40.0,
        "n": 4097,
    },
    "potential": {
        "field": 1e6,
        "x_min": 0.0,
        "x_max": 1.0,
        "samples": 201,
        "windows": [0.05, 0.5, 1.0],
    },
    "perturb": {
        "atoms": [{"location": 0.0, "weight": 1.0}],
        "gaussian": None,
        "eps_ladder": [1e-2, 1e-3, 1e-4],
        "extrapolate": True,
        "pairing_fields": list(STANDARD_LADDER),
    },
    "output": {"out": "runs", "format": "csv"},
    "verify": {
        "extraction_functions": 100,
        "extraction_fields": [1e3, 1e8, 1e20],
    },
}


def get_defaults() -> dict:
    """Cópia profunda da tabela (os chamadores podem alterá-la)."""
    return copy.deepcopy(DEFAULTS)
