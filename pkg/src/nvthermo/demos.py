"""Bundled synthetic demo data.

None of these tables come from electronic-structure calculations. Mode
tables are random draws, and each model is scaled so that dA/dT at 300 K
equals a room-temperature coefficient measured on single NV centers:

    n14-hyperfine   194.9 Hz/K   (14N hyperfine)
    n14-quadrupole   35.0 Hz/K   (14N quadrupole P)
    c13-2           110.9 Hz/K   (13C site with |A_z| ~ 13.7 MHz)

``scripts/make_demo_data.py`` regenerates every file from the recipes here.
"""

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .config import DEMO_C13_TENSOR, load_config
from .extraction import linear_drift_tensor, manifold_frequencies
from .spin import SpinSystem
from .tables import parse_expansion_table, parse_phonon_table
from .thermo import ThermoModel, calibrate_model, einstein_expansion_table, synthetic_mode_table


@dataclass(frozen=True)
class DemoRecipe:
    name: str
    target_dAdT: float  # Hz/K at 300 K
    a_zero: float  # Hz
    dyn_fraction: float
    seed: int


RECIPES = {
    "n14-hyperfine": DemoRecipe("n14-hyperfine", 194.9, 2.162e6, 0.85, 11),
    "n14-quadrupole": DemoRecipe("n14-quadrupole", 35.0, 4.945e6, 0.6, 12),
    "c13-2": DemoRecipe("c13-2", 110.9, 13.7e6, 0.5, 13),
}


def data_dir():
    return Path(resources.files("nvthermo") / "data")


def demo_config_path(name):
    if name not in RECIPES:
        raise KeyError(f"unknown demo {name!r}; choose from {', '.join(RECIPES)}")
    return data_dir() / f"demo_{name}.yaml"


def build_demo_model(name):
    r = RECIPES[name]
    modes = synthetic_mode_table(seed=r.seed)
    expansion = einstein_expansion_table()
    return calibrate_model(r.target_dAdT, r.a_zero, r.dyn_fraction, modes, expansion, name=name)


def load_demo_model(name):
    """Demo ThermoModel as read back from the bundled files."""
    cfg = load_config(demo_config_path(name))
    modes = parse_phonon_table(cfg.resolve(cfg.paths.modes))
    expansion = parse_expansion_table(cfg.resolve(cfg.paths.expansion))
    return ThermoModel(
        cfg.thermo.a_stc0_Hz, cfg.thermo.c_stc_Hz, modes, expansion, cfg.physical_constants(), name
    )


# per-NV demo measurements: (nvId, field along the NV axis in G)
DEMO_NVS = (("NV-a", 15.0), ("NV-b", 20.0), ("NV-c", 25.0))
DEMO_TEMPS = np.linspace(298.0, 308.0, 6)


def demo_measurements(seed=2023, tempco=110.9, sigma=2.8):
    """Measurement rows for a 13C(2)-class site on three NVs at different fields."""
    rng = np.random.default_rng(seed)
    rows = []
    for nv, bz in DEMO_NVS:
        system = SpinSystem(B=(0.0, 0.0, bz), carbons=(np.array(DEMO_C13_TENSOR),))
        tensor_at = linear_drift_tensor(DEMO_C13_TENSOR, tempco)
        for T in DEMO_TEMPS:
            f = manifold_frequencies(system.with_carbon(0, tensor_at(T)), 0)
            wp = f.omega_plus + rng.normal(0, sigma)
            wm = f.omega_minus + rng.normal(0, sigma)
            rows.append((nv, "C13-2", float(T), round(wp, 1), round(wm, 1), sigma))
    return rows
