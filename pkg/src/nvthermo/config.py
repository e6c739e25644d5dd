"""Run configuration: YAML documents with unit-suffixed keys.

Every block is a dataclass; unknown keys are rejected so a typo never
silently falls back to a default. Relative paths resolve against the
directory of the config file.
"""

from dataclasses import dataclass, field, fields, asdict
from pathlib import Path
import os

import numpy as np
import yaml

from .constants import PhysicalConstants
from .errors import ParseError
from .spin import SpinSystem, n14_tensor

ENV_VAR = "NVTHERMO_CONFIG"

# 13C site with |A_z| near 13.7 MHz; tensor chosen so the two-manifold
# mean at 20 G lands just above 13685 kHz
DEMO_C13_TENSOR = [
    [12.9e6, 0.0, 1.5e6],
    [0.0, 12.8e6, 0.0],
    [1.5e6, 0.0, 13.632e6],
]


def _from_mapping(cls, data, where):
    if data is None:
        return cls()
    if not isinstance(data, dict):
        raise ParseError(f"block '{where}' must be a mapping")
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ParseError(f"unknown key(s) in '{where}': {', '.join(unknown)}")
    return cls(**data)


@dataclass
class ConstantsBlock:
    h_J_s: float = PhysicalConstants.h
    k_B_J_per_K: float = PhysicalConstants.k_B
    e_J_per_eV: float = PhysicalConstants.e
    gamma_e_Hz_per_G: float = PhysicalConstants.gamma_e
    gamma_n14_Hz_per_G: float = PhysicalConstants.gamma_n14
    gamma_c13_Hz_per_G: float = PhysicalConstants.gamma_c13

    def build(self):
        return PhysicalConstants(
            h=float(self.h_J_s),
            k_B=float(self.k_B_J_per_K),
            e=float(self.e_J_per_eV),
            gamma_e=float(self.gamma_e_Hz_per_G),
            gamma_n14=float(self.gamma_n14_Hz_per_G),
            gamma_c13=float(self.gamma_c13_Hz_per_G),
        )


@dataclass
class SystemBlock:
    D_Hz: float = 2.87e9
    P_Hz: float = -4.945e6
    B_G: list = field(default_factory=lambda: [0.0, 0.0, 20.0])
    include_n14: bool = True
    # either {parallel: .., perpendicular: ..} or a full 3x3 list
    AN_Hz: object = field(default_factory=lambda: {"parallel": -2.162e6, "perpendicular": -2.70e6})
    carbons_Hz: list = field(default_factory=lambda: [DEMO_C13_TENSOR])

    @classmethod
    def from_system(cls, system):
        return cls(
            D_Hz=float(system.D),
            P_Hz=float(system.P),
            B_G=[float(b) for b in system.B],
            include_n14=bool(system.include_n),
            AN_Hz=system.AN.tolist(),
            carbons_Hz=[a.tolist() for a in system.carbons],
        )

    def an_tensor(self):
        a = self.AN_Hz
        if isinstance(a, dict):
            extra = set(a) - {"parallel", "perpendicular"}
            if extra or len(a) != 2:
                raise ParseError("AN_Hz mapping needs exactly 'parallel' and 'perpendicular'")
            return n14_tensor(float(a["parallel"]), float(a["perpendicular"]))
        return np.array(a, dtype=float)

    def build(self, constants):
        return SpinSystem(
            D=float(self.D_Hz),
            P=float(self.P_Hz),
            B=tuple(float(b) for b in self.B_G),
            AN=self.an_tensor(),
            carbons=tuple(np.array(c, dtype=float) for c in self.carbons_Hz),
            include_n=bool(self.include_n14),
            constants=constants,
        )


def grid(spec):
    """A list of numbers, or {start, stop, num} for an inclusive linear grid."""
    if isinstance(spec, dict):
        if set(spec) != {"start", "stop", "num"}:
            raise ParseError("grid mapping needs exactly start, stop, num")
        return np.linspace(float(spec["start"]), float(spec["stop"]), int(spec["num"]))
    return np.asarray(spec, dtype=float)


@dataclass
class SimulationBlock:
    seed: int = 1
    nucleus: str = "C13-1"
    manifold: int = 1
    rf_Hz: object = None  # default: transition - 1203.5 Hz
    detuning_Hz: float = 1203.5
    times_s: object = field(default_factory=lambda: {"start": 0.0, "stop": 4e-3, "num": 201})
    t2star_s: float = 3e-3
    stretch: float = 1.5
    amplitude: float = 0.1
    offset: float = 0.02
    baseline: float = 0.5
    phase_rad: float = 0.3
    noise_sigma: float = 0.01
    polarization: float = 1.0
    temperatures_K: object = field(default_factory=lambda: {"start": 295.0, "stop": 320.0, "num": 6})
    tempco_Hz_per_K: float = 110.9
    t_ref_K: float = 300.0
    odmr_span_Hz: float = 20e6
    odmr_points: int = 2001
    odmr_linewidth_Hz: float = 1e6
    odmr_depth: float = 0.1


@dataclass
class ThermoBlock:
    a_stc0_Hz: float = 0.0
    c_stc_Hz: float = 0.0
    temperatures_K: object = field(default_factory=lambda: {"start": 0.0, "stop": 400.0, "num": 81})
    merge_window_meV: float = 1.0


@dataclass
class PathsBlock:
    measurements: object = None
    modes: object = None
    expansion: object = None
    trace: object = None


@dataclass
class RunConfig:
    constants: ConstantsBlock = field(default_factory=ConstantsBlock)
    system: SystemBlock = field(default_factory=SystemBlock)
    simulation: SimulationBlock = field(default_factory=SimulationBlock)
    thermo: ThermoBlock = field(default_factory=ThermoBlock)
    paths: PathsBlock = field(default_factory=PathsBlock)
    base_dir: Path = field(default=None, repr=False, compare=False)

    _blocks = {
        "constants": ConstantsBlock,
        "system": SystemBlock,
        "simulation": SimulationBlock,
        "thermo": ThermoBlock,
        "paths": PathsBlock,
    }

    @classmethod
    def from_dict(cls, data, base_dir=None):
        data = data or {}
        if not isinstance(data, dict):
            raise ParseError("config document must be a mapping")
        unknown = sorted(set(data) - set(cls._blocks))
        if unknown:
            raise ParseError(f"unknown top-level key(s): {', '.join(unknown)}")
        blocks = {name: _from_mapping(kind, data.get(name), name) for name, kind in cls._blocks.items()}
        return cls(**blocks, base_dir=base_dir)

    def to_dict(self):
        return {name: asdict(getattr(self, name)) for name in self._blocks}

    def physical_constants(self):
        return self.constants.build()

    def spin_system(self):
        return self.system.build(self.physical_constants())

    def resolve(self, path):
        if path is None:
            return None
        p = Path(path)
        if not p.is_absolute() and self.base_dir is not None:
            p = Path(self.base_dir) / p
        return p


def load_config(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8-sig")
    except OSError as exc:
        raise ParseError(f"cannot read config: {exc}", path=path) from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ParseError(
            f"invalid YAML: {getattr(exc, 'problem', exc)}",
            path=path,
            line=mark.line + 1 if mark else None,
            column=mark.column + 1 if mark else None,
        ) from exc
    try:
        return RunConfig.from_dict(data, base_dir=path.parent)
    except ParseError as exc:
        raise ParseError(str(exc), path=path) from exc
    except TypeError as exc:
        raise ParseError(f"bad config value: {exc}", path=path) from exc


def dump_config(config, path=None):
    """Serialize to YAML; returns the text and writes it when ``path`` is given."""
    text = yaml.safe_dump(config.to_dict(), sort_keys=False, default_flow_style=None)
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def system_to_yaml(system):
    """SpinSystem (and its constants) as a YAML config document."""
    c = system.constants
    cfg = RunConfig(
        constants=ConstantsBlock(c.h, c.k_B, c.e, c.gamma_e, c.gamma_n14, c.gamma_c13),
        system=SystemBlock.from_system(system),
    )
    return yaml.safe_dump(
        {"constants": asdict(cfg.constants), "system": asdict(cfg.system)},
        sort_keys=False,
        default_flow_style=None,
    )


def system_from_yaml(text):
    cfg = RunConfig.from_dict(yaml.safe_load(text))
    return cfg.spin_system()


def resolve_config(path=None):
    """Config from an explicit path, else $NVTHERMO_CONFIG, else defaults."""
    if path is None:
        path = os.environ.get(ENV_VAR) or None
    if path is None:
        return RunConfig()
    return load_config(path)
