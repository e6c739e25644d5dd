"""Temperature dependence of a hyperfine coupling from expansion and phonons.

A(T) = A(0) + dA_stc(T) + dA_dyn(T), where
    dA_stc(T) = c_stc * [a(T)/a(0) - 1]
    dA_dyn(T) = sum_i c_i * n_i(T)
    A(0)      = A_stc(0) + sum_i c_i / 2
and n_i is the Bose-Einstein occupation of mode i. Mode energies are in
meV, everything else in Hz. First-order mode coefficients b_i are stored
but do not enter dA_dyn; their effect is carried by the static term.
"""

from dataclasses import dataclass, field, replace
import math

import numpy as np
from scipy.interpolate import PchipInterpolator

from .constants import DEFAULT_CONSTANTS
from .errors import DerivativeUndefinedError, DomainError, ExtrapolationError, ValidationError


def _reduced_energy(energy_mev, T, constants):
    return constants.mev_to_joule(energy_mev) / (constants.k_B * T)


def bose_einstein(energy_mev, T, constants=DEFAULT_CONSTANTS):
    """Mean phonon number 1/(exp(E/k_B T) - 1); zero at T = 0."""
    E = np.asarray(energy_mev, dtype=float)
    if np.any(E <= 0):
        raise DomainError("phonon energy must be positive")
    if T < 0:
        raise DomainError(f"temperature must be non-negative, got {T!r}")
    if T == 0:
        out = np.zeros_like(E)
    else:
        with np.errstate(over="ignore"):  # deep freeze-out: 1/inf -> 0
            out = 1.0 / np.expm1(_reduced_energy(E, T, constants))
    return float(out) if out.ndim == 0 else out


def bose_einstein_dT(energy_mev, T, constants=DEFAULT_CONSTANTS):
    """d n / d T = n (n + 1) x / T with x = E / k_B T (1/K)."""
    E = np.asarray(energy_mev, dtype=float)
    if np.any(E <= 0):
        raise DomainError("phonon energy must be positive")
    if T <= 0:
        out = np.zeros_like(E)
    else:
        x = _reduced_energy(E, T, constants)
        # n(n+1) = exp(x)/(exp(x)-1)^2, written to avoid overflow at large x
        em = np.exp(-x)
        out = x / T * em / (-np.expm1(-x)) ** 2
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class PhononModeTable:
    indices: np.ndarray
    energies: np.ndarray  # meV
    b: np.ndarray  # Hz per coordinate unit
    c: np.ndarray  # Hz per phonon

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=int).reshape(-1)
        arrays = [np.asarray(v, dtype=float).reshape(-1) for v in (self.energies, self.b, self.c)]
        if any(a.shape != idx.shape for a in arrays):
            raise ValidationError("mode table columns differ in length")
        if np.any(arrays[0] <= 0):
            raise ValidationError("mode energies must be positive (exclude translational modes)")
        if np.unique(idx).size != idx.size:
            dup = idx[np.argsort(idx)][np.flatnonzero(np.diff(np.sort(idx)) == 0)]
            raise ValidationError(f"duplicate mode index {int(dup[0])}")
        if not all(np.all(np.isfinite(a)) for a in arrays):
            raise ValidationError("mode table has non-finite entries")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "energies", arrays[0])
        object.__setattr__(self, "b", arrays[1])
        object.__setattr__(self, "c", arrays[2])

    @classmethod
    def empty(cls):
        return cls(np.zeros(0, int), np.zeros(0), np.zeros(0), np.zeros(0))

    def __len__(self):
        return self.indices.size


@dataclass(frozen=True)
class ExpansionTable:
    temperatures: np.ndarray  # K
    relative_expansion: np.ndarray  # a(T)/a(0) - 1

    def __post_init__(self):
        T = np.asarray(self.temperatures, dtype=float).reshape(-1)
        r = np.asarray(self.relative_expansion, dtype=float).reshape(-1)
        if T.shape != r.shape or T.size < 2:
            raise ValidationError("expansion table needs at least two (T, expansion) rows")
        if np.any(T < 0):
            raise ValidationError("temperatures must be non-negative")
        if np.any(np.diff(T) <= 0):
            raise ValidationError("temperatures must be strictly increasing")
        if np.any(np.diff(r) < 0):
            raise ValidationError("relative expansion must be non-decreasing in T")
        if T[0] == 0 and r[0] != 0:
            raise ValidationError("relative expansion at T = 0 must be 0")
        object.__setattr__(self, "temperatures", T)
        object.__setattr__(self, "relative_expansion", r)

    @property
    def t_min(self):
        return float(self.temperatures[0])

    @property
    def t_max(self):
        return float(self.temperatures[-1])


@dataclass(frozen=True)
class ThermoModel:
    a_stc0: float
    c_stc: float
    modes: PhononModeTable
    expansion: ExpansionTable
    constants: object = DEFAULT_CONSTANTS
    name: str = ""
    _interp: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if not (math.isfinite(self.a_stc0) and math.isfinite(self.c_stc)):
            raise ValidationError("a_stc0 and c_stc must be finite")
        interp = PchipInterpolator(self.expansion.temperatures, self.expansion.relative_expansion)
        object.__setattr__(self, "_interp", interp)

    def with_modes(self, modes):
        return replace(self, modes=modes, _interp=None)


def delta_A_dyn(modes, T, constants=DEFAULT_CONSTANTS):
    """sum_i c_i n_i(T), compensated summation."""
    if len(modes) == 0 or T == 0:
        return 0.0
    return math.fsum((modes.c * bose_einstein(modes.energies, T, constants)).tolist())


def _check_range(model, T):
    if not model.expansion.t_min <= T <= model.expansion.t_max:
        raise ExtrapolationError(
            f"T = {T} K outside expansion table range "
            f"[{model.expansion.t_min}, {model.expansion.t_max}] K"
        )


def relative_expansion(model, T):
    _check_range(model, T)
    return float(model._interp(T))


def delta_A_stc(model, T):
    """c_stc times the monotone-cubic interpolated relative expansion."""
    _check_range(model, T)
    if T == 0:
        return 0.0
    return model.c_stc * float(model._interp(T))


def a_zero(model):
    """A(0) = A_stc(0) + sum_i c_i / 2 (zero-point correction)."""
    if len(model.modes) == 0:
        return model.a_stc0
    return model.a_stc0 + math.fsum(model.modes.c.tolist()) / 2


def a_of_T(model, T):
    return a_zero(model) + delta_A_stc(model, T) + delta_A_dyn(model.modes, T, model.constants)


@dataclass(frozen=True)
class Derivative:
    total: float
    stc: float
    dyn: float


def dA_dT(model, T):
    """Temperature derivative of A(T) in Hz/K, split into stc and dyn parts."""
    lo, hi = model.expansion.t_min, model.expansion.t_max
    if not lo < T < hi:
        raise DerivativeUndefinedError(
            f"derivative needs T strictly inside ({lo}, {hi}) K, got {T}"
        )
    stc = model.c_stc * float(model._interp.derivative()(T))
    if len(model.modes):
        dyn = math.fsum((model.modes.c * bose_einstein_dT(model.modes.energies, T, model.constants)).tolist())
    else:
        dyn = 0.0
    return Derivative(stc + dyn, stc, dyn)


def merge_degenerate_modes(modes, window=1.0):
    """Merge modes whose energies lie within ``window`` meV, left to right.

    A cluster grows while the next energy is within ``window`` of the
    cluster's first member. Merged c is the sum; merged energy is the
    |c|-weighted mean (plain mean when all c vanish); merged b is the sum.
    """
    if len(modes) == 0:
        return modes
    order = np.argsort(modes.energies, kind="stable")
    E, b, c, idx = (modes.energies[order], modes.b[order], modes.c[order], modes.indices[order])
    out_E, out_b, out_c, out_i = [], [], [], []
    start = 0
    n = E.size
    while start < n:
        stop = start + 1
        while stop < n and E[stop] - E[start] <= window:
            stop += 1
        cs = c[start:stop]
        wts = np.abs(cs)
        if wts.sum() > 0:
            energy = float((wts * E[start:stop]).sum() / wts.sum())
        else:
            energy = float(E[start:stop].mean())
        out_E.append(energy)
        out_c.append(math.fsum(cs.tolist()))
        out_b.append(math.fsum(b[start:stop].tolist()))
        out_i.append(int(idx[start]))
        start = stop
    return PhononModeTable(np.array(out_i), np.array(out_E), np.array(out_b), np.array(out_c))


# synthetic demo models


def einstein_expansion_table(alpha_ref=1.0e-6, theta=1200.0, t_ref=300.0, t_max=600.0, step=5.0):
    """Relative expansion proportional to the thermal energy of one Einstein oscillator.

    Scaled so the expansion coefficient at ``t_ref`` equals ``alpha_ref`` (1/K).
    """
    T = np.arange(0.0, t_max + step / 2, step)

    def energy(t):
        with np.errstate(over="ignore"):
            return np.where(t > 0, theta / np.expm1(theta / np.where(t > 0, t, 1.0)), 0.0)

    x = theta / t_ref
    d_energy = x**2 * np.exp(x) / np.expm1(x) ** 2  # dE/dT at t_ref
    kappa = alpha_ref / d_energy
    return ExpansionTable(T, kappa * energy(T))


def synthetic_mode_table(n_modes=1530, seed=0, e_max=170.0, sign_mix=0.15):
    """Random mode table shaped roughly like a diamond supercell spectrum.

    Energies cluster toward the optical branch; c_i have unit-scale magnitude
    and a mostly common sign. Not derived from any electronic-structure run.
    """
    rng = np.random.default_rng(seed)
    energies = np.sort(e_max * rng.beta(2.5, 1.4, size=n_modes)) + 0.5
    mags = rng.lognormal(0.0, 0.8, size=n_modes) * (energies / e_max)
    signs = np.where(rng.random(n_modes) < sign_mix, -1.0, 1.0)
    b = rng.normal(0.0, 50.0, size=n_modes)
    return PhononModeTable(np.arange(1, n_modes + 1), energies, b, signs * mags)


def calibrate_model(
    target_dAdT,
    a_zero_hz,
    dyn_fraction,
    modes,
    expansion,
    T_ref=300.0,
    constants=DEFAULT_CONSTANTS,
    name="",
):
    """Scale a mode table and choose c_stc so dA/dT(T_ref) hits a target.

    ``dyn_fraction`` of the derivative is assigned to lattice vibrations and
    the rest to thermal expansion. ``a_stc0`` is set so A(0) = ``a_zero_hz``.
    """
    base = ThermoModel(0.0, 1.0, modes, expansion, constants, name)
    unit = dA_dT(base, T_ref)
    if unit.dyn == 0 and dyn_fraction != 0:
        raise ValidationError("mode table has no temperature response to scale")
    k = dyn_fraction * target_dAdT / unit.dyn if dyn_fraction else 0.0
    c_stc = (1 - dyn_fraction) * target_dAdT / unit.stc
    scaled = PhononModeTable(modes.indices, modes.energies, modes.b * k, modes.c * k)
    zero_point = math.fsum(scaled.c.tolist()) / 2
    return ThermoModel(a_zero_hz - zero_point, c_stc, scaled, expansion, constants, name)
