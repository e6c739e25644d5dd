"""Synthetic Ramsey fringes and pulsed-ODMR spectra."""

from dataclasses import dataclass, astuple, fields

import numpy as np

from .errors import ContractError, ValidationError
from .extraction import manifold_frequencies
from .spin import diagonalize

RF_WINDOW_HZ = 50e3
FRINGE_PARAM_NAMES = ("amplitude", "detuning", "phase", "offset", "t2star", "stretch", "baseline")


@dataclass(frozen=True)
class FringeParams:
    """Parameters of {a sin(2 pi df t + phi0) + b} exp[-(t/T2*)^p] + c.

    Units: detuning in Hz, phase in rad, t2star in s; the rest are contrast.
    """

    amplitude: float = 0.1
    detuning: float = 1203.5
    phase: float = 0.0
    offset: float = 0.0
    t2star: float = 3e-3
    stretch: float = 1.0
    baseline: float = 0.5

    def __post_init__(self):
        if not self.t2star > 0:
            raise ValidationError(f"t2star must be positive, got {self.t2star!r}")
        if not self.stretch > 0:
            raise ValidationError(f"stretch must be positive, got {self.stretch!r}")
        if not self.amplitude >= 0:
            raise ValidationError(f"amplitude must be non-negative, got {self.amplitude!r}")

    def as_array(self):
        return np.array(astuple(self), dtype=float)

    @classmethod
    def from_array(cls, values):
        return cls(*(float(v) for v in values))

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _envelope_parts(t, t2star, stretch):
    t = np.asarray(t, dtype=float)
    ratio = t / t2star
    power = ratio ** stretch
    return ratio, power, np.exp(-power)


def fringe_model(t, params):
    """Ramsey fringe contrast at times ``t`` (s)."""
    a, df, phi, b, t2, p, c = astuple(params) if isinstance(params, FringeParams) else params
    _, _, env = _envelope_parts(t, t2, p)
    return (a * np.sin(2 * np.pi * df * np.asarray(t, dtype=float) + phi) + b) * env + c


def fringe_jacobian(t, params):
    """Analytic derivatives of ``fringe_model``, columns in FRINGE_PARAM_NAMES order."""
    a, df, phi, b, t2, p, c = astuple(params) if isinstance(params, FringeParams) else params
    t = np.asarray(t, dtype=float)
    ratio, power, env = _envelope_parts(t, t2, p)
    arg = 2 * np.pi * df * t + phi
    s, co = np.sin(arg), np.cos(arg)
    osc = a * s + b
    with np.errstate(divide="ignore", invalid="ignore"):
        log_ratio = np.where(ratio > 0, np.log(np.where(ratio > 0, ratio, 1.0)), 0.0)
    J = np.empty((t.size, 7))
    J[:, 0] = s * env
    J[:, 1] = a * co * 2 * np.pi * t * env
    J[:, 2] = a * co * env
    J[:, 3] = env
    J[:, 4] = osc * env * power * p / t2
    J[:, 5] = -osc * env * power * log_ratio
    J[:, 6] = 1.0
    return J


@dataclass(frozen=True)
class RamseyTrace:
    times: np.ndarray
    signal: np.ndarray
    noise_sigma: float = 0.0
    rf_frequency: float = float("nan")
    true_frequency: float = float("nan")

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        y = np.asarray(self.signal, dtype=float)
        if t.ndim != 1 or t.size == 0:
            raise ValidationError("times must be a non-empty 1-D array")
        if y.shape != t.shape:
            raise ValidationError(f"signal length {y.size} does not match times length {t.size}")
        if np.any(np.diff(t) <= 0):
            raise ValidationError("times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "signal", y)

    @property
    def detuning(self):
        return self.true_frequency - self.rf_frequency


def simulate_ramsey(
    system,
    nucleus,
    manifold,
    rf_frequency,
    times,
    t2star=3e-3,
    stretch=1.0,
    amplitude=0.1,
    offset=0.0,
    baseline=0.5,
    phase=0.0,
    noise_sigma=0.0,
    seed=None,
    polarization=1.0,
):
    """Ramsey fringe of one 13C transition inside the mS=``manifold`` subspace.

    The transition frequency comes from full diagonalization; the dynamics
    are reduced to the driven two-level pair, so the trace oscillates at
    (true frequency - rf_frequency). Nuclear initialization is ideal up to
    ``polarization``, which scales the fringe amplitude.
    """
    if manifold not in (1, -1):
        raise ValidationError(f"manifold must be +1 or -1, got {manifold!r}")
    if not 0.0 <= polarization <= 1.0:
        raise ValidationError(f"polarization must lie in [0, 1], got {polarization!r}")
    freqs = manifold_frequencies(system, nucleus)
    true = freqs.omega_plus if manifold == 1 else freqs.omega_minus
    detuning = true - rf_frequency
    if abs(detuning) > RF_WINDOW_HZ:
        raise ContractError(
            f"RF {rf_frequency:.1f} Hz is {detuning:+.1f} Hz from the transition at {true:.1f} Hz; "
            f"the two-level fringe model is only valid within +/-{RF_WINDOW_HZ:.0f} Hz"
        )
    t = np.asarray(times, dtype=float)
    if np.any(t < 0):
        raise ValidationError("free-evolution times must be non-negative")
    params = FringeParams(amplitude * polarization, detuning, phase, offset, t2star, stretch, baseline)
    signal = fringe_model(t, params)
    if noise_sigma > 0:
        rng = np.random.default_rng(seed)
        signal = signal + rng.normal(0.0, noise_sigma, size=t.size)
    return RamseyTrace(t, signal, float(noise_sigma), float(rf_frequency), float(true))


def noise_for_detuning_sigma(times, params, target_sigma):
    """Noise level whose linearized fit uncertainty on the detuning is ``target_sigma`` Hz."""
    J = fringe_jacobian(times, params)
    cov = np.linalg.inv(J.T @ J)
    return float(target_sigma / np.sqrt(cov[1, 1]))


@dataclass(frozen=True)
class OdmrSpectrum:
    frequencies: np.ndarray
    signal: np.ndarray
    centers: np.ndarray
    weights: np.ndarray


def lorentzian(f, center, fwhm):
    """Peak-normalized Lorentzian (value 1 at the center)."""
    hw = fwhm / 2
    return hw**2 / ((np.asarray(f, dtype=float) - center) ** 2 + hw**2)


def electron_transitions(system, decomp=None):
    """Allowed dmS=+/-1 transition frequencies from mS=0, one per nuclear configuration."""
    if decomp is None:
        decomp = diagonalize(system)
    out = []
    for lab in decomp.labels:
        if lab.mS != 0:
            continue
        e0 = decomp.eigenvalues[decomp.index_of(lab)]
        for mS in (-1, 1):
            e1 = decomp.energy((mS, lab.mI_N, lab.mI_C))
            out.append(abs(e1 - e0))
    return np.sort(np.array(out))


def simulate_odmr(system, mw_frequencies, linewidth, contrast_depth=0.1):
    """Pulsed-ODMR spectrum: unit baseline minus Lorentzian dips.

    Every nuclear configuration contributes one line per electron branch with
    depth ``contrast_depth / n_nuclear_states``; coincident lines add.
    """
    f = np.asarray(mw_frequencies, dtype=float)
    if f.size == 0:
        raise ValidationError("MW frequency grid is empty")
    if not linewidth > 0:
        raise ValidationError(f"linewidth must be positive, got {linewidth!r}")
    centers = electron_transitions(system)
    n_nuc = system.dimension // 3
    weights = np.full(centers.size, contrast_depth / n_nuc)
    signal = np.ones_like(f)
    for f0, w in zip(centers, weights):
        signal -= w * lorentzian(f, f0, linewidth)
    return OdmrSpectrum(f, signal, centers, weights)
