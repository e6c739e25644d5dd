"""Two-manifold averaging of 13C nuclear transition frequencies.

A 13C nucleus is measured twice, once inside mS=+1 and once inside mS=-1.
The mean of the two transition frequencies tracks the norm of the z-row of
its hyperfine tensor, sqrt(Azx^2 + Azy^2 + Azz^2), up to a field-dependent
remainder that does not move when the tensor drifts slightly.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ContractError, LabelLookupError, ValidationError
from .spin import diagonalize, transition_frequency

DEFAULT_FIELD_GAUSS = 20.0


def parse_site(nucleus, system=None):
    """Resolve a site identifier to a zero-based carbon index.

    Accepts an int (zero-based) or strings like ``"C13-2"`` / ``"C2"``
    (one-based, matching site numbering in the config).
    """
    if isinstance(nucleus, (int, np.integer)):
        idx = int(nucleus)
    else:
        text = str(nucleus).strip().upper()
        if text in ("N14", "14N"):
            raise LabelLookupError(
                "N14 is a spin-1 site; two-manifold averaging is defined for 13C sites only"
            )
        for prefix in ("C13-", "13C-", "C13_", "C"):
            if text.startswith(prefix) and text[len(prefix):].isdigit():
                idx = int(text[len(prefix):]) - 1
                break
        else:
            raise LabelLookupError(f"unrecognized nucleus identifier {nucleus!r}")
    if system is not None and not 0 <= idx < len(system.carbons):
        raise LabelLookupError(
            f"nucleus {nucleus!r} not in system ({len(system.carbons)} carbon site(s))"
        )
    return idx


def site_name(idx):
    return f"C13-{idx + 1}"


def coupling_norm(tensor):
    """sqrt(Azx^2 + Azy^2 + Azz^2) of a 3x3 hyperfine tensor."""
    a = np.asarray(tensor, dtype=float)
    return float(np.sqrt(a[2, 0] ** 2 + a[2, 1] ** 2 + a[2, 2] ** 2))


@dataclass(frozen=True)
class ManifoldFrequencies:
    omega_plus: float
    omega_minus: float
    nucleus: str
    tensor: np.ndarray = None

    def swapped(self):
        return ManifoldFrequencies(self.omega_minus, self.omega_plus, self.nucleus, self.tensor)


@dataclass(frozen=True)
class ExtractionResult:
    mean: float
    coupling_norm: float
    remainder: float
    nucleus: str = ""


def _reference_label(system, mS, idx, m_c):
    mN = 1 if system.include_n else None
    mC = [0.5] * len(system.carbons)
    mC[idx] = m_c
    return (mS, mN, tuple(mC))


def manifold_frequencies(system, nucleus=0, decomp=None):
    """Transition frequencies of one 13C inside the mS=+1 and mS=-1 manifolds.

    Spectator nuclei are held at the reference labels mI_N=+1 and mI_C=+1/2.
    Frequencies are absolute values (Hz).
    """
    idx = parse_site(nucleus, system)
    if decomp is None:
        decomp = diagonalize(system)
    freqs = []
    for mS in (1, -1):
        up = _reference_label(system, mS, idx, 0.5)
        down = _reference_label(system, mS, idx, -0.5)
        freqs.append(transition_frequency(decomp, up, down))
    return ManifoldFrequencies(freqs[0], freqs[1], site_name(idx), system.carbons[idx])


def mean_coupling(freqs, tensor=None):
    """Average the two manifold frequencies and split off the remainder."""
    if tensor is None:
        tensor = freqs.tensor
    if tensor is None:
        raise ValidationError("a hyperfine tensor is needed to compute the coupling norm")
    for name in ("omega_plus", "omega_minus"):
        v = getattr(freqs, name)
        if not np.isfinite(v) or v < 0:
            raise ValidationError(f"{name} must be finite and non-negative, got {v!r}")
    mean = (freqs.omega_plus + freqs.omega_minus) / 2
    norm = coupling_norm(tensor)
    return ExtractionResult(mean, norm, mean - norm, freqs.nucleus)


def extract(system, nucleus=0):
    return mean_coupling(manifold_frequencies(system, nucleus))


@dataclass(frozen=True)
class RemainderSweep:
    results: tuple

    @property
    def remainders(self):
        return np.array([r.remainder for r in self.results])

    @property
    def means(self):
        return np.array([r.mean for r in self.results])

    @property
    def norms(self):
        return np.array([r.coupling_norm for r in self.results])

    @property
    def spread(self):
        r = self.remainders
        return float(r.max() - r.min()) if len(r) else 0.0


def remainder_stability(system, tensor_series, nucleus=0):
    """Extract across a series of tensors for one site at a fixed field.

    Items of ``tensor_series`` are 3x3 tensors, or whole SpinSystems which
    must share the field of ``system``.
    """
    idx = parse_site(nucleus, system)
    results = []
    for k, item in enumerate(tensor_series):
        if hasattr(item, "carbons"):
            if tuple(item.B) != tuple(system.B):
                raise ContractError(
                    f"series entry {k} has field {item.B} G, expected {system.B} G; "
                    "the remainder is only stable at a fixed bias field"
                )
            sys_k = item
        else:
            sys_k = system.with_carbon(idx, item)
        results.append(extract(sys_k, idx))
    return RemainderSweep(tuple(results))


def temperature_sweep(system, temperatures, tensor_at, nucleus=0):
    """Rows of (T, omega_plus, omega_minus, mean, remainder) for tensors A(T)."""
    idx = parse_site(nucleus, system)
    rows = []
    for T in temperatures:
        tensor = tensor_at(T)
        freqs = manifold_frequencies(system.with_carbon(idx, tensor), idx)
        res = mean_coupling(freqs)
        rows.append(
            {
                "T_K": float(T),
                "omegaPlus_Hz": freqs.omega_plus,
                "omegaMinus_Hz": freqs.omega_minus,
                "mean_Hz": res.mean,
                "couplingNorm_Hz": res.coupling_norm,
                "remainder_Hz": res.remainder,
            }
        )
    return rows


def linear_drift_tensor(tensor, tempco_hz_per_k, t_ref=300.0):
    """Tensor A(T) scaled uniformly so its z-row norm moves at ``tempco`` Hz/K."""
    base = np.asarray(tensor, dtype=float)
    norm = coupling_norm(base)
    if norm == 0:
        raise ValidationError("cannot scale a tensor with zero z-row norm")

    def tensor_at(T):
        return base * (1.0 + tempco_hz_per_k * (T - t_ref) / norm)

    return tensor_at


def rf_to_absolute(rf_frequency, detuning):
    """Absolute transition frequency from the RF carrier and fitted detuning."""
    return rf_frequency + detuning
