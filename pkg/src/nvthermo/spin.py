"""Ground-state spin Hamiltonian of the NV- center.

Basis ordering is electron (x) 14N (x) 13C(1) (x) ... with the magnetic
quantum number descending inside every factor, so the first basis state is
|mS=+1, mI_N=+1, +1/2, ...>. All couplings are in Hz, fields in Gauss.
"""

from dataclasses import dataclass, field, replace
import itertools

import numpy as np
from scipy.optimize import linear_sum_assignment

from .constants import DEFAULT_CONSTANTS, PhysicalConstants
from .errors import (
    AmbiguityError,
    CapacityError,
    DomainError,
    LabelLookupError,
    NumericError,
    ValidationError,
)

MAX_CARBONS = 4
DEFAULT_LABEL_THRESHOLD = 0.6


@dataclass(frozen=True)
class SpinOperators:
    multiplicity: int
    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray

    @property
    def spin(self):
        return (self.multiplicity - 1) / 2

    @property
    def m_values(self):
        return tuple(self.spin - k for k in range(self.multiplicity))

    @property
    def identity(self):
        return np.eye(self.multiplicity, dtype=complex)


def build_spin_operators(multiplicity):
    """Angular-momentum matrices in the |m> basis, m descending."""
    if multiplicity not in (2, 3):
        raise DomainError(f"unsupported multiplicity {multiplicity!r}; expected 2 or 3")
    s = (multiplicity - 1) / 2
    m = s - np.arange(multiplicity)
    # <m+1| S+ |m> = sqrt(s(s+1) - m(m+1)) sits on the superdiagonal
    ladder = np.sqrt(s * (s + 1) - m[1:] * (m[1:] + 1))
    s_plus = np.diag(ladder, k=1).astype(complex)
    s_minus = s_plus.conj().T
    sx = (s_plus + s_minus) / 2
    sy = (s_plus - s_minus) / 2j
    sz = np.diag(m).astype(complex)
    for op in (sx, sy, sz):
        op.setflags(write=False)
    return SpinOperators(multiplicity, sx, sy, sz)


def n14_tensor(a_parallel, a_perpendicular):
    """Axially symmetric 14N hyperfine tensor (two independent parameters)."""
    return np.diag([a_perpendicular, a_perpendicular, a_parallel]).astype(float)


def _as_tensor(value, name):
    arr = np.asarray(value)
    if np.iscomplexobj(arr):
        if np.any(arr.imag != 0):
            raise ValidationError(f"{name} must be real")
        arr = arr.real
    arr = np.array(arr, dtype=float)
    if arr.shape != (3, 3):
        raise ValidationError(f"{name} must be 3x3, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SpinSystem:
    """Parameters of the ground-state Hamiltonian.

    ``D``, ``P`` and every tensor entry are in Hz; ``B`` is in Gauss with the
    NV axis along z. Gyromagnetic ratios come from ``constants``.
    """

    D: float = 2.87e9
    P: float = -4.945e6
    B: tuple = (0.0, 0.0, 0.0)
    AN: np.ndarray = field(default_factory=lambda: n14_tensor(-2.162e6, -2.70e6))
    carbons: tuple = ()
    include_n: bool = True
    constants: PhysicalConstants = DEFAULT_CONSTANTS

    def __post_init__(self):
        b = np.array(self.B, dtype=float).reshape(-1)
        if b.shape != (3,):
            raise ValidationError(f"B must be a 3-vector, got {self.B!r}")
        object.__setattr__(self, "B", tuple(float(x) for x in b))
        object.__setattr__(self, "AN", _as_tensor(self.AN, "AN"))
        object.__setattr__(
            self,
            "carbons",
            tuple(_as_tensor(a, f"carbons[{k}]") for k, a in enumerate(self.carbons)),
        )

    @property
    def gamma_e(self):
        return self.constants.gamma_e

    @property
    def gamma_n14(self):
        return self.constants.gamma_n14

    @property
    def gamma_c13(self):
        return self.constants.gamma_c13

    @property
    def factor_dims(self):
        return (3,) + ((3,) if self.include_n else ()) + (2,) * len(self.carbons)

    @property
    def dimension(self):
        return int(np.prod(self.factor_dims))

    def with_field(self, B):
        return replace(self, B=B)

    def with_carbon(self, index, tensor):
        carbons = list(self.carbons)
        carbons[index] = tensor
        return replace(self, carbons=tuple(carbons))

    def scaled(self, k):
        """Every coupling and every gamma*B term multiplied by ``k``."""
        return replace(
            self,
            D=self.D * k,
            P=self.P * k,
            B=tuple(k * x for x in self.B),
            AN=self.AN * k,
            carbons=tuple(a * k for a in self.carbons),
        )

    def validate(self):
        if len(self.carbons) > MAX_CARBONS:
            raise CapacityError(
                f"{len(self.carbons)} carbons requested; at most {MAX_CARBONS} supported"
            )
        tensors = [("AN", self.AN)] + [(f"carbons[{k}]", a) for k, a in enumerate(self.carbons)]
        for name, a in tensors:
            if not np.all(np.isfinite(a)):
                raise ValidationError(f"{name} has non-finite entries")
            scale = max(np.abs(a).max(), 1.0)
            if np.abs(a - a.T).max() > 1e-12 * scale:
                raise ValidationError(f"{name} is not symmetric")
        if not all(np.isfinite(x) for x in (self.D, self.P) + self.B):
            raise ValidationError("D, P and B must be finite")


@dataclass(frozen=True)
class StateLabel:
    mS: int
    mI_N: object  # int in {-1, 0, 1}, or None when 14N is not included
    mI_C: tuple
    overlap: float = 1.0

    @property
    def key(self):
        return (self.mS, self.mI_N, tuple(self.mI_C))

    def __str__(self):
        parts = [f"mS={self.mS:+d}"]
        if self.mI_N is not None:
            parts.append(f"mN={self.mI_N:+d}")
        parts.extend(f"mC{k + 1}={'+' if m > 0 else '-'}1/2" for k, m in enumerate(self.mI_C))
        return "|" + ", ".join(parts) + ">"


def label_key(label):
    """Normalize a StateLabel or a (mS, mI_N, mI_C) tuple to a hashable key."""
    if isinstance(label, StateLabel):
        return label.key
    mS, mN, mC = label
    return (int(mS), None if mN is None else int(mN), tuple(float(m) for m in mC))


def product_basis(system):
    """Labels of the product basis in Hamiltonian ordering."""
    factors = [(1, 0, -1)]
    if system.include_n:
        factors.append((1, 0, -1))
    factors.extend([(0.5, -0.5)] * len(system.carbons))
    keys = []
    for combo in itertools.product(*factors):
        mS = combo[0]
        if system.include_n:
            mN, mC = combo[1], combo[2:]
        else:
            mN, mC = None, combo[1:]
        keys.append((mS, mN, tuple(mC)))
    return keys


def _lift(op, position, dims):
    out = np.ones((1, 1), dtype=complex)
    for k, d in enumerate(dims):
        out = np.kron(out, op if k == position else np.eye(d, dtype=complex))
    return out


def build_hamiltonian(system):
    """Assemble H = H_e + H_N + H_C on the product space (Hz)."""
    system.validate()
    dims = system.factor_dims
    S = build_spin_operators(3)
    I1 = build_spin_operators(3)
    I12 = build_spin_operators(2)
    Bx, By, Bz = system.B

    s_ops = [_lift(o, 0, dims) for o in (S.sx, S.sy, S.sz)]
    H = system.D * (s_ops[2] @ s_ops[2])
    H = H + system.gamma_e * (Bx * s_ops[0] + By * s_ops[1] + Bz * s_ops[2])

    nuclei = []
    pos = 1
    if system.include_n:
        nuclei.append((pos, I1, system.gamma_n14, system.AN, system.P))
        pos += 1
    for a in system.carbons:
        nuclei.append((pos, I12, system.gamma_c13, a, 0.0))
        pos += 1

    for position, ops, gamma, tensor, quad in nuclei:
        i_ops = [_lift(o, position, dims) for o in (ops.sx, ops.sy, ops.sz)]
        if quad:
            H = H + quad * (i_ops[2] @ i_ops[2])
        H = H - gamma * (Bx * i_ops[0] + By * i_ops[1] + Bz * i_ops[2])
        for a in range(3):
            for b in range(3):
                if tensor[a, b] != 0.0:
                    H = H + tensor[a, b] * (s_ops[a] @ i_ops[b])
    return H


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    labels: tuple = None
    basis: tuple = None

    def __len__(self):
        return len(self.eigenvalues)

    @property
    def is_labeled(self):
        return self.labels is not None

    def index_of(self, label):
        if self.labels is None:
            raise LabelLookupError("decomposition is not labeled")
        key = label_key(label)
        for k, lab in enumerate(self.labels):
            if lab.key == key:
                return k
        raise LabelLookupError(f"no eigenstate labeled {key!r}")

    def energy(self, label):
        return float(self.eigenvalues[self.index_of(label)])

    def reconstruct(self):
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.conj().T


def eigendecompose(H, hermitian_rtol=1e-10):
    """Diagonalize a Hermitian matrix.

    LAPACK ``zheevd`` supplies the eigenvectors; eigenvalues are then refined
    as extended-precision Rayleigh quotients, which removes most of the
    eps*||H|| rounding that otherwise sits at the 1e-6 Hz level for GHz
    spectra.
    """
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {H.shape}")
    if not np.all(np.isfinite(H)):
        raise ValidationError("matrix has non-finite entries")
    scale = np.abs(H).max() if H.size else 0.0
    asym = np.abs(H - H.conj().T).max() if H.size else 0.0
    if asym > hermitian_rtol * scale:
        raise ValidationError(
            f"matrix is not Hermitian: max|H - H^dag| = {asym:.3e} vs max|H| = {scale:.3e}"
        )
    Hc = (H + H.conj().T) / 2
    try:
        w, V = np.linalg.eigh(Hc)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigensolver failed to converge (n={H.shape[0]}): {exc}") from exc

    Hl = Hc.astype(np.clongdouble)
    Vl = V.astype(np.clongdouble)
    # dividing by v^dag v matters: unit norm is only good to ~1e-16
    rq = np.real(np.sum(Vl.conj() * (Hl @ Vl), axis=0)) / np.real(np.sum(Vl.conj() * Vl, axis=0))
    w = rq.astype(float)
    order = np.argsort(w, kind="stable")
    return EigenDecomposition(eigenvalues=w[order], eigenvectors=V[:, order])


def _align_degenerate(decomp, basis, rtol=1e-11):
    """Rotate eigenvectors inside exactly degenerate clusters onto the product basis."""
    w = decomp.eigenvalues
    V = decomp.eigenvectors.copy()
    if len(w) == 0:
        return V
    tol = rtol * max(np.abs(w).max(), 1.0)
    start = 0
    n = len(w)
    while start < n:
        stop = start + 1
        while stop < n and w[stop] - w[stop - 1] <= tol:
            stop += 1
        k = stop - start
        if k > 1:
            Vc = V[:, start:stop]
            weight = np.sum(np.abs(Vc) ** 2, axis=1)
            # ties resolved by lexicographic label order (descending m first)
            ranked = sorted(range(n), key=lambda j: (-round(weight[j], 12), basis[j]))
            chosen = sorted(ranked[:k], key=lambda j: basis[j])
            new = []
            for j in chosen:
                v = Vc @ Vc[j].conj()
                for u in new:
                    v = v - u * (u.conj() @ v)
                nrm = np.linalg.norm(v)
                if nrm < 1e-8:
                    break
                new.append(v / nrm)
            if len(new) == k:
                V[:, start:stop] = np.column_stack(new)
        start = stop
    return V


def label_eigenstates(decomp, system, threshold=DEFAULT_LABEL_THRESHOLD):
    """Attach product-basis labels to every eigenstate.

    Each eigenstate gets the basis state of maximum squared overlap; the
    assignment is a perfect matching. Raises AmbiguityError when any
    matched overlap falls below ``threshold``.
    """
    basis = product_basis(system)
    n = len(decomp.eigenvalues)
    if len(basis) != n:
        raise ValidationError(f"decomposition has dimension {n}, system has {len(basis)}")
    V = _align_degenerate(decomp, basis)
    overlaps = np.abs(V) ** 2  # overlaps[basis_j, eig_k]

    # greedy: every eigenstate takes its best basis state; a collision means
    # the greedy matching is not a bijection, so solve the assignment exactly
    best = np.argmax(overlaps, axis=0)
    if len(set(best.tolist())) == n:
        assignment = best
    else:
        rows, cols = linear_sum_assignment(-overlaps.T)
        assignment = np.empty(n, dtype=int)
        assignment[rows] = cols

    labels = []
    bad = []
    for k in range(n):
        j = int(assignment[k])
        ov = float(overlaps[j, k])
        mS, mN, mC = basis[j]
        labels.append(StateLabel(mS, mN, mC, ov))
        if ov < threshold:
            bad.append((k, labels[-1]))
    if bad:
        desc = ", ".join(f"#{k} {lab} (overlap {lab.overlap:.3f})" for k, lab in bad)
        raise AmbiguityError(
            f"{len(bad)} eigenstate(s) below labeling threshold {threshold}: {desc}",
            states=[k for k, _ in bad],
        )
    return EigenDecomposition(
        eigenvalues=decomp.eigenvalues,
        eigenvectors=V,
        labels=tuple(labels),
        basis=tuple(basis),
    )


def diagonalize(system, threshold=DEFAULT_LABEL_THRESHOLD):
    """Build, diagonalize and label in one call."""
    return label_eigenstates(eigendecompose(build_hamiltonian(system)), system, threshold)


def transition_frequency(decomp, label_a, label_b):
    """|E(a) - E(b)| in Hz."""
    return abs(decomp.energy(label_a) - decomp.energy(label_b))
