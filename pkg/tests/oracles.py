"""Independent reference implementations used only by the tests.

The Hamiltonian oracle assembles matrix elements directly from
angular-momentum algebra on labeled basis states (no Kronecker products)
and diagonalizes in 40-digit arithmetic with mpmath.
"""

import itertools
import math

import mpmath as mp
import numpy as np


def _elem(s, op, m_bra, m_ket):
    """<m_bra| op |m_ket> for op in {x, y, z, z2, 1} of spin s."""
    if op == "1":
        return mp.mpf(1) if m_bra == m_ket else mp.mpf(0)
    if op == "z":
        return mp.mpf(m_ket) if m_bra == m_ket else mp.mpf(0)
    if op == "z2":
        return mp.mpf(m_ket) ** 2 if m_bra == m_ket else mp.mpf(0)
    up = mp.sqrt(mp.mpf(s * (s + 1) - m_ket * (m_ket + 1))) if m_bra == m_ket + 1 else mp.mpf(0)
    dn = mp.sqrt(mp.mpf(s * (s + 1) - m_ket * (m_ket - 1))) if m_bra == m_ket - 1 else mp.mpf(0)
    if op == "x":
        return (up + dn) / 2
    if op == "y":
        return (up - dn) / mp.mpc(0, 2)
    raise ValueError(op)


def oracle_basis(system):
    spins = [1] + ([1] if system.include_n else []) + [0.5] * len(system.carbons)
    ms = [[s - k for k in range(int(2 * s + 1))] for s in spins]
    return spins, list(itertools.product(*ms))


def oracle_hamiltonian(system, dps=40):
    """Dense mpmath matrix of the ground-state Hamiltonian."""
    mp.mp.dps = dps
    spins, basis = oracle_basis(system)
    n = len(basis)
    terms = []  # list of (coefficient, {spin_index: op})
    terms.append((system.D, {0: "z2"}))
    axes = "xyz"
    g = system.constants
    for a in range(3):
        if system.B[a]:
            terms.append((g.gamma_e * system.B[a], {0: axes[a]}))
    nuclei = []
    pos = 1
    if system.include_n:
        nuclei.append((pos, g.gamma_n14, system.AN, system.P))
        pos += 1
    for t in system.carbons:
        nuclei.append((pos, g.gamma_c13, t, 0.0))
        pos += 1
    for p, gamma, tensor, quad in nuclei:
        if quad:
            terms.append((quad, {p: "z2"}))
        for a in range(3):
            if system.B[a]:
                terms.append((-gamma * system.B[a], {p: axes[a]}))
        for a in range(3):
            for b in range(3):
                if tensor[a, b]:
                    terms.append((float(tensor[a, b]), {0: axes[a], p: axes[b]}))
    H = mp.matrix(n, n)
    for i, bra in enumerate(basis):
        for j, ket in enumerate(basis):
            total = mp.mpc(0)
            for coef, ops in terms:
                val = mp.mpf(coef)
                for k, s in enumerate(spins):
                    val *= _elem(s, ops.get(k, "1"), bra[k], ket[k])
                    if val == 0:
                        break
                total += val
            H[i, j] = total
    return H, basis


def oracle_eigen(system, dps=40):
    """(eigenvalues ascending as floats, eigenvector matrix as complex ndarray, basis)."""
    H, basis = oracle_hamiltonian(system, dps)
    E, Q = mp.eighe(H)
    order = sorted(range(len(E)), key=lambda k: E[k])
    vals = np.array([float(E[k]) for k in order])
    vecs = np.array([[complex(Q[i, k]) for k in order] for i in range(len(basis))])
    return vals, vecs, basis


def oracle_energy_map(system):
    """Map product-basis key -> energy, matched by maximum overlap."""
    vals, vecs, basis = oracle_eigen(system)
    out = {}
    for k in range(len(vals)):
        j = int(np.argmax(np.abs(vecs[:, k]) ** 2))
        mS, *rest = basis[j]
        if system.include_n:
            key = (int(mS), int(rest[0]), tuple(float(m) for m in rest[1:]))
        else:
            key = (int(mS), None, tuple(float(m) for m in rest))
        out[key] = vals[k]
    return out


def oracle_manifold_frequencies(system, idx):
    emap = oracle_energy_map(system)
    mN = 1 if system.include_n else None
    res = []
    for mS in (1, -1):
        up = [0.5] * len(system.carbons)
        dn = list(up)
        dn[idx] = -0.5
        res.append(abs(emap[(mS, mN, tuple(up))] - emap[(mS, mN, tuple(dn))]))
    return tuple(res)


def secular_carbon_frequencies(a_z, gamma_b):
    """First-order nuclear frequencies in mS=+1 and mS=-1 from the z-row of A."""
    azx, azy, azz = a_z
    plus = math.sqrt(azx**2 + azy**2 + (azz - gamma_b) ** 2)
    minus = math.sqrt(azx**2 + azy**2 + (azz + gamma_b) ** 2)
    return plus, minus


def second_order_bound(tensor, D, gamma_e_b):
    """Size of the second-order shift from electron-flip terms, |A_perp|^2 / (D - |gamma_e B|)."""
    t = np.asarray(tensor)
    perp = np.sqrt(np.sum(t[:2, :] ** 2))
    return 2 * perp**2 / (D - abs(gamma_e_b))


def naive_sum(values):
    total = 0.0
    for v in values:
        total += v
    return total


def bose_series_high_T(x):
    """High-temperature expansion of 1/(e^x - 1): 1/x - 1/2 + x/12."""
    return 1 / x - 0.5 + x / 12


def central_difference(f, x, h):
    return (f(x + h) - f(x - h)) / (2 * h)


def richardson_central(f, x, h):
    """Central difference with one Richardson step; truncation error O(h^4)."""
    return (4 * central_difference(f, x, h / 2) - central_difference(f, x, h)) / 3
