import numpy as np
import pytest
import sympy

from nvthermo.constants import DEFAULT_CONSTANTS
from nvthermo.errors import ContractError, ValidationError
from nvthermo.extraction import manifold_frequencies
from nvthermo.ramsey import (
    FringeParams,
    RamseyTrace,
    electron_transitions,
    fringe_jacobian,
    fringe_model,
    simulate_odmr,
    simulate_ramsey,
)
from nvthermo.spin import SpinSystem, diagonalize

GE = DEFAULT_CONSTANTS.gamma_e
TIMES = np.linspace(0, 4e-3, 201)


def test_fringe_at_zero():
    p = FringeParams(0.1, 1203.5, 0.7, 0.03, 2e-3, 1.3, 0.4)
    assert fringe_model(0.0, p) == pytest.approx(0.1 * np.sin(0.7) + 0.03 + 0.4, abs=1e-15)


def test_fringe_long_time_limit():
    p = FringeParams(0.1, 1203.5, 0.7, 0.03, 2e-3, 1.3, 0.4)
    assert fringe_model(1.0, p) == pytest.approx(0.4, abs=1e-15)


def test_fringe_matches_symbolic_evaluation():
    a, df, phi, b, T2, p, c, t = sympy.symbols("a df phi b T2 p c t", real=True)
    expr = (a * sympy.sin(2 * sympy.pi * df * t + phi) + b) * sympy.exp(-((t / T2) ** p)) + c
    vals = {a: 0.1, df: 1203.5, phi: 0, b: 0, T2: 3e-3, p: 1.5, c: 0.5}
    tt = 1 / (2 * 1203.5)
    ref = float(expr.subs(vals).subs(t, tt).evalf(30))
    got = fringe_model(tt, FringeParams(0.1, 1203.5, 0.0, 0.0, 3e-3, 1.5, 0.5))
    assert got == pytest.approx(ref, abs=1e-14)


def test_fringe_jacobian_matches_symbolic():
    syms = sympy.symbols("a df phi b T2 p c", real=True)
    t = sympy.Symbol("t", positive=True)
    a, df, phi, b, T2, p, c = syms
    expr = (a * sympy.sin(2 * sympy.pi * df * t + phi) + b) * sympy.exp(-((t / T2) ** p)) + c
    vals = dict(zip(syms, (0.1, 1203.5, 0.3, 0.02, 3e-3, 1.5, 0.5)))
    tt = np.array([0.0, 1e-4, 1.1e-3, 3.7e-3])
    J = fringe_jacobian(tt, FringeParams(*vals.values()))
    for k, s in enumerate(syms):
        d = sympy.diff(expr, s).subs(vals)
        for i, ti in enumerate(tt):
            ref = float(d.subs(t, ti).evalf(30)) if ti > 0 else float(sympy.limit(d, t, 0))
            assert J[i, k] == pytest.approx(ref, rel=1e-10, abs=1e-12)


def test_fringe_params_validation():
    with pytest.raises(ValidationError):
        FringeParams(t2star=0.0)
    with pytest.raises(ValidationError):
        FringeParams(stretch=-1.0)
    with pytest.raises(ValidationError):
        FringeParams(amplitude=-0.1)


def test_trace_validation():
    with pytest.raises(ValidationError):
        RamseyTrace(np.array([0.0, 1.0]), np.array([1.0]))
    with pytest.raises(ValidationError):
        RamseyTrace(np.array([]), np.array([]))
    with pytest.raises(ValidationError):
        RamseyTrace(np.array([0.0, 0.0]), np.array([1.0, 1.0]))


def true_frequency(system, manifold=1):
    f = manifold_frequencies(system, 0)
    return f.omega_plus if manifold == 1 else f.omega_minus


def test_zero_detuning_no_oscillation(c13_system_20):
    true = true_frequency(c13_system_20)
    tr = simulate_ramsey(c13_system_20, 0, 1, true, TIMES, t2star=2e-3, stretch=1.0,
                         amplitude=0.1, offset=0.02, baseline=0.5, phase=0.4)
    env = np.exp(-TIMES / 2e-3)
    np.testing.assert_allclose(tr.signal, (0.1 * np.sin(0.4) + 0.02) * env + 0.5, atol=1e-12)


def test_detuning_peak_location(c13_system_20):
    true = true_frequency(c13_system_20)
    t = np.arange(4096) * 2e-5
    tr = simulate_ramsey(c13_system_20, 0, 1, true - 1203.5, t, t2star=1e3, baseline=0.0, offset=0.0)
    spec = np.abs(np.fft.rfft(tr.signal - tr.signal.mean()))
    freqs = np.fft.rfftfreq(t.size, t[1] - t[0])
    peak = freqs[np.argmax(spec)]
    assert abs(peak - 1203.5) <= freqs[1]
    assert tr.detuning == pytest.approx(1203.5, abs=1e-6)


def test_degenerate_envelope(c13_system_20):
    true = true_frequency(c13_system_20, -1)
    rf = true - 1203.5
    tr = simulate_ramsey(c13_system_20, 0, -1, rf, TIMES, t2star=1e12, stretch=1.0,
                         amplitude=0.1, offset=0.03, baseline=0.5, phase=0.2)
    ref = 0.1 * np.sin(2 * np.pi * (true - rf) * TIMES + 0.2) + 0.03 + 0.5
    assert np.abs(tr.signal - ref).max() < 1e-12


def test_rf_outside_window(c13_system_20):
    true = true_frequency(c13_system_20)
    with pytest.raises(ContractError):
        simulate_ramsey(c13_system_20, 0, 1, true - 60e3, TIMES)


def test_determinism_and_noise_statistics(c13_system_20):
    true = true_frequency(c13_system_20)
    t = np.linspace(0, 4e-3, 20000)
    kw = dict(noise_sigma=0.01, seed=42)
    a = simulate_ramsey(c13_system_20, 0, 1, true - 1203.5, t, **kw)
    b = simulate_ramsey(c13_system_20, 0, 1, true - 1203.5, t, **kw)
    assert np.array_equal(a.signal, b.signal)
    clean = simulate_ramsey(c13_system_20, 0, 1, true - 1203.5, t)
    sd = np.std(a.signal - clean.signal, ddof=1)
    assert abs(sd - 0.01) < 0.05 * 0.01


def test_polarization_scales_amplitude(c13_system_20):
    true = true_frequency(c13_system_20)
    full = simulate_ramsey(c13_system_20, 0, 1, true - 1203.5, TIMES, baseline=0.0, offset=0.0)
    half = simulate_ramsey(c13_system_20, 0, 1, true - 1203.5, TIMES, baseline=0.0, offset=0.0,
                           polarization=0.5)
    np.testing.assert_allclose(half.signal, 0.5 * full.signal, atol=1e-15)
    with pytest.raises(ValidationError):
        simulate_ramsey(c13_system_20, 0, 1, true, TIMES, polarization=1.5)


def test_envelope_monotone_at_extrema():
    df = 1203.5
    p = FringeParams(0.1, df, 0.0, 0.0, 2e-3, 1.7, 0.5)
    # extrema of sin(2 pi df t) sit at t = (k + 1/2) / (2 df)
    tk = (np.arange(10) + 0.5) / (2 * df)
    mag = np.abs(fringe_model(tk, p) - 0.5)
    assert np.all(np.diff(mag) < 0)


# ODMR


def electron_only(**kw):
    return SpinSystem(include_n=False, **kw)


def dip_positions(spec):
    y = spec.signal
    idx = [i for i in range(1, y.size - 1) if y[i] < y[i - 1] and y[i] <= y[i + 1] and y[i] < 0.999]
    return spec.frequencies[idx]


def test_odmr_zero_field_single_dip():
    f = np.linspace(2.86e9, 2.88e9, 2001)
    spec = simulate_odmr(electron_only(), f, 1e6, 0.1)
    dips = dip_positions(spec)
    assert dips.size == 1
    assert dips[0] == pytest.approx(2.87e9, abs=f[1] - f[0])


def test_odmr_axial_two_dips():
    bz = 20.0
    f = np.linspace(2.8e9, 2.94e9, 14001)
    spec = simulate_odmr(electron_only(B=(0, 0, bz)), f, 1e6, 0.1)
    np.testing.assert_allclose(spec.centers, [2.87e9 - GE * bz, 2.87e9 + GE * bz], atol=1e-6)
    dips = dip_positions(spec)
    np.testing.assert_allclose(dips, spec.centers, atol=f[1] - f[0])


def test_odmr_n14_triplets_match_eigensolver():
    system = SpinSystem(B=(0, 0, 20.0))
    centers = electron_transitions(system)
    assert centers.size == 6
    d = diagonalize(system)
    # independent route: energies of each (mS, mN) level taken straight from the eigensolver
    ref = sorted(
        abs(d.energy((mS, mN, ())) - d.energy((0, mN, ()))) for mS in (-1, 1) for mN in (-1, 0, 1)
    )
    np.testing.assert_allclose(centers, ref, atol=1e-6)
    lower, upper = centers[:3], centers[3:]
    # first order: spacing is |A_par|; transverse 14N terms shift it at the 1e-3 level
    axial = abs(system.AN[2, 2])
    np.testing.assert_allclose(np.diff(lower), axial, rtol=5e-3)
    np.testing.assert_allclose(np.diff(upper), axial, rtol=5e-3)


def test_odmr_validation():
    with pytest.raises(ValidationError):
        simulate_odmr(electron_only(), [], 1e6)
    with pytest.raises(ValidationError):
        simulate_odmr(electron_only(), [2.87e9], 0.0)
