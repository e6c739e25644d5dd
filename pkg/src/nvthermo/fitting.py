"""Parameter estimation: damped Gauss-Newton engine and closed-form regressions."""

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import ContractError, RankError, ValidationError
from .ramsey import FRINGE_PARAM_NAMES, FringeParams, fringe_jacobian, fringe_model, lorentzian

STRETCH_BOUNDS = (0.5, 3.0)


@dataclass
class FitReport:
    params: dict
    sigmas: dict
    residual_norm: float
    converged: bool
    iterations: int
    covariance: np.ndarray = None
    n_points: int = 0
    chi2_reduced: float = float("nan")
    gradient_norm: float = 0.0
    message: str = ""
    extra: dict = field(default_factory=dict)

    def __getitem__(self, name):
        return self.params[name]

    def sigma(self, name):
        return self.sigmas[name]

    def as_dict(self):
        return {
            "params": {k: float(v) for k, v in self.params.items()},
            "sigmas": {k: float(v) for k, v in self.sigmas.items()},
            "residual_norm": float(self.residual_norm),
            "converged": bool(self.converged),
            "iterations": int(self.iterations),
            "n_points": int(self.n_points),
            "chi2_reduced": float(self.chi2_reduced),
            "gradient_norm": float(self.gradient_norm),
            "message": self.message,
            **{k: v for k, v in self.extra.items()},
        }


def central_difference_jacobian(model, x, p, rel_step=None):
    p = np.asarray(p, dtype=float)
    if rel_step is None:
        rel_step = np.finfo(float).eps ** (1 / 3)
    cols = []
    for j in range(p.size):
        # step relative to the parameter itself; small-scale params (seconds) need it
        h = rel_step * (abs(p[j]) if p[j] != 0 else 1.0)
        up, dn = p.copy(), p.copy()
        up[j] += h
        dn[j] -= h
        cols.append((np.asarray(model(x, up)) - np.asarray(model(x, dn))) / (2 * h))
    return np.column_stack(cols)


def _check_rank(J, names, cond_limit=1e13):
    norms = np.linalg.norm(J, axis=0)
    dead = [names[j] for j in range(len(names)) if not norms[j] > 0]
    if dead:
        raise RankError(f"normal equations are singular: no sensitivity to {', '.join(dead)}")
    sv = np.linalg.svd(J / norms, compute_uv=False)
    if sv[-1] <= sv[0] / cond_limit:
        raise RankError(
            f"normal equations are singular (condition number {sv[0] / max(sv[-1], 1e-300):.2e})"
        )


def nlls_fit(
    model,
    x,
    y,
    p0,
    sigma=None,
    jacobian=None,
    bounds=None,
    names=None,
    xtol=1e-10,
    gtol=1e-10,
    max_iter=200,
    absolute_sigma=False,
):
    """Levenberg-Marquardt least squares.

    ``model(x, p)`` returns predictions; ``jacobian(x, p)`` returns the
    (n, k) derivative matrix and defaults to central differences.
    ``sigma`` are per-point standard deviations. Bounds are enforced by
    projection after each step. Parameter uncertainties come from the
    linearized covariance, scaled by reduced chi-square unless
    ``absolute_sigma``.

    Hitting ``max_iter`` returns a report with ``converged=False``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    p = np.array(p0, dtype=float)
    k = p.size
    names = list(names) if names is not None else [f"p{j}" for j in range(k)]
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValidationError("data must be finite")
    w = np.ones_like(y) if sigma is None else 1.0 / np.broadcast_to(np.asarray(sigma, float), y.shape)
    if not np.all(np.isfinite(w)) or np.any(w <= 0):
        raise ValidationError("sigma must be positive and finite")
    if jacobian is None:
        def jacobian(xx, pp):
            return central_difference_jacobian(model, xx, pp)
    if bounds is not None:
        lo = np.broadcast_to(np.asarray(bounds[0], float), p.shape)
        hi = np.broadcast_to(np.asarray(bounds[1], float), p.shape)
    else:
        lo = np.full(k, -np.inf)
        hi = np.full(k, np.inf)

    def project(v):
        return np.clip(v, lo, hi)

    def residual(pp):
        return w * (np.asarray(model(x, pp), dtype=float) - y)

    p = project(p)
    r = residual(p)
    if not np.all(np.isfinite(r)):
        raise ValidationError("model is not finite at the initial guess")
    cost = float(r @ r)
    J = w[:, None] * jacobian(x, p)
    _check_rank(J, names)

    lam = 1e-3
    converged = False
    message = "iteration cap reached"
    iterations = 0
    grad_norm = float("inf")
    while iterations < max_iter:
        A = J.T @ J
        g = J.T @ r
        col = np.sqrt(np.diag(A))
        rn = math.sqrt(cost)
        grad_norm = float(np.max(np.abs(g) / (col * rn))) if rn > 0 else 0.0
        if cost == 0.0 or grad_norm < gtol:
            converged = True
            message = "gradient below tolerance"
            break
        iterations += 1
        accepted = False
        while True:
            M = A + lam * np.diag(np.diag(A))
            try:
                step = np.linalg.solve(M, -g)
            except np.linalg.LinAlgError as exc:
                raise RankError(f"singular damped normal equations: {exc}") from exc
            p_new = project(p + step)
            actual = p_new - p
            rel_step = np.linalg.norm(actual) / (np.linalg.norm(p) + xtol)
            r_new = residual(p_new)
            cost_new = float(r_new @ r_new) if np.all(np.isfinite(r_new)) else np.inf
            if cost_new < cost:
                p, r, cost = p_new, r_new, cost_new
                lam = max(lam / 10, 1e-15)
                accepted = True
                break
            lam *= 10
            if rel_step < xtol or lam > 1e20:
                break
        if not accepted:
            converged = True
            message = "no further decrease at step tolerance"
            break
        J = w[:, None] * jacobian(x, p)
        if rel_step < xtol:
            converged = True
            message = "relative step below tolerance"
            break

    _check_rank(J, names)
    A = J.T @ J
    try:
        cov = np.linalg.inv(A)
    except np.linalg.LinAlgError as exc:
        raise RankError(f"singular normal equations at solution: {exc}") from exc
    n = y.size
    dof = n - k
    chi2_red = cost / dof if dof > 0 else float("nan")
    if not absolute_sigma:
        cov = cov * (chi2_red if dof > 0 else 1.0)
    sig = np.sqrt(np.clip(np.diag(cov), 0, None))
    return FitReport(
        params=dict(zip(names, p.tolist())),
        sigmas=dict(zip(names, sig.tolist())),
        residual_norm=math.sqrt(cost),
        converged=converged,
        iterations=iterations,
        covariance=cov,
        n_points=n,
        chi2_reduced=chi2_red,
        gradient_norm=grad_norm,
        message=message,
    )


# Ramsey fringes


def periodogram_peak(t, y, oversample=16):
    """Frequency (Hz) of the strongest component of a possibly non-uniform series."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float) - np.mean(y)
    span = t[-1] - t[0]
    if span <= 0 or t.size < 3:
        raise ValidationError("need at least three distinct sample times")
    nyquist = 0.5 * (t.size - 1) / span
    freqs = np.linspace(1.0 / span / oversample, nyquist, int(oversample * t.size / 2) + 1)
    power = np.abs(np.exp(-2j * np.pi * np.outer(freqs, t)) @ y) ** 2
    return float(freqs[np.argmax(power)])


def guess_fringe(trace):
    t, y = trace.times, trace.signal
    f0 = periodogram_peak(t, y)
    c0 = float(np.mean(y))
    a0 = float((np.max(y) - np.min(y)) / 2)
    basis = np.column_stack([np.sin(2 * np.pi * f0 * t), np.cos(2 * np.pi * f0 * t)])
    (s_coef, c_coef), *_ = np.linalg.lstsq(basis, y - c0, rcond=None)
    phi0 = float(math.atan2(c_coef, s_coef))
    span = float(t[-1] - t[0])
    return FringeParams(a0, f0, phi0, 0.0, max(span / 1.5, 1e-12), 1.0, c0)


def fit_fringe(trace, initial_guess=None, max_iter=200):
    """Fit the seven-parameter stretched-exponential Ramsey model.

    Without an initial guess the detuning comes from the periodogram peak,
    the baseline from the trace mean and the amplitude from half the
    peak-to-peak range. The stretch exponent is held inside [0.5, 3].
    """
    guess = guess_fringe(trace) if initial_guess is None else initial_guess
    span = trace.times[-1] - trace.times[0]
    if initial_guess is None and abs(guess.detuning) * span < 3:
        # the periodogram found only slow drift: no fringe to fit
        raise RankError(
            "trace shows no resolvable oscillation; detuning and phase are unidentifiable"
        )
    if guess.amplitude > 0 and abs(guess.detuning) * span < 3:
        raise ContractError(
            f"trace spans {abs(guess.detuning) * span:.2f} periods of the guessed detuning; need >= 3"
        )
    p0 = guess.as_array()
    p0[5] = min(max(p0[5], STRETCH_BOUNDS[0]), STRETCH_BOUNDS[1])
    lo = np.array([0.0, -np.inf, -np.inf, -np.inf, 1e-12, STRETCH_BOUNDS[0], -np.inf])
    hi = np.array([np.inf, np.inf, np.inf, np.inf, np.inf, STRETCH_BOUNDS[1], np.inf])
    sigma = trace.noise_sigma if trace.noise_sigma > 0 else None
    report = nlls_fit(
        fringe_model,
        trace.times,
        trace.signal,
        p0,
        sigma=sigma,
        jacobian=fringe_jacobian,
        bounds=(lo, hi),
        names=FRINGE_PARAM_NAMES,
        max_iter=max_iter,
    )
    report.extra["model"] = "{a*sin(2*pi*df*t+phi0)+b}*exp(-(t/T2*)^p)+c"
    return report


# temperature series


@dataclass(frozen=True)
class TempSeries:
    temperatures: np.ndarray
    values: np.ndarray
    sigmas: np.ndarray

    def __post_init__(self):
        T = np.asarray(self.temperatures, dtype=float)
        v = np.asarray(self.values, dtype=float)
        s = np.broadcast_to(np.asarray(self.sigmas, dtype=float), v.shape).copy()
        if T.shape != v.shape or T.ndim != 1:
            raise ValidationError("temperatures and values must be 1-D arrays of equal length")
        if np.any(s <= 0) or not np.all(np.isfinite(s)):
            raise ValidationError("sigmas must be positive and finite")
        object.__setattr__(self, "temperatures", T)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "sigmas", s)

    @classmethod
    def from_records(cls, records):
        T, v, s = zip(*records)
        return cls(np.array(T), np.array(v), np.array(s))

    def __len__(self):
        return self.temperatures.size


def fit_line_weighted(series, scale_by_chi2=False):
    """Inverse-variance weighted straight line value = slope*T + intercept.

    Uncertainties are the standard weighted-regression covariance
    (known sigmas); ``scale_by_chi2`` multiplies it by reduced chi-square.
    """
    T, y, s = series.temperatures, series.values, series.sigmas
    if np.unique(T).size < 2:
        raise RankError("need at least two distinct temperatures for a slope")
    w = 1.0 / s**2
    S = w.sum()
    t_mean = (w * T).sum() / S
    dt = T - t_mean
    Stt = (w * dt * dt).sum()
    slope = (w * dt * y).sum() / Stt
    y_mean = (w * y).sum() / S
    intercept = y_mean - slope * t_mean
    var_slope = 1.0 / Stt
    var_int = 1.0 / S + t_mean**2 / Stt
    cov_si = -t_mean / Stt
    resid = (y - (slope * T + intercept)) / s
    chi2 = float(resid @ resid)
    dof = T.size - 2
    chi2_red = chi2 / dof if dof > 0 else float("nan")
    cov = np.array([[var_slope, cov_si], [cov_si, var_int]])
    if scale_by_chi2 and dof > 0:
        cov = cov * chi2_red
    return FitReport(
        params={"slope": float(slope), "intercept": float(intercept)},
        sigmas={"slope": float(np.sqrt(cov[0, 0])), "intercept": float(np.sqrt(cov[1, 1]))},
        residual_norm=math.sqrt(chi2),
        converged=True,
        iterations=0,
        covariance=cov,
        n_points=T.size,
        chi2_reduced=chi2_red,
        message="closed form",
    )


def weighted_mean(values, sigmas, weighted=True):
    """Inverse-variance weighted mean and its standard error.

    With ``weighted=False`` the plain mean is returned with the propagated
    error sqrt(sum sigma^2)/n.
    """
    v = np.asarray(values, dtype=float)
    s = np.asarray(sigmas, dtype=float)
    if v.size == 0:
        raise ValidationError("cannot average an empty list")
    if s.shape != v.shape:
        raise ValidationError("values and sigmas differ in length")
    if np.any(s <= 0):
        raise ValidationError("sigmas must be positive")
    if not weighted:
        return float(v.mean()), float(np.sqrt((s**2).sum()) / v.size)
    w = 1.0 / s**2
    mean = float((w * v).sum() / w.sum())
    # rounding can put the mean a hair outside [min, max]
    mean = min(max(mean, float(v.min())), float(v.max()))
    return mean, float(1.0 / np.sqrt(w.sum()))


# polynomial fits feeding the thermal model


def _linear_lstsq(X, y, names):
    _check_rank(X, names)
    # column scaling keeps lstsq accurate when omega/hbar is ~1e13
    norms = np.linalg.norm(X, axis=0)
    coef, *_ = np.linalg.lstsq(X / norms, y, rcond=None)
    coef = coef / norms
    resid = y - X @ coef
    n, k = X.shape
    dof = n - k
    rss = float(resid @ resid)
    s2 = rss / dof if dof > 0 else float("nan")
    cov = np.linalg.inv(X.T @ X) * s2
    sig = np.sqrt(np.abs(np.diag(cov)))
    return coef, sig, cov, math.sqrt(rss), dof


def fit_mode_polynomial(x, a, omega, hbar=1.0):
    """Rank-2 fit A(X) = A0 + b X + c (omega/hbar) X^2 for one vibration mode.

    Returns a report with ``b`` (Hz per coordinate unit), ``c`` (Hz, the
    per-phonon contribution) and the intercept ``a0``.
    """
    x = np.asarray(x, dtype=float)
    a = np.asarray(a, dtype=float)
    if np.unique(x).size < 3:
        raise RankError("need at least three distinct coordinates for a rank-2 fit")
    if not omega > 0:
        raise ValidationError("mode frequency must be positive")
    scale = omega / hbar
    X = np.column_stack([np.ones_like(x), x, scale * x**2])
    coef, sig, cov, rnorm, dof = _linear_lstsq(X, a, ["a0", "b", "c"])
    return FitReport(
        params={"b": float(coef[1]), "c": float(coef[2]), "a0": float(coef[0])},
        sigmas={"b": float(sig[1]), "c": float(sig[2]), "a0": float(sig[0])},
        residual_norm=rnorm,
        converged=True,
        iterations=0,
        covariance=cov,
        n_points=x.size,
        chi2_reduced=rnorm**2 / dof if dof > 0 else float("nan"),
        message="linear least squares",
    )


def fit_proportional(x, y):
    """Through-origin slope y = c_stc * x with a relative residual diagnostic."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 1 or x.shape != y.shape:
        raise ValidationError("x and y must be non-empty and equal length")
    sxx = float(x @ x)
    if sxx == 0:
        raise RankError("all expansion values are zero; slope undefined")
    slope = float(x @ y) / sxx
    resid = y - slope * x
    rss = float(resid @ resid)
    dof = x.size - 1
    sigma = math.sqrt(rss / dof / sxx) if dof > 0 else float("nan")
    ynorm = float(np.linalg.norm(y))
    rel = math.sqrt(rss) / ynorm if ynorm > 0 else 0.0
    return FitReport(
        params={"c_stc": slope},
        sigmas={"c_stc": sigma},
        residual_norm=math.sqrt(rss),
        converged=True,
        iterations=0,
        n_points=x.size,
        message="through-origin least squares",
        extra={"relative_residual": rel},
    )


# ODMR


def odmr_model(f, p):
    n = (len(p) - 1) // 3
    out = np.full(np.shape(f), p[0], dtype=float)
    for k in range(n):
        center, fwhm, depth = p[1 + 3 * k: 4 + 3 * k]
        out = out - depth * lorentzian(f, center, fwhm)
    return out


def fit_odmr_dips(frequencies, signal, center_guesses, fwhm_guess, depth_guess=None, sigma=None):
    """Fit a baseline plus one Lorentzian dip per guessed center."""
    f = np.asarray(frequencies, dtype=float)
    y = np.asarray(signal, dtype=float)
    base = float(np.max(y))
    p0 = [base]
    names = ["baseline"]
    for k, c in enumerate(center_guesses):
        d = depth_guess if depth_guess is not None else base - float(np.interp(c, f, y))
        p0 += [float(c), float(fwhm_guess), d]
        names += [f"center{k}", f"fwhm{k}", f"depth{k}"]
    return nlls_fit(odmr_model, f, y, p0, sigma=sigma, names=names)
