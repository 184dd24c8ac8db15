"""Least-squares fits for qubit coherence decay measurements.

Two models cover the standard experiments.  Energy relaxation decays as

    s(tau) = A * exp(-tau/T1) + C

and a Hahn echo taken with a stepped second-pulse phase oscillates inside
its decay envelope,

    s(tau) = A * exp(-tau/T2E) * sin(2*pi*Delta*tau + phi) + C,

where Delta is the artificial detuning set by the phase increment (cycles
per us here, i.e. MHz).

Fitting runs a trust-region least-squares pass (scipy) with analytic
Jacobians; decay times enter as log(T) so they stay positive.  Standard
errors come from the local quadratic model at the optimum scaled by the
residual variance, and go to zero on exact model data.  Initial guesses are
data-driven: tail mean for the offset, log-linear regression for the decay
time, and the dominant DFT bin for the detuning.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .errors import (
    AmbiguousFrequency,
    DegenerateData,
    NonConvergence,
    ValidationError,
)

__all__ = [
    "DecayCurve",
    "FitResult",
    "FitDiagnostics",
    "t1_model",
    "echo_model",
    "t1_jacobian",
    "echo_jacobian",
    "fit_t1",
    "fit_echo",
    "residual_diagnostics",
]

STEP_TOL = 1e-10
GRAD_TOL = 1e-8
DEFAULT_MAX_ITER = 200


@dataclass(frozen=True)
class DecayCurve:
    """One coherence measurement: signal versus delay.

    Delays are in us and must be strictly increasing and non-negative;
    signals are in arbitrary units.  ``sigma`` gives optional per-point
    standard deviations used as least-squares weights.
    """

    delays_us: np.ndarray
    signals: np.ndarray
    sigma: np.ndarray | None = None

    def __post_init__(self) -> None:
        delays = np.asarray(self.delays_us, dtype=float)
        signals = np.asarray(self.signals, dtype=float)
        object.__setattr__(self, "delays_us", delays)
        object.__setattr__(self, "signals", signals)
        if delays.ndim != 1 or signals.shape != delays.shape:
            raise ValidationError("delays and signals must be 1-D arrays of equal length")
        if delays.size < 2:
            raise ValidationError("a decay curve needs at least 2 points")
        if delays[0] < 0 or np.any(np.diff(delays) <= 0):
            raise ValidationError("delays must be non-negative and strictly increasing")
        if self.sigma is not None:
            sigma = np.asarray(self.sigma, dtype=float)
            object.__setattr__(self, "sigma", sigma)
            if sigma.shape != delays.shape:
                raise ValidationError("sigma must match the delay array length")
            if np.any(sigma <= 0):
                raise ValidationError("sigma values must be > 0")


@dataclass(frozen=True)
class FitResult:
    """Converged parameter set with standard errors and fit metadata."""

    model: str
    params: dict[str, float]
    stderr: dict[str, float]
    residual_rms: float
    converged: bool
    iterations: int

    def record(self) -> dict:
        return {
            "model": self.model,
            "params": dict(self.params),
            "stderr": dict(self.stderr),
            "residual_rms": self.residual_rms,
            "converged": self.converged,
            "iterations": self.iterations,
        }


@dataclass(frozen=True)
class FitDiagnostics:
    """Residual whiteness summary for a converged fit."""

    lag1_autocorr: float
    reduced_chisq: float | None
    passed: bool


def t1_model(tau, a, t1, c):
    """A*exp(-tau/T1) + C."""
    return a * np.exp(-tau / t1) + c


def t1_jacobian(tau, a, t1, c):
    """Columns d/dA, d/dT1, d/dC of the relaxation model."""
    e = np.exp(-tau / t1)
    return np.column_stack([e, a * e * tau / t1**2, np.ones_like(tau)])


def echo_model(tau, a, t2e, delta, phi, c):
    """A*exp(-tau/T2E)*sin(2*pi*Delta*tau + phi) + C."""
    return a * np.exp(-tau / t2e) * np.sin(2.0 * np.pi * delta * tau + phi) + c


def echo_jacobian(tau, a, t2e, delta, phi, c):
    """Columns d/dA, d/dT2E, d/dDelta, d/dphi, d/dC of the echo model."""
    e = np.exp(-tau / t2e)
    arg = 2.0 * np.pi * delta * tau + phi
    s = np.sin(arg)
    cs = np.cos(arg)
    return np.column_stack(
        [e * s, a * e * s * tau / t2e**2, a * e * cs * 2.0 * np.pi * tau, a * e * cs, np.ones_like(tau)]
    )


def _noise_floor(signals: np.ndarray) -> float:
    # second differences cancel smooth decay trends; Var = 6 sigma^2 for iid noise
    d2 = signals[2:] - 2.0 * signals[1:-1] + signals[:-2]
    return float(np.std(d2)) / math.sqrt(6.0)


def _solve(
    model_fn,
    jac_fn,
    t_index: int,
    x0_natural: np.ndarray,
    tau: np.ndarray,
    y: np.ndarray,
    sigma: np.ndarray | None,
    names: tuple[str, ...],
    model_name: str,
    max_iter: int,
) -> FitResult:
    """Trust-region solve in a space where the decay time is log-transformed."""
    weight = 1.0 / sigma if sigma is not None else None

    def to_natural(x):
        p = x.copy()
        p[t_index] = np.exp(p[t_index])
        return p

    def residual(x):
        r = model_fn(tau, *to_natural(x)) - y
        return r * weight if weight is not None else r

    def jacobian(x):
        p = to_natural(x)
        jn = jac_fn(tau, *p)
        jn[:, t_index] *= p[t_index]  # chain rule for the log transform
        return jn * weight[:, None] if weight is not None else jn

    x0 = x0_natural.copy()
    x0[t_index] = math.log(x0[t_index])
    res = least_squares(
        residual,
        x0,
        jac=jacobian,
        method="trf",
        xtol=STEP_TOL,
        gtol=GRAD_TOL,
        ftol=None,
        max_nfev=max_iter,
    )
    if res.status == 0:
        raise NonConvergence(
            f"{model_name} fit did not converge within {max_iter} iterations"
        )
    params = to_natural(res.x)

    # local quadratic model in the natural parametrization
    jn = jac_fn(tau, *params)
    if weight is not None:
        jn = jn * weight[:, None]
    r = residual(res.x)
    dof = max(1, tau.size - params.size)
    s2 = float(r @ r) / dof
    cov = s2 * np.linalg.pinv(jn.T @ jn)
    err = np.sqrt(np.clip(np.diag(cov), 0.0, None))

    raw = model_fn(tau, *params) - y
    return FitResult(
        model=model_name,
        params={k: float(v) for k, v in zip(names, params)},
        stderr={k: float(v) for k, v in zip(names, err)},
        residual_rms=float(np.sqrt(np.mean(raw**2))),
        converged=res.status >= 1,
        iterations=int(res.nfev),
    )


def fit_t1(curve: DecayCurve, max_iter: int = DEFAULT_MAX_ITER) -> FitResult:
    """Fit the offset exponential A*exp(-tau/T1) + C.

    Initialization: the offset from the mean of the last 10% of points, the
    amplitude from the first point, and T1 from a log-linear regression of
    |signal - offset|.  Raises :class:`DegenerateData` when the signal range
    does not clear the noise floor, :class:`NonConvergence` on iteration
    exhaustion.
    """
    tau, y = curve.delays_us, curve.signals
    if tau.size < 5:
        raise ValidationError("exponential fits need at least 5 points")
    span = float(tau[-1] - tau[0])
    rng = float(np.ptp(y))
    if rng <= 0 or rng <= _noise_floor(y):
        raise DegenerateData("signal range does not clear the noise floor; no decay to fit")

    n_tail = max(1, int(round(0.1 * tau.size)))
    c0 = float(np.mean(y[-n_tail:]))
    a0 = float(y[0] - c0)
    if a0 == 0.0:
        first_half = float(np.mean(y[: tau.size // 2]))
        a0 = 0.5 * rng if first_half >= c0 else -0.5 * rng

    z = np.abs(y - c0)
    mask = z > 1e-3 * rng
    t10 = span / 3.0
    if int(mask.sum()) >= 2 and np.ptp(tau[mask]) > 0:
        slope = float(np.polyfit(tau[mask], np.log(z[mask]), 1)[0])
        if slope < 0:
            t10 = -1.0 / slope
    t10 = float(np.clip(t10, 1e-3 * span, 1e3 * span))

    return _solve(
        t1_model,
        t1_jacobian,
        t_index=1,
        x0_natural=np.array([a0, t10, c0]),
        tau=tau,
        y=y,
        sigma=curve.sigma,
        names=("A", "T1", "C"),
        model_name="t1",
        max_iter=max_iter,
    )


def fit_echo(curve: DecayCurve, max_iter: int = DEFAULT_MAX_ITER) -> FitResult:
    """Fit the damped sinusoid A*exp(-tau/T2E)*sin(2*pi*Delta*tau+phi) + C.

    Initialization: Delta from the dominant nonzero bin of the DFT of the
    mean-subtracted signal (delays are assumed near-uniform for this step),
    T2E from a log regression of the oscillation envelope, and phi from a
    coarse 8-point scan.  Raises :class:`AmbiguousFrequency` when the two
    strongest bins are within 10% power of each other; warns when fewer
    than 3 oscillation periods are sampled.
    """
    tau, y = curve.delays_us, curve.signals
    if tau.size < 8:
        raise ValidationError("oscillatory fits need at least 8 points")
    span = float(tau[-1] - tau[0])
    c0 = float(np.mean(y))
    yc = y - c0
    if np.ptp(yc) <= 0:
        raise DegenerateData("signal is constant; no oscillation to fit")

    dt = float(np.mean(np.diff(tau)))
    power = np.abs(np.fft.rfft(yc)) ** 2
    nonzero = power[1:]
    order = np.argsort(nonzero)[::-1]
    k_dom = int(order[0]) + 1
    if nonzero.size >= 2 and nonzero[order[1]] >= 0.9 * nonzero[order[0]]:
        raise AmbiguousFrequency(
            f"spectral bins {k_dom} and {int(order[1]) + 1} are within 10% power of each other"
        )
    delta0 = k_dom / (tau.size * dt)
    if delta0 * span < 3.0:
        warnings.warn("fewer than 3 oscillation periods sampled", stacklevel=2)

    z = np.abs(yc)
    peaks = (
        np.nonzero((z[1:-1] >= z[:-2]) & (z[1:-1] >= z[2:]) & (z[1:-1] > 0.05 * z.max()))[0]
        + 1
    )
    t2e0 = span / 2.0
    if peaks.size >= 3 and np.ptp(tau[peaks]) > 0:
        slope = float(np.polyfit(tau[peaks], np.log(z[peaks]), 1)[0])
        if slope < 0:
            t2e0 = -1.0 / slope
    t2e0 = float(np.clip(t2e0, 1e-3 * span, 1e3 * span))

    a0 = float(z.max())
    phases = np.arange(8) * (math.pi / 4.0)
    ssr = [
        float(np.sum((echo_model(tau, a0, t2e0, delta0, p, c0) - y) ** 2)) for p in phases
    ]
    phi0 = float(phases[int(np.argmin(ssr))])

    return _solve(
        echo_model,
        echo_jacobian,
        t_index=1,
        x0_natural=np.array([a0, t2e0, delta0, phi0, c0]),
        tau=tau,
        y=y,
        sigma=curve.sigma,
        names=("A", "T2E", "Delta", "phi", "C"),
        model_name="echo",
        max_iter=max_iter,
    )


_MODELS = {
    "t1": (t1_model, ("A", "T1", "C")),
    "echo": (echo_model, ("A", "T2E", "Delta", "phi", "C")),
}


def residual_diagnostics(curve: DecayCurve, result: FitResult) -> FitDiagnostics:
    """Residual whiteness check for a converged fit.

    Reports the lag-1 autocorrelation of the residuals, the reduced
    chi-square when per-point sigmas were supplied, and a pass flag
    (|lag-1 autocorrelation| < 0.3).
    """
    if not result.converged:
        raise ValidationError("diagnostics need a converged fit result")
    if result.model not in _MODELS:
        raise ValidationError(f"unknown model '{result.model}'")
    fn, names = _MODELS[result.model]
    pred = fn(curve.delays_us, *[result.params[k] for k in names])
    r = curve.signals - pred
    rc = r - r.mean()
    denom = float(rc @ rc)
    lag1 = float(rc[1:] @ rc[:-1]) / denom if denom > 0 else 0.0
    reduced = None
    if curve.sigma is not None:
        dof = max(1, r.size - len(names))
        reduced = float(np.sum((r / curve.sigma) ** 2)) / dof
    return FitDiagnostics(lag1_autocorr=lag1, reduced_chisq=reduced, passed=abs(lag1) < 0.3)
