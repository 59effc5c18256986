"""Closed-form large-n eigenvalue predictions and residual diagnostics.

For the alternating model (d(k) = k + (-1)^k rho, a(k) = a1 sqrt(k))
the three-term prediction is

    lambda_n ~ n - a1^2 + r(n),
    r(n) = (-1)^n rho cos(4 a1 sqrt(n) - pi/4) / sqrt(2 pi a1) * n^(-1/4),

with remainder O(n^(-1/2+eps)).  For a general period-N potential with
Fourier data (alpha0, alpha_m, alphat_m) and power-law a(k),

    lambda_n ~ n + a(n-1)^2 - a(n)^2 + alpha0 + r(n),
    r(n) = sum_m alpha_m r_m(n) + sum_m alphat_m rt_m(n),

where, with da(n) = a(n+1) - a(n),

    r_m(n)  = cos(4 a(n) sin(m pi/N) - pi/4) / sqrt(2 pi a(n) sin(m pi/N))
              * cos(2 pi m n / N + 2 a(n) da(n) sin(2 pi m / N)),
    rt_m(n) = same with the trailing cos replaced by sin,

and the remainder is O(n^(-gamma+eps)).  Four prediction sources are
assembled: the two-term law "Y0" (no oscillatory term), the three-term
laws "E0"/"E2", and the diagonal correction "GRWA" whose oscillatory
term is the transformed-potential diagonal g_n(n) supplied by a caller
provider.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .eigensolve import SpectrumSlice
from .model import ModelSpec

__all__ = [
    "PredictionTable",
    "FitReport",
    "r_of_n",
    "r_amplitude_bound",
    "predict",
    "residual_fit",
    "fit_log_decay",
]

SOURCES = ("E0", "E2", "Y0", "GRWA")


def r_of_n(spec: ModelSpec, n):
    """The oscillatory three-term correction r(n); vectorized over n."""
    n_arr = np.atleast_1d(np.asarray(n, dtype=float))
    if np.any(n_arr < 1):
        raise DomainError("r(n) is defined for n >= 1")
    pot = spec.potential
    N = pot.period
    a_n = spec.offdiag.value(n_arr)
    da_n = spec.offdiag.delta(n_arr)
    out = np.zeros_like(n_arr)
    for m, alpha_m in enumerate(pot.alpha, start=1):
        if alpha_m == 0.0:
            continue
        s = math.sin(m * math.pi / N)
        amp = np.cos(4.0 * a_n * s - np.pi / 4.0) / np.sqrt(2.0 * np.pi * a_n * s)
        phase = 2.0 * np.pi * m * n_arr / N + 2.0 * a_n * da_n * math.sin(2.0 * m * math.pi / N)
        out += alpha_m * amp * np.cos(phase)
    for m, alphat_m in enumerate(pot.alpha_tilde, start=1):
        if alphat_m == 0.0:
            continue
        s = math.sin(m * math.pi / N)
        amp = np.cos(4.0 * a_n * s - np.pi / 4.0) / np.sqrt(2.0 * np.pi * a_n * s)
        phase = 2.0 * np.pi * m * n_arr / N + 2.0 * a_n * da_n * math.sin(2.0 * m * math.pi / N)
        out += alphat_m * amp * np.sin(phase)
    return float(out[0]) if np.ndim(n) == 0 else out


def r_amplitude_bound(spec: ModelSpec, n):
    """Envelope bound sum_m (|alpha_m| + |alphat_m|) / sqrt(2 pi a(n) sin(pi/N))."""
    pot = spec.potential
    coeff = sum(abs(a) for a in pot.alpha) + sum(abs(a) for a in pot.alpha_tilde)
    a_n = spec.offdiag.value(np.asarray(n, dtype=float))
    s = math.sin(math.pi / pot.period)
    return coeff / np.sqrt(2.0 * np.pi * a_n * s)


@dataclass(frozen=True)
class PredictionTable:
    """Per-index asymptotic predictions for one source."""

    source: str
    n: np.ndarray
    offset: np.ndarray        # a(n-1)^2 - a(n)^2, without the mean shift
    alpha0: float
    oscillatory: np.ndarray   # r(n), g_n(n), or zeros depending on source
    remainder_exponent: float
    g_provider: str = ""
    hypothesis_ok: bool = True

    def __post_init__(self):
        for name in ("n", "offset", "oscillatory"):
            arr = np.ascontiguousarray(np.asarray(getattr(self, name)))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not (self.n.shape == self.offset.shape == self.oscillatory.shape):
            raise DomainError("prediction columns must share one shape")

    @property
    def prediction(self) -> np.ndarray:
        return self.n + self.offset + self.alpha0 + self.oscillatory


def predict(spec: ModelSpec, n, source: str, g_provider=None) -> PredictionTable:
    """Assemble the prediction table for indices ``n`` and one source.

    ``g_provider`` (required for GRWA) maps an index to the diagonal
    g_n(n); its ``provider_name`` attribute, if present, is recorded so
    reports can tell the matrix route from the oscillatory route apart.
    """
    if source not in SOURCES:
        raise DomainError(f"unknown prediction source {source!r}")
    n_arr = np.atleast_1d(np.asarray(n, dtype=np.int64))
    if np.any(n_arr < 1):
        raise DomainError("prediction indices must be >= 1")
    offset = np.asarray(spec.offdiag.pair_difference(n_arr.astype(float)))
    alpha0 = spec.potential.alpha0
    gamma = spec.offdiag.gamma
    provider_name = ""

    if source == "Y0":
        osc = np.zeros_like(offset)
        rem = -1.0 / 16.0 if spec.mode == "H0" else -gamma
    elif source in ("E0", "E2"):
        if source == "E0" and spec.potential.period != 2:
            raise DomainError("the E0 source applies to period-2 potentials; use E2")
        osc = np.atleast_1d(r_of_n(spec, n_arr.astype(float)))
        rem = -0.5 if source == "E0" else -gamma
    else:  # GRWA
        if g_provider is None:
            raise DomainError("GRWA prediction needs a g_n provider")
        osc = np.asarray([float(g_provider(int(k))) for k in n_arr])
        provider_name = getattr(g_provider, "provider_name", getattr(g_provider, "__name__", "callable"))
        rem = -gamma
    return PredictionTable(
        source=source,
        n=n_arr.astype(float),
        offset=offset,
        alpha0=alpha0,
        oscillatory=osc,
        remainder_exponent=rem,
        g_provider=provider_name,
        hypothesis_ok=spec.asymptotics_supported,
    )


def fit_log_decay(n, values):
    """Least-squares slope/intercept of log|values| against log n.

    Zero entries are dropped (they only arise at the noise floor).
    """
    n = np.asarray(n, dtype=float)
    v = np.abs(np.asarray(values, dtype=float))
    mask = v > 0
    if mask.sum() < 2:
        raise DomainError("need at least two nonzero values for a decay fit")
    slope, intercept = np.polyfit(np.log(n[mask]), np.log(v[mask]), 1)
    return float(slope), float(intercept)


@dataclass(frozen=True)
class FitReport:
    """log-log regression of prediction residuals.

    ``exact_to_tolerance`` short-circuits the regression when the
    residuals sit at the truncation noise floor (the exactly solvable
    case); otherwise ``slope``/``intercept`` describe
    log|lambda_n - prediction| ~ intercept + slope * log n, and
    ``correlation`` is the Pearson correlation between the two-term
    residual lambda_n - (n + offset + alpha0) and the oscillatory term.
    """

    npoints: int
    exact_to_tolerance: bool
    exact_tol: float
    slope: float = float("nan")
    intercept: float = float("nan")
    max_abs_residual: float = float("nan")
    correlation: float = float("nan")


def residual_fit(lambdas: SpectrumSlice, preds: PredictionTable) -> FitReport:
    """Fit the decay exponent of |lambda_n - prediction| against n."""
    if not np.array_equal(lambdas.indices.astype(float), preds.n):
        raise DomainError("spectrum slice and prediction table cover different indices")
    n = preds.n
    if n.size < 8 or n.max() < 4.0 * n.min():
        raise DomainError("need >= 8 indices spanning a factor >= 4 in n")
    resid = lambdas.lambdas - preds.prediction
    two_term = lambdas.lambdas - (n + preds.offset + preds.alpha0)
    if preds.oscillatory.std() > 0 and two_term.std() > 0:
        correlation = float(np.corrcoef(two_term, preds.oscillatory)[0, 1])
    else:
        correlation = float("nan")
    trunc = lambdas.est_truncation_error
    exact_tol = max(1e-7, 10.0 * trunc if np.isfinite(trunc) else 0.0)
    max_resid = float(np.max(np.abs(resid)))
    if max_resid <= exact_tol:
        return FitReport(
            npoints=int(n.size),
            exact_to_tolerance=True,
            exact_tol=exact_tol,
            max_abs_residual=max_resid,
            correlation=correlation,
        )
    slope, intercept = fit_log_decay(n, resid)
    return FitReport(
        npoints=int(n.size),
        exact_to_tolerance=False,
        exact_tol=exact_tol,
        slope=float(slope),
        intercept=float(intercept),
        max_abs_residual=max_resid,
        correlation=correlation,
    )
