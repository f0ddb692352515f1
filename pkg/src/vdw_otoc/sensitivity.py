"""Growth-rate extraction and turning-point rate predictions.

The correlator of a state whose outer turning point sits in the
negative-curvature tail grows exponentially for a while. This module
finds that window on the log-scale series, fits log C = log alpha +
lambda * t by ordinary least squares, and computes the two local
predictions for the rate: twice the classical value sqrt(|V''(r_c)|/mu)
at the turning point, and twice the same expression at the wavefunction
maximum r_m = r_c - (2 mu |V'(r_c)|)^(-1/3) implied by the Airy profile
of a linearized turning region.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import stats

from .errors import (
    ArgumentError,
    CurvatureZeroError,
    DegenerateFitError,
    DerivativeZeroError,
    NoWindowError,
)
from .potentials import PotentialModel, outer_turning_point
from .spectral import OtocSeries

#: local maxima within this fraction of the full log-range of the series
#: count as "global scale" when capping the window search
GLOBAL_PEAK_MARGIN = 0.05
#: edge points whose fit residual exceeds this many RMSEs get trimmed
EDGE_TRIM_SIGMA = 2.0
#: trimming stops once the refit slope moves by less than this fraction
SLOPE_STABLE_RTOL = 2.5e-3
#: Airy-profile maximum, in units of the turning-length scale; the exact
#: first maximum of Ai sits at -1.01879, the default keeps the round -1
AIRY_PEAK_Z = -1.0


@dataclass(frozen=True)
class GrowthWindow:
    """One exponential-growth stretch of a log-positive series."""

    t_start: float
    t_end: float
    n_points: int
    r_squared: float


@dataclass(frozen=True)
class ExponentialFit:
    """alpha * exp(lambda t) fit over one window, with its slope CI."""

    alpha: float
    lambda_otoc: float
    ci95: float
    delta_t: float
    lambda_dt_product: float


@dataclass(frozen=True)
class SensitivityReport:
    """Fitted rate for one state next to its local-rate predictions.

    `lambda_otoc`, `alpha`, `ci95`, `delta_t`, `lambda_dt_product` and
    `window` are None for regular states (no qualifying growth window).
    The exposed rate predictions are 2*lambda_c and 2*lambda_sc; the
    commutator squares the underlying amplitude, doubling the exponent.
    """

    n: int
    energy: float
    regime: str
    lambda_c: float
    lambda_sc: float
    r_c: float
    r_m: float
    curvature: float
    lambda_otoc: float | None = None
    alpha: float | None = None
    ci95: float | None = None
    delta_t: float | None = None
    lambda_dt_product: float | None = None
    window: GrowthWindow | None = None


class ClassicalRate(NamedTuple):
    lambda_c: float
    r_c: float
    curvature: float


class SemiclassicalRate(NamedTuple):
    lambda_sc: float
    r_m: float


def classical_sensitivity(model: PotentialModel, energy: float, mass: float) -> ClassicalRate:
    """Local rate sqrt(|V''(r_c)|/mass) at the outer turning point.

    The returned curvature carries the sign of V''(r_c): positive means
    locally oscillatory dynamics, negative means exponential sensitivity.
    """
    tp = outer_turning_point(model, energy)
    curvature = float(model.second_derivative(tp.r_c))
    return ClassicalRate(math.sqrt(abs(curvature) / mass), tp.r_c, curvature)


def classical_quadratic_trajectory(model: PotentialModel, energy: float, mass: float,
                                   r0: float, p0: float, times) -> np.ndarray:
    """Trajectory of the potential expanded to quadratic order at r_c.

    Cosine/sine solution for positive curvature, cosh/sinh for negative.
    `r0` must start near the turning point (within 10% of r_c) for the
    expansion to mean anything; that heuristic is enforced.
    """
    times = np.asarray(times, dtype=float)
    tp = outer_turning_point(model, energy)
    if abs(r0 - tp.r_c) > 0.1 * abs(tp.r_c):
        raise ArgumentError(
            f"r0={r0:g} is not within 10% of the turning point r_c={tp.r_c:g}"
        )
    vp = float(model.derivative(tp.r_c))
    vpp = float(model.second_derivative(tp.r_c))
    if abs(vpp) < 1e-14:
        raise CurvatureZeroError(f"V''({tp.r_c:g}) ~ 0; quadratic expansion degenerate")
    r_d = tp.r_c - vp / vpp
    rate = math.sqrt(abs(vpp) / mass)
    if vpp > 0:
        return r_d + (r0 - r_d) * np.cos(rate * times) + p0 / math.sqrt(
            mass * vpp
        ) * np.sin(rate * times)
    return r_d + (r0 - r_d) * np.cosh(rate * times) + p0 / math.sqrt(
        -mass * vpp
    ) * np.sinh(rate * times)


def semiclassical_sensitivity(model: PotentialModel, energy: float, mass: float,
                              airy_z: float = AIRY_PEAK_Z) -> SemiclassicalRate:
    """Rate evaluated where the turning-region wavefunction peaks.

    Linearizing V at r_c gives the Airy length rbar = (2 mass
    |V'(r_c)|)^(-1/3); the wavefunction maximum sits at r_m = r_c +
    airy_z * rbar, and the rate is sqrt(|V''(r_m)|/mass).
    """
    tp = outer_turning_point(model, energy)
    vp = float(model.derivative(tp.r_c))
    if abs(vp) < 1e-14:
        raise DerivativeZeroError(f"V'({tp.r_c:g}) ~ 0; no linear turning region")
    rbar = (1.0 / (2.0 * mass * abs(vp))) ** (1.0 / 3.0)
    r_m = tp.r_c + airy_z * rbar
    curvature = float(model.second_derivative(r_m))
    return SemiclassicalRate(math.sqrt(abs(curvature) / mass), r_m)


def _ols(t: np.ndarray, y: np.ndarray):
    """Slope, intercept, R^2, RMSE and residuals of y ~ t."""
    t_bar = t.mean()
    y_bar = y.mean()
    dt = t - t_bar
    dy = y - y_bar
    sxx = float(dt @ dt)
    slope = float(dt @ dy) / sxx
    intercept = y_bar - slope * t_bar
    resid = y - (slope * t + intercept)
    ss_res = float(resid @ resid)
    ss_tot = float(dy @ dy)
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    rmse = math.sqrt(ss_res / max(len(t) - 2, 1))
    return slope, intercept, r2, rmse, resid


def _search_cap(y: np.ndarray) -> int:
    """Index of the first local maximum within reach of the global one.

    Window search stops here: beyond the first global-scale peak the
    series is saturating or recurring, not growing.
    """
    y_max = y.max()
    margin = GLOBAL_PEAK_MARGIN * (y_max - y.min())
    for k in range(len(y)):
        left_ok = k == 0 or y[k] >= y[k - 1]
        right_ok = k == len(y) - 1 or y[k] >= y[k + 1]
        if left_ok and right_ok and y[k] >= y_max - margin:
            return k
    return len(y) - 1


def _longest_window(t: np.ndarray, y: np.ndarray, r2_min: float, min_points: int):
    """Longest [i, j] with OLS R^2 >= r2_min and positive slope.

    Ties break toward higher R^2, then earlier start. Prefix sums give
    every (start, end) fit in O(1).
    """
    n = len(y)
    best = None  # (length, r2, start, end)
    for i in range(0, n - min_points + 1):
        if best is not None and n - i < best[0]:
            break
        tt = t[i:]
        yy = y[i:]
        m = np.arange(1, len(tt) + 1, dtype=float)
        ct = np.cumsum(tt)
        cy = np.cumsum(yy)
        ctt = np.cumsum(tt * tt)
        cty = np.cumsum(tt * yy)
        cyy = np.cumsum(yy * yy)
        sxx = ctt - ct * ct / m
        sxy = cty - ct * cy / m
        syy = cyy - cy * cy / m
        with np.errstate(invalid="ignore", divide="ignore"):
            r2 = np.where(syy > 0, sxy * sxy / (sxx * syy), 1.0)
            slope = np.where(sxx > 0, sxy / np.where(sxx > 0, sxx, 1.0), 0.0)
        ok = (m >= min_points) & (slope > 0) & (r2 >= r2_min)
        hits = np.nonzero(ok)[0]
        if len(hits) == 0:
            continue
        j = int(hits[-1])
        cand = (j + 1, float(r2[j]), i, i + j)
        if best is None or (cand[0], cand[1], -cand[2]) > (best[0], best[1], -best[2]):
            best = cand
    return None if best is None else (best[2], best[3])


def _trim_to_stable_slope(t: np.ndarray, y: np.ndarray, lo: int, hi: int, min_points: int):
    """Shed edge points that sit off the fit line until the slope settles.

    The onset of exponential growth bends the log-series; points whose
    residual exceeds EDGE_TRIM_SIGMA * RMSE are dropped from the window
    edges, refitting until the slope changes by less than
    SLOPE_STABLE_RTOL. Wiggle-dominated windows stop immediately since
    their RMSE already covers the edge points.
    """
    slope, intercept, r2, rmse, resid = _ols(t[lo:hi], y[lo:hi])
    for _ in range(25):
        new_lo, new_hi = lo, hi
        while new_lo < hi - min_points and abs(resid[new_lo - lo]) > EDGE_TRIM_SIGMA * rmse:
            new_lo += 1
        while new_hi > new_lo + min_points and abs(resid[new_hi - 1 - lo]) > EDGE_TRIM_SIGMA * rmse:
            new_hi -= 1
        if (new_lo, new_hi) == (lo, hi):
            break
        new_fit = _ols(t[new_lo:new_hi], y[new_lo:new_hi])
        moved = abs(new_fit[0] - slope) > SLOPE_STABLE_RTOL * abs(slope)
        lo, hi = new_lo, new_hi
        slope, intercept, r2, rmse, resid = new_fit
        if not moved:
            break
    return lo, hi, slope, r2


def detect_growth_window(series: OtocSeries, r2_min: float = 0.98,
                         min_points: int = 20) -> GrowthWindow:
    """Locate the exponential-growth window of one correlator series.

    Zeros are masked before taking logs. The search runs from the first
    sample up to the first global-scale local maximum of log C; within
    that stretch the longest window with R^2 >= r2_min and positive
    slope wins, and its edges are then trimmed to a stable slope.
    Raises NoWindowError when nothing qualifies (regular dynamics).
    """
    values = np.asarray(series.values, dtype=float)
    times = np.asarray(series.times, dtype=float)
    if len(values) < 4 * min_points:
        raise ArgumentError(
            f"series has {len(values)} samples; need at least {4 * min_points}"
        )
    mask = values > 0
    t = times[mask]
    y = np.log(values[mask])
    if len(y) < min_points:
        raise NoWindowError("too few positive samples")

    cap = _search_cap(y)
    t = t[: cap + 1]
    y = y[: cap + 1]
    if len(y) < min_points:
        raise NoWindowError("no growth ahead of the first global-scale maximum")

    found = _longest_window(t, y, r2_min, min_points)
    if found is None:
        raise NoWindowError(f"no window of {min_points}+ points reaches R^2 >= {r2_min}")
    lo, hi = found[0], found[1] + 1
    lo, hi, slope, r2 = _trim_to_stable_slope(t, y, lo, hi, min_points)
    if slope <= 0:
        raise NoWindowError("trimmed window lost its positive slope")
    return GrowthWindow(t_start=float(t[lo]), t_end=float(t[hi - 1]),
                        n_points=hi - lo, r_squared=float(r2))


def fit_exponential(series: OtocSeries, window: GrowthWindow) -> ExponentialFit:
    """OLS of log C on t over the window; slope CI from Student's t.

    alpha = exp(intercept), lambda = slope, ci95 = half-width of the
    95% confidence interval on the slope from the residual variance.
    """
    values = np.asarray(series.values, dtype=float)
    times = np.asarray(series.times, dtype=float)
    mask = (times >= window.t_start) & (times <= window.t_end) & (values > 0)
    t = times[mask]
    y = np.log(values[mask])
    if len(t) < 3:
        raise DegenerateFitError(f"window holds {len(t)} usable points, need >= 3")
    slope, intercept, r2, rmse, resid = _ols(t, y)
    sxx = float(((t - t.mean()) ** 2).sum())
    se = rmse / math.sqrt(sxx)
    ci95 = float(stats.t.ppf(0.975, len(t) - 2) * se)
    delta_t = window.t_end - window.t_start
    return ExponentialFit(alpha=math.exp(intercept), lambda_otoc=slope, ci95=ci95,
                          delta_t=delta_t, lambda_dt_product=slope * delta_t)
