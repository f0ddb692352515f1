"""1D interatomic potential models and their geometric analysis.

All quantities are in atomic units: radii in bohr, energies in hartree,
masses in electron masses. Each model evaluates V, V' and V'' on its
domain; analytic kinds use closed forms, tabulated curves use a natural
cubic spline with no extrapolation.
"""

from __future__ import annotations

import io
import math
import os
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import (
    ArgumentError,
    BracketError,
    DomainError,
    NoInflectionError,
    NoMinimumError,
    NoRootError,
    OrderError,
    ParseError,
    TooFewPointsError,
)

# Root refinement targets: bisect the bracket down to this width in r,
# polish with secant steps until the residual in V is below ROOT_TOL_V.
ROOT_TOL_R = 1e-10
ROOT_TOL_V = 1e-12


@dataclass(frozen=True)
class TurningPoint:
    """Outer classical turning point: largest r with V(r) = energy."""

    r_c: float
    energy: float
    branch: str = "outer"


class PotentialModel:
    """Base class: an evaluable 1D potential with two derivatives.

    Immutable after construction; all evaluation methods are pure, so
    instances can be shared freely between workers.
    """

    kind = "abstract"
    #: valid radius interval (open at non-finite ends)
    domain = (-math.inf, math.inf)

    def _check_domain(self, r):
        lo, hi = self.domain
        arr = np.asarray(r, dtype=float)
        if np.any(arr < lo) or np.any(arr > hi):
            bad = arr[(arr < lo) | (arr > hi)]
            raise DomainError(
                f"r={float(np.atleast_1d(bad)[0]):g} outside domain [{lo:g}, {hi:g}] "
                f"of {self.kind} potential"
            )

    def value(self, r):
        raise NotImplementedError

    def derivative(self, r):
        raise NotImplementedError

    def second_derivative(self, r):
        raise NotImplementedError

    def dissociation_limit(self) -> float:
        """Energy of the separated-atom asymptote (may be +-inf)."""
        raise NotImplementedError


class HarmonicPotential(PotentialModel):
    """V(r) = k/2 (r - center)^2; unbounded, so no dissociation."""

    kind = "harmonic"

    def __init__(self, center: float, k: float):
        self.center = float(center)
        self.k = float(k)

    def value(self, r):
        self._check_domain(r)
        return 0.5 * self.k * (np.asarray(r, dtype=float) - self.center) ** 2

    def derivative(self, r):
        self._check_domain(r)
        return self.k * (np.asarray(r, dtype=float) - self.center)

    def second_derivative(self, r):
        self._check_domain(r)
        return np.full_like(np.asarray(r, dtype=float), self.k)

    def dissociation_limit(self):
        return math.inf


class InvertedHarmonicPotential(PotentialModel):
    """V(r) = -k/2 (r - center)^2 with k > 0: the anti-oscillator."""

    kind = "inverted_harmonic"

    def __init__(self, center: float, k: float):
        if k <= 0:
            raise ArgumentError("curvature magnitude k must be positive")
        self.center = float(center)
        self.k = float(k)

    def value(self, r):
        self._check_domain(r)
        return -0.5 * self.k * (np.asarray(r, dtype=float) - self.center) ** 2

    def derivative(self, r):
        self._check_domain(r)
        return -self.k * (np.asarray(r, dtype=float) - self.center)

    def second_derivative(self, r):
        self._check_domain(r)
        return np.full_like(np.asarray(r, dtype=float), -self.k)

    def dissociation_limit(self):
        return -math.inf


class LennardJonesPotential(PotentialModel):
    """V(r) = C12/r^12 - C6/r^6 with C6, C12 > 0."""

    kind = "lennard_jones"

    def __init__(self, c6: float, c12: float):
        if c6 <= 0 or c12 <= 0:
            raise ArgumentError("C6 and C12 must both be positive")
        self.c6 = float(c6)
        self.c12 = float(c12)
        self.domain = (0.0, math.inf)

    def _check_domain(self, r):
        if np.any(np.asarray(r, dtype=float) <= 0):
            raise DomainError("Lennard-Jones potential requires r > 0")

    def value(self, r):
        self._check_domain(r)
        r = np.asarray(r, dtype=float)
        return self.c12 / r**12 - self.c6 / r**6

    def derivative(self, r):
        self._check_domain(r)
        r = np.asarray(r, dtype=float)
        return -12.0 * self.c12 / r**13 + 6.0 * self.c6 / r**7

    def second_derivative(self, r):
        self._check_domain(r)
        r = np.asarray(r, dtype=float)
        return 156.0 * self.c12 / r**14 - 42.0 * self.c6 / r**8

    def dissociation_limit(self):
        return 0.0


class TabulatedPotential(PotentialModel):
    """Natural cubic spline through (r, V) samples; no extrapolation.

    The asymptote defaults to V at the last grid point; pass `asymptote`
    to override when the table is truncated short of the true limit.
    """

    kind = "tabulated"

    def __init__(self, r, v, asymptote: float | None = None):
        r = np.asarray(r, dtype=float)
        v = np.asarray(v, dtype=float)
        if r.ndim != 1 or r.shape != v.shape:
            raise ArgumentError("r and V must be 1D arrays of equal length")
        if len(r) < 4:
            raise TooFewPointsError("need at least 4 table rows")
        if np.any(np.diff(r) <= 0):
            raise OrderError("radii must be strictly increasing")
        self._spline = CubicSpline(r, v, bc_type="natural")
        self._d1 = self._spline.derivative(1)
        self._d2 = self._spline.derivative(2)
        self.r_table = r
        self.v_table = v
        self.domain = (float(r[0]), float(r[-1]))
        self._asymptote = float(v[-1]) if asymptote is None else float(asymptote)

    def value(self, r):
        self._check_domain(r)
        return self._spline(r)

    def derivative(self, r):
        self._check_domain(r)
        return self._d1(r)

    def second_derivative(self, r):
        self._check_domain(r)
        return self._d2(r)

    def dissociation_limit(self):
        return self._asymptote


def evaluate_with_derivs(model: PotentialModel, r):
    """Return (V, V', V'') at r. Raises DomainError off-domain."""
    return model.value(r), model.derivative(r), model.second_derivative(r)


def dissociation_limit(model: PotentialModel) -> float:
    return model.dissociation_limit()


def lj_c12_for_depth(c6: float, depth: float) -> float:
    """C12 making the Lennard-Jones well exactly `depth` deep.

    Inverts V_min = -C6^2 / (4 C12).
    """
    if c6 <= 0:
        raise ArgumentError("C6 must be positive")
    if depth <= 0:
        raise ArgumentError("depth must be positive")
    return c6 * c6 / (4.0 * depth)


def potential_minimum(model: PotentialModel) -> tuple[float, float]:
    """Locate the interior minimum (r_min, V_min).

    Closed forms for analytic kinds; spline-derivative roots for
    tabulated curves. Raises NoMinimumError for the inverted oscillator.
    """
    if isinstance(model, HarmonicPotential):
        return model.center, 0.0
    if isinstance(model, InvertedHarmonicPotential):
        raise NoMinimumError("inverted harmonic potential has no minimum")
    if isinstance(model, LennardJonesPotential):
        r_min = (2.0 * model.c12 / model.c6) ** (1.0 / 6.0)
        return r_min, -model.c6**2 / (4.0 * model.c12)
    if isinstance(model, TabulatedPotential):
        roots = model._d1.roots(extrapolate=False)
        roots = roots[(roots > model.domain[0]) & (roots < model.domain[1])]
        if len(roots) == 0:
            raise NoMinimumError("no stationary point inside the table")
        vals = model.value(roots)
        k = int(np.argmin(vals))
        if model.second_derivative(roots[k]) <= 0:
            raise NoMinimumError("lowest stationary point is not a minimum")
        return float(roots[k]), float(vals[k])
    raise ArgumentError(f"unsupported model kind {model.kind!r}")


def _bisect_secant(f, lo, hi):
    """Bracketed bisection to ROOT_TOL_R width, then secant polishing.

    f(lo) and f(hi) must have opposite signs. Bisection buys robustness
    on the steep repulsive wall; the secant steps recover precision.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise BracketError("no sign change over the bracket")
    while hi - lo > ROOT_TOL_R:
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if flo * fmid < 0:
            hi, fhi = mid, fmid
        else:
            lo, flo = mid, fmid
    x0, x1, f0, f1 = lo, hi, flo, fhi
    for _ in range(8):
        if f1 == f0:
            break
        x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
        if not (min(lo, hi) - ROOT_TOL_R <= x2 <= max(lo, hi) + ROOT_TOL_R):
            break
        f2 = f(x2)
        x0, f0, x1, f1 = x1, f1, x2, f2
        if abs(f2) <= ROOT_TOL_V:
            break
    return x1 if abs(f1) < abs(f0) else x0


def outer_turning_point(model: PotentialModel, energy: float) -> TurningPoint:
    """Largest radius where V(r) equals `energy`.

    Brackets outward from the potential minimum (or from the hilltop,
    for the inverted oscillator) and refines to |V(r_c) - E| <= 1e-12.
    """
    v_inf = model.dissociation_limit()
    if isinstance(model, InvertedHarmonicPotential):
        # hilltop at the center; every E below 0 has a root on each side
        if energy > 0.0:
            raise NoRootError(f"E={energy:g} above the hilltop of the inverted oscillator")
        start = model.center
        if energy == 0.0:
            return TurningPoint(start, energy)
    else:
        r_min, v_min = potential_minimum(model)
        if energy < v_min:
            raise NoRootError(f"E={energy:g} below the potential minimum {v_min:g}")
        if energy == v_min:
            return TurningPoint(r_min, energy)
        if math.isfinite(v_inf) and energy >= v_inf:
            raise NoRootError(f"E={energy:g} at or above the dissociation limit {v_inf:g}")
        start = r_min

    def f(r):
        return float(model.value(r)) - energy

    # expand the outer edge geometrically until the sign flips
    hi_limit = model.domain[1]
    step = max(abs(start), 1.0) * 0.5
    lo = start
    hi = start + step
    for _ in range(200):
        if hi >= hi_limit:
            hi = hi_limit
            if f(lo) * f(hi) <= 0:
                break
            raise BracketError(
                f"V(r)={energy:g} has no sign change before the domain edge r={hi_limit:g}"
            )
        if f(lo) * f(hi) <= 0:
            break
        lo = hi
        step *= 2.0
        hi = lo + step
    else:
        raise BracketError("failed to bracket the outer turning point")

    r_c = _bisect_secant(f, lo, hi)
    return TurningPoint(float(r_c), energy)


def curvature_inflection(model: PotentialModel) -> float:
    """Radius beyond the minimum where V'' crosses from + to -."""
    if isinstance(model, LennardJonesPotential):
        return (26.0 * model.c12 / (7.0 * model.c6)) ** (1.0 / 6.0)
    if isinstance(model, TabulatedPotential):
        r_min, _ = potential_minimum(model)
        roots = model._d2.roots(extrapolate=False)
        roots = roots[roots > r_min]
        for root in np.sort(roots):
            eps = 1e-6 * (model.domain[1] - model.domain[0])
            left = min(max(root - eps, model.domain[0]), model.domain[1])
            right = min(root + eps, model.domain[1])
            if model.second_derivative(left) > 0 > model.second_derivative(right):
                return float(root)
        raise NoInflectionError("tabulated V'' does not change sign beyond the minimum")
    raise NoInflectionError(f"{model.kind} potential has constant-sign curvature")


def load_tabulated(source, asymptote: float | None = None) -> TabulatedPotential:
    """Parse "r V" text (comments start with '#') into a spline model.

    `source` may be a path, a text stream, or a byte stream. Radii must
    be strictly increasing; malformed lines report their line number.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, "r", encoding="utf-8") as fh:
            return load_tabulated(fh, asymptote=asymptote)
    if isinstance(source, bytes):
        source = io.StringIO(source.decode("utf-8"))
    elif isinstance(source, (io.RawIOBase, io.BufferedIOBase)):
        source = io.TextIOWrapper(source, encoding="utf-8")

    radii: list[float] = []
    values: list[float] = []
    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"expected two columns, got {len(parts)}", lineno)
        try:
            r, v = float(parts[0]), float(parts[1])
        except ValueError:
            raise ParseError(f"non-numeric value in {line!r}", lineno) from None
        if not (math.isfinite(r) and math.isfinite(v)):
            raise ParseError(f"non-finite value in {line!r}", lineno)
        if radii and r <= radii[-1]:
            raise OrderError(f"r={r:g} does not increase past {radii[-1]:g}", lineno)
        radii.append(r)
        values.append(v)
    if len(radii) < 4:
        raise TooFewPointsError(f"only {len(radii)} data rows, need at least 4")
    return TabulatedPotential(np.array(radii), np.array(values), asymptote=asymptote)


def make_model(kind: str, **params) -> PotentialModel:
    """Construct a model from a kind name and keyword parameters."""
    if kind == "harmonic":
        return HarmonicPotential(params["center"], params["k"])
    if kind == "inverted_harmonic":
        return InvertedHarmonicPotential(params["center"], params["k"])
    if kind == "lennard_jones":
        c6 = params["c6"]
        c12 = params.get("c12")
        if c12 is None:
            c12 = lj_c12_for_depth(c6, params["depth"])
        return LennardJonesPotential(c6, c12)
    if kind == "tabulated":
        return load_tabulated(params["path"], asymptote=params.get("asymptote"))
    raise ArgumentError(f"unknown potential kind {kind!r}")
