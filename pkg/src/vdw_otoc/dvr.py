"""Sine-basis DVR grid, kinetic matrix, and bound-state eigensolver.

The kinetic matrix is the particle-in-a-box (sine) DVR of Colbert and
Miller, J. Chem. Phys. 96, 1982 (1992), on a uniform grid of N interior
points over (a, b). It is assembled symmetrically, entry by entry, so
the Hamiltonian is symmetric to the last bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ArgumentError,
    BracketError,
    DomainError,
    NoBoundStatesError,
    NoMinimumError,
)
from .potentials import (
    PotentialModel,
    _bisect_secant,
    dissociation_limit,
    outer_turning_point,
    potential_minimum,
)

#: bound filter: keep E_n < V_inf - THRESHOLD_EPS (hartree)
THRESHOLD_EPS = 1e-10
#: auto grid targets the level bound by this fraction of the well depth
AUTO_TARGET_MARGIN = 1e-6
#: outer box edge as a multiple of the target level's turning point
AUTO_BOX_FACTOR = 2.0


@dataclass(frozen=True)
class RadialGrid:
    """Uniform interior grid r_i = a + i*delta, i = 1..n."""

    a: float
    b: float
    n: int

    def __post_init__(self):
        if not (self.a < self.b):
            raise DomainError(f"grid interval reversed or empty: a={self.a:g}, b={self.b:g}")
        if self.n < 16:
            raise ArgumentError(f"need at least 16 interior points, got {self.n}")

    @property
    def delta(self) -> float:
        return (self.b - self.a) / (self.n + 1)

    @property
    def points(self) -> np.ndarray:
        return self.a + self.delta * np.arange(1, self.n + 1)


@dataclass(frozen=True)
class BoundStateBasis:
    """Bound eigenpairs of one (potential, mass, grid) triple.

    `psi` has one row per state, normalized so sum_i psi[n,i]^2 * delta = 1,
    sign-fixed positive at the innermost antinode. Immutable; safe to share.
    """

    mass: float
    energies: np.ndarray
    psi: np.ndarray
    threshold: float
    grid: RadialGrid

    @property
    def n_states(self) -> int:
        return len(self.energies)


def build_grid(model: PotentialModel, n: int, bounds: tuple[float, float] | None = None,
               target_margin: float = AUTO_TARGET_MARGIN) -> RadialGrid:
    """Choose the DVR box for `model`.

    Explicit policy (bounds given): validate a < r_min < b where a
    minimum exists. Auto policy: put `a` where the repulsive wall rises
    a full well depth above the dissociation limit, and `b` at twice the
    outer turning point of a level bound by `target_margin` of the depth.
    """
    if bounds is not None:
        a, b = float(bounds[0]), float(bounds[1])
        grid = RadialGrid(a, b, n)
        try:
            r_min, _ = potential_minimum(model)
        except NoMinimumError:
            return grid
        if not (a < r_min < b):
            raise DomainError(
                f"explicit bounds ({a:g}, {b:g}) do not straddle the minimum r_min={r_min:g}"
            )
        return grid

    threshold = dissociation_limit(model)
    if not math.isfinite(threshold):
        raise ArgumentError(
            f"auto grid needs a finite dissociation limit; {model.kind} has none"
        )
    r_min, v_min = potential_minimum(model)
    depth = threshold - v_min

    # inner edge: V(a) = threshold + depth on the repulsive wall
    def wall(r):
        return float(model.value(r)) - (threshold + depth)

    lo = model.domain[0]
    if not math.isfinite(lo) or lo <= 0:
        lo = r_min * 1e-3
    if wall(lo) < 0:
        raise DomainError(
            f"model domain starts at r={lo:g} where V is already below threshold+depth; "
            "supply a table reaching further up the repulsive wall or explicit bounds"
        )
    a = _bisect_secant(wall, lo, r_min)
    # land on the high side of the wall so V(a) >= threshold + depth holds
    step = 1e-10 * max(abs(a), 1.0)
    while wall(a) < 0 and a - step >= lo:
        a -= step
        step *= 2.0

    target_energy = threshold - target_margin * depth
    try:
        r_c = outer_turning_point(model, target_energy).r_c
    except BracketError as exc:
        raise DomainError(
            f"auto outer edge: turning point of the target level lies beyond "
            f"the model domain end {model.domain[1]:g} ({exc})"
        ) from exc
    b = AUTO_BOX_FACTOR * r_c
    if b > model.domain[1]:
        raise DomainError(
            f"auto outer edge b={b:g} exceeds the model domain end {model.domain[1]:g}"
        )
    return RadialGrid(float(a), float(b), n)


def kinetic_matrix(grid: RadialGrid, mass: float) -> np.ndarray:
    """Sine-DVR kinetic-energy matrix (hbar = 1).

    T_ij = pi^2/(4 mass (b-a)^2) * (-1)^(i-j) *
           { (2(N+1)^2+1)/3 - 1/sin^2(i pi/(N+1))              i = j
           { 1/sin^2(pi(i-j)/(2(N+1))) - 1/sin^2(pi(i+j)/(2(N+1)))  i != j

    Built from |i-j| and i+j, both symmetric, so T is bitwise symmetric.
    """
    if mass <= 0:
        raise ArgumentError("mass must be positive")
    n = grid.n
    length = grid.b - grid.a
    idx = np.arange(1, n + 1)
    diff = np.abs(idx[:, None] - idx[None, :])
    summ = idx[:, None] + idx[None, :]
    pref = math.pi**2 / (4.0 * mass * length**2)
    with np.errstate(divide="ignore"):
        off = (-1.0) ** diff * (
            1.0 / np.sin(math.pi * diff / (2.0 * (n + 1))) ** 2
            - 1.0 / np.sin(math.pi * summ / (2.0 * (n + 1))) ** 2
        )
    t = np.where(diff == 0, 0.0, off)
    t[idx - 1, idx - 1] = (2.0 * (n + 1) ** 2 + 1.0) / 3.0 - 1.0 / np.sin(
        math.pi * idx / (n + 1)
    ) ** 2
    t *= pref
    return t


def _fix_sign(psi: np.ndarray) -> np.ndarray:
    """Flip each row so the innermost antinode of |psi| is positive."""
    out = psi.copy()
    for row in out:
        mag = np.abs(row)
        floor = 0.05 * mag.max()
        sig = np.nonzero(mag >= floor)[0]
        anchor = sig[0]
        # walk to the first local maximum of |psi| inside the first lobe
        while anchor + 1 < len(row) and mag[anchor + 1] >= mag[anchor]:
            anchor += 1
        if row[anchor] < 0:
            row *= -1.0
    return out


def solve_bound_states(model: PotentialModel, grid: RadialGrid, mass: float,
                       threshold: float | None = None) -> BoundStateBasis:
    """Diagonalize H = T + diag(V) and keep states below threshold.

    The default threshold is the dissociation limit minus a 1e-10
    hartree guard; pass an explicit value to override (e.g. +inf keeps
    every eigenpair of a confining potential).
    """
    r = grid.points
    v = np.asarray(model.value(r), dtype=float)
    h = kinetic_matrix(grid, mass)
    diag = np.arange(grid.n)
    h[diag, diag] += v

    energies, vectors = np.linalg.eigh(h)

    if threshold is None:
        v_inf = dissociation_limit(model)
        threshold = v_inf - THRESHOLD_EPS if math.isfinite(v_inf) else math.inf
    kept = energies < threshold
    if not np.any(kept):
        raise NoBoundStatesError(
            f"no eigenvalue below threshold {threshold:g} (lowest is {energies[0]:g})"
        )
    energies = energies[kept]
    vectors = vectors[:, kept]

    norm = np.abs(energies).max()
    residual = h @ vectors - vectors * energies
    worst = np.linalg.norm(residual, axis=0).max()
    if worst > 1e-9 * max(norm, 1.0):
        raise ArithmeticError(f"eigen-residual {worst:g} exceeds 1e-9 * |H|")

    psi = _fix_sign(vectors.T / math.sqrt(grid.delta))
    return BoundStateBasis(mass=float(mass), energies=energies, psi=psi,
                           threshold=float(threshold), grid=grid)


def count_nodes(psi_row: np.ndarray, tail_floor: float = 1e-8) -> int:
    """Sign changes of one wavefunction, ignoring the noise tail."""
    mag = np.abs(psi_row)
    keep = mag >= tail_floor * mag.max()
    trimmed = psi_row[keep]
    return int(np.sum(trimmed[:-1] * trimmed[1:] < 0))


def confinement_energy(model: PotentialModel, grid: RadialGrid) -> float:
    """Energy above which the box walls, not the potential, confine a state."""
    return float(min(model.value(grid.a), model.value(grid.b)))


def reported_indices(model: PotentialModel, basis: BoundStateBasis,
                     drop_top_fraction: float = 0.05) -> np.ndarray:
    """Indices of states trustworthy enough to report.

    Drops states confined by the box walls rather than the potential,
    then the top `drop_top_fraction` of the remaining ladder (the states
    nearest dissociation, where the finite basis cannot converge).
    """
    cap = confinement_energy(model, basis.grid)
    idx = np.nonzero(basis.energies < cap)[0]
    keep = int(math.floor(len(idx) * (1.0 - drop_top_fraction)))
    return idx[:keep]


def bound_energies(model: PotentialModel, grid: RadialGrid, mass: float,
                   threshold: float | None = None) -> np.ndarray:
    """Eigenvalues below threshold, skipping the eigenvector work."""
    r = grid.points
    h = kinetic_matrix(grid, mass)
    diag = np.arange(grid.n)
    h[diag, diag] += np.asarray(model.value(r), dtype=float)
    energies = np.linalg.eigvalsh(h)
    if threshold is None:
        v_inf = dissociation_limit(model)
        threshold = v_inf - THRESHOLD_EPS if math.isfinite(v_inf) else math.inf
    kept = energies[energies < threshold]
    if len(kept) == 0:
        raise NoBoundStatesError(
            f"no eigenvalue below threshold {threshold:g} (lowest is {energies[0]:g})"
        )
    return kept


def convergence_report(model: PotentialModel, grid: RadialGrid, mass: float,
                       threshold: float | None = None,
                       extend_box: bool = False) -> np.ndarray:
    """Per-level |Delta E| between this grid and refined grids.

    Always re-solves with 2N+1 interior points in the same box (halved
    spacing). With `extend_box`, additionally re-solves in a box twice
    as long at unchanged spacing (auto-policy guard against box-size
    error) and reports the worse of the two shifts. Levels the refined
    solve no longer finds are reported as +inf.
    """
    base = bound_energies(model, grid, mass, threshold=threshold)

    def compare(other_energies):
        out = np.full(len(base), np.inf)
        m = min(len(base), len(other_energies))
        out[:m] = np.abs(base[:m] - other_energies[:m])
        return out

    fine = RadialGrid(grid.a, grid.b, 2 * grid.n + 1)
    shifts = compare(bound_energies(model, fine, mass, threshold=threshold))

    if extend_box:
        length = grid.b - grid.a
        wide = RadialGrid(grid.a, grid.b + length, 2 * (grid.n + 1) - 1)
        if wide.b > model.domain[1]:
            raise DomainError(
                f"doubled box edge {wide.b:g} exceeds the model domain end {model.domain[1]:g}"
            )
        shifts = np.maximum(shifts, compare(bound_energies(model, wide, mass,
                                                           threshold=threshold)))

    return shifts
