"""Position/momentum matrix elements and the commutator correlator C_n(t).

Everything here works in the basis of bound eigenstates: the correlator
for state n is assembled from position matrix elements and energy
differences alone, using the operator identity that ties the momentum
matrix to mass * (E_n - E_l) * r_nl. Momentum via finite differences
exists only as an independent cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dvr import BoundStateBasis
from .errors import ArgumentError, TruncationError

#: reduced-sum probe drops max(2, K // TRUNCATION_PROBE_DIVISOR) states
TRUNCATION_PROBE_DIVISOR = 10


@dataclass(frozen=True)
class MatrixElements:
    """Dense symmetric r_nl = <n|r|l> with the matching energies."""

    r_mat: np.ndarray
    energies: np.ndarray
    mass: float

    @property
    def n_states(self) -> int:
        return len(self.energies)


@dataclass
class OtocSeries:
    """C_n(t) on a time grid, with the truncation used to build it."""

    state_index: int
    times: np.ndarray
    values: np.ndarray
    truncation: int
    convergence_estimate: float | None = None


def position_matrix(basis: BoundStateBasis) -> MatrixElements:
    """r_nl by grid quadrature; upper triangle computed, then mirrored."""
    weighted = basis.psi * basis.grid.points[None, :]
    raw = weighted @ basis.psi.T * basis.grid.delta
    r_mat = np.triu(raw) + np.triu(raw, 1).T
    return MatrixElements(r_mat=r_mat, energies=basis.energies.copy(), mass=basis.mass)


def momentum_from_position(elements: MatrixElements) -> np.ndarray:
    """q_nl with p_nl = i*q_nl, from q = mass * (E_n - E_l) * r_nl.

    Antisymmetric by construction; the diagonal is exactly zero.
    """
    e = elements.energies
    return elements.mass * (e[:, None] - e[None, :]) * elements.r_mat


def momentum_direct(basis: BoundStateBasis) -> np.ndarray:
    """q_nl from centered finite differences of psi on the grid.

    Test oracle only: accuracy is O((k*delta)^2) in the local wavenumber
    k, so cross-checks need grids fine enough for that error to sit
    below the tolerance being asserted.
    """
    psi = basis.psi
    dpsi = np.zeros_like(psi)
    # box boundary conditions: psi = 0 one point outside each edge
    dpsi[:, 1:-1] = (psi[:, 2:] - psi[:, :-2]) / (2.0 * basis.grid.delta)
    dpsi[:, 0] = psi[:, 1] / (2.0 * basis.grid.delta)
    dpsi[:, -1] = -psi[:, -2] / (2.0 * basis.grid.delta)
    return -(psi @ dpsi.T) * basis.grid.delta


def _commutator_amplitudes(elements: MatrixElements, n: int, times: np.ndarray,
                           truncation: int) -> np.ndarray:
    """Amplitude matrix b[t, l] for state n, summed over k < truncation.

    b_nl(t) = mass * sum_k r_nk r_kl [ (E_k - E_l) e^{i(E_n - E_k)t}
                                      - (E_n - E_k) e^{i(E_k - E_l)t} ]
    organized as two (times x K) @ (K x K) products.
    """
    k = truncation
    e = elements.energies[:k]
    r = elements.r_mat[:k, :k]
    r_n = r[n]
    e_nk = elements.energies[n] - e

    phases = np.exp(-1j * np.outer(times, e))  # e^{-i E_k t}
    growth = r * (e[:, None] - e[None, :])  # r_kl (E_k - E_l)
    term1 = ((phases * r_n) @ growth) * np.exp(1j * elements.energies[n] * times)[:, None]
    term2 = ((np.conj(phases) * (r_n * e_nk)) @ r) * phases
    return elements.mass * (term1 - term2)


def otoc_series(elements: MatrixElements, n: int, times, truncation: int | None = None) -> OtocSeries:
    """Correlator C_n(t) = sum_l |b_nl(t)|^2 over the time grid.

    `truncation` limits both the intermediate and outer state sums; it
    defaults to every available bound state.
    """
    n_states = elements.n_states
    if not 0 <= n < n_states:
        raise IndexError(f"state index {n} outside 0..{n_states - 1}")
    k = n_states if truncation is None else int(truncation)
    if k > n_states:
        raise ArgumentError(f"truncation {k} exceeds basis size {n_states}")
    if k < n + 2:
        raise TruncationError(
            f"truncation {k} cannot represent couplings of state {n} (need >= {n + 2})"
        )
    times = np.asarray(times, dtype=float)
    if not np.all(np.isfinite(times)):
        raise ArgumentError("time grid contains non-finite entries")

    b = _commutator_amplitudes(elements, n, times, k)
    values = np.einsum("tl,tl->t", b.real, b.real) + np.einsum("tl,tl->t", b.imag, b.imag)
    return OtocSeries(state_index=n, times=times, values=values, truncation=k)


def otoc_at_zero(elements: MatrixElements, n: int, truncation: int | None = None) -> float:
    """C_n(0); equals 1 exactly when the basis resolves the commutator."""
    return float(otoc_series(elements, n, np.zeros(1), truncation).values[0])


def otoc_truncation_error(elements: MatrixElements, n: int, probe_times) -> float:
    """Sup-norm relative change of C_n when the state sum is shortened.

    Compares the full sum (K = all states) against K reduced by
    max(2, K // 10) at the probe times:
        max_t |C_full - C_reduced| / max_t |C_full|.
    States whose couplings do not survive the reduction are reported as
    +inf (they cannot be certified at all).
    """
    n_states = elements.n_states
    if n_states < 8:
        raise ArgumentError("need at least 8 basis states to probe truncation")
    reduced = n_states - max(2, n_states // TRUNCATION_PROBE_DIVISOR)
    if reduced < n + 2:
        return float("inf")
    probe_times = np.asarray(probe_times, dtype=float)
    full = otoc_series(elements, n, probe_times).values
    short = otoc_series(elements, n, probe_times, truncation=reduced).values
    scale = np.abs(full).max()
    if scale == 0.0:
        return 0.0
    return float(np.abs(full - short).max() / scale)


def dominant_period(times: np.ndarray, values: np.ndarray) -> float:
    """Period of the strongest oscillation in a uniformly sampled series.

    FFT peak of the mean-removed signal, refined by quadratic
    interpolation of the spectral amplitude around the peak bin.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(times) < 8:
        raise ArgumentError("series too short for a period estimate")
    dt = times[1] - times[0]
    if not np.allclose(np.diff(times), dt, rtol=1e-9, atol=0.0):
        raise ArgumentError("period estimation needs a uniform time grid")
    # zero-pad 8x for finer bin spacing, then refine the peak parabolically
    n_pad = 8 * len(values)
    amp = np.abs(np.fft.rfft(values - values.mean(), n=n_pad))
    peak = int(np.argmax(amp[1:]) + 1)
    freq = np.fft.rfftfreq(n_pad, d=dt)
    if 1 <= peak < len(amp) - 1:
        a, b, c = amp[peak - 1], amp[peak], amp[peak + 1]
        denom = a - 2 * b + c
        shift = 0.5 * (a - c) / denom if denom != 0 else 0.0
    else:
        shift = 0.0
    return float(1.0 / (freq[peak] + shift * (freq[1] - freq[0])))
