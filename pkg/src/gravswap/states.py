"""Coherent-state amplitudes, Gaussian moment records, and frame transforms.

Oscillator units throughout: positions in sqrt(hbar/(m omega)), momenta in
sqrt(hbar m omega).  The ground state then has variance 1/2 in both
quadratures and a coherent state with complex amplitude g sits at

    <x> = sqrt(2) Re g,    <p> = sqrt(2) Im g.

Complex amplitudes are plain Python/numpy complex numbers.  The lab pair
(alpha, beta) and the normal-mode pair (a, b) are related by the unitary
45-degree rotation a = (alpha + beta)/sqrt(2), b = (alpha - beta)/sqrt(2);
all three interaction models decouple in the normal modes, so moments are
stored per normal mode and lab-frame views are computed on demand.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

SQRT2 = math.sqrt(2.0)
GROUND_VARIANCE = 0.5
# Slack on the uncertainty check; covers float noise from symplectic maps and
# the discretization error of grid-derived moments.
_UNCERTAINTY_SLACK = 1e-7


class MomentError(ValueError):
    """Raised for unphysical Gaussian moment records."""


@dataclass(frozen=True)
class ModeMoments:
    """First and second moments of one mode: <x>, <p>, and the covariance
    entries V_xx, V_pp, V_xp (V_xp symmetrized)."""

    mean_x: float
    mean_p: float
    v_xx: float
    v_pp: float
    v_xp: float

    def __post_init__(self) -> None:
        for name in ("mean_x", "mean_p", "v_xx", "v_pp", "v_xp"):
            if not math.isfinite(getattr(self, name)):
                raise MomentError(f"moments.{name}: must be finite")
        if self.v_xx <= 0 or self.v_pp <= 0:
            raise MomentError(f"variances must be positive, got v_xx={self.v_xx!r}, v_pp={self.v_pp!r}")
        if self.uncertainty_product < 0.25 * (1.0 - _UNCERTAINTY_SLACK):
            raise MomentError(
                f"uncertainty violated: v_xx*v_pp - v_xp^2 = {self.uncertainty_product!r} < 1/4"
            )

    @property
    def uncertainty_product(self) -> float:
        return self.v_xx * self.v_pp - self.v_xp**2


@dataclass(frozen=True)
class PairMoments:
    """Moment records for the symmetric (+) and antisymmetric (-) normal
    modes.  The modes are assumed uncorrelated, which every propagator here
    preserves because all three Hamiltonians separate in (+, -)."""

    plus: ModeMoments
    minus: ModeMoments

    def lab_means(self) -> tuple[float, float, float, float]:
        """(x1, p1, x2, p2) means in the lab frame."""
        x1 = (self.plus.mean_x + self.minus.mean_x) / SQRT2
        x2 = (self.plus.mean_x - self.minus.mean_x) / SQRT2
        p1 = (self.plus.mean_p + self.minus.mean_p) / SQRT2
        p2 = (self.plus.mean_p - self.minus.mean_p) / SQRT2
        return (x1, p1, x2, p2)

    def lab_position_widths(self) -> tuple[float, float, float]:
        """(V_x1x1, V_x2x2, Cov_x1x2); uses the no-cross-mode-correlation
        assumption stated above."""
        v = 0.5 * (self.plus.v_xx + self.minus.v_xx)
        c = 0.5 * (self.plus.v_xx - self.minus.v_xx)
        return (v, v, c)


def to_normal_modes(alpha: complex, beta: complex) -> tuple[complex, complex]:
    """Lab amplitudes -> normal-mode amplitudes (a, b)."""
    return ((alpha + beta) / SQRT2, (alpha - beta) / SQRT2)


def from_normal_modes(a: complex, b: complex) -> tuple[complex, complex]:
    """Normal-mode amplitudes -> lab amplitudes; exact inverse of
    to_normal_modes."""
    return ((a + b) / SQRT2, (a - b) / SQRT2)


def moments_of_coherent(g: complex) -> ModeMoments:
    """Minimum-uncertainty moment record of the coherent state g."""
    return ModeMoments(
        mean_x=SQRT2 * g.real,
        mean_p=SQRT2 * g.imag,
        v_xx=GROUND_VARIANCE,
        v_pp=GROUND_VARIANCE,
        v_xp=0.0,
    )


def coherent_pair_moments(a: complex, b: complex) -> PairMoments:
    """Moments of the normal-mode coherent product |a>_+ |b>_-."""
    return PairMoments(plus=moments_of_coherent(a), minus=moments_of_coherent(b))


@dataclass(frozen=True)
class DisplacementEstimate:
    """Coherent amplitude read off a moment record.  `width_deviation` is the
    largest relative deviation of the second moments from the coherent values;
    records beyond the caller's tolerance are flagged (not rejected) because a
    drifting width is itself a physics signal (coherence loss)."""

    amplitude: complex
    width_deviation: float
    is_coherent: bool


def displacement_from_moments(m: ModeMoments, width_tol: float = 1e-6) -> DisplacementEstimate:
    """Invert moments_of_coherent on first moments; flag non-coherent widths."""
    amplitude = complex(m.mean_x / SQRT2, m.mean_p / SQRT2)
    deviation = max(
        abs(m.v_xx / GROUND_VARIANCE - 1.0),
        abs(m.v_pp / GROUND_VARIANCE - 1.0),
        abs(m.v_xp) / GROUND_VARIANCE,
    )
    return DisplacementEstimate(
        amplitude=amplitude,
        width_deviation=deviation,
        is_coherent=deviation <= width_tol,
    )


def coherent_inner(g: complex, m: complex) -> complex:
    """Complex overlap <g|m> = exp(-(|g|^2 + |m|^2)/2 + conj(g) m)."""
    g = complex(g)
    m = complex(m)
    return cmath.exp(-0.5 * (abs(g) ** 2 + abs(m) ** 2) + g.conjugate() * m)


def coherent_overlap(g: complex, m: complex) -> float:
    """Fidelity |<g|m>|^2 = exp(-|g - m|^2)."""
    return math.exp(-abs(complex(g) - complex(m)) ** 2)


def two_mode_overlap(pair_a: tuple[complex, complex], pair_b: tuple[complex, complex]) -> float:
    """Fidelity of two two-mode coherent products."""
    return coherent_overlap(pair_a[0], pair_b[0]) * coherent_overlap(pair_a[1], pair_b[1])


def branch_schmidt_entropy(
    coeffs: np.ndarray | list[complex],
    amps_mode1: np.ndarray | list[complex],
    amps_mode2: np.ndarray | list[complex],
) -> tuple[float, np.ndarray]:
    """Exact Schmidt entropy of sum_i c_i |u_i>|v_i> with coherent branches.

    The branch vectors are non-orthogonal; each mode's branch set is expressed
    in an orthonormal basis through the Cholesky factor of its Gram matrix of
    coherent overlaps, after which an SVD of the resulting small matrix gives
    the Schmidt coefficients without any grid.  Returns (entropy in nats,
    normalized Schmidt probabilities).
    """
    c = np.asarray(coeffs, dtype=complex)
    u = np.asarray(amps_mode1, dtype=complex)
    v = np.asarray(amps_mode2, dtype=complex)
    if not (len(c) == len(u) == len(v)):
        raise ValueError("coeffs and branch amplitude lists must have equal length")

    def coords(amps: np.ndarray) -> np.ndarray:
        n = len(amps)
        gram = np.empty((n, n), dtype=complex)
        for i in range(n):
            for j in range(n):
                gram[i, j] = coherent_inner(amps[i], amps[j])
        # X^dagger X = G with columns the branch coordinates in an orthonormal
        # basis; eigen square root rather than Cholesky so coinciding branches
        # (singular Gram) stay legal
        vals, vecs = np.linalg.eigh(gram)
        return np.sqrt(np.clip(vals, 0.0, None))[:, None] * vecs.conj().T

    mat = coords(u) @ np.diag(c) @ coords(v).T
    svals = np.linalg.svd(mat, compute_uv=False)
    probs = svals**2
    probs = probs / probs.sum()
    nz = probs[probs > 1e-18]
    entropy = float(-np.sum(nz * np.log(nz)))
    return entropy, probs
