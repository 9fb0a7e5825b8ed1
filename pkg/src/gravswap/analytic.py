"""Closed-form propagators for the three interaction models.

Models (all quadratic, all separable in the normal modes x_pm):

    QG_FULL   exact expanded pair potential: per-mode frequency Omega_pm =
              omega K_pm with K_pm = sqrt(1 +/- 2 delta); the momentum term
              keeps the bare mass, so widths breathe at 2 Omega_pm.
    QG_RWA    number-conserving truncation: both quadratures scale with
              k_pm = 1 +/- delta, giving per-mode frequency omega k_pm and
              exactly constant widths (coherent states stay coherent).
    SCEG      mean-field (Schroedinger-Newton) coupling: first moments obey
              the same equations as QG_FULL, but the mean-field term is
              linear in x so the widths evolve under the bare oscillator
              and stay constant for coherent inputs.

Every per-mode Hamiltonian fits the template H = A p^2 + B x^2 + C <x> x
(dimensionless, hbar = m = 1, time scaled by omega), whose moment equations

    d<x>/dt = 2A<p>          dV_xx/dt = 4A V_xp
    d<p>/dt = -2B<x> - C<x>_mf   dV_pp/dt = -4B V_xp
                             dV_xp/dt = 2A V_pp - 2B V_xx

are independent of the linear coefficient C; that independence is why the
mean-field model cannot touch second moments.  Closed forms below are the
symplectic rotation generated by those equations.

A quadratic Hamiltonian preserves coherence of coherent states when its
counter-rotating (two-quantum) ladder coefficient vanishes, i.e. when the
position and momentum quadratic terms are balanced against the reference
mode frequency; `coherence_check` measures exactly that coefficient.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

from .params import DimensionlessParams, ParameterError
from .states import (
    ModeMoments,
    PairMoments,
    SQRT2,
    from_normal_modes,
)

COHERENCE_RESIDUAL_TOL = 1e-12
CORRECTED_DELTA_LIMIT = 0.2


class ModelKind(enum.Enum):
    QG_FULL = "qg_full"
    QG_RWA = "qg_rwa"
    SCEG = "sceg"


MODEL_BY_NAME = {m.value: m for m in ModelKind}


@dataclass(frozen=True)
class QuadraticHamiltonian:
    """One normal mode's template Hamiltonian H = A p^2 + B x^2 + C <x> x."""

    A: float
    B: float
    C: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.A) and self.A > 0):
            raise ParameterError(f"hamiltonian.A: must be positive, got {self.A!r}")
        if not (math.isfinite(self.B) and self.B >= 0):
            raise ParameterError(f"hamiltonian.B: must be non-negative, got {self.B!r}")
        if not math.isfinite(self.C):
            raise ParameterError("hamiltonian.C: must be finite")


def mode_hamiltonians(
    model: ModelKind, params: DimensionlessParams
) -> tuple[QuadraticHamiltonian, QuadraticHamiltonian]:
    """(plus, minus) template coefficients, dimensionless (time in 1/omega)."""
    d = params.delta
    if model is ModelKind.QG_RWA:
        return (
            QuadraticHamiltonian(A=0.5 * params.k_plus, B=0.5 * params.k_plus),
            QuadraticHamiltonian(A=0.5 * params.k_minus, B=0.5 * params.k_minus),
        )
    if model is ModelKind.QG_FULL:
        return (
            QuadraticHamiltonian(A=0.5, B=0.5 * params.K_plus**2),
            QuadraticHamiltonian(A=0.5, B=0.5 * params.K_minus**2),
        )
    if model is ModelKind.SCEG:
        return (
            QuadraticHamiltonian(A=0.5, B=0.5, C=2.0 * d),
            QuadraticHamiltonian(A=0.5, B=0.5, C=-2.0 * d),
        )
    raise ParameterError(f"unknown model {model!r}")


@dataclass(frozen=True)
class CoherenceResult:
    preserved: bool
    residual: float


def coherence_check(h: QuadraticHamiltonian, reference_frequency: float = 1.0) -> CoherenceResult:
    """Coefficient of the two-quantum (counter-rotating) ladder term of h,
    normalized by the number-operator coefficient, both in the ladder basis of
    an oscillator at `reference_frequency`.  Zero residual means coherent
    states stay coherent under h; the linear mean-field term never
    contributes."""
    w = reference_frequency
    if not (math.isfinite(w) and w > 0):
        raise ParameterError(f"reference_frequency must be positive, got {w!r}")
    counter_rotating = h.B / (2.0 * w) - h.A * w / 2.0
    number_coeff = h.B / w + h.A * w
    residual = counter_rotating / number_coeff
    return CoherenceResult(preserved=abs(residual) <= COHERENCE_RESIDUAL_TOL, residual=residual)


@dataclass(frozen=True)
class MomentRates:
    """Instantaneous time derivatives of a ModeMoments record."""

    d_mean_x: float
    d_mean_p: float
    d_v_xx: float
    d_v_pp: float
    d_v_xp: float


def template_moment_rhs(
    h: QuadraticHamiltonian, m: ModeMoments, mean_field_x: float = 0.0
) -> MomentRates:
    """Moment equations of the template Hamiltonian.  `mean_field_x` is the
    <x> entering the C term; self-consistent propagation passes the mode's own
    current mean, linear models ignore it (C = 0)."""
    return MomentRates(*_rhs_tuple(h.A, h.B, h.C, m.mean_x, m.mean_p, m.v_xx, m.v_pp, m.v_xp, mean_field_x))


def _rhs_tuple(A, B, C, mean_x, mean_p, v_xx, v_pp, v_xp, mean_field_x):
    return (
        2.0 * A * mean_p,
        -2.0 * B * mean_x - C * mean_field_x,
        4.0 * A * v_xp,
        -4.0 * B * v_xp,
        2.0 * A * v_pp - 2.0 * B * v_xx,
    )


def propagate_rwa_displacement(
    a: complex, b: complex, t: float, params: DimensionlessParams
) -> tuple[complex, complex]:
    """Normal-mode amplitudes under the number-conserving model: pure phase
    rotation at omega k_pm."""
    tau = params.omega * t
    return (
        a * cmath.exp(-1j * params.k_plus * tau),
        b * cmath.exp(-1j * params.k_minus * tau),
    )


def propagate_rwa_lab_displacement(
    alpha: complex, beta: complex, t: float, params: DimensionlessParams
) -> tuple[complex, complex]:
    """Lab amplitudes under the number-conserving model: a carrier rotation at
    omega times a beat at omega_g that feeds each oscillator's amplitude into
    the other.  Identical to transforming propagate_rwa_displacement back to
    the lab frame, but keeps the fast and slow phases separate so the beat
    survives float rounding even at extreme fast-phase values."""
    tau = params.omega * t
    theta_g = params.delta * tau
    carrier = cmath.exp(-1j * tau)
    cg = math.cos(theta_g)
    sg = math.sin(theta_g)
    return (
        carrier * (alpha * cg - 1j * beta * sg),
        carrier * (beta * cg - 1j * alpha * sg),
    )


@dataclass(frozen=True)
class CorrectedDisplacement:
    """First-order-in-delta displacement evolution.

    a_t, b_t include the counter-rotating correction; alpha_t, beta_t are
    their exact lab-frame images, equal to the uncorrected lab evolution minus
    delta * corr_1 / delta * corr_2.  corr_1 and corr_2 vanish at t = 0 and
    are bounded by (|a| + |b|)/sqrt(2)."""

    t: float
    a_t: complex
    b_t: complex
    alpha_t: complex
    beta_t: complex
    corr_1: complex
    corr_2: complex


def propagate_corrected_displacement(
    a: complex, b: complex, t: float, params: DimensionlessParams
) -> CorrectedDisplacement:
    """Displacement evolution keeping the first-order amplitude corrections
    that the number-conserving truncation drops:

        a(t) = a e^{-i omega_+ t} - i delta conj(a) sin(omega_+ t)
        b(t) = b e^{-i omega_- t} + i delta conj(b) sin(omega_- t)

    Valid for delta < 0.2 (first order in delta)."""
    d = params.delta
    if d >= CORRECTED_DELTA_LIMIT:
        raise ParameterError(
            f"corrected displacement is a first-order-in-delta form; delta = {d!r} >= {CORRECTED_DELTA_LIMIT}"
        )
    tau = params.omega * t
    theta_p = params.k_plus * tau
    theta_m = params.k_minus * tau
    sp = math.sin(theta_p)
    sm = math.sin(theta_m)
    a_t = a * cmath.exp(-1j * theta_p) - 1j * d * a.conjugate() * sp
    b_t = b * cmath.exp(-1j * theta_m) + 1j * d * b.conjugate() * sm
    corr_1 = 1j * (a.conjugate() * sp - b.conjugate() * sm) / SQRT2
    corr_2 = 1j * (a.conjugate() * sp + b.conjugate() * sm) / SQRT2
    alpha_t, beta_t = from_normal_modes(a_t, b_t)
    return CorrectedDisplacement(
        t=t, a_t=a_t, b_t=b_t, alpha_t=alpha_t, beta_t=beta_t, corr_1=corr_1, corr_2=corr_2
    )


def _evolve_mode(
    m: ModeMoments,
    mean_angle: float,
    mean_impedance: float,
    cov_angle: float,
    cov_impedance: float,
) -> ModeMoments:
    """Apply the symplectic rotation (x, p) -> (x cos + p sin/z, p cos - x z sin)
    to the means at (mean_angle, mean_impedance) and the same map to the
    covariance at (cov_angle, cov_impedance)."""
    c = math.cos(mean_angle)
    s = math.sin(mean_angle)
    z = mean_impedance
    mean_x = m.mean_x * c + m.mean_p * (s / z)
    mean_p = m.mean_p * c - m.mean_x * z * s
    c2 = math.cos(cov_angle)
    s2 = math.sin(cov_angle)
    z2 = cov_impedance
    v_xx = m.v_xx * c2 * c2 + m.v_pp * (s2 / z2) ** 2 + 2.0 * m.v_xp * c2 * s2 / z2
    v_pp = m.v_pp * c2 * c2 + m.v_xx * (z2 * s2) ** 2 - 2.0 * m.v_xp * c2 * s2 * z2
    v_xp = m.v_xp * (c2 * c2 - s2 * s2) + (m.v_pp / z2 - m.v_xx * z2) * c2 * s2
    return ModeMoments(mean_x=mean_x, mean_p=mean_p, v_xx=v_xx, v_pp=v_pp, v_xp=v_xp)


def propagate_moments(
    model: ModelKind, init: PairMoments, t: float, params: DimensionlessParams
) -> PairMoments:
    """Closed-form per-mode moments at time t.

    QG_RWA rotates means and covariance at omega k_pm with the bare
    impedance.  QG_FULL rotates both at Omega_pm with impedance K_pm, which
    makes initially coherent widths breathe between 1/2 and 1/(2 K_pm^2).
    SCEG shares QG_FULL's mean map but rotates the covariance at the bare
    frequency, leaving coherent widths constant."""
    tau = params.omega * t
    if model is ModelKind.QG_RWA:
        plus = _evolve_mode(init.plus, params.k_plus * tau, 1.0, params.k_plus * tau, 1.0)
        minus = _evolve_mode(init.minus, params.k_minus * tau, 1.0, params.k_minus * tau, 1.0)
    elif model is ModelKind.QG_FULL:
        kp, km = params.K_plus, params.K_minus
        plus = _evolve_mode(init.plus, kp * tau, kp, kp * tau, kp)
        minus = _evolve_mode(init.minus, km * tau, km, km * tau, km)
    elif model is ModelKind.SCEG:
        kp, km = params.K_plus, params.K_minus
        plus = _evolve_mode(init.plus, kp * tau, kp, tau, 1.0)
        minus = _evolve_mode(init.minus, km * tau, km, tau, 1.0)
    else:
        raise ParameterError(f"unknown model {model!r}")
    return PairMoments(plus=plus, minus=minus)


def swap_phase_factor(t: float, params: DimensionlessParams) -> complex:
    """Phase i e^{i omega t} that undoes the carrier rotation and the beat's
    quarter-cycle phase; at the swap time it maps the evolved pair exactly
    onto the swapped input pair."""
    return 1j * cmath.exp(1j * params.omega * t)


def phase_corrected_pair(
    pair: tuple[complex, complex], t: float, params: DimensionlessParams
) -> tuple[complex, complex]:
    f = swap_phase_factor(t, params)
    return (f * pair[0], f * pair[1])
