"""Physical inputs and the derived dimensionless coupling ladder.

Two identical harmonic oscillators (mass m, trap frequency omega, equilibrium
separation d) that interact only through the Newtonian pair potential reduce,
once the potential is expanded to quadratic order in the displacements, to a
single dimensionless coupling ratio

    delta = omega_g / omega,    omega_g = lam / (m omega),  lam = G m^2 / d^3

Everything downstream works in oscillator units (hbar = m = 1, lengths in
sqrt(hbar/(m omega)), momenta in sqrt(hbar m omega)) and takes time arguments
in units of 1/omega, so SI values enter the library only through this module.

The derived frequency ladder for the symmetric (+) and antisymmetric (-)
normal modes:

    k_pm     = 1 +/- delta            number-conserving (RWA) factors
    K_pm     = sqrt(1 +/- 2 delta)    exact normal-mode factors
    omega_pm = omega * k_pm
    Omega_pm = omega * K_pm

K_minus is real only for delta < 1/2, and the quadratic expansion of the pair
potential is long dead by then, so delta >= 1/2 is rejected outright.  Values
above 0.2 draw a warning instead of an error because numerical verification
deliberately exaggerates the coupling far beyond any physical setting.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

GRAVITATIONAL_CONSTANT = 6.67430e-11  # m^3 kg^-1 s^-2
HBAR = 1.054571817e-34  # J s
ATOMIC_MASS = 1.66053906660e-27  # kg

DELTA_HARD_LIMIT = 0.5
DELTA_WARN_LIMIT = 0.2


class ParameterError(ValueError):
    """Raised for physically invalid or out-of-regime parameters."""


def _require_positive(owner: str, name: str, value: float) -> None:
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        raise ParameterError(f"{owner}.{name}: must be a finite positive number, got {value!r}")


@dataclass(frozen=True)
class PhysicalParams:
    """SI description of one platform: two traps of mass `mass` (kg) at
    angular frequency `omega` (rad/s), separated by `separation` (m)."""

    mass: float
    omega: float
    separation: float
    grav_constant: float = GRAVITATIONAL_CONSTANT
    hbar: float = HBAR

    def __post_init__(self) -> None:
        for name in ("mass", "omega", "separation", "grav_constant", "hbar"):
            _require_positive("params", name, getattr(self, name))

    @property
    def lam(self) -> float:
        """Quadratic coupling strength G m^2 / d^3 (J m^-2)."""
        return self.grav_constant * self.mass**2 / self.separation**3

    @property
    def omega_g(self) -> float:
        """Gravitational exchange rate lam / (m omega) (rad/s)."""
        return self.lam / (self.mass * self.omega)

    @property
    def oscillator_length(self) -> float:
        """sqrt(hbar / (m omega)) (m); unit of position in oscillator units."""
        return math.sqrt(self.hbar / (self.mass * self.omega))


@dataclass(frozen=True)
class DimensionlessParams:
    """The coupling ratio delta plus the reference frequency needed to restore
    SI units.  All derived frequency factors hang off this record."""

    delta: float
    omega: float = 1.0

    def __post_init__(self) -> None:
        if not (isinstance(self.delta, (int, float)) and math.isfinite(self.delta)):
            raise ParameterError(f"params.delta: must be a finite number, got {self.delta!r}")
        if self.delta < 0:
            raise ParameterError(f"params.delta: must be non-negative, got {self.delta!r}")
        if self.delta >= DELTA_HARD_LIMIT:
            raise ParameterError(
                f"params.delta: expansion regime violated (delta = {self.delta!r} >= 1/2); "
                "the quadratic expansion of the pair potential assumes the separation "
                "dominates the oscillation amplitudes"
            )
        _require_positive("params", "omega", self.omega)
        if self.delta > DELTA_WARN_LIMIT:
            warnings.warn(
                f"coupling ratio delta = {self.delta:.3g} exceeds {DELTA_WARN_LIMIT}; "
                "second-order frequency errors grow as delta^2 and the antisymmetric "
                "mode softens toward instability",
                UserWarning,
                stacklevel=2,
            )

    @property
    def omega_g(self) -> float:
        return self.delta * self.omega

    @property
    def k_plus(self) -> float:
        return 1.0 + self.delta

    @property
    def k_minus(self) -> float:
        return 1.0 - self.delta

    @property
    def K_plus(self) -> float:
        return math.sqrt(1.0 + 2.0 * self.delta)

    @property
    def K_minus(self) -> float:
        return math.sqrt(1.0 - 2.0 * self.delta)

    @property
    def omega_plus(self) -> float:
        return self.omega * self.k_plus

    @property
    def omega_minus(self) -> float:
        return self.omega * self.k_minus

    @property
    def Omega_plus(self) -> float:
        return self.omega * self.K_plus

    @property
    def Omega_minus(self) -> float:
        return self.omega * self.K_minus


def derive_dimensionless(p: PhysicalParams) -> DimensionlessParams:
    """Reduce SI inputs to the coupling ratio; rejects delta >= 1/2."""
    return DimensionlessParams(delta=p.omega_g / p.omega, omega=p.omega)


def swap_time(p: DimensionlessParams) -> float:
    """Time at which the gravitational beat exchanges the two oscillators'
    states, pi / (2 omega_g).  Unbounded (inf) for zero coupling."""
    if p.delta == 0.0:
        return math.inf
    return math.pi / (2.0 * p.omega_g)


# Order-of-magnitude feasibility presets.  The ion separation is taken at the
# crystal lattice scale, which wildly exaggerates the coupling relative to any
# realizable two-ion trap and still leaves a ~10^4-year swap.
PLATFORM_PRESETS: dict[str, PhysicalParams] = {
    "ca40_ion": PhysicalParams(mass=40.0 * ATOMIC_MASS, omega=1.0e6, separation=1.0e-10),
}
