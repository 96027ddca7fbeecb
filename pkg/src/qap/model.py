"""Problem parameters, initial data, and the phase-offset map.

All quantities are dimensionless. ``OscillatorSpec`` fixes the physical
setup (mass, stiffness, quantum scale, horizon, boundary positions);
``InitialData`` holds the four coefficient values the action eigenvalue
is extremized over; ``CoefficientState`` is one instant of the
coefficient flow together with the three quadrature accumulators that
feed the eigenvalue and the initial-data constraint.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass

from .errors import (
    ResonanceWarning,
    SingularityError,
    ValidationError,
    ZeroFrequencyError,
)

#: |cos| or |sin| below this is treated as a vanishing denominator.
SINGULARITY_TOL = 1e-12


@dataclass(frozen=True)
class OscillatorSpec:
    """Harmonic-oscillator problem parameters (natural units)."""

    m: float = 1.0
    k: float = 1.0
    hbar_tilde: float = 0.0
    T: float = 1.0
    x0: float = 0.0
    xT: float = 1.0

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "OscillatorSpec":
        return cls(**{f: float(d[f]) for f in d})


@dataclass(frozen=True)
class InitialData:
    """Initial values of the linear/quadratic phase and amplitude coefficients."""

    S10: float = 0.0
    S20: float = 0.0
    sigma10: float = 0.0
    sigma20: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "InitialData":
        return cls(**{f: float(d[f]) for f in d})

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.S10, self.S20, self.sigma10, self.sigma20)


@dataclass(frozen=True)
class CoefficientState:
    """Coefficient values at one time, plus running quadrature accumulators.

    ``qS`` accumulates the squared linear phase coefficient, ``qSigma``
    the quantum integrand (sigma1^2 + sigma2), and ``qCon`` the
    constraint integrand (sigma1*S1 + 2*S2), each from 0 to ``t``.
    """

    t: float
    S1: float
    S2: float
    sigma1: float
    sigma2: float
    qS: float
    qSigma: float
    qCon: float


def validation_errors(spec: OscillatorSpec) -> list[str]:
    """Return every violated parameter invariant (empty list when valid)."""
    errors = []
    values = (spec.m, spec.k, spec.hbar_tilde, spec.T, spec.x0, spec.xT)
    if not all(math.isfinite(v) for v in values):
        errors.append("NonFinite")
    else:
        if spec.m <= 0:
            errors.append("NonPositiveMass")
        if spec.T <= 0:
            errors.append("NonPositiveHorizon")
        if spec.k < 0:
            errors.append("NegativeStiffness")
        if spec.hbar_tilde < 0:
            errors.append("NegativeHbar")
    return errors


def validate(spec: OscillatorSpec) -> OscillatorSpec:
    """Check all invariants, returning the spec unchanged when they hold.

    Raises ``ValidationError`` carrying every violation. Resonance
    (sin(omega0*T) numerically zero) is not an error: the ODE path is
    well-defined there, only the classical closed forms divide by it,
    so it is surfaced as a ``ResonanceWarning``.
    """
    errors = validation_errors(spec)
    if errors:
        raise ValidationError(errors)
    if resonant(spec):
        warnings.warn(
            f"sin(omega0*T) = {math.sin(omega0(spec) * spec.T):.3e}: "
            "classical closed forms are unavailable for this spec",
            ResonanceWarning,
            stacklevel=2,
        )
    return spec


def require_valid(spec: OscillatorSpec) -> OscillatorSpec:
    """Like ``validate`` but silent about resonance (for ODE-path callers)."""
    errors = validation_errors(spec)
    if errors:
        raise ValidationError(errors)
    return spec


def omega0(spec: OscillatorSpec) -> float:
    """Natural frequency sqrt(k/m); zero for the free particle."""
    return math.sqrt(spec.k / spec.m)


def resonant(spec: OscillatorSpec) -> bool:
    """True when sin(omega0*T) vanishes numerically (for k > 0)."""
    if spec.k <= 0:
        return False
    return abs(math.sin(omega0(spec) * spec.T)) < SINGULARITY_TOL


def t0_to_S20(t0: float, spec: OscillatorSpec) -> float:
    """Map the classical phase offset t0 to the initial quadratic coefficient.

    S20 = sqrt(m*k) * tan(omega0*t0). Fails near cos(omega0*t0) = 0
    where the map has a pole.
    """
    w = omega0(spec)
    if abs(math.cos(w * t0)) < SINGULARITY_TOL:
        raise SingularityError("cos(omega0*t0)")
    return math.sqrt(spec.m * spec.k) * math.tan(w * t0)


def S20_to_t0(S20: float, spec: OscillatorSpec) -> float:
    """Invert ``t0_to_S20`` on the principal branch.

    Returns arctan(S20/sqrt(m*k))/omega0; requires omega0 > 0.
    """
    w = omega0(spec)
    if w == 0.0:
        raise ZeroFrequencyError("phase offset is undefined at omega0 = 0")
    return math.atan(S20 / math.sqrt(spec.m * spec.k)) / w
