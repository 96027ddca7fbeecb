"""Action eigenvalue and initial-data constraint from a solution grid.

The eigenvalue decomposes into a boundary term (phase coefficients
weighted by the boundary positions), a kinetic term (-qS(T)/2m), and a
quantum term (hbar_tilde^2 * qSigma(T)/2m); the total is stored as the
exact floating-point sum of the three parts. The constraint residual is
the analogous amplitude-side expression; zero means the initial data
satisfies the algebraic compatibility condition. The residual is always
reported, never enforced (extremization may attach a quadratic penalty
to it, weight 0 by default).

Simpson recomputation of the accumulated integrals from the stored
coefficient columns provides an independent quadrature cross-check of
the in-state accumulators.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .dynamics import SolutionGrid
from .errors import IncompleteGridError, LengthMismatchError


@dataclass(frozen=True)
class EigenvalueReport:
    """Eigenvalue decomposition plus the constraint residual for one run."""

    lam: float
    boundary_term: float
    kinetic_term: float
    quantum_term: float
    constraint_residual: float

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "boundary_term": self.boundary_term,
            "kinetic_term": self.kinetic_term,
            "quantum_term": self.quantum_term,
            "constraint_residual": self.constraint_residual,
        }

    def to_json(self) -> str:
        """JSON with every field at 17 significant digits."""
        return json_17g(self.to_dict())


@dataclass(frozen=True)
class FunctionalValue:
    """Truncated phase/amplitude functionals on one sampled trajectory.

    ``psi_phase`` is None when hbar_tilde = 0 (the phase of the wave
    functional is undefined without a quantum scale).
    """

    S_of_x: float
    sigma_of_x: float
    psi_magnitude_log: float
    psi_phase: float | None


def json_17g(obj) -> str:
    """json.dumps with floats rendered at 17 significant digits."""

    def render(v):
        if isinstance(v, float):
            return format(v, ".17g")
        if isinstance(v, dict):
            return "{" + ", ".join(f"{json.dumps(k)}: {render(x)}" for k, x in v.items()) + "}"
        if isinstance(v, (list, tuple)):
            return "[" + ", ".join(render(x) for x in v) + "]"
        return json.dumps(v)

    return render(obj)


def _require_complete(grid: SolutionGrid) -> None:
    if not grid.complete:
        raise IncompleteGridError(
            f"grid ends at t = {float(grid.times[-1]):.6g} < T = {grid.spec.T:.6g}"
        )


def endpoint_report(spec, first, last) -> EigenvalueReport:
    """Eigenvalue report from the first/last state rows of a run.

    ``first`` and ``last`` are eight-component state rows (coefficients
    plus accumulators). Shared by ``eigenvalue`` and the extremizer's
    storage-free fast path so both produce bit-identical reports.
    """
    boundary = float(
        last[0] * spec.xT + 0.5 * last[1] * spec.xT**2
        - first[0] * spec.x0 - 0.5 * first[1] * spec.x0**2
    )
    kinetic = float(-last[4] / (2.0 * spec.m))
    quantum = float(spec.hbar_tilde**2 * last[5] / (2.0 * spec.m))
    residual = float(
        last[2] * spec.xT + 0.5 * last[3] * spec.xT**2
        - first[2] * spec.x0 - 0.5 * first[3] * spec.x0**2
        - last[6] / spec.m
    )
    return EigenvalueReport(
        lam=boundary + kinetic + quantum,
        boundary_term=boundary,
        kinetic_term=kinetic,
        quantum_term=quantum,
        constraint_residual=residual,
    )


def constraint_residual(grid: SolutionGrid) -> float:
    """Amplitude-side compatibility residual of the run's initial data."""
    _require_complete(grid)
    return eigenvalue(grid).constraint_residual


def eigenvalue(grid: SolutionGrid) -> EigenvalueReport:
    """Evaluate the action eigenvalue of a complete run.

    The reported ``lam`` is by construction the exact sum of the three
    term fields.
    """
    _require_complete(grid)
    return endpoint_report(grid.spec, grid.data[0], grid.data[-1])


def composite_simpson(values, times) -> float:
    """Composite Simpson over consecutive interval pairs.

    Handles non-uniform spacing via the three-point quadratic rule; a
    leftover final interval falls back to the trapezoid rule.
    """
    y = np.asarray(values, dtype=float)
    x = np.asarray(times, dtype=float)
    if len(y) != len(x):
        raise LengthMismatchError(f"{len(y)} values vs {len(x)} times")
    total = 0.0
    n = len(x) - 1
    i = 0
    while i + 2 <= n:
        h0 = x[i + 1] - x[i]
        h1 = x[i + 2] - x[i + 1]
        span = h0 + h1
        total += (span / 6.0) * (
            (2.0 - h1 / h0) * y[i]
            + span**2 / (h0 * h1) * y[i + 1]
            + (2.0 - h0 / h1) * y[i + 2]
        )
        i += 2
    if i < n:
        total += 0.5 * (x[i + 1] - x[i]) * (y[i] + y[i + 1])
    return float(total)


def simpson_accumulators(grid: SolutionGrid) -> dict[str, float]:
    """Recompute the three accumulated integrals by Simpson on the grid.

    Independent of the in-state accumulators; used as a cross-check
    oracle for qS, qSigma, qCon at t = T.
    """
    t = grid.times
    return {
        "qS": composite_simpson(grid.s1**2, t),
        "qSigma": composite_simpson(grid.sigma1**2 + grid.sigma2, t),
        "qCon": composite_simpson(grid.sigma1 * grid.s1 + 2.0 * grid.s2, t),
    }


def functional_values(trajectory, grid: SolutionGrid) -> FunctionalValue:
    """Evaluate the truncated phase/amplitude functionals on ``trajectory``.

    ``trajectory`` samples x(t) at the grid's time points. Diagnostic
    only: the certified eigenvalue path never evaluates these.
    """
    x = np.asarray(trajectory, dtype=float)
    if x.shape != grid.times.shape:
        raise LengthMismatchError(
            f"trajectory has {x.shape} samples, grid has {grid.times.shape}"
        )
    s_val = composite_simpson(grid.s1 * x + 0.5 * grid.s2 * x**2, grid.times)
    sigma_val = composite_simpson(grid.sigma1 * x + 0.5 * grid.sigma2 * x**2, grid.times)
    hb = grid.spec.hbar_tilde
    return FunctionalValue(
        S_of_x=s_val,
        sigma_of_x=sigma_val,
        psi_magnitude_log=sigma_val,
        psi_phase=(s_val / hb) if hb > 0 else None,
    )
