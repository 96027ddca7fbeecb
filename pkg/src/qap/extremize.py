"""Extremization of the action eigenvalue over initial coefficient data.

The eigenvalue's stationary point is not known to be a minimum: in the
classical regime it is a maximum along S10 (the quadratic coefficient
of the closed-form eigenvalue is negative) and exactly flat along the
phase-offset direction. Direct simplex minimization of the eigenvalue
would therefore diverge, and simplex collapse is meaningless in the
flat valley. The optimizer instead drives the finite-difference
gradient of the objective to zero: Nelder-Mead runs on the squared
gradient norm over the active coordinates, and convergence is declared
on the max-norm of the gradient, never on simplex geometry.

Runs that blow up inside the horizon map to a large finite penalty so
the simplex retreats; they are counted, not raised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .action import EigenvalueReport, eigenvalue, endpoint_report, json_17g
from .dynamics import final_state, integrate
from .errors import BlowUpError, FDFailureError
from .model import InitialData, OscillatorSpec

#: objective value substituted for runs that blow up
BLOWUP_PENALTY = 1e15

COORD_NAMES = ("S10", "S20", "sigma10", "sigma20")


@dataclass(frozen=True)
class HessianSignature:
    """Eigenvalue sign counts of the finite-difference Hessian."""

    positive: int
    negative: int
    near_zero: int

    def to_dict(self) -> dict:
        return {
            "positive": self.positive,
            "negative": self.negative,
            "near_zero": self.near_zero,
        }


@dataclass(frozen=True)
class StationarityReport:
    """Finite-difference gradient and Hessian of the objective at a point."""

    gradient: np.ndarray
    hessian: np.ndarray
    signature: HessianSignature


@dataclass(frozen=True)
class ExtremumResult:
    """Outcome of one extremization run.

    ``report`` is recomputed by a fresh integration at ``init``, never
    cached from a simplex vertex. ``hessian_signature`` is None when the
    finite-difference probes around the final point failed.
    """

    init: InitialData
    report: EigenvalueReport
    gradient_norm: float
    hessian_signature: HessianSignature | None
    iterations: int
    converged: bool
    active_mask: tuple[bool, bool, bool, bool]
    blowups: int
    seed: int

    def to_json(self) -> str:
        return json_17g(
            {
                "init": self.init.to_dict(),
                "report": self.report.to_dict(),
                "gradient_norm": self.gradient_norm,
                "hessian_signature": (
                    self.hessian_signature.to_dict() if self.hessian_signature else None
                ),
                "iterations": self.iterations,
                "converged": self.converged,
                "active_mask": list(self.active_mask),
                "active": [n for n, b in zip(COORD_NAMES, self.active_mask) if b],
                "blowups": self.blowups,
                "seed": self.seed,
            }
        )


def parse_active(active) -> tuple[bool, bool, bool, bool]:
    """Normalize an active-coordinate selection to a 4-tuple of flags.

    Accepts None (all four), a 4-sequence of bools, an iterable of
    coordinate names, or a comma-separated name string.
    """
    if active is None:
        return (True, True, True, True)
    if isinstance(active, str):
        items = [s.strip() for s in active.split(",") if s.strip()]
    else:
        items = list(active)
    if len(items) == 4 and all(isinstance(b, (bool, np.bool_)) for b in items):
        mask = tuple(bool(b) for b in items)
        if not any(mask):
            raise ValueError("no active coordinates selected")
        return mask
    names = [str(s) for s in items]
    unknown = [n for n in names if n not in COORD_NAMES]
    if unknown:
        raise ValueError(f"unknown coordinate names {unknown}; expected {COORD_NAMES}")
    mask = tuple(n in names for n in COORD_NAMES)
    if not any(mask):
        raise ValueError("no active coordinates selected")
    return mask


def objective(
    init: InitialData,
    spec: OscillatorSpec,
    penalty_weight: float = 0.0,
    step: float = 1e-3,
    method: str = "rk4",
) -> float:
    """Eigenvalue plus optional quadratic constraint penalty.

    Deterministic scalar; blow-ups map to ``BLOWUP_PENALTY`` so a
    derivative-free search retreats from caustic regions.
    """
    try:
        if method == "rk4":
            # storage-free fast path; bit-identical to the grid route
            first = (init.S10, init.S20, init.sigma10, init.sigma20, 0.0, 0.0, 0.0, 0.0)
            report = endpoint_report(spec, first, final_state(spec, init, step))
        else:
            report = eigenvalue(integrate(spec, init, step=step, method=method))
    except BlowUpError:
        return BLOWUP_PENALTY
    value = report.lam
    if penalty_weight != 0.0:
        value += penalty_weight * report.constraint_residual**2
    return value


def _central_gradient(f, z, h_fd):
    n = len(z)
    g = np.empty(n)
    for i in range(n):
        h = h_fd * max(1.0, abs(z[i]))
        zp = z.copy(); zp[i] += h
        zm = z.copy(); zm[i] -= h
        g[i] = (f(zp) - f(zm)) / (2.0 * h)
    return g


def _central_hessian(f, z, h_fd):
    # second differences use sqrt(h_fd) steps: h_fd itself would put the
    # quotient below the objective's evaluation precision
    n = len(z)
    hs = [math.sqrt(h_fd) * max(1.0, abs(z[i])) for i in range(n)]
    f0 = f(z)
    H = np.empty((n, n))
    for i in range(n):
        zp = z.copy(); zp[i] += hs[i]
        zm = z.copy(); zm[i] -= hs[i]
        H[i, i] = (f(zp) - 2.0 * f0 + f(zm)) / hs[i] ** 2
    for i in range(n):
        for j in range(i + 1, n):
            zpp = z.copy(); zpp[i] += hs[i]; zpp[j] += hs[j]
            zpm = z.copy(); zpm[i] += hs[i]; zpm[j] -= hs[j]
            zmp = z.copy(); zmp[i] -= hs[i]; zmp[j] += hs[j]
            zmm = z.copy(); zmm[i] -= hs[i]; zmm[j] -= hs[j]
            H[i, j] = H[j, i] = (f(zpp) - f(zpm) - f(zmp) + f(zmm)) / (4.0 * hs[i] * hs[j])
    return H


def _signature(H: np.ndarray) -> HessianSignature:
    eigs = np.linalg.eigvalsh(H)
    scale = max(1.0, float(np.max(np.abs(eigs))) if len(eigs) else 0.0)
    thresh = 1e-6 * scale
    positive = int(np.sum(eigs > thresh))
    negative = int(np.sum(eigs < -thresh))
    return HessianSignature(positive, negative, len(eigs) - positive - negative)


def stationarity_check(
    init: InitialData,
    spec: OscillatorSpec,
    h_fd: float = 1e-5,
    active=None,
    penalty_weight: float = 0.0,
    step: float = 1e-3,
    method: str = "rk4",
) -> StationarityReport:
    """Verify stationarity of the objective at ``init`` by central differences.

    Gradient steps are h_fd * max(1, |coord|) per active coordinate.
    Raises ``FDFailureError`` when any probe integration blows up: a
    verification tool must not silently average over a caustic.
    """
    mask = parse_active(active)
    idx = [i for i in range(4) if mask[i]]
    base = list(init.as_tuple())

    def f(z):
        vals = list(base)
        for j, i in enumerate(idx):
            vals[i] = z[j]
        v = objective(InitialData(*vals), spec, penalty_weight, step, method)
        if v >= BLOWUP_PENALTY:
            raise FDFailureError("finite-difference probe blew up")
        return v

    z = np.array([base[i] for i in idx], dtype=float)
    gradient = _central_gradient(f, z, h_fd)
    hessian = _central_hessian(f, z, h_fd)
    return StationarityReport(gradient, hessian, _signature(hessian))


def optimize(
    spec: OscillatorSpec,
    guess: InitialData,
    active=None,
    grad_tol: float = 1e-6,
    max_iter: int = 2000,
    penalty_weight: float = 0.0,
    restarts: int = 5,
    seed: int = 42,
    step: float = 1e-3,
    fd_step: float = 1e-5,
    method: str = "rk4",
) -> ExtremumResult:
    """Find a stationary point of the objective over the active coordinates.

    Runs up to ``restarts`` Nelder-Mead searches (the first from
    ``guess``, later ones from seeded perturbations of the best point)
    on the squared finite-difference gradient. Each simplex starts at
    scale 0.1 * max(1, |coord|) per coordinate and is capped at
    ``max_iter`` iterations. Convergence means the gradient max-norm
    fell to ``grad_tol``; otherwise the best point found is still
    returned with ``converged=False``.
    """
    mask = parse_active(active)
    idx = [i for i in range(4) if mask[i]]
    base = list(guess.as_tuple())
    blowups = 0
    T = spec.T

    def make_init(z) -> InitialData:
        vals = list(base)
        for j, i in enumerate(idx):
            vals[i] = float(z[j])
        return InitialData(*vals)

    def f_raw(z) -> tuple[float, float]:
        """Objective value and last integrable time (T when complete)."""
        nonlocal blowups
        init_z = make_init(z)
        try:
            if method == "rk4":
                first = (init_z.S10, init_z.S20, init_z.sigma10, init_z.sigma20,
                         0.0, 0.0, 0.0, 0.0)
                rep = endpoint_report(spec, first, final_state(spec, init_z, step))
            else:
                rep = eigenvalue(integrate(spec, init_z, step=step, method=method))
        except BlowUpError as err:
            blowups += 1
            return BLOWUP_PENALTY, float(err.t_last)
        value = rep.lam
        if penalty_weight != 0.0:
            value += penalty_weight * rep.constraint_residual**2
        return value, T

    def f(z) -> float:
        return f_raw(z)[0]

    def grad(z) -> np.ndarray:
        return _central_gradient(f, z, fd_step)

    def merit(z) -> float:
        # blown-up centers form a plateau at the raw penalty; ramp it by
        # how early the run died so the simplex has a slope back toward
        # integrable initial data
        z = np.asarray(z, dtype=float)
        fc, t_last = f_raw(z)
        if fc >= BLOWUP_PENALTY:
            frac = (T - min(max(t_last, 0.0), T)) / T
            return BLOWUP_PENALTY * (1.0 + frac)
        g = grad(z)
        if float(np.max(np.abs(g))) >= 0.5 * BLOWUP_PENALTY:
            # center fine, some probe blown: just below the plateau
            return 0.99 * BLOWUP_PENALTY
        return min(float(g @ g), 0.9 * BLOWUP_PENALTY)

    rng = np.random.default_rng(seed)
    n = len(idx)
    best_z = np.array([base[i] for i in idx], dtype=float)

    if f(best_z) >= BLOWUP_PENALTY:
        gradient_norm = math.inf
        best_merit = 2.0 * BLOWUP_PENALTY
    else:
        g = grad(best_z)
        gradient_norm = float(np.max(np.abs(g)))
        best_merit = float(g @ g)

    converged = gradient_norm <= grad_tol
    iterations = 0
    attempt = 0
    while not converged and attempt < max(1, restarts):
        if attempt == 0:
            start = best_z.copy()
        else:
            scales = 0.1 * np.maximum(1.0, np.abs(best_z))
            start = best_z + scales * rng.standard_normal(n)
        simplex = np.tile(start, (n + 1, 1))
        for j in range(n):
            simplex[j + 1, j] += 0.1 * max(1.0, abs(start[j]))
        res = minimize(
            merit,
            start,
            method="Nelder-Mead",
            options={
                "initial_simplex": simplex,
                "maxiter": max_iter,
                "maxfev": 8 * max_iter,
                "xatol": 1e-9,
                "fatol": 1e-15,
            },
        )
        iterations += int(res.nit)
        if float(res.fun) < best_merit:
            best_merit = float(res.fun)
            best_z = np.asarray(res.x, dtype=float)
        if f(best_z) < BLOWUP_PENALTY:
            g = grad(best_z)
            gradient_norm = float(np.max(np.abs(g)))
            converged = gradient_norm <= grad_tol
        attempt += 1

    final_init = make_init(best_z)
    grid = integrate(spec, final_init, step=step, method=method)
    report = eigenvalue(grid)
    try:
        signature = stationarity_check(
            final_init, spec, fd_step, mask, penalty_weight, step, method
        ).signature
    except FDFailureError:
        signature = None
    return ExtremumResult(
        init=final_init,
        report=report,
        gradient_norm=gradient_norm,
        hessian_signature=signature,
        iterations=iterations,
        converged=converged,
        active_mask=mask,
        blowups=blowups,
        seed=seed,
    )
