"""Coefficient ODE system: right-hand side, time integration, diagnostics.

The flow couples the phase coefficients (S1, S2) to the amplitude
coefficients (sigma1, sigma2):

    sigma1' = -(sigma1*S2 + sigma2*S1)/m
    sigma2' = -sigma2*S2/m
    S1'     = -S1*S2/m + (hbar_tilde^2/(2m)) * sigma1*sigma2
    S2'     = -S2^2/m - k + (hbar_tilde^2/m) * sigma2^2

Three quadrature accumulators ride inside the integration state so the
integrals entering the eigenvalue and the initial-data constraint
inherit the integrator's order:

    qS'     = S1^2
    qSigma' = sigma1^2 + sigma2
    qCon'   = sigma1*S1 + 2*S2

A fourth internal accumulator tracks the plain integral of S2; it is a
diagnostic used to verify the exponential identity
sigma2(t) = sigma20 * exp(-qIntS2(t)/m) and is not part of the CSV
contract.

The S2 equation is of Riccati type and genuinely blows up in finite
time when a caustic falls inside the horizon; integration reports the
last good time rather than regularizing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import TextIO

import numpy as np

from .errors import BlowUpError, DegenerateProbeError
from .model import CoefficientState, InitialData, OscillatorSpec, require_valid

#: any state component beyond this magnitude counts as a blow-up
BLOWUP_LIMIT = 1e12

#: default fixed step
DEFAULT_STEP = 1e-3

#: per-component mixed error control for the adaptive variant
ADAPTIVE_ATOL = 1e-12
ADAPTIVE_RTOL = 1e-10

METHODS = ("rk4", "rk4_adaptive")

CSV_COLUMNS = ("t", "S1", "S2", "sigma1", "sigma2", "qS", "qSigma", "qCon")


def _stage(S1, S2, g1, g2, m_inv, k, hh):
    """Derivatives of all eight state components. ``hh`` = hbar_tilde^2/(2m)."""
    return (
        -S1 * S2 * m_inv + hh * g1 * g2,            # S1'
        -S2 * S2 * m_inv - k + 2.0 * hh * g2 * g2,  # S2'
        -(g1 * S2 + g2 * S1) * m_inv,               # sigma1'
        -g2 * S2 * m_inv,                           # sigma2'
        S1 * S1,                                    # qS'
        g1 * g1 + g2,                               # qSigma'
        g1 * S1 + 2.0 * S2,                         # qCon'
        S2,                                         # qIntS2'
    )


def rhs(state: CoefficientState, spec: OscillatorSpec) -> CoefficientState:
    """Evaluate the right-hand side at ``state``.

    Returned as a ``CoefficientState`` whose fields hold the time
    derivatives of the corresponding components (and ``t`` = 1, the
    trivial derivative of time itself).
    """
    m_inv = 1.0 / spec.m
    hh = spec.hbar_tilde * spec.hbar_tilde * 0.5 * m_inv
    d = _stage(state.S1, state.S2, state.sigma1, state.sigma2, m_inv, spec.k, hh)
    return CoefficientState(
        t=1.0, S1=d[0], S2=d[1], sigma1=d[2], sigma2=d[3],
        qS=d[4], qSigma=d[5], qCon=d[6],
    )


@dataclass(frozen=True)
class SolutionGrid:
    """Time-ordered coefficient states from one integration run.

    ``data`` has one row per time point with columns
    S1, S2, sigma1, sigma2, qS, qSigma, qCon, qIntS2. A grid is
    ``complete`` when it reaches t = T; partial grids only occur inside
    ``BlowUpError``.
    """

    spec: OscillatorSpec
    times: np.ndarray
    data: np.ndarray
    method: str
    step: float

    def __post_init__(self):
        self.times.setflags(write=False)
        self.data.setflags(write=False)

    @property
    def s1(self) -> np.ndarray:
        return self.data[:, 0]

    @property
    def s2(self) -> np.ndarray:
        return self.data[:, 1]

    @property
    def sigma1(self) -> np.ndarray:
        return self.data[:, 2]

    @property
    def sigma2(self) -> np.ndarray:
        return self.data[:, 3]

    @property
    def qS(self) -> np.ndarray:
        return self.data[:, 4]

    @property
    def qSigma(self) -> np.ndarray:
        return self.data[:, 5]

    @property
    def qCon(self) -> np.ndarray:
        return self.data[:, 6]

    @property
    def qIntS2(self) -> np.ndarray:
        return self.data[:, 7]

    @property
    def complete(self) -> bool:
        return bool(self.times[-1] == self.spec.T)

    def __len__(self) -> int:
        return len(self.times)

    def state(self, i: int) -> CoefficientState:
        row = self.data[i]
        return CoefficientState(
            t=float(self.times[i]), S1=float(row[0]), S2=float(row[1]),
            sigma1=float(row[2]), sigma2=float(row[3]),
            qS=float(row[4]), qSigma=float(row[5]), qCon=float(row[6]),
        )

    @property
    def states(self) -> list[CoefficientState]:
        return [self.state(i) for i in range(len(self))]

    @property
    def final(self) -> CoefficientState:
        return self.state(len(self) - 1)

    def write_csv(self, out: TextIO, footer: str | None = None) -> None:
        """Emit the grid as CSV: '#' metadata lines, header, 17-digit rows."""
        s = self.spec
        out.write("# qap solution grid\n")
        out.write(
            "# m={} k={} hbar_tilde={} T={} x0={} xT={}\n".format(
                *(_g17(v) for v in (s.m, s.k, s.hbar_tilde, s.T, s.x0, s.xT))
            )
        )
        out.write(f"# method={self.method} step={_g17(self.step)} points={len(self)}\n")
        out.write(",".join(CSV_COLUMNS) + "\n")
        for i in range(len(self)):
            row = self.data[i, :7]
            out.write(_g17(self.times[i]) + "," + ",".join(_g17(v) for v in row) + "\n")
        if footer:
            out.write(f"# {footer}\n")

    def to_csv(self, path, footer: str | None = None) -> None:
        with open(path, "w", newline="\n") as fh:
            self.write_csv(fh, footer=footer)


def _g17(x) -> str:
    return format(float(x), ".17g")


def _finite_row(row) -> bool:
    for v in row:
        if not math.isfinite(v) or abs(v) > BLOWUP_LIMIT:
            return False
    return True


def _rk4_step(y, h, m_inv, k, hh):
    """One classic RK4 step of the eight-component state tuple.

    Unrolled scalar arithmetic: this is the hot loop of every
    finite-difference probe inside extremization, and tuple-of-stage
    indirection costs ~3x here. Each stage mirrors ``_stage`` exactly;
    a regression test pins the two against each other.
    """
    S1, S2, g1, g2, qS, qG, qC, qI = y
    hh2 = 2.0 * hh

    aS1 = -S1 * S2 * m_inv + hh * g1 * g2
    aS2 = -S2 * S2 * m_inv - k + hh2 * g2 * g2
    ag1 = -(g1 * S2 + g2 * S1) * m_inv
    ag2 = -g2 * S2 * m_inv
    aqS = S1 * S1
    aqG = g1 * g1 + g2
    aqC = g1 * S1 + 2.0 * S2
    aqI = S2

    h2 = 0.5 * h
    uS1 = S1 + h2 * aS1
    uS2 = S2 + h2 * aS2
    ug1 = g1 + h2 * ag1
    ug2 = g2 + h2 * ag2
    bS1 = -uS1 * uS2 * m_inv + hh * ug1 * ug2
    bS2 = -uS2 * uS2 * m_inv - k + hh2 * ug2 * ug2
    bg1 = -(ug1 * uS2 + ug2 * uS1) * m_inv
    bg2 = -ug2 * uS2 * m_inv
    bqS = uS1 * uS1
    bqG = ug1 * ug1 + ug2
    bqC = ug1 * uS1 + 2.0 * uS2
    bqI = uS2

    vS1 = S1 + h2 * bS1
    vS2 = S2 + h2 * bS2
    vg1 = g1 + h2 * bg1
    vg2 = g2 + h2 * bg2
    cS1 = -vS1 * vS2 * m_inv + hh * vg1 * vg2
    cS2 = -vS2 * vS2 * m_inv - k + hh2 * vg2 * vg2
    cg1 = -(vg1 * vS2 + vg2 * vS1) * m_inv
    cg2 = -vg2 * vS2 * m_inv
    cqS = vS1 * vS1
    cqG = vg1 * vg1 + vg2
    cqC = vg1 * vS1 + 2.0 * vS2
    cqI = vS2

    wS1 = S1 + h * cS1
    wS2 = S2 + h * cS2
    wg1 = g1 + h * cg1
    wg2 = g2 + h * cg2
    dS1 = -wS1 * wS2 * m_inv + hh * wg1 * wg2
    dS2 = -wS2 * wS2 * m_inv - k + hh2 * wg2 * wg2
    dg1 = -(wg1 * wS2 + wg2 * wS1) * m_inv
    dg2 = -wg2 * wS2 * m_inv
    dqS = wS1 * wS1
    dqG = wg1 * wg1 + wg2
    dqC = wg1 * wS1 + 2.0 * wS2
    dqI = wS2

    w6 = h / 6.0
    return (
        S1 + w6 * (aS1 + 2.0 * (bS1 + cS1) + dS1),
        S2 + w6 * (aS2 + 2.0 * (bS2 + cS2) + dS2),
        g1 + w6 * (ag1 + 2.0 * (bg1 + cg1) + dg1),
        g2 + w6 * (ag2 + 2.0 * (bg2 + cg2) + dg2),
        qS + w6 * (aqS + 2.0 * (bqS + cqS) + dqS),
        qG + w6 * (aqG + 2.0 * (bqG + cqG) + dqG),
        qC + w6 * (aqC + 2.0 * (bqC + cqC) + dqC),
        qI + w6 * (aqI + 2.0 * (bqI + cqI) + dqI),
    )


def _blow_up(spec, times, rows, method, step):
    t_last = times[-1]
    partial = SolutionGrid(
        spec=spec,
        times=np.asarray(times, dtype=float),
        data=np.asarray(rows, dtype=float),
        method=method,
        step=step,
    )
    raise BlowUpError(t_last, partial)


def _n_steps(T, step):
    n = math.ceil(T / step)
    if n > 1 and (n - 1) * step >= T:
        n -= 1
    return n


def _integrate_fixed(spec, init, step):
    m_inv = 1.0 / spec.m
    k = spec.k
    hh = spec.hbar_tilde * spec.hbar_tilde * 0.5 * m_inv
    T = spec.T
    n = _n_steps(T, step)
    y = (init.S10, init.S20, init.sigma10, init.sigma20, 0.0, 0.0, 0.0, 0.0)
    times = [0.0]
    rows = [y]
    if not _finite_row(y):
        _blow_up(spec, times, rows, "rk4", step)
    t_prev = 0.0
    for i in range(1, n + 1):
        # last step shortened so the grid lands on T exactly
        t = i * step if i < n else T
        y = _rk4_step(y, t - t_prev, m_inv, k, hh)
        if not _finite_row(y):
            _blow_up(spec, times, rows, "rk4", step)
        times.append(t)
        rows.append(y)
        t_prev = t
    return SolutionGrid(
        spec=spec,
        times=np.asarray(times, dtype=float),
        data=np.asarray(rows, dtype=float),
        method="rk4",
        step=step,
    )


def final_state(spec: OscillatorSpec, init: InitialData, step: float = DEFAULT_STEP):
    """Fixed-step run keeping only the endpoint (t = T) state tuple.

    Identical arithmetic to ``integrate(..., method='rk4')`` without the
    trajectory storage; this is the hot path of extremization, where
    every finite-difference probe needs just the final coefficients and
    accumulators. Raises ``BlowUpError`` (without a partial grid) on the
    same runs ``integrate`` would reject.
    """
    require_valid(spec)
    m_inv = 1.0 / spec.m
    k = spec.k
    hh = spec.hbar_tilde * spec.hbar_tilde * 0.5 * m_inv
    T = spec.T
    n = _n_steps(T, step)
    y = (init.S10, init.S20, init.sigma10, init.sigma20, 0.0, 0.0, 0.0, 0.0)
    if not _finite_row(y):
        raise BlowUpError(0.0)
    t_prev = 0.0
    for i in range(1, n + 1):
        t = i * step if i < n else T
        y = _rk4_step(y, t - t_prev, m_inv, k, hh)
        if not _finite_row(y):
            raise BlowUpError(t_prev)
        t_prev = t
    return y


def _integrate_adaptive(spec, init, step):
    m_inv = 1.0 / spec.m
    k = spec.k
    hh = spec.hbar_tilde * spec.hbar_tilde * 0.5 * m_inv
    T = spec.T
    times = [0.0]
    rows = [(init.S10, init.S20, init.sigma10, init.sigma20, 0.0, 0.0, 0.0, 0.0)]
    if not _finite_row(rows[0]):
        _blow_up(spec, times, rows, "rk4_adaptive", step)
    t = 0.0
    y = rows[0]
    h = min(step, T)
    h_min = 1e-12 * max(1.0, T)
    while t < T:
        h = min(h, T - t)
        if h < h_min:
            _blow_up(spec, times, rows, "rk4_adaptive", step)
        coarse = _rk4_step(y, h, m_inv, k, hh)
        half = _rk4_step(y, 0.5 * h, m_inv, k, hh)
        fine = _rk4_step(half, 0.5 * h, m_inv, k, hh)
        if not (_finite_row(coarse) and _finite_row(fine)):
            h *= 0.25
            continue
        # step-doubling error estimate for a 4th-order step
        ratio = 0.0
        for yc, yf in zip(coarse, fine):
            err = abs(yf - yc) / 15.0
            tol = ADAPTIVE_ATOL + ADAPTIVE_RTOL * max(abs(yc), abs(yf))
            ratio = max(ratio, err / tol)
        if ratio <= 1.0:
            t = t + h
            y = fine
            times.append(t)
            rows.append(y)
            grow = 0.9 * ratio ** -0.2 if ratio > 0.0 else 5.0
            h *= min(5.0, max(0.2, grow))
        else:
            h *= max(0.2, 0.9 * ratio ** -0.2)
    # floating accumulation may land within one ulp of T; pin it
    times[-1] = T
    return SolutionGrid(
        spec=spec,
        times=np.asarray(times, dtype=float),
        data=np.asarray(rows, dtype=float),
        method="rk4_adaptive",
        step=step,
    )


def integrate(
    spec: OscillatorSpec,
    init: InitialData,
    step: float = DEFAULT_STEP,
    method: str = "rk4",
) -> SolutionGrid:
    """Integrate the coefficient system from 0 to T.

    ``rk4`` uses a fixed step (grid of ceil(T/step) intervals, the last
    one shortened to land on T exactly); ``rk4_adaptive`` uses classic
    step doubling with per-component mixed error control. Raises
    ``BlowUpError`` carrying the partial grid when any component exceeds
    ``BLOWUP_LIMIT`` or turns non-finite.
    """
    require_valid(spec)
    if not (step > 0 and math.isfinite(step)):
        raise ValueError(f"step must be positive and finite, got {step}")
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    for name, v in zip(("S10", "S20", "sigma10", "sigma20"), init.as_tuple()):
        if not math.isfinite(v):
            raise ValueError(f"initial data {name} is not finite")
    if method == "rk4":
        return _integrate_fixed(spec, init, step)
    return _integrate_adaptive(spec, init, step)


def convergence_order(
    spec: OscillatorSpec,
    init: InitialData,
    t_probe: float,
    step: float = 0.025,
) -> float:
    """Estimate the integrator's order by step halving at ``t_probe``.

    Runs the fixed-step integrator at step, step/2, step/4 over
    [0, t_probe] and returns log2 of the ratio of successive S2
    differences. Raises ``DegenerateProbeError`` when the differences
    fall below 1e-14 (probe too easy to resolve an order).
    """
    probe_spec = replace(spec, T=float(t_probe))
    values = []
    for s in (step, step / 2.0, step / 4.0):
        grid = integrate(probe_spec, init, step=s, method="rk4")
        values.append(float(grid.s2[-1]))
    d1 = values[0] - values[1]
    d2 = values[1] - values[2]
    if abs(d1) < 1e-14 or abs(d2) < 1e-14:
        raise DegenerateProbeError(
            f"successive S2 differences {d1:.3e}, {d2:.3e} below resolvable size"
        )
    return math.log2(abs(d1) / abs(d2))
