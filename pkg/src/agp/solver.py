"""Alternating gradient projection iteration and its instrumentation.

One iteration from (x_k, y_k):

    x_{k+1} = P_X( x_k - (grad_x f(x_k, y_k) + b_k x_k) / beta_k )
    y_{k+1} = P_Y( y_k + (grad_y f(x_{k+1}, y_k) - c_k y_k) / gamma_k )

The y-step always sees the fresh x_{k+1}; that alternating order is the
point of the method and is what the descent/ascent monitors assume.  The
simultaneous-step baseline ``gda_step`` updates both blocks from the old
iterate and famously spirals outward on bilinear games.

Stopping uses the stationarity-gap norm of the raw objective

    gap_x = beta_k  (x_k - P_X(x_k - grad_x f(x_k,y_k)/beta_k))
    gap_y = gamma_k (y_k - P_Y(y_k + grad_y f(x_k,y_k)/gamma_k))

evaluated with the current iteration's (beta_k, gamma_k); the regularized
variant swaps in the gradients of f~.  Traces additionally record the
fixed-scale gap (beta = gamma = 1) for inspection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .objective import MinimaxProblem, Regime
from .schedules import (CNcConfig, NcCConfig, NcScConfig, RegimeConfig,
                        ScNcConfig, StepParams, params_at)

__all__ = [
    "SolverState",
    "GapVector",
    "SolverTrace",
    "NumericFailureError",
    "agp_step",
    "gda_step",
    "stationarity_gap",
    "regularized_gap",
    "potential_value",
    "run",
    "run_gda",
]


class NumericFailureError(RuntimeError):
    """A gradient came back non-finite; carries the iteration and block."""

    def __init__(self, k: int, block: str):
        super().__init__(f"non-finite gradient in block {block!r} at iteration {k}")
        self.k = k
        self.block = block


@dataclass
class SolverState:
    k: int
    x: np.ndarray
    y: np.ndarray
    x_prev: np.ndarray | None = None
    y_prev: np.ndarray | None = None
    y_prev2: np.ndarray | None = None
    x_next: np.ndarray | None = None
    params: StepParams | None = None


@dataclass(frozen=True)
class GapVector:
    gx: np.ndarray
    gy: np.ndarray
    regularized: bool
    norm: float = field(init=False)

    def __post_init__(self):
        n = math.sqrt(float(self.gx @ self.gx) + float(self.gy @ self.gy))
        object.__setattr__(self, "norm", n)


def _require_finite(g, k, block):
    if not np.all(np.isfinite(g)):
        raise NumericFailureError(k, block)
    return g


def _step_core(problem, x, y, p: StepParams, gxf=None):
    """Shared update; returns (x_new, y_new)."""
    if gxf is None:
        gxf = problem.grad_x(x, y)
    _require_finite(gxf, p.k, "x")
    x_new = problem.X.project(x - (gxf + p.b * x) / p.beta)
    gy_new = _require_finite(problem.grad_y(x_new, y), p.k, "y")
    y_new = problem.Y.project(y + (gy_new - p.c * y) / p.gamma)
    return x_new, y_new


def agp_step(problem: MinimaxProblem, state: SolverState, params: StepParams) -> SolverState:
    """One alternating update; x first, then y at the fresh x."""
    if params.k != state.k:
        raise ValueError(f"params are for iteration {params.k}, state is at {state.k}")
    x, y = problem.check_point(state.x, state.y)
    x_new, y_new = _step_core(problem, x, y, params)
    return SolverState(k=state.k + 1, x=x_new, y=y_new,
                       x_prev=x, y_prev=y, y_prev2=state.y_prev)


def gda_step(problem: MinimaxProblem, state: SolverState, step_x: float, step_y: float) -> SolverState:
    """Simultaneous projected descent/ascent, both blocks from the old iterate."""
    if not (step_x > 0 and step_y > 0):
        raise ValueError("step sizes must be > 0")
    x, y = problem.check_point(state.x, state.y)
    gxf = _require_finite(problem.grad_x(x, y), state.k, "x")
    gyf = _require_finite(problem.grad_y(x, y), state.k, "y")
    x_new = problem.X.project(x - step_x * gxf)
    y_new = problem.Y.project(y + step_y * gyf)
    return SolverState(k=state.k + 1, x=x_new, y=y_new,
                       x_prev=x, y_prev=y, y_prev2=state.y_prev)


def _gap_from_grads(problem, x, y, gxf, gyf, beta, gamma, regularized):
    gx = beta * (x - problem.X.project(x - gxf / beta))
    gy = gamma * (y - problem.Y.project(y + gyf / gamma))
    return GapVector(gx=gx, gy=gy, regularized=regularized)


def stationarity_gap(problem: MinimaxProblem, x, y, beta: float, gamma: float) -> GapVector:
    """Scaled projected-gradient mapping of the raw objective."""
    if not (beta > 0 and gamma > 0):
        raise ValueError("beta and gamma must be > 0")
    x, y = problem.check_point(x, y)
    return _gap_from_grads(problem, x, y, problem.grad_x(x, y), problem.grad_y(x, y),
                           beta, gamma, regularized=False)


def regularized_gap(problem: MinimaxProblem, x, y, params: StepParams) -> GapVector:
    """Same mapping with the gradients of f~ = f + (b/2)||x||^2 - (c/2)||y||^2."""
    x, y = problem.check_point(x, y)
    gxf = problem.grad_x(x, y) + params.b * x
    gyf = problem.grad_y(x, y) - params.c * y
    return _gap_from_grads(problem, x, y, gxf, gyf, params.beta, params.gamma,
                           regularized=True)


# ---------------------------------------------------------------------------
# Lyapunov potentials.  xs/ys hold the iterates with xs[k-1] = x_k; j is the
# 1-based potential index.  Returns None while the referenced iterates or
# schedule values are not available yet (first 1-2 iterations, or a missing
# lookahead x_{j+1} at the tail).


def potential_value(cfg: RegimeConfig, problem: MinimaxProblem, xs, ys, j: int) -> float | None:
    K = len(xs)
    d = problem.constants
    if isinstance(cfg, NcScConfig):
        if j < 2 or j > K:
            return None
        rho, mu, Ly = cfg.rho, d.mu, d.L_y
        dy = ys[j - 1] - ys[j - 2]
        coeff = mu + 7.0 / (2 * rho) - rho * Ly**2 / 2 - 2 * Ly**2 / mu
        s = 2.0 / (rho**2 * mu)
        return float(problem.value(xs[j - 1], ys[j - 1]) + (s - coeff) * (dy @ dy))
    if isinstance(cfg, NcCConfig):
        if j < 3 or j > K:
            return None
        rb = cfg.rho_bar
        cj, cjm1, cjm2 = cfg.c(j), cfg.c(j - 1), cfg.c(j - 2)
        dy = ys[j - 1] - ys[j - 2]
        yj = ys[j - 1]
        s = (4.0 / (rb**2 * cj)) * (dy @ dy) - (4.0 / rb) * (cjm2 / cjm1 - 1.0) * (yj @ yj)
        return float(problem.value(xs[j - 1], yj) + s
                     - 7.0 / (2 * rb) * (dy @ dy) - 0.5 * cjm1 * (yj @ yj))
    if isinstance(cfg, ScNcConfig):
        if j < 1 or j + 1 > K:
            return None
        z, th = cfg.zeta, d.theta
        dx = xs[j] - xs[j - 1]
        return float(problem.value(xs[j], ys[j - 1])
                     - (2.0 / (z**2 * th)) * (dx @ dx)
                     - (th / 2 - 3.0 / z) * (dx @ dx))
    if isinstance(cfg, CNcConfig):
        if j < 2 or j + 1 > K:
            return None
        zb = cfg.zeta_bar
        qj, qjm1 = cfg.q(j), cfg.q(j - 1)
        dx = xs[j] - xs[j - 1]
        xj1 = xs[j]
        s = (-(4.0 / (zb**2 * qj)) * (dx @ dx)
             - (4.0 / zb) * (1.0 - qjm1 / qj) * (xj1 @ xj1))
        return float(problem.value(xj1, ys[j - 1]) + s
                     + 17.0 / (5 * zb) * (dx @ dx) + 0.5 * qjm1 * (xj1 @ xj1))
    raise TypeError(f"unknown regime config {cfg!r}")


# ---------------------------------------------------------------------------
# traces


@dataclass
class SolverTrace:
    """Per-iteration records of one solver run; immutable by convention."""

    k: np.ndarray
    f: np.ndarray
    gap_norm: np.ndarray
    reg_gap_norm: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray
    b: np.ndarray
    c: np.ndarray
    dx_norm: np.ndarray
    dy_norm: np.ndarray
    potential: np.ndarray
    monitor_slack: np.ndarray
    xs: np.ndarray
    ys: np.ndarray
    gap_norm_unit: np.ndarray
    reason: str
    T_eps: int | None
    eps: float
    algo: str
    regime: Regime | None
    problem_name: str
    floored_any: bool = False

    def __len__(self):
        return len(self.k)

    @property
    def iterations(self) -> int:
        return int(self.k[-1]) if len(self.k) else 0

    def first_hit(self, eps: float, regularized: bool = False, min_k: int = 1) -> int | None:
        """First iteration index with gap norm <= eps (and index >= min_k)."""
        g = self.reg_gap_norm if regularized else self.gap_norm
        idx = np.nonzero((g <= eps) & (self.k >= min_k))[0]
        return int(self.k[idx[0]]) if idx.size else None

    @property
    def final_gap(self) -> float:
        return float(self.gap_norm[-1]) if len(self.k) else math.nan


def _resolve_init(problem, init):
    if isinstance(init, str):
        if init != "project-origin":
            raise ValueError(f"unknown init mode {init!r}")
        return (problem.X.project(np.zeros(problem.dim_x)),
                problem.Y.project(np.zeros(problem.dim_y)))
    x0, y0 = init
    x0, y0 = problem.check_point(x0, y0)
    return problem.X.project(x0), problem.Y.project(y0)


def _check_eps(eps):
    eps = float(eps)
    if not math.isfinite(eps) or eps <= 0:
        raise ValueError("eps must be positive and finite")
    return eps


def run(problem: MinimaxProblem, cfg: RegimeConfig, eps: float, max_iter: int,
        init="project-origin") -> SolverTrace:
    """Iterate until the raw stationarity gap drops to eps or max_iter hits.

    Deterministic in (problem, cfg, eps, max_iter, init).  The returned
    trace carries the full iterate history, so the monitors can be run on
    it afterwards.
    """
    eps = _check_eps(eps)
    max_iter = int(max_iter)
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    data = problem.constants
    x, y = _resolve_init(problem, init)

    cap = min(max_iter, 1024)
    cols = {name: np.empty(cap) for name in
            ("f", "gap_norm", "reg_gap_norm", "beta", "gamma", "b", "c", "gap_norm_unit")}
    xs = np.empty((cap, problem.dim_x))
    ys = np.empty((cap, problem.dim_y))

    def grow(n):
        nonlocal cap, xs, ys
        cap = min(max_iter, max(2 * cap, n))
        for name in cols:
            cols[name] = np.resize(cols[name], cap)
        xs = np.resize(xs, (cap, problem.dim_x))
        ys = np.resize(ys, (cap, problem.dim_y))

    T_eps = None
    reason = "max_iter"
    floored_any = False
    n = 0
    for k in range(1, max_iter + 1):
        if n >= cap:
            grow(n + 1)
        p = params_at(cfg, data, k)
        floored_any = floored_any or p.floored
        gxf = _require_finite(problem.grad_x(x, y), k, "x")
        gyf = _require_finite(problem.grad_y(x, y), k, "y")
        gap = _gap_from_grads(problem, x, y, gxf, gyf, p.beta, p.gamma, False)
        if p.b == 0.0 and p.c == 0.0:
            rgap = gap  # the regularized mapping coincides exactly
        else:
            rgap = _gap_from_grads(problem, x, y, gxf + p.b * x, gyf - p.c * y,
                                   p.beta, p.gamma, True)
        ugap = _gap_from_grads(problem, x, y, gxf, gyf, 1.0, 1.0, False)
        cols["f"][n] = problem.value(x, y)
        cols["gap_norm"][n] = gap.norm
        cols["reg_gap_norm"][n] = rgap.norm
        cols["beta"][n] = p.beta
        cols["gamma"][n] = p.gamma
        cols["b"][n] = p.b
        cols["c"][n] = p.c
        cols["gap_norm_unit"][n] = ugap.norm
        xs[n] = x
        ys[n] = y
        n += 1
        if gap.norm <= eps:
            T_eps = k
            reason = "gap_le_eps"
            break
        if k < max_iter:
            x, y = _step_core(problem, x, y, p, gxf=gxf)

    trace = _assemble_trace(problem, cfg, cols, xs, ys, n, reason, T_eps, eps,
                            "agp", cfg.regime, floored_any)
    return trace


def run_gda(problem: MinimaxProblem, step_x: float, step_y: float, eps: float,
            max_iter: int, init="project-origin") -> SolverTrace:
    """Simultaneous-step baseline with constant step sizes.

    The gap is evaluated with beta = 1/step_x, gamma = 1/step_y so the
    projected-gradient mapping matches the steps actually taken.
    """
    if not (step_x > 0 and step_y > 0):
        raise ValueError("step sizes must be > 0")
    eps = _check_eps(eps)
    max_iter = int(max_iter)
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    beta, gamma = 1.0 / step_x, 1.0 / step_y
    x, y = _resolve_init(problem, init)

    names = ("f", "gap_norm", "reg_gap_norm", "beta", "gamma", "b", "c", "gap_norm_unit")
    rows = {name: [] for name in names}
    xs_l, ys_l = [], []
    T_eps = None
    reason = "max_iter"
    for k in range(1, max_iter + 1):
        gxf = _require_finite(problem.grad_x(x, y), k, "x")
        gyf = _require_finite(problem.grad_y(x, y), k, "y")
        gap = _gap_from_grads(problem, x, y, gxf, gyf, beta, gamma, False)
        ugap = _gap_from_grads(problem, x, y, gxf, gyf, 1.0, 1.0, False)
        rows["f"].append(problem.value(x, y))
        rows["gap_norm"].append(gap.norm)
        rows["reg_gap_norm"].append(gap.norm)  # b = c = 0: identical by definition
        rows["beta"].append(beta)
        rows["gamma"].append(gamma)
        rows["b"].append(0.0)
        rows["c"].append(0.0)
        rows["gap_norm_unit"].append(ugap.norm)
        xs_l.append(x)
        ys_l.append(y)
        if gap.norm <= eps:
            T_eps = k
            reason = "gap_le_eps"
            break
        if k < max_iter:
            x_new = problem.X.project(x - step_x * gxf)
            y_new = problem.Y.project(y + step_y * gyf)
            x, y = x_new, y_new

    cols = {name: np.asarray(vals) for name, vals in rows.items()}
    xs = np.asarray(xs_l)
    ys = np.asarray(ys_l)
    return _assemble_trace(problem, None, cols, xs, ys, len(xs), reason, T_eps,
                           eps, "gda", None, False)


def _assemble_trace(problem, cfg, cols, xs, ys, n, reason, T_eps, eps, algo,
                    regime, floored_any) -> SolverTrace:
    xs = np.array(xs[:n])
    ys = np.array(ys[:n])
    k = np.arange(1, n + 1)
    dx = np.full(n, np.nan)
    dy = np.full(n, np.nan)
    if n > 1:
        dx[1:] = np.linalg.norm(np.diff(xs, axis=0), axis=1)
        dy[1:] = np.linalg.norm(np.diff(ys, axis=0), axis=1)
    potential = np.full(n, np.nan)
    slack = np.full(n, np.nan)
    if algo == "agp" and cfg is not None:
        for j in range(1, n + 1):
            v = potential_value(cfg, problem, xs, ys, j)
            if v is not None:
                potential[j - 1] = v
        slack = _headline_slack(cfg, problem, xs, ys, cols, potential, n)
    trace = SolverTrace(
        k=k, f=cols["f"][:n].copy(), gap_norm=cols["gap_norm"][:n].copy(),
        reg_gap_norm=cols["reg_gap_norm"][:n].copy(), beta=cols["beta"][:n].copy(),
        gamma=cols["gamma"][:n].copy(), b=cols["b"][:n].copy(), c=cols["c"][:n].copy(),
        dx_norm=dx, dy_norm=dy, potential=potential, monitor_slack=slack,
        xs=xs, ys=ys, gap_norm_unit=cols["gap_norm_unit"][:n].copy(),
        reason=reason, T_eps=T_eps, eps=eps, algo=algo, regime=regime,
        problem_name=problem.name, floored_any=floored_any,
    )
    return trace


def _headline_slack(cfg, problem, xs, ys, cols, potential, n):
    """Signed margin of the regime's headline per-iteration inequality.

    Positive means satisfied with room; NaN where not yet defined.  The
    full inequality set lives in the verification module; this column is
    the quick per-row health signal.
    """
    from .verify import headline_slack_column

    return headline_slack_column(cfg, problem, xs, ys,
                                 gap_norm=cols["gap_norm"][:n], potential=potential,
                                 beta=cols["beta"][:n], gamma=cols["gamma"][:n])
