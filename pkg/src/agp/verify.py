"""Independent checkers: gradient validation, saddle oracles, runtime
monitors for the per-iteration descent/ascent inequalities, and the
iteration-complexity bound calculators.

The monitors re-evaluate, on a recorded trace, every inequality the
convergence analysis asserts along the iterates.  They are diagnostics for
pathological configurations and implementation drift, not proofs: a
violation beyond the relative tolerance 1e-8 * (1 + |lhs| + |rhs|) means
either the configuration breaks a required condition or the arithmetic
disagrees with the analysis.  Monitors whose derivations consume the decay
condition 1/c_{k+1} - 1/c_k <= rho~/10 (resp. q, zeta~) only assert from
the first index k0 where that condition holds; the k^(1/4) schedules reach
it at k0 = 9.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import geometry
from .objective import MinimaxProblem, Regime
from .schedules import (CNcConfig, NcCConfig, NcScConfig, RegimeConfig,
                        ScNcConfig, InfeasibleConfigError, _decay_k0)
from .solver import SolverTrace, potential_value

__all__ = [
    "MonitorEntry",
    "MonitorReport",
    "TheoryConstants",
    "InvalidTraceError",
    "finite_diff_check",
    "saddle_oracle_quadratic",
    "grid_extremum",
    "GridExtremum",
    "compute_bound",
    "theory_constants",
    "rate_slope",
    "lemma_monitor",
    "d1_nc_sc",
    "dhat1_sc_nc",
]

MONITOR_TOL = 1e-8
FD_TOL = 1e-6


class InvalidTraceError(ValueError):
    """The trace cannot support the requested monitors."""


# ---------------------------------------------------------------------------
# report containers


@dataclass(frozen=True)
class MonitorEntry:
    id: str
    k_start: int
    k_end: int  # inclusive; k_end < k_start means "not applicable"
    n_checked: int
    max_violation: float  # relative to 1 + |lhs| + |rhs|
    tol: float
    passed: bool


@dataclass(frozen=True)
class MonitorReport:
    entries: tuple

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def entry(self, eid: str) -> MonitorEntry:
        for e in self.entries:
            if e.id == eid:
                return e
        raise KeyError(eid)

    def __str__(self):
        lines = [f"{'inequality':<28} {'k range':>12} {'checked':>8} "
                 f"{'max rel viol':>13} {'ok':>4}"]
        for e in self.entries:
            rng = f"{e.k_start}..{e.k_end}" if e.n_checked else "n/a"
            lines.append(f"{e.id:<28} {rng:>12} {e.n_checked:>8} "
                         f"{e.max_violation:>13.3e} {'yes' if e.passed else 'NO':>4}")
        return "\n".join(lines)

    def to_json(self) -> str:
        return json.dumps({
            "passed": self.passed,
            "entries": [e.__dict__ for e in self.entries],
        }, indent=2)


def _entry(eid, ks, lhs, rhs, sense, tol=MONITOR_TOL):
    """Fold pointwise comparisons into a monitor entry.

    sense "le" asserts lhs <= rhs, "ge" asserts lhs >= rhs, both up to
    tol * (1 + |lhs| + |rhs|).
    """
    ks = np.asarray(ks)
    if ks.size == 0:
        return MonitorEntry(eid, 0, -1, 0, 0.0, tol, True)
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    excess = lhs - rhs if sense == "le" else rhs - lhs
    rel = excess / (1.0 + np.abs(lhs) + np.abs(rhs))
    worst = float(np.max(rel))
    return MonitorEntry(eid, int(ks[0]), int(ks[-1]), int(ks.size),
                        max(worst, 0.0), tol, bool(worst <= tol))


# ---------------------------------------------------------------------------
# constants entering the complexity bounds


def d1_nc_sc(cfg: NcScConfig, data) -> float:
    """Per-iteration gap-to-potential-decrease ratio of the NC-SC analysis."""
    if data.mu <= 0:
        return -math.inf
    eta, rho = cfg.eta, cfg.rho
    num = min(eta / 2 - rho * data.L_12**2 / 2 - 2 * data.L_12**2 / (rho * data.mu**2),
              (3 * data.mu - rho * data.L_y**2) / 2
              + (data.mu - 4 * rho * data.L_y**2) / (2 * rho * data.mu))
    den = max(eta**2 + 2 * data.L_12**2, 2 / rho**2)
    return num / den


def dhat1_sc_nc(cfg: ScNcConfig, data) -> float:
    """Per-iteration gap-to-potential-increase ratio of the SC-NC analysis."""
    if data.theta <= 0:
        return -math.inf
    zeta, nu = cfg.zeta, cfg.nu
    num = min(nu / 2 - zeta * data.L_21**2 / 2 - 2 * data.L_21**2 / (zeta * data.theta**2),
              (3 * data.theta - zeta * data.L_x**2) / 2
              + (data.theta - 4 * zeta * data.L_x**2) / (2 * zeta * data.theta))
    den = max(1 / zeta**2 + 2 * data.L_12**2, 2 * nu**2)
    return num / den


def dbar1_nc_c(cfg: NcCConfig, data) -> float:
    t, rb, L12 = cfg.tau, cfg.rho_bar, data.L_12
    return (8 * t**2 / (t - 2) ** 2
            + (2 * (rb * L12**2 - cfg.eta_bar) ** 2 + 3 * L12**2)
            / (16**2 * rb**2 * (t - 2) ** 2 * L12**4))


def Dhat1_c_nc(cfg: CNcConfig, data) -> float:
    t, zb, L21 = cfg.tau, cfg.zeta_bar, data.L_21
    return (16 * t**2 / (t - 2) ** 2
            + (zb * L21**2 - cfg.nu_bar) ** 2 / (64 * (t - 2) ** 2 * L21**4 * zb**2))


# ---------------------------------------------------------------------------
# per-trace inequality evaluation


def _mixed_f(problem, xs, ys):
    """f(x_{k+1}, y_k) for k = 1..n-1."""
    n = len(xs)
    out = np.empty(max(n - 1, 0))
    for i in range(n - 1):
        out[i] = problem.value(xs[i + 1], ys[i])
    return out


def _sq_diffs(arr):
    d = np.diff(arr, axis=0)
    return np.einsum("ij,ij->i", d, d)


def _inequalities(cfg, problem, xs, ys, f, fmix, gap, rgap, beta, gamma, pot):
    """All per-iteration inequalities for the config's regime.

    Yields (id, ks, lhs, rhs, sense) with 1-based iteration indices ks.
    ``fmix[k-1] = f(x_{k+1}, y_k)``, ``pot[j-1]`` the j-th potential value.
    """
    d = problem.constants
    n = len(xs)
    dx2 = _sq_diffs(xs)  # dx2[k-1] = ||x_{k+1}-x_k||^2, k = 1..n-1
    dy2 = _sq_diffs(ys)
    xn2 = np.einsum("ij,ij->i", xs, xs)
    yn2 = np.einsum("ij,ij->i", ys, ys)
    out = []

    if isinstance(cfg, NcScConfig):
        eta, rho, mu, Ly, L12 = cfg.eta, cfg.rho, d.mu, d.L_y, d.L_12
        ks = np.arange(1, n)
        out.append(("x_descent", ks, fmix - f[:-1], -(eta / 2) * dx2, "le"))
        if n >= 3:
            ks = np.arange(2, n)  # k = 2..n-1
            lhs = f[2:] - f[1:-1]
            rhs = (-(eta / 2 - L12**2 * rho / 2) * dx2[1:]
                   - (mu / 2 - 1 / rho) * dy2[1:]
                   - (mu - 1 / (2 * rho) - rho * Ly**2 / 2) * dy2[:-1])
            out.append(("joint_recursion", ks, lhs, rhs, "le"))
            lhs = pot[2:] - pot[1:-1]  # F_{k+1} - F_k
            rhs = (-(eta / 2 - rho * L12**2 / 2 - 2 * L12**2 / (rho * mu**2)) * dx2[1:]
                   - ((3 * mu - rho * Ly**2) / 2
                      + (mu - 4 * rho * Ly**2) / (2 * rho * mu)) * dy2[1:])
            out.append(("potential_decrease", ks, lhs, rhs, "le"))
            d1 = d1_nc_sc(cfg, d)
            out.append(("gap_potential_periter", ks,
                        d1 * gap[1:-1] ** 2, pot[1:-1] - pot[2:], "le"))
        else:
            for eid in ("joint_recursion", "potential_decrease", "gap_potential_periter"):
                out.append((eid, np.array([], dtype=int), [], [], "le"))
        return out

    if isinstance(cfg, NcCConfig):
        rb, eb, L12 = cfg.rho_bar, cfg.eta_bar, d.L_12
        call = np.array([cfg.c(k) for k in range(1, n + 2)])  # call[k-1] = c_k
        bbar = beta - eb  # actual beta~_k, respects any flooring
        ks = np.arange(1, n)
        out.append(("x_descent", ks, fmix - f[:-1], -(eb + bbar[:-1] / 2) * dx2, "le"))
        if n >= 3:
            ks = np.arange(2, n)
            i = ks - 1  # 0-based row of iteration k
            lhs = f[2:] - f[1:-1]
            rhs = (-(eb + bbar[i] / 2 - L12**2 * rb / 2) * dx2[i]
                   + (1 / rb - (call[i - 1] - call[i]) / 2) * dy2[i]
                   + (1 / (2 * rb)) * dy2[i - 1]
                   + (call[i - 1] / 2) * (yn2[i + 1] - yn2[i]))
            out.append(("joint_recursion", ks, lhs, rhs, "le"))
        else:
            out.append(("joint_recursion", np.array([], dtype=int), [], [], "le"))
        k0 = _decay_k0(cfg.c, rb / 10.0) or n + 1
        kfirst = max(k0, 3)
        if n - 1 >= kfirst:
            ks = np.arange(kfirst, n)
            i = ks - 1
            lhs = pot[i + 1] - pot[i]
            rhs = (-(eb + bbar[i] / 2 - rb * L12**2 / 2
                     - 8 * L12**2 / (rb * call[i] ** 2)) * dx2[i]
                   - (1 / (10 * rb)) * dy2[i]
                   + (4 / rb) * (call[i - 2] / call[i - 1] - call[i - 1] / call[i]) * yn2[i]
                   + ((call[i - 1] - call[i]) / 2) * yn2[i + 1])
            out.append(("potential_decrease", ks, lhs, rhs, "le"))
        else:
            out.append(("potential_decrease", np.array([], dtype=int), [], [], "le"))
        ks = np.arange(1, n + 1)
        c_prev = np.concatenate([[call[0]], call[: n - 1]])  # c_0 := c_1
        out.append(("gap_bridge", ks, gap, rgap + c_prev * np.sqrt(yn2), "le"))
        return out

    if isinstance(cfg, ScNcConfig):
        zeta, nu, th, Lx, L21 = cfg.zeta, cfg.nu, d.theta, d.L_x, d.L_21
        ks = np.arange(1, n)
        out.append(("y_ascent", ks, f[1:] - fmix, (nu / 2) * dy2, "ge"))
        if n >= 3:
            ks = np.arange(1, n - 1)  # k = 1..n-2, needs x_{k+2}
            lhs = fmix[1:] - fmix[:-1]  # f(x_{k+2},y_{k+1}) - f(x_{k+1},y_k)
            rhs = ((nu / 2 - L21**2 * zeta / 2) * dy2[:-1]
                   + (th / 2 - 1 / zeta) * dx2[1:]
                   + (th - 1 / (2 * zeta) - zeta * Lx**2 / 2) * dx2[:-1])
            out.append(("joint_recursion", ks, lhs, rhs, "ge"))
            lhs = pot[1 : n - 1] - pot[: n - 2]  # Fhat_{k+1} - Fhat_k
            rhs = ((nu / 2 - zeta * L21**2 / 2 - 2 * L21**2 / (zeta * th**2)) * dy2[:-1]
                   + ((3 * th - zeta * Lx**2) / 2
                      + (th - 4 * zeta * Lx**2) / (2 * zeta * th)) * dx2[:-1])
            out.append(("potential_increase", ks, lhs, rhs, "ge"))
            dh1 = dhat1_sc_nc(cfg, d)
            out.append(("gap_potential_periter", ks,
                        dh1 * gap[: n - 2] ** 2, pot[1 : n - 1] - pot[: n - 2], "le"))
        else:
            for eid, sense in (("joint_recursion", "ge"), ("potential_increase", "ge"),
                               ("gap_potential_periter", "le")):
                out.append((eid, np.array([], dtype=int), [], [], sense))
        return out

    if isinstance(cfg, CNcConfig):
        zb, nb, L21 = cfg.zeta_bar, cfg.nu_bar, d.L_21
        qall = np.array([cfg.q(k) for k in range(1, n + 2)])
        gbar = gamma - nb
        ks = np.arange(1, n)
        out.append(("y_ascent", ks, f[1:] - fmix, (nb + gbar[:-1] / 2) * dy2, "ge"))
        if n >= 4:
            ks = np.arange(2, n - 1)  # k = 2..n-2
            i = ks - 1
            lhs = fmix[i + 1] - fmix[i]
            rhs = ((nb + gbar[i] / 2 - L21**2 * zb / 2) * dy2[i]
                   + ((qall[i - 1] - qall[i]) / 2 - 1 / zb) * dx2[i + 1]
                   - (1 / (2 * zb)) * dx2[i]
                   - (qall[i - 1] / 2) * (xn2[i + 2] - xn2[i + 1]))
            out.append(("joint_recursion", ks, lhs, rhs, "ge"))
        else:
            out.append(("joint_recursion", np.array([], dtype=int), [], [], "ge"))
        k0 = _decay_k0(cfg.q, zb / 10.0) or n + 1
        kfirst = max(k0, 2)
        if n - 2 >= kfirst:
            ks = np.arange(kfirst, n - 1)
            i = ks - 1
            lhs = pot[i + 1] - pot[i]
            rhs = ((nb + gbar[i] / 2 - zb * L21**2 / 2
                    - 8 * L21**2 / (zb * qall[i] ** 2)) * dy2[i]
                   + ((qall[i] - qall[i - 1]) / 2) * xn2[i + 2]
                   + (1 / (10 * zb)) * dx2[i]
                   + (4 / zb) * (qall[i] / qall[i + 1] - qall[i - 1] / qall[i]) * xn2[i + 2])
            out.append(("potential_increase", ks, lhs, rhs, "ge"))
        else:
            out.append(("potential_increase", np.array([], dtype=int), [], [], "ge"))
        ks = np.arange(1, n + 1)
        q_prev = np.concatenate([[qall[0]], qall[: n - 1]])  # q_0 := q_1
        out.append(("gap_bridge", ks, gap, rgap + q_prev * np.sqrt(xn2), "le"))
        return out

    raise TypeError(f"unknown regime config {cfg!r}")


def lemma_monitor(trace: SolverTrace, problem: MinimaxProblem, cfg: RegimeConfig) -> MonitorReport:
    """Evaluate every analysis inequality along an alternating-update trace."""
    if trace.algo != "agp":
        raise InvalidTraceError(
            "monitors assume the alternating update; this trace was produced by "
            f"{trace.algo!r} and the descent/ascent derivations do not apply")
    if trace.regime is not None and trace.regime is not cfg.regime:
        raise InvalidTraceError(
            f"trace was produced under {trace.regime}, config is {cfg.regime}")
    if trace.xs is None or len(trace.xs) != len(trace.k):
        raise InvalidTraceError("trace is missing its iterate history")
    fmix = _mixed_f(problem, trace.xs, trace.ys)
    # recompute potentials under the supplied config rather than trusting the
    # trace, so monitoring with different constants stays honest
    n = len(trace.k)
    pot = np.full(n, np.nan)
    for j in range(1, n + 1):
        v = potential_value(cfg, problem, trace.xs, trace.ys, j)
        if v is not None:
            pot[j - 1] = v
    items = _inequalities(cfg, problem, trace.xs, trace.ys, trace.f, fmix,
                          trace.gap_norm, trace.reg_gap_norm,
                          trace.beta, trace.gamma, pot)
    return MonitorReport(tuple(_entry(eid, ks, lhs, rhs, sense)
                               for eid, ks, lhs, rhs, sense in items))


_HEADLINE = {
    Regime.NC_SC: "gap_potential_periter",
    Regime.SC_NC: "gap_potential_periter",
    Regime.NC_C: "potential_decrease",
    Regime.C_NC: "potential_increase",
}


def headline_slack_column(cfg, problem, xs, ys, gap_norm, potential, beta=None, gamma=None):
    """Signed per-iteration margin of the regime's headline inequality.

    Used to fill the trace's monitor-slack column; NaN outside the
    admissible index range.
    """
    n = len(xs)
    slack = np.full(n, np.nan)
    if n < 3:
        return slack
    f = np.zeros(n)  # headline inequalities never need raw f values
    fmix = np.zeros(max(n - 1, 0))
    rgap = np.zeros(n)
    beta = beta if beta is not None else np.zeros(n)
    gamma = gamma if gamma is not None else np.zeros(n)
    want = _HEADLINE[cfg.regime]
    for eid, ks, lhs, rhs, sense in _inequalities(
            cfg, problem, xs, ys, f, fmix, gap_norm, rgap, beta, gamma, potential):
        if eid != want or len(ks) == 0:
            continue
        lhs = np.asarray(lhs, dtype=float)
        rhs = np.asarray(rhs, dtype=float)
        margin = rhs - lhs if sense == "le" else lhs - rhs
        slack[np.asarray(ks) - 1] = margin
    if cfg.regime in (Regime.NC_SC, Regime.SC_NC):
        d1 = d1_nc_sc(cfg, problem.constants) if cfg.regime is Regime.NC_SC \
            else dhat1_sc_nc(cfg, problem.constants)
        if not (d1 > 0):
            slack[:] = np.nan
    return slack


# ---------------------------------------------------------------------------
# gradient validation


def finite_diff_check(problem: MinimaxProblem, n_points: int, seed=0) -> MonitorReport:
    """Central differences of the value against both block gradients."""
    if n_points < 1:
        raise ValueError("n_points must be >= 1")
    rng = np.random.default_rng(seed)
    sqeps = math.sqrt(np.finfo(float).eps)
    worst = {"grad_x": 0.0, "grad_y": 0.0}
    for _ in range(n_points):
        x = problem.X.sample(rng)
        y = problem.Y.sample(rng)
        for label, point, grad in (("grad_x", x, problem.grad_x),
                                   ("grad_y", y, problem.grad_y)):
            g = grad(x, y)
            fd = np.empty_like(point)
            for i in range(point.size):
                h = sqeps * (1.0 + abs(point[i]))
                p_hi = point.copy()
                p_lo = point.copy()
                p_hi[i] += h
                p_lo[i] -= h
                if label == "grad_x":
                    fd[i] = (problem.value(p_hi, y) - problem.value(p_lo, y)) / (2 * h)
                else:
                    fd[i] = (problem.value(x, p_hi) - problem.value(x, p_lo)) / (2 * h)
            rel = float(np.linalg.norm(fd - g) / max(1.0, float(np.linalg.norm(g))))
            worst[label] = max(worst[label], rel)
    entries = tuple(MonitorEntry(label, 1, n_points, n_points, worst[label],
                                 FD_TOL, worst[label] <= FD_TOL)
                    for label in ("grad_x", "grad_y"))
    return MonitorReport(entries)


# ---------------------------------------------------------------------------
# small-instance oracles


def saddle_oracle_quadratic(A, B, C, a=None, c_lin=None):
    """Unconstrained first-order point of the quadratic testbed.

    Solves A x + B y = -a, B' x - C y = c_lin; returns (x, y) or None when
    the system is singular or the residual exceeds 1e-10.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    C = np.atleast_2d(np.asarray(C, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    nx, ny = A.shape[0], C.shape[0]
    a = np.zeros(nx) if a is None else np.asarray(a, dtype=float)
    c_lin = np.zeros(ny) if c_lin is None else np.asarray(c_lin, dtype=float)
    M = np.block([[A, B], [B.T, -C]])
    rhs = np.concatenate([-a, c_lin])
    try:
        sol = np.linalg.solve(M, rhs)
    except np.linalg.LinAlgError:
        return None
    if not np.all(np.isfinite(sol)):
        return None
    if np.linalg.norm(M @ sol - rhs) > 1e-10 * (1.0 + np.linalg.norm(rhs)):
        return None
    return sol[:nx], sol[nx:]


@dataclass(frozen=True)
class GridExtremum:
    f_lower: float
    f_upper: float
    pad: float  # one-cell Lipschitz error bound on both extrema


def _grid_points(s: geometry.ConstraintSet, resolution: int) -> np.ndarray:
    if isinstance(s, geometry.WholeSpace):
        raise ValueError("grid extremum needs a compact set, got an unbounded one")
    if isinstance(s, geometry.Box):
        axes = [np.linspace(lo, hi, resolution) for lo, hi in zip(s.lower, s.upper)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)
    if isinstance(s, geometry.Ball):
        axes = [np.linspace(c - s.radius, c + s.radius, resolution) for c in s.center]
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=1)
        keep = np.linalg.norm(pts - s.center, axis=1) <= s.radius
        return pts[keep]
    if isinstance(s, geometry.Simplex):
        if s.dim == 1:
            return np.array([[s.scale]])
        axes = [np.linspace(0.0, s.scale, resolution)] * (s.dim - 1)
        mesh = np.meshgrid(*axes, indexing="ij")
        head = np.stack([m.ravel() for m in mesh], axis=1)
        last = s.scale - head.sum(axis=1)
        keep = last >= 0
        return np.hstack([head[keep], last[keep, None]])
    if isinstance(s, geometry.Product):
        grids = [_grid_points(p, resolution) for p in s.parts]
        pts = grids[0]
        for g in grids[1:]:
            pts = np.hstack([np.repeat(pts, len(g), axis=0),
                             np.tile(g, (len(pts), 1))])
        return pts
    raise TypeError(f"unknown set {s!r}")


def _cell_width(s: geometry.ConstraintSet, resolution: int) -> float:
    d = s.diameter()
    if geometry.is_unbounded(d):
        raise ValueError("grid extremum needs a compact set, got an unbounded one")
    return d / max(resolution - 1, 1)


def grid_extremum(problem: MinimaxProblem, resolution: int) -> GridExtremum:
    """Grid min/max of f over X x Y with a one-cell Lipschitz error pad.

    Desk-scale only: the total number of evaluated pairs is capped at 1e7.
    """
    gx = _grid_points(problem.X, resolution)
    gy = _grid_points(problem.Y, resolution)
    total = len(gx) * len(gy)
    if total > 10**7:
        raise ValueError(f"grid of {total} pairs exceeds the 1e7 desk-scale cap")
    lo, hi = math.inf, -math.inf
    for xp in gx:
        for yp in gy:
            v = problem.value(xp, yp)
            if v < lo:
                lo = v
            if v > hi:
                hi = v
    # crude gradient bound over the product set, anchored at one point
    d = problem.constants
    x0, y0 = gx[0], gy[0]
    g0 = math.hypot(float(np.linalg.norm(problem.grad_x(x0, y0))),
                    float(np.linalg.norm(problem.grad_y(x0, y0))))
    gbound = (g0 + (d.L_x + d.L_12) * problem.X.diameter()
              + (d.L_y + d.L_21) * problem.Y.diameter())
    h = 0.5 * math.hypot(_cell_width(problem.X, resolution) * math.sqrt(problem.dim_x),
                         _cell_width(problem.Y, resolution) * math.sqrt(problem.dim_y))
    return GridExtremum(f_lower=lo, f_upper=hi, pad=gbound * h)


# ---------------------------------------------------------------------------
# complexity bounds


@dataclass(frozen=True)
class TheoryConstants:
    """Everything the iteration-complexity bound formulas consume."""

    regime: Regime
    f_lower: float
    f_upper: float
    sigma_x: float
    sigma_y: float
    sighat_x: float
    sighat_y: float
    tau: float | None = None
    # NC_SC
    d1: float | None = None
    F1: float | None = None
    F_lower: float | None = None
    # SC_NC
    dhat1: float | None = None
    Fhat1: float | None = None
    Fhat_upper: float | None = None  # f_upper - (theta/2 - 3/zeta) sigma_x^2
    # NC_C
    dbar1: float | None = None
    d3: float | None = None
    d4: float | None = None
    rho_bar: float | None = None
    L_12: float | None = None
    Ftilde3: float | None = None
    # C_NC
    Dhat1: float | None = None
    dhat3: float | None = None
    dhat4: float | None = None
    zeta_bar: float | None = None
    L_21: float | None = None
    Fcal2: float | None = None


def _finite_sizes(problem):
    vals = (problem.X.diameter(), problem.Y.diameter(),
            problem.X.max_norm(), problem.Y.max_norm())
    if any(geometry.is_unbounded(v) for v in vals):
        raise ValueError("complexity bounds require compact feasible sets")
    return vals


def theory_constants(problem: MinimaxProblem, cfg: RegimeConfig, trace: SolverTrace,
                     resolution: int = 41) -> TheoryConstants:
    """Assemble the bound constants for one configured run.

    The initial potential values come from the trace (the first potential
    uses the convention y_0 = y_1, collapsing its delta term), the extremal
    f values from a padded grid scan.
    """
    d = problem.constants
    sigma_x, sigma_y, sighat_x, sighat_y = _finite_sizes(problem)
    ext = grid_extremum(problem, resolution)
    f_lower = ext.f_lower - ext.pad
    f_upper = ext.f_upper + ext.pad
    base = dict(regime=cfg.regime, f_lower=f_lower, f_upper=f_upper,
                sigma_x=sigma_x, sigma_y=sigma_y,
                sighat_x=sighat_x, sighat_y=sighat_y)

    if isinstance(cfg, NcScConfig):
        coeff = d.mu + 7 / (2 * cfg.rho) - cfg.rho * d.L_y**2 / 2 - 2 * d.L_y**2 / d.mu
        return TheoryConstants(**base, d1=d1_nc_sc(cfg, d),
                               F1=float(trace.f[0]),
                               F_lower=f_lower - coeff * sigma_y**2)
    if isinstance(cfg, ScNcConfig):
        if len(trace) < 2:
            raise ValueError("need at least 2 iterations to evaluate the initial potential")
        Fhat1 = potential_value(cfg, problem, trace.xs, trace.ys, 1)
        upper = f_upper - (d.theta / 2 - 3 / cfg.zeta) * sigma_x**2
        return TheoryConstants(**base, dhat1=dhat1_sc_nc(cfg, d), Fhat1=Fhat1,
                               Fhat_upper=upper)
    if isinstance(cfg, NcCConfig):
        if len(trace) < 3:
            raise ValueError("need at least 3 iterations to evaluate the initial potential")
        Ftilde3 = potential_value(cfg, problem, trace.xs, trace.ys, 3)
        db1 = dbar1_nc_c(cfg, d)
        t, rb, L12 = cfg.tau, cfg.rho_bar, d.L_12
        d3 = (Ftilde3 - f_lower + 7 * sigma_y**2 / (2 * rb)
              + (6 + 3 / max(128 * (t - 2) * rb**2 * L12**2 * db1, 120 * math.sqrt(2)))
              * sighat_y**2 / rb)
        d4 = max(db1, 5 * math.sqrt(3) / (8 * (t - 2) * rb**2 * L12**2))
        return TheoryConstants(**base, tau=t, dbar1=db1, d3=d3, d4=d4,
                               rho_bar=rb, L_12=L12, Ftilde3=Ftilde3)
    if isinstance(cfg, CNcConfig):
        if len(trace) < 3:
            raise ValueError("need at least 3 iterations to evaluate the initial potential")
        Fcal2 = potential_value(cfg, problem, trace.xs, trace.ys, 2)
        Dh1 = Dhat1_c_nc(cfg, d)
        t, zb, L21 = cfg.tau, cfg.zeta_bar, d.L_21
        dh3 = f_upper - Fcal2 + (17 / (5 * zb)) * sigma_x**2 + (31 / (5 * zb)) * sighat_x**2
        dh4 = max(Dh1, 5 * math.sqrt(2) * (1 + 2 * d.L_12**2 * zb**2)
                  / (16 * (t - 2) * zb**2 * L21**2))
        return TheoryConstants(**base, tau=t, Dhat1=Dh1, dhat3=dh3, dhat4=dh4,
                               zeta_bar=zb, L_21=L21, Fcal2=Fcal2)
    raise TypeError(f"unknown regime config {cfg!r}")


def compute_bound(tc: TheoryConstants, eps: float) -> float:
    """Literal iteration-count bound for reaching gap norm <= eps."""
    if not (eps > 0):
        raise ValueError("eps must be > 0")
    if tc.regime is Regime.NC_SC:
        if tc.d1 is None or not (tc.d1 > 0):
            raise InfeasibleConfigError(
                "nonpositive per-iteration ratio d1: the configuration violates "
                "the descent conditions")
        return (tc.F1 - tc.F_lower) / (tc.d1 * eps**2)
    if tc.regime is Regime.SC_NC:
        if tc.dhat1 is None or not (tc.dhat1 > 0):
            raise InfeasibleConfigError(
                "nonpositive per-iteration ratio dhat1: the configuration violates "
                "the ascent conditions")
        return (tc.Fhat_upper - tc.Fhat1) / (tc.dhat1 * eps**2)
    if tc.regime is Regime.NC_C:
        first = (64 * tc.rho_bar * (tc.tau - 2) * tc.L_12**2 * tc.d3 * tc.d4 / eps**2 + 2) ** 2
        second = tc.sighat_y**4 / (tc.rho_bar**4 * eps**4) + 1
        return max(first, second)
    if tc.regime is Regime.C_NC:
        first = (64 * tc.zeta_bar * (tc.tau - 2) * tc.L_21**2 * tc.dhat3 * tc.dhat4 / eps**2 + 1) ** 2
        second = tc.sighat_x**4 / (tc.zeta_bar**4 * eps**4) + 1
        return max(first, second)
    raise TypeError(f"unknown regime {tc.regime!r}")


def rate_slope(points) -> float:
    """Least-squares slope of log T against log(1/eps).

    points: iterable of (eps, T); eps strictly decreasing, T nondecreasing.
    """
    pts = [(float(e), float(t)) for e, t in points]
    if len(pts) < 3:
        raise ValueError("need at least 3 (eps, T) points")
    eps = np.array([p[0] for p in pts])
    T = np.array([p[1] for p in pts])
    if not np.all(np.diff(eps) < 0):
        raise ValueError("eps values must be strictly decreasing")
    if not np.all(np.diff(T) >= 0):
        raise ValueError("T values must be nondecreasing")
    lg = np.log(1.0 / eps)
    lt = np.log(T)
    A = np.vstack([lg, np.ones_like(lg)]).T
    coef, *_ = np.linalg.lstsq(A, lt, rcond=None)
    return float(coef[0])
