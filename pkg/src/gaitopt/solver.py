"""Bound-constrained augmented-Lagrangian solver.

Solves

    min f(w)   s.t.  lo <= r(w) <= hi   (rows with lo == hi are equalities)
                     lb <= w <= ub

by the method of multipliers. Interval rows get slack variables bounded in
[lo, hi], every row becomes an equality h(z) = 0 in z = (w, s), and the
augmented Lagrangian

    L(z) = f(w) - pi . h(z) + 0.5 * rho * |h(z)|^2

is minimized over the box by a projected, damped Gauss-Newton iteration:
variables pressed against a bound by the gradient are frozen, the sparse
system (rho J^T J + H_f + mu I) d = -g is factorized for the free ones,
and a projected Armijo backtracking accepts the step. Second-order
information makes the penalty term's squared conditioning a non-issue,
where limited-memory methods stall. Whenever the iterate is feasible
enough the multipliers are updated and the targets tighten; otherwise the
penalty grows. Every step is deterministic, so identical inputs give
identical iterates.

The problem object is accessed only through `dim`, `variable_bounds`,
`constraint_bounds`, `cost_and_grad`, `residuals`, `jacobian` and
`linearize` (residuals plus a J^T v operator); an optional
`cost_hessian_diag` sharpens the Gauss-Newton model. Anything implementing
that protocol can be solved, which keeps the solver oracle-agnostic.
"""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu


@dataclass
class SolverOptions:
    feasibility_tol: float = 1e-6
    optimality_tol: float = 1e-6
    max_iterations: int = 3000        # total inner Gauss-Newton iterations
    max_outer: int = 60
    penalty_init: float = 10.0
    penalty_growth: float = 10.0
    penalty_max: float = 1e8
    multiplier_max: float = 1e12
    inner_maxiter: int = 80
    damping_init: float = 1e-8
    verbose: bool = False

    def __post_init__(self):
        if self.feasibility_tol <= 0 or self.optimality_tol <= 0:
            raise ValueError("tolerances must be positive")


@dataclass
class Solution:
    w: np.ndarray
    status: str                  # optimal | feasible_max_iter | infeasible | diverged
    feasibility: float
    optimality: float
    iterations: int              # outer iterations
    inner_iterations: int
    wall_time: float
    cost: float
    message: str = ""

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


class _Diverged(Exception):
    pass


def solve(problem, w0, opts: SolverOptions | None = None) -> Solution:
    """Solve an assembled problem from the given start point."""
    opts = opts or SolverOptions()
    w0 = np.asarray(w0, dtype=float)
    n = problem.dim
    if w0.shape != (n,):
        raise ValueError(f"w0 has shape {w0.shape}, expected ({n},)")

    lb, ub = problem.variable_bounds()
    lo, hi = problem.constraint_bounds()
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    eq = lo == hi
    iv = ~eq
    m = len(lo)
    n_slack = int(iv.sum())
    target = np.where(eq, lo, 0.0)

    # slack selection matrix: row iv[j] gets -s_j
    iv_rows = np.where(iv)[0]
    S = sp.csr_matrix((-np.ones(n_slack), (iv_rows, np.arange(n_slack))),
                      shape=(m, n_slack))

    t_start = time.perf_counter()

    def constraint_gap(r):
        """True violation of lo <= r <= hi, independent of slacks."""
        viol = np.maximum(lo - r, 0.0) + np.maximum(r - hi, 0.0)
        return float(np.max(viol)) if m else 0.0

    def slacked(r, s):
        h = r - target
        h[iv] -= s
        return h

    r0 = problem.residuals(w0)
    if not np.all(np.isfinite(r0)):
        return Solution(w0, "diverged", np.inf, np.inf, 0, 0,
                        time.perf_counter() - t_start, np.inf,
                        "non-finite residuals at the initial point")

    z = np.concatenate([np.clip(w0, lb, ub), np.clip(r0[iv], lo[iv], hi[iv])])
    lbz = np.concatenate([lb, lo[iv]])
    ubz = np.concatenate([ub, hi[iv]])
    dim_z = n + n_slack

    cost_hess = getattr(problem, "cost_hessian_diag", None)

    pi = np.zeros(m)
    rho = opts.penalty_init

    def al_value(zv):
        w = zv[:n]
        f, _ = problem.cost_and_grad(w)
        r = problem.residuals(w)
        if not (np.isfinite(f) and np.all(np.isfinite(r))):
            raise _Diverged
        h = slacked(r, zv[n:])
        return f - pi @ h + 0.5 * rho * (h @ h), h

    def al_grad(zv, h, jt, gf):
        y = rho * h - pi
        gw = gf + jt(y)
        gs = -y[iv]
        return np.concatenate([gw, gs])

    def projected_gradient(zv, g):
        return float(np.max(np.abs(zv - np.clip(zv - g, lbz, ubz)))) if dim_z else 0.0

    def inner_solve(zv, omega, budget):
        """Projected damped Gauss-Newton on the augmented Lagrangian."""
        mu = opts.damping_init
        it = 0
        val, h = al_value(zv)
        while it < budget:
            w = zv[:n]
            f, gf = problem.cost_and_grad(w)
            r, jt = problem.linearize(w)
            h = slacked(r, zv[n:])
            g = al_grad(zv, h, jt, gf)
            pg = projected_gradient(zv, g)
            if pg <= omega:
                break
            J = problem.jacobian(w)
            Jz = sp.hstack([J, S], format="csr") if n_slack else J
            H = rho * (Jz.T @ Jz)
            if cost_hess is not None:
                d = np.zeros(dim_z)
                d[:n] = cost_hess(w)
                H = H + sp.diags(d)
            H = H.tocsc()

            at_lower = (zv <= lbz + 1e-12) & (g > 0)
            at_upper = (zv >= ubz - 1e-12) & (g < 0)
            free = ~(at_lower | at_upper) & (lbz < ubz)
            if not np.any(free):
                break
            fidx = np.where(free)[0]
            Hff = H[fidx][:, fidx]
            gF = g[fidx]

            step_taken = False
            for _ in range(8):
                try:
                    lu = splu(Hff + mu * sp.identity(len(fidx), format="csc"))
                    dF = lu.solve(-gF)
                except RuntimeError:
                    mu = max(mu * 10.0, 1e-10)
                    continue
                if not np.all(np.isfinite(dF)):
                    mu = max(mu * 10.0, 1e-10)
                    continue
                d = np.zeros(dim_z)
                d[fidx] = dF
                t = 1.0
                ok = False
                while t >= 2 ** -25:
                    z_new = np.clip(zv + t * d, lbz, ubz)
                    step = z_new - zv
                    if not np.any(step):
                        break
                    val_new, h_new = al_value(z_new)
                    if val_new <= val + 1e-4 * (g @ step):
                        ok = True
                        break
                    t *= 0.5
                if ok:
                    zv = z_new
                    val = val_new
                    mu = max(mu / 3.0, opts.damping_init)
                    step_taken = True
                    break
                mu = max(mu * 10.0, 1e-10)
            it += 1
            if not step_taken:
                break  # no descent even with heavy damping: inner optimum
        return zv, it

    total_inner = 0
    feas = np.inf
    opt = np.inf
    status = "infeasible"
    message = ""
    stalled = 0
    prev_feas = np.inf
    prev_opt = np.inf
    outer = 0
    eta = max(opts.feasibility_tol, 1.0 / rho ** 0.1)
    omega = max(opts.optimality_tol, 1.0 / rho)

    try:
        for outer in range(1, opts.max_outer + 1):
            budget = min(opts.inner_maxiter, opts.max_iterations - total_inner)
            if budget <= 0:
                status = ("feasible_max_iter" if feas <= opts.feasibility_tol
                          else "infeasible")
                message = "inner iteration budget exhausted"
                break
            z, used = inner_solve(z, omega, budget)
            total_inner += used

            w = z[:n]
            f, gf = problem.cost_and_grad(w)
            r, jt = problem.linearize(w)
            h = slacked(r, z[n:])
            feas = constraint_gap(r)
            g = al_grad(z, h, jt, gf)
            opt = projected_gradient(z, g)
            if opts.verbose:
                print(f"[al] outer {outer:3d} rho {rho:9.2e} feas {feas:9.2e} "
                      f"pg {opt:9.2e} inner {used:4d} f {f:12.5e}", file=sys.stderr)

            # the gradient above is the Lagrangian gradient with the
            # to-be-updated multipliers, so this certifies a KKT point
            if feas <= opts.feasibility_tol and opt <= opts.optimality_tol:
                status = "optimal"
                break

            h_norm = float(np.max(np.abs(h))) if m else 0.0
            if h_norm <= max(eta, opts.feasibility_tol):
                pi = np.clip(pi - rho * h, -opts.multiplier_max, opts.multiplier_max)
                eta = max(opts.feasibility_tol, eta / rho ** 0.9)
                omega = max(opts.optimality_tol, omega / rho)
                if feas <= opts.feasibility_tol:
                    # primal-feasible already; larger penalties only amplify
                    # multiplier noise while stationarity catches up
                    if opt >= 0.5 * prev_opt:
                        stalled += 1
                    else:
                        stalled = 0
                    if stalled >= 6:
                        status = "feasible_max_iter"
                        message = "stationarity stalled at a feasible point"
                        break
                    prev_opt = min(prev_opt, opt)
            else:
                if rho >= opts.penalty_max:
                    if feas >= 0.99 * prev_feas:
                        stalled += 1
                    else:
                        stalled = 0
                    if stalled >= 3:
                        status = "infeasible"
                        message = "penalty at cap and feasibility stalled"
                        break
                rho = min(rho * opts.penalty_growth, opts.penalty_max)
                eta = max(opts.feasibility_tol, 1.0 / rho ** 0.1)
                omega = max(opts.optimality_tol, 1.0 / rho)
            prev_feas = feas
        else:
            status = "feasible_max_iter" if feas <= opts.feasibility_tol else "infeasible"
            message = "outer iteration limit reached"
    except _Diverged:
        return Solution(z[:n], "diverged", feas, opt, outer, total_inner,
                        time.perf_counter() - t_start, np.inf,
                        "non-finite evaluation during iteration")

    w = z[:n]
    cost = problem.cost_and_grad(w)[0]
    return Solution(w=w, status=status, feasibility=feas, optimality=opt,
                    iterations=outer, inner_iterations=total_inner,
                    wall_time=time.perf_counter() - t_start, cost=cost,
                    message=message)
