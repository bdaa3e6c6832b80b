"""Bounded-variable revised simplex, dense, for desk-scale LPs.

Two-phase method with artificial variables; Dantzig pricing with a
Bland's-rule fallback after a degeneracy streak, lowest-column-index
tie-breaks throughout, so repeated solves of the same LP are identical.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

AT_LB, AT_UB, FREE, BASIC = 0, 1, 2, 3

_DEGENERACY_STREAK_LIMIT = 50


@dataclass
class SimplexOutcome:
    status: str  # optimal | infeasible | unbounded | iteration-limit
    x: np.ndarray  # values of the structural columns
    y: np.ndarray  # row duals, dZ/db convention
    objective: float
    iterations: int


def simplex_solve(
    A: np.ndarray,
    relations: np.ndarray,
    b: np.ndarray,
    c: np.ndarray,
    lb: np.ndarray,
    ub: np.ndarray,
    iteration_limit: int = 50_000,
    tol: float = 1e-9,
) -> SimplexOutcome:
    """Minimize c'x subject to A x (<=, =, >=) b and lb <= x <= ub."""
    m, n = A.shape
    slack_rows = [i for i in range(m) if relations[i] != "="]
    n_slack = len(slack_rows)

    # Equality form: structural columns, one slack per inequality row,
    # one artificial per row.
    total = n + n_slack + m
    Af = np.zeros((m, total))
    Af[:, :n] = A
    lo = np.concatenate([lb, np.zeros(n_slack), np.zeros(m)])
    hi = np.concatenate([ub, np.full(n_slack, np.inf), np.full(m, np.inf)])
    for k, i in enumerate(slack_rows):
        Af[i, n + k] = 1.0 if relations[i] == "<" else -1.0

    # Nonbasic start at the finite bound nearest zero.
    x = np.zeros(total)
    status = np.full(total, FREE, dtype=int)
    for j in range(n + n_slack):
        if np.isfinite(lo[j]):
            x[j], status[j] = lo[j], AT_LB
        elif np.isfinite(hi[j]):
            x[j], status[j] = hi[j], AT_UB

    resid = b - Af[:, : n + n_slack] @ x[: n + n_slack]
    art0 = n + n_slack
    for i in range(m):
        j = art0 + i
        Af[i, j] = 1.0 if resid[i] >= 0 else -1.0
        x[j] = abs(resid[i])
        status[j] = BASIC
    basis = list(range(art0, art0 + m))

    phase1_cost = np.zeros(total)
    phase1_cost[art0:] = 1.0
    state = _State(Af, b, lo, hi, x, status, basis, tol)

    iters1, st = _iterate(state, phase1_cost, iteration_limit)
    if st == "iteration-limit":
        return SimplexOutcome("iteration-limit", x[:n].copy(), np.zeros(m), float("nan"), iters1)
    state.recompute_basics()
    scale = 1.0 + float(np.abs(b).sum())
    if phase1_cost @ state.x > 1e-7 * scale:
        return SimplexOutcome("infeasible", x[:n].copy(), np.zeros(m), float("nan"), iters1)

    # Pin artificials to zero for phase 2.
    state.hi[art0:] = 0.0
    for j in range(art0, art0 + m):
        if state.status[j] != BASIC:
            state.status[j] = AT_LB
            state.x[j] = 0.0

    phase2_cost = np.concatenate([c, np.zeros(n_slack + m)])
    iters2, st = _iterate(state, phase2_cost, iteration_limit - iters1)
    iterations = iters1 + iters2
    state.recompute_basics()
    xs = state.x[:n].copy()
    if st == "unbounded":
        return SimplexOutcome("unbounded", xs, np.zeros(m), float("-inf"), iterations)
    if st == "iteration-limit":
        return SimplexOutcome("iteration-limit", xs, np.zeros(m), float(c @ xs), iterations)
    y = state.duals(phase2_cost)
    return SimplexOutcome("optimal", xs, y, float(c @ xs), iterations)


class _State:
    def __init__(self, A, b, lo, hi, x, status, basis, tol):
        self.A = A
        self.b = b
        self.lo = lo
        self.hi = hi
        self.x = x
        self.status = status
        self.basis = basis
        self.tol = tol
        self._factor = None

    def refactor(self):
        B = self.A[:, self.basis]
        self._factor = la.lu_factor(B)

    def btran(self, v):
        return la.lu_solve(self._factor, v, trans=1)

    def ftran(self, v):
        return la.lu_solve(self._factor, v)

    def duals(self, cost):
        self.refactor()
        return self.btran(cost[self.basis])

    def recompute_basics(self):
        """Re-solve basic values against the exact RHS to shed drift."""
        nonbasic = np.ones(self.A.shape[1], dtype=bool)
        nonbasic[self.basis] = False
        rhs = self.b - self.A[:, nonbasic] @ self.x[nonbasic]
        self.refactor()
        self.x[self.basis] = self.ftran(rhs)


def _iterate(state: _State, cost: np.ndarray, max_iters: int) -> tuple[int, str]:
    A, lo, hi, x, status = state.A, state.lo, state.hi, state.x, state.status
    tol = state.tol
    m = A.shape[0]
    degen_streak = 0
    iters = 0

    while True:
        if iters >= max_iters:
            return iters, "iteration-limit"
        state.refactor()
        y = state.btran(cost[state.basis])
        d = cost - y @ A  # reduced costs

        use_bland = degen_streak > _DEGENERACY_STREAK_LIMIT
        entering, direction = _select_entering(d, status, tol, use_bland)
        if entering is None:
            return iters, "optimal"

        w = state.ftran(A[:, entering])
        # Basic variable i changes at rate -direction * w[i] per unit step.
        best_limit = np.inf
        leaving_pos = -1
        hits_lower = True
        for pos in range(m):
            jb = state.basis[pos]
            rate = direction * w[pos]
            if rate > tol:
                limit = (x[jb] - lo[jb]) / rate
                hit_low = True
            elif rate < -tol:
                limit = (x[jb] - hi[jb]) / rate
                hit_low = False
            else:
                continue
            limit = max(limit, 0.0)
            if limit < best_limit - tol or (
                limit < best_limit + tol
                and (leaving_pos < 0 or jb < state.basis[leaving_pos])
            ):
                best_limit = limit
                leaving_pos = pos
                hits_lower = hit_low

        own_range = hi[entering] - lo[entering]
        bound_flip = np.isfinite(own_range) and own_range < best_limit - tol
        if bound_flip:
            step = own_range
        elif leaving_pos < 0:
            return iters, "unbounded"
        else:
            step = best_limit

        x[entering] += direction * step
        for pos in range(m):
            x[state.basis[pos]] -= direction * step * w[pos]

        if bound_flip:
            status[entering] = AT_UB if status[entering] == AT_LB else AT_LB
        else:
            jb = state.basis[leaving_pos]
            if lo[jb] == hi[jb] or hits_lower:
                status[jb] = AT_LB
                x[jb] = lo[jb]
            else:
                status[jb] = AT_UB
                x[jb] = hi[jb]
            state.basis[leaving_pos] = entering
            status[entering] = BASIC

        degen_streak = degen_streak + 1 if step <= tol else 0
        iters += 1


def _select_entering(
    d: np.ndarray, status: np.ndarray, tol: float, bland: bool
) -> tuple[int | None, float]:
    eligible_lb = (status == AT_LB) & (d < -tol)
    eligible_ub = (status == AT_UB) & (d > tol)
    eligible_fr = (status == FREE) & (np.abs(d) > tol)
    eligible = eligible_lb | eligible_ub | eligible_fr
    idx = np.nonzero(eligible)[0]
    if idx.size == 0:
        return None, 0.0
    if bland:
        j = int(idx[0])
    else:
        j = int(idx[np.argmax(np.abs(d[idx]))])
    direction = 1.0 if d[j] < 0 else -1.0
    return j, direction
