"""Dense two-phase simplex for the small boxed LPs of the decoy estimation.

Problems are ``min c.x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq`` and
``0 <= x <= upper``. Box bounds become explicit rows, every row gets an
artificial variable for phase one, and pivoting follows Bland's rule so the
method cannot cycle.
"""
from dataclasses import dataclass, field

import numpy as np

from . import kernels

FEAS_TOL = 1e-9
PIVOT_TOL = 1e-12


class LpError(ArithmeticError):
    pass


class InfeasibleError(LpError):
    """No point satisfies the constraints; ``residual`` is the phase-one optimum."""

    def __init__(self, msg, residual):
        super().__init__(msg)
        self.residual = residual


class UnboundedError(LpError):
    pass


@dataclass
class LpProblem:
    c: np.ndarray
    A_ub: np.ndarray = None
    b_ub: np.ndarray = None
    A_eq: np.ndarray = None
    b_eq: np.ndarray = None
    upper: np.ndarray = None

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        n = self.c.size
        self.A_ub = np.zeros((0, n)) if self.A_ub is None else np.atleast_2d(np.asarray(self.A_ub, dtype=float))
        self.b_ub = np.zeros(0) if self.b_ub is None else np.asarray(self.b_ub, dtype=float).ravel()
        self.A_eq = np.zeros((0, n)) if self.A_eq is None else np.atleast_2d(np.asarray(self.A_eq, dtype=float))
        self.b_eq = np.zeros(0) if self.b_eq is None else np.asarray(self.b_eq, dtype=float).ravel()
        self.upper = np.ones(n) if self.upper is None else np.asarray(self.upper, dtype=float).ravel()
        for name in ("A_ub", "b_ub", "A_eq", "b_eq", "upper"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"{name} has non-finite entries")
        if self.A_ub.shape != (self.b_ub.size, n) or self.A_eq.shape != (self.b_eq.size, n):
            raise ValueError("constraint matrix shapes do not match")
        if self.upper.size != n or np.any(self.upper < 0):
            raise ValueError("upper bounds must be non-negative, one per variable")

    @property
    def n(self):
        return self.c.size


@dataclass
class LpResult:
    value: float
    x: np.ndarray
    iterations: int = 0
    info: dict = field(default_factory=dict)


def _pivot(T, basis, max_iter):
    status, it = kernels.simplex_pivot_loop(T, basis, PIVOT_TOL, max_iter)
    if status == kernels.UNBOUNDED:
        raise UnboundedError("objective unbounded below")
    if status == kernels.ITERATION_LIMIT:
        raise LpError(f"simplex iteration limit {max_iter} reached")
    return it


def lp_solve(problem, max_iter=10_000):
    """Minimise ``problem.c @ x``; raises :class:`InfeasibleError` when no feasible point exists."""
    n = problem.n
    A_box = np.eye(n)
    rows = [problem.A_ub, A_box, problem.A_eq]
    rhs = np.concatenate([problem.b_ub, problem.upper, problem.b_eq])
    A = np.vstack(rows)
    m_ineq = problem.b_ub.size + n
    m = A.shape[0]

    # columns: x (n) | slacks (m_ineq) | artificials (m) | rhs
    n_cols = n + m_ineq + m
    T = np.zeros((m + 1, n_cols + 1))
    T[:m, :n] = A
    T[np.arange(m_ineq), n + np.arange(m_ineq)] = 1.0
    T[:m, -1] = rhs
    neg = rhs < 0
    T[:m][neg] *= -1
    art0 = n + m_ineq
    T[np.arange(m), art0 + np.arange(m)] = 1.0
    basis = np.arange(art0, art0 + m, dtype=np.int64)

    # phase one: minimise the sum of artificials
    T[m, :] = 0.0
    T[m, art0:n_cols] = 1.0
    T[m] -= T[:m].sum(axis=0)
    it = _pivot(T, basis, max_iter)
    residual = -T[m, -1]
    scale = max(1.0, float(np.abs(rhs).max(initial=0.0)))
    if residual > FEAS_TOL * scale:
        raise InfeasibleError(f"infeasible LP (phase-one residual {residual:.3e})", residual)

    # drive remaining artificials out of the basis where possible
    for i in range(m):
        if basis[i] >= art0:
            cand = np.flatnonzero(np.abs(T[i, :art0]) > 1e-9)
            if cand.size:
                j = cand[0]
                T[i] /= T[i, j]
                f = T[:, j].copy()
                f[i] = 0.0
                T -= np.outer(f, T[i])
                basis[i] = j

    # phase two on the original objective, artificial columns frozen out
    T2 = np.delete(T, np.s_[art0:n_cols], axis=1)
    keep = basis < art0
    T2 = np.vstack([T2[:m][keep], T2[m:]])
    basis = basis[keep].copy()
    mm = basis.size
    T2[mm, :] = 0.0
    T2[mm, :n] = problem.c
    for i in range(mm):
        j = basis[i]
        if T2[mm, j] != 0.0:
            T2[mm] -= T2[mm, j] * T2[i]
    it += _pivot(T2, basis, max_iter)

    x = np.zeros(n + m_ineq)
    x[basis] = T2[:mm, -1]
    x = np.clip(x[:n], 0.0, problem.upper)
    return LpResult(value=float(problem.c @ x), x=x, iterations=it, info={"phase1_residual": residual})


def variable_range(problem, index, max_iter=10_000):
    """Minimum and maximum of ``x[index]`` over the feasible set of ``problem``."""
    c = np.zeros(problem.n)
    c[index] = 1.0
    lo = lp_solve(LpProblem(c, problem.A_ub, problem.b_ub, problem.A_eq, problem.b_eq, problem.upper), max_iter)
    hi = lp_solve(LpProblem(-c, problem.A_ub, problem.b_ub, problem.A_eq, problem.b_eq, problem.upper), max_iter)
    return lo.value, -hi.value
