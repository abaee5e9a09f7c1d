"""Dense two-phase primal simplex for small rate-allocation LPs.

Solves max c.x subject to A x <= b, x >= 0. Bland's smallest-index rule
guards against cycling on the (frequently degenerate) coupling rows. The
instances here have few variables but can stack many constraint rows, so
the value-only fast path solves the dual instead, whose tableau has only
as many rows as the primal has variables.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - slow fallback, same semantics
    njit = None


class SimplexError(RuntimeError):
    """Solver failure with diagnostics; not raised on well-posed instances."""


def _pivot_core(tab, basis, n_rows, tol, max_iters):
    """Bland-rule pivots in place; 0 = optimal, 1 = unbounded, 2 = no
    convergence. Plain loops so the JIT can compile them; the numpy fallback
    below is semantically identical."""
    height, width = tab.shape
    obj = height - 1
    for _ in range(max_iters):
        entering = -1
        for j in range(width - 1):
            if tab[obj, j] < -tol:
                entering = j
                break
        if entering < 0:
            return 0

        best_ratio = np.inf
        for i in range(n_rows):
            coeff = tab[i, entering]
            if coeff > tol:
                ratio = tab[i, width - 1] / coeff
                if ratio < best_ratio:
                    best_ratio = ratio
        if best_ratio == np.inf:
            return 1
        leaving = -1
        smallest = -1
        for i in range(n_rows):
            coeff = tab[i, entering]
            if coeff > tol and tab[i, width - 1] / coeff <= best_ratio + tol:
                if leaving < 0 or basis[i] < smallest:
                    leaving = i
                    smallest = basis[i]

        pivot = tab[leaving, entering]
        for j in range(width):
            tab[leaving, j] /= pivot
        for i in range(height):
            if i != leaving:
                factor = tab[i, entering]
                if factor != 0.0:
                    for j in range(width):
                        tab[i, j] -= factor * tab[leaving, j]
        basis[leaving] = entering
    return 2


if njit is not None:
    _pivot_core = njit(cache=True)(_pivot_core)


def _pivot_loop(tab: np.ndarray, basis: np.ndarray, n_rows: int, tol: float, max_iters: int) -> None:
    status = _pivot_core(tab, basis, n_rows, tol, max_iters)
    if status == 1:
        raise SimplexError(
            "unbounded direction; the instance is missing a bounding constraint"
        )
    if status == 2:
        raise SimplexError(f"no convergence after {max_iters} pivots")


def solve_max_lp(
    a: np.ndarray,
    b: np.ndarray,
    c: np.ndarray,
    tol: float = 1e-9,
    max_iters: int = 50000,
) -> tuple[float, np.ndarray]:
    """Maximize c.x over A x <= b, x >= 0.

    Returns (optimal value, optimal x). Deterministic: Bland's rule picks
    the smallest eligible entering index and leaving basis variable. Rows
    with negative right-hand side trigger a phase-1 with artificials.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    m, n = a.shape
    if b.shape != (m,) or c.shape != (n,):
        raise ValueError("inconsistent LP dimensions")

    neg = b < 0
    n_art = int(neg.sum())
    width = n + m + n_art + 1
    tab = np.zeros((m + 1, width))
    tab[:m, :n] = a
    tab[:m, n : n + m] = np.eye(m)
    tab[:m, -1] = b
    basis = np.arange(n, n + m)
    if n_art:
        # Flip infeasible rows; their slacks leave the basis for artificials.
        rows = np.flatnonzero(neg)
        tab[rows] *= -1.0
        art_cols = n + m + np.arange(n_art)
        tab[rows, art_cols] = 1.0
        basis[rows] = art_cols
        # Phase 1: drive the artificials to zero.
        tab[-1, art_cols] = 1.0
        tab[-1] -= tab[rows].sum(axis=0)
        _pivot_loop(tab, basis, m, tol, max_iters)
        if tab[-1, -1] < -1e-7:
            raise SimplexError(f"infeasible instance (phase-1 gap {-tab[-1, -1]:.3e})")
        if np.any(np.isin(basis, art_cols)):
            # Degenerate zero-level artificials: pivot them out if possible,
            # else their rows are redundant and harmless.
            for i in np.flatnonzero(np.isin(basis, art_cols)):
                row = tab[i, : n + m]
                cand = np.flatnonzero(np.abs(row) > tol)
                if cand.size:
                    j = int(cand[0])
                    pivot_row = tab[i] / tab[i, j]
                    factors = tab[:, j].copy()
                    factors[i] = 0.0
                    tab -= np.outer(factors, pivot_row)
                    tab[i] = pivot_row
                    basis[i] = j
        tab[:, art_cols] = 0.0

    # Phase 2 objective in reduced-cost form for the current basis.
    tab[-1, :] = 0.0
    tab[-1, :n] = -c
    for i in range(m):
        coeff = tab[-1, basis[i]]
        if coeff != 0.0:
            tab[-1] -= coeff * tab[i]
    _pivot_loop(tab, basis, m, tol, max_iters)

    x = np.zeros(width - 1)
    x[basis] = tab[:m, -1]
    x_vars = x[:n]

    residual = a @ x_vars - b
    if residual.max(initial=0.0) > 1e-7 or x_vars.min(initial=0.0) < -1e-9:
        raise SimplexError(f"infeasible solution returned, residual {residual.max():.3e}")
    return float(c @ x_vars), x_vars


def _max_min_arrays(
    coeff_rows: np.ndarray, rhs: np.ndarray, groups: list[list[int]]
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    coeff_rows = np.asarray(coeff_rows, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    m, n = coeff_rows.shape
    a = np.zeros((m + len(groups), n + 1))
    b = np.zeros(m + len(groups))
    a[:m, :n] = coeff_rows
    b[:m] = rhs
    for gi, group in enumerate(groups):
        for v in group:
            a[m + gi, v] = -1.0
        a[m + gi, n] = 1.0
    c = np.zeros(n + 1)
    c[n] = 1.0
    return a, b, c


def solve_max_min_rate(
    coeff_rows: np.ndarray,
    rhs: np.ndarray,
    groups: list[list[int]],
    tol: float = 1e-9,
) -> tuple[float, np.ndarray]:
    """Maximize the minimum per-group rate sum inside a rate polytope.

    coeff_rows (m, n) and rhs (m,) describe the region over n nonnegative
    rate variables; each entry of ``groups`` lists the variables whose sum
    must reach the common floor t. Returns (t, rates).
    """
    a, b, c = _max_min_arrays(coeff_rows, rhs, groups)
    value, x = solve_max_lp(a, b, c, tol=tol)
    return value, x[:-1]


def max_min_rate_value(
    coeff_rows: np.ndarray,
    rhs: np.ndarray,
    groups: list[list[int]],
    tol: float = 1e-9,
) -> tuple[float, np.ndarray]:
    """Optimal value of :func:`solve_max_min_rate` and the dual prices of
    the region rows, via the dual LP.

    The dual tableau has one row per primal variable, so for the typical
    many-rows/few-variables instance it is much cheaper than the primal.
    The returned prices certify the value: rows with zero price can be
    replaced by anything without increasing the optimum.
    """
    a, b, c = _max_min_arrays(coeff_rows, rhs, groups)
    # Dual of max c.x, Ax <= b, x >= 0: min b.y, A^T y >= c, y >= 0,
    # recast as max -b.y with -A^T y <= -c.
    value, prices = solve_max_lp(-a.T, -c, -b, tol=tol)
    return -value, prices[: coeff_rows.shape[0]]
