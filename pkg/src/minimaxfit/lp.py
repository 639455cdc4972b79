"""Self-contained dense linear programming: two-phase simplex with Bland's rule.

The LPs in this package are small (at most a few hundred variables), so a
dense tableau with anti-cycling pivoting is the robust choice.  One
implementation serves two arithmetic modes: float64 with a 1e-9 tolerance on
reduced costs and row residuals, and exact rationals (``Fraction``) with
zero tolerance, used when certificate verdicts must be trusted near
degeneracy.

Infeasible solves always carry a Farkas witness so callers can turn "no
certificate" into an explicit separating functional.  The witness lives in
the standardised row space: original rows first, then one row per two-sided
variable bound; ``verify_farkas`` checks it against that encoding.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .monomials import Number

LESS, EQUAL, GREATER = "<=", "==", ">="
_RELATIONS = (LESS, EQUAL, GREATER)

_TOL = 1e-9
_MAX_ITER = 50_000


class LpFailure(RuntimeError):
    """Numerical failure inside the solver; diagnostics attached."""

    def __init__(self, message: str, diagnostics: Optional[dict] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class LinearProgram:
    """minimise c.x subject to rows (coeffs, relation, rhs) and variable bounds.

    Bounds default to free variables; relations are "<=", "==" or ">=".
    """

    def __init__(
        self,
        objective: Sequence[Number],
        rows: Sequence[tuple[Sequence[Number], str, Number]],
        bounds: Optional[Sequence[tuple[Optional[Number], Optional[Number]]]] = None,
    ):
        self.objective = tuple(objective)
        n = len(self.objective)
        checked = []
        for k, (coeffs, rel, rhs) in enumerate(rows):
            coeffs = tuple(coeffs)
            if len(coeffs) != n:
                raise ValueError(f"row {k} has width {len(coeffs)}, expected {n}")
            if rel not in _RELATIONS:
                raise ValueError(f"row {k} has unknown relation {rel!r}")
            checked.append((coeffs, rel, rhs))
        self.rows = tuple(checked)
        if bounds is None:
            bounds = ((None, None),) * n
        bounds = tuple((lo, hi) for lo, hi in bounds)
        if len(bounds) != n:
            raise ValueError(f"{len(bounds)} bounds for {n} variables")
        self.bounds = bounds

    @property
    def num_vars(self) -> int:
        return len(self.objective)

    @property
    def num_rows(self) -> int:
        return len(self.rows)


@dataclass
class LpSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: Optional[list[Number]] = None
    objective_value: Optional[Number] = None
    farkas: Optional[list[Number]] = None
    iterations: int = 0


def solve(lp: LinearProgram, tol: float = _TOL, max_iter: int = _MAX_ITER) -> LpSolution:
    """Two-phase simplex in float64.  Deterministic (Bland's rule)."""
    return _solve(lp, exact=False, tol=tol, max_iter=max_iter)


def solve_exact(lp: LinearProgram, max_iter: int = _MAX_ITER) -> LpSolution:
    """Two-phase simplex over exact rationals; status decisions carry no tolerance."""
    return _solve(lp, exact=True, tol=0.0, max_iter=max_iter)


# --- standardisation -------------------------------------------------------
#
# Each original variable becomes one or two non-negative columns plus an
# offset: x = off + sum(sign * u).  Two-sided bounds append a "u <= hi - lo"
# row after the original rows.


def _substitute(lp: LinearProgram, conv):
    col_terms: list[list[tuple[int, int]]] = []  # per variable: [(column, sign)]
    offsets: list[Number] = []
    bound_rows: list[tuple[int, Number]] = []  # (column, upper bound on that column)
    ncols = 0
    for lo, hi in lp.bounds:
        if lo is not None:
            lo = conv(lo)
        if hi is not None:
            hi = conv(hi)
        if lo is not None:
            col_terms.append([(ncols, 1)])
            offsets.append(lo)
            if hi is not None:
                bound_rows.append((ncols, hi - lo))
            ncols += 1
        elif hi is not None:
            col_terms.append([(ncols, -1)])
            offsets.append(hi)
            ncols += 1
        else:
            col_terms.append([(ncols, 1), (ncols + 1, -1)])
            offsets.append(conv(0))
            ncols += 2

    zero = conv(0)
    sub_rows: list[tuple[list[Number], str, Number]] = []
    for coeffs, rel, rhs in lp.rows:
        row = [zero] * ncols
        shift = conv(0)
        for j, a in enumerate(coeffs):
            a = conv(a)
            if a == 0:
                continue
            shift += a * offsets[j]
            for col, sign in col_terms[j]:
                row[col] += a if sign > 0 else -a
        sub_rows.append((row, rel, conv(rhs) - shift))
    for col, ub in bound_rows:
        row = [zero] * ncols
        row[col] = conv(1)
        sub_rows.append((row, LESS, ub))
    return col_terms, offsets, ncols, sub_rows


def _solve(lp: LinearProgram, exact: bool, tol: float, max_iter: int) -> LpSolution:
    conv = Fraction if exact else float
    dtype = object if exact else float
    col_terms, offsets, nstruct, sub_rows = _substitute(lp, conv)

    m = len(sub_rows)
    nslack = sum(1 for _, rel, _ in sub_rows if rel != EQUAL)
    ncols = nstruct + nslack + m + 1  # structural, slack, artificial, rhs
    art0 = nstruct + nslack

    T = np.zeros((m, ncols), dtype=dtype)
    if exact:
        T[:, :] = Fraction(0)
    factors: list[Number] = []  # std row = factor * substituted row (Farkas mapping)
    slack_at = 0
    for i, (row, rel, rhs) in enumerate(sub_rows):
        for j, a in enumerate(row):
            T[i, j] = a
        if rel == LESS:
            T[i, nstruct + slack_at] = conv(1)
            slack_at += 1
        elif rel == GREATER:
            T[i, nstruct + slack_at] = conv(-1)
            slack_at += 1
        T[i, -1] = rhs

        factor = conv(1)
        if not exact:
            scale = max(1.0, max(abs(v) for v in T[i, : ncols - 1]), abs(T[i, -1]))
            if scale > 1.0:
                T[i, :] = T[i, :] / scale
                factor = factor / scale
        if T[i, -1] < 0:
            T[i, :] = -T[i, :]
            factor = -factor
        factors.append(factor)
        T[i, art0 + i] = conv(1)

    basis = [art0 + i for i in range(m)]
    artificial = set(range(art0, art0 + m))

    # phase 1: minimise the sum of artificials
    costs1 = np.zeros(ncols - 1, dtype=dtype)
    if exact:
        costs1[:] = Fraction(0)
    for j in artificial:
        costs1[j] = conv(1)
    obj, status, it1 = _simplex(T, basis, costs1, barred=frozenset(), tol=tol, max_iter=max_iter, phase=1)
    if status != "optimal":
        raise LpFailure("phase-1 simplex did not terminate", {"status": status, "iterations": it1})
    infeas = sum(T[i, -1] for i in range(m) if basis[i] in artificial)
    if infeas > (0 if exact else tol):
        farkas = [(conv(1) - obj[art0 + i]) * factors[i] for i in range(m)]
        if not exact:
            farkas = [float(v) for v in farkas]
        return LpSolution("infeasible", farkas=farkas, iterations=it1)

    # drive artificials out of the basis; remove rows that turn out redundant
    drop_rows = []
    for i in range(m):
        if basis[i] not in artificial:
            continue
        pivot_col = None
        for j in range(art0):
            entry = T[i, j]
            if (entry != 0) if exact else (abs(entry) > tol):
                pivot_col = j
                break
        if pivot_col is None:
            drop_rows.append(i)
        else:
            _pivot(T, i, pivot_col)
            basis[i] = pivot_col
    if drop_rows:
        T = np.delete(T, drop_rows, axis=0)
        basis = [b for i, b in enumerate(basis) if i not in set(drop_rows)]

    # phase 2: the real objective over structural columns
    costs2 = np.zeros(ncols - 1, dtype=dtype)
    if exact:
        costs2[:] = Fraction(0)
    for j, c in enumerate(lp.objective):
        c = conv(c)
        if c == 0:
            continue
        for col, sign in col_terms[j]:
            costs2[col] += c if sign > 0 else -c
    obj, status, it2 = _simplex(
        T, basis, costs2, barred=frozenset(artificial), tol=tol, max_iter=max_iter, phase=2
    )
    if status == "unbounded":
        return LpSolution("unbounded", iterations=it1 + it2)
    if status != "optimal":
        raise LpFailure("phase-2 simplex did not terminate", {"status": status, "iterations": it2})

    x_std = [conv(0)] * (ncols - 1)
    for i, b in enumerate(basis):
        x_std[b] = T[i, -1]
    x = []
    for j in range(lp.num_vars):
        v = offsets[j]
        for col, sign in col_terms[j]:
            v = v + (x_std[col] if sign > 0 else -x_std[col])
        x.append(v if exact else float(v))
    value = sum(conv(c) * xj for c, xj in zip(lp.objective, x))
    if not exact:
        value = float(value)

    _check_rows(lp, x, conv, exact, iterations=it1 + it2)
    return LpSolution("optimal", x=x, objective_value=value, iterations=it1 + it2)


def _check_rows(lp: LinearProgram, x, conv, exact: bool, iterations: int):
    # defensive residual check; the 1e-9 contract itself is asserted in tests
    for k, (coeffs, rel, rhs) in enumerate(lp.rows):
        lhs = sum(conv(a) * xj for a, xj in zip(coeffs, x))
        resid = lhs - conv(rhs)
        scale = max(1.0, max((abs(float(a)) for a in coeffs), default=0.0), abs(float(rhs)))
        slack = 0 if exact else 1e-7 * scale
        bad = (
            (rel == EQUAL and abs(resid) > slack)
            or (rel == LESS and resid > slack)
            or (rel == GREATER and resid < -slack)
        )
        if bad:
            raise LpFailure(
                f"optimal point violates row {k} by {float(resid):.3e}",
                {"row": k, "residual": float(resid), "iterations": iterations},
            )


def _pivot(T: np.ndarray, row: int, col: int):
    T[row, :] = T[row, :] / T[row, col]
    column = T[:, col].copy()
    column[row] = 0 * column[row]
    T -= np.outer(column, T[row, :])


def _simplex(T, basis, costs, barred, tol, max_iter, phase):
    """Minimise costs.x from the current basic feasible point.  Bland's rule."""
    m, ncols = T.shape
    exact = T.dtype == object
    obj = costs.copy()
    for i in range(m):
        cb = costs[basis[i]]
        if cb != 0:
            obj = obj - cb * T[i, : ncols - 1]

    it = 0
    while True:
        entering = None
        for j in range(ncols - 1):
            if j in barred:
                continue
            v = obj[j]
            if (v < 0) if exact else (v < -tol):
                entering = j
                break
        if entering is None:
            return obj, "optimal", it

        best_ratio = None
        leaving = None
        for i in range(m):
            a = T[i, entering]
            positive = (a > 0) if exact else (a > tol)
            if not positive:
                continue
            ratio = T[i, -1] / a
            if best_ratio is None:
                best_ratio, leaving = ratio, i
                continue
            if exact:
                if ratio < best_ratio or (ratio == best_ratio and basis[i] < basis[leaving]):
                    best_ratio, leaving = ratio, i
            else:
                near = abs(ratio - best_ratio) <= tol * max(1.0, abs(best_ratio))
                if ratio < best_ratio - tol * max(1.0, abs(best_ratio)):
                    best_ratio, leaving = ratio, i
                elif near and basis[i] < basis[leaving]:
                    leaving = i
        if leaving is None:
            return obj, "unbounded", it

        _pivot(T, leaving, entering)
        basis[leaving] = entering
        red = obj[entering]
        if red != 0:
            obj = obj - red * T[leaving, : ncols - 1]

        it += 1
        if it > max_iter:
            raise LpFailure(
                f"simplex exceeded {max_iter} iterations in phase {phase}",
                {"phase": phase, "iterations": it, "rows": m, "cols": ncols - 1},
            )


def verify_farkas(lp: LinearProgram, farkas: Sequence[Number], exact: bool = False, tol: float = _TOL) -> bool:
    """Check an infeasibility witness against the standardised encoding.

    The witness `y` must combine the substituted rows (original rows first,
    then the two-sided-bound rows) into a contradiction over non-negative
    columns: y.A <= 0 componentwise, y(<= rows) <= 0, y(>= rows) >= 0, and
    y.b > 0.
    """
    conv = Fraction if exact else float
    _, _, ncols, sub_rows = _substitute(lp, conv)
    if len(farkas) != len(sub_rows):
        return False
    y = [conv(v) for v in farkas]
    slack = 0 if exact else tol
    for j in range(ncols):
        combo = sum(yi * row[j] for yi, (row, _, _) in zip(y, sub_rows))
        if combo > slack:
            return False
    for yi, (_, rel, _) in zip(y, sub_rows):
        if rel == LESS and yi > slack:
            return False
        if rel == GREATER and yi < -slack:
            return False
    total = sum(yi * rhs for yi, (_, _, rhs) in zip(y, sub_rows))
    return total > (0 if exact else tol)
