"""Exact rational simplex for the LP relaxations.

The engine is a dense two-phase tableau simplex over fractions with Bland's
anti-cycling pivot rule, so runs are deterministic and exact.  The standard
form relaxation drops the residue (group) constraint entirely; the
canonical relaxation drops integrality.  Canonical solutions are pushed to
a vertex of the optimal face by exact lexicographic cleanup, and the tight
base rows are reported.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .intlinalg import IntMat, rank
from .model import (
    CanonicalInstance,
    StandardInstance,
    is_finite,
)

Vec = tuple[Fraction, ...]


@dataclass(frozen=True)
class LpOutcome:
    status: str  # optimal | infeasible | unbounded
    vertex: Vec | None = None
    base: tuple[int, ...] | None = None
    objective: Fraction | None = None


def _pivot(tab: list[list[Fraction]], basis: list[int], row: int, col: int) -> None:
    piv = tab[row][col]
    tab[row] = [v / piv for v in tab[row]]
    for i, r in enumerate(tab):
        if i != row and r[col] != 0:
            f = r[col]
            tab[i] = [a - f * b for a, b in zip(r, tab[row])]
    basis[row] = col


def _run_simplex(
    tab: list[list[Fraction]], basis: list[int], ncols: int, allowed: int
) -> str:
    """Maximize the objective in the last tableau row over columns
    0..allowed-1; returns 'optimal' or 'unbounded'."""
    obj = len(tab) - 1
    while True:
        col = next(
            (j for j in range(allowed) if tab[obj][j] > 0), None
        )  # Bland: smallest improving index
        if col is None:
            return "optimal"
        best = None
        for i in range(obj):
            if tab[i][col] > 0:
                ratio = tab[i][ncols] / tab[i][col]
                if best is None or ratio < best[0] or (
                    ratio == best[0] and basis[i] < basis[best[1]]
                ):
                    best = (ratio, i)
        if best is None:
            return "unbounded"
        _pivot(tab, basis, best[1], col)


def solve_ineq_lp(
    c: Sequence[Fraction], D: Sequence[Sequence[Fraction]], d: Sequence[Fraction]
) -> LpOutcome:
    """max c'y  s.t.  D y <= d,  y >= 0, exactly.

    Returns a basic optimal solution (a vertex of the feasible region of the
    slack-extended system).
    """
    m = len(D)
    n = len(c)
    # equality system [D I] (x, s) = d with artificial variables where the
    # right side is negative after slack insertion
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for i in range(m):
        row = [Fraction(v) for v in D[i]] + [
            Fraction(1) if j == i else Fraction(0) for j in range(m)
        ]
        r = Fraction(d[i])
        if r < 0:
            row = [-v for v in row]
            r = -r
        rows.append(row)
        rhs.append(r)
    total = n + m
    # phase 1: artificial variable per row
    tab = []
    for i in range(m):
        tab.append(
            rows[i]
            + [Fraction(1) if j == i else Fraction(0) for j in range(m)]
            + [rhs[i]]
        )
    basis = [total + i for i in range(m)]
    ncols = total + m
    # phase-1 objective: maximize -sum(artificials) expressed in non-basic terms
    objrow = [Fraction(0)] * (ncols + 1)
    for i in range(m):
        for j in range(ncols + 1):
            objrow[j] += tab[i][j]
    for i in range(m):
        objrow[total + i] = Fraction(0)
    tab.append(objrow)
    _run_simplex(tab, basis, ncols, allowed=total)
    if tab[-1][ncols] != 0:
        return LpOutcome(status="infeasible")
    # drive remaining artificials out of the basis
    for i in range(m):
        if basis[i] >= total:
            col = next((j for j in range(total) if tab[i][j] != 0), None)
            if col is not None:
                _pivot(tab, basis, i, col)
    # phase 2
    obj = [Fraction(v) for v in c] + [Fraction(0)] * (m + m) + [Fraction(0)]
    for i in range(m):
        if basis[i] < total and obj[basis[i]] != 0:
            f = obj[basis[i]]
            obj = [a - f * b for a, b in zip(obj, tab[i])]
    tab[-1] = obj
    status = _run_simplex(tab, basis, ncols, allowed=total)
    if status == "unbounded":
        return LpOutcome(status="unbounded")
    y = [Fraction(0)] * total
    for i in range(m):
        if basis[i] < total:
            y[basis[i]] = tab[i][ncols]
    value = sum(Fraction(ci) * yi for ci, yi in zip(c, y[:n]))
    return LpOutcome(status="optimal", vertex=tuple(y[:n]), objective=value)


def _canonical_rows(
    instance: CanonicalInstance,
) -> tuple[list[list[Fraction]], list[Fraction]]:
    """The relaxation b_l <= A x <= b_r as D x <= d over free x."""
    D: list[list[Fraction]] = []
    d: list[Fraction] = []
    for i in range(instance.A.rows):
        row = [Fraction(v) for v in instance.A.row(i)]
        D.append(row)
        d.append(Fraction(instance.b_r[i]))
        if is_finite(instance.b_l[i]):
            D.append([-v for v in row])
            d.append(Fraction(-instance.b_l[i]))
    return D, d


def _free_lp(
    c: Sequence[Fraction], D: list[list[Fraction]], d: list[Fraction]
) -> LpOutcome:
    """max c'x  s.t.  D x <= d with x free, via the x = x+ - x- split."""
    n = len(c)
    c2 = [Fraction(v) for v in c] + [-Fraction(v) for v in c]
    D2 = [row + [-v for v in row] for row in D]
    out = solve_ineq_lp(c2, D2, d)
    if out.status != "optimal":
        return out
    x = tuple(out.vertex[i] - out.vertex[n + i] for i in range(n))
    return LpOutcome(status="optimal", vertex=x, objective=out.objective)


def solve_lp(instance: CanonicalInstance | StandardInstance) -> LpOutcome:
    """Exact optimum of the LP relaxation.

    Canonical instances: max c'x over b_l <= Ax <= b_r; the result is a
    vertex of the optimal face (found by lexicographic cleanup) and the
    reported base is the lexicographically first full-rank set of tight
    rows.  Standard instances: min c'x over Ax = b, 0 <= x <= u with the
    residue constraint dropped; the basic solution returned is a vertex.
    """
    if isinstance(instance, CanonicalInstance):
        D, d = _canonical_rows(instance)
        n = instance.n
        out = _free_lp([Fraction(v) for v in instance.c], D, d)
        if out.status != "optimal":
            return out
        value = out.objective
        # lexicographic cleanup: walk to a vertex of the optimal face
        D = D + [[-Fraction(v) for v in instance.c]]
        d = d + [-value]
        x = out.vertex
        for k in range(n):
            ek = [Fraction(1) if j == k else Fraction(0) for j in range(n)]
            sub = _free_lp(ek, D, d)
            assert sub.status == "optimal"
            xk = sub.objective
            D.append(ek)
            d.append(xk)
            D.append([-v for v in ek])
            d.append(-xk)
            x = sub.vertex
        ax = [
            sum(Fraction(instance.A.entries[i][j]) * x[j] for j in range(n))
            for i in range(instance.A.rows)
        ]
        tight = [
            i
            for i in range(instance.A.rows)
            if ax[i] == instance.b_r[i]
            or (is_finite(instance.b_l[i]) and ax[i] == instance.b_l[i])
        ]
        base: list[int] = []
        for i in tight:
            if rank(instance.A.take_rows(base + [i])) == len(base) + 1:
                base.append(i)
            if len(base) == n:
                break
        assert len(base) == n, "optimal LP solution is not a vertex"
        return LpOutcome(
            status="optimal", vertex=tuple(x), base=tuple(base), objective=value
        )

    if isinstance(instance, StandardInstance):
        n = instance.n
        D: list[list[Fraction]] = []
        d: list[Fraction] = []
        if instance.A is not None:
            for i in range(instance.m):
                row = [Fraction(v) for v in instance.A.row(i)]
                D.append(row)
                d.append(Fraction(instance.b[i]))
                D.append([-v for v in row])
                d.append(Fraction(-instance.b[i]))
        for j in range(n):
            if is_finite(instance.u[j]):
                D.append(
                    [Fraction(1) if i == j else Fraction(0) for i in range(n)]
                )
                d.append(Fraction(instance.u[j]))
        out = solve_ineq_lp(
            [-Fraction(v) for v in instance.c], D, d
        )  # minimize via negated objective
        if out.status != "optimal":
            return out
        return LpOutcome(
            status="optimal", vertex=out.vertex, objective=-out.objective
        )
    raise TypeError(f"unknown instance type: {type(instance)!r}")
