"""Brute-force ground truth.

Exhaustive solvers over explicit boxes, integer hull vertex enumeration at
tiny scale, and brute-force group minimization.  Results are exact; the
point cap (env var DELTA_ILP_POINT_CAP, default 10^7) guards against
accidental blowups.

Enumeration is vectorized with 64-bit integer arrays when an a priori bound
shows that no intermediate value can overflow; otherwise a pure-Python path
with arbitrary precision is used, so the outcome is exact either way.
"""

from __future__ import annotations

import itertools
import math
import os
from fractions import Fraction
from typing import Sequence

import numpy as np

from .intlinalg import IntMat
from .lp import solve_ineq_lp
from .model import (
    CanonicalInstance,
    GroupInstance,
    StandardInstance,
    SolveOutcome,
    is_feasible,
    is_finite,
)

Box = Sequence[tuple[int, int]]


class CapExceeded(RuntimeError):
    """Raised when an enumeration would exceed the configured point cap."""


def point_cap() -> int:
    raw = os.environ.get("DELTA_ILP_POINT_CAP")
    return int(raw) if raw else 10**7


def _box_volume(box: Box) -> int:
    vol = 1
    for lo, hi in box:
        if hi < lo:
            return 0
        vol *= hi - lo + 1
    return vol


def _check_cap(count: int) -> None:
    cap = point_cap()
    if count > cap:
        raise CapExceeded(f"enumeration of {count} points exceeds cap {cap}")


def _int64_safe(mat_rows: list[list[int]], box: Box) -> bool:
    big = max((abs(lo) for lo, _ in box), default=0)
    big = max(big, max((abs(hi) for _, hi in box), default=0))
    coef = max((abs(e) for row in mat_rows for e in row), default=0)
    width = max((len(row) for row in mat_rows), default=1)
    return coef * big * width < 2**60


def _grid(box: Box) -> "np.ndarray":
    axes = [np.arange(lo, hi + 1, dtype=np.int64) for lo, hi in box]
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    return pts.reshape(-1, len(box))


def _feasible_points_np(instance, box: Box) -> list[tuple[int, ...]]:
    pts = _grid(box)
    if isinstance(instance, CanonicalInstance):
        a = np.array(instance.A.to_lists(), dtype=np.int64)
        ax = pts @ a.T
        mask = np.ones(len(pts), dtype=bool)
        for i in range(a.shape[0]):
            mask &= ax[:, i] <= instance.b_r[i]
            if is_finite(instance.b_l[i]):
                mask &= ax[:, i] >= instance.b_l[i]
    else:
        mask = np.ones(len(pts), dtype=bool)
        for j, uj in enumerate(instance.u):
            mask &= pts[:, j] >= 0
            if is_finite(uj):
                mask &= pts[:, j] <= uj
        if instance.A is not None:
            a = np.array(instance.A.to_lists(), dtype=np.int64)
            ax = pts @ a.T
            for i in range(a.shape[0]):
                mask &= ax[:, i] == instance.b[i]
        if instance.G is not None:
            g = np.array(instance.G.to_lists(), dtype=np.int64)
            gx = pts @ g.T
            for i in range(g.shape[0]):
                d = instance.S.entries[i][i]
                mask &= (gx[:, i] - instance.g[i]) % d == 0
    sel = pts[mask]
    order = np.lexsort(sel.T[::-1])
    return [tuple(int(v) for v in row) for row in sel[order]]


def feasible_points(instance, box: Box) -> list[tuple[int, ...]]:
    """All integer feasible points inside the box, lexicographically sorted."""
    vol = _box_volume(box)
    _check_cap(vol)
    if vol == 0:
        return []
    rows: list[list[int]] = []
    if isinstance(instance, CanonicalInstance):
        rows = instance.A.to_lists()
    else:
        if instance.A is not None:
            rows += instance.A.to_lists()
        if instance.G is not None:
            rows += instance.G.to_lists()
    if vol <= 4 * 10**6 and _int64_safe(rows, box):
        return _feasible_points_np(instance, box)
    out = []
    for x in itertools.product(*(range(lo, hi + 1) for lo, hi in box)):
        if is_feasible(instance, x):
            out.append(x)
    return out


def brute_force_ilp(instance, box: Box) -> SolveOutcome:
    """Exact optimum over the box by full enumeration.

    Canonical instances maximize, standard instances minimize; ties are
    broken toward the lexicographically smallest solution.  The box must be
    known by the caller to contain an optimum for the verdict to be global.
    """
    pts = feasible_points(instance, box)
    if not pts:
        return SolveOutcome.infeasible()
    sign = 1 if isinstance(instance, CanonicalInstance) else -1
    cost = instance.c
    best = None
    best_val = None
    for x in pts:
        v = sum(ci * xi for ci, xi in zip(cost, x))
        if best_val is None or sign * v > sign * best_val:
            best, best_val = x, v
    return SolveOutcome.optimal(best, best_val)


def _is_convex_combination(
    p: tuple[int, ...], others: list[tuple[int, ...]], up_closure: bool = False
) -> bool:
    """Exact test whether p lies in conv(others) (plus the nonnegative
    orthant cone when up_closure is set)."""
    if not others:
        return False
    n = len(p)
    nvars = len(others)
    D: list[list[Fraction]] = []
    d: list[Fraction] = []
    for i in range(n):
        row = [Fraction(q[i]) for q in others]
        if up_closure:
            # sum lambda_q q_i <= p_i
            D.append(row)
            d.append(Fraction(p[i]))
        else:
            D.append(row)
            d.append(Fraction(p[i]))
            D.append([-v for v in row])
            d.append(Fraction(-p[i]))
    ones = [Fraction(1)] * nvars
    D.append(ones)
    d.append(Fraction(1))
    D.append([-v for v in ones])
    d.append(Fraction(-1))
    out = solve_ineq_lp([Fraction(0)] * nvars, D, d)
    return out.status == "optimal"


def hull_vertices(instance: CanonicalInstance, box: Box) -> list[tuple[int, ...]]:
    """Vertices of the convex hull of the integer feasible points in the box.

    A point is reported iff it is not a convex combination of the other
    feasible points (exact rational feasibility test).
    """
    pts = feasible_points(instance, box)
    out = []
    for i, p in enumerate(pts):
        others = pts[:i] + pts[i + 1 :]
        if not _is_convex_combination(p, others):
            out.append(p)
    return out


def group_feasible_points(
    instance: GroupInstance, radius: int
) -> list[tuple[int, ...]]:
    """All group-equation solutions with l1 norm at most radius (and within
    the instance bounds), lexicographically sorted."""
    n = instance.n
    grp = instance.group
    target = grp.reduce(instance.target)
    out: list[tuple[int, ...]] = []
    counter = [0]
    cap = point_cap()

    def rec(idx: int, remaining: int, acc, prefix: list[int]) -> None:
        counter[0] += 1
        if counter[0] > cap:
            raise CapExceeded(f"group enumeration exceeds cap {cap}")
        if idx == n:
            if acc == target:
                out.append(tuple(prefix))
            return
        hi = remaining
        if is_finite(instance.bounds[idx]):
            hi = min(hi, instance.bounds[idx])
        elem = grp.zero
        for t in range(hi + 1):
            if t > 0:
                elem = grp.add(elem, instance.generators[idx])
            rec(idx + 1, remaining - t, grp.add(acc, elem), prefix + [t])

    rec(0, radius, grp.zero, [])
    return out


def brute_force_group(instance: GroupInstance, radius: int) -> SolveOutcome:
    """Exact minimum over solutions with l1 norm at most radius."""
    pts = group_feasible_points(instance, radius)
    if not pts:
        return SolveOutcome.infeasible()
    best = None
    best_val = None
    for x in pts:
        v = sum(ci * xi for ci, xi in zip(instance.costs, x))
        if best_val is None or v < best_val:
            best, best_val = x, v
    return SolveOutcome.optimal(best, best_val)


def group_hull_vertices(instance: GroupInstance) -> list[tuple[int, ...]]:
    """Vertices of the (unbounded) hull of all group-equation solutions.

    The hull equals conv(solutions with l1 norm < |G|) plus the nonnegative
    orthant as recession cone, because every hull vertex has l1 norm at
    most |G| - 1 and adding the order of a generator to its variable maps
    solutions to solutions.  A candidate is a vertex iff it is not in the
    convex hull of the remaining candidates plus the cone.
    """
    radius = instance.group.order - 1
    pts = group_feasible_points(instance, radius)
    out = []
    for i, p in enumerate(pts):
        others = pts[:i] + pts[i + 1 :]
        if not _is_convex_combination(p, others, up_closure=True):
            out.append(p)
    return out
