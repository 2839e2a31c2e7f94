"""Problem data types, validation, and system normalization.

Four integer programming forms are covered:

* canonical:  max c'x  subject to  b_l <= A x <= b_r,  x integer, with A of
  full column rank; the one-sided variant has every b_l entry equal to -inf.
* generalized standard:  min c'x  subject to  A x = b,  G x = g (mod S),
  0 <= x <= u,  x integer, where the stack [A; G] is square unimodular and S
  is a diagonal matrix with a divisibility chain.
* group minimization:  min c'x subject to sum x_i * g_i = g_0 in a finite
  Abelian group given by its cyclic factor moduli, x nonnegative integer,
  optionally bounded.

Infinite bounds are explicit tagged values (NEG_INF / POS_INF), never
sentinel numerics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .intlinalg import (
    IntMat,
    RankError,
    adjugate,
    det,
    hnf,
    inverse_times,
    rank,
)


class _Infinity:
    """Tagged infinite bound value with total order against integers."""

    __slots__ = ("sign",)

    def __init__(self, sign: int) -> None:
        self.sign = sign

    def __repr__(self) -> str:
        return "+inf" if self.sign > 0 else "-inf"

    def __neg__(self) -> "_Infinity":
        return POS_INF if self.sign < 0 else NEG_INF

    def __eq__(self, other: object) -> bool:
        return isinstance(other, _Infinity) and other.sign == self.sign

    def __hash__(self) -> int:
        return hash(("_Infinity", self.sign))

    def __lt__(self, other) -> bool:
        if isinstance(other, _Infinity):
            return self.sign < other.sign
        return self.sign < 0

    def __le__(self, other) -> bool:
        return self == other or self < other

    def __gt__(self, other) -> bool:
        return not self <= other

    def __ge__(self, other) -> bool:
        return not self < other


POS_INF = _Infinity(1)
NEG_INF = _Infinity(-1)

ExtInt = int | _Infinity


def is_finite(v: ExtInt) -> bool:
    return not isinstance(v, _Infinity)


@dataclass(frozen=True)
class CanonicalInstance:
    """max c'x  s.t.  b_l <= A x <= b_r,  x integer."""

    A: IntMat
    b_l: tuple[ExtInt, ...]
    b_r: tuple[int, ...]
    c: tuple[int, ...]

    @property
    def n(self) -> int:
        return self.A.cols

    @property
    def m(self) -> int:
        return self.A.rows - self.A.cols

    @property
    def one_sided(self) -> bool:
        """True when every lower bound is -inf."""
        return all(not is_finite(v) for v in self.b_l)


@dataclass(frozen=True)
class StandardInstance:
    """min c'x  s.t.  A x = b,  G x = g (mod S),  0 <= x <= u,  x integer.

    m may be 0 (no equality rows; A is None) and m may equal n (no group
    rows; G and S are None).
    """

    n: int
    m: int
    A: IntMat | None
    G: IntMat | None
    S: IntMat | None
    b: tuple[int, ...]
    g: tuple[int, ...]
    u: tuple[ExtInt, ...]
    c: tuple[int, ...]

    @property
    def det_s(self) -> int:
        if self.S is None:
            return 1
        out = 1
        for i in range(self.S.rows):
            out *= self.S.entries[i][i]
        return out

    @property
    def bounded(self) -> bool:
        return all(is_finite(v) for v in self.u)


@dataclass(frozen=True)
class GroupSpec:
    """Finite Abelian group as a product of cyclic factors Z_d1 x ... x Z_dr
    with d1 | d2 | ... | dr."""

    moduli: tuple[int, ...]

    @property
    def order(self) -> int:
        return math.prod(self.moduli)

    def reduce(self, elem: Sequence[int]) -> tuple[int, ...]:
        return tuple(e % d for e, d in zip(elem, self.moduli))

    def add(self, a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
        return tuple((x + y) % d for x, y, d in zip(a, b, self.moduli))

    def scale(self, k: int, a: Sequence[int]) -> tuple[int, ...]:
        return tuple((k * x) % d for x, d in zip(a, self.moduli))

    def encode(self, elem: Sequence[int]) -> int:
        """Mixed-radix integer encoding of a reduced element."""
        code = 0
        for e, d in zip(elem, self.moduli):
            code = code * d + (e % d)
        return code

    def decode(self, code: int) -> tuple[int, ...]:
        out = []
        for d in reversed(self.moduli):
            out.append(code % d)
            code //= d
        return tuple(reversed(out))

    @property
    def zero(self) -> tuple[int, ...]:
        return (0,) * len(self.moduli)


@dataclass(frozen=True)
class GroupInstance:
    """min c'x  s.t.  sum x_i * g_i = target in the group, x >= 0 integer,
    x <= bounds where finite."""

    group: GroupSpec
    generators: tuple[tuple[int, ...], ...]
    target: tuple[int, ...]
    costs: tuple[int, ...]
    bounds: tuple[ExtInt, ...]

    @property
    def n(self) -> int:
        return len(self.generators)

    @property
    def bounded(self) -> bool:
        return all(is_finite(v) for v in self.bounds)


Instance = CanonicalInstance | StandardInstance | GroupInstance


@dataclass(frozen=True)
class SolveOutcome:
    """Tagged solver result: optimal / infeasible / unbounded.

    For optimal outcomes x is the solution vector (lexicographically
    smallest among optimal solutions for deterministic solvers) and value
    the exact objective.  certificate carries optional extra data such as
    unbounded rays or structural reports.
    """

    status: str  # optimal | infeasible | unbounded
    x: tuple[int, ...] | None = None
    value: int | None = None
    certificate: dict | None = None

    @staticmethod
    def optimal(x: Sequence[int], value: int, certificate: dict | None = None) -> "SolveOutcome":
        return SolveOutcome(status="optimal", x=tuple(x), value=value, certificate=certificate)

    @staticmethod
    def infeasible(certificate: dict | None = None) -> "SolveOutcome":
        return SolveOutcome(status="infeasible", certificate=certificate)

    @staticmethod
    def unbounded(certificate: dict | None = None) -> "SolveOutcome":
        return SolveOutcome(status="unbounded", certificate=certificate)


def _stack(inst: StandardInstance) -> IntMat:
    rows: list[list[int]] = []
    if inst.A is not None:
        rows.extend(inst.A.to_lists())
    if inst.G is not None:
        rows.extend(inst.G.to_lists())
    return IntMat.from_rows(rows)


def validate(instance: Instance) -> list[str]:
    """Report-only validation: list of violated invariants (empty = valid)."""
    issues: list[str] = []
    if isinstance(instance, CanonicalInstance):
        a = instance.A
        if a.rows < a.cols:
            issues.append("A must have at least as many rows as columns")
        elif rank(a) != a.cols:
            issues.append("A does not have full column rank")
        if len(instance.b_l) != a.rows or len(instance.b_r) != a.rows:
            issues.append("bound vector length differs from row count")
        else:
            for lo, hi in zip(instance.b_l, instance.b_r):
                if is_finite(lo) and lo > hi:
                    issues.append("b_l exceeds b_r on some row")
                    break
        if len(instance.c) != a.cols:
            issues.append("objective length differs from variable count")
        return issues
    if isinstance(instance, StandardInstance):
        n, m = instance.n, instance.m
        if not 0 <= m <= n:
            issues.append("row count m out of range")
            return issues
        if (instance.A is None) != (m == 0):
            issues.append("A present iff m > 0")
        if (instance.G is None) != (m == n) or (instance.S is None) != (m == n):
            issues.append("G and S present iff m < n")
        if instance.A is not None and (instance.A.rows, instance.A.cols) != (m, n):
            issues.append("A has wrong shape")
        if instance.G is not None and (instance.G.rows, instance.G.cols) != (n - m, n):
            issues.append("G has wrong shape")
        if issues:
            return issues
        if m < n:
            s = instance.S
            diag = [s.entries[i][i] for i in range(s.rows)]
            if s.rows != n - m or s.cols != n - m:
                issues.append("S has wrong shape")
            elif any(
                s.entries[i][j] != 0 for i in range(s.rows) for j in range(s.cols) if i != j
            ):
                issues.append("S is not diagonal")
            elif any(d <= 0 for d in diag):
                issues.append("S diagonal must be positive")
            elif any(diag[i + 1] % diag[i] != 0 for i in range(len(diag) - 1)):
                issues.append("divisibility chain")
            elif any(not 0 <= gi < di for gi, di in zip(instance.g, diag)):
                issues.append("g not reduced into [0, diag(S))")
        if n > 0 and abs(det(_stack(instance))) != 1:
            issues.append("stack not unimodular")
        if len(instance.b) != m:
            issues.append("b has wrong length")
        if len(instance.g) != n - m:
            issues.append("g has wrong length")
        if len(instance.u) != n or len(instance.c) != n:
            issues.append("u or c has wrong length")
        elif any(isinstance(v, _Infinity) and v.sign < 0 for v in instance.u):
            issues.append("u entries must be integers or +inf")
        if any(ci < 0 for ci in instance.c):
            issues.append("costs must be nonnegative")
        if any(is_finite(v) and v < 0 for v in instance.u):
            issues.append("upper bounds must be nonnegative")
        return issues
    if isinstance(instance, GroupInstance):
        mods = instance.group.moduli
        if any(d < 1 for d in mods):
            issues.append("moduli must be >= 1")
        if any(mods[i + 1] % mods[i] != 0 for i in range(len(mods) - 1)):
            issues.append("divisibility chain")
        if instance.n < 1:
            issues.append("at least one generator required")
        for gen in instance.generators + (instance.target,):
            if len(gen) != len(mods):
                issues.append("element length differs from factor count")
                break
            if any(not 0 <= e < d for e, d in zip(gen, mods)):
                issues.append("element not reduced")
                break
        if len(instance.costs) != instance.n or len(instance.bounds) != instance.n:
            issues.append("costs or bounds have wrong length")
        elif any(ci < 0 for ci in instance.costs):
            issues.append("costs must be nonnegative")
        return issues
    raise TypeError(f"unknown instance type: {type(instance)!r}")


@dataclass(frozen=True)
class NormalizationRecord:
    """Invertible bookkeeping for system normalization.

    Forward map on points: x_new = Q x_old - t.  Rows of the normalized
    system are the original rows reordered by row_perm (base rows first).
    col_perm records the final variable permutation that was folded into Q.
    """

    base: tuple[int, ...]
    Q: IntMat
    t: tuple[int, ...]
    row_perm: tuple[int, ...]
    col_perm: tuple[int, ...]
    delta: int
    s: int
    t_diag: int

    def q_inverse(self) -> IntMat:
        return adjugate(self.Q).scale(det(self.Q))


def transform_point(
    record: NormalizationRecord, x: Sequence[int], direction: str = "forward"
) -> tuple[int, ...]:
    """Apply the normalization change of variables to a point.

    forward sends original coordinates to normalized ones; inverse undoes
    it; the two maps compose to the identity.
    """
    if direction == "forward":
        y = record.Q.matvec(tuple(x))
        return tuple(a - b for a, b in zip(y, record.t))
    if direction == "inverse":
        shifted = tuple(a + b for a, b in zip(x, record.t))
        return record.q_inverse().matvec(shifted)
    raise ValueError("direction must be 'forward' or 'inverse'")


def _apply_sym_perm(mat: list[list[int]], perm: Sequence[int]) -> list[list[int]]:
    """Symmetric permutation: new[i][j] = old[perm[i]][perm[j]]."""
    return [[mat[pi][pj] for pj in perm] for pi in perm]


def normalize(
    instance: CanonicalInstance, base: Sequence[int]
) -> tuple[CanonicalInstance, NormalizationRecord]:
    """Normalize a canonical system at the vertex defined by a base.

    After normalization the base rows come first, the base block is lower
    triangular with unit diagonal entries leading, entries below the
    diagonal are reduced into [0, diagonal), the columns of the block under
    the identity part are lexicographically sorted, and the base-row bounds
    are translated into [0, diag).  The returned record inverts everything.

    Base rows are translated against b_l when all base lower bounds are
    finite, otherwise against b_r (the one-sided case).
    """
    a = instance.A
    n = a.cols
    base = tuple(base)
    a_base = a.take_rows(base)
    if det(a_base) == 0:
        raise RankError("singular base block")
    use_lower = all(is_finite(instance.b_l[i]) for i in base)

    # change of variables bringing the base block to lower triangular form
    dec = hnf(a_base)
    q = dec.Q.to_lists()  # x' = Q x
    t_block = dec.T.to_lists()

    # symmetric permutation: unit diagonal entries first (stable)
    diag = [t_block[i][i] for i in range(n)]
    perm1 = [i for i in range(n) if diag[i] == 1] + [i for i in range(n) if diag[i] != 1]
    s = sum(1 for d in diag if d == 1)
    t_block = _apply_sym_perm(t_block, perm1)

    # symmetric permutation of the first s indices sorting the columns of
    # the block below the identity part lexicographically
    cols_h = sorted(range(s), key=lambda j: [t_block[i][j] for i in range(s, n)])
    perm2 = cols_h + list(range(s, n))
    t_block = _apply_sym_perm(t_block, perm2)

    perm = [perm1[p] for p in perm2]  # composed variable/base-row permutation

    # fold permutations into the change of variables: x_new = Q_full x_old
    # with Q_full row i = row perm[i] of Q
    q_full = IntMat.from_rows([q[perm[i]] for i in range(n)])

    row_perm = tuple(base[perm[i]] for i in range(n)) + tuple(
        i for i in range(a.rows) if i not in set(base)
    )
    # A_new = A[row_perm] * Q_full^{-1}; Q_full is unimodular so its exact
    # inverse is det(Q_full) * adjugate(Q_full)
    q_inv = adjugate(q_full).scale(det(q_full))
    a_new = IntMat.from_rows([a.row(r) for r in row_perm]).mul(q_inv)

    # integer translation putting the base-row reference bounds into [0, diag)
    ref = instance.b_l if use_lower else instance.b_r
    ref_base = [ref[row_perm[i]] for i in range(n)]
    t_vec = [0] * n
    for i in range(n):
        acc = ref_base[i] - sum(a_new.entries[i][j] * t_vec[j] for j in range(i))
        t_vec[i] = acc // a_new.entries[i][i]  # floor division
    shift = a_new.matvec(tuple(t_vec))
    b_l_new = tuple(
        instance.b_l[r] - shift[i] if is_finite(instance.b_l[r]) else NEG_INF
        for i, r in enumerate(row_perm)
    )
    b_r_new = tuple(instance.b_r[r] - shift[i] for i, r in enumerate(row_perm))
    c_new = tuple(q_inv.transpose().matvec(instance.c))

    normalized = CanonicalInstance(A=a_new, b_l=b_l_new, b_r=b_r_new, c=c_new)
    record = NormalizationRecord(
        base=tuple(range(n)),
        Q=q_full,
        t=tuple(t_vec),
        row_perm=row_perm,
        col_perm=tuple(perm),
        delta=abs(det(a_new.take_rows(range(n)))),
        s=s,
        t_diag=n - s,
    )
    return normalized, record


def objective_value(instance: Instance, x: Sequence[int]) -> int:
    if isinstance(instance, GroupInstance):
        return sum(ci * xi for ci, xi in zip(instance.costs, x))
    return sum(ci * xi for ci, xi in zip(instance.c, x))


def is_feasible(instance: Instance, x: Sequence[int]) -> bool:
    """Exact integer feasibility check of a point."""
    if isinstance(instance, CanonicalInstance):
        ax = instance.A.matvec(tuple(x))
        return all(
            (not is_finite(lo) or lo <= v) and v <= hi
            for lo, v, hi in zip(instance.b_l, ax, instance.b_r)
        )
    if isinstance(instance, StandardInstance):
        if any(xi < 0 for xi in x):
            return False
        if any(is_finite(ui) and xi > ui for xi, ui in zip(x, instance.u)):
            return False
        if instance.A is not None and instance.A.matvec(tuple(x)) != instance.b:
            return False
        if instance.G is not None:
            gx = instance.G.matvec(tuple(x))
            diag = [instance.S.entries[i][i] for i in range(instance.S.rows)]
            if any((v - gi) % d != 0 for v, gi, d in zip(gx, instance.g, diag)):
                return False
        return True
    if isinstance(instance, GroupInstance):
        if any(xi < 0 for xi in x):
            return False
        if any(is_finite(ui) and xi > ui for xi, ui in zip(x, instance.bounds)):
            return False
        acc = instance.group.zero
        for xi, gen in zip(x, instance.generators):
            acc = instance.group.add(acc, instance.group.scale(xi, gen))
        return acc == instance.group.reduce(instance.target)
    raise TypeError(f"unknown instance type: {type(instance)!r}")
