import itertools
import random
from fractions import Fraction

import pytest

from deltailp.intlinalg import IntMat, det, minor_stats, rank
from deltailp.model import POS_INF, CanonicalInstance, StandardInstance, is_finite
from deltailp.oracle import brute_force_ilp, feasible_points
from deltailp.reductions import (
    IntegralInfeasible,
    cf_to_sf,
    classic_to_generalized,
    sf_to_cf,
)


def random_bounded_cf(rng, n, m, coef=3, width=4):
    while True:
        a = IntMat.from_rows(
            [[rng.randint(-coef, coef) for _ in range(n)] for _ in range(n + m)]
        )
        if rank(a) == n:
            break
    x0 = [rng.randint(-2, 2) for _ in range(n)]
    ax0 = a.matvec(x0)
    b_l = tuple(v - rng.randint(0, width) for v in ax0)
    b_r = tuple(v + rng.randint(0, width) for v in ax0)
    c = tuple(rng.randint(-3, 3) for _ in range(n))
    return CanonicalInstance(A=a, b_l=b_l, b_r=b_r, c=c)


def cf_box(inst, half=8):
    return [(-half, half)] * inst.n


def sf_box(inst):
    out = []
    for ui in inst.u:
        assert is_finite(ui)
        out.append((0, ui))
    return out


def stack_of(inst):
    rows = []
    if inst.A is not None:
        rows += inst.A.to_lists()
    if inst.G is not None:
        rows += inst.G.to_lists()
    return IntMat.from_rows(rows)


class TestCfToSf:
    def test_square_nonsingular(self):
        a = IntMat.from_rows([[2, 0], [1, 3]])
        inst = CanonicalInstance(A=a, b_l=(0, 0), b_r=(4, 5), c=(1, 1))
        dst, rmap = cf_to_sf(inst)
        assert dst.A is None and dst.m == 0
        assert dst.det_s == abs(det(a))

    def test_unimodular_square(self):
        a = IntMat.from_rows([[1, 0], [2, 1]])
        inst = CanonicalInstance(A=a, b_l=(0, 0), b_r=(3, 3), c=(1, -1))
        dst, _ = cf_to_sf(inst)
        assert dst.det_s == 1

    def test_requires_finite_lower(self):
        from deltailp.model import NEG_INF

        inst = CanonicalInstance(
            A=IntMat.from_rows([[1]]), b_l=(NEG_INF,), b_r=(3,), c=(1,)
        )
        with pytest.raises(ValueError):
            cf_to_sf(inst)

    def test_delta_relations_and_perpendicularity(self):
        rng = random.Random(9)
        done = 0
        while done < 15:
            inst = random_bounded_cf(rng, rng.randint(1, 3), rng.randint(1, 2))
            dst, rmap = cf_to_sf(inst)
            stats = minor_stats(inst.A)
            if dst.A is not None:
                # hatA annihilates the bijection matrix
                for arow in dst.A.entries:
                    for k in range(inst.n):
                        assert (
                            sum(
                                Fraction(arow[i]) * rmap.matrix[i][k]
                                for i in range(inst.n + inst.m)
                            )
                            == 0
                        )
                assert minor_stats(dst.A).delta == stats.delta // stats.delta_gcd
            assert dst.det_s == stats.delta_gcd
            assert all(ci >= 0 for ci in dst.c)
            done += 1

    def test_bijection_and_objective(self):
        rng = random.Random(21)
        done = 0
        while done < 12:
            inst = random_bounded_cf(rng, rng.randint(1, 3), rng.randint(0, 2))
            dst, rmap = cf_to_sf(inst)
            src_pts = feasible_points(inst, cf_box(inst, 10))
            dst_pts = set(feasible_points(dst, sf_box(dst)))
            if not src_pts:
                assert not dst_pts
                continue
            images = set()
            for x in src_pts:
                y = rmap.forward(x)
                assert y in dst_pts
                assert rmap.backward(y) == tuple(x)
                v = sum(ci * xi for ci, xi in zip(inst.c, x))
                vhat = sum(ci * yi for ci, yi in zip(dst.c, y))
                assert (
                    Fraction(vhat)
                    == rmap.objective_scale * v + rmap.objective_offset
                )
                images.add(y)
            assert images == dst_pts
            # optimal values correspond: max on source <-> min on target
            src_opt = brute_force_ilp(inst, cf_box(inst, 10))
            dst_opt = brute_force_ilp(dst, sf_box(dst))
            assert (
                Fraction(dst_opt.value)
                == rmap.objective_scale * src_opt.value + rmap.objective_offset
            )
            done += 1


class TestSfToCf:
    def make_sf(self, rng, n, m):
        a = IntMat.from_rows(
            [[rng.randint(0, 3) for _ in range(n)] for _ in range(m)]
        )
        if rank(a) < m:
            return None
        x0 = [rng.randint(0, 2) for _ in range(n)]
        b = a.matvec(x0)
        u = tuple(x + rng.randint(1, 3) for x in x0)
        c = tuple(rng.randint(0, 4) for _ in range(n))
        try:
            dst, _ = classic_to_generalized(a, b, c, u)
        except IntegralInfeasible:
            return None
        return dst

    def test_pure_group_delta(self):
        inst = StandardInstance(
            n=2,
            m=0,
            A=None,
            G=IntMat.identity(2),
            S=IntMat.from_rows([[2, 0], [0, 4]]),
            b=(),
            g=(1, 3),
            u=(5, 5),
            c=(1, 2),
        )
        dst, rmap = sf_to_cf(inst)
        stats = minor_stats(dst.A)
        assert stats.delta == 8 and stats.delta_gcd == 8

    def test_delta_relations(self):
        rng = random.Random(33)
        done = 0
        while done < 10:
            inst = self.make_sf(rng, rng.randint(2, 4), 1)
            if inst is None:
                continue
            dst, rmap = sf_to_cf(inst)
            # A . hatA = 0 (hatA recoverable from the backward map)
            d = inst.n - inst.m
            ahat = [
                [rmap.inv_matrix[i][j] for j in range(d)] for i in range(inst.n)
            ]
            for arow in inst.A.entries:
                for j in range(d):
                    assert (
                        sum(arow[i] * ahat[i][j] for i in range(inst.n)) == 0
                    )
            stats = minor_stats(dst.A)
            src_delta = minor_stats(inst.A).delta if inst.A is not None else 1
            assert stats.delta == src_delta * inst.det_s
            assert stats.delta_gcd == inst.det_s
            done += 1

    def test_bijection_roundtrip(self):
        rng = random.Random(47)
        done = 0
        while done < 10:
            inst = self.make_sf(rng, rng.randint(2, 4), 1)
            if inst is None:
                continue
            dst, rmap = sf_to_cf(inst)
            src_pts = feasible_points(inst, sf_box(inst))
            half = 1 + max(
                (abs(v) for v in itertools.chain(dst.b_r, [0]) if is_finite(v)),
                default=1,
            ) + sum(sum(abs(e) for e in r) for r in dst.A.entries)
            dst_pts = set(feasible_points(dst, [(-half, half)] * dst.n))
            images = set()
            for x in src_pts:
                y = rmap.forward(x)
                assert y in dst_pts
                assert rmap.backward(y) == tuple(x)
                v = sum(ci * xi for ci, xi in zip(inst.c, x))
                vhat = sum(ci * yi for ci, yi in zip(dst.c, y))
                assert (
                    Fraction(vhat)
                    == rmap.objective_scale * v + rmap.objective_offset
                )
                images.add(y)
            assert images == dst_pts
            done += 1

    def test_degenerate_no_variables(self):
        inst = StandardInstance(
            n=2,
            m=2,
            A=IntMat.from_rows([[1, 0], [1, 1]]),
            G=None,
            S=None,
            b=(2, 3),
            g=(),
            u=(4, 4),
            c=(1, 1),
        )
        dst, rmap = sf_to_cf(inst)
        assert dst is None
        out = rmap.metadata["direct"]
        assert out.status == "optimal" and out.x == (2, 1) and out.value == 3

    def test_roundtrip_cf_sf_cf(self):
        rng = random.Random(59)
        done = 0
        while done < 6:
            inst = random_bounded_cf(rng, 2, 1)
            mid, map1 = cf_to_sf(inst)
            back, map2 = sf_to_cf(mid)
            src_opt = brute_force_ilp(inst, cf_box(inst, 10))
            if src_opt.status != "optimal":
                continue
            mid_opt = brute_force_ilp(mid, sf_box(mid))
            assert (
                Fraction(mid_opt.value)
                == map1.objective_scale * src_opt.value + map1.objective_offset
            )
            if back is not None:
                half = 40
                back_opt = brute_force_ilp(back, [(-half, half)] * back.n)
                assert (
                    Fraction(back_opt.value)
                    == map2.objective_scale * mid_opt.value
                    + map2.objective_offset
                )
            done += 1


class TestClassic:
    def test_gcd_infeasible(self):
        with pytest.raises(IntegralInfeasible):
            classic_to_generalized(
                IntMat.from_rows([[2, 4]]), (3,), (1, 1), (5, 5)
            )

    def test_gcd_divides(self):
        a = IntMat.from_rows([[2, 4]])
        dst, _ = classic_to_generalized(a, (6,), (1, 1), (5, 5))
        assert dst.det_s == 1
        assert abs(det(stack_of(dst))) == 1
        # solution sets coincide
        orig = {
            x
            for x in itertools.product(range(6), repeat=2)
            if 2 * x[0] + 4 * x[1] == 6
        }
        new = set(feasible_points(dst, [(0, 5), (0, 5)]))
        assert new == orig

    def test_primitive_input_unchanged_solutions(self):
        a = IntMat.from_rows([[1, 2, 3]])
        dst, _ = classic_to_generalized(a, (4,), (1, 1, 1), (4, 4, 4))
        assert abs(det(stack_of(dst))) == 1
        orig = {
            x
            for x in itertools.product(range(5), repeat=3)
            if x[0] + 2 * x[1] + 3 * x[2] == 4
        }
        assert set(feasible_points(dst, [(0, 4)] * 3)) == orig
