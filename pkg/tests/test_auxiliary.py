"""Recursive construction, exact inner products, and the verification suite."""

import random
from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from discrep.auxiliary import (
    build_tree,
    eval_aux,
    eval_aux_level0,
    inner_product,
    inner_product_level0,
    lemma_short_bound,
    lemma_suite,
    n_from_pointcount,
    product_bound_check,
)
from discrep.discrepancy import eval_discrepancy
from discrep.dyadic import Point
from discrep.errors import ResourceLimitError
from discrep.pointsets import PointSet, random_uniform, van_der_corput

ORIGIN = PointSet((Point(Fraction(0), Fraction(0)),), label="origin")


def test_n_from_pointcount_examples():
    assert n_from_pointcount(1) == 1
    assert n_from_pointcount(4) == 3
    assert n_from_pointcount(3) == 3


@given(st.integers(1, 10**9))
def test_n_from_pointcount_characterization(count):
    n = n_from_pointcount(count)
    assert 2 ** (n - 1) < 2 * count <= 2 ** n


def test_singleton_tree_levels():
    tree = build_tree(ORIGIN, 0)
    assert tree.n == 1
    lev0 = tree.levels[0]
    assert lev0.empty_count == 1
    assert list(lev0.occupied) == [(0, 0)]
    assert lev0.rect_area == Fraction(1, 2)
    # level 1: 2^(2(n+1)) = 16 children of the one occupied rectangle
    lev1 = tree.levels[1]
    assert lev1.empty_count == 15
    assert len(lev1.occupied) == 1
    assert tree.stabilization_level == 0
    assert tree.stabilized


def test_occupied_never_exceeds_point_count():
    for ps in (van_der_corput(2), van_der_corput(3), random_uniform(11, seed=1)):
        n = n_from_pointcount(len(ps))
        for i in range(n + 1):
            tree = build_tree(ps, i)
            assert all(len(rec.occupied) <= len(ps) for rec in tree.levels)


def test_boundary_points_fall_outside_all_rectangles():
    ps = PointSet((Point(Fraction(1), Fraction(1, 2)), Point(Fraction(0), Fraction(0))))
    tree = build_tree(ps, 0)
    members = {t for rec in tree.levels for m in rec.occupied.values() for t in m}
    assert members == {1}


def test_eval_aux_examples():
    tree = build_tree(ORIGIN, 0)
    assert eval_aux(tree, Fraction(3, 10), Fraction(8, 10)) == (-1, False)
    assert eval_aux(tree, Fraction(3, 10), Fraction(2, 10)) == (-1, False)
    assert eval_aux(tree, Fraction(0), Fraction(0)) == (1, True)
    with pytest.raises(ValueError):
        eval_aux(tree, Fraction(1), Fraction(0))


def test_eval_aux_level0():
    tree = build_tree(ORIGIN, 0)
    # occupied level-0 rectangle -> 0; empty one -> Haar sign
    assert eval_aux_level0(tree, Fraction(3, 10), Fraction(2, 10)) == 0
    assert eval_aux_level0(tree, Fraction(3, 10), Fraction(8, 10)) == -1


def test_inner_product_singleton_exact():
    tree = build_tree(ORIGIN, 0)
    ip = inner_product(tree)
    assert ip.value == Fraction(-9, 544)
    assert ip.exact
    assert ip.value <= lemma_short_bound(tree) == Fraction(-1, 64)


def test_inner_product_deep_truncation_matches_tail():
    # explicitly built deep levels must agree with the closed-form tail
    ps = van_der_corput(2)
    for i in (0, 2):
        auto = build_tree(ps, i)
        deep = build_tree(ps, i, max_level=auto.stabilization_level + 10)
        assert inner_product(auto).value == inner_product(deep).value
        # partial sums (no tail) differ by exactly the remaining geometric tail
        partial = -Fraction(len(ps), 16) * sum(
            rec.empty_count * rec.rect_area ** 2 for rec in deep.levels
        )
        n = deep.n
        c = len(deep.levels[-1].occupied)
        ratio = Fraction(1, 1 << (4 * (n + 1)))
        area_next = deep.levels[-1].rect_area / (1 << (2 * (n + 1)))
        tail = ((1 << (2 * (n + 1))) - 1) * c * area_next ** 2 / (1 - ratio)
        assert inner_product(deep).value == partial - Fraction(len(ps), 16) * tail


def test_inner_product_upper_bound_across_corpus():
    sets = [ORIGIN, van_der_corput(2), van_der_corput(3), random_uniform(8, seed=2)]
    for ps in sets:
        n = n_from_pointcount(len(ps))
        for i in range(n + 1):
            tree = build_tree(ps, i)
            ip = inner_product(tree)
            assert ip.value < 0
            assert ip.value <= lemma_short_bound(tree)


def test_inner_product_unstabilized_brackets_truth():
    # two distinct points sharing a level-0 cell: several levels to separate
    ps = PointSet(
        (Point(Fraction(0), Fraction(0)), Point(Fraction(1, 1024), Fraction(1, 1024)))
    )
    full = build_tree(ps, 1)
    assert full.stabilization_level and full.stabilization_level > 0
    truth = inner_product(full).value
    shallow = build_tree(ps, 1, max_level=0)
    assert not shallow.stabilized
    ip = inner_product(shallow)
    assert ip.error > 0
    assert ip.value - ip.error <= truth <= ip.value


def test_inner_product_level0():
    tree = build_tree(ORIGIN, 0)
    assert inner_product_level0(tree) == Fraction(-1, 64)
    ps = van_der_corput(2)
    n = n_from_pointcount(len(ps))  # 3
    for i in range(n + 1):
        t = build_tree(ps, i)
        occupied0 = len(t.levels[0].occupied)
        expected = -Fraction(len(ps), 16) * ((1 << n) - occupied0) * Fraction(1, 1 << (2 * n))
        assert inner_product_level0(t) == expected
        assert abs(inner_product_level0(t)) <= Fraction(len(ps), 16 * (1 << n))


def test_unimodular_values_and_truncation_fraction():
    rng = random.Random(99)
    for ps in (van_der_corput(2), random_uniform(5, seed=5)):
        n = n_from_pointcount(len(ps))
        tree = build_tree(ps, n // 2)
        truncated = 0
        samples = 500
        for _ in range(samples):
            x = Fraction(rng.getrandbits(30), 1 << 30)
            y = Fraction(rng.getrandbits(30), 1 << 30)
            value = eval_aux(tree, x, y)
            assert value.value in (-1, 1)
            truncated += value.truncated
        mass = float(tree.uncovered_mass())
        sigma = (mass * (1 - mass) / samples) ** 0.5
        assert truncated / samples <= mass + 3 * sigma + 1e-9


def test_uncovered_mass_decreases_to_zero():
    tree = build_tree(van_der_corput(2), 1)
    masses = [tree.uncovered_mass(level) for level in range(len(tree.levels))]
    assert all(b < a for a, b in zip(masses, masses[1:]))
    assert masses[0] == len(tree.pointset) * Fraction(1, 1 << tree.n)


def _covered_integrals_by_grid(ps, trees, grid_bits):
    """Independent oracle: exact integration on a uniform dyadic grid fine
    enough that every product piece and every Haar quadrant is resolved."""
    n = len(ps)
    g = 1 << grid_bits
    tot_prod = Fraction(0)
    tot_d = Fraction(0)
    covered = Fraction(0)
    cell_area = Fraction(1, g * g)
    for ix in range(g):
        for iy in range(g):
            x = Fraction(2 * ix + 1, 2 * g)
            y = Fraction(2 * iy + 1, 2 * g)
            sign = 1
            ok = True
            for tree in trees:
                value = eval_aux(tree, x, y)
                if value.truncated:
                    ok = False
                    break
                sign *= value.value
            if not ok:
                continue
            covered += cell_area
            tot_prod += sign * cell_area
            a, b = Fraction(ix, g), Fraction(ix + 1, g)
            c, d = Fraction(iy, g), Fraction(iy + 1, g)
            cell_d = sum(
                (b - max(a, p.x)) * (d - max(c, p.y))
                for p in ps
                if p.x < b and p.y < d
            ) - Fraction(n, 4) * (b * b - a * a) * (d * d - c * c)
            tot_d += sign * cell_d
    return tot_prod, tot_d, covered


def test_product_check_matches_grid_oracle():
    trees = [build_tree(ORIGIN, 0, max_level=2), build_tree(ORIGIN, 1, max_level=2)]
    report = product_bound_check(ORIGIN, (0, 1), truncation_level=2, trees=trees)
    # finest piece scale at level 2 is i + 2(n+1) = 5, plus one for quadrants
    oracle = _covered_integrals_by_grid(ORIGIN, trees, grid_bits=7)
    assert report.product_integral == oracle[0] == 0
    assert report.d_product_integral == oracle[1]
    assert report.covered_area == oracle[2]
    assert report.passed


def test_product_check_bounds_vdc():
    ps = van_der_corput(2)
    n = n_from_pointcount(len(ps))
    for indices in ((0, 2), (0, 3), (1, 2), (0, 1, 3)):
        report = product_bound_check(ps, indices, truncation_level=2)
        assert report.product_integral == 0
        assert report.d_product_ok
        assert report.d_product_bound == Fraction(
            (1 << indices[0]) * len(ps), (1 << indices[-1]) * 16 * (1 << n)
        )


def test_product_check_validation():
    with pytest.raises(ValueError):
        product_bound_check(ORIGIN, (0,))
    with pytest.raises(ValueError):
        product_bound_check(ORIGIN, (1, 0))
    with pytest.raises(ResourceLimitError):
        product_bound_check(van_der_corput(2), (0, 3), piece_cap=10)


def test_side_lengths_never_tie():
    ps = van_der_corput(2)
    trees = [build_tree(ps, i, max_level=3) for i in range(4)]
    for a in trees:
        for b in trees:
            if a.direction >= b.direction:
                continue
            for ra in a.levels:
                for rb in b.levels:
                    assert ra.scale_x != rb.scale_x
                    assert ra.scale_y != rb.scale_y


def test_lemma_suite_passes_on_corpus():
    for ps in (ORIGIN, van_der_corput(3), random_uniform(16, seed=1)):
        report = lemma_suite(ps)
        assert report.passed, [c for c in report.checks if not c.passed]


def test_lemma_suite_flags_corrupted_tree():
    ps = van_der_corput(2)
    n = n_from_pointcount(len(ps))
    trees = [build_tree(ps, i) for i in range(n + 1)]
    bad = trees[1]
    # tamper with the level-0 empty count
    bad.levels[0] = replace(bad.levels[0], empty_count=bad.levels[0].empty_count + 1)
    report = lemma_suite(ps, trees=trees)
    assert not report.passed
    failing = [c for c in report.checks if not c.passed]
    assert any("i=1" in c.witness for c in failing)


def test_tree_summary_schema():
    tree = build_tree(ORIGIN, 0)
    summary = tree.summary()
    assert set(summary) == {
        "i", "n", "levels", "stabilized", "l_star", "sum_area_sq", "inner_product",
    }
    assert summary["inner_product"] == "-9/544"
    assert summary["levels"][0] == {"l": 0, "nonempty": 1, "empty": 1}


def test_eval_matches_inner_product_sign_structure():
    # Monte-Carlo sanity: the sampled mean of D * f should be negative and
    # within a few standard errors of the exact inner product
    ps = van_der_corput(2)
    tree = build_tree(ps, 1)
    rng = random.Random(3)
    samples = 60_000
    acc = acc_sq = 0.0
    for _ in range(samples):
        x = Fraction(rng.getrandbits(30), 1 << 30)
        y = Fraction(rng.getrandbits(30), 1 << 30)
        v = float(eval_discrepancy(ps, x, y)) * eval_aux(tree, x, y).value
        acc += v
        acc_sq += v * v
    mean = acc / samples
    stderr = ((acc_sq / samples - mean * mean) / samples) ** 0.5
    assert abs(mean - float(inner_product(tree).value)) < 4 * stderr
