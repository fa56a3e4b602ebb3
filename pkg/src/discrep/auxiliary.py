"""Recursive empty/occupied rectangle families and the +-1 auxiliary functions.

For a point set of size N, let n be the unique integer with
2^(n-1) < 2N <= 2^n.  For each direction index i in 0..n, level 0 tiles
the square by 2^n dyadic rectangles of shape 2^-i x 2^(i-n); each level
splits every occupied rectangle into 2^(2(n+1)) children (both sides cut
by 2^(n+1)).  Rectangles holding no point are "empty", the rest
"occupied"; the occupied count never exceeds N.

The auxiliary function of index i is the sum of Haar functions over all
empty rectangles of all levels: +-1 almost everywhere, +1 by convention on
the measure-zero residue that never leaves occupied rectangles.

The construction is infinite, but once every occupied rectangle's points
coincide ("stabilization", level l*) the occupied count c is constant
forever and the per-level empty count follows the fixed recurrence
(2^(2(n+1)) - 1) * c.  The sum of squared areas over all empty rectangles
of levels > l* is then a geometric series summed in closed form, which
turns inner products against the discrepancy function into exact
rationals: every empty rectangle R contributes -N |R|^2 / 16.

Only occupied rectangles are materialized (a dict per level keyed by the
index pair); empty rectangles are implicit, so levels cost O(N) to build
regardless of n.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import floor
from typing import Iterator, NamedTuple, Sequence

from .dyadic import DyadicRectangle, Point
from .discrepancy import linf_norm
from .errors import ResourceLimitError
from .pointsets import PointSet

HARD_LEVEL_CAP = 64
DEFAULT_EXTRA_LEVELS = 2
DEFAULT_PIECE_CAP = 2_000_000


@dataclass(frozen=True)
class LevelRecord:
    """One subdivision level: occupied rectangles and the empty count."""

    level: int
    scale_x: int
    scale_y: int
    occupied: dict[tuple[int, int], tuple[int, ...]]
    empty_count: int
    rect_area: Fraction

    def rectangle(self, jx: int, jy: int) -> DyadicRectangle:
        return DyadicRectangle.from_indices(self.scale_x, self.scale_y, jx, jy)

    def occupied_rectangles(self) -> Iterator[tuple[DyadicRectangle, tuple[int, ...]]]:
        for (jx, jy), members in self.occupied.items():
            yield self.rectangle(jx, jy), members


@dataclass
class AuxFamilyTree:
    """Leveled record of the recursive construction for one direction index."""

    pointset: PointSet
    direction: int
    n: int
    levels: list[LevelRecord]
    stabilization_level: int | None

    @property
    def point_count(self) -> int:
        return len(self.pointset)

    @property
    def stabilized(self) -> bool:
        return self.stabilization_level is not None

    @property
    def deepest_level(self) -> int:
        return len(self.levels) - 1

    def uncovered_mass(self, level: int | None = None) -> Fraction:
        """Upper bound N * 2^(-n - 2(n+1)L) on the measure still occupied at L."""
        if level is None:
            level = self.deepest_level
        return self.point_count * Fraction(1, 1 << (self.n + 2 * (self.n + 1) * level))

    def summary(self) -> dict:
        total, _ = sum_empty_area_sq(self)
        inner = inner_product(self)
        return {
            "i": self.direction,
            "n": self.n,
            "levels": [
                {"l": rec.level, "nonempty": len(rec.occupied), "empty": rec.empty_count}
                for rec in self.levels
            ],
            "stabilized": self.stabilized,
            "l_star": self.stabilization_level,
            "sum_area_sq": str(total),
            "inner_product": str(inner.value),
        }


class AuxValue(NamedTuple):
    value: int
    truncated: bool


def n_from_pointcount(count: int) -> int:
    """The unique n with 2^(n-1) < 2 * count <= 2^n."""
    if count < 1:
        raise ValueError(f"need at least one point, got {count}")
    return (2 * count - 1).bit_length()


def _bucket(points: Sequence[Point], members: Sequence[int], kx: int, ky: int):
    """Group point indices by their level cell; points on x=1 or y=1 fall outside."""
    out: dict[tuple[int, int], list[int]] = {}
    for idx in members:
        p = points[idx]
        jx = floor(p.x * (1 << kx))
        jy = floor(p.y * (1 << ky))
        if jx == (1 << kx) or jy == (1 << ky):
            continue
        out.setdefault((jx, jy), []).append(idx)
    return out


def build_tree(
    ps: PointSet,
    direction: int,
    max_level: int | None = None,
    extra_levels: int = DEFAULT_EXTRA_LEVELS,
) -> AuxFamilyTree:
    """Construct levels until stabilization (plus `extra_levels`) or `max_level`.

    With an explicit max_level exactly levels 0..max_level are built.  In
    auto mode building stops `extra_levels` past stabilization, with a hard
    cap of 64 levels; an unstabilized tree keeps its residual mass bound.
    """
    n = n_from_pointcount(len(ps))
    if not 0 <= direction <= n:
        raise ValueError(f"direction index {direction} outside 0..{n}")
    points = ps.points
    children = 1 << (2 * (n + 1))

    kx, ky = direction, n - direction
    occupied = {
        key: tuple(v) for key, v in _bucket(points, range(len(points)), kx, ky).items()
    }
    levels = [
        LevelRecord(0, kx, ky, occupied, (1 << n) - len(occupied), Fraction(1, 1 << n))
    ]
    stabilization: int | None = None

    def is_stable(rec: LevelRecord) -> bool:
        return all(
            len({points[t] for t in members}) == 1 for members in rec.occupied.values()
        )

    level = 0
    while True:
        if stabilization is None and is_stable(levels[-1]):
            stabilization = level
        if max_level is not None:
            if level >= max_level:
                break
        elif stabilization is not None:
            if level >= stabilization + extra_levels:
                break
        if level >= HARD_LEVEL_CAP:
            break
        level += 1
        kx = direction + (n + 1) * level
        ky = (n - direction) + (n + 1) * level
        parent = levels[-1]
        occupied = {}
        for members in parent.occupied.values():
            occupied.update(
                (key, tuple(v)) for key, v in _bucket(points, members, kx, ky).items()
            )
        empty = children * len(parent.occupied) - len(occupied)
        area = Fraction(1, 1 << (n + 2 * (n + 1) * level))
        levels.append(LevelRecord(level, kx, ky, occupied, empty, area))

    return AuxFamilyTree(ps, direction, n, levels, stabilization)


def eval_aux(tree: AuxFamilyTree, x, y) -> AuxValue:
    """Value of the auxiliary function at (x, y) in [0, 1)^2.

    Descends built levels until the query lands in an empty rectangle and
    returns its Haar value; a query still inside an occupied rectangle at
    the deepest built level gets the +1 convention with a truncated flag.
    """
    x, y = Fraction(x), Fraction(y)
    if not (0 <= x < 1 and 0 <= y < 1):
        raise ValueError(f"({x}, {y}) outside [0, 1)^2")
    for rec in tree.levels:
        jx = floor(x * (1 << rec.scale_x))
        jy = floor(y * (1 << rec.scale_y))
        if (jx, jy) not in rec.occupied:
            return AuxValue(rec.rectangle(jx, jy).haar(x, y), False)
    return AuxValue(1, True)


def eval_aux_level0(tree: AuxFamilyTree, x, y) -> int:
    """Level-0-only variant: Haar value on empty level-0 rectangles, else 0."""
    x, y = Fraction(x), Fraction(y)
    rec = tree.levels[0]
    jx = floor(x * (1 << rec.scale_x))
    jy = floor(y * (1 << rec.scale_y))
    if jx == (1 << rec.scale_x) or jy == (1 << rec.scale_y):
        return 0
    if (jx, jy) in rec.occupied:
        return 0
    return rec.rectangle(jx, jy).haar(x, y)


class InnerProduct(NamedTuple):
    """Exact value with a rigorous one-sided error bound.

    The true inner product lies in [value - error, value]; error is 0 for
    stabilized trees (the infinite tail is summed in closed form).
    """

    value: Fraction
    error: Fraction

    @property
    def exact(self) -> bool:
        return self.error == 0


def sum_empty_area_sq(tree: AuxFamilyTree) -> tuple[Fraction, Fraction]:
    """Sum of |R|^2 over all empty rectangles, all levels.

    Built levels are summed from their recorded counts.  For a stabilized
    tree the remaining levels form a geometric series with ratio
    2^(-4(n+1)) and are added in closed form (zero error); otherwise an
    upper bound on the omitted mass is returned alongside.
    """
    n = tree.n
    total = Fraction(0)
    for rec in tree.levels:
        total += rec.empty_count * rec.rect_area ** 2
    deepest = tree.levels[-1]
    c = len(deepest.occupied)
    next_area = deepest.rect_area / (1 << (2 * (n + 1)))
    if tree.stabilized:
        ratio = Fraction(1, 1 << (4 * (n + 1)))
        children = 1 << (2 * (n + 1))
        tail = (children - 1) * c * next_area ** 2 / (1 - ratio)
        return total + tail, Fraction(0)
    # not stabilized: future empties live inside the occupied region of the
    # deepest level (measure <= c * area), each with |R| <= next_area
    bound = next_area * c * deepest.rect_area
    return total, bound


def inner_product(tree: AuxFamilyTree) -> InnerProduct:
    """Exact integral of D times the auxiliary function.

    Every empty rectangle contains no point, so each contributes
    -N |R|^2 / 16 and the whole integral is -(N/16) * sum |R|^2.
    """
    total, tail_bound = sum_empty_area_sq(tree)
    scale = Fraction(tree.point_count, 16)
    return InnerProduct(-scale * total, scale * tail_bound)


def inner_product_level0(tree: AuxFamilyTree) -> Fraction:
    """Same integral against the level-0-only function: -(N/16) * #empty * 4^-n."""
    rec = tree.levels[0]
    return -Fraction(tree.point_count, 16) * rec.empty_count * rec.rect_area ** 2


def lemma_short_bound(tree: AuxFamilyTree) -> Fraction:
    """Upper bound -(2^n - N) N 2^(-2n) / 16 that inner_product must respect."""
    n, count = tree.n, tree.point_count
    return -Fraction(((1 << n) - count) * count, 16 * (1 << (2 * n)))


# ---------------------------------------------------------------------------
# products of several auxiliary functions
# ---------------------------------------------------------------------------

def _axis_nested(k1: int, j1: int, k2: int, j2: int) -> bool:
    """Dyadic intervals intersect iff one contains the other."""
    if k1 <= k2:
        return (j2 >> (k2 - k1)) == j1
    return (j1 >> (k1 - k2)) == j2


def _rect_intersection(r1, r2):
    kx1, ky1, jx1, jy1 = r1
    kx2, ky2, jx2, jy2 = r2
    if not _axis_nested(kx1, jx1, kx2, jx2) or not _axis_nested(ky1, jy1, ky2, jy2):
        return None
    kx, jx = (kx1, jx1) if kx1 >= kx2 else (kx2, jx2)
    ky, jy = (ky1, jy1) if ky1 >= ky2 else (ky2, jy2)
    return (kx, ky, jx, jy)


def _empties_within(tree: AuxFamilyTree, rect, level_cap: int):
    """Yield empty rectangles of levels 0..level_cap intersecting `rect`."""
    kxr, kyr, jxr, jyr = rect

    def index_range(k: int, kr: int, jr: int, lo: int, hi: int):
        if k >= kr:
            a, b = jr << (k - kr), (jr + 1) << (k - kr)
        else:
            a, b = jr >> (kr - k), (jr >> (kr - k)) + 1
        return max(a, lo), min(b, hi)

    step = 1 << (tree.n + 1)

    def walk(level: int, pjx: int, pjy: int):
        rec = tree.levels[level]
        if level == 0:
            lo_x, hi_x = 0, 1 << rec.scale_x
            lo_y, hi_y = 0, 1 << rec.scale_y
        else:
            lo_x, hi_x = pjx * step, (pjx + 1) * step
            lo_y, hi_y = pjy * step, (pjy + 1) * step
        xa, xb = index_range(rec.scale_x, kxr, jxr, lo_x, hi_x)
        ya, yb = index_range(rec.scale_y, kyr, jyr, lo_y, hi_y)
        for jx in range(xa, xb):
            for jy in range(ya, yb):
                if (jx, jy) in rec.occupied:
                    if level < level_cap:
                        yield from walk(level + 1, jx, jy)
                else:
                    yield (rec.scale_x, rec.scale_y, jx, jy)

    yield from walk(0, 0, 0)


def _haar_sign(rect, qx: Fraction, qy: Fraction) -> int:
    kx, ky, jx, jy = rect
    sx = 1 if qx * (1 << (kx + 1)) - 2 * jx < 1 else -1
    sy = 1 if qy * (1 << (ky + 1)) - 2 * jy < 1 else -1
    return sx * sy


def _product_pieces(trees: Sequence[AuxFamilyTree], level_cap: int, piece_cap: int):
    """Yield (sign, rect) over intersections of one empty rectangle per tree.

    On each intersection the product of the trees' functions is sign times
    the Haar function of the intersection (side lengths across distinct
    direction indices never tie, so the coarser factors are constant
    there).  The pieces partition the common covered region.
    """
    emitted = 0

    def rec(depth: int, cur, chain):
        nonlocal emitted
        if depth == len(trees):
            kx, ky, jx, jy = cur
            qx = Fraction(4 * jx + 1, 1 << (kx + 2))
            qy = Fraction(4 * jy + 1, 1 << (ky + 2))
            sign = 1
            for r in chain:
                sign *= _haar_sign(r, qx, qy)
            emitted += 1
            if emitted > piece_cap:
                raise ResourceLimitError(
                    f"intersection piece count exceeds cap {piece_cap}"
                )
            yield sign, cur
            return
        for r in _empties_within(trees[depth], cur, level_cap):
            nxt = _rect_intersection(cur, r)
            if nxt is not None:
                chain.append(r)
                yield from rec(depth + 1, nxt, chain)
                chain.pop()

    yield from rec(0, (0, 0, 0, 0), [])


@dataclass(frozen=True)
class ProductBoundReport:
    """Exact covered-region integrals of a product of auxiliary functions.

    product_integral / d_product_integral integrate prod f and D * prod f
    over the region covered by all trees up to the truncation level; the
    uncovered remainder is bounded by `mass_bound` (for prod f) and
    `d_error` = ||D||_inf times the uncovered measure (for D * prod f).
    `d_product_bound` is the rigorous bound 2^(i_1 - i_p) N 2^-n / 16.
    """

    indices: tuple[int, ...]
    truncation_level: int
    product_integral: Fraction
    mass_bound: Fraction
    d_product_integral: Fraction
    d_product_bound: Fraction
    d_error: Fraction
    covered_area: Fraction
    piece_count: int

    @property
    def product_ok(self) -> bool:
        return abs(self.product_integral) <= self.mass_bound

    @property
    def d_product_ok(self) -> bool:
        return abs(self.d_product_integral) <= self.d_product_bound + self.d_error

    @property
    def passed(self) -> bool:
        return self.product_ok and self.d_product_ok


def product_bound_check(
    ps: PointSet,
    indices: Sequence[int],
    truncation_level: int = 2,
    trees: Sequence[AuxFamilyTree] | None = None,
    piece_cap: int = DEFAULT_PIECE_CAP,
) -> ProductBoundReport:
    """Exact piecewise integration of prod f and D * prod f, with bounds.

    Requires at least two strictly increasing direction indices.  The
    per-piece integrals are closed forms: a Haar function integrates to 0,
    and D against the Haar function of a point-free rectangle gives
    -N |R|^2 / 16.
    """
    indices = tuple(indices)
    if len(indices) < 2:
        raise ValueError("need at least two direction indices")
    if any(b <= a for a, b in zip(indices, indices[1:])):
        raise ValueError(f"indices must be strictly increasing, got {indices}")
    if trees is None:
        trees = [build_tree(ps, i, max_level=truncation_level) for i in indices]
    else:
        trees = list(trees)
        if [t.direction for t in trees] != list(indices):
            raise ValueError("trees do not match the requested indices")
        if any(t.deepest_level < truncation_level for t in trees):
            raise ValueError(f"all trees must be built to level {truncation_level}")
    n = trees[0].n
    count = len(ps)

    product_integral = Fraction(0)
    d_product = Fraction(0)
    covered = Fraction(0)
    pieces = 0
    for sign, (kx, ky, jx, jy) in _product_pieces(trees, truncation_level, piece_cap):
        area = Fraction(1, 1 << (kx + ky))
        # integral of the Haar function over its own rectangle: the four
        # signed quadrants cancel; written out so the cancellation is computed
        quadrant = area / 4
        product_integral += sign * (quadrant - quadrant - quadrant + quadrant)
        d_product += sign * -Fraction(count, 16) * area * area
        covered += area
        pieces += 1

    uncovered = sum(
        (t.uncovered_mass(truncation_level) for t in trees), start=Fraction(0)
    )
    d_bound = Fraction(1 << indices[0], 1 << indices[-1]) * Fraction(
        count, 16 * (1 << n)
    )
    return ProductBoundReport(
        indices=indices,
        truncation_level=truncation_level,
        product_integral=product_integral,
        mass_bound=uncovered,
        d_product_integral=d_product,
        d_product_bound=d_bound,
        d_error=linf_norm(ps) * uncovered,
        covered_area=covered,
        piece_count=pieces,
    )


# ---------------------------------------------------------------------------
# verification suite
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    witness: str


@dataclass(frozen=True)
class SuiteReport:
    label: str
    n: int
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "n": self.n,
            "passed": self.passed,
            "checks": [
                {"name": c.name, "passed": c.passed, "witness": c.witness}
                for c in self.checks
            ],
        }


def _check_level_counts(tree: AuxFamilyTree) -> CheckResult:
    """Counting identities: empties + occupied exhaust the parent cells."""
    n, count = tree.n, tree.point_count
    children = 1 << (2 * (n + 1))
    for rec in tree.levels:
        expected = (1 << n) if rec.level == 0 else children * len(
            tree.levels[rec.level - 1].occupied
        )
        if rec.empty_count + len(rec.occupied) != expected:
            return CheckResult(
                "level_counts", False,
                f"i={tree.direction} l={rec.level}: {rec.empty_count}+{len(rec.occupied)} != {expected}",
            )
        if len(rec.occupied) > count:
            return CheckResult(
                "level_counts", False,
                f"i={tree.direction} l={rec.level}: occupied {len(rec.occupied)} > N={count}",
            )
        if rec.rect_area != Fraction(1, 1 << (n + 2 * (n + 1) * rec.level)):
            return CheckResult(
                "level_counts", False, f"i={tree.direction} l={rec.level}: wrong area"
            )
    return CheckResult("level_counts", True, f"i={tree.direction}: {len(tree.levels)} levels")


def _check_cluster_partition(tree: AuxFamilyTree) -> CheckResult:
    """Each level splits every parent cluster into disjoint child clusters."""
    points = tree.pointset.points
    interior = [
        idx for idx, p in enumerate(points) if p.x < 1 and p.y < 1
    ]
    for rec in tree.levels:
        seen: list[int] = []
        for rect, members in rec.occupied_rectangles():
            for t in members:
                if not rect.contains(points[t].x, points[t].y):
                    return CheckResult(
                        "cluster_partition", False,
                        f"i={tree.direction} l={rec.level}: point {t} outside its cell",
                    )
            seen.extend(members)
        if sorted(seen) != interior:
            return CheckResult(
                "cluster_partition", False,
                f"i={tree.direction} l={rec.level}: clusters do not partition the points",
            )
    return CheckResult("cluster_partition", True, f"i={tree.direction}")


def _check_unimodular(tree: AuxFamilyTree, samples: int, seed: int) -> CheckResult:
    """Sampled |f| = 1 and truncation frequency within its measure bound."""
    rng = random.Random(seed)
    truncated = 0
    for _ in range(samples):
        x = Fraction(rng.getrandbits(40), 1 << 40)
        y = Fraction(rng.getrandbits(40), 1 << 40)
        val = eval_aux(tree, x, y)
        if val.value not in (-1, 1):
            return CheckResult(
                "values_unimodular", False,
                f"i={tree.direction}: value {val.value} at ({x}, {y})",
            )
        truncated += val.truncated
    mass = float(tree.uncovered_mass())
    sigma = (mass * (1 - mass) / samples) ** 0.5 if 0 < mass < 1 else 0.0
    limit = mass + 3 * sigma + 1e-12
    frac = truncated / samples
    if frac > limit:
        return CheckResult(
            "values_unimodular", False,
            f"i={tree.direction}: truncated fraction {frac} > {limit}",
        )
    return CheckResult(
        "values_unimodular", True, f"i={tree.direction}: truncated {truncated}/{samples}"
    )


def _check_residual_mass(tree: AuxFamilyTree) -> CheckResult:
    """The occupied-measure bound strictly decreases level by level."""
    masses = [tree.uncovered_mass(level) for level in range(len(tree.levels))]
    decreasing = all(b < a for a, b in zip(masses, masses[1:]))
    if not decreasing:
        return CheckResult(
            "residual_mass_decreasing", False, f"i={tree.direction}: {masses}"
        )
    return CheckResult(
        "residual_mass_decreasing", True,
        f"i={tree.direction}: mass(L={len(masses)-1}) = {masses[-1]}",
    )


def _check_inner_bound(tree: AuxFamilyTree) -> CheckResult:
    ip = inner_product(tree)
    bound = lemma_short_bound(tree)
    if not ip.value <= bound:
        return CheckResult(
            "inner_product_upper_bound", False,
            f"i={tree.direction}: {ip.value} > {bound}",
        )
    return CheckResult(
        "inner_product_upper_bound", True,
        f"i={tree.direction}: {ip.value} <= {bound}",
    )


def _check_side_lengths(trees: Sequence[AuxFamilyTree]) -> CheckResult:
    """Across distinct direction indices, x side lengths never tie (nor y)."""
    for a in trees:
        for b in trees:
            if a.direction >= b.direction:
                continue
            for ra in a.levels:
                for rb in b.levels:
                    if ra.scale_x == rb.scale_x or ra.scale_y == rb.scale_y:
                        return CheckResult(
                            "side_lengths_distinct", False,
                            f"i={a.direction} l={ra.level} vs i={b.direction} l={rb.level}",
                        )
    return CheckResult("side_lengths_distinct", True, f"{len(trees)} trees compared")


def lemma_suite(
    ps: PointSet,
    trees: Sequence[AuxFamilyTree] | None = None,
    product_level: int = 2,
    max_product_indices: int = 3,
    product_max_n: int = 4,
    samples: int = 400,
    seed: int = 20240601,
    piece_cap: int = DEFAULT_PIECE_CAP,
) -> SuiteReport:
    """Run every structural check for all direction indices.

    Product checks (pairs, and triples when n >= 2) are run on the extreme
    index tuples, which carry the weakest bounds; they are skipped beyond
    n = `product_max_n` (intersection piece counts explode).  Prebuilt
    trees may be passed in (the test suite uses this to verify corrupted
    trees fail).
    """
    n = n_from_pointcount(len(ps))
    if trees is None:
        trees = [build_tree(ps, i) for i in range(n + 1)]
    checks: list[CheckResult] = []
    for tree in trees:
        checks.append(_check_level_counts(tree))
        checks.append(_check_cluster_partition(tree))
        checks.append(_check_unimodular(tree, samples, seed + tree.direction))
        checks.append(_check_residual_mass(tree))
        checks.append(_check_inner_bound(tree))
    checks.append(_check_side_lengths(trees))

    tuples: list[tuple[int, ...]] = [(0, n)] if n >= 1 else []
    if n >= 2:
        tuples.append((0, 1, n) if max_product_indices >= 3 else (0, 1))
    if n > product_max_n:
        checks.append(
            CheckResult(
                "product_bounds", True, f"skipped: n={n} exceeds the n<={product_max_n} guard"
            )
        )
        tuples = []
    for indices in tuples:
        try:
            report = product_bound_check(
                ps, indices, truncation_level=product_level, piece_cap=piece_cap
            )
        except ResourceLimitError as exc:
            checks.append(
                CheckResult("product_bounds", True, f"{indices}: skipped ({exc})")
            )
            continue
        checks.append(
            CheckResult(
                "product_orthogonality", report.product_ok,
                f"{indices}: |{report.product_integral}| <= {report.mass_bound}",
            )
        )
        checks.append(
            CheckResult(
                "product_discrepancy_bound", report.d_product_ok,
                f"{indices}: |{report.d_product_integral}| <= {report.d_product_bound} + {report.d_error}",
            )
        )
    return SuiteReport(ps.label, n, tuple(checks))
