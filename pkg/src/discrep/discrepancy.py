"""Norms and inner products of the two-dimensional discrepancy function.

For a point multiset P of size N the discrepancy function is

    D(x, y) = #{p in P : p_x <= x, p_y <= y}  -  N * x * y

(closed boxes).  The counting part is constant on the open cells of the
grid cut by the point coordinates, so on each cell D = c - N*x*y with an
integer c, and every norm reduces to closed-form cell integrals:

  * L2: polynomial on each cell -> exact rational; cross-checked against
    the O(N^2) pairwise closed form (sums of (1 - max) products).
  * L1: |c - N*x*y| integrates in closed form; when the hyperbola
    xy = c/N crosses a cell the antiderivative picks up a logarithm, which
    is evaluated in interval arithmetic so the result carries a rigorous
    error bound (exact rational when no cell has a sign change).
  * L-infinity: the sup is attained at (or as a one-sided limit toward) a
    grid corner; both the closed-box count and the strict count are
    examined at every candidate corner.

Monte-Carlo estimators of the L1/L2 norms serve as independent oracles.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from mpmath import iv, mp, mpf

from .dyadic import DyadicRectangle, haar_point_kernel
from .pointsets import PointSet


def _iv_fraction(q: Fraction):
    return iv.mpf(q.numerator) / iv.mpf(q.denominator)


def _iv_endpoints(x) -> tuple[mpf, mpf]:
    lo, hi = x._mpi_
    return mp.make_mpf(lo), mp.make_mpf(hi)


def _as_mpf(value) -> mpf:
    if isinstance(value, Fraction):
        return mpf(value.numerator) / mpf(value.denominator)
    return mpf(value)


@dataclass(frozen=True)
class CellDecomposition:
    """Grid cut by the point coordinates, with the counting value per open cell.

    cell_counts[i][j] is the (constant) value of the counting part of D on
    the open cell (x_cuts[i], x_cuts[i+1]) x (y_cuts[j], y_cuts[j+1]); it
    equals the closed-box count at the lower-left corner.
    """

    x_cuts: tuple[Fraction, ...]
    y_cuts: tuple[Fraction, ...]
    cell_counts: tuple[tuple[int, ...], ...]

    @classmethod
    def from_pointset(cls, ps: PointSet) -> "CellDecomposition":
        if len(ps) < 1:
            raise ValueError("point set must be nonempty")
        xs = sorted({Fraction(0), Fraction(1), *(p.x for p in ps)})
        ys = sorted({Fraction(0), Fraction(1), *(p.y for p in ps)})
        grid = [[0] * len(ys) for _ in range(len(xs))]
        for p in ps:
            grid[bisect_left(xs, p.x)][bisect_left(ys, p.y)] += 1
        # inclusive 2-D prefix sums: grid[i][j] = #{p : p_x <= xs[i], p_y <= ys[j]}
        for i in range(len(xs)):
            for j in range(1, len(ys)):
                grid[i][j] += grid[i][j - 1]
        for i in range(1, len(xs)):
            for j in range(len(ys)):
                grid[i][j] += grid[i - 1][j]
        counts = tuple(tuple(grid[i][:-1]) for i in range(len(xs) - 1))
        return cls(tuple(xs), tuple(ys), counts)

    def cells(self):
        """Yield (a, b, c, d, count) over all cells [a,b] x [c,d]."""
        for i in range(len(self.x_cuts) - 1):
            row = self.cell_counts[i]
            a, b = self.x_cuts[i], self.x_cuts[i + 1]
            for j in range(len(self.y_cuts) - 1):
                yield a, b, self.y_cuts[j], self.y_cuts[j + 1], row[j]


def eval_discrepancy(ps: PointSet, x, y) -> Fraction:
    """Exact D(x, y) with closed-box counting."""
    x, y = Fraction(x), Fraction(y)
    if not (0 <= x <= 1 and 0 <= y <= 1):
        raise ValueError(f"({x}, {y}) outside the unit square")
    count = sum(1 for p in ps if p.x <= x and p.y <= y)
    return count - len(ps) * x * y


def haar_inner_product(ps: PointSet, rect: DyadicRectangle) -> Fraction:
    """Exact integral of D * h_R over the unit square.

    Per-point kernels vanish for points outside the half-open rectangle
    (and on its left/bottom edges), so for a rectangle containing no point
    the value collapses to -N |R|^2 / 16.
    """
    acc = Fraction(0)
    for p in ps:
        kx = haar_point_kernel(rect.x, p.x)
        if kx:
            acc += kx * haar_point_kernel(rect.y, p.y)
    return acc - len(ps) * rect.area ** 2 / 16


def l2_norm_sq(ps: PointSet) -> Fraction:
    """Exact squared L2 norm of D via the O(N^2) pairwise closed form."""
    if len(ps) < 1:
        raise ValueError("point set must be nonempty")
    n = len(ps)
    pair_sum = Fraction(0)
    for p in ps:
        for q in ps:
            pair_sum += (1 - max(p.x, q.x)) * (1 - max(p.y, q.y))
    single = sum((1 - p.x ** 2) * (1 - p.y ** 2) for p in ps)
    return pair_sum - Fraction(n, 2) * single + Fraction(n * n, 9)


def l2_norm_sq_direct(ps: PointSet) -> Fraction:
    """Independent route: integrate (c - N x y)^2 cell by cell, exactly."""
    n = len(ps)
    total = Fraction(0)
    for a, b, c, d, k in CellDecomposition.from_pointset(ps).cells():
        area = (b - a) * (d - c)
        ixy = Fraction(1, 4) * (b * b - a * a) * (d * d - c * c)
        ix2y2 = Fraction(1, 9) * (b ** 3 - a ** 3) * (d ** 3 - c ** 3)
        total += k * k * area - 2 * k * n * ixy + n * n * ix2y2
    return total


@dataclass(frozen=True)
class L1Norm:
    """L1 norm of D with a rigorous error bound.

    `value` is a Fraction when every cell integrates rationally (no sign
    change anywhere); otherwise an mpf midpoint with `error` bounding the
    enclosure half-width.  `sign_change_cells` counts cells whose integral
    needed the logarithmic antiderivative.
    """

    value: Fraction | mpf
    error: Fraction | mpf
    exact: bool
    sign_change_cells: int

    def __float__(self) -> float:
        return float(self.value)


def _l1_terms(ps: PointSet):
    """Split the L1 integral into an exact rational part plus log terms.

    Returns (rational, logs) with logs a list of (coefficient, ratio) pairs
    meaning coefficient * ln(ratio); both components exact Fractions.
    """
    n = len(ps)
    rational = Fraction(0)
    logs: list[tuple[Fraction, Fraction]] = []
    for a, b, c, d, k in CellDecomposition.from_pointset(ps).cells():
        signed = k * (b - a) * (d - c) - Fraction(n, 4) * (b * b - a * a) * (d * d - c * c)
        t = Fraction(k, n)
        if t >= b * d:
            rational += signed          # c - Nxy >= 0 on the whole cell
            continue
        if t <= a * c:
            rational += -signed         # c - Nxy <= 0 on the whole cell
            continue
        # hyperbola xy = t crosses the cell: |.| = (c - Nxy) + 2 (Nxy - c)^+
        rational += signed
        x_lo = max(a, t / d)            # d > 0 here since t < b*d
        x_hi = min(b, t / c) if c > 0 else b
        if c > 0 and x_hi < b:
            # x in [x_hi, b]: the full strip c..d lies above the hyperbola
            rational += 2 * (
                Fraction(n, 4) * (b * b - x_hi * x_hi) * (d * d - c * c)
                - k * (d - c) * (b - x_hi)
            )
        if x_hi > x_lo:
            # x in [x_lo, x_hi]: y from t/x to d; antiderivative has a log
            rational += 2 * (
                Fraction(n, 4) * d * d * (x_hi * x_hi - x_lo * x_lo)
                - n * t * d * (x_hi - x_lo)
            )
            logs.append((Fraction(k * k, n), x_hi / x_lo))
    return rational, logs


def l1_norm(ps: PointSet, dps: int = 30) -> L1Norm:
    """L1 norm of D; exact rational, or certified to a relative 1e-12.

    Cell-by-cell closed-form integration; log-bearing terms are enclosed
    with interval arithmetic, doubling the working precision until the
    enclosure is tighter than 1e-12 of the value.
    """
    rational, logs = _l1_terms(ps)
    if not logs:
        return L1Norm(rational, Fraction(0), True, 0)
    for attempt_dps in (dps, 2 * dps, 4 * dps, 8 * dps):
        old = iv.dps
        try:
            iv.dps = attempt_dps
            total = _iv_fraction(rational)
            for coeff, ratio in logs:
                total += _iv_fraction(coeff) * iv.log(_iv_fraction(ratio))
        finally:
            iv.dps = old
        with mp.workdps(attempt_dps):
            lo, hi = _iv_endpoints(total)
            mid = +((lo + hi) / 2)
            err = +((hi - lo) / 2)
        if err <= 1e-12 * mid:
            return L1Norm(mid, err, False, len(logs))
    raise ArithmeticError("could not certify L1 to 1e-12 relative error")


def linf_norm(ps: PointSet) -> Fraction:
    """Exact sup of |D| over the closed square.

    The sup of D over a region of constant count sits at the lower-left
    corner (closed count); the sup of -D is the one-sided limit into the
    upper-right corner (strict count).  Both counts are evaluated at every
    candidate corner (point coordinates and 1) and the max of |.| taken.
    """
    if len(ps) < 1:
        raise ValueError("point set must be nonempty")
    n = len(ps)
    xs = sorted({Fraction(1), *(p.x for p in ps)})
    ys = sorted({Fraction(1), *(p.y for p in ps)})
    best = Fraction(0)
    for x in xs:
        for y in ys:
            closed = sum(1 for p in ps if p.x <= x and p.y <= y)
            strict = sum(1 for p in ps if p.x < x and p.y < y)
            nxy = n * x * y
            best = max(best, abs(closed - nxy), abs(strict - nxy))
    return best


def monte_carlo_norm(
    ps: PointSet, which: str = "l1", samples: int = 10**6, seed: int = 0
) -> tuple[float, float]:
    """(estimate, standard error) for the L1 norm or the squared L2 norm.

    Plain sample mean over uniform points; deterministic for a fixed seed.
    """
    if which not in ("l1", "l2"):
        raise ValueError(f"which must be 'l1' or 'l2', got {which!r}")
    if samples < 1000:
        raise ValueError(f"need at least 1000 samples, got {samples}")
    rng = np.random.default_rng(seed)
    xs = rng.random(samples)
    ys = rng.random(samples)
    counts = np.zeros(samples, dtype=np.int64)
    for p in ps:
        counts += (float(p.x) <= xs) & (float(p.y) <= ys)
    d = counts - len(ps) * xs * ys
    vals = np.abs(d) if which == "l1" else d * d
    est = float(vals.mean())
    stderr = float(vals.std(ddof=1) / math.sqrt(samples))
    return est, stderr


def d_n(ps: PointSet, dps: int = 30) -> float:
    """L1 norm divided by sqrt(ln N) -- the per-set normalized value.

    This is an upper bound on the size-N infimum quantity of the same
    shape (one concrete set only, no optimization over sets).
    """
    if len(ps) < 2:
        raise ValueError("need N >= 2 so that ln N > 0")
    norm = l1_norm(ps, dps=dps)
    return float(norm.value) / math.sqrt(math.log(len(ps)))


def norms_report(ps: PointSet, dps: int = 30) -> dict:
    """All exact norms in the JSON report shape used by the CLI."""
    l1 = l1_norm(ps, dps=dps)
    with mp.workdps(dps):
        l1_str = mp.nstr(_as_mpf(l1.value), 17)
        err_str = mp.nstr(_as_mpf(l1.error), 3)
    report = {
        "n_points": len(ps),
        "l1": l1_str,
        "l1_err": err_str,
        "l2_sq": str(l2_norm_sq(ps)),
        "linf": str(linf_norm(ps)),
    }
    if len(ps) >= 2:
        report["d_n"] = f"{d_n(ps, dps=dps):.12g}"
    return report
