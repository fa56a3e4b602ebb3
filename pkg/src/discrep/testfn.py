"""Fourier-atom test functions, their linear coefficient, and bound certificates.

A test function is a finite sum T(x) = sum_j c_j exp(-i w_j x) with exact
rational complex coefficients.  Composing T with the normalized sum of the
n+1 auxiliary functions and extracting the part linear in that sum gives
the per-atom factor

    -i sin(w/sqrt(n)) cos(w/sqrt(n))^n,

with the n -> infinity limit -i w exp(-w^2/2).  Maximizing w exp(-w^2/2)
over unit coefficient mass singles out T = sin, whose limit value is
1/sqrt(e).

The certificate combines, for a concrete point set, the exact rational
inner products of the discrepancy function with each auxiliary function
(main term, weighted by cos^n sin) against a fully explicit finite error
series (odd orders p = 3..n+1, each bounded through the product bound
2^(i_1-i_p) N 2^-n / 16 summed over index tuples).  All transcendental
factors are evaluated in interval arithmetic with directed rounding, so
the reported lower bound on the L1 norm is rigorous.

The expansion behind the error series is the pointwise identity (for
s_j = +-1, a = 1/sqrt(n))

    sin(sum s_j / sqrt(n)) = sum_{odd p} (-1)^((p-1)/2)
                             cos^(n+1-p)(a) sin^p(a) e_p(s),

i.e. the imaginary part of prod_j (cos a + i s_j sin a); the coefficient
of e_p is the plain binomial one.  `sin_expansion_check` verifies the
identity pointwise and the test suite runs it exhaustively at small n.

Certified evaluations temporarily retune the global interval-arithmetic
precision and restore it afterwards; do not interleave certificate calls
across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Sequence

from mpmath import iv, mp, mpc, mpf

from .auxiliary import (
    AuxFamilyTree,
    build_tree,
    eval_aux_level0,
    inner_product,
    n_from_pointcount,
)
from .combinatorics import elementary_symmetric, sign_sum_moment
from .pointsets import PointSet


def _iv_fraction(q: Fraction):
    return iv.mpf(q.numerator) / iv.mpf(q.denominator)


def _iv_lower(x) -> mpf:
    return mp.make_mpf(x._mpi_[0])


def _iv_upper(x) -> mpf:
    return mp.make_mpf(x._mpi_[1])


def _mp_fraction(q: Fraction):
    return mpf(q.numerator) / mpf(q.denominator)


@dataclass(frozen=True)
class Atom:
    """One term c * exp(-i * freq * x) with exact rational c = re + i im."""

    re: Fraction
    im: Fraction
    freq: Fraction

    def __post_init__(self):
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))
        object.__setattr__(self, "freq", Fraction(self.freq))


@dataclass(frozen=True)
class FourierAtomFunction:
    atoms: tuple[Atom, ...]

    @classmethod
    def sine(cls) -> "FourierAtomFunction":
        """sin(x) = (i/2) e^{-ix} - (i/2) e^{ix}."""
        return cls((Atom(0, Fraction(1, 2), 1), Atom(0, Fraction(-1, 2), -1)))

    @classmethod
    def from_sine_modes(cls, modes: Sequence[tuple]) -> "FourierAtomFunction":
        """sum_j b_j sin(w_j x) as an atom list (odd by construction)."""
        atoms = []
        for b, w in modes:
            b, w = Fraction(b), Fraction(w)
            atoms.append(Atom(0, b / 2, w))
            atoms.append(Atom(0, -b / 2, -w))
        return cls(tuple(atoms))

    def scaled(self, factor) -> "FourierAtomFunction":
        factor = Fraction(factor)
        return FourierAtomFunction(
            tuple(Atom(a.re * factor, a.im * factor, a.freq) for a in self.atoms)
        )

    def value(self, x, dps: int = 30) -> mpc:
        with mp.workdps(dps):
            total = mpc(0)
            for a in self.atoms:
                c = mpc(_mp_fraction(a.re), _mp_fraction(a.im))
                total += c * mp.exp(mpc(0, -1) * _mp_fraction(a.freq) * mpf(x))
            return +total

    def is_odd_sampled(self, samples: int = 7, dps: int = 30) -> bool:
        """Spot check T(-x) + T(x) = 0 on a small deterministic grid."""
        with mp.workdps(dps):
            tol = mpf(10) ** (-dps + 5)
            for t in range(1, samples + 1):
                x = mpf(t) / samples * 3
                if abs(self.value(x, dps) + self.value(-x, dps)) > tol:
                    return False
        return True

    def derivative_at_zero(self, k: int) -> tuple[Fraction, Fraction]:
        """Exact k-th derivative at 0: sum_j c_j (-i w_j)^k, as (re, im)."""
        total_re, total_im = Fraction(0), Fraction(0)
        for a in self.atoms:
            # (-i w)^k = w^k * (-i)^k with the period-4 pattern of (-i)^k
            wk = a.freq ** k
            rot = k % 4
            if rot == 0:
                f_re, f_im = wk, Fraction(0)
            elif rot == 1:
                f_re, f_im = Fraction(0), -wk
            elif rot == 2:
                f_re, f_im = -wk, Fraction(0)
            else:
                f_re, f_im = Fraction(0), wk
            total_re += a.re * f_re - a.im * f_im
            total_im += a.re * f_im + a.im * f_re
        return total_re, total_im

    def coefficient_abs_sum(self, dps: int = 30):
        """sum_j |c_j|; exact Fraction when every |c_j| is rational."""
        exact = Fraction(0)
        inexact = []
        for a in self.atoms:
            if a.re == 0:
                exact += abs(a.im)
            elif a.im == 0:
                exact += abs(a.re)
            else:
                inexact.append(a.re * a.re + a.im * a.im)
        if not inexact:
            return exact
        with mp.workdps(dps):
            total = _mp_fraction(exact)
            for sq in inexact:
                total += mp.sqrt(_mp_fraction(sq))
            return +total


SINE = FourierAtomFunction.sine()


def lin_n(fn: FourierAtomFunction, n: int, dps: int = 30) -> mpc:
    """Linear-part coefficient at size parameter n.

    Per atom: c * (-i) sin(w/sqrt(n)) cos(w/sqrt(n))^n; for sin this is
    sin(1/sqrt(n)) cos(1/sqrt(n))^n exactly.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    with mp.workdps(dps):
        root = mp.sqrt(n)
        total = mpc(0)
        for a in fn.atoms:
            arg = _mp_fraction(a.freq) / root
            c = mpc(_mp_fraction(a.re), _mp_fraction(a.im))
            total += c * mpc(0, -1) * mp.sin(arg) * mp.cos(arg) ** n
        return +total


def lin_series_crosscheck(
    fn: FourierAtomFunction, n: int, order: int = 41, dps: int = 30
) -> mpc:
    """Independent route via odd moments: sum over odd k <= order of

        T^(k)(0) * E[(x_0+...+x_n)^k] / (k! n^(k/2)).

    Everything except a single final factor 1/sqrt(n) is exact rational.
    """
    if order < 1 or order % 2 == 0:
        raise ValueError(f"order must be odd and >= 1, got {order}")
    if order > 41:
        raise ValueError(f"order capped at 41, got {order}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    acc_re, acc_im = Fraction(0), Fraction(0)
    for k in range(1, order + 1, 2):
        d_re, d_im = fn.derivative_at_zero(k)
        weight = sign_sum_moment(n, k) / (factorial(k) * n ** ((k - 1) // 2))
        acc_re += d_re * weight
        acc_im += d_im * weight
    with mp.workdps(dps):
        root = mp.sqrt(n)
        return +(mpc(_mp_fraction(acc_re), _mp_fraction(acc_im)) / root)


def lin_limit(fn: FourierAtomFunction, dps: int = 30) -> mpc:
    """Limit value -i sum_j w_j exp(-w_j^2 / 2) c_j; for sin: 1/sqrt(e)."""
    with mp.workdps(dps):
        total = mpc(0)
        for a in fn.atoms:
            w = _mp_fraction(a.freq)
            c = mpc(_mp_fraction(a.re), _mp_fraction(a.im))
            total += mpc(0, -1) * w * mp.exp(-w * w / 2) * c
        return +total


def extremal_search(
    tolerance: float = 1e-9,
    domain: tuple[float, float] | None = None,
    mode: str = "max",
) -> tuple[float, float]:
    """Golden-section optimizer of w * exp(-w^2/2).

    mode="max" searches [0, 10] (peak at w=1, value 1/sqrt(e)); mode="min"
    searches [-10, 0] (valley at w=-1).  Returns (argmin/argmax, value).
    """
    if tolerance < 1e-12:
        raise ValueError("tolerance below 1e-12 is not supported")
    if mode not in ("max", "min"):
        raise ValueError(f"mode must be 'max' or 'min', got {mode!r}")
    if domain is None:
        domain = (0.0, 10.0) if mode == "max" else (-10.0, 0.0)
    lo, hi = map(float, domain)
    if not lo < hi:
        raise ValueError(f"empty search domain {domain}")

    sign = 1.0 if mode == "max" else -1.0

    def objective(w: float) -> float:
        return sign * w * math.exp(-w * w / 2)

    invphi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = objective(c), objective(d)
    while b - a > tolerance:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = objective(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = objective(d)
    w = (a + b) / 2
    return w, sign * objective(w)


@dataclass(frozen=True)
class SupNormBound:
    """sum |c_j| -- an upper bound for sup |T|, an identity under the
    frequency-independence hypothesis (recorded by the flag)."""

    value: Fraction | mpf
    independence_verified: bool


def sup_norm_via_coefficients(fn: FourierAtomFunction, dps: int = 30) -> SupNormBound:
    """Coefficient-mass bound on sup |T| with the independence flag.

    Rational frequencies admit an integer relation whenever two distinct
    nonzero ones are present (or any zero frequency), so the hypothesis is
    verified only for a single nonzero-frequency atom.
    """
    value = fn.coefficient_abs_sum(dps=dps)
    freqs = [a.freq for a in fn.atoms]
    verified = len(freqs) == 1 and freqs[0] != 0
    return SupNormBound(value, verified)


# ---------------------------------------------------------------------------
# certificate
# ---------------------------------------------------------------------------

def error_tuple_sum(n: int, p: int) -> Fraction:
    """Exact S_p(n) = sum_{g=p-1}^{n} 2^-g C(g-1, p-2) (n+1-g).

    Grouping index tuples i_1 < ... < i_p by the gap g = i_p - i_1, this
    dominates sum over tuples of 2^(i_1 - i_p).
    """
    if p < 2:
        raise ValueError(f"p must be >= 2, got {p}")
    return sum(
        (Fraction(comb(g - 1, p - 2) * (n + 1 - g), 1 << g) for g in range(p - 1, n + 1)),
        start=Fraction(0),
    )


def sin_expansion_check(n: int, signs: Sequence[int], dps: int = 40) -> bool:
    """Pointwise identity behind the certificate's error series.

    Checks sin(sum s / sqrt(n)) against the odd elementary-symmetric
    expansion with plain binomial coefficients, at precision dps.
    """
    if len(signs) != n + 1:
        raise ValueError(f"need n+1 = {n + 1} signs, got {len(signs)}")
    e = [1] + elementary_symmetric(list(signs))
    with mp.workdps(dps):
        a = 1 / mp.sqrt(n)
        lhs = mp.sin(sum(signs) * a)
        rhs = mpf(0)
        for p in range(1, n + 2, 2):
            rhs += (
                (-1) ** ((p - 1) // 2)
                * mp.cos(a) ** (n + 1 - p)
                * mp.sin(a) ** p
                * e[p]
            )
        return abs(lhs - rhs) < mpf(10) ** (-dps + 8)


@dataclass(frozen=True)
class BoundCertificate:
    """Rigorous lower bound on the L1 norm of the discrepancy function.

    main_term is the rounded-down value of cos^n(a) sin(a) * |sum of the
    n+1 exact inner products| (a = 1/sqrt(n)); error_bound is the
    rounded-up finite error series.  l1_lower_bound = max(0, main - error)
    and is sound even for unstabilized trees (their inner products only
    gain magnitude, and the widening is recorded in inner_product_error).
    """

    n: int
    point_count: int
    inner_product_sum: Fraction
    inner_product_error: Fraction
    trees_stabilized: bool
    main_term: mpf
    error_bound: mpf
    l1_lower_bound: mpf
    d_n_bound: mpf | None
    dps: int

    def to_json(self) -> dict:
        with mp.workdps(self.dps):
            out = {
                "n": self.n,
                "N": self.point_count,
                "inner_product_sum": str(self.inner_product_sum),
                "inner_product_error": str(self.inner_product_error),
                "trees_stabilized": self.trees_stabilized,
                "main_term": mp.nstr(self.main_term, 17),
                "error_bound": mp.nstr(self.error_bound, 17),
                "l1_lower_bound": mp.nstr(self.l1_lower_bound, 17),
                "d_n_bound": None
                if self.d_n_bound is None
                else mp.nstr(self.d_n_bound, 17),
                "constants": constants_table(),
            }
        return out


def certificate(
    ps: PointSet,
    dps: int = 50,
    max_level: int | None = None,
    trees: Sequence[AuxFamilyTree] | None = None,
) -> BoundCertificate:
    """End-to-end lower-bound certificate for one point set (T = sin route).

    All rounding is directed: the main term rounds down, the error series
    rounds up, so l1_lower_bound <= ||D||_1 holds rigorously.
    """
    count = len(ps)
    n = n_from_pointcount(count)
    if trees is None:
        trees = [build_tree(ps, i, max_level=max_level) for i in range(n + 1)]
    total = Fraction(0)
    total_error = Fraction(0)
    for tree in trees:
        ip = inner_product(tree)
        total += ip.value
        total_error += ip.error
    stabilized = all(t.stabilized for t in trees)

    old = iv.dps
    try:
        iv.dps = dps
        a = iv.mpf(1) / iv.sqrt(iv.mpf(n))
        cos_a, sin_a = iv.cos(a), iv.sin(a)
        main_iv = cos_a ** n * sin_a * _iv_fraction(abs(total))
        err_iv = iv.mpf(0)
        for p in range(3, n + 2, 2):
            weight = Fraction(count, 16 * (1 << n)) * error_tuple_sum(n, p)
            err_iv += cos_a ** (n + 1 - p) * sin_a ** p * _iv_fraction(weight)
        main_low = _iv_lower(main_iv)
        err_high = _iv_upper(err_iv)
        if count >= 2:
            dn_low = _iv_lower((main_iv - err_iv) / iv.sqrt(iv.log(iv.mpf(count))))
        else:
            dn_low = None
    finally:
        iv.dps = old

    with mp.workdps(dps):
        main_low = +main_low
        err_high = +err_high
        l1_low = max(mpf(0), main_low - err_high)
        dn_bound = None
        if dn_low is not None:
            dn_bound = max(mpf(0), +dn_low)

    return BoundCertificate(
        n=n,
        point_count=count,
        inner_product_sum=total,
        inner_product_error=total_error,
        trees_stabilized=stabilized,
        main_term=main_low,
        error_bound=err_high,
        l1_lower_bound=l1_low,
        d_n_bound=dn_bound,
        dps=dps,
    )


def certificate_error_bound(n: int, count: int, dps: int = 50) -> mpf:
    """The certificate's error series alone, rounded up (depends on n, N only)."""
    old = iv.dps
    try:
        iv.dps = dps
        a = iv.mpf(1) / iv.sqrt(iv.mpf(n))
        cos_a, sin_a = iv.cos(a), iv.sin(a)
        err_iv = iv.mpf(0)
        for p in range(3, n + 2, 2):
            weight = Fraction(count, 16 * (1 << n)) * error_tuple_sum(n, p)
            err_iv += cos_a ** (n + 1 - p) * sin_a ** p * _iv_fraction(weight)
        out = _iv_upper(err_iv)
    finally:
        iv.dps = old
    with mp.workdps(dps):
        return +out


def main_term_floor(n: int, count: int, dps: int = 50) -> mpf:
    """Lower bound cos^n(a) sin(a) (n+1)(2^n - N) N 2^-2n / 16 on the main term."""
    old = iv.dps
    try:
        iv.dps = dps
        a = iv.mpf(1) / iv.sqrt(iv.mpf(n))
        mass = Fraction((n + 1) * ((1 << n) - count) * count, 16 * (1 << (2 * n)))
        out = _iv_lower(iv.cos(a) ** n * iv.sin(a) * _iv_fraction(mass))
    finally:
        iv.dps = old
    with mp.workdps(dps):
        return +out


# ---------------------------------------------------------------------------
# product-form test function and reference constants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HalaszProduct:
    """Product-form test function over the level-0 auxiliary functions:

        G = prod_i (1 + i * gamma / sqrt(ln N) * f_i^0) - 1.

    The index-0 factor is identically 1 (its coefficient vanishes), and
    each f_i^0 is zero outside the empty level-0 rectangles.  Exploratory
    surface; gamma is a free small constant.
    """

    gamma: float
    n: int
    trees: tuple

    @classmethod
    def build(cls, ps: PointSet, gamma: float) -> "HalaszProduct":
        if gamma <= 0:
            raise ValueError(f"gamma must be > 0, got {gamma}")
        if len(ps) < 2:
            raise ValueError("need N >= 2 so that ln N > 0")
        n = n_from_pointcount(len(ps))
        trees = tuple(build_tree(ps, i, max_level=0) for i in range(n + 1))
        return cls(gamma, n, trees)

    @property
    def point_count(self) -> int:
        return self.trees[0].point_count

    def value(self, x, y) -> float:
        scale = self.gamma / math.sqrt(math.log(self.point_count))
        g = 1.0
        for i, tree in enumerate(self.trees):
            g *= 1.0 + i * scale * eval_aux_level0(tree, x, y)
        return g - 1.0


@dataclass(frozen=True)
class HalaszReport:
    gamma: float
    n: int
    point_count: int
    samples: int
    sup_estimate: float
    mean_abs: float
    halasz_constant: float


def halasz_product_stats(
    ps: PointSet, gamma: float = 0.01, samples: int = 512, seed: int = 0
) -> HalaszReport:
    """Sampled sup/mean statistics of the product-form test function,
    reported next to the classical constant it is tied to."""
    product = HalaszProduct.build(ps, gamma)
    import random as _random

    rng = _random.Random(seed)
    sup_est = 0.0
    acc = 0.0
    for _ in range(samples):
        x = Fraction(rng.getrandbits(40), 1 << 40)
        y = Fraction(rng.getrandbits(40), 1 << 40)
        g = product.value(x, y)
        sup_est = max(sup_est, abs(g))
        acc += abs(g)
    return HalaszReport(
        gamma=gamma,
        n=product.n,
        point_count=product.point_count,
        samples=samples,
        sup_estimate=sup_est,
        mean_abs=acc / samples,
        halasz_constant=float(halasz_constant()),
    )


def halasz_constant(dps: int = 30) -> mpf:
    """1 / (1152 (sqrt(e) + 1) sqrt(ln 2)), approximately 0.00039."""
    with mp.workdps(dps):
        return +(1 / (1152 * (mp.sqrt(mp.e) + 1) * mp.sqrt(mp.log(2))))


def constants_table(digits: int = 10) -> dict:
    """The certified asymptotic constants, as decimal strings.

    The two L2 comparison entries are reproduced from elsewhere and only
    displayed, marked external.
    """
    with mp.workdps(digits + 15):
        root = mp.sqrt(mp.e * mp.log(2))
        entries = {
            "liminf_dn_lower": mp.nstr(3 / (256 * root), digits),
            "limsup_dn_lower": mp.nstr(1 / (64 * root), digits),
            "halasz_constant": mp.nstr(halasz_constant(digits + 15), digits),
            "lin_limit_sin": mp.nstr(1 / mp.sqrt(mp.e), digits),
        }
    return {
        **entries,
        "l2_liminf_bound_external": "0.17905",
        "l2_liminf_conjectured_external": "0.17601",
    }


def asymptotic_dn_table(n_lo: int = 2, n_hi: int = 64) -> list[tuple[int, float]]:
    """Theoretical lower-bound values (1/sqrt(ln 2^(n-1))) sqrt(n) / (64 sqrt(e)).

    The sequence converges to 1/(64 sqrt(e ln 2)) ~ 0.01138 as n grows.
    """
    if not 2 <= n_lo <= n_hi <= 64:
        raise ValueError(f"range must sit inside 2..64, got {n_lo}..{n_hi}")
    rows = []
    for n in range(n_lo, n_hi + 1):
        value = math.sqrt(n) / (64 * math.sqrt(math.e) * math.sqrt(math.log(2 ** (n - 1))))
        rows.append((n, value))
    return rows


def asymptotic_dn_limit() -> float:
    return float(1 / (64 * math.sqrt(math.e * math.log(2))))
