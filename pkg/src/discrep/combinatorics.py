"""Sign-vector moments, odd symmetric expansions, and Newton identities.

Central object: for x_0 = 1 and x_1..x_n independent +-1 signs, the odd
moment E[(x_0 + ... + x_n)^k].  Three independent routes compute it:

  * closed form 2^-n * sum_j C(n, j) (1 + n - 2j)^k,
  * brute-force average over all 2^n sign assignments,
  * coefficient of t^k/k! in sinh(t) cosh(t)^n.

The same moment is the coefficient of the linear term when (z_0+...+z_n)^k
is expanded, under z_i^2 = 1, in the odd elementary symmetric polynomials
e_1, e_3, e_5, ...; `expansion_table` recovers the whole coefficient list
by exact linear algebra on sign-vector evaluations and re-verifies it
pointwise at every sign vector.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Sequence

from .errors import ResourceLimitError

BRUTEFORCE_MAX_N = 20
SERIES_MAX_ORDER = 200
TABLE_MAX_N = 12
TABLE_MAX_K = 11


def _require_odd(k: int):
    if k < 1 or k % 2 == 0:
        raise ValueError(f"k must be odd and >= 1, got {k}")


def sign_sum_moment(n: int, k: int) -> Fraction:
    """E[(x_0 + ... + x_n)^k] for odd k: 2^-n sum_j C(n,j) (1 + n - 2j)^k."""
    _require_odd(k)
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    return Fraction(sum(comb(n, j) * (1 + n - 2 * j) ** k for j in range(n + 1)), 1 << n)


def sign_sum_moment_bruteforce(n: int, k: int) -> Fraction:
    """Independent oracle: average (1 + sum eps)^k over all 2^n sign tuples."""
    _require_odd(k)
    if n > BRUTEFORCE_MAX_N:
        raise ResourceLimitError(f"brute force over 2^{n} assignments refused")
    total = 0
    for mask in range(1 << n):
        s = 1 + (n - 2 * bin(mask).count("1"))
        total += s ** k
    return Fraction(total, 1 << n)


@dataclass(frozen=True)
class OddMomentSeries:
    """Coefficients of t^k/k! (odd k) of sinh(t) cosh(t)^n up to degree K."""

    n: int
    truncation: int
    coefficients: dict[int, Fraction]

    def coefficient(self, k: int) -> Fraction:
        _require_odd(k)
        if k > self.truncation:
            raise ValueError(f"series truncated at {self.truncation}, asked for {k}")
        return self.coefficients[k]


def odd_moment_series(n: int, truncation: int) -> OddMomentSeries:
    """Exact truncated product series of sinh(t) * cosh(t)^n."""
    if truncation > SERIES_MAX_ORDER:
        raise ResourceLimitError(f"series order {truncation} exceeds {SERIES_MAX_ORDER}")
    size = truncation + 1
    sinh = [Fraction(0)] * size
    for m in range(1, size, 2):
        sinh[m] = Fraction(1, factorial(m))
    cosh = [Fraction(0)] * size
    for m in range(0, size, 2):
        cosh[m] = Fraction(1, factorial(m))

    def mul(a, b):
        out = [Fraction(0)] * size
        for i, ai in enumerate(a):
            if not ai:
                continue
            for j, bj in enumerate(b):
                if i + j >= size:
                    break
                if bj:
                    out[i + j] += ai * bj
        return out

    series = sinh
    for _ in range(n):
        series = mul(series, cosh)
    coeffs = {k: series[k] * factorial(k) for k in range(1, size, 2)}
    for k in range(0, size, 2):
        if series[k] != 0:
            raise ArithmeticError(f"even coefficient at degree {k} is nonzero")
    return OddMomentSeries(n, truncation, coeffs)


def elementary_symmetric(values: Sequence) -> list:
    """e_1 .. e_m of the given values (coefficients of prod (1 + v t))."""
    coeffs = [1]
    for v in values:
        coeffs = [
            (coeffs[d] if d < len(coeffs) else 0)
            + (coeffs[d - 1] * v if d >= 1 else 0)
            for d in range(len(coeffs) + 1)
        ]
    return coeffs[1:]


def power_sums(values: Sequence, upto: int) -> list:
    return [sum(v ** k for v in values) for k in range(1, upto + 1)]


def check_sign_vector(values: Sequence[int]) -> tuple[int, ...]:
    values = tuple(values)
    if not values or any(v not in (-1, 1) for v in values):
        raise ValueError("sign vector entries must be +-1")
    return values


def newton_check(values: Sequence[int], k: int) -> bool:
    """Exact Newton identity k e_k = sum (-1)^(i-1) e_{k-i} p_i at a sign vector.

    Also verifies the +-1 collapse p_k = p_1 (odd k) and p_k = m (even k).
    """
    values = check_sign_vector(values)
    m = len(values)
    if not 1 <= k <= m:
        raise ValueError(f"k must be in 1..{m}, got {k}")
    e = [1] + elementary_symmetric(values)
    p = power_sums(values, k)
    identity = k * e[k] == sum(
        (-1) ** (i - 1) * e[k - i] * p[i - 1] for i in range(1, k + 1)
    )
    collapse = p[k - 1] == (p[0] if k % 2 == 1 else m)
    return identity and collapse


@dataclass(frozen=True)
class OddExpansionTable:
    """Coefficients A_p with (z_0+...+z_n)^k = sum_p A_p e_p under z_i^2 = 1.

    Only odd p up to min(k, n+1) can occur.  `all_integer` records the
    empirical observation that the coefficients are integers.
    """

    n: int
    k: int
    coefficients: dict[int, Fraction]

    @property
    def all_integer(self) -> bool:
        return all(c.denominator == 1 for c in self.coefficients.values())

    def linear_coefficient(self) -> Fraction:
        return self.coefficients[1]

    def reconstruct(self, signs: Sequence[int]) -> Fraction:
        """Evaluate sum_p A_p e_p(signs); must equal (sum signs)^k."""
        e = [1] + elementary_symmetric(check_sign_vector(signs))
        return sum(
            (a * e[p] for p, a in self.coefficients.items()), start=Fraction(0)
        )

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "A": {str(p): str(a) for p, a in sorted(self.coefficients.items())},
        }


def _solve_exact(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    """Gaussian elimination over Fractions; None on a singular system."""
    m = len(matrix)
    a = [row[:] + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(m):
        pivot = next((r for r in range(col, m) if a[r][col] != 0), None)
        if pivot is None:
            return None
        a[col], a[pivot] = a[pivot], a[col]
        inv = a[col][col]
        a[col] = [v / inv for v in a[col]]
        for r in range(m):
            if r != col and a[r][col] != 0:
                factor = a[r][col]
                a[r] = [v - factor * w for v, w in zip(a[r], a[col])]
    return [a[r][m] for r in range(m)]


def expansion_table(n: int, k: int) -> OddExpansionTable:
    """Solve for the expansion coefficients and verify at every sign vector."""
    _require_odd(k)
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if n > TABLE_MAX_N or k > TABLE_MAX_K:
        raise ResourceLimitError(
            f"expansion table capped at n <= {TABLE_MAX_N}, k <= {TABLE_MAX_K}"
        )
    m = n + 1
    ps = [p for p in range(1, min(k, m) + 1, 2)]

    # block sign vectors: a plus-ones followed by m - a minus-ones; their
    # e_p values are coefficients of (1+t)^a (1-t)^(m-a)
    def block_row(a: int) -> tuple[list[Fraction], Fraction]:
        coeffs = [Fraction(0)] * (m + 1)
        for u in range(a + 1):
            cu = comb(a, u)
            for v in range(m - a + 1):
                if u + v <= m:
                    coeffs[u + v] += cu * comb(m - a, v) * (-1) ** v
        s = 2 * a - m
        return [coeffs[p] for p in ps], Fraction(s ** k)

    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    solution = None
    for a in range(m, -1, -1):
        row, value = block_row(a)
        rows.append(row)
        rhs.append(value)
        if len(rows) >= len(ps):
            solution = _solve_exact(
                [r[:] for r in rows[: len(ps)]], rhs[: len(ps)]
            )
            if solution is not None:
                break
            rows.pop(0)
            rhs.pop(0)
    if solution is None:
        raise ArithmeticError(f"no invertible sign-vector system for n={n}, k={k}")

    coefficients = dict(zip(ps, solution))
    for p in range(1, m + 1, 2):
        coefficients.setdefault(p, Fraction(0))  # degree forces zero past min(k, n+1)
    table = OddExpansionTable(n, k, coefficients)
    for mask in range(1 << m):
        signs = [1 - 2 * ((mask >> t) & 1) for t in range(m)]
        if table.reconstruct(signs) != sum(signs) ** k:
            raise ArithmeticError(
                f"reconstruction failed at sign vector {signs} for n={n}, k={k}"
            )
    return table
