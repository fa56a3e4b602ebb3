"""Point-set generation, transformation, and exact CSV persistence.

Point sets are finite multisets in the closed unit square with exact
rational coordinates.  The CSV form is designed so that write followed by
read is the identity on coordinates: dyadic values are written as
"a/2^k", other rationals as "p/q", integers bare.  The reader also accepts
plain decimal literals (parsed exactly from the digit string).
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator

from .dyadic import Point, as_coordinate, dyadic, dyadic_exponent, is_dyadic
from .errors import CsvFormatError, ResourceLimitError

VDC_MAX_BITS = 24

_DYADIC_LITERAL = re.compile(r"^([+-]?\d+)/2\^(\d+)$")


@dataclass(frozen=True)
class PointSet:
    """Ordered multiset of points; duplicates allowed and counted."""

    points: tuple[Point, ...]
    label: str = ""

    def __post_init__(self):
        coerced = tuple(Point(as_coordinate(p[0]), as_coordinate(p[1])) for p in self.points)
        object.__setattr__(self, "points", coerced)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[Point]:
        return iter(self.points)

    def __getitem__(self, k) -> Point:
        return self.points[k]


def _bit_reverse(k: int, bits: int) -> int:
    r = 0
    for _ in range(bits):
        r = (r << 1) | (k & 1)
        k >>= 1
    return r


def van_der_corput(m: int) -> PointSet:
    """The 2^m-point van der Corput set: (k/2^m, bitreverse_m(k)/2^m)."""
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    if m > VDC_MAX_BITS:
        raise ResourceLimitError(f"van der Corput size 2^{m} exceeds 2^{VDC_MAX_BITS} cap")
    pts = tuple(
        Point(dyadic(k, m), dyadic(_bit_reverse(k, m), m)) for k in range(1 << m)
    )
    return PointSet(pts, label=f"vdc_m{m}")


def random_uniform(n: int, seed: int) -> PointSet:
    """n i.i.d.-uniform points quantized to denominator 2^53, fixed by seed."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = random.Random(seed)
    den = 1 << 53
    pts = tuple(
        Point(Fraction(rng.getrandbits(53), den), Fraction(rng.getrandbits(53), den))
        for _ in range(n)
    )
    return PointSet(pts, label=f"uniform_n{n}_seed{seed}")


def symmetrize(ps: PointSet) -> PointSet:
    """Append the mirror image (1-x, y) of every point; cardinality doubles."""
    mirrored = tuple(Point(1 - p.x, p.y) for p in ps)
    return PointSet(ps.points + mirrored, label=f"{ps.label}+xmirror" if ps.label else "xmirror")


def parse_coordinate(text: str) -> Fraction:
    """Parse "a/2^k", "p/q", decimal, or integer literals exactly."""
    text = text.strip()
    m = _DYADIC_LITERAL.match(text)
    if m:
        return dyadic(int(m.group(1)), int(m.group(2)))
    return Fraction(text)


def format_coordinate(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    if is_dyadic(q):
        return f"{q.numerator}/2^{dyadic_exponent(q)}"
    return f"{q.numerator}/{q.denominator}"


def read_csv(path) -> PointSet:
    """Read a point set; '#' lines are comments, an "x,y" header is optional."""
    path = Path(path)
    pts = []
    label = path.stem
    with path.open("r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                if line.startswith("# label:"):
                    label = line[len("# label:"):].strip()
                continue
            if line.lower().replace(" ", "") == "x,y":
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise CsvFormatError(f"line {lineno}: expected 'x,y', got {line!r}")
            try:
                x = parse_coordinate(parts[0])
                y = parse_coordinate(parts[1])
            except (ValueError, ZeroDivisionError) as exc:
                raise CsvFormatError(f"line {lineno}: {exc}") from exc
            if not (0 <= x <= 1 and 0 <= y <= 1):
                raise CsvFormatError(f"line {lineno}: coordinate outside [0, 1]")
            pts.append(Point(x, y))
    return PointSet(tuple(pts), label=label)


def write_csv(ps: PointSet, path, comments: Iterable[str] = ()) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        if ps.label:
            fh.write(f"# label: {ps.label}\n")
        for comment in comments:
            fh.write(f"# {comment}\n")
        fh.write("x,y\n")
        for p in ps:
            fh.write(f"{format_coordinate(p.x)},{format_coordinate(p.y)}\n")
