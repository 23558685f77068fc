"""Sound interval arithmetic with outward rounding, plus box utilities.

An :class:`Interval` is a closed interval ``[lo, hi]`` with finite float
endpoints.  Every arithmetic result encloses the exact real-arithmetic image
set: each primitive that may round widens its endpoints outward by one unit
in the last place (two for transcendental library calls), so soundness never
depends on a settable rounding mode.

The trigonometric extensions ``iv_sin`` / ``iv_cos`` bracket sin and cos by
truncated Maclaurin partial sums whose tails are sign-controlled on
``[-pi, pi]``; arguments outside the handled subdomains fall back to the
trivial enclosure ``[-1, 1]``, so both functions are total.

A :class:`Box` is a product of intervals, one per named variable; it is the
search-space object bisected by the optimizer.  ``refined_eval`` sharpens an
interval objective by slicing the widest dimension into equal slabs and
hulling the slab enclosures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import DegenerateSplit, DivisionByZeroInterval, DomainError, IntervalError

_INF = math.inf


def _down(x: float) -> float:
    return math.nextafter(x, -_INF)


def _up(x: float) -> float:
    return math.nextafter(x, _INF)


# Two-sided enclosure of pi at native precision.  math.pi is the nearest
# double to pi; stepping one ulp in each direction is sound regardless of
# which side it lies on.
PI_LO = _down(math.pi)
PI_HI = _up(math.pi)


@dataclass(frozen=True, slots=True)
class Interval:
    """Closed real interval with finite endpoints, ``lo <= hi``."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise IntervalError(f"non-finite endpoint in [{self.lo}, {self.hi}]")
        if self.lo > self.hi:
            raise IntervalError(f"inverted interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x: float) -> "Interval":
        return cls(x, x)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def is_degenerate(self) -> bool:
        return self.lo == self.hi

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def encloses(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    # -- arithmetic (outward rounded) ------------------------------------

    def __add__(self, other: "Interval") -> "Interval":
        return Interval(_down(self.lo + other.lo), _up(self.hi + other.hi))

    def __sub__(self, other: "Interval") -> "Interval":
        return Interval(_down(self.lo - other.hi), _up(self.hi - other.lo))

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __mul__(self, other: "Interval") -> "Interval":
        p1 = self.lo * other.lo
        p2 = self.lo * other.hi
        p3 = self.hi * other.lo
        p4 = self.hi * other.hi
        return Interval(_down(min(p1, p2, p3, p4)), _up(max(p1, p2, p3, p4)))

    def __truediv__(self, other: "Interval") -> "Interval":
        if other.lo <= 0.0 <= other.hi:
            raise DivisionByZeroInterval(f"divisor {other} contains zero")
        q1 = self.lo / other.lo
        q2 = self.lo / other.hi
        q3 = self.hi / other.lo
        q4 = self.hi / other.hi
        return Interval(_down(min(q1, q2, q3, q4)), _up(max(q1, q2, q3, q4)))

    # -- elementary functions --------------------------------------------

    def sqr(self) -> "Interval":
        a, b = abs(self.lo), abs(self.hi)
        if a > b:
            a, b = b, a
        hi = _up(b * b)
        if self.lo <= 0.0 <= self.hi:
            return Interval(0.0, hi)
        return Interval(max(0.0, _down(a * a)), hi)

    def abs(self) -> "Interval":
        if self.lo <= 0.0 <= self.hi:
            return Interval(0.0, max(-self.lo, self.hi))
        if self.hi < 0.0:
            return Interval(-self.hi, -self.lo)
        return self

    def pow_int(self, k: int) -> "Interval":
        if not isinstance(k, int) or k < 1:
            raise DomainError(f"integer power requires k >= 1, got {k!r}")
        if k == 1:
            return self
        if k == 2:
            return self.sqr()
        if k % 2 == 1:
            return Interval(_down(_down(self.lo**k)), _up(_up(self.hi**k)))
        a, b = abs(self.lo), abs(self.hi)
        if a > b:
            a, b = b, a
        hi = _up(_up(b**k))
        if self.lo <= 0.0 <= self.hi:
            return Interval(0.0, hi)
        return Interval(max(0.0, _down(_down(a**k))), hi)

    def sqrt(self) -> "Interval":
        if self.lo < 0.0:
            raise DomainError(f"sqrt of interval {self} with negative part")
        return Interval(max(0.0, _down(math.sqrt(self.lo))), _up(math.sqrt(self.hi)))

    def exp(self) -> "Interval":
        return Interval(
            max(0.0, _down(_down(math.exp(self.lo)))), _up(_up(math.exp(self.hi)))
        )

    def __repr__(self) -> str:
        return f"[{self.lo!r}, {self.hi!r}]"


# ---------------------------------------------------------------------------
# sin / cos extensions via bracketing Maclaurin partial sums
# ---------------------------------------------------------------------------


def _sin_series_bounds(x: float, degree: int) -> tuple[float, float]:
    """Bounds for sin(x) valid on |x| <= PI_HI, from partial sums of the
    Maclaurin series.  The tail after the first kept term is alternating with
    decreasing magnitude on this range, so consecutive partial sums bracket
    the true value."""
    if x < 0.0:
        lo, hi = _sin_series_bounds(-x, degree)
        return -hi, -lo
    m = max(1, (degree - 1) // 2)  # index of last kept series term
    xi = Interval.point(x)
    x2 = xi.sqr()
    signed_term = xi
    s = xi  # S_0
    partial_m = partial_m1 = None
    for k in range(1, m + 2):
        denom = Interval.point(float(2 * k * (2 * k + 1)))
        signed_term = -(signed_term * x2) / denom
        s = s + signed_term
        if k == m:
            partial_m = s
        elif k == m + 1:
            partial_m1 = s
    assert partial_m is not None and partial_m1 is not None
    lo = min(partial_m.lo, partial_m1.lo)
    hi = max(partial_m.hi, partial_m1.hi)
    return lo, hi


def _cos_series_bounds(x: float, degree: int) -> tuple[float, float]:
    """Bounds for cos(x) valid on |x| <= PI_HI; see ``_sin_series_bounds``."""
    x = abs(x)
    m = max(1, degree // 2)
    x2 = Interval.point(x).sqr()
    signed_term = Interval.point(1.0)
    s = signed_term  # S_0
    partial_m = partial_m1 = None
    for k in range(1, m + 2):
        denom = Interval.point(float((2 * k - 1) * (2 * k)))
        signed_term = -(signed_term * x2) / denom
        s = s + signed_term
        if k == m:
            partial_m = s
        elif k == m + 1:
            partial_m1 = s
    assert partial_m is not None and partial_m1 is not None
    lo = min(partial_m.lo, partial_m1.lo)
    hi = max(partial_m.hi, partial_m1.hi)
    return lo, hi


def _clamp_unit(lo: float, hi: float) -> Interval:
    return Interval(max(lo, -1.0), min(hi, 1.0))


def iv_sin(a: Interval, degree: int = 4) -> Interval:
    """Interval extension of sin from the piecewise monotonicity case table.

    Handled subdomains: the increasing lobe ``[-pi/2, pi/2]``, the decreasing
    lobe ``[pi/2, pi]``, the peak-spanning half period ``[0, pi]`` and its
    mirrored negative counterpart.  Anything else returns ``[-1, 1]``.
    """
    if degree < 1:
        raise DomainError(f"series degree must be >= 1, got {degree}")
    lo, hi = a.lo, a.hi
    half_lo = PI_LO / 2  # exact: division by two
    half_hi = PI_HI / 2
    if -half_lo <= lo and hi <= half_lo:
        return _clamp_unit(_sin_series_bounds(lo, degree)[0], _sin_series_bounds(hi, degree)[1])
    if half_hi <= lo and hi <= PI_LO:
        return _clamp_unit(_sin_series_bounds(hi, degree)[0], _sin_series_bounds(lo, degree)[1])
    if 0.0 <= lo and hi <= PI_LO:
        return _clamp_unit(
            min(_sin_series_bounds(lo, degree)[0], _sin_series_bounds(hi, degree)[0]), 1.0
        )
    if -PI_LO <= lo and hi <= 0.0:
        return -iv_sin(Interval(-hi, -lo), degree)
    return Interval(-1.0, 1.0)


def iv_cos(a: Interval, degree: int = 4) -> Interval:
    """Interval extension of cos; same case-table construction as ``iv_sin``."""
    if degree < 1:
        raise DomainError(f"series degree must be >= 1, got {degree}")
    lo, hi = a.lo, a.hi
    half_lo = PI_LO / 2
    if 0.0 <= lo and hi <= PI_LO:
        return _clamp_unit(_cos_series_bounds(hi, degree)[0], _cos_series_bounds(lo, degree)[1])
    if -PI_LO <= lo and hi <= 0.0:
        return iv_cos(Interval(-hi, -lo), degree)
    if -half_lo <= lo and hi <= half_lo:
        return _clamp_unit(
            min(_cos_series_bounds(lo, degree)[0], _cos_series_bounds(hi, degree)[0]), 1.0
        )
    return Interval(-1.0, 1.0)


# ---------------------------------------------------------------------------
# Boxes
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Box:
    """Product of intervals, one per named variable."""

    dims: tuple[Interval, ...]
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.dims:
            raise IntervalError("box must have at least one dimension")
        if len(self.dims) != len(self.labels):
            raise IntervalError(
                f"{len(self.dims)} dimensions but {len(self.labels)} labels"
            )

    @classmethod
    def from_bounds(cls, bounds: Sequence[tuple[str, float, float]]) -> "Box":
        return cls(
            tuple(Interval(lo, hi) for _, lo, hi in bounds),
            tuple(name for name, _, _ in bounds),
        )

    def __len__(self) -> int:
        return len(self.dims)

    @property
    def width(self) -> float:
        return max(iv.width for iv in self.dims)

    def widest_dim(self) -> int:
        widths = [iv.width for iv in self.dims]
        return widths.index(max(widths))

    def midpoint(self) -> tuple[float, ...]:
        return tuple(iv.midpoint for iv in self.dims)

    def corner(self, which: str) -> tuple[float, ...]:
        if which == "lo":
            return tuple(iv.lo for iv in self.dims)
        if which == "hi":
            return tuple(iv.hi for iv in self.dims)
        raise ValueError(f"corner must be 'lo' or 'hi', got {which!r}")

    def contains(self, point: Sequence[float]) -> bool:
        return len(point) == len(self.dims) and all(
            iv.contains(x) for iv, x in zip(self.dims, point)
        )

    def replace_dim(self, index: int, iv: Interval) -> "Box":
        dims = list(self.dims)
        dims[index] = iv
        return Box(tuple(dims), self.labels)

    def split(self, dim: int, at: float | None = None) -> tuple["Box", "Box"]:
        """Bisect along ``dim``; the halves cover the box with disjoint
        interiors.  Splitting a zero-width dimension is an error."""
        iv = self.dims[dim]
        if iv.width <= 0.0:
            raise DegenerateSplit(f"dimension {dim} of {self} has zero width")
        point = iv.midpoint if at is None else at
        if not (iv.lo < point < iv.hi):
            raise DegenerateSplit(
                f"split point {point} not strictly inside {iv} (dimension {dim})"
            )
        return (
            self.replace_dim(dim, Interval(iv.lo, point)),
            self.replace_dim(dim, Interval(point, iv.hi)),
        )

    def env(self) -> dict[str, Interval]:
        return dict(zip(self.labels, self.dims))


def refined_eval(
    fn: Callable[[Box], Interval], box: Box, segments: int
) -> Interval:
    """Evaluate ``fn`` on ``box`` after slicing its widest dimension into
    ``segments`` equal slabs; return the hull of the slab enclosures.

    For an inclusion-isotonic ``fn`` the result is contained in the
    single-shot evaluation, never wider.
    """
    if segments < 1:
        raise DomainError(f"segments must be >= 1, got {segments}")
    dim = box.widest_dim()
    iv = box.dims[dim]
    if segments == 1 or iv.width <= 0.0:
        return fn(box)
    cuts = [iv.lo]
    for k in range(1, segments):
        c = iv.lo + iv.width * (k / segments)
        cuts.append(min(max(c, cuts[-1]), iv.hi))
    cuts.append(iv.hi)
    result: Interval | None = None
    for left, right in zip(cuts, cuts[1:]):
        slab = fn(box.replace_dim(dim, Interval(left, right)))
        result = slab if result is None else result.hull(slab)
    assert result is not None
    return result
