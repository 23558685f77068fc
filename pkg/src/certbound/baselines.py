"""Point-based under-approximation baselines.

These samplers find good feasible points, never certificates: every value
they report is a lower bound on the true maximum, so a certified upper bound
from the optimizer must always dominate them.  They double as warm-start
point sources for the optimizer's lower bound.

Everything here is deterministic: fixed quasi-random sequences, no
wall-clock seeding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

from .eigen import induced_two_norm
from .errors import DomainError
from .expr import compile_expr, differentiate
from .intervals import Box
from .model import ModelDef

PointFn = Callable[[Sequence[float]], float]

_CORNER_CAP = 2**20


@dataclass(frozen=True)
class SampleReport:
    best_value: float
    best_point: tuple[float, ...]
    samples: int
    method: str


def _primes(count: int) -> list[int]:
    out: list[int] = []
    candidate = 2
    while len(out) < count:
        if all(candidate % p for p in out if p * p <= candidate):
            out.append(candidate)
        candidate += 1
    return out


def _radical_inverse(index: int, base: int) -> float:
    value = 0.0
    scale = 1.0 / base
    while index:
        index, digit = divmod(index, base)
        value += digit * scale
        scale /= base
    return value


def halton(dim: int, count: int) -> Iterator[tuple[float, ...]]:
    """First ``count`` points of the Halton sequence in the unit cube,
    radical inverses in the first ``dim`` prime bases, starting at index 1."""
    if dim < 1:
        raise DomainError(f"dimension must be >= 1, got {dim}")
    bases = _primes(dim)
    for index in range(1, count + 1):
        yield tuple(_radical_inverse(index, b) for b in bases)


def _map_into(box: Box, unit: Sequence[float]) -> tuple[float, ...]:
    return tuple(
        iv.lo + (iv.hi - iv.lo) * u for iv, u in zip(box.dims, unit)
    )


def halton_points_in_box(box: Box, count: int) -> Iterator[tuple[float, ...]]:
    for unit in halton(len(box), count):
        yield _map_into(box, unit)


def _corner_points(box: Box) -> Iterator[tuple[float, ...]]:
    dim = len(box)
    total = min(2**dim, _CORNER_CAP)
    for mask in range(total):
        yield tuple(
            iv.hi if (mask >> k) & 1 else iv.lo
            for k, iv in enumerate(box.dims)
        )


def _pattern_search(
    h: PointFn, box: Box, start: Sequence[float], budget: int
) -> tuple[float, tuple[float, ...], int]:
    """Derivative-free coordinate descent (ascent): probe +-step along each
    axis, halve the step on failure."""
    point = list(start)
    best = h(point)
    used = 1
    steps = [max(iv.width, 0.0) / 4.0 for iv in box.dims]
    while used < budget and any(s > 1e-12 for s in steps):
        improved = False
        for k, iv in enumerate(box.dims):
            if steps[k] <= 0.0:
                continue
            for direction in (1.0, -1.0):
                if used >= budget:
                    break
                trial = point[k] + direction * steps[k]
                trial = min(max(trial, iv.lo), iv.hi)
                if trial == point[k]:
                    continue
                candidate = point[:]
                candidate[k] = trial
                value = h(candidate)
                used += 1
                if value > best:
                    best = value
                    point = candidate
                    improved = True
                    break
        if not improved:
            steps = [s * 0.5 for s in steps]
    return best, tuple(point), used


def sample_max(
    h: PointFn, domain: Box, count: int, method: str = "halton"
) -> SampleReport:
    """Best objective value over a deterministic point set.

    Methods: ``halton`` (quasi-random), ``corners`` (vertex enumeration,
    capped), ``midpoint`` (the box center), ``multistart_local``
    (pattern search from 32 quasi-random starts within ``count``
    evaluations in total).
    """
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    if method == "halton":
        points = halton_points_in_box(domain, count)
    elif method == "corners":
        points = _corner_points(domain)
    elif method == "midpoint":
        points = iter([domain.midpoint()])
    elif method == "multistart_local":
        starts = list(halton_points_in_box(domain, 32))
        per_start = max(1, count // len(starts))
        best = -math.inf
        best_point: tuple[float, ...] = domain.midpoint()
        used_total = 0
        for start in starts:
            value, point, used = _pattern_search(h, domain, start, per_start)
            used_total += used
            if value > best:
                best, best_point = value, point
        return SampleReport(best, best_point, used_total, method)
    else:
        raise DomainError(f"unknown sampling method {method!r}")
    best = -math.inf
    best_point = domain.midpoint()
    seen = 0
    for point in points:
        value = h(point)
        seen += 1
        if value > best:
            best, best_point = value, point
    return SampleReport(best, best_point, seen, method)


def jacobian_norm_at(model: ModelDef, point: Sequence[float]) -> float:
    """Induced 2-norm of the state Jacobian of the component vector at one
    point (states first, inputs after, in declaration order)."""
    domain = model.omega()
    programs = [
        [
            compile_expr(differentiate(fi, name), domain.labels)
            for name in model.state_names
        ]
        for fi in model.f
    ]
    matrix = [[p.eval_point(point) for p in row] for row in programs]
    return induced_two_norm(matrix)


def jacobian_norm_sampled(
    model: ModelDef, domain: Box | None = None, count: int = 1000
) -> SampleReport:
    """Maximum sampled induced 2-norm of the state Jacobian: the classical
    point-sampled reference estimate of the Lipschitz constant.  Not
    certified; it under-approximates whenever the sample misses the true
    maximizer."""
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    if domain is None:
        domain = model.omega()
    programs = [
        [
            compile_expr(differentiate(fi, name), domain.labels)
            for name in model.state_names
        ]
        for fi in model.f
    ]
    best = -math.inf
    best_point = domain.midpoint()
    seen = 0
    for point in halton_points_in_box(domain, count):
        matrix = [[p.eval_point(point) for p in row] for row in programs]
        value = induced_two_norm(matrix)
        seen += 1
        if value > best:
            best, best_point = value, point
    return SampleReport(best, best_point, seen, "halton")
