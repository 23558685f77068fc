"""Derivative-free interval branch-and-bound for global maximization.

Given a point objective ``h`` and a sound interval extension ``hI`` of it,
the search maintains a cover: a set of boxes with pairwise disjoint
interiors whose union still contains every maximizer not yet provably
excluded.  Each box caches lower/upper bounds from exactly one refined
interval evaluation.  The driver tightens the sandwich ``l <= h* <= u`` in
three phases:

1. repeatedly bisect the box with the greatest upper bound (drives u down),
2. once that box is no longer splittable, bisect splittable boxes with the
   greatest lower bound (drives l up),
3. finally raise l by corner evaluations and re-prune.

A box is discarded as soon as its upper bound falls below l; such a box
cannot contain a maximizer.  On return ``h*`` lies in ``[lower, upper]`` and
``eps_optimal`` records whether the gap closed below ``eps_h``.
"""

from __future__ import annotations

import itertools
import time
from heapq import heappop, heappush
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .errors import CertboundError, EvaluationError
from .intervals import Box, Interval, refined_eval

PointFn = Callable[[Sequence[float]], float]
IntervalFn = Callable[[Box], Interval]

_INF_SENTINEL = float("inf")


@dataclass(frozen=True, slots=True)
class Subproblem:
    """A cover box with cached objective bounds: lo_bound <= h <= hi_bound
    on the box.  ``order`` is the insertion counter used to break ties
    deterministically."""

    box: Box
    lo_bound: float
    hi_bound: float
    order: int


class Cover:
    """The optimizer's work set: boxes not yet provably excluded.

    Selection by greatest upper bound and greatest lower bound runs through
    two lazy max-heaps over one shared membership map; stale or pruned heap
    entries are discarded when they surface.  Pruning is a watermark: a box
    whose upper bound falls strictly below the best known lower bound ``l``
    is excluded (it cannot contain a maximizer) and physically dropped the
    next time an index touches it.
    """

    def __init__(self, subproblems: Iterable[Subproblem] = ()):
        self._alive: dict[int, Subproblem] = {}
        self._hi_heap: list[tuple[float, float, int]] = []
        self._lo_heap: list[tuple[float, float, int]] = []
        self._lo_split_heap: list[tuple[float, float, int]] = []
        self._watermark = -_INF_SENTINEL
        for sub in subproblems:
            self.add(sub)

    @property
    def subproblems(self) -> list[Subproblem]:
        return [
            s for s in self._alive.values() if s.hi_bound >= self._watermark
        ]

    def __len__(self) -> int:
        return len(self.subproblems)

    def __iter__(self):
        return iter(self.subproblems)

    def add(self, sub: Subproblem) -> None:
        # Ties break toward the wider box, then the earlier insertion.
        self._alive[sub.order] = sub
        heappush(self._hi_heap, (-sub.hi_bound, -sub.box.width, sub.order))
        heappush(self._lo_heap, (-sub.lo_bound, -sub.box.width, sub.order))
        heappush(self._lo_split_heap, (-sub.lo_bound, -sub.box.width, sub.order))

    def remove(self, sub: Subproblem) -> None:
        self._alive.pop(sub.order, None)  # heap entries go stale

    def prune(self, l: float) -> None:
        """Exclude every box with hi_bound < l (watermark semantics)."""
        if l > self._watermark:
            self._watermark = l

    def _peek(self, heap: list, min_width: float | None) -> Subproblem | None:
        while heap:
            _, _, order = heap[0]
            sub = self._alive.get(order)
            if sub is None:
                heappop(heap)
                continue
            if sub.hi_bound < self._watermark:
                del self._alive[order]  # provably excluded
                heappop(heap)
                continue
            if min_width is not None and sub.box.width <= min_width:
                heappop(heap)  # width never grows; drop from this index only
                continue
            return sub
        return None

    def peek_max_hi(self) -> Subproblem | None:
        return self._peek(self._hi_heap, None)

    def peek_max_lo(self) -> Subproblem | None:
        return self._peek(self._lo_heap, None)

    def peek_max_lo_splittable(self, eps_om: float) -> Subproblem | None:
        return self._peek(self._lo_split_heap, eps_om)


def _selection_key(s: Subproblem, primary: float) -> tuple[float, float, float]:
    # Ties: larger box first, then earlier insertion.
    return (primary, s.box.width, -s.order)


@dataclass
class BnBConfig:
    """Optimizer knobs.

    eps_h: target width of the objective sandwich.
    eps_om: minimum splittable box width.
    segments: widest-dimension slabs per interval bound evaluation.
    max_steps: hard cap on bisections (safety valve, not part of the method).
    """

    eps_h: float = 1e-4
    eps_om: float = 1e-7
    segments: int = 10
    max_steps: int = 10_000_000
    record_history: bool = False

    def __post_init__(self) -> None:
        if self.eps_h <= 0 or self.eps_om <= 0:
            raise ValueError("eps_h and eps_om must be positive")
        if self.segments < 1 or self.max_steps < 1:
            raise ValueError("segments and max_steps must be >= 1")


@dataclass
class BnBStats:
    splits: int = 0
    evals: int = 0
    wall_time: float = 0.0


@dataclass
class BnBResult:
    lower: float
    upper: float
    eps_optimal: bool
    final_cover: Cover
    stats: BnBStats
    lower_witness: tuple[float, ...]
    history: list[tuple[float, float]] = field(default_factory=list)

    @property
    def gap(self) -> float:
        return self.upper - self.lower


class _Bounder:
    """Evaluates cached subproblem bounds; counts evaluations."""

    def __init__(self, hI: IntervalFn, segments: int, stats: BnBStats):
        self.hI = hI
        self.segments = segments
        self.stats = stats
        self.counter = itertools.count()

    def __call__(self, box: Box) -> Subproblem:
        self.stats.evals += 1
        iv = refined_eval(self.hI, box, self.segments)
        return Subproblem(box, iv.lo, iv.hi, next(self.counter))


def opt_bnb_step(
    cover: Cover,
    chosen: Subproblem,
    l: float,
    h: PointFn,
    bound: Callable[[Box], Subproblem],
) -> tuple[Subproblem, float, float, tuple[float, ...] | None]:
    """One bisection step: split ``chosen`` at the midpoint of its widest
    dimension, raise l from the midpoint of the best-lower-bound box, prune,
    and return the new incumbent (greatest upper bound), l, u and the point
    that improved l (if any)."""
    cover.remove(chosen)
    for half in chosen.box.split(chosen.box.widest_dim()):
        child = bound(half)
        # The parent's bounds stay valid on the half (its range is a subset),
        # so intersecting keeps child bounds sound and makes u monotone even
        # when slab refinement picks a different dimension than the parent's.
        cover.add(
            Subproblem(
                child.box,
                max(child.lo_bound, chosen.lo_bound),
                min(child.hi_bound, chosen.hi_bound),
                child.order,
            )
        )
    candidate = cover.peek_max_lo()
    witness: tuple[float, ...] | None = None
    if candidate is not None:
        mid = candidate.box.midpoint()
        value = h(mid)
        if value > l:
            l = value
            witness = mid
    cover.prune(l)
    incumbent = cover.peek_max_hi()
    if incumbent is None:
        raise EvaluationError(
            "cover emptied: interval extension inconsistent with point objective"
        )
    return incumbent, l, incumbent.hi_bound, witness


def maximize(
    h: PointFn,
    hI: IntervalFn,
    domain: Box,
    cfg: BnBConfig,
    warm_start_points: Iterable[Sequence[float]] | None = None,
) -> BnBResult:
    """Certified global maximum sandwich of ``h`` over ``domain``.

    ``hI`` must be a valid interval extension of ``h`` on the domain (the
    expression layer provides this).  ``warm_start_points`` may seed the
    lower bound with extra point evaluations before the first bisection.

    The domain should contain only dimensions the objective depends on:
    a dead dimension is still bisected (it can be the widest), which
    multiplies boxes with identical bounds instead of tightening anything.
    Callers working from expressions get this for free via domain reduction.
    """
    stats = BnBStats()
    start = time.perf_counter()
    bound = _Bounder(hI, cfg.segments, stats)
    history: list[tuple[float, float]] = []
    l = -_INF_SENTINEL
    u = _INF_SENTINEL
    cover = Cover()
    try:
        root = bound(domain)
        cover.add(root)
        mid = domain.midpoint()
        l = h(mid)
        witness = tuple(mid)
        for point in warm_start_points or ():
            value = h(point)
            if value > l:
                l = value
                witness = tuple(point)
        cover.prune(l)
        incumbent = cover.peek_max_hi()
        if incumbent is None:
            raise EvaluationError(
                "cover emptied: interval extension inconsistent with point objective"
            )
        u = incumbent.hi_bound
        if cfg.record_history:
            history.append((l, u))

        # Phase 1: shrink u by splitting the incumbent.
        while (
            u - l > cfg.eps_h
            and incumbent.box.width > cfg.eps_om
            and stats.splits < cfg.max_steps
        ):
            stats.splits += 1
            incumbent, l, u, w = opt_bnb_step(cover, incumbent, l, h, bound)
            if w is not None:
                witness = w
            if cfg.record_history:
                history.append((l, u))

        # Phase 2: raise l by splitting the best-lower-bound splittable box.
        while u - l > cfg.eps_h and stats.splits < cfg.max_steps:
            chosen = cover.peek_max_lo_splittable(cfg.eps_om)
            if chosen is None:
                break
            stats.splits += 1
            incumbent, l, u, w = opt_bnb_step(cover, chosen, l, h, bound)
            if w is not None:
                witness = w
            if cfg.record_history:
                history.append((l, u))

        # Phase 3: corner evaluations, most promising boxes first.
        if u - l > cfg.eps_h:
            snapshot = sorted(
                cover.subproblems, key=lambda s: _selection_key(s, s.hi_bound),
                reverse=True,
            )
            for sub in snapshot:
                if sub.hi_bound < l:
                    continue  # already pruned
                for corner in (sub.box.corner("lo"), sub.box.corner("hi")):
                    value = h(corner)
                    if value > l:
                        l = value
                        witness = corner
                cover.prune(l)
                if cfg.record_history:
                    history.append((l, u))
                if u - l <= cfg.eps_h:
                    break
    except (CertboundError, ArithmeticError) as exc:
        stats.wall_time = time.perf_counter() - start
        partial = None
        if l > -_INF_SENTINEL and u < _INF_SENTINEL:
            partial = BnBResult(
                lower=l,
                upper=u,
                eps_optimal=False,
                final_cover=cover,
                stats=stats,
                lower_witness=(),
                history=history,
            )
        if isinstance(exc, EvaluationError) and exc.partial is None:
            exc.partial = partial
            raise
        raise EvaluationError(f"objective evaluation failed: {exc}", partial) from exc

    stats.wall_time = time.perf_counter() - start
    return BnBResult(
        lower=l,
        upper=u,
        eps_optimal=u - l <= cfg.eps_h,
        final_cover=cover,
        stats=stats,
        lower_witness=witness,
        history=history,
    )


def minimize(
    h: PointFn,
    hI: IntervalFn,
    domain: Box,
    cfg: BnBConfig,
    warm_start_points: Iterable[Sequence[float]] | None = None,
) -> BnBResult:
    """Certified global minimum sandwich: maximize the negated objective and
    swap the negated bounds back."""
    res = maximize(
        lambda xs: -h(xs),
        lambda box: -hI(box),
        domain,
        cfg,
        warm_start_points,
    )
    return BnBResult(
        lower=-res.upper,
        upper=-res.lower,
        eps_optimal=res.eps_optimal,
        final_cover=res.final_cover,
        stats=res.stats,
        lower_witness=res.lower_witness,
        history=[(-hu, -hl) for (hl, hu) in res.history],
    )
