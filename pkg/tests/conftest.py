"""Shared fixtures: corpus models, corpus expressions, reference oracles."""

from __future__ import annotations

import math
import random
from decimal import Decimal, getcontext

import pytest

from certbound import (
    Box,
    Interval,
    ModelDef,
    parse,
    simplify,
)
from certbound.expr import Const, Expr, PowInt, Var
from certbound.models import (
    GeneratorConfig,
    MovingObjectConfig,
    TrafficConfig,
    build_generator,
    build_moving_object,
    build_traffic,
)

# ---------------------------------------------------------------------------
# Corpus models
# ---------------------------------------------------------------------------


@pytest.fixture(scope="session")
def traffic_s1() -> ModelDef:
    model, _ = build_traffic(TrafficConfig(sections=1))
    return model


@pytest.fixture(scope="session")
def traffic_s5() -> ModelDef:
    model, _ = build_traffic(TrafficConfig(sections=5))
    return model


@pytest.fixture(scope="session")
def moving_object() -> ModelDef:
    return build_moving_object(MovingObjectConfig())


@pytest.fixture(scope="session")
def moving_object_unit() -> ModelDef:
    return build_moving_object(MovingObjectConfig(r=1.0))


GENERATOR_CONFIG = GeneratorConfig(
    alpha1=0.3,
    alpha3=1.2,
    alpha4=0.7,
    alpha6=0.15,
    alpha8=2.1,
    alpha10=1.4,
    state_bounds=((-0.6, 2.2), (-1.0, 1.0), (0.2, 1.1), (-0.4, 0.9)),
    input_bounds=((0.0, 1.0), (0.0, 1.0), (-1.5, 2.0), (-1.0, 1.6)),
)


@pytest.fixture(scope="session")
def generator() -> ModelDef:
    return build_generator(GENERATOR_CONFIG)


# ---------------------------------------------------------------------------
# Corpus expressions (each with a matching evaluation box)
# ---------------------------------------------------------------------------


def corpus_expressions() -> list[tuple[Expr, Box]]:
    """Expressions exercised by the enclosure and gradient suites, paired
    with a box over their variables."""
    delta = 31.3 / (500.0 * 0.053)
    rho = Interval(0.0, 0.0265)
    sym = Interval(-2.0, 2.0)
    pos = Interval(0.1, 3.0)
    cases: list[tuple[str, dict, list[tuple[str, Interval]]]] = [
        ("d*x1^2", {"d": delta}, [("x1", rho)]),
        ("d*(x1^2 - x2^2)", {"d": delta}, [("x1", rho), ("x2", rho)]),
        (
            "d*(x1^2 - x2^2 + 0.5*x3^2)",
            {"d": delta},
            [("x1", rho), ("x2", rho), ("x3", rho)],
        ),
        ("-x1*(x1^2 + x2^2)", {}, [("x1", sym), ("x2", sym)]),
        ("x1*(1 - x1)", {}, [("x1", Interval(0.0, 1.0))]),
        ("sin(x1)*cos(x2)", {}, [("x1", Interval(-1.2, 1.2)), ("x2", Interval(-0.5, 2.9))]),
        ("exp(x1/4)*sqrt(x2)", {}, [("x1", sym), ("x2", pos)]),
        ("abs(x1 - x2)", {}, [("x1", sym), ("x2", sym)]),
        ("(x1 + x2)^3 - 2*x1*x2", {}, [("x1", sym), ("x2", sym)]),
        ("cos(2*x1)*x2 + sin(2*x1)", {}, [("x1", Interval(-0.7, 0.7)), ("x2", sym)]),
        ("x1^4 - 3*x1^2 + x1/2", {}, [("x1", sym)]),
        ("sqr(x1)*sqr(x2) + x1*x2", {}, [("x1", sym), ("x2", sym)]),
    ]
    out = []
    for text, constants, bounds in cases:
        e = simplify(parse(text, constants))
        out.append((e, Box.from_bounds([(n, iv.lo, iv.hi) for n, iv in bounds])))
    return out


def model_component_expressions(*models: ModelDef) -> list[tuple[Expr, Box]]:
    out = []
    for model in models:
        domain = model.omega()
        for component in model.f:
            out.append((component, domain))
    return out


# ---------------------------------------------------------------------------
# Reference oracles
# ---------------------------------------------------------------------------


def dec_sin(x: float, digits: int = 40) -> Decimal:
    """High-precision sine of a float via the Maclaurin series in Decimal
    arithmetic (sufficient for |x| <= 30)."""
    getcontext().prec = digits + 20
    xd = Decimal(x)
    term = xd
    total = xd
    k = 1
    limit = Decimal(10) ** -(digits + 5)
    while abs(term) > limit:
        term = -term * xd * xd / ((2 * k) * (2 * k + 1))
        total += term
        k += 1
    return total


def dec_cos(x: float, digits: int = 40) -> Decimal:
    getcontext().prec = digits + 20
    xd = Decimal(x)
    term = Decimal(1)
    total = Decimal(1)
    k = 1
    limit = Decimal(10) ** -(digits + 5)
    while abs(term) > limit:
        term = -term * xd * xd / ((2 * k - 1) * (2 * k))
        total += term
        k += 1
    return total


def random_points(box: Box, count: int, seed: int) -> list[tuple[float, ...]]:
    rng = random.Random(seed)
    return [
        tuple(rng.uniform(iv.lo, iv.hi) for iv in box.dims) for _ in range(count)
    ]


def random_polynomial(rng: random.Random, dim: int, degree: int = 4) -> Expr:
    """Random multivariate polynomial with bounded total degree."""
    names = [f"x{i + 1}" for i in range(dim)]
    total: Expr = Const(rng.uniform(-1.0, 1.0))
    for _ in range(rng.randint(2, 7)):
        coeff = Const(rng.uniform(-3.0, 3.0))
        monomial: Expr = coeff
        remaining = degree
        for name in names:
            if remaining == 0:
                break
            power = rng.randint(0, remaining)
            remaining -= power
            if power == 0:
                continue
            factor = Var(name) if power == 1 else PowInt(Var(name), power)
            monomial = monomial * factor
        total = total + monomial
    return simplify(total)


def dense_max(
    h, box: Box, extra_points: list[tuple[float, ...]] | None = None
) -> float:
    """Sampled maximum over a grid plus quasi-random points plus any extras;
    a lower bound on the true maximum by construction."""
    from certbound.baselines import halton_points_in_box

    dim = len(box)
    per_dim = {1: 400, 2: 60, 3: 18, 4: 10}.get(dim, 6)
    best = -math.inf
    grid_axes = [
        [iv.lo + (iv.hi - iv.lo) * k / (per_dim - 1) for k in range(per_dim)]
        if iv.width > 0
        else [iv.lo]
        for iv in box.dims
    ]

    def rec(prefix: list[float], axis: int) -> None:
        nonlocal best
        if axis == dim:
            best = max(best, h(tuple(prefix)))
            return
        for value in grid_axes[axis]:
            prefix.append(value)
            rec(prefix, axis + 1)
            prefix.pop()

    rec([], 0)
    for point in halton_points_in_box(box, 2000):
        best = max(best, h(point))
    for point in extra_points or ():
        if point and box.contains(point):
            best = max(best, h(point))
    return best
