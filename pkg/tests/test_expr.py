"""Expression layer: parser, derivatives, evaluation, structural keys."""

import random

import pytest

from certbound import (
    Box,
    Interval,
    compile_expr,
    differentiate,
    eval_interval,
    eval_real,
    free_vars,
    parse,
    simplify,
    structural_key,
    to_text,
)
from certbound.errors import (
    NonDifferentiable,
    ParseError,
    UnboundVariable,
)
from certbound.expr import Binary, Const, PowInt, Unary, Var
from conftest import corpus_expressions, random_points, random_polynomial


DELTA = 31.3 / (500.0 * 0.053)


class TestParse:
    def test_difference_of_squares_structure(self):
        e = parse("x1^2 - x2^2")
        assert isinstance(e, Binary) and e.op == "-"
        assert e.left == PowInt(Var("x1"), 2)
        assert e.right == PowInt(Var("x2"), 2)

    def test_product_eval(self):
        e = parse("-2*x1*x2")
        assert eval_real(e, {"x1": 3.0, "x2": 4.0}) == pytest.approx(-24.0)

    def test_unclosed_paren(self):
        with pytest.raises(ParseError) as err:
            parse("sin(x1")
        assert err.value.offset == len("sin(x1")
        assert ")" in err.value.expected

    def test_unknown_function(self):
        with pytest.raises(ParseError):
            parse("tan(x1)")

    def test_trailing_garbage(self):
        with pytest.raises(ParseError):
            parse("x1 + 2 3")

    def test_unexpected_character(self):
        with pytest.raises(ParseError) as err:
            parse("x1 + $2")
        assert err.value.offset == 5

    def test_power_precedence(self):
        # ^ binds above unary minus: -x^2 == -(x^2)
        assert eval_real(parse("-x^2"), {"x": 3.0}) == pytest.approx(-9.0)
        assert eval_real(parse("2*x^2"), {"x": 3.0}) == pytest.approx(18.0)

    def test_fractional_exponent_rejected(self):
        with pytest.raises(ParseError):
            parse("x^2.5")
        with pytest.raises(ParseError):
            parse("x^-1")

    def test_constants_substituted(self):
        e = parse("d*x", {"d": 2.5})
        assert free_vars(e) == {"x"}
        assert eval_real(e, {"x": 2.0}) == pytest.approx(5.0)

    def test_scientific_literals(self):
        assert eval_real(parse("1.5e-3 + x"), {"x": 0.0}) == pytest.approx(0.0015)


class TestDifferentiate:
    def test_difference_of_squares(self):
        e = parse("d*(x1^2 - x0^2)", {"d": DELTA})
        d = differentiate(e, "x1")
        for x1 in (-1.0, 0.0, 0.7, 2.0):
            assert eval_real(d, {"x1": x1, "x0": 0.3}) == pytest.approx(2 * DELTA * x1)

    def test_unrelated_variable(self):
        assert differentiate(parse("x1^2"), "x2") == Const(0.0)

    def test_cubic_radial(self):
        d = differentiate(parse("-x1*(x1^2 + x2^2)"), "x1")
        for x1, x2 in ((1.0, 2.0), (-0.5, 0.3), (2.0, -2.0)):
            assert eval_real(d, {"x1": x1, "x2": x2}) == pytest.approx(
                -3 * x1**2 - x2**2
            )

    def test_abs_kink_rejected(self):
        with pytest.raises(NonDifferentiable):
            differentiate(parse("abs(x1)"), "x1")

    def test_abs_of_nonnegative_ok(self):
        d = differentiate(parse("abs(x1^2)"), "x1")
        assert eval_real(d, {"x1": 3.0}) == pytest.approx(6.0)

    def test_quotient_rule(self):
        d = differentiate(parse("x1/(1 + x2^2)"), "x2")
        assert eval_real(d, {"x1": 2.0, "x2": 1.0}) == pytest.approx(-1.0)

    @pytest.mark.parametrize("case", range(len(corpus_expressions())))
    def test_gradient_matches_finite_differences(self, case):
        e, box = corpus_expressions()[case]
        names = sorted(free_vars(e))
        try:
            derivs = [differentiate(e, name) for name in names]
        except NonDifferentiable:
            pytest.skip("expression has an uncertified kink")
        program = compile_expr(e, box.labels)
        deriv_programs = [compile_expr(d, box.labels) for d in derivs]
        slots = {name: box.labels.index(name) for name in names}
        step = 1e-6
        checked = 0
        for point in random_points(box, 1100, seed=case):
            # stay inside the box so sqrt/abs arguments remain valid
            if any(
                point[slots[n]] - step < iv.lo or point[slots[n]] + step > iv.hi
                for n, iv in zip(box.labels, box.dims)
                if n in names
            ):
                continue
            for name, dprog in zip(names, deriv_programs):
                up = list(point)
                down = list(point)
                up[slots[name]] += step
                down[slots[name]] -= step
                fd = (program.eval_point(up) - program.eval_point(down)) / (2 * step)
                assert dprog.eval_point(point) == pytest.approx(fd, rel=1e-5, abs=5e-6)
            checked += 1
        assert checked >= 1000


class TestEval:
    def test_eval_real(self):
        assert eval_real(parse("x1^2 - x2^2"), {"x1": 3, "x2": 1}) == pytest.approx(8.0)

    def test_eval_interval_square(self):
        r = eval_interval(parse("x1^2"), Box.from_bounds([("x1", -2, 1)]))
        assert r.lo == 0.0 and r.hi == pytest.approx(4.0)

    def test_eval_interval_gradient_norm_bound(self):
        e = parse("c*(x1^2 + x2^2 + x3^2)", {"c": 4 * DELTA**2})
        box = Box.from_bounds([(f"x{i}", 0.0, 0.0265) for i in (1, 2, 3)])
        r = eval_interval(e, box)
        assert r.hi == pytest.approx(12 * DELTA**2 * 0.0265**2, rel=1e-4)

    def test_unbound_variable(self):
        with pytest.raises(UnboundVariable):
            eval_real(parse("x1 + x2"), {"x1": 1.0})
        with pytest.raises(UnboundVariable):
            eval_interval(parse("x1 + x2"), Box.from_bounds([("x1", 0, 1)]))

    def test_extension_agrees_on_degenerate_boxes(self):
        for e, box in corpus_expressions():
            for point in random_points(box, 40, seed=17):
                value = eval_real(e, dict(zip(box.labels, point)))
                iv = eval_interval(
                    e, Box.from_bounds([(n, x, x) for n, x in zip(box.labels, point)])
                )
                assert iv.lo <= value <= iv.hi

    def test_enclosure_over_subboxes(self):
        rng = random.Random(23)
        for e, box in corpus_expressions():
            for _ in range(20):
                # random sub-box, then random points inside it
                subs = []
                for name, iv in zip(box.labels, box.dims):
                    lo = rng.uniform(iv.lo, iv.hi)
                    hi = rng.uniform(lo, iv.hi)
                    subs.append((name, lo, hi))
                sub = Box.from_bounds(subs)
                enclosure = eval_interval(e, sub)
                for point in random_points(sub, 10, seed=rng.randint(0, 10**6)):
                    value = eval_real(e, dict(zip(sub.labels, point)))
                    assert enclosure.lo - 1e-12 <= value <= enclosure.hi + 1e-12

    def test_refined_eval_interval_subset(self):
        e = parse("x1*(1 - x1)")
        box = Box.from_bounds([("x1", 0, 1)])
        plain = eval_interval(e, box, segments=1)
        fine = eval_interval(e, box, segments=10)
        assert plain.encloses(fine)
        assert fine.hi >= 0.25

    def test_program_point_speed_path(self):
        e = simplify(parse("x1^2 + 2*x1*x2 + x2^2"))
        program = compile_expr(e, ("x1", "x2"))
        assert program.eval_point((1.0, 2.0)) == pytest.approx(9.0)
        iv = program.eval_interval((Interval(0, 1), Interval(0, 1)))
        assert iv.lo <= 0.0 and iv.hi >= 4.0


class TestStructuralKey:
    def test_renamed_difference_of_squares(self):
        a = parse("d*(x5^2 - x4^2)", {"d": DELTA})
        b = parse("d*(x11^2 - x10^2)", {"d": DELTA})
        assert structural_key(a) == structural_key(b)

    def test_different_structure(self):
        assert structural_key(parse("x1^2")) != structural_key(parse("x1^2 + x2^2"))

    def test_commutativity(self):
        assert structural_key(parse("x1 + x2")) == structural_key(parse("x2 + x1"))
        assert structural_key(parse("x1*x2*x3")) == structural_key(parse("x3*x1*x2"))

    def test_coincidence_pattern_distinguished(self):
        assert structural_key(parse("x1*x1 + x2")) != structural_key(parse("x1*x2 + x3"))

    def test_operand_order_with_mixed_patterns(self):
        a = parse("x1*x1 + x1*x2")
        b = parse("x2*x1 + x1*x1")
        assert structural_key(a) == structural_key(b)

    def test_constants_matter(self):
        assert structural_key(parse("2*x1^2")) != structural_key(parse("3*x1^2"))


class TestPrintRoundTrip:
    @pytest.mark.parametrize(
        "text",
        [
            "x1^2 - x2^2",
            "-2*x1*x2",
            "sin(x1)*cos(x2) + exp(x1)/(1 + sqr(x2))",
            "abs(x1 - 2*x2)^3",
            "x1 - (x2 - x3)",
            "(x1 + x2)*(x1 - x2)",
            "-(x1 + x2)^2",
            "x1/(x2/x3)",
            "sqrt(x1 + 4)",
        ],
    )
    def test_named_cases(self, text):
        e = simplify(parse(text))
        assert simplify(parse(to_text(e))) == e

    def test_random_polynomials(self):
        rng = random.Random(99)
        for _ in range(60):
            e = random_polynomial(rng, dim=rng.randint(1, 3))
            assert simplify(parse(to_text(e))) == e

    def test_corpus(self):
        for e, _ in corpus_expressions():
            assert simplify(parse(to_text(e))) == e


class TestSimplify:
    def test_identities(self):
        x = Var("x")
        assert simplify(Binary("+", x, Const(0.0))) == x
        assert simplify(Binary("*", Const(1.0), x)) == x
        assert simplify(Binary("*", Const(0.0), x)) == Const(0.0)
        assert simplify(Binary("-", Const(0.0), x)) == Unary("neg", x)

    def test_square_detection(self):
        x = Var("x")
        assert simplify(Binary("*", x, x)) == Unary("sqr", x)

    def test_constant_folding(self):
        assert simplify(parse("2*3 + 1")) == Const(7.0)
        assert simplify(parse("(2 + 1)^2")) == Const(9.0)

    def test_no_reassociation(self):
        # conservative: does not collect like terms
        e = simplify(parse("x + x"))
        assert e == Binary("+", Var("x"), Var("x"))
