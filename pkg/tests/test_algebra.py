from pytest import mark, raises

from qfe.algebra import (
    ONE, Q, X, ZERO, DivisionError, PolyParseError, PolyXQ, RatXQ, SeriesError, TruncSeries, content,
    poly_add, poly_mul, poly_scale, series_mul, series_subst_x,
)


def test_polynomial_arithmetic():
    """(1 + x q)(1 - x q) = 1 - x^2 q^2."""
    a = ONE + X * Q
    b = ONE - X * Q
    assert a * b == ONE - (X * Q) ** 2
    assert a + b == 2
    assert (a - a).is_zero()
    assert 3 * X == X.scale(3)


def test_laurent_shift_and_substitution():
    p = PolyXQ.monomial(2, 1, -3)
    assert p.shift_q(3) == PolyXQ.monomial(2, 1, 0)
    assert (X * X).subst_x(2) == PolyXQ.monomial(1, 2, 4)
    assert p.min_qdeg() == -3


def test_x_degree_must_be_non_negative():
    with raises(ValueError):
        PolyXQ({(-1, 0): 1})


@mark.parametrize("text, expected", [
    ("1 + x^2*q^2", ONE + PolyXQ.monomial(1, 2, 2)),
    ("-1*x^2*q^3 + 1", ONE - PolyXQ.monomial(1, 2, 3)),
    ("x*q - 2*x*q^2", X * Q - PolyXQ.monomial(2, 1, 2)),
    ("q^-2", PolyXQ.monomial(1, 0, -2)),
    ("3*q^(-1) + x", PolyXQ.monomial(3, 0, -1) + X),
])
def test_parse(text, expected):
    assert PolyXQ.parse(text) == expected


@mark.parametrize("text", ["", "x^", "x*y", "x +"])
def test_parse_rejects_garbage(text):
    with raises(PolyParseError):
        PolyXQ.parse(text)


def test_canonical_and_pretty_forms():
    p = ONE + PolyXQ.monomial(1, 2, 2)
    assert p.pretty() == "1 + x^2*q^2"
    assert str(ONE - PolyXQ.monomial(1, 2, 3)) == "-1*x^2*q^3 + 1"
    assert PolyXQ.parse(str(p)) == p
    assert ZERO.pretty() == "0"


def test_exact_division_and_gcd():
    a = (ONE + X * Q) * (ONE - Q)
    b = (ONE + X * Q) * (ONE + Q)
    assert a.exact_div(ONE - Q) == ONE + X * Q
    assert a.gcd(b) == ONE + X * Q
    assert PolyXQ.monomial(1, 0, 5).exact_div(PolyXQ.monomial(1, 0, 2)) == PolyXQ.monomial(1, 0, 3)
    with raises(DivisionError):
        a.exact_div(ONE + Q * Q)
    with raises(DivisionError):
        a.exact_div(ZERO)


def test_content_of_family():
    g = ONE + X
    assert content([g * Q, g * (ONE - Q), ZERO]) == g
    assert content([]) == ONE
    assert content([X, ONE]) == ONE


def test_rational_reduction():
    r = RatXQ((ONE + X) * Q, (ONE + X) * Q * Q * (-1))
    reduced = r.reduced()
    assert reduced.den == ONE
    assert reduced.num == PolyXQ.monomial(-1, 0, -1)
    assert r == RatXQ(-ONE, Q)
    assert r.is_polynomial()
    assert not RatXQ(ONE, ONE + X).is_polynomial()
    assert RatXQ(X * (ONE + Q), ONE + Q).as_poly() == X
    with raises(DivisionError):
        RatXQ(ONE, ZERO)


def test_truncated_series_basics():
    s = TruncSeries(3, {(0, 0): 1, (1, 2): 4, (0, 5): 9})
    assert s.coefficient(0, 5) == 0
    assert s.q_coefficients() == [1, 0, 4, 0]
    assert s.valuation() == 0
    assert (s - s).valuation() is None
    with raises(SeriesError):
        TruncSeries(3, {(0, -1): 1})
    with raises(SeriesError):
        s + TruncSeries.one(4)


def test_one_minus_q_power_inverse():
    """(1 - q)^-1 is 1 + q + q^2 + ...; multiplying back gives 1."""
    geometric = TruncSeries.one(10).mul_one_minus_q_power(1, -1)
    assert geometric.q_coefficients() == [1] * 11
    assert geometric.mul_one_minus_q_power(1, 1) == TruncSeries.one(10)
    squared = TruncSeries.one(6).mul_one_minus_q_power(2, -2)
    assert squared.q_coefficients() == [1, 0, 2, 0, 3, 0, 4]


def test_series_substitution_and_products():
    s = TruncSeries(6, {(0, 0): 1, (1, 1): 1, (2, 1): 1})
    assert s.subst_x(1) == TruncSeries(6, {(0, 0): 1, (1, 2): 1, (2, 3): 1})
    assert s.subst_x_value(1, 0).q_coefficients() == [1, 2, 0, 0, 0, 0, 0]
    assert (s * s).coefficient(2, 2) == 1
    assert s.mul_poly(Q) == TruncSeries(6, {(0, 1): 1, (1, 2): 1, (2, 2): 1})
    with raises(SeriesError):
        s.mul_poly(PolyXQ.monomial(1, 0, -1))
    with raises(SeriesError):
        s.subst_x(-1)


def test_functional_helpers():
    a, b = ONE + X, Q
    assert poly_add(a, b) == a + b
    assert poly_mul(a, b) == X * Q + Q
    assert poly_scale(a, -2) == -2 * a
    assert (X * X * Q).max_xdeg() == 2
    s = TruncSeries.from_poly(a, 4)
    assert series_mul(s, s) == TruncSeries.from_poly(a * a, 4)
    assert series_subst_x(s, 2) == TruncSeries.from_poly(ONE + PolyXQ.monomial(1, 1, 2), 4)


def _random_poly(rng, terms: int = 4) -> PolyXQ:
    return PolyXQ({
        (rng.randint(0, 3), rng.randint(-3, 4)): rng.randint(-4, 4) for _ in range(rng.randint(0, terms))
    })


def _random_series(rng, order: int) -> TruncSeries:
    return TruncSeries(order, {
        (rng.randint(0, 3), rng.randint(0, order)): rng.randint(-4, 4) for _ in range(rng.randint(1, 6))
    })


def test_ring_axioms(rng):
    for _ in range(25):
        a, b, c = _random_poly(rng), _random_poly(rng), _random_poly(rng)
        assert a + b == b + a
        assert a * b == b * a
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a + ZERO == a and a * ONE == a
        assert (a - a).is_zero()
        assert a.scale(3) == a + a + a


def test_x_substitution_composes(rng):
    for _ in range(25):
        a, b = _random_poly(rng), _random_poly(rng)
        s, t = rng.randint(-3, 3), rng.randint(-3, 3)
        assert a.subst_x(s).subst_x(t) == a.subst_x(s + t)
        assert (a * b).subst_x(s) == a.subst_x(s) * b.subst_x(s)
        series = _random_series(rng, 10)
        i, j = rng.randint(0, 3), rng.randint(0, 3)
        assert series.subst_x(i).subst_x(j) == series.subst_x(i + j)


def test_truncation_commutes_with_operations(rng):
    order = 12
    for _ in range(25):
        a, b = _random_series(rng, order), _random_series(rng, order)
        k, s = rng.randint(0, order), rng.randint(0, 2)
        assert (a * b).truncate(k) == a.truncate(k) * b.truncate(k)
        assert (a + b).truncate(k) == a.truncate(k) + b.truncate(k)
        assert a.subst_x(s).truncate(k) == a.truncate(k).subst_x(s)
    with raises(SeriesError):
        TruncSeries.one(3).truncate(4)


def test_text_forms_parse_back(rng):
    for _ in range(40):
        p = _random_poly(rng, 6)
        assert PolyXQ.parse(str(p)) == p
        assert PolyXQ.parse(p.pretty()) == p
