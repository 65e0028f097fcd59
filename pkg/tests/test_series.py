from pytest import mark, raises

from qfe.algebra import TruncSeries
from qfe.golden import THM13_PARITY, THM13_SERIES, THM14
from qfe.schemas import ProductSpec, SeriesParams
from qfe.series import (
    InadmissibleParamsError, eval_series, expand_product, exponent, is_admissible, pochhammer_inv, summands,
)


def test_exponent(ag_k3):
    assert exponent(ag_k3, 0, 0) == 0
    assert exponent(ag_k3, 1, 1) == 5
    # x = q^s shifts C by s*D
    assert exponent(ag_k3, 1, 0, x_power=1) == exponent(ag_k3.with_c(0, -1), 1, 0)


def test_pochhammer_inverse():
    assert pochhammer_inv(1, 2, 6).q_coefficients() == [1, 1, 2, 2, 3, 3, 4]
    assert pochhammer_inv(2, 1, 5).q_coefficients() == [1, 0, 1, 0, 1, 0]
    assert pochhammer_inv(3, 0, 3).q_coefficients() == [1, 0, 0, 0]


def test_summands_stay_within_order(ag_k3):
    order = 12
    found = list(summands(ag_k3, order))
    assert (0, 0, 0) in found
    assert all(e <= order for _, _, e in found)
    assert len(found) == len({(m, n) for m, n, _ in found})


def test_admissibility(thm41):
    assert is_admissible(thm41)
    assert not is_admissible(thm41.with_c(-5, 0))
    edge = thm41.with_c(-2, 0)
    assert is_admissible(edge)
    assert not is_admissible(edge, 0)
    assert is_admissible(edge, 1)


def test_inadmissible_series_raises(thm41):
    with raises(InadmissibleParamsError):
        eval_series(thm41.with_c(-5, 0), 10)
    with raises(InadmissibleParamsError):
        eval_series(thm41.with_c(-2, 0), 10, x_power=0)
    with raises(ValueError):
        eval_series(thm41, -1)


def test_symbolic_coefficients(ag_k3):
    s = eval_series(ag_k3.with_c(0, 0), 6)
    assert s.coefficient(0, 0) == 1
    # x^1 only comes from n = 1: x q^2 / (1 - q)
    assert [s.coefficient(1, k) for k in range(7)] == [0, 0, 1, 1, 1, 1, 1]


def test_substitution_matches_twist(thm41):
    """x = q^s is the same series as C_j -> C_j + s*D_j at x = 1."""
    twisted = thm41.with_c(thm41.C1 + thm41.D1, thm41.C2 + thm41.D2)
    assert eval_series(thm41, 20, 1) == eval_series(twisted, 20, 0)
    assert eval_series(thm41, 20).subst_x_value(1, 1) == eval_series(thm41, 20, 1)


def test_regular_three_product(thm41):
    product = ProductSpec.parse("(q^1,q^2,q^3;q^4)_inf^-1")
    assert eval_series(thm41, 40, 0) == expand_product(product, 40)


def test_expand_product_mod_14():
    product = ProductSpec(modulus=14, factors=[(2, -1), (4, -1), (10, -1), (12, -1)])
    assert expand_product(product, 14).q_coefficients() == [1, 0, 1, 0, 2, 0, 2, 0, 3, 0, 4, 0, 6, 0, 7]


@mark.parametrize("params, product", THM13_SERIES)
def test_alternating_series_products(params, product):
    order = 50
    assert eval_series(params, order, 0) == expand_product(ProductSpec.parse(product), order)


def test_parity_rewrite():
    order = 50
    assert eval_series(THM13_PARITY, order, 0) == eval_series(THM13_SERIES[2][0], order, 0)


def test_alternating_mod_6_product():
    order = 50
    assert eval_series(THM14, order, 0) == expand_product(ProductSpec.parse("(q^1,q^5;q^6)_inf^1"), order)


def test_alternating_mod_6_series_starts_with_minus_q():
    coeffs = eval_series(THM14, 6, 0).q_coefficients()
    assert coeffs[:2] == [1, -1]
    assert (THM14.C1, THM14.C2) == (-6, -5)


def test_product_spec_text():
    spec = ProductSpec.parse("(q^2,q^4;q^14)_inf^-1 * (q^1;q^14)_inf^2")
    assert spec.modulus == 14
    assert str(spec) == "(q^2,q^4;q^14)_inf^-1 * (q^1;q^14)_inf^2"
    assert str(ProductSpec.parse("1")) == "1"
    with raises(ValueError):
        ProductSpec.parse("(q^1;q^4)_inf^1 * (q^1;q^5)_inf^1")
    with raises(ValueError):
        ProductSpec(modulus=4, factors=[(5, 1)])


def test_params_parsing():
    p = SeriesParams.parse("4,2,2,-2,-1,2,1,1,1,1")
    assert p.as_tuple() == (4, 2, 2, -2, -1, 2, 1, 1, 1, 1, 1, 1)
    assert str(p) == "4,2,2,-2,-1,2,1,1,1,1,1,1"
    assert SeriesParams.parse(str(p)) == p
    with raises(ValueError):
        SeriesParams.parse("1,2,3")
    with raises(ValueError):
        SeriesParams.from_list([4, 2, 2, 0, 0, 1, 1, 1, 1, 1, 2, 1])


def test_product_times_inverse_is_one(rng):
    order = 30
    for _ in range(15):
        modulus = rng.randint(1, 8)
        residues = rng.sample(range(1, modulus + 1), rng.randint(1, modulus))
        spec = ProductSpec(modulus=modulus, factors=[(r, rng.choice([-3, -2, -1, 1, 2, 3])) for r in residues])
        inverse = ProductSpec(modulus=modulus, factors=[(r, -e) for r, e in spec.factors])
        assert expand_product(spec, order) * expand_product(inverse, order) == TruncSeries.one(order)


def test_series_at_order_zero_is_one(rng):
    checked = 0
    for _ in range(40):
        p = SeriesParams(
            B11=rng.randint(1, 6), B22=rng.randint(1, 6), B12=rng.randint(1, 6),
            C1=rng.randint(-2, 3), C2=rng.randint(-2, 3),
            D1=rng.randint(1, 3), D2=rng.randint(1, 3), K1=rng.randint(1, 3), K2=rng.randint(1, 3),
            gamma=rng.randint(1, 2), eps1=rng.choice([1, -1]), eps2=rng.choice([1, -1]),
        )
        if not is_admissible(p, 0):
            continue
        checked += 1
        assert eval_series(p, 0) == TruncSeries.one(0)
        assert eval_series(p, 0, 0) == TruncSeries.one(0)
    assert checked
