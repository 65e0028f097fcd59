from pytest import mark, raises

from qfe.algebra import ONE, PolyXQ, TruncSeries
from qfe.contiguous import (
    BoxError, FuncEquation, IndexBox, SeriesRef, count_equations, count_series, dilation_filter,
    enumerate_box, feasible, format_sum, lattice_steps, primary_equations, rect_sizes,
)
from qfe.golden import AG_K3_EQUATIONS, THM11
from qfe.schemas import SeriesParams
from qfe.series import eval_series, is_admissible


def test_running_example_box(ag_k3, ag_k3_box):
    equations = enumerate_box(ag_k3, ag_k3_box)
    assert [str(eq) for eq in equations] == AG_K3_EQUATIONS
    assert [eq.kind for eq in equations] == ["T1"] * 4 + ["T2"] * 8 + ["T3"] * 4
    assert count_equations(ag_k3, 3, 2) == 16
    assert count_series(ag_k3, 3, 2) == 24
    assert rect_sizes(ag_k3) == (2, 1, 0, 1, 2, 1)


def test_running_example_is_not_strictly_feasible(ag_k3):
    """16 equations against 24 - 2*3 unwanted series: the gate would prune it."""
    assert not feasible(ag_k3, 3, 2, 3)


def test_primary_equations_shape(ag_k3):
    t1, t2, t3 = primary_equations(ag_k3, 0, 0)
    assert str(t1) == "S[0,0](x) - S[1,0](x) - x^2*q^4*S[2,1](x*q) = 0"
    assert str(t2) == "S[0,0](x) - S[0,1](x) - x*q^2*S[0,1](x*q) = 0"
    assert str(t3) == "S[0,0](x) - S[-2,-1](x*q) = 0"
    assert t1.coefficient(SeriesRef(1, 0)) == -ONE
    assert t3.pairs() == {(0, 0), (-2, -1)}


def test_equation_merges_repeated_refs():
    eq = FuncEquation.build([(ONE, SeriesRef(0, 0)), (ONE, SeriesRef(0, 0)), (-ONE, SeriesRef(1, 0, 1))])
    assert str(eq) == "2*S[0,0](x) - S[1,0](x*q) = 0"
    with raises(ValueError):
        FuncEquation.build([(ONE, SeriesRef(0, 0)), (-ONE, SeriesRef(0, 0))])


def test_format_sum_parenthesizes_polynomials():
    coeff = ONE + PolyXQ.monomial(1, 2, 2)
    assert format_sum([(coeff, "A"), (PolyXQ.monomial(-1, 1, 1), "B")]) == "(1 + x^2*q^2)*A - x*q*B"
    assert format_sum([]) == "0"


def test_lattice_and_box():
    assert lattice_steps(THM11) == (2, 1)
    box = IndexBox.for_params(THM11, (-4, 4, -1, 2))
    assert box.contains((-2, 0))
    assert not box.contains((-3, 0))
    assert len(list(box.pairs())) == 20
    with raises(BoxError):
        IndexBox.for_params(THM11, (-4, 3, -1, 2))
    with raises(BoxError):
        IndexBox(0, -1, 0, 0)
    with raises(BoxError):
        count_equations(THM11, 3, 1)


def test_box_around_seed(ag_k3):
    box = IndexBox.around(ag_k3, (-2, -1), (2, 1))
    assert box.bounds == (-4, 0, -2, 0)


def test_counts_match_enumeration(ag_k3):
    for bounds in [(-2, 1, -1, 1), (-3, 1, -1, 2), (-2, 0, -1, 0), (0, 1, 0, 0)]:
        box = IndexBox.for_params(ag_k3, bounds)
        dm1, dm2 = box.widths
        assert count_equations(ag_k3, dm1, dm2) == len(enumerate_box(ag_k3, box))


@mark.parametrize("values, keep", [
    ((4, 2, 2, 0, 0, 2, 1, 1, 1, 1), True),
    ((4, 2, 2, 0, 0, 2, 1, 2, 2, 1), False),
    ((4, 2, 2, 1, 0, 2, 1, 2, 2, 1), False),
])
def test_dilation_filter(values, keep):
    assert dilation_filter(SeriesParams.from_list(list(values))) is keep


def test_dilation_filter_with_linear_terms():
    p = SeriesParams.from_list([4, 2, 2, 1, 0, 2, 1, 2, 2, 1])
    assert not dilation_filter(p)
    assert dilation_filter(p, include_c=True)


def _residual(p: SeriesParams, eq: FuncEquation, order: int) -> TruncSeries:
    total = TruncSeries(order)
    for coeff, ref in eq.terms:
        series = eval_series(p.with_c(ref.c1, ref.c2), order).subst_x(ref.shift)
        total = total + series.mul_poly(coeff)
    return total


def test_primary_relations_hold_on_random_parameters(rng):
    """Every primary relation vanishes identically through q^20 on random admissible draws."""
    order = 20
    draws = 0
    while draws < 50:
        p = SeriesParams(
            B11=rng.randint(1, 4), B22=rng.randint(1, 4), B12=rng.randint(1, 4),
            C1=rng.randint(0, 3), C2=rng.randint(0, 3),
            D1=rng.randint(1, 3), D2=rng.randint(1, 3), K1=rng.randint(1, 3), K2=rng.randint(1, 3),
            gamma=rng.randint(1, 2), eps1=rng.choice([1, -1]), eps2=rng.choice([1, -1]),
        )
        checked = 0
        for eq in primary_equations(p, p.C1, p.C2):
            if any(c.min_qdeg() < 0 for c, _ in eq.terms):
                continue
            if not all(is_admissible(p.with_c(*pair)) for pair in eq.pairs()):
                continue
            assert _residual(p, eq, order).is_zero(), f"{eq} fails for {p}"
            checked += 1
        if checked:
            draws += 1
