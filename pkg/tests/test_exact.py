from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pkv.errors import InconsistentSystemError, SingularMatrixError, UnknownVariableError
from pkv.exact import (I, ExactMatrix, GaussianRational, MultiPoly, conjugate_poly, eval_poly,
                       make_variables, parse_gaussian, partial, poly_arith, poly_det)
from pkv.models import SigmaMatrix, kahler_potential

G = GaussianRational

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)
gaussians = st.builds(lambda a, b: G(a, b), rationals, rationals)


def var(name, universe):
    return MultiPoly.var(name, universe)


# Gaussian rationals ---------------------------------------------------------


def test_lowest_terms_and_positive_denominator():
    q = G(Fraction(6, -4), Fraction(10, 4))
    assert q.re == Fraction(-3, 2) and q.im == Fraction(5, 2)
    assert q.re.denominator > 0


@given(gaussians, gaussians, gaussians)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    if b:
        assert (a / b) * b == a


@given(gaussians)
def test_conjugation_and_modulus(q):
    assert q.conjugate().conjugate() == q
    assert (q * q.conjugate()).im == 0
    assert q.abs2() == q * q.conjugate()


@pytest.mark.parametrize("text, value", [
    ("3", G(3)),
    ("-3/4", G(Fraction(-3, 4))),
    ("1+0i", G(1)),
    ("0+1i", I),
    ("1/2-3/5i", G(Fraction(1, 2), Fraction(-3, 5))),
    ("-i", -I),
    ("2/3+1/3*i", G(Fraction(2, 3), Fraction(1, 3))),
])
def test_parse_literals(text, value):
    assert parse_gaussian(text) == value


@given(gaussians)
def test_parse_round_trip(q):
    assert parse_gaussian(str(q)) == q


@pytest.mark.parametrize("bad", ["", "1/", "i1", "1+2", "abc", "1/0", "1+1/0i"])
def test_parse_rejects_malformed(bad):
    with pytest.raises(ValueError):
        parse_gaussian(bad)


# polynomials ----------------------------------------------------------------


def test_binomial_square():
    U = ("x", "y")
    s = var("x", U) + var("y", U)
    expect = var("x", U) ** 2 + var("x", U) * var("y", U) * 2 + var("y", U) ** 2
    assert poly_arith(s, s, "mul") == expect


def test_zero_absorbs():
    U = ("x", "y")
    assert (var("x", U) * MultiPoly.zero(U)).terms == {}


def test_cancellation_drops_zero_terms():
    U = make_variables("z", 2) + make_variables("w", 2)
    p = var("z1", U) * var("w2", U) + var("z2", U) * I
    q = poly_arith(p, -(var("z1", U) * var("w2", U)), "add")
    assert q == var("z2", U) * I
    assert len(q.terms) == 1 and all(c for c in q.terms.values())


def test_partials():
    U = ("z1", "z2", "z3", "w1", "w2", "w3", "w4", "z4")
    assert partial(var("z1", U) * var("z2", U) * var("w1", U), "z1") == var("z2", U) * var("w1", U)
    assert partial(var("z1", U), "w1") == 0
    f = var("z1", U) * var("w3", U) + var("z2", U) * var("w4", U)
    assert partial(partial(f, "z1"), "w3") == 1


def test_partial_of_unknown_variable():
    with pytest.raises(UnknownVariableError):
        MultiPoly.var("x", ("x",)).partial("y")


def test_conjugate_examples():
    U = ("z1", "w1")
    assert conjugate_poly(var("z1", U) * I) == var("w1", U) * (-I)


@settings(max_examples=40)
@given(st.lists(st.tuples(gaussians, st.integers(0, 2), st.integers(0, 2)), max_size=6))
def test_conjugation_is_an_involution(terms):
    U = ("z1", "w1")
    p = MultiPoly.zero(U)
    for c, a, b in terms:
        p = p + MultiPoly.monomial(c, {"z1": a, "w1": b}, U)
    assert p.conjugate().conjugate() == p


def test_potential_is_self_conjugate():
    f = kahler_potential(SigmaMatrix.of([[G(1, 1)]]))
    assert f.conjugate() == f
    assert f.degree() == 4


@settings(max_examples=40)
@given(gaussians, gaussians, gaussians)
def test_leibniz_rule(a, b, c):
    U = ("x", "y")
    p = var("x", U) * a + var("y", U) * var("x", U) * b
    q = var("x", U) ** 2 * c + var("y", U)
    assert (p * q).partial("x") == p.partial("x") * q + p * q.partial("x")


def test_evaluation():
    U = ("z1", "w1", "z2", "w2")
    assert eval_poly(var("z1", U) * var("w1", U), {"z1": 2, "w1": 3}) == 6
    assert eval_poly(MultiPoly.zero(U), {}) == 0
    h11 = var("z2", U) * var("w2", U)
    assert eval_poly(h11, {"z2": G(1, 1), "w2": G(1, -1)}) == 2


def test_evaluation_floats():
    U = ("x", "y")
    assert eval_poly(var("x", U) * var("y", U), {"x": 0.5, "y": 4.0}) == pytest.approx(2.0)


# linear algebra -------------------------------------------------------------


def test_rank_and_inverse():
    assert ExactMatrix.zeros(3, 3).rank() == 0
    swap = ExactMatrix([[0, 1], [1, 0]])
    assert swap.inverse() == swap


def test_singular_inverse_reports_rank():
    with pytest.raises(SingularMatrixError) as err:
        ExactMatrix([[1, 2], [2, 4]]).inverse()
    assert err.value.rank == 1


def test_inconsistent_system():
    with pytest.raises(InconsistentSystemError):
        ExactMatrix([[1, 1], [1, 1]]).solve([1, 2])


small = st.lists(st.lists(st.integers(-3, 3), min_size=3, max_size=3), min_size=3, max_size=3)


@given(small)
def test_rank_nullity(rows):
    m = ExactMatrix(rows)
    kernel = m.kernel_basis()
    assert m.rank() + len(kernel) == 3
    for v in kernel:
        assert all(x == 0 for x in m.apply(v))


@given(small)
def test_inverse_is_exact(rows):
    m = ExactMatrix(rows)
    if m.rank() == 3:
        assert m @ m.inverse() == ExactMatrix.identity(3)


def test_polynomial_determinant():
    U = ("x",)
    x = var("x", U)
    one = MultiPoly.constant(1, U)
    assert poly_det([[x, one], [one, MultiPoly.zero(U)]]) == -1
