from fractions import Fraction

import numpy as np
import pytest

from pkv import tables
from pkv.errors import DimensionError, IllConditionedError, PKVError, SingularMatrixError
from pkv.exact import I, ExactMatrix, GaussianRational, MultiPoly
from pkv.models import (SigmaMatrix, build_complex_model, build_frances_model, build_hessian_comparison,
                        build_product_extension, build_real_model, check_phiQ_in_O, phi_q, potential_numeric,
                        random_sigma, realify, takagi_diagonalize)
from pkv.tensor import MetricModel, TensorField, ricci, riemann, signature_at


def P(m, name):
    return MultiPoly.var(name, m.chart.variables)


def test_sigma_parsing():
    s = SigmaMatrix.parse("1+0i,0;0,0+1i")
    assert s.n == 2 and s[1, 1] == I and s[0, 1] == 0
    with pytest.raises(DimensionError, match="row length mismatch"):
        SigmaMatrix.parse("1,2;3")


def test_sigma_must_be_symmetric():
    with pytest.raises(PKVError):
        SigmaMatrix.of([[1, 2], [3, 4]])


def test_nondegeneracy_flag():
    assert SigmaMatrix.identity(2).nondegenerate
    assert not SigmaMatrix.of([[1, 1], [1, 1]]).nondegenerate


def test_complex_model_component_example():
    m = build_complex_model(SigmaMatrix.identity(1))
    assert m.g[(1, 1)] == P(m, "z1") * P(m, "w1")
    assert m.g[(0, 2)] == 1 and m.g[(2, 0)] == 1


def test_zero_sigma_leaves_only_the_delta_block():
    m = build_complex_model(SigmaMatrix.zero(1))
    assert all(p.is_constant() for _, p in m.g.items())
    assert riemann(realify(m)).is_zero()


def test_diagonal_sigma_hand_expansion():
    # σ = diag(1, i): h_{3 4} (1-based) = σ_11 conj(σ_22) z^1 w^2
    sigma = SigmaMatrix.of([[1, 0], [0, I]])
    m = build_complex_model(sigma)
    assert m.g[(2, 3)] == P(m, "z1") * P(m, "w2") * (-I)
    assert m.g[(0, 1)] == P(m, "z3") * P(m, "w4") * (-I)
    assert tables.tensor_difference(m.g, tables.complex_metric(sigma)) is None


@pytest.mark.parametrize("n", [1, 2])
def test_metric_families_for_random_sigma(n):
    rng = np.random.default_rng(10 + n)
    for _ in range(3):
        sigma = random_sigma(n, rng)
        assert tables.tensor_difference(build_complex_model(sigma).g, tables.complex_metric(sigma)) is None


def test_realification_signature():
    m = realify(build_complex_model(SigmaMatrix.identity(1)))
    pts = np.random.default_rng(0).uniform(-1, 1, size=(10, 8))
    assert {r.signature for r in signature_at(m, pts)} == {(4, 4)}


def test_non_hermitian_metric_is_rejected():
    m = build_complex_model(SigmaMatrix.identity(1))
    comps = dict(m.g.components)
    comps[(0, 1)] = m.chart.const(I)
    with pytest.raises(PKVError, match="not Hermitian"):
        MetricModel(m.chart, TensorField(m.chart, m.g.variance, comps), m.g_inv, "broken", dict(m.meta))


def test_real_model_examples():
    m = build_real_model(SigmaMatrix.identity(1))
    x1, x2 = P(m, "x1"), P(m, "x2")
    assert m.g[(0, 1)] == x1 * x2
    assert m.g[(0, 0)] == x2 * x2
    assert m.g[(0, 2)] == 1
    flat = build_real_model(SigmaMatrix.zero(1))
    assert riemann(flat).is_zero()


def test_real_model_needs_real_sigma():
    with pytest.raises(PKVError):
        build_real_model(SigmaMatrix.of([[I]]))


def test_hessian_comparison():
    sigma = SigmaMatrix.identity(1)
    h = build_hessian_comparison(sigma)
    g = build_real_model(sigma)
    assert h.g[(0, 1)] == P(h, "x1") * P(h, "x2") * 4
    assert riemann(h).is_zero()
    assert h.g[(0, 0)] == g.g[(0, 0)] * 2
    assert h.g[(1, 1)] == g.g[(1, 1)] * 2
    assert not h.g.equals(g.g)


def test_frances_model():
    m = build_frances_model()
    y2 = P(m, "y2")
    assert m.g[(0, 0)] == y2 * y2
    assert ricci(m).is_zero()


def test_product_extension():
    base = build_real_model(SigmaMatrix.identity(1))
    assert build_product_extension(base, 0, 0) is base
    prod = build_product_extension(base, 1, 1)
    pts = np.random.default_rng(0).uniform(-1, 1, size=(5, 6))
    assert {r.signature for r in signature_at(prod, pts)} == {(3, 3)}
    assert ricci(prod).is_zero()


def test_takagi_examples():
    r = takagi_diagonalize(np.diag([1.0, 2.0]))
    assert np.allclose(np.abs(r.Q), np.eye(2)) and r.residual == 0
    r = takagi_diagonalize(np.array([[0, 1], [1, 0]], dtype=complex))
    assert np.allclose(np.abs(r.diag), 1) and r.residual < 1e-10


def test_takagi_pulls_back_the_potential():
    rng = np.random.default_rng(3)
    A = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    A = A + A.T
    r = takagi_diagonalize(A)
    assert r.residual < 1e-10
    for _ in range(20):
        z = rng.normal(size=8) + 1j * rng.normal(size=8)
        assert abs(potential_numeric(A, phi_q(r.Q, z)) - potential_numeric(np.diag(r.diag), z)) < 1e-9


def test_takagi_ill_conditioned():
    with pytest.raises(IllConditionedError):
        takagi_diagonalize(np.diag([1.0, 1e-14]))


@pytest.mark.parametrize("q", [Fraction(2), Fraction(-3, 7), Fraction(5, 2)])
def test_phiQ_preserves_the_quadratic_term(q):
    assert check_phiQ_in_O([[GaussianRational(q)]])


def test_phiQ_cases():
    assert check_phiQ_in_O(ExactMatrix.identity(2))
    assert check_phiQ_in_O(ExactMatrix([[1, 2], [0, I]]))
    assert check_phiQ_in_O(np.array([[1.0, 2.0], [0.5, 3.0]]))
    with pytest.raises(SingularMatrixError):
        check_phiQ_in_O(ExactMatrix([[1, 1], [1, 1]]))
