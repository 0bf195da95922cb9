import numpy as np
import pytest

from pkv.exact import I, MultiPoly
from pkv.models import (SigmaMatrix, build_complex_model, build_flat_model, build_frances_model,
                        build_real_model, build_test_metric_2d, realify)
from pkv.numeric import (conformally_flat_sphere_metric, fd_christoffel, fd_ricci, fd_riemann,
                         metric_function, CompiledTensor, relative_error)
from pkv.tensor import (LOWER, LOWER_BAR, UPPER, Chart, MetricModel, TensorField, covariant_derivative, det_metric,
                        levi_civita, lower_riemann, ricci, ricci_logdet, riemann, scalar_gradient,
                        signature_at, weyl)


@pytest.fixture(scope="module")
def real1():
    return build_real_model(SigmaMatrix.identity(1))


@pytest.fixture(scope="module")
def complex1():
    return build_complex_model(SigmaMatrix.identity(1))


def test_flat_metric_is_flat():
    m = build_flat_model(4)
    assert levi_civita(m).is_zero()
    assert riemann(m).is_zero()
    assert weyl(m).is_zero()
    assert det_metric(m) == 1


def test_component_shapes(complex1):
    g = levi_civita(complex1)
    assert g.shape == (4, 4, 4)
    assert len(complex1.chart.variables) == 8


def test_metric_is_symmetric(real1):
    for (a, b), p in real1.g.items():
        assert real1.g[(b, a)] == p


def test_christoffel_examples(complex1, real1):
    gc = levi_civita(complex1)
    w2 = MultiPoly.var("w2", complex1.chart.variables)
    assert gc[(2, 1, 0)] == w2
    gr = levi_civita(real1)
    x = real1.chart.variables
    assert gr[(2, 0, 1)] == MultiPoly.var(x[1], x)
    assert gr[(3, 0, 1)] == MultiPoly.var(x[0], x)


def test_mixed_curvature_example(complex1):
    # R(∂_{w1}, ∂_{z2})∂_{z1} has coefficient 1 on ∂_{z3}
    assert riemann(complex1)[(2, 0, 1, 1)] == 1


def test_frances_curvature():
    R = riemann(build_frances_model())
    assert R[(3, 0, 0, 1)] == 1
    assert R[(2, 1, 0, 1)] == -1
    assert len([k for k, p in R.items() if p.terms]) == 4


@pytest.mark.parametrize("n", [1, 2])
def test_ricci_flat_both_paths(n):
    sigma = SigmaMatrix.of([[1, I], [I, 2]]) if n == 2 else SigmaMatrix.of([[1 + I]])
    m = build_complex_model(sigma)
    assert ricci(m).is_zero()
    assert ricci_logdet(m).is_zero()
    assert det_metric(m) == 1


def test_real_determinant_sign(real1):
    d = det_metric(real1)
    assert d.is_constant() and d == 1


def test_ricci_nonzero_on_curved_test_metric():
    m = build_test_metric_2d()
    ric = ricci(m)
    assert not ric.is_zero()
    assert ric.equals(m.g)


def test_weyl_properties(real1):
    R = riemann(real1)
    W = weyl(real1, R)
    assert not W.is_zero()
    assert W.equals(lower_riemann(real1, R))


def test_weyl_vanishes_for_zero_sigma():
    m = realify(build_complex_model(SigmaMatrix.zero(1)))
    assert riemann(m).is_zero()
    assert weyl(m).is_zero()


def test_parallel_metric_and_curvature(real1):
    assert covariant_derivative(real1, real1.g).is_zero()
    assert covariant_derivative(real1, riemann(real1)).is_zero()


def test_gradient_of_coordinate_is_parallel():
    m = build_flat_model(4)
    x1 = m.chart.coord(0)
    df = TensorField(m.chart, (LOWER,), {(0,): m.chart.const(1)})
    assert covariant_derivative(m, df).is_zero()
    assert scalar_gradient(m, x1)[(0,)] == 1


def test_signatures(real1, complex1):
    rng = np.random.default_rng(0)
    pts8 = rng.uniform(-1, 1, size=(10, 8))
    assert {r.signature for r in signature_at(realify(complex1), pts8)} == {(4, 4)}
    assert {r.signature for r in signature_at(real1, rng.uniform(-1, 1, size=(10, 4)))} == {(2, 2)}
    assert signature_at(build_flat_model(4), [np.zeros(4)])[0].signature == (4, 0)


def test_sphere_oracle_curvature():
    # (1+|x|²)^{-2}δ is a round sphere of curvature 4, so Ric = 4(d-1) g
    rng = np.random.default_rng(1)
    for _ in range(3):
        x = rng.uniform(-0.5, 0.5, size=2)
        ric = fd_ricci(conformally_flat_sphere_metric, x, 1e-3)
        expect = 4.0 * conformally_flat_sphere_metric(x)
        assert relative_error(ric, expect) < 1e-6
        assert np.max(np.abs(ric)) > 0.1


def test_exact_curvature_agrees_with_finite_differences(real1):
    exact = CompiledTensor(riemann(real1))
    metric = metric_function(real1)
    rng = np.random.default_rng(2)
    for _ in range(3):
        x = rng.uniform(-1, 1, size=4)
        assert np.max(np.abs(fd_riemann(metric, x) - exact(x))) < 1e-7
        assert np.max(np.abs(fd_christoffel(metric, x) - CompiledTensor(levi_civita(real1))(x))) < 1e-9


def test_realified_flat_line():
    chart = Chart.holomorphic(1)
    one = chart.const(1)
    g = TensorField(chart, (LOWER, LOWER_BAR), {(0, 0): one})
    m = MetricModel(chart, g, TensorField(chart, (UPPER, UPPER), {(0, 0): one}), "flat line", {"family": "flat"})
    r = realify(m)
    assert r.g[(0, 0)] == 1 and r.g[(1, 1)] == 1 and r.g[(0, 1)] == 0
