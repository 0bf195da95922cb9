import math

import numpy as np
import pytest

from pkv.conformal import (ELLIPSOID, INTERIOR, OUTSIDE, SPHERE, FundamentalDomain, HomothetySpec,
                           angle_distance, canonical_representative, domain_membership,
                           essentiality_certificate, fixed_point_set, maps_commute, model_blocks,
                           pullback_factor, quotient_chart)
from pkv.errors import DimensionError, PKVError
from pkv.exact import MultiPoly
from pkv.models import (SigmaMatrix, build_complex_model, build_frances_model, build_hessian_comparison,
                        build_product_extension, build_real_model)

MODELS = {
    "complex n=2": lambda: build_complex_model(SigmaMatrix.identity(2)),
    "real": lambda: build_real_model(SigmaMatrix.identity(1)),
    "frances": build_frances_model,
    "product": lambda: build_product_extension(build_real_model(SigmaMatrix.identity(1)), 1, 1),
    "hessian": lambda: build_hessian_comparison(SigmaMatrix.identity(1)),
}
FACTORS = {"phi_ab": "s^2*t^2", "phi_s": "s^4", "psi_t": "1", "phi_0t": "t^2", "identity": "1"}


@pytest.mark.parametrize("name", sorted(MODELS))
@pytest.mark.parametrize("family", sorted(FACTORS))
def test_pullback_factors(name, family):
    r = pullback_factor(MODELS[name](), HomothetySpec(family))
    assert r.ok, r.witness
    assert str(r.factor) == FACTORS[family]


def test_identity_has_factor_one():
    r = pullback_factor(build_real_model(SigmaMatrix.identity(1)), HomothetySpec("identity"))
    assert r.factor == MultiPoly.constant(1, r.factor.variables)


def test_numeric_parameters():
    h = HomothetySpec("phi_ab", (0.3, 0.7))
    assert h.numeric_scale(h.factor_exponents()) == pytest.approx(math.exp(2.0))
    with pytest.raises(ValueError):
        HomothetySpec("phi_ab", (1.0,))
    with pytest.raises(ValueError):
        HomothetySpec("rotation")


def test_fixed_point_sets():
    m = build_complex_model(SigmaMatrix.identity(2))
    cert = essentiality_certificate(HomothetySpec("phi_0t"), m)
    assert cert.fixed_dim == 4  # real dimension 2n
    assert fixed_point_set(HomothetySpec("phi_ab"), model_blocks(m)).dim == 0
    numeric = fixed_point_set(HomothetySpec("phi_0t", (0.5,)), model_blocks(m))
    assert numeric.indices == [0, 1]


def test_essentiality_certificates():
    m = build_real_model(SigmaMatrix.identity(1))
    phi = essentiality_certificate(HomothetySpec("phi_0t"), m)
    assert phi.certified and phi.descends and phi.factor == "t^2"
    psi = essentiality_certificate(HomothetySpec("psi_t"), m)
    assert not psi.certified and psi.factor == "1"
    ab = essentiality_certificate(HomothetySpec("phi_ab"), m)
    assert not ab.certified and "fixed points" in ab.note


def test_homotheties_commute():
    m = build_real_model(SigmaMatrix.identity(1))
    assert maps_commute(HomothetySpec("phi_0t"), HomothetySpec("phi_ab"), m)
    assert maps_commute(HomothetySpec("psi_t"), HomothetySpec("phi_s"), m)


# fundamental domain ---------------------------------------------------------


@pytest.fixture
def domain():
    return FundamentalDomain.contiguous(1.0, 1.0, 1)


def test_membership(domain):
    lam_min = float(np.min(domain.lambdas))
    assert domain_membership(domain, [1, 0, 0, 0]) == SPHERE
    assert domain_membership(domain, [lam_min, 0, 0, 0]) == ELLIPSOID
    assert domain_membership(domain, [(1 + lam_min) / 2, 0, 0, 0]) == INTERIOR
    assert domain_membership(domain, [0.5, 0, 0, 0]) == OUTSIDE


def test_membership_rejects_bad_points(domain):
    with pytest.raises(ValueError):
        domain_membership(domain, [0, 0, 0, 0])
    with pytest.raises(DimensionError):
        domain_membership(domain, [1, 0])


@pytest.mark.parametrize("k", [-3, 0, 2, 5])
def test_representative_recovers_the_power(domain, k):
    y = np.array([0.6, 0.5, 0.4, 0.3])
    y = y / math.sqrt(np.sum(y ** 2)) * 1.05
    assert domain_membership(domain, y) == INTERIOR
    x = domain.apply(y, -k)
    got, rep = canonical_representative(domain, x)
    assert got == k
    assert np.allclose(rep, y, rtol=1e-12)


def test_sphere_points_have_angle_zero(domain):
    tau, s = quotient_chart(domain, [0, 1, 0, 0])
    assert tau == 0.0 and np.allclose(s, [0, 1, 0, 0])


def test_angle_approaches_one_near_the_ellipsoid(domain):
    lam = domain.lambdas[0]
    taus = [quotient_chart(domain, [lam * (1 - eps), 0, 0, 0])[0] for eps in (1e-2, 1e-4, 1e-6)]
    assert taus == sorted(taus) and 1 - taus[-1] < 1e-5
    assert angle_distance(taus[-1], 0.0) < 1e-5


def test_chart_is_orbit_invariant(domain):
    rng = np.random.default_rng(0)
    for _ in range(10):
        x = rng.normal(size=4)
        tau, s = quotient_chart(domain, x)
        for k in (-2, 1, 3):
            tau2, s2 = quotient_chart(domain, domain.apply(x, k))
            assert angle_distance(tau, tau2) < 1e-9
            assert np.allclose(s, s2, atol=1e-8)


def test_domain_for_models():
    d = FundamentalDomain.for_model(1.0, 0.5, build_complex_model(SigmaMatrix.identity(1)))
    assert d.dim == 4
    with pytest.raises(PKVError):
        FundamentalDomain.for_model(1.0, 0.5, MODELS["product"]())
    with pytest.raises(ValueError):
        FundamentalDomain(0.0, 1.0, (0, 1, 2, 3))
