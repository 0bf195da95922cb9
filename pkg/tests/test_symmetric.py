import pytest

from pkv.exact import ExactMatrix
from pkv.models import (SigmaMatrix, build_complex_model, build_frances_model, build_real_model)
from pkv.symmetric import (build_transvection_algebra, complex_structure_check, curvature_endomorphism,
                           frances_complex_structure, hol_block_structure, holonomy_span,
                           indecomposability_evidence, nilpotency_certificate)
from pkv.tensor import riemann


@pytest.fixture(scope="module")
def complex1():
    return holonomy_span(build_complex_model(SigmaMatrix.identity(1)))


@pytest.fixture(scope="module")
def real1():
    return holonomy_span(build_real_model(SigmaMatrix.identity(1)))


@pytest.mark.parametrize("build, n, expect", [
    (build_complex_model, 1, 4),
    (build_complex_model, 2, 16),
    (build_real_model, 1, 1),
    (build_real_model, 2, 6),
])
def test_holonomy_dimension(build, n, expect):
    h = holonomy_span(build(SigmaMatrix.identity(n)))
    assert h.dim == expect
    assert h.isometry_defects() == []
    assert h.nilpotency_defects() == []


def test_frances_holonomy_is_a_line():
    assert holonomy_span(build_frances_model()).dim == 1


def test_zero_sigma_has_trivial_holonomy():
    assert holonomy_span(build_real_model(SigmaMatrix.zero(2))).dim == 0


def test_block_structure_complex(complex1):
    r = hol_block_structure(complex1)
    assert r.ok
    assert r.details["lower_block_kind"] == "skew-Hermitian"
    assert r.details["fills_block_space"]


def test_block_structure_real_n2():
    r = hol_block_structure(holonomy_span(build_real_model(SigmaMatrix.of([[1, 0], [0, 1]]))))
    assert r.ok and r.details["lower_block_span"] == 6 and r.details["full_dim"] == 6


def test_curvature_endomorphisms_are_skew(real1):
    g0 = real1.g0
    for b in real1.generators:
        assert (b.T @ g0 + g0 @ b).is_zero()


def test_indecomposable_complex(complex1):
    r = indecomposability_evidence(complex1)
    assert r.status == "pass"
    assert r.details["kernel_equals_u_prime"] and r.details["u_prime_totally_null"]


def test_real_n1_is_indeterminate(real1):
    # orbits hol·v are lines inside a plane, too small for the intersection argument
    r = indecomposability_evidence(real1, seed=4)
    assert r.status == "indeterminate"
    assert set(r.details["orbit_span_dims"]) == {1}
    assert r.details["u_prime_dim"] == 2


def test_degenerate_sigma_not_applicable():
    h = holonomy_span(build_real_model(SigmaMatrix.zero(1)))
    assert indecomposability_evidence(h).status == "not-applicable"


def test_bracket_of_translations_is_minus_curvature(real1):
    t = build_transvection_algebra(real1)
    m = real1.model
    endo = curvature_endomorphism(riemann(m), 1, 0, m.dim).scale(-1)
    coords = real1.coordinates(endo)
    got = t.bracket_basis(t.m_index(1), t.m_index(0))
    assert [got.get(k, 0) for k in range(real1.dim)] == list(coords)
    assert any(coords)


@pytest.mark.parametrize("build, series", [
    (lambda: build_complex_model(SigmaMatrix.identity(1)), [8, 4, 0]),
    (lambda: build_real_model(SigmaMatrix.identity(1)), [3, 2, 0]),
    (lambda: build_real_model(SigmaMatrix.identity(2)), [10, 4, 0]),
])
def test_three_step_nilpotent(build, series):
    c = nilpotency_certificate(build_transvection_algebra(holonomy_span(build())))
    assert c.series_dims == series
    assert c.three_step
    assert c.jacobi_defects == 0
    assert c.u_prime_central and c.center_equals_u_prime and c.derived_abelian


def test_jacobi_complex(complex1):
    assert build_transvection_algebra(complex1).jacobi_defects() == []


def test_complex_structure():
    J = frances_complex_structure()
    assert J @ J == ExactMatrix.identity(4).scale(-1)
    r = complex_structure_check(build_frances_model())
    assert r.ok
    assert r.details["hol_invariant"] and r.details["hermitian_wrt_g0"]
    assert not r.details["phi_ab_commutes_with_J"]
    assert r.details["phi_ab_commutator_witness"] == {"entry": (0, 1), "value": "-s + t"}


def test_complex_structure_only_for_frances():
    assert complex_structure_check(build_real_model(SigmaMatrix.identity(1))).status == "not-applicable"
