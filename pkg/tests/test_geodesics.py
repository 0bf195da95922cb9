from fractions import Fraction

import numpy as np
import pytest

from pkv.exact import I, MultiPoly
from pkv.geodesics import (T_UNIVERSE, GeodesicIntegrator, completeness_witness, conjugation_check,
                           convergence_study, energy, geodesic_residual, parallel_null_split,
                           random_rational, reference_solution, solve_geodesic, trajectory_csv)
from pkv.models import (SigmaMatrix, build_complex_model, build_flat_model, build_frances_model,
                        build_real_model, build_test_metric_2d, realify)


@pytest.fixture(scope="module")
def real1():
    return build_real_model(SigmaMatrix.identity(1))


def t_poly(coeffs):
    return MultiPoly(T_UNIVERSE, {(k,): c for k, c in enumerate(coeffs) if c})


def test_zero_velocity_is_constant(real1):
    gd = solve_geodesic(real1, [0, 0, 0, 0], [1, 2, 3, 4])
    assert gd.degrees() == [0, 0, 0, 0]
    assert np.allclose(gd.at(7.0), [1, 2, 3, 4])


def test_cubic_example(real1):
    gd = solve_geodesic(real1, [1, 1, 0, 0], [0, 0, 0, 0])
    cubic = t_poly([0, 0, 0, Fraction(-1, 3)])
    assert gd.components[2] == cubic and gd.components[3] == cubic
    traj = GeodesicIntegrator(real1).run([1, 1, 0, 0], [0, 0, 0, 0], 2.0, 1e-4, [2.0])
    assert np.allclose(traj.positions[-1], [2, 2, -8 / 3, -8 / 3], atol=1e-10)


def test_residual_detects_a_corrupted_solution(real1):
    gd = solve_geodesic(real1, [1, 1, 0, 0], [0, 0, 0, 0])
    assert not any(r.terms for r in geodesic_residual(real1, gd))
    gd.components[2] = t_poly([0, 0, 0, Fraction(-1, 2)])
    assert any(r.terms for r in geodesic_residual(real1, gd))


def test_split_and_degrees(real1):
    base, null = parallel_null_split(real1)
    assert sorted(base + null) == [0, 1, 2, 3] and len(null) == 2
    rng = np.random.default_rng(2)
    for _ in range(5):
        gd = solve_geodesic(real1, random_rational(rng, 4), random_rational(rng, 4))
        assert gd.degree_profile_ok()
        assert energy(real1, gd).is_constant()


def test_flat_model_gives_lines():
    m = build_flat_model(3)
    gd = solve_geodesic(m, [1, 2, 3], [0, 1, 0])
    assert max(gd.degrees()) == 1
    assert np.allclose(gd.at(2.0), [2, 5, 6])


def test_frances_rk4_conserves_energy():
    m = build_frances_model()
    integ = GeodesicIntegrator(m)
    traj = integ.run([1.0, -0.5, 0.3, 0.2], [0.1, 0.2, 0.0, 0.0], 5.0, 1e-3)
    e = integ.energy(traj.positions, traj.velocities)
    assert np.max(np.abs(e - e[0])) < 1e-9


def test_rk4_rejects_holomorphic_chart():
    with pytest.raises(Exception, match="realified"):
        GeodesicIntegrator(build_complex_model(SigmaMatrix.identity(1)))


def test_completeness_statuses(real1):
    assert completeness_witness(real1).status == "polynomial, complete"
    assert completeness_witness(build_complex_model(SigmaMatrix.identity(1)), samples=3).status == "polynomial, complete"
    assert completeness_witness(build_test_metric_2d()).status == "not witnessed"


def test_holomorphic_geodesics_match_realified():
    m = build_complex_model(SigmaMatrix.of([[1 + I]]))
    r = realify(m)
    rng = np.random.default_rng(1)
    for _ in range(2):
        assert conjugation_check(m, r, random_rational(rng, r.dim), random_rational(rng, r.dim))


def test_rk4_is_fourth_order():
    m = build_test_metric_2d()
    p, q = [1.0, 0.8], [0.2, 0.5]
    ref = reference_solution(m, p, q, 1.0)
    study = convergence_study(m, p, q, 1.0, [0.1, 0.025, 0.00625], ref)
    assert all(3.7 < o < 4.3 for o in study.orders)
    assert study.errors[-1] < study.errors[0]


def test_csv_layout():
    text = trajectory_csv([0.0, 1.0], np.array([[0.0, 1.0], [2.0, 3.0]]))
    lines = text.strip().splitlines()
    assert lines[0].split(",")[0] == "t" and len(lines) == 3
