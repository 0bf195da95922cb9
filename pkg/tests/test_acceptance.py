"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

The lines are echoed in the pytest terminal summary as well, so they show
up without ``-s``.
"""

import time
from contextlib import contextmanager

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from pkv import tables
from pkv.config import parse_config
from pkv.models import (SigmaMatrix, build_complex_model, build_hessian_comparison, build_real_model,
                        random_sigma)
from pkv.report import to_json
from pkv.suites import run_suites
from pkv.tensor import det_metric, ricci, ricci_logdet, riemann

REAL_SIGMA_2 = "1,1/2;1/2,-2"
CONFIGS = {
    "complex1": "model=complex\nn=1",
    "complex2": "model=complex\nn=2\nsigma=1,0+1i;0+1i,2",
    "real1": "model=real\nn=1",
    "real2": f"model=real\nn=2\nsigma={REAL_SIGMA_2}",
    "frances": "model=frances",
    "hessian": "model=hessian-comparison",
}


@pytest.fixture(scope="module")
def runs():
    cache = {}

    def get(key):
        if key not in cache:
            cache[key] = {r.name: r for r in run_suites(parse_config(CONFIGS[key]))}
        return cache[key]
    return get


@contextmanager
def criterion(number, title):
    t0 = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        line = f"{'PASS' if ok else 'FAIL'}  criterion {number:>2}: {title} ({time.perf_counter() - t0:.1f} s)"
        print(line)
        ACCEPTANCE_LINES.append(line)


def passed(reports, *names):
    for name in names:
        r = reports[name]
        assert r.status == "pass", f"{name}: {r.status} {r.witness}"


def test_metric_regression():
    with criterion(1, "metric component families reproduced exactly"):
        t0 = time.perf_counter()
        for n in (1, 2):
            rng = np.random.default_rng(100 + n)
            for _ in range(3):
                sigma = random_sigma(n, rng)
                assert tables.tensor_difference(build_complex_model(sigma).g, tables.complex_metric(sigma)) is None
        assert time.perf_counter() - t0 < 10.0


def test_ricci_flatness():
    with criterion(2, "Ric = 0 by contraction and log det, det h = 1"):
        for n in (1, 2):
            t0 = time.perf_counter()
            sigma = random_sigma(n, np.random.default_rng(200 + n))
            m = build_complex_model(sigma)
            assert ricci(m).is_zero()
            assert ricci_logdet(m).is_zero()
            assert det_metric(m) == 1
            r = build_real_model(random_sigma(n, np.random.default_rng(300 + n), real=True))
            assert ricci(r).is_zero()
            assert time.perf_counter() - t0 < 60.0


def test_local_symmetry(runs):
    with criterion(3, "∇R = 0, W ≠ 0 with witness, W = lowered Riemann"):
        for key in ("complex1", "complex2", "real1", "real2"):
            reports = runs(key)
            passed(reports, "∇R=0", "W≠0", "W = lowered Riemann")
            assert reports["W≠0"].witness


def test_curvature_tables(runs):
    with criterion(4, "curvature tables and the 4-dimensional model"):
        for key in ("complex1", "complex2"):
            passed(runs(key), "curvature table (mixed)", "curvature table (barred)", "Christoffel table")
        for key in ("real1", "real2"):
            passed(runs(key), "curvature table", "Christoffel table")
        passed(runs("frances"), "curvature table", "matches real n=1 curvature at origin")


def test_holonomy_dimensions(runs):
    with criterion(5, "holonomy dimensions 4n² and n(2n-1), block structure, kernel = U'"):
        for key, dim in (("complex1", 4), ("complex2", 16), ("real1", 1), ("real2", 6)):
            passed(runs(key), f"hol dim={dim}", "hol abelian unipotent block structure", "kernel = U'",
                   "hol preserves the metric")


def test_transvection_algebra(runs):
    with criterion(6, "Jacobi, lower central series, 3-step nilpotency"):
        for key in ("complex1", "complex2", "real1", "real2"):
            passed(runs(key), "Jacobi identity", "lower central series (hol+U', U', 0)", "3-step nilpotent")


def test_geodesics(runs):
    with criterion(7, "closed-form geodesics, RK4 agreement and order"):
        for key in ("complex1", "complex2", "real1", "real2"):
            passed(runs(key), "closed-form geodesic residual = 0", "degree profile (≤1 base, ≤3 null)",
                   "RK4 matches closed form", "RK4 order 4")


def test_conformal_identities(runs):
    with criterion(8, "homothety factors and the flat comparison metric"):
        names = ["φ_{a,b} factor (st)²", "φ_s factor s⁴", "ψ_t isometry"]
        for key in ("complex1", "real1"):
            passed(runs(key), *names, *(f"{n} on product (1,1)" for n in names))
        assert riemann(build_hessian_comparison(SigmaMatrix.identity(1))).is_zero()
        passed(runs("hessian"), "flat")


def test_quotient(runs):
    with criterion(9, "canonical representatives and boundary continuity"):
        for key in ("complex1", "real1"):
            reports = runs(key)
            passed(reports, "canonical representatives unique and orbit-invariant",
                   "boundary identification continuous")
            assert reports["canonical representatives unique and orbit-invariant"].witness["points"] == 100


def test_essentiality(runs):
    with criterion(10, "essentiality certificates and the complex structure"):
        for key in ("complex1", "real1"):
            passed(runs(key), "φ_{0,t} essential", "ψ_t not certified")
            assert runs(key)["φ_{0,t} essential"].witness["commutes_with_phi_ab"] is True
        passed(runs("frances"), "J² = -I", "ĝ₀ Hermitian for J", "hol commutes with J",
               "φ_{a,b} does not commute with J")


def test_determinism():
    with criterion(11, "byte-identical JSON for identical seeds"):
        cfg = parse_config("model=complex\nn=1\nseed=7")
        a = to_json(run_suites(cfg), cfg.to_dict(), timing=False)
        b = to_json(run_suites(cfg), cfg.to_dict(), timing=False)
        assert a == b
