"""Verification suites: each suite turns model properties into CheckReports.

Suites run in a fixed order and share one lazily built context, so results
are deterministic for a given configuration and seed. An exception inside a
check becomes a failing report carrying the error text.
"""

from __future__ import annotations

import math
import time
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterator

import numpy as np

from . import tables
from .config import SUITES, RunConfig
from .conformal import (FundamentalDomain, HomothetySpec, angle_distance, canonical_representative,
                        domain_membership, essentiality_certificate, maps_commute, pullback_factor,
                        quotient_chart, INTERIOR, SPHERE)
from .errors import NoClosedFormError, PKVError
from .exact import GaussianRational
from .geodesics import (GeodesicIntegrator, completeness_witness, conjugation_check, convergence_study,
                        energy, geodesic_residual, parallel_null_split, random_rational, reference_solution,
                        solve_geodesic)
from .models import (SigmaMatrix, build_complex_model, build_frances_model, build_hessian_comparison,
                     build_product_extension, build_real_model, build_test_metric_2d, check_phiQ_in_O,
                     phi_q, potential_numeric, realify, takagi_diagonalize)
from .numeric import CompiledTensor, fd_riemann, metric_function, relative_error
from .report import FAIL, INDETERMINATE, NOT_APPLICABLE, PASS, SKIPPED, CheckReport
from .symmetric import (build_transvection_algebra, complex_structure_check, hol_block_structure,
                        holonomy_span, indecomposability_evidence, nilpotency_certificate)
from .tensor import (HOLOMORPHIC, MetricModel, covariant_derivative, det_metric, levi_civita, lower_riemann,
                     ricci, ricci_logdet, riemann, signature_at, weyl)

EXACT_LIMIT = 3
NUMERIC_SUITES = ("quotient",)
PLUMBING = "plumbing"

Outcome = tuple  # (status, witness)


class Context:
    """Models and tensors shared between suites, built on first use."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.sigma: SigmaMatrix = cfg.sigma

    @property
    def exact_sigma(self) -> bool:
        return self.sigma.exact

    @cached_property
    def model(self) -> MetricModel:
        c = self.cfg
        if c.model == "complex":
            return build_complex_model(self.sigma)
        if c.model == "real":
            return build_real_model(self.sigma)
        if c.model == "frances":
            return build_frances_model()
        if c.model == "hessian-comparison":
            return build_hessian_comparison(self.sigma)
        base = build_complex_model(self.sigma) if c.base == "complex" else build_real_model(self.sigma)
        return build_product_extension(base, c.k, c.l)

    @property
    def holomorphic(self) -> bool:
        return self.model.chart.kind == HOLOMORPHIC

    @cached_property
    def real(self) -> MetricModel:
        return realify(self.model) if self.holomorphic else self.model

    @cached_property
    def gamma(self):
        return levi_civita(self.model)

    @cached_property
    def riem(self):
        return riemann(self.model, self.gamma)

    @cached_property
    def gamma_real(self):
        return self.gamma if not self.holomorphic else levi_civita(self.real)

    @cached_property
    def riem_real(self):
        return self.riem if not self.holomorphic else riemann(self.real, self.gamma_real)

    @property
    def flat(self) -> bool:
        return self.riem.is_zero()

    @cached_property
    def hol(self):
        return holonomy_span(self.real, self.riem_real)

    @cached_property
    def transvection(self):
        return build_transvection_algebra(self.hol, self.riem_real)

    @property
    def family(self) -> str:
        return self.cfg.model if self.cfg.model != "product" else f"product-{self.cfg.base}"

    @property
    def n(self) -> int:
        return self.cfg.n

    def rng(self, salt: int) -> np.random.Generator:
        return np.random.default_rng([self.cfg.seed, salt])


# ---------------------------------------------------------------------------
# helpers


def _diff_witness(d) -> dict | None:
    if d is None:
        return None
    idx, got, want = d
    return {"component": list(idx), "engine": got, "expected": want}


def _compare(a, b) -> Outcome:
    w = _diff_witness(tables.tensor_difference(a, b))
    return (PASS, None) if w is None else (FAIL, w)


def _zero(t, label: str = "component") -> Outcome:
    nz = t.first_nonzero()
    return (PASS, None) if nz is None else (FAIL, {label: list(nz[0]), "value": str(nz[1])})


def _float_points(rng: np.random.Generator, dim: int, count: int) -> list[np.ndarray]:
    return [rng.uniform(-2.0, 2.0, size=dim) for _ in range(count)]


def _rational_point(rng: np.random.Generator, names) -> dict:
    return {v: GaussianRational(Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 4)))) for v in names}


# ---------------------------------------------------------------------------
# suites; each yields (name, anchor, thunk)

Check = tuple[str, str, Callable[[], Outcome]]


def metric_suite(ctx: Context) -> Iterator[Check]:
    fam = ctx.cfg.model
    yield "metric inverse verified", PLUMBING, lambda: (ctx.model.verify(), (PASS, None))[1]
    if fam == "complex":
        yield "metric component families", "metric coefficients of the quartic potential", \
            lambda: _compare(ctx.model.g, tables.complex_metric(ctx.sigma))

        def herm():
            for (a, b), p in sorted(ctx.model.g.components.items()):
                if p.conjugate() != ctx.model.g[(b, a)]:
                    return FAIL, {"component": [a, b]}
            return PASS, None

        yield "Hermitian symmetry", "Kähler metric from a real potential", herm
        yield "det h = 1", "constant determinant of the Kähler metric", \
            lambda: (PASS, None) if det_metric(ctx.model) == 1 else (FAIL, {"det": str(det_metric(ctx.model))})
        yield "realification is real", "realification convention", lambda: (ctx.real, (PASS, None))[1]
    elif fam == "real":
        yield "metric component families", "metric on R^{4n} from the squared one-form", \
            lambda: _compare(ctx.model.g, tables.real_metric(ctx.sigma))

        def det_const():
            d = det_metric(ctx.model)
            return (PASS, {"det": str(d)}) if d.is_constant() and d != 0 else (FAIL, {"det": str(d)})

        yield "det g constant", "metric on R^{4n} from the squared one-form", det_const
    elif fam == "hessian-comparison":
        yield "metric component families", "flat Hessian comparison metric", \
            lambda: _compare(ctx.model.g, tables.hessian_metric(ctx.sigma))

        def shared():
            g = build_real_model(ctx.sigma).g
            h = ctx.model.g
            n = ctx.n
            for j in range(n):
                for l in range(n):
                    for idx in ((j, l), (j + n, l + n)):
                        if h[idx] != g[idx] * 2:
                            return FAIL, {"component": list(idx), "hessian": str(h[idx]), "real": str(g[idx])}
            differs = any(h[(j, l + n)] != g[(j, l + n)] * 2 for j in range(n) for l in range(n))
            return (PASS, None) if differs or ctx.sigma.is_zero() else \
                (FAIL, {"reason": "mixed family coincides with the real model"})

        yield "shares h_jl = 2 g_jl with the real model", "flat Hessian comparison metric", shared
    elif fam == "frances":
        def g11():
            y2 = ctx.model.chart.coord(1)
            return (PASS, None) if ctx.model.g[(0, 0)] == y2 * y2 else (FAIL, {"g11": str(ctx.model.g[(0, 0)])})

        yield "g_11 = (y2)^2", "four-dimensional symmetric model", g11

    if fam != "hessian-comparison":
        def signature():
            m = ctx.real
            cfg = ctx.cfg
            if fam == "complex":
                want = (4 * ctx.n, 4 * ctx.n)
            elif fam == "real":
                want = (2 * ctx.n, 2 * ctx.n)
            elif fam == "frances":
                want = (2, 2)
            else:
                half = (4 if cfg.base == "complex" else 2) * ctx.n
                want = (half + cfg.l, half + cfg.k)
            res = signature_at(m, _float_points(ctx.rng(1), m.dim, 10), tol=1e-9)
            for r in res:
                if r.signature is not None and r.signature != want:
                    return FAIL, {"point": [round(x, 6) for x in r.point], "signature": list(r.signature),
                                  "expected": list(want)}
            seen = sorted({r.signature for r in res if r.signature is not None})
            if not seen:
                return INDETERMINATE, {"reason": "all samples near-degenerate"}
            return PASS, {"signature": list(want), "samples": len(res)}

        yield "neutral signature", "neutral signature", signature

    if fam in ("complex", "real", "product", "hessian-comparison") and ctx.n > 0:
        def takagi():
            A = ctx.sigma.to_numpy()
            if ctx.sigma.is_zero():
                return NOT_APPLICABLE, {"reason": "sigma = 0"}
            r = takagi_diagonalize(A)
            if r.residual > 1e-10:
                return FAIL, {"residual": r.residual}
            rng = ctx.rng(2)
            err = 0.0
            for _ in range(20):
                z = rng.normal(size=4 * ctx.n) + 1j * rng.normal(size=4 * ctx.n)
                err = max(err, abs(potential_numeric(A, phi_q(r.Q, z)) - potential_numeric(np.diag(r.diag), z)))
            if err > 1e-9 or not check_phiQ_in_O(r.Q):
                return FAIL, {"potential_pullback_error": err}
            return PASS, {"residual_below": 1e-10, "pullback_below": 1e-9}

        yield "diagonalization of sigma", "reduction to diagonal sigma", takagi


def curvature_suite(ctx: Context) -> Iterator[Check]:
    fam = ctx.cfg.model
    if fam == "complex":
        yield "Christoffel table", "Christoffel symbols of the Kähler model", \
            lambda: _compare(ctx.gamma, tables.complex_christoffel(ctx.sigma))
    elif fam == "real":
        yield "Christoffel table", "Christoffel symbols of the real model", \
            lambda: _compare(ctx.gamma, tables.real_christoffel(ctx.sigma))

    yield "Ric=0", "Ricci-flatness", lambda: _zero(ricci(ctx.model, ctx.riem))
    if ctx.holomorphic:
        def logdet():
            r = ricci_logdet(ctx.model)
            return (FAIL, {"reason": "determinant is not constant"}) if r is None else _zero(r)

        yield "Ric=0 (log det)", "Ricci-flatness via constant determinant", logdet

    if fam == "complex":
        yield "curvature table (mixed)", "curvature of the Kähler model", \
            lambda: _compare(ctx.riem, tables.complex_mixed_curvature(ctx.sigma))
        yield "curvature table (barred)", "curvature of the Kähler model", \
            lambda: _compare(tables.barred_from_mixed(ctx.riem), tables.complex_barred_curvature(ctx.sigma))
    elif fam == "real":
        yield "curvature table", "curvature of the real model", \
            lambda: _compare(ctx.riem, tables.real_curvature(ctx.sigma))
    elif fam == "frances":
        yield "curvature table", "curvature of the four-dimensional model", \
            lambda: _compare(ctx.riem, tables.frances_curvature())

        def cross():
            other = riemann(build_real_model(SigmaMatrix.identity(1)))
            origin_a = {v: 0 for v in ctx.model.chart.variables}
            origin_b = {v: 0 for v in other.chart.variables}
            a, b = ctx.riem.evaluate(origin_a), other.evaluate(origin_b)
            for idx in sorted(set(a) | set(b)):
                if a.get(idx, 0) != b.get(idx, 0):
                    return FAIL, {"component": list(idx), "four_dim": str(a.get(idx, 0)), "real_n1": str(b.get(idx, 0))}
            return PASS, None

        yield "matches real n=1 curvature at origin", "same curvature tensor as the real n=1 model", cross

    def bianchi():
        R = ctx.riem_real
        for (l, k, i, j) in sorted(R.components):
            s = R[(l, k, i, j)] + R[(l, i, j, k)] + R[(l, j, k, i)]
            if s.terms:
                return FAIL, {"component": [l, k, i, j], "sum": str(s)}
        return PASS, None

    yield "first Bianchi identity", PLUMBING, bianchi

    if ctx.flat:
        yield "flat", "flat model", lambda: (PASS, {"curvature": "flat"})
    else:
        def weyl_nonzero():
            if ctx.real.dim < 4:
                return NOT_APPLICABLE, {"reason": "dimension below 4"}
            nz = weyl(ctx.real, ctx.riem_real).first_nonzero()
            if nz is None:
                return FAIL, {"reason": "Weyl tensor vanishes"}
            return PASS, {"component": list(nz[0]), "value": str(nz[1])}

        yield "W≠0", "not conformally flat", weyl_nonzero

        def weyl_equals():
            if ctx.real.dim < 4:
                return NOT_APPLICABLE, {"reason": "dimension below 4"}
            if not ricci(ctx.real, ctx.riem_real).is_zero():
                return NOT_APPLICABLE, {"reason": "not Ricci-flat"}
            return _compare(weyl(ctx.real, ctx.riem_real), lower_riemann(ctx.real, ctx.riem_real))

        yield "W = lowered Riemann", "Weyl tensor of a Ricci-flat metric", weyl_equals

    def fd():
        m = ctx.real
        exact = CompiledTensor(ctx.riem_real)
        metric = metric_function(m)
        rng = ctx.rng(3)
        worst = 0.0
        for x in _float_points(rng, m.dim, 3):
            x = 0.5 * x
            worst = max(worst, float(np.max(np.abs(fd_riemann(metric, x, 1e-3) - exact(x)))))
        scale = 1.0 + max(float(np.max(np.abs(exact(0.5 * p)))) for p in _float_points(ctx.rng(3), m.dim, 3))
        rel = worst / scale
        return (PASS, {"max_error": f"{rel:.1e}"}) if rel < 1e-6 else (FAIL, {"max_error": f"{rel:.3e}"})

    yield "exact curvature matches finite differences", PLUMBING, fd

    if fam == "complex":
        def realified_tables():
            # realified curvature agrees with the holomorphic frame at rational points
            R = ctx.riem_real
            K = ctx.riem
            N = ctx.model.dim
            rng = ctx.rng(4)
            i = GaussianRational(0, 1)
            for _ in range(5):
                pt = _rational_point(rng, ctx.real.chart.variables)
                Rv = R.evaluate(pt)
                for (d, c, a, b), p in sorted(K.components.items()):
                    zpt = {z: pt[f"x{k + 1}"] + pt[f"y{k + 1}"] * i for k, z in enumerate(ctx.model.chart.coords)}
                    zpt.update({w: pt[f"x{k + 1}"] - pt[f"y{k + 1}"] * i
                                for k, w in enumerate(ctx.model.chart.conj_coords)})
                    want = p.evaluate(zpt)
                    # ∂_b = ½(∂_x - i∂_y), ∂_ā = ½(∂_x + i∂_y); R is real-bilinear
                    half = GaussianRational(Fraction(1, 2))
                    xb = [(b, half), (b + N, -half * i)]
                    xa = [(a, half), (a + N, half * i)]
                    xc = [(c, half), (c + N, -half * i)]
                    comp_x = comp_y = GaussianRational(0)
                    for ia, ca in xa:
                        for ib, cb in xb:
                            for ic, cc in xc:
                                w = ca * cb * cc
                                comp_x = comp_x + w * Rv.get((d, ic, ia, ib), 0)
                                comp_y = comp_y + w * Rv.get((d + N, ic, ia, ib), 0)
                    got = comp_x + comp_y * i
                    if got != want:
                        return FAIL, {"component": [d, c, a, b], "realified": str(got), "holomorphic": str(want)}
            return PASS, {"points": 5}

        yield "realified curvature matches holomorphic frame", "curvature of the Kähler model", realified_tables


def symmetry_suite(ctx: Context) -> Iterator[Check]:
    yield "∇R=0", "locally symmetric: parallel curvature", \
        lambda: _zero(covariant_derivative(ctx.real, ctx.riem_real, ctx.gamma_real))

    def null_parallel():
        try:
            base, null = parallel_null_split(ctx.model, ctx.gamma)
        except NoClosedFormError as exc:
            return NOT_APPLICABLE, {"reason": str(exc)}
        for (c, a, b), p in sorted(ctx.gamma.components.items()):
            if a in null or b in null:
                return FAIL, {"component": [c, a, b]}
        return PASS, {"parallel_null_dim": len(null)}

    yield "null coordinate fields parallel", "parallel null distribution", null_parallel

    def complete():
        w = completeness_witness(ctx.model, seed=ctx.cfg.seed, samples=5)
        status = {"polynomial, complete": PASS, "fail": FAIL}.get(w.status, NOT_APPLICABLE)
        return status, {"status": w.status, "detail": w.detail, "max_degree": w.max_degree}

    yield "geodesically complete", "geodesic completeness", complete


def _hol_expected(ctx: Context) -> int | None:
    fam = ctx.cfg.model
    base = ctx.cfg.base if fam == "product" else fam
    if base == "complex":
        return 4 * ctx.n ** 2
    if base == "real":
        return ctx.n * (2 * ctx.n - 1)
    if base == "frances":
        return 1
    return None


def _hol_applicable(ctx: Context) -> str | None:
    if ctx.flat:
        return "flat model"
    if ctx.cfg.model != "frances" and not ctx.sigma.nondegenerate:
        return "sigma is degenerate"
    return None


def holonomy_suite(ctx: Context) -> Iterator[Check]:
    expected = _hol_expected(ctx)
    name = f"hol dim={expected}" if expected is not None else "hol dim"

    def na_or(f):
        def run():
            reason = _hol_applicable(ctx)
            return (NOT_APPLICABLE, {"reason": reason}) if reason else f()
        return run

    def dim():
        if expected is None:
            return NOT_APPLICABLE, {"dim": ctx.hol.dim}
        return (PASS, {"dim": ctx.hol.dim}) if ctx.hol.dim == expected else \
            (FAIL, {"dim": ctx.hol.dim, "expected": expected})

    yield name, "dimension of the holonomy algebra", na_or(dim)

    def iso():
        bad = ctx.hol.isometry_defects()
        return (PASS, None) if not bad else (FAIL, {"basis": list(bad)[:5]})

    yield "hol preserves the metric", PLUMBING, na_or(iso)

    def blocks():
        r = hol_block_structure(ctx.hol)
        d = {k: v for k, v in r.details.items() if not isinstance(v, (list, tuple)) or len(v) < 20}
        if r.status != PASS:
            return FAIL, d
        if ctx.cfg.model in ("complex", "real") and not r.details.get("fills_block_space"):
            return FAIL, d
        return PASS, d

    yield "hol abelian unipotent block structure", "holonomy block form", na_or(blocks)

    def indec(part):
        def run():
            if ctx.cfg.model == "product":
                return NOT_APPLICABLE, {"reason": "product with a flat factor is decomposable"}
            r = indecomposability_evidence(ctx.hol, seed=ctx.cfg.seed)
            if r.status == NOT_APPLICABLE and ctx.cfg.model == "frances":
                r = indecomposability_evidence(holonomy_span(build_real_model(SigmaMatrix.identity(1))),
                                               seed=ctx.cfg.seed)
            if part == "kernel":
                if r.status == NOT_APPLICABLE:
                    return NOT_APPLICABLE, r.details
                ok = r.details.get("kernel_equals_u_prime")
                return (PASS if ok else FAIL), {"kernel_dim": r.details.get("kernel_dim"),
                                                "u_prime_dim": r.details.get("u_prime_dim")}
            return r.status, r.details
        return na_or(run)

    yield "kernel = U'", "joint kernel of the holonomy", indec("kernel")
    yield "indecomposability evidence", "indecomposable holonomy", indec("evidence")


def transvection_suite(ctx: Context) -> Iterator[Check]:
    def cert():
        return nilpotency_certificate(ctx.transvection)

    cache: dict = {}

    def guarded(f):
        def run():
            if ctx.flat or ctx.cfg.model == "hessian-comparison":
                return NOT_APPLICABLE, {"reason": "flat model"}
            if ctx.cfg.model != "frances" and not ctx.sigma.nondegenerate:
                return NOT_APPLICABLE, {"reason": "sigma is degenerate"}
            if ctx.cfg.model == "product":
                return NOT_APPLICABLE, {"reason": "flat factor adds a central abelian summand"}
            if "c" not in cache:
                cache["c"] = cert()
            return f(cache["c"])
        return run

    yield "Jacobi identity", PLUMBING, guarded(
        lambda c: (PASS, None) if c.jacobi_defects == 0 else (FAIL, {"defects": c.jacobi_defects}))

    def series(c):
        r = ctx.hol.dim
        u = len(ctx.hol.model.meta.get("null", [])) or None
        w = {"series_dims": c.series_dims, "hol_dim": r, "u_prime_dim": u}
        ok = c.derived_matches and c.second_matches and c.series_dims[-1] == 0
        return (PASS, w) if ok else (FAIL, w)

    yield "lower central series (hol+U', U', 0)", "transvection algebra", guarded(series)
    yield "3-step nilpotent", "transvection algebra is 3-step nilpotent", guarded(
        lambda c: (PASS, {"steps": c.steps}) if c.three_step else (FAIL, {"steps": c.steps, "series": c.series_dims}))
    yield "center = U'", "transvection algebra", guarded(
        lambda c: (PASS, {"center_dim": c.center_dim}) if c.center_equals_u_prime and c.u_prime_central
        else (FAIL, {"center_dim": c.center_dim}))
    yield "[g, g] abelian", "transvection algebra", guarded(
        lambda c: (PASS, None) if c.derived_abelian else (FAIL, {"reason": "derived algebra is not abelian"}))


def _initial_data(ctx: Context, rng: np.random.Generator, m: MetricModel):
    p, q = random_rational(rng, m.dim), random_rational(rng, m.dim)
    return p, q


def geodesics_suite(ctx: Context) -> Iterator[Check]:
    samples = 10
    store: dict = {}

    def solved():
        if "gds" not in store:
            m = ctx.real
            rng = ctx.rng(5)
            data = [_initial_data(ctx, rng, m) for _ in range(samples)]
            store["data"] = data
            store["gds"] = [solve_geodesic(m, p, q, ctx.gamma_real) for p, q in data]
        return store["gds"]

    def closed(f):
        def run():
            try:
                return f(solved())
            except NoClosedFormError as exc:
                return NOT_APPLICABLE, {"reason": str(exc)}
        return run

    def residual(gds):
        for k, gd in enumerate(gds):
            res = geodesic_residual(ctx.real, gd, ctx.gamma_real)
            bad = next((c for c, r in enumerate(res) if r.terms), None)
            if bad is not None:
                return FAIL, {"sample": k, "component": bad, "residual": str(res[bad])}
        return PASS, {"samples": len(gds)}

    yield "closed-form geodesic residual = 0", "polynomial geodesics", closed(residual)

    def degrees(gds):
        for k, gd in enumerate(gds):
            if not gd.degree_profile_ok():
                return FAIL, {"sample": k, "degrees": gd.degrees()}
        return PASS, {"max_degree": max(max(gd.degrees()) for gd in gds)}

    yield "degree profile (≤1 base, ≤3 null)", "polynomial geodesics", closed(degrees)

    def conserved(gds):
        for k, gd in enumerate(gds):
            e = energy(ctx.real, gd)
            if not e.is_constant():
                return FAIL, {"sample": k, "energy": str(e)}
        return PASS, None

    yield "energy conserved", PLUMBING, closed(conserved)

    def rk4(gds):
        integ = GeodesicIntegrator(ctx.real, ctx.gamma_real)
        p = np.array([[float(x) for x in d[0]] for d in store["data"]])
        q = np.array([[float(x) for x in d[1]] for d in store["data"]])
        traj = integ.run(p, q, 10.0, 1e-3, [1.0, 5.0, 10.0])
        worst = 0.0
        for ti, t in enumerate(traj.times):
            for k, gd in enumerate(gds):
                worst = max(worst, relative_error(traj.positions[ti][k], gd.at(float(t))))
        w = {"max_relative_error": f"{worst:.1e}", "times": [1, 5, 10], "step": 1e-3}
        return (PASS, w) if worst < 1e-8 else (FAIL, w)

    yield "RK4 matches closed form", "polynomial geodesics", closed(rk4)

    if ctx.holomorphic:
        def conj():
            rng = ctx.rng(6)
            for _ in range(3):
                p, q = random_rational(rng, ctx.real.dim), random_rational(rng, ctx.real.dim)
                if not conjugation_check(ctx.model, ctx.real, p, q):
                    return FAIL, {"p": [str(x) for x in p], "q": [str(x) for x in q]}
            return PASS, {"samples": 3}

        yield "holomorphic and realified geodesics agree", "polynomial geodesics", closed(lambda _: conj())

    def order():
        m = build_test_metric_2d()
        p, q = [1.0, 0.8], [0.2, 0.5]
        ref = reference_solution(m, p, q, 1.0)
        study = convergence_study(m, p, q, 1.0, [0.1, 0.025, 0.00625], ref)
        w = {"orders": [round(o, 2) for o in study.orders], "errors": [f"{e:.2e}" for e in study.errors]}
        return (PASS, w) if all(3.7 < o < 4.3 for o in study.orders) else (FAIL, w)

    yield "RK4 order 4", PLUMBING, order


HOMOTHETIES = (
    ("φ_{a,b} factor (st)²", "phi_ab"),
    ("φ_s factor s⁴", "phi_s"),
    ("ψ_t isometry", "psi_t"),
    ("φ_{0,t} factor t²", "phi_0t"),
)


def conformal_suite(ctx: Context) -> Iterator[Check]:
    def applicable() -> str | None:
        if ctx.cfg.model == "hessian-comparison":
            return "no block layout"
        return None

    def factor(family, model_fn):
        def run():
            reason = applicable()
            if reason:
                return NOT_APPLICABLE, {"reason": reason}
            h = HomothetySpec(family)
            r = pullback_factor(model_fn(), h)
            if not r.ok:
                return FAIL, r.witness
            if r.factor != r.claimed:
                return FAIL, {"factor": str(r.factor), "claimed": str(r.claimed)}
            return PASS, {"factor": str(r.factor)}
        return run

    for name, family in HOMOTHETIES:
        yield name, "homotheties of the model", factor(family, lambda: ctx.model)

    if ctx.cfg.model in ("complex", "real"):
        ext = {}

        def product():
            if "m" not in ext:
                ext["m"] = build_product_extension(ctx.model, 1, 1)
            return ext["m"]

        for name, family in HOMOTHETIES:
            yield f"{name} on product (1,1)", "homotheties of product extensions", factor(family, product)

    def essential():
        reason = applicable()
        if reason:
            return NOT_APPLICABLE, {"reason": reason}
        c = essentiality_certificate(HomothetySpec("phi_0t", (1.0,)), ctx.model)
        w = {"factor": c.factor, "fixed_dim": c.fixed_dim, "commutes_with_phi_ab": c.commutes_with_deck}
        return (PASS, w) if c.certified and c.commutes_with_deck and c.descends else (FAIL, w)

    yield "φ_{0,t} essential", "essential homothety", essential

    def not_certified(family, params):
        def run():
            reason = applicable()
            if reason:
                return NOT_APPLICABLE, {"reason": reason}
            c = essentiality_certificate(HomothetySpec(family, params), ctx.model)
            w = {"note": c.note, "fixed_dim": c.fixed_dim}
            return (PASS, w) if not c.certified else (FAIL, w)
        return run

    yield "ψ_t not certified", "isometries are not essential", not_certified("psi_t", (1.0,))
    yield "φ_{a,b} not certified", "no fixed points off the origin", not_certified("phi_ab", (1.0, 0.5))

    def commute():
        reason = applicable()
        if reason:
            return NOT_APPLICABLE, {"reason": reason}
        ok = all(maps_commute(HomothetySpec(f), HomothetySpec("phi_ab"), ctx.model) for _, f in HOMOTHETIES)
        return (PASS, None) if ok else (FAIL, {"reason": "a family does not commute with φ_{a,b}"})

    yield "homotheties commute with φ_{a,b}", "homotheties descend to the quotient", commute


def fundamental_domain(ctx: Context) -> FundamentalDomain:
    a, b = ctx.cfg.a, ctx.cfg.b
    fam = ctx.cfg.model
    if fam == "frances":
        return FundamentalDomain(a, b, (0, 1, 2, 3))
    if fam == "product":
        raise PKVError("the fundamental domain is defined for the unextended models")
    n = ctx.n
    blocks = tuple(k // n for k in range(4 * n))
    if fam == "complex":
        blocks = blocks + blocks
    return FundamentalDomain(a, b, blocks)


def _random_points(rng: np.random.Generator, dim: int, count: int) -> list[np.ndarray]:
    pts = []
    for _ in range(count):
        v = rng.normal(size=dim)
        pts.append(v / np.linalg.norm(v) * math.exp(rng.uniform(-4.0, 4.0)))
    return pts


def quotient_suite(ctx: Context) -> Iterator[Check]:
    def guard(f):
        def run():
            if ctx.cfg.model == "product":
                return NOT_APPLICABLE, {"reason": "the deck group is defined on the unextended models"}
            return f(fundamental_domain(ctx))
        return run

    def reps(d: FundamentalDomain):
        worst = 0.0
        for idx, x in enumerate(_random_points(ctx.rng(7), d.dim, 100)):
            k, y = canonical_representative(d, x)
            if domain_membership(d, y) not in (INTERIOR, SPHERE):
                return FAIL, {"point": idx, "membership": domain_membership(d, y)}
            for kk in (k - 1, k + 1):
                if domain_membership(d, d.apply(x, kk)) in (INTERIOR, SPHERE):
                    return FAIL, {"point": idx, "reason": "representative is not unique", "k": [k, kk]}
            for j in range(-3, 4):
                k2, y2 = canonical_representative(d, d.apply(x, j))
                worst = max(worst, float(np.max(np.abs(y2 - y)) / np.max(np.abs(y))))
                if k2 != k - j:
                    return FAIL, {"point": idx, "j": j, "k": [k, k2]}
        w = {"points": 100, "max_orbit_deviation": f"{worst:.1e}"}
        return (PASS, w) if worst <= 1e-10 else (FAIL, w)

    yield "canonical representatives unique and orbit-invariant", "fundamental domain of the deck group", guard(reps)

    def continuity(d: FundamentalDomain):
        eps = 1e-6
        worst = 0.0
        for v in _random_points(ctx.rng(8), d.dim, 100):
            y = v / np.linalg.norm(v)
            charts = [quotient_chart(d, y * (1 + s * eps)) for s in (-1, 1)]
            charts += [quotient_chart(d, d.apply(y, 1) * (1 + s * eps)) for s in (-1, 1)]
            t0, p0 = charts[0]
            for t, p in charts[1:]:
                worst = max(worst, angle_distance(t, t0), float(np.max(np.abs(p - p0))))
        w = {"probes": 100, "epsilon": eps, "max_jump": f"{worst:.1e}"}
        return (PASS, w) if worst <= 1e-5 else (FAIL, w)

    yield "boundary identification continuous", "quotient is a compact manifold", guard(continuity)


def complex_structure_suite(ctx: Context) -> Iterator[Check]:
    store: dict = {}

    def result():
        if "r" not in store:
            store["r"] = complex_structure_check(ctx.model, ctx.riem if not ctx.holomorphic else None)
        return store["r"]

    def part(key, want=True):
        def run():
            r = result()
            if r.status == NOT_APPLICABLE:
                return NOT_APPLICABLE, r.details
            ok = r.details.get(key) == want
            w = r.details.get("phi_ab_commutator_witness") if key == "phi_ab_commutes_with_J" else None
            return (PASS, w) if ok else (FAIL, {key: r.details.get(key)})
        return run

    anchor = "complex structure on the four-dimensional model"
    yield "J² = -I", anchor, part("J_squared_minus_identity")
    yield "ĝ₀ Hermitian for J", anchor, part("hermitian_wrt_g0")
    yield "hol commutes with J", anchor, part("hol_invariant")
    yield "φ_{a,b} does not commute with J", anchor, part("phi_ab_commutes_with_J", False)


SUITE_FUNCS = {
    "metric": metric_suite,
    "curvature": curvature_suite,
    "symmetry": symmetry_suite,
    "holonomy": holonomy_suite,
    "transvection": transvection_suite,
    "geodesics": geodesics_suite,
    "conformal": conformal_suite,
    "quotient": quotient_suite,
    "complex-structure": complex_structure_suite,
}


def _run_check(suite: str, name: str, anchor: str, thunk: Callable[[], Outcome]) -> CheckReport:
    start = time.perf_counter()
    try:
        status, witness = thunk()
    except Exception as exc:  # noqa: BLE001 - every failure becomes a report
        status, witness = FAIL, {"error": f"{type(exc).__name__}: {exc}"}
    if status == FAIL and witness in (None, "", [], {}):
        witness = {"reason": "check failed"}
    ms = (time.perf_counter() - start) * 1000.0
    return CheckReport(name, status, anchor, witness, ms, suite)


def run_suites(cfg: RunConfig) -> list[CheckReport]:
    ctx = Context(cfg)
    reports: list[CheckReport] = []
    for suite in SUITES:
        if suite not in cfg.suites:
            continue
        skip = None
        if suite not in NUMERIC_SUITES:
            if cfg.n > EXACT_LIMIT:
                skip = f"exact suites are limited to n ≤ {EXACT_LIMIT}"
            elif not cfg.sigma.exact and cfg.model != "frances":
                skip = "exact suites need Gaussian-rational sigma"
        if skip is not None:
            reports.append(CheckReport(f"{suite} suite", SKIPPED, PLUMBING, {"reason": skip}, 0.0, suite))
            continue
        try:
            checks = list(SUITE_FUNCS[suite](ctx))
        except Exception as exc:  # noqa: BLE001
            reports.append(CheckReport(f"{suite} suite", FAIL, PLUMBING,
                                       {"error": f"{type(exc).__name__}: {exc}"}, 0.0, suite))
            continue
        for name, anchor, thunk in checks:
            reports.append(_run_check(suite, name, anchor, thunk))
    return reports
