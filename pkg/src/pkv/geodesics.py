"""Closed-form geodesics for metrics with a parallel null block, exact ODE
residuals, a fixed-step RK4 integrator and trajectory export.

The closed form applies when coordinates split into base and null parts
with Γ^{base} = 0, Γ^C_{AB} = 0 unless A and B are base indices, and all
Christoffels depending on base coordinates only. Base coordinates then move
linearly and each null coordinate is a double integral of a polynomial.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, TextIO

import mpmath
import numpy as np

from .errors import NoClosedFormError, PKVError
from .exact import GaussianRational, MultiPoly
from .numeric import CompiledTensor
from .tensor import HOLOMORPHIC, MetricModel, TensorField, levi_civita

T_UNIVERSE = ("t",)


def _g(x) -> GaussianRational:
    return GaussianRational.coerce(x)


def _integrate(p: MultiPoly) -> MultiPoly:
    """Antiderivative in t vanishing at 0."""
    return MultiPoly(T_UNIVERSE, {(e[0] + 1,): c * GaussianRational(Fraction(1, e[0] + 1)) for e, c in p.terms.items()})


def _diff(p: MultiPoly) -> MultiPoly:
    return p.partial("t")


def _linear(q, p) -> MultiPoly:
    return MultiPoly(T_UNIVERSE, {(0,): _g(q), (1,): _g(p)})


@dataclass
class GeodesicData:
    model: MetricModel
    p: tuple
    q: tuple
    components: list[MultiPoly]
    base: list[int]
    null: list[int]

    def degrees(self) -> list[int]:
        return [max(c.degree(), 0) for c in self.components]

    def degree_profile_ok(self) -> bool:
        deg = self.degrees()
        return all(deg[k] <= 1 for k in self.base) and all(deg[k] <= 3 for k in self.null)

    def velocities(self) -> list[MultiPoly]:
        return [_diff(c) for c in self.components]

    def at(self, t: float) -> np.ndarray:
        vals = [complex(c.evaluate({"t": t})) for c in self.components]
        arr = np.array(vals)
        return arr.real if np.all(arr.imag == 0) else arr


def parallel_null_split(m: MetricModel, gamma: TensorField | None = None) -> tuple[list[int], list[int]]:
    """Base/null split required by the closed form, or NoClosedFormError."""
    gamma = gamma if gamma is not None else levi_civita(m)
    n = m.dim
    null = sorted({c for (c, _, _) in gamma.components})
    base = [k for k in range(n) if k not in null]
    allowed = {m.chart.coords[k] for k in base}
    if m.chart.kind == HOLOMORPHIC:
        allowed |= {m.chart.conj_coords[k] for k in base}
    for (c, a, b), p in gamma.components.items():
        if a in null or b in null:
            raise NoClosedFormError("no closed form; use numeric (Christoffels couple null directions)")
        if not set(p.used_variables()) <= allowed:
            raise NoClosedFormError("no closed form; use numeric (Christoffels depend on null coordinates)")
    return base, null


def _substitution(m: MetricModel, curves: dict[int, MultiPoly]) -> dict[str, MultiPoly]:
    subst = {m.chart.coords[k]: c for k, c in curves.items()}
    if m.chart.kind == HOLOMORPHIC:
        # barred coordinates follow by complex conjugation
        subst.update({m.chart.conj_coords[k]: c.conjugate_coefficients() for k, c in curves.items()})
    return subst


def solve_geodesic(m: MetricModel, p: Sequence, q: Sequence, gamma: TensorField | None = None) -> GeodesicData:
    """Polynomial geodesic with γ(0) = q and γ̇(0) = p (exact rational input)."""
    n = m.dim
    if len(p) != n or len(q) != n:
        raise PKVError(f"initial data must have {n} components")
    gamma = gamma if gamma is not None else levi_civita(m)
    base, null = parallel_null_split(m, gamma)
    p = tuple(_g(x) for x in p)
    q = tuple(_g(x) for x in q)
    curves = {k: _linear(q[k], p[k]) for k in base}
    subst = _substitution(m, curves)
    acc = {c: MultiPoly.zero(T_UNIVERSE) for c in null}
    for (c, a, b), poly in gamma.components.items():
        w = p[a] * p[b]
        if w:
            acc[c] = acc[c] - poly.substitute(subst, T_UNIVERSE) * w
    comps = []
    for k in range(n):
        if k in curves:
            comps.append(curves[k])
        else:
            comps.append(_linear(q[k], p[k]) + _integrate(_integrate(acc[k])))
    return GeodesicData(m, p, q, comps, base, null)


def geodesic_residual(m: MetricModel, gd: GeodesicData, gamma: TensorField | None = None) -> list[MultiPoly]:
    """γ̈^C + Γ^C_{AB}(γ) γ̇^A γ̇^B for every C, as polynomials in t."""
    gamma = gamma if gamma is not None else levi_civita(m)
    curves = dict(enumerate(gd.components))
    subst = _substitution(m, curves)
    vel = gd.velocities()
    res = [_diff(v) for v in vel]
    for (c, a, b), poly in gamma.components.items():
        if vel[a].terms and vel[b].terms:
            res[c] = res[c] + poly.substitute(subst, T_UNIVERSE) * vel[a] * vel[b]
    return res


def energy(m: MetricModel, gd: GeodesicData) -> MultiPoly:
    """g(γ̇, γ̇) along the curve (h(γ̇, conj γ̇) on holomorphic charts)."""
    subst = _substitution(m, dict(enumerate(gd.components)))
    vel = gd.velocities()
    other = [v.conjugate_coefficients() for v in vel] if m.chart.kind == HOLOMORPHIC else vel
    total = MultiPoly.zero(T_UNIVERSE)
    for (a, b), poly in m.g.components.items():
        if vel[a].terms and other[b].terms:
            total = total + poly.substitute(subst, T_UNIVERSE) * vel[a] * other[b]
    return total


def conjugation_check(hol: MetricModel, real: MetricModel, p: Sequence, q: Sequence) -> bool:
    """Holomorphic closed form z(t) agrees with x(t) + i y(t) from the realified solve."""
    N = hol.dim
    if real.dim != 2 * N:
        raise PKVError("realified model has the wrong dimension")
    pz = [_g(p[k]) + _g(p[k + N]) * GaussianRational(0, 1) for k in range(N)]
    qz = [_g(q[k]) + _g(q[k + N]) * GaussianRational(0, 1) for k in range(N)]
    zc = solve_geodesic(hol, pz, qz).components
    xc = solve_geodesic(real, p, q).components
    i = GaussianRational(0, 1)
    return all(zc[k] == xc[k] + xc[k + N] * i for k in range(N))


# ---------------------------------------------------------------------------
# numerics


@dataclass
class Trajectory:
    times: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray


class GeodesicIntegrator:
    """Classical RK4 for x'' = -Γ(x)(x', x') using compiled Christoffels."""

    def __init__(self, m: MetricModel, gamma: TensorField | None = None):
        if m.chart.kind == HOLOMORPHIC:
            raise PKVError("integrate holomorphic models in realified coordinates")
        self.model = m
        self.dim = m.dim
        self.gamma = CompiledTensor(gamma if gamma is not None else levi_civita(m))
        self.metric = CompiledTensor(m.g)

    def accel(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        return -np.einsum("...kij,...i,...j->...k", self.gamma(x), v, v)

    def run(self, p, q, t_end: float, step: float, sample_times: Sequence[float] | None = None) -> Trajectory:
        if step <= 0:
            raise ValueError("step must be positive")
        x = np.array(q, dtype=float)
        v = np.array(p, dtype=float)
        nsteps = int(round(t_end / step))
        h = t_end / nsteps if nsteps else 0.0
        wanted = sorted(set(sample_times)) if sample_times is not None else None
        marks = {int(round(s / h)): s for s in wanted} if wanted is not None and h else {0: 0.0}
        times, xs, vs = [], [], []

        def record(k):
            if wanted is None or k in marks:
                times.append(k * h if wanted is None else marks[k])
                xs.append(x.copy())
                vs.append(v.copy())

        record(0)
        for k in range(1, nsteps + 1):
            a1 = self.accel(x, v)
            x2, v2 = x + 0.5 * h * v, v + 0.5 * h * a1
            a2 = self.accel(x2, v2)
            x3, v3 = x + 0.5 * h * v2, v + 0.5 * h * a2
            a3 = self.accel(x3, v3)
            x4, v4 = x + h * v3, v + h * a3
            a4 = self.accel(x4, v4)
            x = x + h / 6 * (v + 2 * v2 + 2 * v3 + v4)
            v = v + h / 6 * (a1 + 2 * a2 + 2 * a3 + a4)
            if not (np.all(np.isfinite(x)) and np.all(np.isfinite(v))):
                raise FloatingPointError(f"non-finite state at t={k * h:.6g}")
            record(k)
        return Trajectory(np.array(times), np.array(xs), np.array(vs))

    def energy(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        return np.einsum("...ij,...i,...j->...", self.metric(x), v, v)


def rk4_geodesic(m: MetricModel, p, q, t_end: float, step: float,
                 sample_times: Sequence[float] | None = None) -> Trajectory:
    return GeodesicIntegrator(m).run(p, q, t_end, step, sample_times)


def reference_solution(m: MetricModel, p, q, t_end: float, dps: int = 30) -> np.ndarray:
    """High-precision Taylor-series solution (mpmath) at t_end."""
    gamma = levi_civita(m)
    terms = [(idx, [(e, mpmath.mpf(float(c.re.numerator)) / int(c.re.denominator)) for e, c in poly.terms.items()])
             for idx, poly in gamma.components.items()]
    d = m.dim
    with mpmath.workdps(dps):
        def rhs(t, y):
            x, v = y[:d], y[d:]
            acc = [mpmath.mpf(0)] * d
            for (k, i, j), poly in terms:
                val = mpmath.mpf(0)
                for e, c in poly:
                    mono = c
                    for xi, ei in zip(x, e):
                        if ei:
                            mono *= xi ** ei
                    val += mono
                acc[k] -= val * v[i] * v[j]
            return list(v) + acc

        f = mpmath.odefun(rhs, 0, [mpmath.mpf(float(z)) for z in q] + [mpmath.mpf(float(z)) for z in p])
        return np.array([float(z) for z in f(t_end)[:d]])


@dataclass
class ConvergenceStudy:
    steps: list[float]
    errors: list[float]
    orders: list[float]
    constant: float


def convergence_study(m: MetricModel, p, q, t_end: float, steps: Sequence[float], reference: np.ndarray) -> ConvergenceStudy:
    """Errors at t_end against a reference and the observed orders between step sizes."""
    integ = GeodesicIntegrator(m)
    errors = []
    for h in steps:
        traj = integ.run(p, q, t_end, h, [t_end])
        errors.append(float(np.max(np.abs(traj.positions[-1] - reference)) / max(np.max(np.abs(reference)), 1e-300)))
    orders = [float(np.log(errors[k] / errors[k + 1]) / np.log(steps[k] / steps[k + 1]))
              for k in range(len(steps) - 1)]
    constant = max(e / h ** 4 for e, h in zip(errors, steps))
    return ConvergenceStudy(list(steps), errors, orders, constant)


@dataclass
class CompletenessWitness:
    status: str
    detail: str
    samples: int = 0
    max_degree: int = -1


def random_rational(rng: np.random.Generator, dim: int) -> list[GaussianRational]:
    return [GaussianRational(Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 4)))) for _ in range(dim)]


def completeness_witness(m: MetricModel, seed: int = 0, samples: int = 10) -> CompletenessWitness:
    """Every geodesic is a polynomial curve, hence defined for all t."""
    try:
        gamma = levi_civita(m)
        parallel_null_split(m, gamma)
    except NoClosedFormError as exc:
        return CompletenessWitness("not witnessed", str(exc))
    rng = np.random.default_rng(seed)
    top = -1
    for _ in range(samples):
        p, q = random_rational(rng, m.dim), random_rational(rng, m.dim)
        if m.chart.kind == HOLOMORPHIC:
            p = [a + b * GaussianRational(0, 1) for a, b in zip(p, random_rational(rng, m.dim))]
            q = [a + b * GaussianRational(0, 1) for a, b in zip(q, random_rational(rng, m.dim))]
        gd = solve_geodesic(m, p, q, gamma)
        if not gd.degree_profile_ok() or any(r.terms for r in geodesic_residual(m, gd, gamma)):
            return CompletenessWitness("fail", "closed form failed its residual check", samples)
        top = max(top, max(gd.degrees()))
    return CompletenessWitness("polynomial, complete", "closed-form geodesics have zero residual", samples, top)


def write_csv(out: TextIO | str, times: Sequence[float], positions: np.ndarray) -> None:
    """Rows t,x1,...,xd."""
    positions = np.asarray(positions)
    d = positions.shape[1]
    own = isinstance(out, str)
    fh = open(out, "w", newline="") if own else out
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t"] + [f"x{k}" for k in range(1, d + 1)])
        for t, row in zip(times, positions):
            w.writerow([repr(float(t))] + [repr(float(x)) for x in row])
    finally:
        if own:
            fh.close()


def trajectory_csv(times: Sequence[float], positions: np.ndarray) -> str:
    buf = io.StringIO()
    write_csv(buf, times, positions)
    return buf.getvalue()
