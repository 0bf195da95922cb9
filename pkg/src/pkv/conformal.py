"""Diagonal homothety families, their exact conformal factors, fixed-point
sets and the essentiality certificate, plus the fundamental domain of the
cyclic group generated by φ_{a,b} on punctured space.

Scale parameters are formal symbols: ``s`` and ``t`` stand for e^a and
e^b (or e^s, e^t), and ``u`` and ``v`` stand for their inverses; products
``t·u`` and ``s·v`` are reduced to 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import DimensionError, PKVError
from .exact import MultiPoly, poly_matmul
from .tensor import MetricModel, TensorField, pullback_metric

SYMBOLS = ("s", "t", "u", "v")
INVERSE = {"s": "v", "t": "u"}

# family -> (parameter names, per-block exponent vectors, flat-factor exponents)
FAMILIES: dict[str, tuple[tuple[str, ...], list[tuple[int, ...]], tuple[int, ...]]] = {
    "phi_ab": (("s", "t"), [(1, 0), (0, 1), (1, 2), (2, 1)], (1, 1)),
    "phi_s": (("s",), [(1,), (1,), (3,), (3,)], (2,)),
    "psi_t": (("t",), [(1,), (-1,), (-1,), (1,)], (0,)),
    "phi_0t": (("t",), [(0,), (1,), (2,), (1,)], (1,)),
    "identity": ((), [(), (), (), ()], ()),
}


@dataclass(frozen=True)
class HomothetySpec:
    """A diagonal linear map acting blockwise; ``params`` holds real exponents
    (a, b for φ_{a,b}; s for φ_s; t for ψ_t and φ_{0,t}) for numeric use."""

    family: str
    params: tuple[float, ...] = ()

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown homothety family {self.family!r}")
        names = FAMILIES[self.family][0]
        if self.params and len(self.params) != len(names):
            raise ValueError(f"{self.family} takes {len(names)} parameter(s)")

    @property
    def symbols(self) -> tuple[str, ...]:
        return FAMILIES[self.family][0]

    def block_exponents(self, block) -> tuple[int, ...]:
        names, exps, flat = FAMILIES[self.family]
        return flat if block == "flat" else exps[block]

    def factor_exponents(self) -> tuple[int, ...]:
        return tuple(2 * e for e in FAMILIES[self.family][2])

    def monomial(self, exps: Sequence[int]) -> MultiPoly:
        powers: dict[str, int] = {}
        for name, e in zip(self.symbols, exps):
            if e > 0:
                powers[name] = e
            elif e < 0:
                powers[INVERSE[name]] = -e
        return MultiPoly.monomial(1, powers, SYMBOLS)

    def claimed_factor(self) -> MultiPoly:
        return self.monomial(self.factor_exponents())

    def numeric_scale(self, exps: Sequence[int]) -> float:
        if len(self.params) != len(self.symbols):
            raise ValueError(f"{self.family} needs numeric parameters")
        return math.exp(sum(e * p for e, p in zip(exps, self.params)))


def model_blocks(m: MetricModel) -> list:
    blocks = m.meta.get("blocks")
    if blocks is None or len(blocks) != m.dim:
        raise PKVError(f"{m.provenance}: no block layout for homotheties")
    return list(blocks)


def linear_map(h: HomothetySpec, m: MetricModel) -> list[list[MultiPoly]]:
    """Diagonal matrix of the homothety on the model's chart, formal in the scales."""
    blocks = model_blocks(m)
    zero = MultiPoly.zero(SYMBOLS)
    rows = []
    for i, blk in enumerate(blocks):
        row = [zero] * len(blocks)
        row[i] = h.monomial(h.block_exponents(blk))
        rows.append(row)
    return rows


def numeric_map(h: HomothetySpec, blocks: Sequence) -> np.ndarray:
    """Diagonal of the map at the numeric parameters."""
    return np.array([h.numeric_scale(h.block_exponents(b)) for b in blocks])


def reduce_inverses(p: MultiPoly) -> MultiPoly:
    """Cancel t·u and s·v pairs."""
    pairs = [(p.index_of(a), p.index_of(b)) for a, b in INVERSE.items() if a in p.variables and b in p.variables]
    if not pairs:
        return p
    terms: dict[tuple, object] = {}
    for exps, c in p.terms.items():
        e = list(exps)
        for i, j in pairs:
            k = min(e[i], e[j])
            e[i] -= k
            e[j] -= k
        key = tuple(e)
        terms[key] = terms[key] + c if key in terms else c
    return MultiPoly(p.variables, terms)


@dataclass
class PullbackResult:
    ok: bool
    factor: MultiPoly | None
    claimed: MultiPoly
    witness: dict | None = None


def pullback_factor(m: MetricModel, h: HomothetySpec) -> PullbackResult:
    """φ*g compared with λ²·g component-wise, exactly in the formal scales.

    λ² is read off a constant metric component when there is one and is
    otherwise taken from the family's claimed factor.
    """
    L = linear_map(h, m)
    pulled = pullback_metric(m, L)
    chart = pulled.chart
    reduced = {idx: reduce_inverses(p) for idx, p in pulled.components.items()}
    claimed = h.claimed_factor().with_variables(chart.variables)
    factor = None
    for idx, g in sorted(m.g.components.items()):
        if g.is_constant() and idx in reduced:
            factor = reduced[idx] * g.constant_value().inverse()
            break
    if factor is None:
        factor = claimed
    indices = sorted(set(reduced) | set(m.g.components))
    for idx in indices:
        lhs = reduced.get(idx, chart.zero())
        rhs = m.g[idx].with_variables(chart.variables) * factor
        if lhs != rhs:
            return PullbackResult(False, None, claimed,
                                  {"component": idx, "pullback": str(lhs), "expected": str(rhs)})
    return PullbackResult(True, factor.with_variables(SYMBOLS) if set(factor.used_variables()) <= set(SYMBOLS) else factor,
                          claimed)


def maps_commute(h1: HomothetySpec, h2: HomothetySpec, m: MetricModel) -> bool:
    a, b = linear_map(h1, m), linear_map(h2, m)
    ab, ba = poly_matmul(a, b), poly_matmul(b, a)
    return all(reduce_inverses(x) == reduce_inverses(y) for r1, r2 in zip(ab, ba) for x, y in zip(r1, r2))


@dataclass
class FixedPointSet:
    indices: list[int]
    dim: int

    @property
    def meets_punctured_space(self) -> bool:
        return self.dim > 0


def fixed_point_set(h: HomothetySpec, blocks: Sequence, tol: float = 1e-10) -> FixedPointSet:
    """Eigenvalue-1 eigenspace of the diagonal map (coordinate indices)."""
    if not h.params:
        exps = [h.block_exponents(b) for b in blocks]
        idx = [i for i, e in enumerate(exps) if not any(e)]
    else:
        diag = numeric_map(h, blocks)
        idx = [i for i, d in enumerate(diag) if abs(d - 1.0) <= tol]
    return FixedPointSet(idx, len(idx))


@dataclass
class EssentialityCertificate:
    certified: bool
    factor: str
    factor_value: float
    fixed_dim: int  # real dimension
    commutes_with_deck: bool
    descends: bool
    note: str = ""


def essentiality_certificate(h: HomothetySpec, m: MetricModel) -> EssentialityCertificate:
    """Proper homothety with a fixed point on the punctured space.

    This is a sufficient criterion only: a negative result does not show
    the map is inessential.
    """
    pb = pullback_factor(m, h)
    if not pb.ok:
        return EssentialityCertificate(False, "", float("nan"), 0, False, False, "pullback is not a homothety")
    factor_value = h.numeric_scale(h.factor_exponents()) if h.params else float("nan")
    proper = not pb.factor.is_constant() or pb.factor != 1
    if h.params:
        proper = proper and abs(factor_value - 1.0) > 1e-12
    fixed = fixed_point_set(h, model_blocks(m))
    real_dim = fixed.dim * (2 if m.is_holomorphic else 1)
    commutes = maps_commute(h, HomothetySpec("phi_ab"), m)
    certified = proper and fixed.meets_punctured_space
    if certified:
        note = "proper homothety with fixed points"
    elif not proper:
        note = "conformal factor is 1; criterion does not apply"
    else:
        note = "no fixed points off the origin; criterion does not apply"
    return EssentialityCertificate(certified, str(pb.factor), factor_value, real_dim, commutes,
                                   certified and commutes, note)


# ---------------------------------------------------------------------------
# fundamental domain of <φ_{a,b}>


INTERIOR, SPHERE, ELLIPSOID, OUTSIDE = "interior", "sphere-boundary", "ellipsoid-boundary", "outside"


@dataclass
class FundamentalDomain:
    """Shell between the unit sphere and the ellipsoid Σ λ_i⁻² ‖x_i‖² = 1."""

    a: float
    b: float
    blocks: tuple[int, ...]
    tol: float = 1e-10

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise ValueError("a and b must be positive")
        self.blocks = tuple(self.blocks)

    @classmethod
    def contiguous(cls, a: float, b: float, block_size: int, tol: float = 1e-10) -> "FundamentalDomain":
        return cls(a, b, tuple(k // block_size for k in range(4 * block_size)), tol)

    @classmethod
    def for_model(cls, a: float, b: float, m: MetricModel, tol: float = 1e-10) -> "FundamentalDomain":
        blocks = model_blocks(m)
        if any(blk == "flat" for blk in blocks):
            raise PKVError("the fundamental domain is defined for the unextended models")
        return cls(a, b, tuple(blocks), tol)

    @property
    def lambdas(self) -> np.ndarray:
        a, b = self.a, self.b
        return np.exp(np.array([a, b, a + 2 * b, 2 * a + b]))

    @property
    def dim(self) -> int:
        return len(self.blocks)

    def scales(self, power: float = 1.0) -> np.ndarray:
        return self.lambdas[list(self.blocks)] ** power

    def apply(self, x: np.ndarray, k: float = 1) -> np.ndarray:
        """φ_{a,b}^k x (k may be fractional: the flow of the generator)."""
        return np.asarray(x, dtype=float) * self.scales(k)

    def sphere_value(self, x: np.ndarray) -> float:
        return float(np.sum(np.asarray(x, dtype=float) ** 2))

    def ellipsoid_value(self, x: np.ndarray) -> float:
        return float(np.sum((np.asarray(x, dtype=float) / self.scales()) ** 2))

    def _check(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise DimensionError(f"expected a point with {self.dim} coordinates")
        if not np.any(x):
            raise ValueError("the origin is not in the punctured space")
        return x


def domain_membership(d: FundamentalDomain, x) -> str:
    x = d._check(x)
    s, e = d.sphere_value(x), d.ellipsoid_value(x)
    if abs(s - 1.0) <= d.tol:
        return SPHERE
    if abs(e - 1.0) <= d.tol:
        return ELLIPSOID
    return INTERIOR if s > 1.0 and e < 1.0 else OUTSIDE


def canonical_representative(d: FundamentalDomain, x) -> tuple[int, np.ndarray]:
    """The unique k with y = φ^k x in the shell, sphere boundary included.

    Both quadratics grow strictly along the orbit, so the search is a
    monotone walk started from a logarithmic estimate.
    """
    x = d._check(x)
    lo = 1.0 - d.tol
    s0 = d.sphere_value(x)
    lmin, lmax = float(np.min(d.scales())), float(np.max(d.scales()))
    # S(φ^k x) lies between lmin^{2k} S(x) and lmax^{2k} S(x)
    k = int(math.floor(-math.log(s0) / (2 * math.log(lmax if s0 < 1 else lmin)))) if s0 > 0 else 0
    while d.sphere_value(d.apply(x, k)) < lo:
        k += 1
    while d.sphere_value(d.apply(x, k - 1)) >= lo:
        k -= 1
    return k, d.apply(x, k)


def quotient_chart(d: FundamentalDomain, x) -> tuple[float, np.ndarray]:
    """(angle, sphere point) for the class of x.

    The angle is the flow time τ ∈ [0, 1) with ‖φ^{-τ} y‖ = 1 for the
    representative y; the sphere point is φ^{-τ} y. Both are continuous
    across the boundary identification.
    """
    _, y = canonical_representative(d, x)
    if abs(d.sphere_value(y) - 1.0) <= d.tol:
        return 0.0, y / math.sqrt(d.sphere_value(y))

    def gap(tau: float) -> float:
        return d.sphere_value(d.apply(y, -tau)) - 1.0

    tau = brentq(gap, 0.0, 1.0, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    if tau >= 1.0:
        tau = 0.0
    p = d.apply(y, -tau)
    return float(tau), p / math.sqrt(d.sphere_value(p))


def angle_distance(a: float, b: float) -> float:
    """Distance on the circle R/Z."""
    diff = abs(a - b) % 1.0
    return min(diff, 1.0 - diff)
