"""Holonomy at the origin, indecomposability evidence, the transvection
Lie algebra and the complex-structure checks for the 4-dimensional model.

Everything runs in the real representation: holomorphic-pair models are
realified first. Vectors and matrices are exact (GaussianRational).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

import numpy as np

from .errors import InconsistentSystemError, PKVError
from .exact import ONE, ZERO, ExactMatrix, GaussianRational, MultiPoly, row_space_basis
from .models import realify
from .tensor import REAL, MetricModel, TensorField, riemann

Vector = list  # list[GaussianRational]


def _const(p: MultiPoly) -> GaussianRational:
    return p.coefficient({})


def _rank(vectors: Sequence[Vector]) -> int:
    return len(row_space_basis(vectors)) if vectors else 0


def _in_span(basis: Sequence[Vector], vectors: Sequence[Vector]) -> bool:
    return _rank(list(basis) + list(vectors)) == _rank(basis)


def _unit(dim: int, k: int) -> Vector:
    v = [ZERO] * dim
    v[k] = ONE
    return v


def _real_model(m: MetricModel) -> MetricModel:
    return m if m.chart.kind == REAL else realify(m)


def block_indices(m: MetricModel) -> tuple[list[int], list[int]]:
    """(base, null) coordinate indices: null directions span the parallel null distribution."""
    if "base" in m.meta and "null" in m.meta:
        return list(m.meta["base"]), list(m.meta["null"])
    raise PKVError(f"{m.provenance}: no block layout recorded")


# ---------------------------------------------------------------------------
# holonomy


@dataclass
class HolonomySpan:
    dim_ambient: int
    generators: list[ExactMatrix]
    basis: list[ExactMatrix]
    g0: ExactMatrix
    model: MetricModel

    @property
    def dim(self) -> int:
        return len(self.basis)

    def isometry_defects(self) -> list[int]:
        """Indices of basis elements violating Bᵀ g₀ + g₀ B = 0."""
        return [k for k, b in enumerate(self.basis) if not (b.T @ self.g0 + self.g0 @ b).is_zero()]

    def nilpotency_defects(self) -> list[int]:
        return [k for k, b in enumerate(self.generators) if not (b @ b).is_zero()]

    def coordinates(self, mat: ExactMatrix) -> Vector:
        """Coefficients of ``mat`` in the basis; raises if it lies outside the span."""
        if not self.basis:
            if mat.is_zero():
                return []
            raise InconsistentSystemError("matrix outside the (zero) holonomy span")
        system = ExactMatrix([list(col) for col in zip(*(b.flatten() for b in self.basis))])
        return system.solve(mat.flatten())


def curvature_endomorphism(riem: TensorField, i: int, j: int, dim: int) -> ExactMatrix:
    """R(e_i, e_j) at the origin as a matrix: entry (l, k) = R^l_{kij}(0)."""
    rows = [[ZERO] * dim for _ in range(dim)]
    for (l, k, a, b), p in riem.components.items():
        if a == i and b == j:
            rows[l][k] = _const(p)
    return ExactMatrix(rows)


def holonomy_span(m: MetricModel, riem: TensorField | None = None) -> HolonomySpan:
    """Span of the curvature endomorphisms R(e_A, e_B) at the origin."""
    m = _real_model(m)
    if riem is None or riem.chart != m.chart:
        riem = riemann(m)
    d = m.dim
    pairs = sorted({(a, b) for (_, _, a, b) in riem.components if a < b})
    gens = [curvature_endomorphism(riem, a, b, d) for a, b in pairs]
    gens = [g for g in gens if not g.is_zero()]
    reduced = row_space_basis([g.flatten() for g in gens])
    basis = [ExactMatrix([v[r * d:(r + 1) * d] for r in range(d)]) for v in reduced]
    g0 = ExactMatrix([[_const(m.g[(i, j)]) for j in range(d)] for i in range(d)])
    return HolonomySpan(d, gens, basis, g0, m)


@dataclass
class CheckResult:
    """Outcome of a structural check: ``status`` is pass/fail/not-applicable/indeterminate."""

    status: str
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status == "pass"


def _is_realified(m: MetricModel) -> bool:
    return str(m.meta.get("family", "")).startswith("realified")


def hol_block_structure(h: HolonomySpan) -> CheckResult:
    """Block form [[0, 0], [A, 0]] with A skew (real) or skew-Hermitian (complex), abelian and unipotent."""
    m = h.model
    base, null = block_indices(m)
    details: dict = {"dim": h.dim}
    if not h.basis:
        return CheckResult("pass", {"dim": 0, "note": "empty basis"})
    for k, b in enumerate(h.basis):
        for i in range(h.dim_ambient):
            for j in range(h.dim_ambient):
                if b[i, j] and (i in base or j in null):
                    return CheckResult("fail", {"basis": k, "entry": (i, j), "reason": "not strictly lower block"})
    for x, y in combinations(range(h.dim), 2):
        if not (h.basis[x] @ h.basis[y]).is_zero() or not (h.basis[y] @ h.basis[x]).is_zero():
            return CheckResult("fail", {"pair": (x, y), "reason": "products do not vanish"})
    if any(not (b @ b).is_zero() for b in h.basis):
        return CheckResult("fail", {"reason": "basis element is not square-zero"})
    blocks = []
    if _is_realified(m):
        half = h.dim_ambient // 2
        xb, xn = [i for i in base if i < half], [i for i in null if i < half]
        for k, b in enumerate(h.basis):
            mr = [[b[r, c] for c in xb] for r in xn]
            mi = [[b[r + half, c] for c in xb] for r in xn]
            for r, rr in enumerate(xn):
                for c, cc in enumerate(xb):
                    if b[rr, cc + half] != -mi[r][c] or b[rr + half, cc + half] != mr[r][c]:
                        return CheckResult("fail", {"basis": k, "reason": "not complex-linear"})
            size = len(xn)
            for r in range(size):
                for c in range(size):
                    if mr[r][c] != -mr[c][r] or mi[r][c] != mi[c][r]:
                        return CheckResult("fail", {"basis": k, "reason": "lower block not skew-Hermitian"})
            blocks.append([x for row in mr for x in row] + [x for row in mi for x in row])
        details["lower_block_kind"] = "skew-Hermitian"
        details["full_dim"] = len(xn) ** 2
    else:
        for k, b in enumerate(h.basis):
            a = [[b[r, c] for c in base] for r in null]
            size = len(null)
            for r in range(size):
                for c in range(size):
                    if a[r][c] != -a[c][r]:
                        return CheckResult("fail", {"basis": k, "reason": "lower block not skew-symmetric"})
            blocks.append([x for row in a for x in row])
        size = len(null)
        details["lower_block_kind"] = "skew-symmetric"
        details["full_dim"] = size * (size - 1) // 2
    details["lower_block_span"] = _rank(blocks)
    details["fills_block_space"] = details["lower_block_span"] == details["full_dim"]
    return CheckResult("pass", details)


def rational_vector(rng: np.random.Generator, dim: int) -> Vector:
    """Entries drawn from {-3..3}/{1..3}."""
    return [GaussianRational(Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 4)))) for _ in range(dim)]


def indecomposability_evidence(h: HolonomySpan, seed: int = 0, samples: int = 10) -> CheckResult:
    """Joint kernel of hol versus the null block U', and orbit spans hol·v.

    An invariant nondegenerate splitting is excluded when hol·v has more than
    half the dimension of U' for every v ∉ U' (two such images inside U'
    must meet) and U' is totally null. The second condition is verified
    exactly; the first only at seeded samples, so this is evidence.
    """
    m = h.model
    sigma = m.meta.get("sigma")
    if sigma is None or sigma.is_zero() or not sigma.nondegenerate:
        return CheckResult("not-applicable", {"reason": "sigma is degenerate"})
    base, null = block_indices(m)
    d = h.dim_ambient
    stacked = ExactMatrix([list(row) for b in h.basis for row in b.entries])
    kernel = stacked.kernel_basis()
    u_prime = [_unit(d, k) for k in null]
    kernel_ok = len(kernel) == len(null) and _in_span(u_prime, kernel)
    totally_null = all(not h.g0[i, j] for i in null for j in null)
    rng = np.random.default_rng(seed)
    dims = []
    for _ in range(samples):
        v = rational_vector(rng, d)
        while all(not v[k] for k in base):
            v = rational_vector(rng, d)
        images = [b.apply(v) for b in h.basis]
        if not _in_span(u_prime, images):
            return CheckResult("fail", {"reason": "hol·v leaves U'", "seed": seed})
        dims.append(_rank(images))
    details = {
        "seed": seed,
        "kernel_dim": len(kernel),
        "u_prime_dim": len(null),
        "kernel_equals_u_prime": kernel_ok,
        "u_prime_totally_null": totally_null,
        "orbit_span_dims": dims,
        "orbit_spans_u_prime": all(k == len(null) for k in dims),
    }
    if not kernel_ok or not totally_null:
        return CheckResult("fail", details)
    if 2 * min(dims) > len(null):
        return CheckResult("pass", details)
    details["note"] = "orbit spans too small for the intersection argument"
    return CheckResult("indeterminate", details)


# ---------------------------------------------------------------------------
# transvection algebra


@dataclass
class TransvectionAlgebra:
    """g = hol ⊕ m with basis (hol basis, then coordinate vectors of m)."""

    hol: HolonomySpan
    m_dim: int
    brackets: dict[tuple[int, int], dict[int, GaussianRational]]

    @property
    def dim(self) -> int:
        return self.hol.dim + self.m_dim

    def bracket_basis(self, i: int, j: int) -> dict[int, GaussianRational]:
        if i == j:
            return {}
        if i < j:
            return self.brackets.get((i, j), {})
        return {k: -c for k, c in self.brackets.get((j, i), {}).items()}

    def bracket(self, x: Vector, y: Vector) -> Vector:
        out = [ZERO] * self.dim
        nx = [(i, a) for i, a in enumerate(x) if a]
        ny = [(j, b) for j, b in enumerate(y) if b]
        for i, a in nx:
            for j, b in ny:
                if i == j:
                    continue
                ab = a * b
                for k, c in self.bracket_basis(i, j).items():
                    out[k] = out[k] + ab * c
        return out

    def m_index(self, k: int) -> int:
        return self.hol.dim + k

    def jacobi_defects(self) -> list[tuple[int, int, int]]:
        """All basis triples where the Jacobi identity fails (exact)."""
        bad = []
        e = [_unit(self.dim, k) for k in range(self.dim)]
        cache = {}

        def br(i, j):
            if (i, j) not in cache:
                v = [ZERO] * self.dim
                for k, c in self.bracket_basis(i, j).items():
                    v[k] = c
                cache[(i, j)] = v
            return cache[(i, j)]

        for i, j, k in combinations(range(self.dim), 3):
            total = [ZERO] * self.dim
            for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
                t = self.bracket(br(a, b), e[c])
                total = [x + y for x, y in zip(total, t)]
            if any(total):
                bad.append((i, j, k))
        return bad


def build_transvection_algebra(h: HolonomySpan, riem: TensorField | None = None) -> TransvectionAlgebra:
    """Brackets: [B₁, B₂] commutator, [B, X] = B·X, [X, Y] = -R(X, Y) in the hol basis."""
    m = h.model
    if riem is None or riem.chart != m.chart:
        riem = riemann(m)
    r, d = h.dim, h.dim_ambient
    brackets: dict[tuple[int, int], dict[int, GaussianRational]] = {}

    def store(i, j, vec):
        nz = {k: c for k, c in enumerate(vec) if c}
        if nz:
            brackets[(i, j)] = nz

    for a, b in combinations(range(r), 2):
        comm = h.basis[a] @ h.basis[b] - h.basis[b] @ h.basis[a]
        store(a, b, list(h.coordinates(comm)) + [ZERO] * d)
    for a in range(r):
        for k in range(d):
            col = [h.basis[a][l, k] for l in range(d)]
            store(a, r + k, [ZERO] * r + col)
    for i, j in combinations(range(d), 2):
        endo = curvature_endomorphism(riem, i, j, d)
        if endo.is_zero():
            continue
        try:
            coords = h.coordinates(endo.scale(-1))
        except InconsistentSystemError as exc:
            raise PKVError(f"R(e{i + 1}, e{j + 1}) lies outside the holonomy span") from exc
        store(r + i, r + j, list(coords) + [ZERO] * d)
    return TransvectionAlgebra(h, d, brackets)


@dataclass
class NilpotencyCertificate:
    series_dims: list[int]
    steps: int | None
    derived_matches: bool
    second_matches: bool
    u_prime_central: bool
    center_dim: int
    center_equals_u_prime: bool
    derived_abelian: bool
    jacobi_defects: int

    @property
    def three_step(self) -> bool:
        return self.steps == 3 and self.derived_matches and self.second_matches


def nilpotency_certificate(t: TransvectionAlgebra, max_steps: int = 8) -> NilpotencyCertificate:
    """Lower central series g¹ = [g, g], g^{k+1} = [g, g^k] with exact ranks."""
    dim, r = t.dim, t.hol.dim
    _, null = block_indices(t.hol.model)
    e = [_unit(dim, k) for k in range(dim)]
    hol_plus_u = [e[k] for k in range(r)] + [e[t.m_index(k)] for k in null]
    u_prime = [e[t.m_index(k)] for k in null]

    current = row_space_basis([t.bracket(e[i], e[j]) for i, j in combinations(range(dim), 2)])
    series = [len(current)]
    terms = [current]
    steps = None
    for _ in range(max_steps):
        if not current:
            steps = len(series)
            break
        current = row_space_basis([t.bracket(e[i], v) for i in range(dim) for v in current])
        series.append(len(current))
        terms.append(current)
    if steps is None and not current:
        steps = len(series)

    def same(a, b):
        return _rank(a) == _rank(b) == _rank(list(a) + list(b))

    derived_matches = same(terms[0], hol_plus_u) if terms[0] else not hol_plus_u
    second_matches = len(terms) > 1 and (same(terms[1], u_prime) if terms[1] else not u_prime)
    rows = []
    for i in range(dim):
        for k in range(dim):
            rows.append([t.bracket_basis(i, j).get(k, ZERO) for j in range(dim)])
    center = ExactMatrix(rows).kernel_basis() if rows else []
    u_central = all(not any(t.bracket(e[i], u)) for i in range(dim) for u in u_prime)
    derived_abelian = all(not any(t.bracket(x, y)) for x, y in combinations(terms[0], 2)) if terms[0] else True
    return NilpotencyCertificate(
        series_dims=series,
        steps=steps,
        derived_matches=derived_matches,
        second_matches=second_matches,
        u_prime_central=u_central,
        center_dim=len(center),
        center_equals_u_prime=same(center, u_prime) if center else not u_prime,
        derived_abelian=derived_abelian,
        jacobi_defects=len(t.jacobi_defects()),
    )


# ---------------------------------------------------------------------------
# complex structure of the 4-dimensional model


def frances_complex_structure() -> ExactMatrix:
    """J e1 = e2, J e2 = -e1, J e3 = e4, J e4 = -e3 (columns are images)."""
    J = [[ZERO] * 4 for _ in range(4)]
    J[1][0], J[0][1], J[3][2], J[2][3] = ONE, -ONE, ONE, -ONE
    return ExactMatrix(J)


def complex_structure_check(m: MetricModel, riem: TensorField | None = None) -> CheckResult:
    """J² = -1, g₀(J·, J·) = g₀, [J, hol] = 0, and whether φ_{a,b} commutes with J."""
    if m.meta.get("family") != "frances":
        return CheckResult("not-applicable", {"reason": "only defined for the 4-dimensional model"})
    from .conformal import HomothetySpec, linear_map

    J = frances_complex_structure()
    h = holonomy_span(m, riem)
    minus_one = ExactMatrix.identity(4).scale(-1)
    square_ok = (J @ J) == minus_one
    hermitian_ok = (J.T @ h.g0 @ J) == h.g0
    commuting = [k for k, b in enumerate(h.basis) if (J @ b - b @ J).is_zero()]
    hol_ok = len(commuting) == h.dim
    phi = linear_map(HomothetySpec("phi_ab"), m)
    from .exact import poly_matmul
    universe = phi[0][0].variables
    Jp = [[MultiPoly.constant(J[i, j], universe) for j in range(4)] for i in range(4)]
    left, right = poly_matmul(phi, Jp), poly_matmul(Jp, phi)
    offending = next(((i, j) for i in range(4) for j in range(4) if left[i][j] != right[i][j]), None)
    details = {
        "J_squared_minus_identity": square_ok,
        "hermitian_wrt_g0": hermitian_ok,
        "hol_dim": h.dim,
        "hol_invariant": hol_ok,
        "phi_ab_commutes_with_J": offending is None,
        "phi_ab_commutator_witness": None if offending is None else
        {"entry": offending, "value": str(left[offending[0]][offending[1]] - right[offending[0]][offending[1]])},
    }
    ok = square_ok and hermitian_ok and hol_ok and offending is not None
    return CheckResult("pass" if ok else "fail", details)
