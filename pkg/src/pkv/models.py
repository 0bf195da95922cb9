"""Builders for the concrete metrics: the Kähler potential model on C^{4n},
its realification, the real model on R^{4n}, the flat Hessian comparison
metric, the Frances metric, flat product extensions, and the numeric
Takagi machinery used to diagonalize the symmetric parameter matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
import scipy.linalg

from .errors import DimensionError, IllConditionedError, PKVError, RealificationError, SingularMatrixError
from .exact import ExactMatrix, GaussianRational, I, MultiPoly, make_variables, parse_scalar
from .tensor import (
    HOLOMORPHIC,
    LOWER,
    REAL,
    UPPER,
    Chart,
    MetricModel,
    TensorField,
    matrix_tensor,
)

HALF = GaussianRational(Fraction(1, 2))


# ---------------------------------------------------------------------------
# the symmetric parameter matrix


@dataclass(frozen=True)
class SigmaMatrix:
    """Symmetric n x n matrix, exact (Gaussian rational) or floating."""

    n: int
    entries: tuple

    def __post_init__(self):
        if self.n < 1:
            raise DimensionError("sigma must be at least 1x1")
        if len(self.entries) != self.n or any(len(r) != self.n for r in self.entries):
            raise DimensionError(f"sigma must be {self.n}x{self.n}")
        tol = 0 if self.exact else 1e-12
        for i in range(self.n):
            for j in range(i):
                if abs(complex(self.entries[i][j]) - complex(self.entries[j][i])) > tol or \
                        (self.exact and self.entries[i][j] != self.entries[j][i]):
                    raise PKVError(f"sigma is not symmetric at ({i + 1},{j + 1})")

    @classmethod
    def of(cls, rows) -> "SigmaMatrix":
        rows = [list(r) for r in rows]
        exact = all(not isinstance(x, (float, complex, np.floating, np.complexfloating)) for r in rows for x in r)
        if exact:
            rows = [[GaussianRational.coerce(x) for x in r] for r in rows]
        else:
            rows = [[complex(x) for x in r] for r in rows]
        return cls(len(rows), tuple(tuple(r) for r in rows))

    @classmethod
    def parse(cls, text: str) -> "SigmaMatrix":
        """Rows separated by ';', entries by ','; Gaussian-rational or float literals."""
        rows = [[parse_scalar(e) for e in row.split(",")] for row in text.strip().split(";")]
        width = len(rows[0])
        for k, r in enumerate(rows):
            if len(r) != width:
                raise DimensionError(f"row length mismatch in sigma row {k + 1}")
        if len(rows) != width:
            raise DimensionError("sigma must be square")
        return cls.of(rows)

    @classmethod
    def identity(cls, n: int) -> "SigmaMatrix":
        return cls.of([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zero(cls, n: int) -> "SigmaMatrix":
        return cls.of([[0] * n for _ in range(n)])

    @property
    def exact(self) -> bool:
        return all(isinstance(x, GaussianRational) for r in self.entries for x in r)

    def __getitem__(self, ij):
        return self.entries[ij[0]][ij[1]]

    def matrix(self) -> ExactMatrix:
        if not self.exact:
            raise PKVError("floating sigma has no exact matrix")
        return ExactMatrix(self.entries)

    def to_numpy(self) -> np.ndarray:
        return np.array([[complex(x) for x in r] for r in self.entries], dtype=complex)

    def is_real(self) -> bool:
        return all(complex(x).imag == 0 for r in self.entries for x in r)

    def is_zero(self) -> bool:
        return all(not x for r in self.entries for x in r)

    @property
    def nondegenerate(self) -> bool:
        if self.exact:
            return self.matrix().rank() == self.n
        return np.linalg.matrix_rank(self.to_numpy()) == self.n

    def __str__(self):
        return ";".join(",".join(str(x) for x in r) for r in self.entries)


def random_sigma(n: int, rng: np.random.Generator, real: bool = False, bound: int = 3) -> SigmaMatrix:
    """Seeded random symmetric Gaussian-rational matrix with small entries."""
    rows = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            re = GaussianRational(Fraction(int(rng.integers(-bound, bound + 1)), int(rng.integers(1, bound + 1))))
            im = 0 if real else GaussianRational(Fraction(int(rng.integers(-bound, bound + 1)), int(rng.integers(1, bound + 1))))
            x = re + (I * im if im else 0)
            rows[i][j] = rows[j][i] = x
    return SigmaMatrix.of(rows)


# ---------------------------------------------------------------------------
# complex model


def sigma_form(sigma: SigmaMatrix, names: Sequence[str], universe: Sequence[str]) -> MultiPoly:
    """σ_ij v^i v^{j+n} for the first 2n of the given variable names."""
    n = sigma.n
    total = MultiPoly.zero(universe)
    for i in range(n):
        for j in range(n):
            c = sigma[i, j]
            if c:
                total = total + MultiPoly.var(names[i], universe) * MultiPoly.var(names[j + n], universe) * c
    return total


def kahler_potential(sigma: SigmaMatrix) -> MultiPoly:
    """Real quartic potential on the holomorphic-pair chart of C^{4n}.

    f = Σ_a (z^a w^{a+2n} + z^{a+2n} w^a) + σ(z) conj(σ(z)); the quadratic part
    is taken Hermitian-symmetric so that f is real and h_{a+2n, a} = 1.
    """
    if not sigma.exact:
        raise PKVError("the exact potential needs an exact sigma")
    n = sigma.n
    chart = Chart.holomorphic(4 * n)
    z, w = chart.coords, chart.conj_coords
    f = MultiPoly.zero(chart.variables)
    for a in range(2 * n):
        f = f + MultiPoly.var(z[a], chart.variables) * MultiPoly.var(w[a + 2 * n], chart.variables)
        f = f + MultiPoly.var(z[a + 2 * n], chart.variables) * MultiPoly.var(w[a], chart.variables)
    s = sigma_form(sigma, z, chart.variables)
    return f + s * s.conjugate()


def _block_inverse(chart: Chart, top_left: list[list[MultiPoly]], half: int) -> TensorField:
    """Inverse of [[A, 1], [1, 0]] is [[0, 1], [1, -A]]."""
    comps = {}
    for a in range(half):
        comps[(a, a + half)] = chart.const(1)
        comps[(a + half, a)] = chart.const(1)
        for b in range(half):
            p = top_left[a][b]
            if p.terms:
                comps[(a + half, b + half)] = -p
    return TensorField(chart, (UPPER, UPPER), comps)


def build_complex_model(sigma: SigmaMatrix) -> MetricModel:
    """h_{AB} = ∂_{z^A} ∂_{w^B} f for the quartic potential, with block inverse."""
    n = sigma.n
    chart = Chart.holomorphic(4 * n)
    f = kahler_potential(sigma)
    z, w = chart.coords, chart.conj_coords
    df = [f.partial(z[a]) for a in range(4 * n)]
    rows = [[df[a].partial(w[b]) for b in range(4 * n)] for a in range(4 * n)]
    g = matrix_tensor(chart, rows)
    top = [[rows[a][b] for b in range(2 * n)] for a in range(2 * n)]
    for a in range(2 * n):
        for b in range(2 * n):
            if rows[a][b + 2 * n] != (1 if a == b else 0) or rows[a + 2 * n][b] != (1 if a == b else 0) \
                    or rows[a + 2 * n][b + 2 * n].terms:
                raise PKVError("complex model lost its block structure")
    g_inv = _block_inverse(chart, top, 2 * n)
    meta = _meta("complex", n, sigma, blocks=[a // n for a in range(4 * n)],
                 base=list(range(2 * n)), null=list(range(2 * n, 4 * n)))
    meta["potential"] = f
    return MetricModel(chart, g, g_inv, "Kähler potential model on C^{4n}", meta)


def _meta(family: str, n: int, sigma, blocks, base, null) -> dict:
    return {"family": family, "n": n, "sigma": sigma, "blocks": list(blocks),
            "base": list(base), "null": list(null)}


def realify(m: MetricModel) -> MetricModel:
    """Real form of a holomorphic-pair model on coordinates (x^1..x^N, y^1..y^N).

    Uses dz^A ⊙ dz̄^B = dx^A dx^B + dy^A dy^B + i(dy^A dx^B - dx^A dy^B) with
    symmetric products, so that f = z z̄ gives dx^2 + dy^2. Every resulting
    coefficient must be real.
    """
    if m.chart.kind != HOLOMORPHIC:
        raise PKVError("realify expects a holomorphic-pair model")
    N = m.dim
    xs, ys = make_variables("x", N), make_variables("y", N)
    chart = Chart.real(2 * N, names=xs + ys)
    V = chart.variables
    subst = {}
    for k in range(N):
        x, y = MultiPoly.var(xs[k], V), MultiPoly.var(ys[k], V)
        subst[m.chart.coords[k]] = x + y * I
        subst[m.chart.conj_coords[k]] = x - y * I
    comps: dict[tuple, MultiPoly] = {}

    def add(idx, p):
        comps[idx] = comps[idx] + p if idx in comps else p

    for (a, b), h in m.g.components.items():
        q = h.substitute(subst, V) * HALF
        iq = q * I
        xa, xb, ya, yb = a, b, a + N, b + N
        add((xa, xb), q)
        add((xb, xa), q)
        add((ya, yb), q)
        add((yb, ya), q)
        add((ya, xb), iq)
        add((xb, ya), iq)
        add((xa, yb), -iq)
        add((yb, xa), -iq)
    for idx, p in comps.items():
        if not p.has_real_coefficients():
            raise RealificationError(f"imaginary residue in realified component {idx}: {p.imag_part()}")
    g = TensorField(chart, (LOWER, LOWER), comps)
    # realification M -> [[Re M, Im M], [-Im M, Re M]] is multiplicative
    inv: dict[tuple, MultiPoly] = {}
    for (a, b), p in m.g_inv.components.items():
        q = p.substitute(subst, V)
        re, im = q.real_part(), q.imag_part()
        for idx, val in (((a, b), re), ((a + N, b + N), re), ((a, b + N), im), ((a + N, b), -im)):
            if val.terms:
                inv[idx] = inv[idx] + val if idx in inv else val
    g_inv = TensorField(chart, (UPPER, UPPER), inv)
    meta = dict(m.meta)
    meta["family"] = "realified-" + m.meta.get("family", "model")
    for key in ("blocks",):
        if key in meta:
            meta[key] = list(meta[key]) * 2
    for key in ("base", "null"):
        if key in meta:
            meta[key] = list(meta[key]) + [k + N for k in meta[key]]
    meta["holomorphic_parent"] = m
    meta.pop("potential", None)
    return MetricModel(chart, g, g_inv, f"realification of {m.provenance}", meta)


# ---------------------------------------------------------------------------
# real models


def _require_real(sigma: SigmaMatrix) -> None:
    if not sigma.exact or not sigma.is_real():
        raise PKVError("the real model needs an exact real symmetric sigma")


def sigma_one_form(sigma: SigmaMatrix, chart: Chart) -> list[MultiPoly]:
    """Components of θ = σ_ij d(x^i x^{j+n})."""
    n = sigma.n
    V = chart.variables
    theta = [chart.zero() for _ in range(chart.dim)]
    for i in range(n):
        for j in range(n):
            c = sigma[i, j]
            if c:
                theta[i] = theta[i] + MultiPoly.var(V[j + n], V) * c
                theta[j + n] = theta[j + n] + MultiPoly.var(V[i], V) * c
    return theta


def build_real_model(sigma: SigmaMatrix) -> MetricModel:
    """g = 2 δ_ab dx^a dx^{b+2n} + θ², θ = σ_ij d(x^i x^{j+n}) on R^{4n}."""
    _require_real(sigma)
    n = sigma.n
    chart = Chart.real(4 * n)
    theta = sigma_one_form(sigma, chart)
    comps = {}
    for a in range(2 * n):
        comps[(a, a + 2 * n)] = chart.const(1)
        comps[(a + 2 * n, a)] = chart.const(1)
        for b in range(2 * n):
            p = theta[a] * theta[b]
            if p.terms:
                comps[(a, b)] = p
    g = TensorField(chart, (LOWER, LOWER), comps)
    top = [[g[(a, b)] for b in range(2 * n)] for a in range(2 * n)]
    meta = _meta("real", n, sigma, blocks=[a // n for a in range(4 * n)],
                 base=list(range(2 * n)), null=list(range(2 * n, 4 * n)))
    return MetricModel(chart, g, _block_inverse(chart, top, 2 * n), "real model on R^{4n}", meta)


def restricted_potential(sigma: SigmaMatrix, chart: Chart) -> MultiPoly:
    """f = δ_ab x^a x^{b+2n} + σ(x)² on R^{4n}."""
    n = sigma.n
    V = chart.variables
    f = chart.zero()
    for a in range(2 * n):
        f = f + MultiPoly.var(V[a], V) * MultiPoly.var(V[a + 2 * n], V)
    s = sigma_form(sigma, V, V)
    return f + s * s


def build_hessian_comparison(sigma: SigmaMatrix) -> MetricModel:
    """Hessian metric ∂_A∂_B f of the potential restricted to real coordinates."""
    _require_real(sigma)
    n = sigma.n
    chart = Chart.real(4 * n)
    f = restricted_potential(sigma, chart)
    V = chart.variables
    df = [f.partial(v) for v in V]
    rows = [[df[a].partial(V[b]) for b in range(4 * n)] for a in range(4 * n)]
    g = matrix_tensor(chart, rows)
    top = [[rows[a][b] for b in range(2 * n)] for a in range(2 * n)]
    meta = _meta("hessian-comparison", n, sigma, blocks=[a // n for a in range(4 * n)],
                 base=list(range(2 * n)), null=list(range(2 * n, 4 * n)))
    meta["potential"] = f
    return MetricModel(chart, g, _block_inverse(chart, top, 2 * n), "Hessian metric of the restricted potential", meta)


def build_frances_model() -> MetricModel:
    """ĝ = 2 dy¹dy³ + 2 dy²dy⁴ + (y²)² (dy¹)² on R^4."""
    chart = Chart.real(4, prefix="y")
    y2 = chart.coord(1)
    one = chart.const(1)
    comps = {(0, 0): y2 * y2, (0, 2): one, (2, 0): one, (1, 3): one, (3, 1): one}
    g = TensorField(chart, (LOWER, LOWER), comps)
    top = [[g[(0, 0)], chart.zero()], [chart.zero(), chart.zero()]]
    meta = _meta("frances", 1, None, blocks=[0, 1, 2, 3], base=[0, 1], null=[2, 3])
    return MetricModel(chart, g, _block_inverse(chart, top, 2), "Frances metric on R^4", meta)


def build_product_extension(m: MetricModel, k: int, l: int) -> MetricModel:
    """Product with -Σ_{i≤k} (du^i)² + Σ_{j>k} (du^j)² of signature (k, l)."""
    if k < 0 or l < 0:
        raise ValueError("k and l must be nonnegative")
    if k == 0 and l == 0:
        return m
    if m.chart.kind != REAL:
        m = realify(m)
    extra = make_variables("u", k + l)
    D = m.dim
    chart = Chart.real(D + k + l, names=m.chart.variables + extra)
    comps = {idx: p.with_variables(chart.variables) for idx, p in m.g.components.items()}
    inv = {idx: p.with_variables(chart.variables) for idx, p in m.g_inv.components.items()}
    for j in range(k + l):
        sign = -1 if j < k else 1
        comps[(D + j, D + j)] = chart.const(sign)
        inv[(D + j, D + j)] = chart.const(sign)
    meta = dict(m.meta)
    meta["family"] = f"product({meta.get('family', 'model')})"
    meta["flat_extra"] = list(range(D, D + k + l))
    meta["k"], meta["l"] = k, l
    meta["base_model"] = m
    if "blocks" in meta:
        meta["blocks"] = list(meta["blocks"]) + ["flat"] * (k + l)
    if "base" in meta:
        meta["base"] = list(meta["base"]) + list(range(D, D + k + l))
    return MetricModel(chart, TensorField(chart, (LOWER, LOWER), comps), TensorField(chart, (UPPER, UPPER), inv),
                       f"product of {m.provenance} with R^({k},{l})", meta)


def build_flat_model(dim: int, signs: Sequence[int] | None = None) -> MetricModel:
    """Constant diagonal metric (Euclidean by default)."""
    chart = Chart.real(dim)
    signs = list(signs) if signs is not None else [1] * dim
    comps = {(i, i): chart.const(s) for i, s in enumerate(signs)}
    meta = {"family": "flat", "n": None, "sigma": None}
    return MetricModel(chart, TensorField(chart, (LOWER, LOWER), comps),
                       TensorField(chart, (UPPER, UPPER), comps), "flat metric", meta)


def build_test_metric_2d() -> MetricModel:
    """2 dx¹dx² + (x²)² (dx¹)²: a curved 2-D metric with polynomial inverse."""
    chart = Chart.real(2)
    x2 = chart.coord(1)
    one = chart.const(1)
    g = TensorField(chart, (LOWER, LOWER), {(0, 0): x2 * x2, (0, 1): one, (1, 0): one})
    g_inv = TensorField(chart, (UPPER, UPPER), {(0, 1): one, (1, 0): one, (1, 1): -(x2 * x2)})
    return MetricModel(chart, g, g_inv, "2-D curved test metric", {"family": "test-2d"})


# ---------------------------------------------------------------------------
# diagonalization lemma (numeric)


@dataclass
class TakagiResult:
    Q: np.ndarray
    diag: np.ndarray
    residual: float

    @property
    def P(self) -> np.ndarray:
        """Block used on the last two coordinate groups: (Q̄⁻¹)ᵀ."""
        return np.linalg.inv(np.conj(self.Q)).T


def takagi_diagonalize(sigma, tol: float = 1e-12, max_condition: float = 1e12) -> TakagiResult:
    """Q (unitary) with Qᵀ σ Q diagonal, from the SVD of σ.

    Within each cluster of equal singular values the left singular vectors
    differ from the conjugated right ones by a symmetric unitary, whose
    square root realigns them.
    """
    A = sigma.to_numpy() if isinstance(sigma, SigmaMatrix) else np.asarray(sigma, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError("sigma must be square")
    if np.max(np.abs(A - A.T), initial=0.0) > tol:
        raise PKVError("sigma is not symmetric within tolerance")
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > max_condition:
        raise IllConditionedError(f"sigma is ill-conditioned (condition {cond:.3g})")
    if not np.any(A - np.diag(np.diag(A))):
        return TakagiResult(Q=np.eye(len(A), dtype=complex), diag=np.diag(A).astype(complex), residual=0.0)
    V, s, Wh = np.linalg.svd(A)
    W = Wh.conj().T
    scale = max(float(s[0]), 1.0)
    U = np.zeros_like(V)
    start = 0
    while start < len(s):
        stop = start + 1
        while stop < len(s) and abs(s[stop] - s[start]) <= 1e-10 * scale:
            stop += 1
        idx = slice(start, stop)
        Z = V[:, idx].T @ W[:, idx]
        U[:, idx] = V[:, idx] @ scipy.linalg.sqrtm(Z).conj()
        start = stop
    Q = U.conj()
    D = Q.T @ A @ Q
    off = D - np.diag(np.diag(D))
    return TakagiResult(Q=Q, diag=np.diag(D).copy(), residual=float(np.max(np.abs(off), initial=0.0)))


def potential_numeric(sigma: np.ndarray, z: np.ndarray) -> float:
    """Evaluate the quartic potential at a point z ∈ C^{4n} (floating)."""
    sigma = np.asarray(sigma, dtype=complex)
    n = sigma.shape[0]
    z = np.asarray(z, dtype=complex)
    quad = np.sum(z[: 2 * n] * np.conj(z[2 * n: 4 * n]) + z[2 * n: 4 * n] * np.conj(z[: 2 * n]))
    s = z[:n] @ sigma @ z[n: 2 * n]
    return complex(quad + s * np.conj(s))


def phi_q(Q: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Apply the block map (Q, Q, P, P) with P = (Q̄⁻¹)ᵀ to z ∈ C^{4n}."""
    Q = np.asarray(Q, dtype=complex)
    n = Q.shape[0]
    P = np.linalg.inv(np.conj(Q)).T
    z = np.asarray(z, dtype=complex)
    return np.concatenate([Q @ z[:n], Q @ z[n:2 * n], P @ z[2 * n:3 * n], P @ z[3 * n:]])


def check_phiQ_in_O(Q, tol: float = 1e-10) -> bool:
    """Whether the block map of Q preserves the quadratic term δ_ab z^a z̄^{b+2n}.

    Exact (symbolic substitution) for Gaussian-rational Q, numeric otherwise.
    """
    if isinstance(Q, ExactMatrix) or (isinstance(Q, (list, tuple)) and all(
            not isinstance(x, (float, complex)) for r in Q for x in r)):
        Qm = Q if isinstance(Q, ExactMatrix) else ExactMatrix(Q)
        if Qm.rows != Qm.cols:
            raise DimensionError("Q must be square")
        Pbar = Qm.inverse().transpose()  # conj(P) = (Q^{-1})^T
        n = Qm.rows
        chart = Chart.holomorphic(4 * n)
        z, w, V = chart.coords, chart.conj_coords, chart.variables
        q = MultiPoly.zero(V)
        for a in range(2 * n):
            q = q + MultiPoly.var(z[a], V) * MultiPoly.var(w[a + 2 * n], V)
        subst = {}
        for blk in range(4):
            M = Qm if blk < 2 else None
            for i in range(n):
                A = blk * n + i
                if blk < 2:
                    subst[z[A]] = sum((MultiPoly.var(z[blk * n + k], V) * M[i, k] for k in range(n)), MultiPoly.zero(V))
                    subst[w[A]] = sum((MultiPoly.var(w[blk * n + k], V) * M[i, k].conjugate() for k in range(n)),
                                      MultiPoly.zero(V))
                else:
                    subst[w[A]] = sum((MultiPoly.var(w[blk * n + k], V) * Pbar[i, k] for k in range(n)), MultiPoly.zero(V))
                    subst[z[A]] = sum((MultiPoly.var(z[blk * n + k], V) * Pbar[i, k].conjugate() for k in range(n)),
                                      MultiPoly.zero(V))
        return q.substitute(subst, V) == q
    Qn = np.asarray(Q, dtype=complex)
    if abs(np.linalg.det(Qn)) < 1e-300 or np.linalg.matrix_rank(Qn) < Qn.shape[0]:
        raise SingularMatrixError("Q is singular", int(np.linalg.matrix_rank(Qn)))
    P = np.linalg.inv(np.conj(Qn)).T
    return bool(np.max(np.abs(P.conj().T @ Qn - np.eye(Qn.shape[0]))) <= tol)
