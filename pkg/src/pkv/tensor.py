"""Chart-level tensor calculus with polynomial components.

Tensors are stored sparsely: a dict from index tuples to nonzero
:class:`MultiPoly` components. Index conventions:

* ``Gamma[(k, i, j)]`` is the Christoffel symbol Γ^k_{ij}.
* ``R[(l, k, i, j)]`` is R^l_{kij}, i.e. R(∂_i, ∂_j)∂_k = R^l_{kij} ∂_l with
  R(X, Y) = ∇_X∇_Y − ∇_Y∇_X − ∇_[X,Y].
* On holomorphic-pair charts only the mixed curvature is stored:
  ``K[(d, c, a, b)]`` is the ∂_d-coefficient of R(∂_{\bar a}, ∂_b)∂_c.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import DimensionError, PKVError
from .exact import GaussianRational, MultiPoly, make_variables, poly_det
from .exact.linalg import poly_identity_check

REAL = "real"
HOLOMORPHIC = "holomorphic-pair"

UPPER, LOWER, LOWER_BAR = "u", "l", "lb"


@dataclass(frozen=True)
class Chart:
    """Coordinates of a chart; ``params`` are extra formal symbols (e.g. scales)
    that may appear in components but are never differentiated."""

    dim: int
    kind: str
    variables: tuple[str, ...]
    params: tuple[str, ...] = ()

    def __post_init__(self):
        if self.dim < 1:
            raise DimensionError("chart dimension must be positive")
        if self.kind not in (REAL, HOLOMORPHIC):
            raise ValueError(f"unknown chart kind {self.kind!r}")
        expected = (2 * self.dim if self.kind == HOLOMORPHIC else self.dim) + len(self.params)
        if len(self.variables) != expected:
            raise DimensionError(f"{self.kind} chart of dim {self.dim} needs {expected} variables")
        if self.params and self.variables[-len(self.params):] != self.params:
            raise DimensionError("parameters must trail the coordinate variables")

    def with_params(self, names: Sequence[str]) -> "Chart":
        new = tuple(v for v in names if v not in self.variables)
        if not new:
            return self
        return Chart(self.dim, self.kind, self.variables + new, self.params + new)

    @classmethod
    def real(cls, dim: int, prefix: str = "x", names: Sequence[str] | None = None) -> "Chart":
        return cls(dim, REAL, tuple(names) if names else make_variables(prefix, dim))

    @classmethod
    def holomorphic(cls, dim: int) -> "Chart":
        return cls(dim, HOLOMORPHIC, make_variables("z", dim) + make_variables("w", dim))

    @property
    def coords(self) -> tuple[str, ...]:
        """Variables differentiated by the unbarred coordinate index."""
        return self.variables[: self.dim]

    @property
    def conj_coords(self) -> tuple[str, ...]:
        if self.kind != HOLOMORPHIC:
            raise PKVError("real charts have no conjugate coordinates")
        return self.variables[self.dim: 2 * self.dim]

    def zero(self) -> MultiPoly:
        return MultiPoly.zero(self.variables)

    def const(self, value) -> MultiPoly:
        return MultiPoly.constant(value, self.variables)

    def coord(self, k: int) -> MultiPoly:
        return MultiPoly.var(self.variables[k], self.variables)


class TensorField:
    """Sparse multi-index array of polynomials on a chart."""

    __slots__ = ("chart", "variance", "components")

    def __init__(self, chart: Chart, variance: Sequence[str], components: Mapping[tuple, MultiPoly] | None = None):
        self.chart = chart
        self.variance = tuple(variance)
        rank = len(self.variance)
        comps = {}
        for idx, p in (components or {}).items():
            idx = tuple(idx)
            if len(idx) != rank or any(not 0 <= k < chart.dim for k in idx):
                raise DimensionError(f"index {idx} out of range for shape {self.shape}")
            if p.terms:
                comps[idx] = p if p.variables == chart.variables else p.with_variables(chart.variables)
        self.components = comps

    @property
    def rank(self) -> int:
        return len(self.variance)

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.chart.dim,) * self.rank

    def __getitem__(self, idx) -> MultiPoly:
        if not isinstance(idx, tuple):
            idx = (idx,)
        return self.components.get(idx) or self.chart.zero()

    def items(self) -> Iterator[tuple[tuple, MultiPoly]]:
        return iter(sorted(self.components.items()))

    def __len__(self):
        return len(self.components)

    def is_zero(self) -> bool:
        return not self.components

    def first_nonzero(self) -> tuple[tuple, MultiPoly] | None:
        if not self.components:
            return None
        idx = min(self.components)
        return idx, self.components[idx]

    def __sub__(self, other: "TensorField") -> "TensorField":
        return self + other.scale(-1)

    def __add__(self, other: "TensorField") -> "TensorField":
        if self.shape != other.shape:
            raise DimensionError("tensor shapes differ")
        chart = self.chart
        if chart != other.chart:
            chart = chart.with_params(other.chart.params)
        comps = dict(self.components)
        for idx, p in other.components.items():
            comps[idx] = comps[idx] + p if idx in comps else p
        return TensorField(chart, self.variance, comps)

    def on_chart(self, chart: Chart) -> "TensorField":
        """The same components re-expressed on a chart with more parameters."""
        return TensorField(chart, self.variance, self.components)

    def scale(self, c) -> "TensorField":
        return TensorField(self.chart, self.variance, {k: v * c for k, v in self.components.items()})

    def equals(self, other: "TensorField") -> bool:
        return (self - other).is_zero()

    def evaluate(self, point: Mapping[str, object]) -> dict[tuple, object]:
        return {idx: p.evaluate(point) for idx, p in self.components.items()}

    def to_dense(self, point: Mapping[str, object], dtype=complex) -> np.ndarray:
        out = np.zeros(self.shape, dtype=dtype)
        for idx, p in self.components.items():
            out[idx] = complex(p.evaluate(point)) if dtype is complex else float(p.evaluate(point))
        return out

    def max_degree(self) -> int:
        return max((p.degree() for p in self.components.values()), default=-1)

    def __repr__(self):
        return f"TensorField({self.variance}, dim={self.chart.dim}, nnz={len(self.components)})"


def matrix_tensor(chart: Chart, rows: Sequence[Sequence[MultiPoly]], variance=(LOWER, LOWER)) -> TensorField:
    comps = {(i, j): p for i, r in enumerate(rows) for j, p in enumerate(r) if p.terms}
    return TensorField(chart, variance, comps)


def tensor_matrix(t: TensorField) -> list[list[MultiPoly]]:
    n = t.chart.dim
    return [[t[(i, j)] for j in range(n)] for i in range(n)]


class MetricModel:
    """A chart with metric components, an exact inverse and provenance.

    For holomorphic-pair charts ``g[(a, b)]`` is h_{a \\bar b} (first index
    holomorphic, second antiholomorphic) and ``g_inv`` is the matrix inverse
    with Σ_c h_{a c} h^{c b} = δ_a^b.
    """

    def __init__(self, chart: Chart, g: TensorField, g_inv: TensorField, provenance: str,
                 meta: Mapping | None = None, verify: bool = True):
        self.chart = chart
        self.g = g
        self.g_inv = g_inv
        self.provenance = provenance
        self.meta = dict(meta or {})
        if verify:
            self.verify()

    @property
    def dim(self) -> int:
        return self.chart.dim

    @property
    def is_holomorphic(self) -> bool:
        return self.chart.kind == HOLOMORPHIC

    def verify(self) -> None:
        """Check symmetry (or Hermitian symmetry) and g·g⁻¹ = δ exactly."""
        n = self.dim
        for (i, j), p in self.g.components.items():
            partner = self.g[(j, i)]
            if self.is_holomorphic:
                if partner != p.conjugate():
                    raise PKVError(f"{self.provenance}: h is not Hermitian at {(i, j)}")
            elif partner != p:
                raise PKVError(f"{self.provenance}: g is not symmetric at {(i, j)}")
        bad = poly_identity_check(tensor_matrix(self.g), tensor_matrix(self.g_inv))
        if bad is not None:
            raise PKVError(f"{self.provenance}: g * g_inv differs from identity at {bad}")
        if n != self.g_inv.chart.dim:
            raise DimensionError("inverse metric on a different chart")

    def matrix(self) -> list[list[MultiPoly]]:
        return tensor_matrix(self.g)

    def __repr__(self):
        return f"MetricModel({self.provenance!r}, {self.chart.kind}, dim={self.dim})"


# ---------------------------------------------------------------------------
# connection and curvature


def _derivatives(p: MultiPoly, names: Sequence[str]) -> Iterator[tuple[int, MultiPoly]]:
    used = set(p.used_variables())
    for k, v in enumerate(names):
        if v in used:
            d = p.partial(v)
            if d.terms:
                yield k, d


def _acc(store: dict, idx: tuple, p: MultiPoly) -> None:
    if idx in store:
        store[idx] = store[idx] + p
    else:
        store[idx] = p


def levi_civita(m: MetricModel) -> TensorField:
    """Christoffel symbols Γ^k_{ij} (unbarred Kähler symbols on holomorphic charts)."""
    chart = m.chart
    n = chart.dim
    coords = chart.coords
    ginv_rows: dict[int, list[tuple[int, MultiPoly]]] = {}
    for (a, b), p in m.g_inv.components.items():
        ginv_rows.setdefault(a, []).append((b, p))
    out: dict[tuple, MultiPoly] = {}
    if chart.kind == HOLOMORPHIC:
        # Γ^C_{AB} = Σ_D ∂_A h_{BD} h^{DC}
        for (b, d), h in m.g.components.items():
            for a, dh in _derivatives(h, coords):
                for c, hinv in ginv_rows.get(d, ()):
                    _acc(out, (c, a, b), dh * hinv)
        return TensorField(chart, (UPPER, LOWER, LOWER), out)
    first: dict[tuple, MultiPoly] = {}
    half = GaussianRational(Fraction(1, 2))
    for (a, b), g_ab in m.g.components.items():
        for i, d in _derivatives(g_ab, coords):
            d = d * half
            _acc(first, (b, i, a), d)   # ∂_i g_{jl} with j=a, l=b
            _acc(first, (b, a, i), d)   # ∂_j g_{il} with i=a, l=b
            _acc(first, (i, a, b), -d)  # -∂_l g_{ij}
    for (l, i, j), p in first.items():
        if not p.terms:
            continue
        for k, ginv in ginv_rows.get(l, ()):
            # g^{kl} = g^{lk}
            _acc(out, (k, i, j), ginv * p)
    return TensorField(chart, (UPPER, LOWER, LOWER), out)


def riemann(m: MetricModel, gamma: TensorField | None = None) -> TensorField:
    """Curvature R^l_{kij}; on holomorphic charts the mixed part K^d_{c a b}."""
    if gamma is None:
        gamma = levi_civita(m)
    chart = m.chart
    out: dict[tuple, MultiPoly] = {}
    if chart.kind == HOLOMORPHIC:
        # R(∂_{\bar a}, ∂_b)∂_c = ∂_{\bar a} Γ^d_{bc} ∂_d
        for (d, b, c), p in gamma.components.items():
            for a, dp in _derivatives(p, chart.conj_coords):
                _acc(out, (d, c, a, b), dp)
        return TensorField(chart, (UPPER, LOWER, LOWER_BAR, LOWER), out)
    coords = chart.coords
    by_upper: dict[int, list[tuple[int, int, MultiPoly]]] = {}
    for (l, a, b), p in gamma.components.items():
        by_upper.setdefault(l, []).append((a, b, p))
        for i, dp in _derivatives(p, coords):
            _acc(out, (l, b, i, a), dp)    # ∂_i Γ^l_{jk}, j=a, k=b
            _acc(out, (l, b, a, i), -dp)   # -∂_j Γ^l_{ik}, i=a, k=b
    for (l, i, mm), p in gamma.components.items():
        for j, k, q in by_upper.get(mm, ()):
            prod = p * q
            _acc(out, (l, k, i, j), prod)
            _acc(out, (l, k, j, i), -prod)
    return TensorField(chart, (UPPER, LOWER, LOWER, LOWER), out)


def ricci(m: MetricModel, riem: TensorField | None = None) -> TensorField:
    """Ric_{kj} = R^i_{kij}; on holomorphic charts Ric(∂_{\\bar a}, ∂_c) = -Σ_d K^d_{c a d}."""
    if riem is None:
        riem = riemann(m)
    out: dict[tuple, MultiPoly] = {}
    if m.chart.kind == HOLOMORPHIC:
        for (d, c, a, b), p in riem.components.items():
            if d == b:
                _acc(out, (a, c), -p)
        return TensorField(m.chart, (LOWER_BAR, LOWER), out)
    for (i, k, i2, j), p in riem.components.items():
        if i == i2:
            _acc(out, (k, j), p)
    return TensorField(m.chart, (LOWER, LOWER), out)


def det_metric(m: MetricModel) -> MultiPoly:
    return poly_det(m.matrix())


def ricci_logdet(m: MetricModel) -> TensorField | None:
    """Ricci form from Ric(∂_a, ∂_{\\bar b}) = -∂_a ∂_{\\bar b} log det h.

    Only decided here when det h is a nonzero constant (then Ric = 0);
    returns None otherwise.
    """
    if m.chart.kind != HOLOMORPHIC:
        raise PKVError("the log-det identity applies to holomorphic-pair charts")
    det = det_metric(m)
    if det.is_constant() and det.terms:
        return TensorField(m.chart, (LOWER_BAR, LOWER), {})
    return None


def scalar_curvature(m: MetricModel, ric: TensorField) -> MultiPoly:
    total = m.chart.zero()
    for (k, j), p in ric.components.items():
        ginv = m.g_inv[(k, j)]
        if ginv.terms:
            total = total + ginv * p
    return total


def lower_riemann(m: MetricModel, riem: TensorField) -> TensorField:
    """R_{abcd} = g(R(∂_a, ∂_b)∂_c, ∂_d) = g_{dm} R^m_{cab}."""
    g_rows: dict[int, list[tuple[int, MultiPoly]]] = {}
    for (mm, d), p in m.g.components.items():
        g_rows.setdefault(mm, []).append((d, p))
    out: dict[tuple, MultiPoly] = {}
    for (mm, c, a, b), p in riem.components.items():
        for d, g in g_rows.get(mm, ()):
            _acc(out, (a, b, c, d), g * p)
    return TensorField(m.chart, (LOWER,) * 4, out)


def kulkarni_nomizu(h: TensorField, k: TensorField) -> TensorField:
    """(h ⊙ k)_{abcd} = h_ad k_bc + h_bc k_ad - h_ac k_bd - h_bd k_ac."""
    out: dict[tuple, MultiPoly] = {}
    for (x, y), p in h.components.items():
        for (u, v), q in k.components.items():
            pq = p * q
            _acc(out, (x, u, v, y), pq)
            _acc(out, (u, x, y, v), pq)
            _acc(out, (x, u, y, v), -pq)
            _acc(out, (u, x, v, y), -pq)
    return TensorField(h.chart, (LOWER,) * 4, out)


def weyl(m: MetricModel, riem: TensorField | None = None, ric: TensorField | None = None) -> TensorField:
    """Fully lowered Weyl tensor W = Rm - P ⊙ g with P the Schouten tensor."""
    if m.chart.kind != REAL:
        raise PKVError("Weyl tensor is computed on real charts; realify first")
    n = m.dim
    if n < 4:
        raise DimensionError(f"Weyl tensor needs dimension >= 4, got {n}")
    if riem is None:
        riem = riemann(m)
    if ric is None:
        ric = ricci(m, riem)
    rm = lower_riemann(m, riem)
    if ric.is_zero():
        return rm
    s = scalar_curvature(m, ric)
    shift = m.g.components
    p_comps = dict(ric.components)
    coef = s * GaussianRational(Fraction(-1, 2 * (n - 1)))
    for idx, g in shift.items():
        _acc(p_comps, idx, g * coef)
    schouten = TensorField(m.chart, (LOWER, LOWER), p_comps).scale(GaussianRational(Fraction(1, n - 2)))
    return rm - kulkarni_nomizu(schouten, m.g)


def covariant_derivative(m: MetricModel, t: TensorField, gamma: TensorField | None = None) -> TensorField:
    """∇t with the derivative index appended last: (∇t)_{...;m}."""
    if m.chart.kind != REAL:
        raise PKVError("covariant derivatives are taken on real charts; realify first")
    if any(v not in (UPPER, LOWER) for v in t.variance):
        raise PKVError("unsupported index type for a real chart")
    if gamma is None:
        gamma = levi_civita(m)
    coords = m.chart.coords
    # Γ^a_{mp} keyed by p (lower indices are symmetric)
    by_lower: dict[int, list[tuple[int, int, MultiPoly]]] = {}
    by_upper: dict[int, list[tuple[int, int, MultiPoly]]] = {}
    for (a, mm, p), q in gamma.components.items():
        by_lower.setdefault(p, []).append((a, mm, q))
        by_upper.setdefault(a, []).append((mm, p, q))
    out: dict[tuple, MultiPoly] = {}
    for idx, comp in t.components.items():
        for mm, d in _derivatives(comp, coords):
            _acc(out, idx + (mm,), d)
        for pos, var in enumerate(t.variance):
            if var == UPPER:
                for a, mm, q in by_lower.get(idx[pos], ()):
                    new = idx[:pos] + (a,) + idx[pos + 1:] + (mm,)
                    _acc(out, new, q * comp)
            else:
                for mm, b, q in by_upper.get(idx[pos], ()):
                    new = idx[:pos] + (b,) + idx[pos + 1:] + (mm,)
                    _acc(out, new, -(q * comp))
    return TensorField(m.chart, t.variance + (LOWER,), out)


def scalar_gradient(m: MetricModel, f: MultiPoly) -> TensorField:
    """The 1-form df."""
    return TensorField(m.chart, (LOWER,), {(k,): d for k, d in _derivatives(f, m.chart.coords)})


# ---------------------------------------------------------------------------
# pullbacks and numerics


def pullback_metric(m: MetricModel, L: Sequence[Sequence]) -> TensorField:
    """(L*g)_{AB}(x) = L^C_A L^D_B g_{CD}(Lx) for a linear map x -> Lx.

    Entries of L may be exact scalars or polynomials in extra formal symbols
    (such as scale parameters); the result lives in the merged universe.
    On holomorphic-pair charts L acts on z and its conjugate acts on w.
    """
    n = m.dim
    if len(L) != n or any(len(r) != n for r in L):
        raise DimensionError(f"linear map must be {n}x{n}")
    extra: list[str] = []
    for r in L:
        for e in r:
            if isinstance(e, MultiPoly):
                for v in e.variables:
                    if v not in m.chart.variables and v not in extra:
                        extra.append(v)
    chart = m.chart.with_params(extra)
    universe = chart.variables

    def lift(e) -> MultiPoly:
        if isinstance(e, MultiPoly):
            return e.with_variables(universe)
        if isinstance(e, float):
            raise TypeError("float maps: use pullback_metric_numeric")
        return MultiPoly.constant(e, universe)

    Lp = [[lift(e) for e in r] for r in L]
    # formal parameters are real, so the conjugate map only conjugates coefficients
    Lbar = [[e.conjugate_coefficients() for e in r] for r in Lp] if m.chart.kind == HOLOMORPHIC else Lp
    coords = m.chart.coords
    subst = {coords[c]: _linear_image(Lp[c], coords, universe) for c in range(n)}
    if m.chart.kind == HOLOMORPHIC:
        conj = m.chart.conj_coords
        subst.update({conj[c]: _linear_image(Lbar[c], conj, universe) for c in range(n)})
    pulled = {idx: p.substitute(subst, universe) for idx, p in m.g.components.items()}
    out: dict[tuple, MultiPoly] = {}
    for (c, d), p in pulled.items():
        for a in range(n):
            la = Lp[c][a]
            if not la.terms:
                continue
            lap = la * p
            for b in range(n):
                lb = Lbar[d][b]
                if lb.terms:
                    _acc(out, (a, b), lap * lb)
    return TensorField(chart, (LOWER, LOWER), out)


def _linear_image(row: Sequence[MultiPoly], names: Sequence[str], universe) -> MultiPoly:
    total = MultiPoly.zero(universe)
    for coef, name in zip(row, names):
        if coef.terms:
            total = total + coef * MultiPoly.var(name, universe)
    return total


def metric_matrix_at(m: MetricModel, point: Sequence[float]) -> np.ndarray:
    """Real symmetric matrix of the metric at a real point.

    Holomorphic-pair models are realified numerically with the block rule
    G = [[Re H, Im H], [-Im H, Re H]] on coordinates (x, y), z = x + iy.
    """
    if m.chart.kind == REAL:
        pt = dict(zip(m.chart.variables, point))
        return m.g.to_dense(pt, dtype=float)
    n = m.dim
    point = np.asarray(point, dtype=float)
    if point.shape != (2 * n,):
        raise DimensionError(f"expected {2 * n} real coordinates (x then y)")
    zvals = point[:n] + 1j * point[n:]
    pt = dict(zip(m.chart.coords, zvals))
    pt.update(zip(m.chart.conj_coords, np.conj(zvals)))
    H = m.g.to_dense(pt, dtype=complex)
    return np.block([[H.real, H.imag], [-H.imag, H.real]])


@dataclass
class SignatureResult:
    point: tuple[float, ...]
    positive: int | None
    negative: int | None
    status: str = "ok"
    min_abs_eigenvalue: float = field(default=float("nan"))

    @property
    def signature(self) -> tuple[int, int] | None:
        return None if self.status != "ok" else (self.positive, self.negative)


def signature_at(m: MetricModel, points: Iterable[Sequence[float]], tol: float = 1e-9) -> list[SignatureResult]:
    """Eigenvalue sign counts of the metric at each point; near-zero -> indeterminate."""
    results = []
    for pt in points:
        G = metric_matrix_at(m, pt)
        if not np.allclose(G, G.T, atol=1e-12):
            raise PKVError("metric matrix is not symmetric at the sample point")
        ev = np.linalg.eigvalsh(G)
        mn = float(np.min(np.abs(ev)))
        if mn < tol:
            results.append(SignatureResult(tuple(map(float, pt)), None, None, "indeterminate", mn))
        else:
            results.append(SignatureResult(tuple(map(float, pt)), int(np.sum(ev > 0)), int(np.sum(ev < 0)), "ok", mn))
    return results
