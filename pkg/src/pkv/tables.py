"""Closed-form component tables for the model metrics, written out term by
term (0-based indices) so the engine output can be compared against them.
"""

from __future__ import annotations

from .exact import GaussianRational, MultiPoly
from .models import SigmaMatrix
from .tensor import LOWER, LOWER_BAR, UPPER, Chart, TensorField

TWO = GaussianRational(2)


def _acc(store: dict, idx: tuple, p: MultiPoly) -> None:
    if p.terms:
        store[idx] = store[idx] + p if idx in store else p


def _mono(chart: Chart, coef, *names: str) -> MultiPoly:
    p = chart.const(coef)
    for name in names:
        p = p * MultiPoly.var(name, chart.variables)
    return p


def _ranges(n: int):
    r = range(n)
    return ((i, j, k, l) for i in r for j in r for k in r for l in r)


# complex model ------------------------------------------------------------


def complex_metric(sigma: SigmaMatrix) -> TensorField:
    n = sigma.n
    ch = Chart.holomorphic(4 * n)
    z, w = ch.coords, ch.conj_coords
    out: dict = {}
    for a in range(2 * n):
        _acc(out, (a, a + 2 * n), ch.const(1))
        _acc(out, (a + 2 * n, a), ch.const(1))
    for i, j, k, l in _ranges(n):
        c = sigma[i, j] * sigma[k, l].conjugate()
        if not c:
            continue
        _acc(out, (j, l), _mono(ch, c, z[i + n], w[k + n]))
        _acc(out, (j, l + n), _mono(ch, c, z[i + n], w[k]))
        _acc(out, (j + n, l), _mono(ch, c, z[i], w[k + n]))
        _acc(out, (j + n, l + n), _mono(ch, c, z[i], w[k]))
    return TensorField(ch, (LOWER, LOWER_BAR), out)


def complex_christoffel(sigma: SigmaMatrix) -> TensorField:
    n = sigma.n
    ch = Chart.holomorphic(4 * n)
    w = ch.conj_coords
    out: dict = {}
    for i, j, k, l in _ranges(n):
        c = sigma[i, j] * sigma[k, l].conjugate()
        if not c:
            continue
        for lower in ((i + n, j), (j, i + n)):
            _acc(out, (l + 2 * n,) + lower, _mono(ch, c, w[k + n]))
            _acc(out, (l + 3 * n,) + lower, _mono(ch, c, w[k]))
    return TensorField(ch, (UPPER, LOWER, LOWER), out)


def complex_mixed_curvature(sigma: SigmaMatrix) -> TensorField:
    """K[(d, c, a, b)]: ∂_d-coefficient of R(∂_{ā}, ∂_b)∂_c, from the eight identities."""
    n = sigma.n
    ch = Chart.holomorphic(4 * n)
    out: dict = {}
    for i, j, k, l in _ranges(n):
        c = sigma[j, k] * sigma[i, l].conjugate()
        if not c:
            continue
        val = ch.const(c)
        _acc(out, (l + 3 * n, k + n, i, j), val)          # R(∂ī, ∂j)∂_{k+n}
        _acc(out, (l + 2 * n, k, i + n, j + n), val)      # R(∂_{ī+n}, ∂_{j+n})∂k
        _acc(out, (l + 3 * n, k, i, j + n), val)          # R(∂ī, ∂_{j+n})∂k
        _acc(out, (l + 2 * n, k + n, i + n, j), val)      # R(∂_{ī+n}, ∂j)∂_{k+n}
    return TensorField(ch, (UPPER, LOWER, LOWER_BAR, LOWER), out)


def complex_barred_curvature(sigma: SigmaMatrix) -> TensorField:
    """B[(d, c, a, b)]: ∂_{d̄}-coefficient of R(∂_{ā}, ∂_b)∂_{c̄}."""
    n = sigma.n
    ch = Chart.holomorphic(4 * n)
    out: dict = {}
    for i, j, k, l in _ranges(n):
        c = -(sigma[i, k].conjugate() * sigma[j, l])
        if not c:
            continue
        val = ch.const(c)
        _acc(out, (l + 3 * n, k + n, i, j), val)
        _acc(out, (l + 2 * n, k, i + n, j + n), val)
        _acc(out, (l + 2 * n, k + n, i, j + n), val)
        _acc(out, (l + 3 * n, k, i + n, j), val)
    return TensorField(ch, (UPPER, LOWER_BAR, LOWER_BAR, LOWER), out)


def barred_from_mixed(K: TensorField) -> TensorField:
    """Barred components implied by conjugation and skew symmetry of R."""
    out = {(d, c, a, b): -p.conjugate() for (d, c, b, a), p in K.components.items()}
    return TensorField(K.chart, (UPPER, LOWER_BAR, LOWER_BAR, LOWER), out)


# real model ---------------------------------------------------------------


def real_metric(sigma: SigmaMatrix) -> TensorField:
    n = sigma.n
    ch = Chart.real(4 * n)
    x = ch.variables
    out: dict = {}
    for a in range(2 * n):
        _acc(out, (a, a + 2 * n), ch.const(1))
        _acc(out, (a + 2 * n, a), ch.const(1))
    for i, j, k, l in _ranges(n):
        c = sigma[i, j] * sigma[k, l]
        if not c:
            continue
        _acc(out, (j + n, l + n), _mono(ch, c, x[i], x[k]))
        _acc(out, (j + n, l), _mono(ch, c, x[i], x[k + n]))
        _acc(out, (l, j + n), _mono(ch, c, x[i], x[k + n]))
        _acc(out, (j, l), _mono(ch, c, x[i + n], x[k + n]))
    return TensorField(ch, (LOWER, LOWER), out)


def real_christoffel(sigma: SigmaMatrix) -> TensorField:
    n = sigma.n
    ch = Chart.real(4 * n)
    x = ch.variables
    out: dict = {}
    for i, j, k, l in _ranges(n):
        c = sigma[i, j] * sigma[k, l]
        if not c:
            continue
        for lower in ((i, j + n), (j + n, i)):
            _acc(out, (k + 2 * n,) + lower, _mono(ch, c, x[l + n]))
            _acc(out, (k + 3 * n,) + lower, _mono(ch, c, x[l]))
    return TensorField(ch, (UPPER, LOWER, LOWER), out)


def real_curvature(sigma: SigmaMatrix) -> TensorField:
    """R[(l, k, i, j)] from the listed identities, skew in (i, j)."""
    n = sigma.n
    ch = Chart.real(4 * n)
    out: dict = {}

    def put(l, k, i, j, c):
        if c:
            _acc(out, (l, k, i, j), ch.const(c))
            _acc(out, (l, k, j, i), ch.const(-c))

    for i, j, k, l in _ranges(n):
        skew = sigma[l, i] * sigma[j, k] - sigma[l, j] * sigma[i, k]
        if i < j:
            put(l + 2 * n, k, i + n, j + n, skew)    # R(∂_{i+n}, ∂_{j+n})∂k
            put(l + 3 * n, k + n, i, j, skew)        # R(∂i, ∂j)∂_{k+n}
        put(l + 3 * n, k, i, j + n, sigma[l, i] * sigma[j, k])         # R(∂i, ∂_{j+n})∂k
        put(l + 2 * n, k + n, i, j + n, -(sigma[l, j] * sigma[i, k]))  # R(∂i, ∂_{j+n})∂_{k+n}
    return TensorField(ch, (UPPER, LOWER, LOWER, LOWER), out)


def hessian_metric(sigma: SigmaMatrix) -> TensorField:
    n = sigma.n
    ch = Chart.real(4 * n)
    x = ch.variables
    out: dict = {}
    for a in range(2 * n):
        _acc(out, (a, a + 2 * n), ch.const(1))
        _acc(out, (a + 2 * n, a), ch.const(1))
    for i, j, k, l in _ranges(n):
        c = TWO * sigma[i, j] * sigma[k, l]
        mixed = TWO * (sigma[j, l] * sigma[i, k] + sigma[i, j] * sigma[k, l])
        if c:
            _acc(out, (j, l), _mono(ch, c, x[i + n], x[k + n]))
            _acc(out, (j + n, l + n), _mono(ch, c, x[i], x[k]))
        if mixed:
            _acc(out, (j, l + n), _mono(ch, mixed, x[i + n], x[k]))
            _acc(out, (l + n, j), _mono(ch, mixed, x[i + n], x[k]))
    return TensorField(ch, (LOWER, LOWER), out)


# four-dimensional model ---------------------------------------------------


def frances_curvature() -> TensorField:
    """R(∂1, ∂2)∂1 = ∂4 and R(∂1, ∂2)∂2 = -∂3, all else zero."""
    ch = Chart.real(4, prefix="y")
    one = ch.const(1)
    out = {(3, 0, 0, 1): one, (3, 0, 1, 0): -one, (2, 1, 0, 1): -one, (2, 1, 1, 0): one}
    return TensorField(ch, (UPPER, LOWER, LOWER, LOWER), out)


def tensor_difference(a: TensorField, b: TensorField):
    """First index where two tensors differ, with both values, or None."""
    keys = sorted(set(a.components) | set(b.components))
    for idx in keys:
        pa, pb = a[idx], b[idx]
        if pa != pb:
            return idx, str(pa), str(pb)
    return None
