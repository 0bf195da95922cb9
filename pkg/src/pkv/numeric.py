"""Floating-point companions to the exact engine.

Polynomial tensors are compiled into a monomial table so that many
components can be evaluated in one matrix product. The finite-difference
routines work on any callable metric and serve as an independent check of
the exact curvature pipeline.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .errors import DimensionError
from .tensor import HOLOMORPHIC, MetricModel, TensorField


class CompiledTensor:
    """Evaluate all components of a TensorField at float points at once."""

    def __init__(self, t: TensorField, variables: Sequence[str] | None = None):
        self.shape = t.shape
        self.variables = tuple(variables or t.chart.variables)
        pos = {v: k for k, v in enumerate(self.variables)}
        monos: dict[tuple, int] = {}
        rows, cols, vals = [], [], []
        self.indices = sorted(t.components)
        for r, idx in enumerate(self.indices):
            p = t.components[idx]
            for exps, c in p.terms.items():
                key = [0] * len(self.variables)
                for name, e in zip(p.variables, exps):
                    if e:
                        key[pos[name]] = e
                key = tuple(key)
                col = monos.setdefault(key, len(monos))
                rows.append(r)
                cols.append(col)
                vals.append(complex(c))
        self.exponents = np.array(list(monos), dtype=np.int64).reshape(len(monos), len(self.variables))
        coef = np.zeros((len(self.indices), len(monos)), dtype=complex)
        np.add.at(coef, (rows, cols), vals)
        self.real = bool(np.all(coef.imag == 0))
        self.coef = coef.real if self.real else coef
        self.flat = np.ravel_multi_index(tuple(np.array(self.indices, dtype=np.int64).T), self.shape) \
            if self.indices else np.zeros(0, dtype=np.int64)

    def monomials(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x)
        if x.shape[-1] != len(self.variables):
            raise DimensionError(f"expected {len(self.variables)} coordinates")
        if not len(self.exponents):
            return np.zeros(x.shape[:-1] + (0,), dtype=x.dtype)
        return np.prod(x[..., None, :] ** self.exponents, axis=-1)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        """Dense tensor at a point (or a batch of points along leading axes)."""
        x = np.asarray(x)
        vals = self.monomials(x) @ self.coef.T
        dtype = float if self.real and not np.iscomplexobj(x) else complex
        out = np.zeros(x.shape[:-1] + (int(np.prod(self.shape)),), dtype=dtype)
        out[..., self.flat] = vals
        return out.reshape(x.shape[:-1] + self.shape)


def christoffel_function(m: MetricModel, gamma: TensorField) -> Callable[[np.ndarray], np.ndarray]:
    """x -> Γ^k_{ij}(x) as a dense float array on a real chart."""
    if m.chart.kind == HOLOMORPHIC:
        raise ValueError("numeric Christoffels are for real charts")
    return CompiledTensor(gamma)


def metric_function(m: MetricModel) -> Callable[[np.ndarray], np.ndarray]:
    if m.chart.kind == HOLOMORPHIC:
        raise ValueError("numeric metric evaluation is for real charts")
    return CompiledTensor(m.g)


# finite differences -------------------------------------------------------

_STENCIL = ((-2, 1 / 12), (-1, -8 / 12), (1, 8 / 12), (2, -1 / 12))


def fd_derivative(f: Callable[[np.ndarray], np.ndarray], x: np.ndarray, h: float) -> np.ndarray:
    """Five-point central differences; the new axis (derivative index) is first."""
    x = np.asarray(x, dtype=float)
    out = []
    for k in range(len(x)):
        acc = 0.0
        for s, w in _STENCIL:
            y = x.copy()
            y[k] += s * h
            acc = acc + w * np.asarray(f(y))
        out.append(acc / h)
    return np.array(out)


def fd_christoffel(metric: Callable[[np.ndarray], np.ndarray], x: np.ndarray, h: float = 1e-3) -> np.ndarray:
    """Γ^k_{ij} from finite differences of a metric function (indices k, i, j)."""
    g = np.asarray(metric(x), dtype=float)
    dg = fd_derivative(metric, x, h)  # dg[l, i, j] = ∂_l g_ij
    first = 0.5 * (np.einsum("ijl->lij", dg) + np.einsum("jil->lij", dg) - dg)
    # first[l, i, j] = ½(∂_i g_jl + ∂_j g_il - ∂_l g_ij)
    return np.einsum("kl,lij->kij", np.linalg.inv(g), first)


def fd_riemann(metric: Callable[[np.ndarray], np.ndarray], x: np.ndarray, h: float = 1e-3) -> np.ndarray:
    """R^l_{kij} (R(∂_i, ∂_j)∂_k = R^l_{kij} ∂_l) by nested finite differences."""
    x = np.asarray(x, dtype=float)
    gam = fd_christoffel(metric, x, h)
    dgam = fd_derivative(lambda y: fd_christoffel(metric, y, h), x, h)  # dgam[i, l, j, k] = ∂_i Γ^l_{jk}
    r = np.einsum("iljk->lkij", dgam) - np.einsum("jlik->lkij", dgam)
    r += np.einsum("lim,mjk->lkij", gam, gam) - np.einsum("ljm,mik->lkij", gam, gam)
    return r


def fd_ricci(metric: Callable[[np.ndarray], np.ndarray], x: np.ndarray, h: float = 1e-3) -> np.ndarray:
    return np.einsum("ikij->kj", fd_riemann(metric, x, h))


def conformally_flat_sphere_metric(x: np.ndarray) -> np.ndarray:
    """(1 + |x|²)^{-2} δ: the stereographic round metric up to a constant."""
    x = np.asarray(x, dtype=float)
    return np.eye(len(x)) / (1.0 + x @ x) ** 2


def relative_error(a: np.ndarray, b: np.ndarray) -> float:
    a, b = np.asarray(a), np.asarray(b)
    scale = max(float(np.max(np.abs(b), initial=0.0)), 1e-300)
    return float(np.max(np.abs(a - b), initial=0.0) / scale)
