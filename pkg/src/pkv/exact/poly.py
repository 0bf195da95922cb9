"""Sparse multivariate polynomials over the Gaussian rationals.

A polynomial lives in an ordered *variable universe*; terms map exponent
tuples (one entry per universe variable) to nonzero coefficients.
Holomorphic variables ``z<k>`` and their conjugates ``w<k>`` are treated as
independent formal symbols; :meth:`MultiPoly.conjugate` swaps them.
"""

from __future__ import annotations

import numbers
from typing import Iterable, Mapping

from gmpy2 import mpq

from ..errors import MissingAssignmentError, UnknownVariableError
from .gaussian import ONE, ZERO, GaussianRational

__all__ = ["MultiPoly", "conjugate_name", "poly_arith", "make_variables"]


def conjugate_name(name: str) -> str:
    """``z3`` <-> ``w3``; every other variable is real and maps to itself."""
    if name.startswith("z") and name[1:].isdigit():
        return "w" + name[1:]
    if name.startswith("w") and name[1:].isdigit():
        return "z" + name[1:]
    return name


def make_variables(prefix: str, count: int, start: int = 1) -> tuple[str, ...]:
    return tuple(f"{prefix}{k}" for k in range(start, start + count))


def _coef(value) -> GaussianRational:
    if isinstance(value, GaussianRational):
        return value
    return GaussianRational.coerce(value)


class MultiPoly:
    """Immutable sparse polynomial with Gaussian-rational coefficients."""

    __slots__ = ("variables", "terms", "_index")

    def __init__(self, variables: Iterable[str], terms: Mapping[tuple, object] | None = None):
        self.variables = tuple(variables)
        if len(set(self.variables)) != len(self.variables):
            raise ValueError(f"duplicate variable names in {self.variables}")
        self._index = None
        clean = {}
        nv = len(self.variables)
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != nv or any(e < 0 for e in exps):
                raise ValueError(f"bad exponent tuple {exps} for {nv} variables")
            c = _coef(c)
            if c:
                clean[exps] = clean.get(exps, ZERO) + c
                if not clean[exps]:
                    del clean[exps]
        self.terms = clean

    @classmethod
    def _raw(cls, variables: tuple, terms: dict) -> "MultiPoly":
        obj = object.__new__(cls)
        obj.variables = variables
        obj.terms = terms
        obj._index = None
        return obj

    # constructors -------------------------------------------------------

    @classmethod
    def zero(cls, variables: Iterable[str]) -> "MultiPoly":
        return cls._raw(tuple(variables), {})

    @classmethod
    def constant(cls, value, variables: Iterable[str]) -> "MultiPoly":
        variables = tuple(variables)
        c = _coef(value)
        return cls._raw(variables, {(0,) * len(variables): c} if c else {})

    @classmethod
    def var(cls, name: str, variables: Iterable[str]) -> "MultiPoly":
        variables = tuple(variables)
        if name not in variables:
            raise UnknownVariableError(name)
        exps = tuple(1 if v == name else 0 for v in variables)
        return cls._raw(variables, {exps: ONE})

    @classmethod
    def monomial(cls, coefficient, powers: Mapping[str, int], variables: Iterable[str]) -> "MultiPoly":
        variables = tuple(variables)
        for v in powers:
            if v not in variables:
                raise UnknownVariableError(v)
        exps = tuple(int(powers.get(v, 0)) for v in variables)
        return cls(variables, {exps: coefficient})

    # universe handling --------------------------------------------------

    def index_of(self, name: str) -> int:
        if self._index is None:
            self._index = {v: k for k, v in enumerate(self.variables)}
        try:
            return self._index[name]
        except KeyError:
            raise UnknownVariableError(name) from None

    def with_variables(self, variables: Iterable[str]) -> "MultiPoly":
        """Re-express in a (super)set universe. Variables in use must survive."""
        variables = tuple(variables)
        if variables == self.variables:
            return self
        pos = {v: k for k, v in enumerate(variables)}
        used = self.used_variables()
        missing = [v for v in used if v not in pos]
        if missing:
            raise UnknownVariableError(missing[0])
        nv = len(variables)
        mapping = [(pos[v], k) for k, v in enumerate(self.variables) if v in pos]
        terms = {}
        for exps, c in self.terms.items():
            new = [0] * nv
            for dst, src in mapping:
                new[dst] = exps[src]
            terms[tuple(new)] = c
        return MultiPoly._raw(variables, terms)

    def _align(self, other: "MultiPoly") -> tuple["MultiPoly", "MultiPoly"]:
        if self.variables == other.variables:
            return self, other
        merged = list(self.variables)
        seen = set(merged)
        for v in other.variables:
            if v not in seen:
                merged.append(v)
                seen.add(v)
        return self.with_variables(merged), other.with_variables(merged)

    def _lift(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            return other
        return MultiPoly.constant(other, self.variables)

    # arithmetic ---------------------------------------------------------

    def __add__(self, other):
        other = self._lift(other)
        a, b = self._align(other)
        if len(a.terms) < len(b.terms):
            a, b = b, a
        terms = dict(a.terms)
        for exps, c in b.terms.items():
            s = terms.get(exps)
            if s is None:
                terms[exps] = c
            else:
                s = s + c
                if s:
                    terms[exps] = s
                else:
                    del terms[exps]
        return MultiPoly._raw(a.variables, terms)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            c = _coef(other)
            if not c:
                return MultiPoly.zero(self.variables)
            return MultiPoly._raw(self.variables, {e: v * c for e, v in self.terms.items()})
        a, b = self._align(other)
        terms: dict = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                s = terms.get(e)
                terms[e] = c1 * c2 if s is None else s + c1 * c2
        return MultiPoly._raw(a.variables, {e: c for e, c in terms.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, MultiPoly):
            if not other.is_constant():
                raise TypeError("division by a non-constant polynomial")
            other = other.constant_value()
        return self * _coef(other).inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("polynomial powers must be nonnegative integers")
        result = MultiPoly.constant(1, self.variables)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # calculus and involution -------------------------------------------

    def partial(self, name: str) -> "MultiPoly":
        """Formal partial derivative; conjugate variables are independent."""
        k = self.index_of(name)
        terms = {}
        for exps, c in self.terms.items():
            e = exps[k]
            if e:
                new = exps[:k] + (e - 1,) + exps[k + 1:]
                terms[new] = c * e
        return MultiPoly._raw(self.variables, terms)

    def conjugate(self) -> "MultiPoly":
        """Swap each ``z<k>`` with ``w<k>`` and conjugate the coefficients.

        The image is expressed in the same universe when it is closed under
        the swap, otherwise in the universe of swapped names.
        """
        swapped = tuple(conjugate_name(v) for v in self.variables)
        pos = {v: k for k, v in enumerate(self.variables)}
        if set(swapped) == set(self.variables):
            perm = [pos[conjugate_name(v)] for v in self.variables]
            terms = {tuple(exps[p] for p in perm): c.conjugate() for exps, c in self.terms.items()}
            return MultiPoly._raw(self.variables, terms)
        terms = {exps: c.conjugate() for exps, c in self.terms.items()}
        return MultiPoly._raw(swapped, terms)

    def conjugate_coefficients(self) -> "MultiPoly":
        """Conjugate coefficients only (the involution for real variables)."""
        return MultiPoly._raw(self.variables, {e: c.conjugate() for e, c in self.terms.items()})

    def real_part(self) -> "MultiPoly":
        return MultiPoly._raw(self.variables, {e: GaussianRational._make(c.re, mpq(0))
                                               for e, c in self.terms.items() if c.re})

    def imag_part(self) -> "MultiPoly":
        return MultiPoly._raw(self.variables, {e: GaussianRational._make(c.im, mpq(0))
                                               for e, c in self.terms.items() if c.im})

    def has_real_coefficients(self) -> bool:
        return all(not c.im for c in self.terms.values())

    # substitution and evaluation ----------------------------------------

    def substitute(self, mapping: Mapping[str, "MultiPoly"], variables: Iterable[str] | None = None) -> "MultiPoly":
        """Replace variables by polynomials; unmapped variables stay themselves.

        ``variables`` fixes the target universe (default: union of the images'
        universes and the unmapped variables).
        """
        if variables is None:
            target: list[str] = []
            seen: set[str] = set()
            for v in self.variables:
                img = mapping.get(v)
                names = img.variables if isinstance(img, MultiPoly) else ((v,) if img is None else ())
                for name in names:
                    if name not in seen:
                        seen.add(name)
                        target.append(name)
            variables = tuple(target)
        variables = tuple(variables)
        used = set(self.used_variables())
        images = []
        for v in self.variables:
            img = mapping.get(v)
            if v not in used:
                img = None
            elif img is None:
                img = MultiPoly.var(v, variables)
            elif not isinstance(img, MultiPoly):
                img = MultiPoly.constant(img, variables)
            else:
                img = img.with_variables(variables)
            images.append(img)
        cache: dict[tuple[int, int], MultiPoly] = {}

        def power(k: int, e: int) -> MultiPoly:
            key = (k, e)
            if key not in cache:
                cache[key] = images[k] if e == 1 else power(k, e - 1) * images[k]
            return cache[key]

        result = MultiPoly.zero(variables)
        for exps, c in self.terms.items():
            term = MultiPoly.constant(c, variables)
            for k, e in enumerate(exps):
                if e:
                    term = term * power(k, e)
            result = result + term
        return result

    def evaluate(self, point: Mapping[str, object]):
        """Evaluate at an assignment.

        Exact (GaussianRational) when every assigned value used is exact,
        floating (float or complex) otherwise.
        """
        used = [k for k in range(len(self.variables)) if any(exps[k] for exps in self.terms)]
        values = {}
        exact = True
        for k in used:
            name = self.variables[k]
            if name not in point:
                raise MissingAssignmentError(name)
            val = point[name]
            if isinstance(val, (float, complex)):
                exact = False
            elif not isinstance(val, GaussianRational):
                if isinstance(val, numbers.Number) and not isinstance(val, numbers.Rational):
                    exact = False
                else:
                    val = GaussianRational.coerce(val)
            values[k] = val
        if exact:
            total = ZERO
            for exps, c in self.terms.items():
                term = c
                for k, e in enumerate(exps):
                    if e:
                        term = term * values[k] ** e
                total = total + term
            return total
        fvals = {}
        for k, v in values.items():
            if isinstance(v, complex) or (isinstance(v, GaussianRational) and v.im):
                fvals[k] = complex(v)
            else:
                fvals[k] = float(v)
        total = 0.0
        for exps, c in self.terms.items():
            term = complex(c) if c.im else float(c.re)
            for k, e in enumerate(exps):
                if e:
                    term = term * fvals[k] ** e
            total = total + term
        if isinstance(total, complex) and total.imag == 0:
            return total.real
        return total

    # inspection ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_value(self) -> GaussianRational:
        """Constant term (the full value for constant polynomials)."""
        return self.terms.get((0,) * len(self.variables), ZERO)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, name: str) -> int:
        k = self.index_of(name)
        return max((e[k] for e in self.terms), default=-1)

    def used_variables(self) -> tuple[str, ...]:
        return tuple(v for k, v in enumerate(self.variables) if any(e[k] for e in self.terms))

    def coefficient(self, powers: Mapping[str, int]) -> GaussianRational:
        exps = tuple(int(powers.get(v, 0)) for v in self.variables)
        for v in powers:
            self.index_of(v)
        return self.terms.get(exps, ZERO)

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            a, b = self._align(other)
            return a.terms == b.terms
        try:
            c = _coef(other)
        except TypeError:
            return NotImplemented
        return self.terms == ({(0,) * len(self.variables): c} if c else {})

    __hash__ = None

    def __repr__(self):
        return f"MultiPoly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for exps in sorted(self.terms, key=lambda e: (-sum(e), tuple(-x for x in e))):
            c = self.terms[exps]
            mono = "*".join(f"{v}^{e}" if e > 1 else v for v, e in zip(self.variables, exps) if e)
            cs = str(c)
            if c.re and c.im:
                cs = f"({cs})"
            if not mono:
                parts.append(cs)
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{cs}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def poly_arith(p: MultiPoly, q: MultiPoly, op: str) -> MultiPoly:
    """Dispatch ``add``/``sub``/``mul`` by name."""
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    raise ValueError(f"unknown polynomial operation {op!r}")
