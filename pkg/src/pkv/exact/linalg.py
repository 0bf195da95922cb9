"""Exact dense linear algebra over the Gaussian rationals.

Gaussian elimination with first-nonzero (leading coefficient) pivoting;
every entry stays in lowest terms, so results are exact. Matrices with
polynomial entries get a division-free determinant and plain products.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from ..errors import DimensionError, InconsistentSystemError, SingularMatrixError
from .gaussian import ONE, ZERO, GaussianRational
from .poly import MultiPoly

__all__ = [
    "ExactMatrix",
    "exact_linalg",
    "rref",
    "row_space_basis",
    "poly_det",
    "poly_matmul",
    "poly_identity_check",
]


def _g(x) -> GaussianRational:
    return x if isinstance(x, GaussianRational) else GaussianRational.coerce(x)


class ExactMatrix:
    """Immutable rows x cols matrix of GaussianRational entries."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, data: Iterable[Iterable]):
        entries = tuple(tuple(_g(x) for x in row) for row in data)
        if not entries or not entries[0]:
            raise DimensionError("matrix must have at least one row and column")
        width = len(entries[0])
        if any(len(r) != width for r in entries):
            raise DimensionError("ragged matrix rows")
        self.entries = entries
        self.rows = len(entries)
        self.cols = width

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "ExactMatrix":
        return cls([[ZERO] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls([[ONE if i == j else ZERO for j in range(n)] for i in range(n)])

    @classmethod
    def diag(cls, values: Sequence) -> "ExactMatrix":
        n = len(values)
        return cls([[_g(values[i]) if i == j else ZERO for j in range(n)] for i in range(n)])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def tolist(self) -> list[list[GaussianRational]]:
        return [list(r) for r in self.entries]

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(zip(*self.entries))

    T = property(transpose)

    def conjugate(self) -> "ExactMatrix":
        return ExactMatrix([[x.conjugate() for x in r] for r in self.entries])

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch {self.shape} vs {other.shape}")
        return ExactMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)])

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        return self + (-other)

    def __neg__(self) -> "ExactMatrix":
        return ExactMatrix([[-a for a in r] for r in self.entries])

    def scale(self, c) -> "ExactMatrix":
        c = _g(c)
        return ExactMatrix([[a * c for a in r] for r in self.entries])

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        cols = list(zip(*other.entries))
        out = []
        for r in self.entries:
            nz = [(k, a) for k, a in enumerate(r) if a]
            row = []
            for c in cols:
                s = ZERO
                for k, a in nz:
                    b = c[k]
                    if b:
                        s = s + a * b
                row.append(s)
            out.append(row)
        return ExactMatrix(out)

    def apply(self, v: Sequence) -> list[GaussianRational]:
        if len(v) != self.cols:
            raise DimensionError("vector length mismatch")
        v = [_g(x) for x in v]
        out = []
        for r in self.entries:
            s = ZERO
            for a, b in zip(r, v):
                if a and b:
                    s = s + a * b
            out.append(s)
        return out

    def is_zero(self) -> bool:
        return not any(x for r in self.entries for x in r)

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.entries == other.entries

    __hash__ = None

    def flatten(self) -> list[GaussianRational]:
        return [x for r in self.entries for x in r]

    def __repr__(self):
        body = "; ".join(",".join(str(x) for x in r) for r in self.entries)
        return f"ExactMatrix[{body}]"

    # elimination-based tasks ------------------------------------------

    def rank(self) -> int:
        return len(rref(self.tolist())[1])

    def kernel_basis(self) -> list[list[GaussianRational]]:
        """Exact basis of the right null space (one vector per free column)."""
        reduced, pivots = rref(self.tolist())
        free = [c for c in range(self.cols) if c not in pivots]
        basis = []
        for f in free:
            v = [ZERO] * self.cols
            v[f] = ONE
            for row, pc in zip(reduced, pivots):
                v[pc] = -row[f]
            basis.append(v)
        return basis

    def solve(self, rhs: Sequence) -> list[GaussianRational]:
        """A particular solution of ``self @ x = rhs`` (free variables zero)."""
        if len(rhs) != self.rows:
            raise DimensionError("right-hand side length mismatch")
        aug = [list(r) + [_g(b)] for r, b in zip(self.entries, rhs)]
        reduced, pivots = rref(aug)
        if self.cols in pivots:
            raise InconsistentSystemError("linear system has no solution")
        x = [ZERO] * self.cols
        for row, pc in zip(reduced, pivots):
            x[pc] = row[-1]
        return x

    def inverse(self) -> "ExactMatrix":
        if self.rows != self.cols:
            raise DimensionError("inverse requires a square matrix")
        n = self.rows
        aug = [list(r) + [ONE if i == j else ZERO for j in range(n)] for i, r in enumerate(self.entries)]
        reduced, pivots = rref(aug)
        left_pivots = [p for p in pivots if p < n]
        if len(left_pivots) < n:
            raise SingularMatrixError(f"matrix is singular (rank {len(left_pivots)} < {n})", len(left_pivots))
        return ExactMatrix([row[n:] for row in reduced])


def rref(rows: list[list]) -> tuple[list[list[GaussianRational]], list[int]]:
    """Reduced row echelon form. Returns (nonzero rows, pivot columns)."""
    m = [[_g(x) for x in r] for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = m[r][c].inverse()
        if inv != 1:
            m[r] = [x * inv if x else x for x in m[r]]
        piv_row = m[r]
        nz = [k for k in range(c, ncols) if piv_row[k]]
        for i in range(len(m)):
            if i != r:
                f = m[i][c]
                if f:
                    row = m[i]
                    for k in nz:
                        row[k] = row[k] - f * piv_row[k]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def row_space_basis(vectors: Iterable[Sequence]) -> list[list[GaussianRational]]:
    """Reduced basis of the span of ``vectors`` (empty list for the zero span)."""
    vectors = [list(v) for v in vectors]
    if not vectors:
        return []
    return rref(vectors)[0]


def exact_linalg(m: ExactMatrix, task: str, rhs: Sequence | None = None):
    """Dispatch one of ``rank``, ``kernel_basis``, ``solve``, ``inverse``."""
    if task == "rank":
        return m.rank()
    if task == "kernel_basis":
        return m.kernel_basis()
    if task == "solve":
        if rhs is None:
            raise ValueError("solve needs a right-hand side")
        return m.solve(rhs)
    if task == "inverse":
        return m.inverse()
    raise ValueError(f"unknown linear-algebra task {task!r}")


# polynomial matrices ------------------------------------------------------


def poly_matmul(a: Sequence[Sequence[MultiPoly]], b: Sequence[Sequence[MultiPoly]]) -> list[list[MultiPoly]]:
    n, k, m = len(a), len(b), len(b[0])
    if any(len(r) != k for r in a):
        raise DimensionError("inner dimensions differ")
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            s = None
            for t in range(k):
                x, y = a[i][t], b[t][j]
                if x.terms and y.terms:
                    s = x * y if s is None else s + x * y
            row.append(s if s is not None else MultiPoly.zero(a[i][0].variables))
        out.append(row)
    return out


def poly_identity_check(a, b) -> tuple[int, int] | None:
    """Return the first (i, j) where ``a @ b`` differs from the identity, else None."""
    prod = poly_matmul(a, b)
    for i, row in enumerate(prod):
        for j, p in enumerate(row):
            if p != (1 if i == j else 0):
                return i, j
    return None


def poly_det(matrix: Sequence[Sequence[MultiPoly]]) -> MultiPoly:
    """Division-free determinant by Laplace expansion over column subsets.

    Row r is expanded against every subset of r columns already used by the
    rows above; zero minors are dropped, so sparse matrices stay cheap.
    """
    n = len(matrix)
    if any(len(r) != n for r in matrix):
        raise DimensionError("determinant needs a square matrix")
    variables = matrix[0][0].variables
    # minors[mask] = determinant of rows 0..r-1 restricted to the columns in mask
    minors: dict[int, MultiPoly] = {0: MultiPoly.constant(1, variables)}
    for r in range(n):
        row = matrix[r]
        nxt: dict[int, MultiPoly] = {}
        for mask, minor in minors.items():
            for c in range(n):
                if mask >> c & 1 or not row[c].terms:
                    continue
                # sign from the number of used columns to the right of c
                sign = -1 if bin(mask >> (c + 1)).count("1") % 2 else 1
                term = minor * row[c]
                if sign < 0:
                    term = -term
                key = mask | (1 << c)
                nxt[key] = nxt[key] + term if key in nxt else term
        minors = {k: v for k, v in nxt.items() if v.terms}
        if not minors:
            return MultiPoly.zero(variables)
    return minors.get((1 << n) - 1, MultiPoly.zero(variables))
