"""Exact arithmetic foundation: Gaussian rationals, polynomials, linear algebra."""

from .gaussian import GaussianRational, I, ONE, ZERO, as_rational, parse_gaussian, parse_scalar
from .linalg import ExactMatrix, exact_linalg, poly_det, poly_identity_check, poly_matmul, row_space_basis, rref
from .poly import MultiPoly, conjugate_name, make_variables, poly_arith


def partial(p: MultiPoly, var: str) -> MultiPoly:
    return p.partial(var)


def conjugate_poly(p: MultiPoly) -> MultiPoly:
    return p.conjugate()


def eval_poly(p: MultiPoly, point):
    return p.evaluate(point)


__all__ = [
    "GaussianRational", "I", "ONE", "ZERO", "as_rational", "parse_gaussian", "parse_scalar",
    "ExactMatrix", "exact_linalg", "poly_det", "poly_identity_check", "poly_matmul",
    "row_space_basis", "rref", "MultiPoly", "conjugate_name", "make_variables", "poly_arith",
    "partial", "conjugate_poly", "eval_poly",
]
