"""Evaluable functions on field space and the oscillator-group action.

A ``FieldFunction`` is a pure evaluator plus structural metadata: a kind tag
(polynomial / exp-polynomial / gaussian / composite), an optional coefficient
table for polynomial kinds, and an integrability flag.  Closed forms are
recognized by tag where a caller cares; everything else is evaluated
pointwise and integrated with tensor-product Gauss-Hermite quadrature.

The group acts on the right:

    sigma(f, (M, k, v, c))(x) = exp(k(x) + c) * f(Mx + v)

and GL(V) acts with a determinant prefactor, act_fun(M, f) = det(M) f o M,
so that integrals are preserved under the change of variables.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    NonPositiveConvolution,
    NonPositiveDeterminant,
    NonPositiveValue,
    NotIntegrable,
    NotPositiveDefinite,
    QuadratureOverflow,
)
from .gaussian import GaussianMeasure
from .oscgroup import OscElement
from .tensors import GlElement, Sym2Tensor, as_vector, cholesky, is_positive_definite

#: Default Gauss-Hermite order per dimension; tensor-product cost is q^n.
DEFAULT_ORDERS = {1: 40, 2: 20, 3: 12, 4: 8}

#: log of the largest representable integrand factor before we bail out.
_OVERFLOW_LOG = 700.0

_LEADING_FORM_SAMPLES = 100


def default_order(dim: int) -> int:
    try:
        return DEFAULT_ORDERS[dim]
    except KeyError:
        raise DimensionMismatch(
            f"quadrature supported for dimensions {sorted(DEFAULT_ORDERS)}, got {dim}"
        ) from None


def _poly_eval(terms, x):
    total = 0.0
    for exponents, coeff in terms:
        total += coeff * float(np.prod(x ** np.asarray(exponents)))
    return total


def _leading_form_is_negative(terms, dim, seed=0):
    """Sample the top-degree form on random directions; all must be < 0."""
    degree = max(sum(e) for e, _ in terms)
    leading = [(e, c) for e, c in terms if sum(e) == degree]
    rng = np.random.default_rng(seed)
    count = (2**dim) * _LEADING_FORM_SAMPLES
    for _ in range(count):
        u = rng.normal(size=dim)
        u /= np.linalg.norm(u)
        if _poly_eval(leading, u) >= 0.0:
            return False
    return True


def polynomial_is_exp_integrable(terms, dim: int) -> bool:
    """Whether exp of the polynomial has Gaussian-dominated decay.

    Degree <= 1 is always fine (any Gaussian factor dominates); otherwise the
    maximal total degree must be even with a strictly negative leading form
    on sampled directions.
    """
    terms = [(tuple(e), float(c)) for e, c in terms if c != 0.0]
    if not terms:
        return True
    degree = max(sum(e) for e, _ in terms)
    if degree <= 1:
        return True
    if degree % 2 != 0:
        return False
    return _leading_form_is_negative(terms, dim)


@dataclass(frozen=True)
class FieldFunction:
    """Evaluable real-valued function on R^n."""

    evaluator: object
    dim: int
    kind: str = "composite"
    terms: tuple = None
    integrable: bool = False

    def __call__(self, x) -> float:
        v = as_vector(x, self.dim)
        return float(self.evaluator(v))

    @classmethod
    def polynomial(cls, terms, dim: int) -> "FieldFunction":
        """Polynomial from a coefficient table [(exponents, coeff), ...].

        The ``integrable`` flag records whether exp of the polynomial decays
        against any Gaussian (the sense used by the convolution routines).
        """
        clean = []
        for exponents, coeff in terms:
            e = tuple(int(v) for v in exponents)
            if len(e) != dim or any(v < 0 for v in e):
                raise DimensionMismatch(f"bad exponent tuple {e} for dimension {dim}")
            if coeff != 0.0:
                clean.append((e, float(coeff)))
        clean = tuple(sorted(clean))
        return cls(
            evaluator=lambda x: _poly_eval(clean, x),
            dim=dim,
            kind="polynomial",
            terms=clean,
            integrable=polynomial_is_exp_integrable(clean, dim),
        )

    @classmethod
    def constant(cls, value: float, dim: int) -> "FieldFunction":
        value = float(value)
        return cls(
            evaluator=lambda x: value,
            dim=dim,
            kind="polynomial",
            terms=((tuple([0] * dim), value),) if value != 0.0 else (),
            integrable=True,
        )

    @classmethod
    def zero(cls, dim: int) -> "FieldFunction":
        return cls.constant(0.0, dim)

    @classmethod
    def gaussian(cls, C: Sym2Tensor) -> "FieldFunction":
        g = GaussianMeasure(C)
        return cls(
            evaluator=g.eval, dim=C.dim, kind="gaussian", integrable=True
        )

    @classmethod
    def exp_polynomial(cls, terms, dim: int) -> "FieldFunction":
        """exp of a polynomial, validated for Gaussian-dominated decay."""
        poly = cls.polynomial(terms, dim)
        if not poly.integrable:
            raise NotIntegrable(
                "exp-polynomial must have even maximal degree with a "
                "negative-definite leading form"
            )
        return cls(
            evaluator=lambda x: math.exp(poly.evaluator(x)),
            dim=dim,
            kind="exp-polynomial",
            terms=poly.terms,
            integrable=True,
        )

    def terms_to_json(self) -> dict:
        if self.terms is None:
            raise ValueError("only polynomial kinds carry a coefficient table")
        return {
            "terms": [
                {"exponents": list(e), "coeff": c} for e, c in self.terms
            ]
        }

    @classmethod
    def polynomial_from_json(cls, data: dict, dim: int) -> "FieldFunction":
        terms = [(t["exponents"], t["coeff"]) for t in data["terms"]]
        return cls.polynomial(terms, dim)


@dataclass(frozen=True)
class QuadratureRule:
    """Tensor-product Gauss-Hermite rule for a Gaussian weight N(0, C).

    ``nodes`` holds the transformed points x_i = sqrt(2) L t_i (L the
    Cholesky factor of C) in canonical lexicographic order; ``weights`` are
    normalized to sum to 1, so the rule computes expectations under N(0, C).
    """

    nodes: np.ndarray
    weights: np.ndarray
    covariance: Sym2Tensor
    order: int
    chol: np.ndarray = field(repr=False, default=None)

    @property
    def dim(self) -> int:
        return self.covariance.dim

    @classmethod
    def for_covariance(cls, C: Sym2Tensor, order: int | None = None) -> "QuadratureRule":
        if not is_positive_definite(C):
            raise NotPositiveDefinite("quadrature weight covariance must be PD")
        n = C.dim
        q = int(order) if order is not None else default_order(n)
        t, w = np.polynomial.hermite.hermgauss(q)
        w = w / math.sqrt(math.pi)
        L = cholesky(C)
        # Lexicographic tensor product fixes the reduction order.
        grids = np.array(list(itertools.product(t, repeat=n)))
        weights = np.prod(
            np.array(list(itertools.product(w, repeat=n))), axis=1
        )
        nodes = math.sqrt(2.0) * grids @ L.T
        nodes.setflags(write=False)
        weights.setflags(write=False)
        return cls(nodes=nodes, weights=weights, covariance=C, order=q, chol=L)


def sigma_act(f: FieldFunction, g: OscElement) -> FieldFunction:
    """Right action (sigma f)(x) = exp(k(x) + c) f(Mx + v)."""
    if f.dim != g.dim:
        raise DimensionMismatch(f"dimension mismatch: {f.dim} vs {g.dim}")
    m, k, v, c = g.m.matrix, g.k, g.v, g.c

    def evaluator(x):
        return math.exp(float(k @ x) + c) * f.evaluator(m @ x + v)

    # Gaussian-dominated decay survives the action: M is invertible and the
    # exponential-linear prefactor is subdominant.
    return FieldFunction(
        evaluator=evaluator, dim=f.dim, kind="composite", integrable=f.integrable
    )


def act_fun(M: GlElement, f: FieldFunction) -> FieldFunction:
    """GL(V) action det(M) f o M; restricted to det(M) > 0."""
    if M.dim != f.dim:
        raise DimensionMismatch(f"dimension mismatch: {M.dim} vs {f.dim}")
    if M.det <= 0.0:
        raise NonPositiveDeterminant(f"det(M) = {M.det:.6g} must be positive")
    d, m = M.det, M.matrix
    return FieldFunction(
        evaluator=lambda x: d * f.evaluator(m @ x),
        dim=f.dim,
        kind="composite",
        integrable=f.integrable,
    )


def compose(f: FieldFunction, M: GlElement) -> FieldFunction:
    """Plain composition f o M (no determinant prefactor)."""
    if M.dim != f.dim:
        raise DimensionMismatch(f"dimension mismatch: {M.dim} vs {f.dim}")
    m = M.matrix
    return FieldFunction(
        evaluator=lambda x: f.evaluator(m @ x),
        dim=f.dim,
        kind="composite",
        integrable=f.integrable,
    )


def convolve_numeric(
    f: FieldFunction, g: FieldFunction, rule: QuadratureRule, x
) -> float:
    """Quadrature estimate of (f * g)(x) = int f(y) g(x - y) dy.

    The integral is rewritten as an expectation under the rule's Gaussian
    weight; at least one factor must be declared integrable and the weight
    covariance must dominate the decay of the product for the estimate to
    converge.
    """
    if f.dim != g.dim or f.dim != rule.dim:
        raise DimensionMismatch("convolution factors and rule must share a dimension")
    if not (f.integrable or g.integrable):
        raise NotIntegrable("at least one convolution factor must be integrable")
    xv = as_vector(x, f.dim)
    weight = GaussianMeasure(rule.covariance)
    total = 0.0
    for y, w in zip(rule.nodes, rule.weights):
        fy = f.evaluator(y)
        gy = g.evaluator(xv - y)
        prod = fy * gy
        if prod == 0.0:
            continue
        log_mag = math.log(abs(prod)) - weight.log_eval(y)
        if log_mag > _OVERFLOW_LOG:
            raise QuadratureOverflow(
                f"integrand magnitude exp({log_mag:.1f}) at node {y}"
            )
        total += w * math.copysign(math.exp(log_mag), prod)
    return total


def gauss_convolve_exp(
    P: Sym2Tensor,
    I: FieldFunction,
    rule: QuadratureRule | None = None,
    order: int | None = None,
) -> FieldFunction:
    """The convolution N(P) * (exp o I) as an evaluable function.

    Computed at each point as the expectation of exp(I(x - y)) over
    y ~ N(0, P), via Hermite nodes transformed by the Cholesky factor of P.
    Evaluations are memoized on the exact bit pattern of the input point,
    since nested coarse-graining revisits the same quadrature nodes.
    """
    if not is_positive_definite(P):
        raise NotPositiveDefinite("convolution covariance must be positive definite")
    if P.dim != I.dim:
        raise DimensionMismatch(f"dimension mismatch: {P.dim} vs {I.dim}")
    if not I.integrable:
        raise NotIntegrable("interaction is not exp-integrable")
    if rule is None:
        rule = QuadratureRule.for_covariance(P, order)
    elif rule.dim != P.dim:
        raise DimensionMismatch("rule dimension does not match covariance")
    nodes, log_weights = rule.nodes, np.log(rule.weights)
    cache: dict[bytes, float] = {}

    def evaluator(x):
        key = x.tobytes()
        hit = cache.get(key)
        if hit is not None:
            return hit
        exponents = np.array(
            [lw + I.evaluator(x - y) for y, lw in zip(nodes, log_weights)]
        )
        peak = exponents.max()
        if peak > _OVERFLOW_LOG:
            raise QuadratureOverflow(
                f"integrand magnitude exp({peak:.1f}) at a shifted node"
            )
        value = math.exp(peak) * float(np.sum(np.exp(exponents - peak)))
        if not value > 0.0:
            raise NonPositiveConvolution(
                "Gaussian convolution of a positive integrand came out <= 0"
            )
        cache[key] = value
        return value

    return FieldFunction(
        evaluator=evaluator, dim=P.dim, kind="composite", integrable=True
    )


def log_fn(f: FieldFunction) -> FieldFunction:
    """Pointwise natural log; raises at evaluation on non-positive values."""

    def evaluator(x):
        value = f.evaluator(x)
        if value <= 0.0:
            raise NonPositiveValue(f"log of non-positive value {value} at {x}")
        return math.log(value)

    return FieldFunction(
        evaluator=evaluator, dim=f.dim, kind="composite", integrable=f.integrable
    )
