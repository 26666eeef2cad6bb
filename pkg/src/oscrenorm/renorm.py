"""Propagator families, generating functions and the renormalization flow.

The interaction part of the cumulant generating function is

    wtilde(P, I)(x) = log((N(P) * exp o I)(x)),

with the zero-covariance convention wtilde(0, I) = I, so that step size
c = 1 is the exact identity.  The full generating function splits as
w(P, I)(J) = J P J / 2 + wtilde(P, I)(P J).

A one-parameter dilation family T_c = exp(ln(c) A) generates scale-indexed
propagators P_cL = T_c P_L T_c^T; a renormalization step at factor c >= 1
coarse-grains over the monotone difference P_L0 - P_cL0 and composes with
T_c:

    step(c): I -> wtilde(P_L0 - P_cL0, I) o T_c.

This is the composite of the lift M -> (M, P_L0 - M P_L0 M^T) with the
coarse-grain-and-compose action, and it satisfies the semigroup law
step(c') o step(c) = step(c c').
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.linalg import expm

from .errors import (
    DivergentIntegral,
    MonotonicityViolated,
    NonPositiveDeterminant,
    NonPositiveScale,
    NotPositiveDefinite,
)
from .functions import FieldFunction, QuadratureRule, act_fun, compose, gauss_convolve_exp, log_fn
from .oscgroup import UrElement, ur
from .tensors import (
    GlElement,
    Sym2Tensor,
    act_sym,
    as_vector,
    contract,
    is_positive_definite,
    min_eigenvalue,
    quad_form,
)

#: Eigenvalue slack allowed when testing positive semi-definiteness of
#: coarse-graining covariances.
PSD_SLACK = 1e-10


@dataclass(frozen=True)
class DilationFamily:
    """One-parameter family T_c = exp(ln(c) A) in GL(V)."""

    generator: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.generator, dtype=float)
        if a.ndim == 0:
            a = a.reshape(1, 1)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"generator must be square, got shape {a.shape}")
        a = a.copy()
        a.setflags(write=False)
        object.__setattr__(self, "generator", a)

    @property
    def dim(self) -> int:
        return self.generator.shape[0]

    @classmethod
    def default(cls, dim: int) -> "DilationFamily":
        """Generator -I/2, giving T_c = c^(-1/2) id: monotone and
        contractive for c > 1 regardless of dimension."""
        return cls(-0.5 * np.eye(dim))

    def transform(self, c: float) -> GlElement:
        c = float(c)
        if c <= 0.0:
            raise NonPositiveScale(f"dilation parameter must be positive, got {c}")
        return GlElement(expm(math.log(c) * self.generator))


@dataclass(frozen=True)
class PropagatorFamily:
    """Scale-indexed covariances generated from a base tensor by dilation.

    P at scale L is defined as T_{L/L0} P_base T_{L/L0}^T, so dilation
    equivariance holds by construction.
    """

    base: Sym2Tensor
    dilation: DilationFamily
    fiducial_scale: float = 1.0

    def __post_init__(self):
        if not is_positive_definite(self.base):
            raise NotPositiveDefinite("base propagator must be positive definite")
        if self.base.dim != self.dilation.dim:
            raise ValueError("base tensor and dilation generator dimensions differ")
        if not self.fiducial_scale > 0.0:
            raise NonPositiveScale(
                f"fiducial scale must be positive, got {self.fiducial_scale}"
            )

    @property
    def dim(self) -> int:
        return self.base.dim

    @classmethod
    def with_default_dilation(
        cls, base: Sym2Tensor, fiducial_scale: float = 1.0
    ) -> "PropagatorFamily":
        return cls(base, DilationFamily.default(base.dim), fiducial_scale)


def propagator_at(fam: PropagatorFamily, L: float) -> Sym2Tensor:
    """Covariance at scale L: conjugate the base by T_{L/L0}."""
    L = float(L)
    if L <= 0.0:
        raise NonPositiveScale(f"scale must be positive, got {L}")
    return act_sym(fam.dilation.transform(L / fam.fiducial_scale), fam.base)


@dataclass(frozen=True)
class Theory:
    """A propagator together with an interaction."""

    propagator: Sym2Tensor
    interaction: FieldFunction

    def __post_init__(self):
        if self.propagator.dim != self.interaction.dim:
            raise ValueError("propagator and interaction dimensions differ")
        if not (
            self.propagator.is_zero() or is_positive_definite(self.propagator)
        ):
            raise NotPositiveDefinite(
                "propagator must be positive definite or exactly zero"
            )
        if not self.interaction.integrable:
            raise ValueError("interaction must be integrable")


@dataclass(frozen=True)
class RenormStep:
    """Scale factor c with its cached (T_c, P_L0 - P_cL0) pair."""

    c: float
    transform: GlElement
    step_tensor: Sym2Tensor

    @classmethod
    def for_family(cls, fam: PropagatorFamily, c: float) -> "RenormStep":
        c = float(c)
        if c < 1.0:
            raise ValueError(f"step factor must be >= 1, got {c}")
        lifted: UrElement = ur(fam.base, fam.dilation.transform(c))
        gap = min_eigenvalue(lifted.p)
        if gap < -PSD_SLACK:
            raise MonotonicityViolated(
                f"P_L0 - P_cL0 has eigenvalue {gap:.3e} < 0: the propagator "
                f"family is not monotone at c = {c}"
            )
        return cls(c=c, transform=lifted.m, step_tensor=lifted.p)


def heat_kernel_base(
    spatial_dim: int, sites, fiducial_scale: float, mass: float = 0.0
) -> Sym2Tensor:
    """Propagator matrix on a finite set of lattice sites.

    Entry (i, j) is the integral over l in [L0, inf) of
    (4 pi l)^(-d/2) exp(-m^2 l - |x_i - x_j|^2 / (4 l)), evaluated by
    adaptive quadrature and symmetrized.  For d <= 2 the massless integral
    diverges at the upper limit, so a positive mass is required there.
    """
    d = int(spatial_dim)
    m = float(mass)
    L0 = float(fiducial_scale)
    if L0 <= 0.0:
        raise NonPositiveScale(f"fiducial scale must be positive, got {L0}")
    if m < 0.0:
        raise ValueError("mass must be non-negative")
    if m == 0.0 and d <= 2:
        raise DivergentIntegral(
            f"massless integrand ~ l^(-{d}/2) is not integrable at infinity"
        )
    pts = [as_vector(p) for p in sites]
    count = len(pts)
    if count == 0:
        raise ValueError("at least one site is required")

    def entry(r2: float) -> float:
        def integrand(l):
            return (4.0 * math.pi * l) ** (-d / 2.0) * math.exp(
                -m * m * l - r2 / (4.0 * l)
            )

        value, _ = quad(integrand, L0, np.inf, limit=200)
        return value

    out = np.zeros((count, count))
    for i in range(count):
        for j in range(i, count):
            r2 = float(np.sum((pts[i] - pts[j]) ** 2))
            out[i, j] = out[j, i] = entry(r2)
    tensor = Sym2Tensor(out)
    if not is_positive_definite(tensor):
        raise NotPositiveDefinite(
            "assembled heat-kernel propagator is not positive definite"
        )
    return tensor


def wtilde(
    P: Sym2Tensor,
    I: FieldFunction,
    rule: QuadratureRule | None = None,
    order: int | None = None,
) -> FieldFunction:
    """Interaction part of the generating function, log(N(P) * exp o I).

    A zero covariance acts as the delta for convolution, so wtilde(0, I)
    returns I unchanged.
    """
    if P.is_zero():
        return I
    convolved = gauss_convolve_exp(P, I, rule=rule, order=order)
    logged = log_fn(convolved)
    return FieldFunction(
        evaluator=logged.evaluator, dim=logged.dim, kind="composite", integrable=True
    )


def w_full(
    P: Sym2Tensor,
    I: FieldFunction,
    J,
    rule: QuadratureRule | None = None,
    order: int | None = None,
) -> float:
    """Cumulant generating function J P J / 2 + wtilde(P, I)(P J)."""
    Jv = as_vector(J, P.dim)
    return 0.5 * quad_form(Jv, P) + wtilde(P, I, rule=rule, order=order)(
        contract(P, Jv)
    )


def coarse_grain(
    P1: Sym2Tensor,
    P2: Sym2Tensor,
    I: FieldFunction,
    order: int | None = None,
) -> FieldFunction:
    """Integrate out the P2 fluctuations: the effective interaction
    wtilde(P2, I), which satisfies wtilde(P1, .) o coarse_grain =
    wtilde(P1 + P2, .)."""
    if P1.dim != P2.dim:
        raise ValueError(f"dimension mismatch: {P1.dim} vs {P2.dim}")
    for P in (P1, P2):
        if not (P.is_zero() or is_positive_definite(P)):
            raise NotPositiveDefinite(
                "coarse graining requires PSD (or zero) covariances"
            )
    return wtilde(P2, I, order=order)


def rescale(
    M: GlElement, P: Sym2Tensor, I: FieldFunction
) -> tuple[Sym2Tensor, FieldFunction]:
    """Pull a theory back along M: (M^{-1} P M^{-T}, I o M).

    Satisfies wtilde(P, I) o M = wtilde over the returned pair pointwise.
    """
    if M.det <= 0.0:
        raise NonPositiveDeterminant(f"det(M) = {M.det:.6g} must be positive")
    return act_sym(M.inverse, P), compose(I, M)


def renorm_step(
    fam: PropagatorFamily,
    c: float,
    I: FieldFunction,
    order: int | None = None,
) -> FieldFunction:
    """One renormalization step: I -> wtilde(P_L0 - P_cL0, I) o T_c.

    At c = 1 the step tensor vanishes and the input is returned unchanged.
    """
    step = RenormStep.for_family(fam, c)
    if step.step_tensor.is_zero(atol=PSD_SLACK * max(1.0, _norm(fam.base))):
        return I
    effective = wtilde(step.step_tensor, I, order=order)
    return compose(effective, step.transform)


def cgrl_apply(
    M: GlElement,
    P: Sym2Tensor,
    I: FieldFunction,
    order: int | None = None,
) -> FieldFunction:
    """Combined coarse-grain-and-rescale action: act_fun(M, wtilde(P, I)).

    Note the det(M) prefactor carried by act_fun; ``renorm_step`` uses the
    prefactor-free composition so that the step at c = 1 is the identity on
    functions, not a rescaling by det(T_1) (which is 1 anyway) and so that
    flowed interactions stay comparable across c.
    """
    return act_fun(M, wtilde(P, I, order=order))


def cgrl_compose(
    M: GlElement,
    P: Sym2Tensor,
    I: FieldFunction,
    order: int | None = None,
) -> FieldFunction:
    """Prefactor-free coarse-grain-and-rescale: I -> wtilde(P, I) o M.

    This is the variant that genuinely carries the semidirect-product
    structure as a right action,

        cgrl_compose(m1 m2, p1 + m1 p2 m1^T)
            = cgrl_compose(m2, p2) after cgrl_compose(m1, p1),

    and it is what a renormalization step applies; the det(M) prefactor of
    ``cgrl_apply`` would rescale exp of the interaction nonlinearly and
    break the law whenever det(M) != 1.
    """
    if P.is_zero():
        return compose(I, M)
    return compose(wtilde(P, I, order=order), M)


def _norm(t: Sym2Tensor) -> float:
    return float(np.linalg.norm(t.matrix, np.inf))


def project_polynomial(
    f: FieldFunction, points, degree: int
) -> tuple[FieldFunction, float]:
    """Least-squares polynomial fit of f on the given points.

    Returns the fitted polynomial (total degree <= ``degree``, capped at 8)
    and the root-mean-square residual of the fit.  Intended for reporting
    flow tables, not for feeding back into the flow itself.
    """
    import itertools

    degree = min(int(degree), 8)
    pts = [as_vector(p, f.dim) for p in points]
    exponents = [
        e
        for e in itertools.product(range(degree + 1), repeat=f.dim)
        if sum(e) <= degree
    ]
    exponents.sort(key=lambda e: (sum(e), e))
    design = np.array(
        [[float(np.prod(p ** np.asarray(e))) for e in exponents] for p in pts]
    )
    values = np.array([f(p) for p in pts])
    coeffs, *_ = np.linalg.lstsq(design, values, rcond=None)
    residual = float(np.sqrt(np.mean((design @ coeffs - values) ** 2)))
    fitted = FieldFunction.polynomial(
        [(e, c) for e, c in zip(exponents, coeffs)], f.dim
    )
    return fitted, residual
