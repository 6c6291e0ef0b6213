"""Relative kernels and cokernels of F: 𝒜 → ℬ, G: ℬ → 𝒞 with φ: G∘F ⇒ 0.

Both constructions are governed by the same map

    Θ: A0 ⊕ B1 → B0 ⊕ C1,    (a0, b1) ↦ (F0 a0 + d_B b1, G1 b1 − φ a0).

Ker(F, φ) has objects ker Θ, pairs (A, a: F(A) → 0) with G(a) = φ_A, and
morphisms A1. Coker(φ, G) has the objects of 𝒞 and morphisms coker Θ.
"""
from dataclasses import dataclass
from typing import Tuple

from .errors import BoundaryMismatch, Incompatible
from .logger import get_logger
from .pic2core import (
    MorphismFlags,
    OneMor,
    Pic2,
    TwoMor,
    canonical_two_mor,
    classify_morphism,
    compose_one_mor,
    null_two_mor,
    zero_one_mor,
    zero_pic2,
)
from .zlin import (
    AbHom,
    IntMatrix,
    cokernel_presentation,
    factor_through_injection,
    factor_through_surjection,
    hom_copair,
    hom_pair,
    injection_hom,
    kernel_basis,
    projection_hom,
)

_logger = get_logger("pic2ha.relkc")


@dataclass(frozen=True)
class RelKernelResult:
    K: Pic2
    e: OneMor
    eps: TwoMor
    F: OneMor
    G: OneMor
    phi: TwoMor
    inclusion: AbHom  # K0 → A0 ⊕ B1


@dataclass(frozen=True)
class RelCokernelResult:
    C: Pic2
    p: OneMor
    pi: TwoMor
    F: OneMor
    G: OneMor
    phi: TwoMor
    projection: AbHom  # B0 ⊕ C1 → Q1


def _check_triple(f: OneMor, g: OneMor, phi: TwoMor) -> None:
    if f.target != g.source:
        raise BoundaryMismatch("F and G do not compose")
    gf = compose_one_mor(f, g)
    if not phi.source.equals(gf):
        raise BoundaryMismatch("the nullhomotopy does not start at G∘F")
    if not phi.target.equals(zero_one_mor(gf.source, gf.target)):
        raise BoundaryMismatch("the nullhomotopy does not end at the zero morphism")


def _theta(f: OneMor, g: OneMor, phi: TwoMor) -> AbHom:
    a, b, c = f.source, f.target, g.target
    top = hom_copair(f.f0, b.d)
    bottom = hom_copair(-phi.h, g.f1)
    mat = IntMatrix.vstack(top.matrix, bottom.matrix)
    return AbHom(a.c0.direct_sum(b.c1), b.c0.direct_sum(c.c1), mat)


def relative_kernel(f: OneMor, g: OneMor, phi: TwoMor) -> RelKernelResult:
    _check_triple(f, g, phi)
    a, b = f.source, f.target
    k0, incl = kernel_basis(_theta(f, g, phi))
    d_k = factor_through_injection(incl, hom_pair(a.d, -f.f1))
    k = Pic2(a.c1, k0, d_k)
    to_a0 = projection_hom(a.c0, b.c1, 0).compose(incl)
    to_b1 = projection_hom(a.c0, b.c1, 1).compose(incl)
    e = OneMor(k, a, AbHom.identity(a.c1), to_a0)
    eps = null_two_mor(compose_one_mor(e, f), to_b1)
    _logger.debug("RelativeKernel", {"objects": k0.describe(), "morphisms": a.c1.describe()})
    return RelKernelResult(k, e, eps, f, g, phi, incl)


def relative_cokernel(f: OneMor, g: OneMor, phi: TwoMor) -> RelCokernelResult:
    _check_triple(f, g, phi)
    b, c = g.source, g.target
    q1, proj = cokernel_presentation(_theta(f, g, phi))
    boundary = hom_copair(-g.f0, c.d)
    d_q = factor_through_surjection(proj, boundary)
    q = Pic2(q1, c.c0, d_q)
    p = OneMor(c, q, proj.compose(injection_hom(b.c0, c.c1, 1)), AbHom.identity(c.c0))
    pi = null_two_mor(compose_one_mor(g, p), proj.compose(injection_hom(b.c0, c.c1, 0)))
    _logger.debug("RelativeCokernel", {"objects": c.c0.describe(), "morphisms": q1.describe()})
    return RelCokernelResult(q, p, pi, f, g, phi, proj)


def factor_through_kernel(kr: RelKernelResult, candidate: OneMor, null: TwoMor) -> Tuple[OneMor, TwoMor]:
    """F': 𝒳 → Ker with e∘F' = candidate (returned with the identity 2-cell).

    null: F∘candidate ⇒ 0 must satisfy G1∘null = φ∘candidate0.
    """
    if candidate.target != kr.F.source:
        raise BoundaryMismatch("candidate does not land in the source of F")
    if not null.source.equals(compose_one_mor(candidate, kr.F)):
        raise BoundaryMismatch("nullhomotopy does not start at F∘candidate")
    lhs = kr.G.f1.compose(null.h)
    rhs = kr.phi.h.compose(candidate.f0)
    if not lhs.equals(rhs):
        raise Incompatible(f"G∘null and φ∘candidate differ on generators {lhs.residual(rhs)}")
    f0 = factor_through_injection(kr.inclusion, hom_pair(candidate.f0, null.h))
    lifted = OneMor(candidate.source, kr.K, candidate.f1, f0)
    back = compose_one_mor(lifted, kr.e)
    return lifted, TwoMor(back, candidate, AbHom.zero(back.source.c0, back.target.c1))


def factor_through_cokernel(cr: RelCokernelResult, candidate: OneMor, null: TwoMor) -> Tuple[OneMor, TwoMor]:
    """F': Coker → 𝒴 with F'∘p = candidate.

    null: candidate∘G ⇒ 0 must satisfy null∘F0 = candidate1∘φ.
    """
    if candidate.source != cr.G.target:
        raise BoundaryMismatch("candidate does not start at the target of G")
    if not null.source.equals(compose_one_mor(cr.G, candidate)):
        raise BoundaryMismatch("nullhomotopy does not start at candidate∘G")
    lhs = null.h.compose(cr.F.f0)
    rhs = candidate.f1.compose(cr.phi.h)
    if not lhs.equals(rhs):
        raise Incompatible(f"null∘F and candidate∘φ differ on generators {lhs.residual(rhs)}")
    f1 = factor_through_surjection(cr.projection, hom_copair(null.h, candidate.f1))
    lifted = OneMor(cr.C, candidate.target, f1, candidate.f0)
    back = compose_one_mor(cr.p, lifted)
    return lifted, TwoMor(back, candidate, AbHom.zero(back.source.c0, back.target.c1))


def kernel_morphism(source: RelKernelResult, target: RelKernelResult, a: OneMor, b: OneMor,
                    lam: TwoMor) -> OneMor:
    """Ker(F, φ) → Ker(F', φ') induced by a: 𝒜 → 𝒜', b: ℬ → ℬ', lam: F'∘a ⇒ b∘F.

    On objects (A, u) ↦ (a(A), b(u) + lam_A).
    """
    if a.source != source.F.source or a.target != target.F.source:
        raise BoundaryMismatch("a does not connect the two kernel sources")
    if b.source != source.F.target or b.target != target.F.target:
        raise BoundaryMismatch("b does not connect the two middle objects")
    candidate = compose_one_mor(source.e, a)
    h = lam.h.compose(source.e.f0) + b.f1.compose(source.eps.h)
    null = null_two_mor(compose_one_mor(candidate, target.F), h)
    lifted, _ = factor_through_kernel(target, candidate, null)
    return lifted


def ordinary_kernel(g: OneMor) -> RelKernelResult:
    """Ker(G, 0 → 0, can)."""
    z = zero_pic2()
    to_zero = zero_one_mor(g.target, z)
    return relative_kernel(g, to_zero, canonical_two_mor(compose_one_mor(g, to_zero)))


def comparison_into_kernel(f: OneMor, g: OneMor, phi: TwoMor) -> OneMor:
    """The factorization 𝒜 → Ker G of F through the ordinary kernel of G, using φ."""
    kr = ordinary_kernel(g)
    lifted, _ = factor_through_kernel(kr, f, phi)
    return lifted


@dataclass(frozen=True)
class TwoExactness:
    exact: bool
    flags: MorphismFlags
    comparison: OneMor


def is_2exact_pair(f: OneMor, phi: TwoMor, g: OneMor) -> TwoExactness:
    """2-exact at ℬ: the comparison 𝒜 → Ker G is essentially surjective and full."""
    comparison = comparison_into_kernel(f, g, phi)
    flags = classify_morphism(comparison)
    exact = flags.essentially_surjective and flags.full
    _logger.debug("TwoExactPair", {"exact": exact, **flags.to_dict()})
    return TwoExactness(exact, flags, comparison)

