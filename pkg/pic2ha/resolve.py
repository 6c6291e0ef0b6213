"""Projective resolutions in the strict model and the maps between them.

Resolutions are stored augmented: A'_0 = ℳ, A'_i = P_{i−1}, L'_1 the
augmentation. Step i covers the relative kernel K_{i−1} of (L'_{i−1}, L'_{i−2},
α'_{i−1}) by a free 2-group and sets L'_i = e∘G_i, α'_i = ε∘G_i. Projective
shape means disc of a free group.
"""
import hashlib
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .complexes import (
    ChainHomotopy2,
    ComplexMorphism,
    ExactnessCertificate,
    TwoChainComplex,
    is_relative_2exact_at,
    truncate_left,
)
from .errors import BoundaryMismatch, IllFormed, IndexOutOfRange, Incompatible, NoSolution, NotAnExtension, \
    NotEssentiallySurjective
from .logger import get_logger
from .pic2core import (
    Biproduct,
    MorphismFlags,
    OneMor,
    Pic2,
    TwoMor,
    biproduct,
    classify_morphism,
    compose_one_mor,
    disc,
    is_zero_2group,
    null_two_mor,
    one_mor_pi0,
    zero_one_mor,
    zero_pic2,
)
from .relkc import RelKernelResult, comparison_into_kernel, factor_through_kernel, kernel_morphism, \
    relative_kernel
from .zlin import AbHom, FgAbPresentation, IntMatrix, hom_copair, is_surjective, solve_columns

_logger = get_logger("pic2ha.resolve")


@dataclass(frozen=True)
class FreeCover:
    pic2: Pic2
    cover: OneMor
    essentially_surjective: bool


def free_cover(m: Pic2, rng: Optional[np.random.Generator] = None, redundant: int = 0) -> FreeCover:
    """disc(Z^k) → ℳ sending generators to the generators of ℳ's objects.

    With an rng the generators are shuffled and `redundant` extra generators
    map to random combinations with coefficients in [−2, 2].
    """
    k = m.c0.gens
    columns = [tuple(1 if i == j else 0 for i in range(k)) for j in range(k)]
    if rng is not None and k:
        columns = [columns[int(j)] for j in rng.permutation(k)]
        for _ in range(redundant):
            columns.append(tuple(int(v) for v in rng.integers(-2, 3, size=k)))
    p = disc(FgAbPresentation.free(len(columns)))
    cover = OneMor(p, m, AbHom.zero(p.c1, m.c1), AbHom(p.c0, m.c0, IntMatrix.from_columns(columns, k)))
    return FreeCover(p, cover, is_surjective(one_mor_pi0(cover)))


def lift_through_ess_surjective(p: Pic2, f: OneMor, g: OneMor) -> Tuple[OneMor, TwoMor]:
    """G': 𝒫 → 𝒜 with h: F∘G' ⇒ G, for F: 𝒜 → ℬ essentially surjective.

    For each generator, solve F0 x + d_B m = G0 e_j; then G'0 e_j = x and
    h e_j = m.
    """
    if not p.is_projective_shape():
        raise IllFormed("lifting source is not of projective shape")
    if g.source != p or g.target != f.target:
        raise BoundaryMismatch("G must run from the projective object to the target of F")
    a, b = f.source, f.target
    try:
        sol = solve_columns(hom_copair(f.f0, b.d), g.f0.matrix)
    except NoSolution as e:
        raise NotEssentiallySurjective(f"no lift of a generator: {e}") from e
    g0 = AbHom(p.c0, a.c0, sol.select_rows(range(a.c0.gens)))
    h = AbHom(p.c0, b.c1, sol.select_rows(range(a.c0.gens, a.c0.gens + b.c1.gens)))
    lifted = OneMor(p, a, AbHom.zero(p.c1, a.c1), g0)
    return lifted, TwoMor(compose_one_mor(lifted, f), g, h)


def lift_from_biproduct(bp: Biproduct, f: OneMor, g: OneMor) -> Tuple[OneMor, TwoMor]:
    """Lift G: P×Q → ℬ through F by lifting G∘i1 and G∘i2 separately, G' = G'_1∘p1 + G'_2∘p2."""
    g1, h1 = lift_through_ess_surjective(bp.i1.source, f, compose_one_mor(bp.i1, g))
    g2, h2 = lift_through_ess_surjective(bp.i2.source, f, compose_one_mor(bp.i2, g))
    lifted = compose_one_mor(bp.p1, g1) + compose_one_mor(bp.p2, g2)
    h = h1.h.compose(bp.p1.f0) + h2.h.compose(bp.p2.f0)
    return lifted, TwoMor(compose_one_mor(lifted, f), g, h)


@dataclass
class Resolution:
    target: Pic2
    augmented: TwoChainComplex
    kernels: List[RelKernelResult]  # K_0 .. K_{N+1}
    covers: List[OneMor]  # covers[k] = G_{k+1}: A'_{k+1} → K_k
    certificates: List[ExactnessCertificate] = field(default_factory=list)
    # the same construction carried past the top; certificates are read off it
    continuation: Optional["Resolution"] = field(default=None, repr=False, compare=False)

    @property
    def length(self) -> int:
        return self.augmented.length - 1

    @property
    def complex(self) -> TwoChainComplex:
        return truncate_left(self.augmented)

    @property
    def augmentation(self) -> OneMor:
        return self.augmented.L(1)

    @property
    def aug_null(self) -> TwoMor:
        return self.augmented.alpha(2)

    @property
    def certified(self) -> bool:
        return all(self.certificates)

    def serialize(self) -> str:
        from .cli.formats import dump_resolution

        return dump_resolution(self)

    def content_hash(self) -> str:
        return hashlib.sha256(self.serialize().encode("utf-8")).hexdigest()


# H_k of an augmented complex reads objects up to k + 2
_LOOKAHEAD = 2


def _truncate(full: Resolution, length: int) -> Resolution:
    """Cut `full` down to P_0 .. P_length and certify every point of the cut on `full`."""
    top = length + 1
    a = full.augmented
    augmented = TwoChainComplex(a.objects[:top + 1], a.maps[:top], a.nulls[:top - 1])
    certificates = [is_relative_2exact_at(a, k) for k in range(top + 1)]
    return Resolution(full.target, augmented, full.kernels[:top + 1], full.covers[:top], certificates, full)


def _build(m: Pic2, length: int, rng: Optional[np.random.Generator],
           redundancy: int) -> Tuple[Resolution, Optional[int]]:
    objects: List[Pic2] = [m]
    maps: List[OneMor] = []
    nulls: List[AbHom] = []
    kernels: List[RelKernelResult] = []
    covers: List[OneMor] = []
    stabilized_at = None
    for i in range(1, length + 2):
        partial = TwoChainComplex(tuple(objects), tuple(maps), tuple(nulls))
        kr = relative_kernel(partial.L(i - 1), partial.L(i - 2), partial.alpha(i - 1))
        kernels.append(kr)
        if stabilized_at is None and is_zero_2group(kr.K):
            stabilized_at = i
        if stabilized_at is not None:
            cover = zero_one_mor(zero_pic2(), kr.K)
        else:
            extra = redundancy if rng is not None and i <= 2 else 0
            cover = free_cover(kr.K, rng, extra).cover
        covers.append(cover)
        objects.append(cover.source)
        maps.append(compose_one_mor(cover, kr.e))
        if i >= 2:
            nulls.append(kr.eps.h.compose(cover.f0))
    augmented = TwoChainComplex(tuple(objects), tuple(maps), tuple(nulls))
    top = length + 1
    kernels.append(relative_kernel(augmented.L(top), augmented.L(top - 1), augmented.alpha(top)))
    return Resolution(m, augmented, kernels, covers), stabilized_at


def projective_resolution(m: Pic2, length: int, seed: Optional[int] = None, redundancy: int = 2) -> Resolution:
    """Resolve ℳ by projectives P_0 .. P_length.

    Once a relative kernel is equivalent to zero the remaining objects are
    zero. A seed shuffles every cover and adds `redundancy` extra generators
    to the first two covers. The construction runs two stages past P_length
    so that exactness at the top points is decided by the actual next terms.
    """
    if length < 0:
        raise IndexOutOfRange(f"resolution length {length} is negative")
    rng = np.random.default_rng(seed) if seed is not None else None
    full, stabilized_at = _build(m, length + _LOOKAHEAD, rng, redundancy)
    res = _truncate(full, length)
    _logger.info("ResolutionBuilt", {
        "length": length,
        "seed": seed,
        "stabilized_at": stabilized_at,
        "ranks": [o.c0.gens for o in res.augmented.objects[1:]],
        "certified": res.certified,
    })
    return res


def _component(morphisms: List[OneMor], n: int, source: TwoChainComplex, target: TwoChainComplex) -> OneMor:
    if 0 <= n < len(morphisms):
        return morphisms[n]
    return zero_one_mor(source.obj(n), target.obj(n))


def _square(squares: List[AbHom], n: int, source: TwoChainComplex, target: TwoChainComplex) -> AbHom:
    if 1 <= n <= len(squares):
        return squares[n - 1]
    return AbHom.zero(source.obj(n).c0, target.obj(n - 1).c1)


def _cover_at(res: Resolution, k: int) -> OneMor:
    """G_{k+1}; zero past the computed range."""
    if k < len(res.covers):
        return res.covers[k]
    return zero_one_mor(zero_pic2(), res.kernels[k].K)


def comparison_lift(h: OneMor, pres: Resolution, qres: Resolution) -> ComplexMorphism:
    """Lift H: ℳ → 𝒩 to the augmented resolutions, degree by degree.

    Φ_i is a lift of Φ_{i−1}∘L'_i, factored through K_{i−1} of the target,
    along the target's cover G_i; the square λ_i is the negated lift cell.
    """
    if h.source != pres.target or h.target != qres.target:
        raise BoundaryMismatch("the morphism does not connect the resolved objects")
    if pres.length != qres.length:
        raise BoundaryMismatch("resolutions of different lengths")
    a, b = pres.augmented, qres.augmented
    comps: List[OneMor] = [h]
    squares: List[AbHom] = []
    for i in range(1, a.length + 1):
        candidate = compose_one_mor(a.L(i), _component(comps, i - 1, a, b))
        null_h = (-_square(squares, i - 1, a, b).compose(a.L(i).f0)
                  + _component(comps, i - 2, a, b).f1.compose(a.alpha_h(i)))
        kr = qres.kernels[i - 1]
        null = null_two_mor(compose_one_mor(candidate, kr.F), null_h)
        x, _ = factor_through_kernel(kr, candidate, null)
        phi_i, g = lift_through_ess_surjective(a.obj(i), qres.covers[i - 1], x)
        comps.append(phi_i)
        squares.append(-g.h)
    _logger.debug("ComparisonLift", {"length": a.length})
    return ComplexMorphism(a, b, tuple(comps), tuple(squares))


def comparison_homotopy(lift_a: ComplexMorphism, lift_b: ComplexMorphism, qres: Resolution) -> ChainHomotopy2:
    """T_·, τ_· with τ_i: Φ_i ⇒ M_{i+1}T_i + T_{i−1}L_i + Ψ_i; T_0 = 0.

    D_i = Φ_i − Ψ_i − T_{i−1}L_i is factored through K_i of the target with
    nullhomotopy μ_i − λ_i + τ_{i−1}L_i + T_{i−2}α_i and lifted along G_{i+1}.
    """
    a, b = lift_a.source, lift_a.target
    if lift_b.source != a or lift_b.target != b:
        raise BoundaryMismatch("lifts between different resolutions")
    if not lift_a.F(0).equals(lift_b.F(0)):
        raise Incompatible("lifts of different morphisms")
    slides: List[OneMor] = [zero_one_mor(a.obj(0), b.obj(1))]
    cells: List[AbHom] = [AbHom.zero(a.obj(0).c0, b.obj(0).c1)]

    def slide(n: int) -> OneMor:
        return slides[n] if 0 <= n < len(slides) else zero_one_mor(a.obj(n), b.obj(n + 1))

    for i in range(1, a.length + 1):
        d_i = lift_a.F(i) - lift_b.F(i) - compose_one_mor(a.L(i), slide(i - 1))
        nu_h = (lift_b.lam_h(i) - lift_a.lam_h(i)
                + cells[i - 1].compose(a.L(i).f0)
                + slide(i - 2).f1.compose(a.alpha_h(i)))
        kr = qres.kernels[i]
        x, _ = factor_through_kernel(kr, d_i, null_two_mor(compose_one_mor(d_i, kr.F), nu_h))
        t_i, g = lift_through_ess_surjective(a.obj(i), _cover_at(qres, i), x)
        slides.append(t_i)
        cells.append(-g.h)
    return ChainHomotopy2(lift_a, lift_b, tuple(slides), tuple(cells))


@dataclass(frozen=True)
class Extension:
    """𝒜 −F→ ℬ −G→ 𝒞 with φ: G∘F ⇒ 0."""
    F: OneMor
    G: OneMor
    phi: TwoMor

    def __post_init__(self):
        if self.F.target != self.G.source:
            raise BoundaryMismatch("extension maps do not compose")
        gf = compose_one_mor(self.F, self.G)
        if not self.phi.source.equals(gf) or not self.phi.target.equals(zero_one_mor(gf.source, gf.target)):
            raise BoundaryMismatch("φ is not a nullhomotopy of G∘F")


@dataclass(frozen=True)
class ExtensionCertificate:
    essentially_surjective: bool
    comparison: OneMor
    comparison_flags: MorphismFlags

    @property
    def is_extension(self) -> bool:
        return self.essentially_surjective and self.comparison_flags.equivalence


def check_extension(e: Extension) -> ExtensionCertificate:
    """G essentially surjective and the comparison 𝒜 → Ker G an equivalence."""
    ess = classify_morphism(e.G).essentially_surjective
    comparison = comparison_into_kernel(e.F, e.G, e.phi)
    return ExtensionCertificate(ess, comparison, classify_morphism(comparison))


@dataclass(frozen=True)
class Horseshoe:
    resolution: Resolution
    inclusion: ComplexMorphism  # augmented 𝒫 → augmented 𝒦
    projection: ComplexMorphism  # augmented 𝒦 → augmented 𝒬
    certificates: Tuple[ExtensionCertificate, ...] = ()  # (i_k, id, p_k) per degree

    @property
    def is_extension(self) -> bool:
        return all(c.is_extension for c in self.certificates)


def _horseshoe_stages(e: Extension, pres: Resolution, qres: Resolution):
    a, c = pres.augmented, qres.augmented
    objects: List[Pic2] = [e.F.target]
    maps: List[OneMor] = []
    nulls: List[AbHom] = []
    kernels: List[RelKernelResult] = []
    covers: List[OneMor] = []
    inc: List[OneMor] = [e.F]
    prj: List[OneMor] = [e.G]
    rho: List[AbHom] = []
    for i in range(1, a.length + 1):
        partial = TwoChainComplex(tuple(objects), tuple(maps), tuple(nulls))
        kb = relative_kernel(partial.L(i - 1), partial.L(i - 2), partial.alpha(i - 1))
        kc = qres.kernels[i - 1]
        p_prev, p_prev2 = _component(prj, i - 1, partial, c), _component(prj, i - 2, partial, c)
        lam = TwoMor(compose_one_mor(p_prev, c.L(i - 1)), compose_one_mor(partial.L(i - 1), p_prev2),
                     -_square(rho, i - 1, partial, c))
        pbar = kernel_morphism(kb, kc, p_prev, p_prev2, lam)
        through_a = compose_one_mor(a.L(i), _component(inc, i - 1, a, partial))
        null_a = null_two_mor(compose_one_mor(through_a, kb.F),
                              _component(inc, i - 2, a, partial).f1.compose(a.alpha_h(i)))
        gamma_a, _ = factor_through_kernel(kb, through_a, null_a)
        theta, g = lift_through_ess_surjective(c.obj(i), pbar, qres.covers[i - 1])
        bp = biproduct(a.obj(i), c.obj(i))
        gamma = compose_one_mor(bp.p1, gamma_a) + compose_one_mor(bp.p2, theta)
        objects.append(bp.product)
        maps.append(compose_one_mor(gamma, kb.e))
        if i >= 2:
            nulls.append(kb.eps.h.compose(gamma.f0))
        kernels.append(kb)
        covers.append(gamma)
        inc.append(bp.i1)
        prj.append(bp.p2)
        sigma = e.phi.h if i == 1 else AbHom.zero(a.obj(i - 1).c0, c.obj(i - 1).c1)
        rho.append(sigma.compose(a.L(i).f0).compose(bp.p1.f0) + g.h.compose(bp.p2.f0))
    augmented = TwoChainComplex(tuple(objects), tuple(maps), tuple(nulls))
    top = a.length
    kernels.append(relative_kernel(augmented.L(top), augmented.L(top - 1), augmented.alpha(top)))
    return Resolution(e.F.target, augmented, kernels, covers), inc, prj, rho


def horseshoe(e: Extension, pres: Resolution, qres: Resolution) -> Horseshoe:
    """Resolve ℬ by 𝒦_i = 𝒫_i × 𝒬_i so that 𝒫 → 𝒦 → 𝒬 is an extension of complexes.

    Γ = Γ_A∘p1 + Θ∘p2 covers the relative kernel of ℬ's partial resolution:
    Γ_A factors i∘L^A through it and Θ lifts the cover of 𝒬 along the induced
    map of relative kernels. When both resolutions carry their continuation the
    construction runs along it, so the middle resolution is certified the same
    way `projective_resolution` certifies its results.
    """
    e_cert = check_extension(e)
    if not e_cert.is_extension:
        raise NotAnExtension("G is not essentially surjective or 𝒜 → Ker G is not an equivalence")
    if pres.target != e.F.source or qres.target != e.G.target:
        raise BoundaryMismatch("resolutions do not resolve the ends of the extension")
    if pres.length != qres.length:
        raise BoundaryMismatch("resolutions of different lengths")
    n = pres.length
    ahead = pres.continuation is not None and qres.continuation is not None \
        and pres.continuation.length == qres.continuation.length
    if ahead:
        full, inc, prj, rho = _horseshoe_stages(e, pres.continuation, qres.continuation)
        res = _truncate(full, n)
    else:
        full, inc, prj, rho = _horseshoe_stages(e, pres, qres)
        res = Resolution(full.target, full.augmented, full.kernels, full.covers,
                         [is_relative_2exact_at(full.augmented, k) for k in range(n + 2)])
    a, b, c = pres.augmented, res.augmented, qres.augmented
    inc, prj, rho = inc[:n + 2], prj[:n + 2], rho[:n + 1]
    inclusion = ComplexMorphism(a, b, tuple(inc),
                                tuple(AbHom.zero(a.obj(k + 1).c0, b.obj(k).c1) for k in range(n + 1)))
    projection = ComplexMorphism(b, c, tuple(prj), tuple(rho))
    certificates = [e_cert]
    for k in range(1, n + 2):
        split = compose_one_mor(inc[k], prj[k])
        zero_cell = null_two_mor(split, AbHom.zero(split.source.c0, split.target.c1))
        certificates.append(check_extension(Extension(inc[k], prj[k], zero_cell)))
    out = Horseshoe(res, inclusion, projection, tuple(certificates))
    _logger.info("HorseshoeBuilt", {"length": res.length, "certified": res.certified,
                                    "extension": out.is_extension})
    return out


def classical_free_resolution(a: FgAbPresentation) -> Tuple[List[FgAbPresentation], List[IntMatrix]]:
    """0 → Z^t −diag(d)→ Z^{t+r} → A from the invariant factors of A."""
    torsion, free_rank = a.invariants()
    t = len(torsion)
    rows = [[d if i == j else 0 for j in range(t)] for i, d in enumerate(torsion)]
    rows += [[0] * t for _ in range(free_rank)]
    return [FgAbPresentation.free(t + free_rank), FgAbPresentation.free(t)], [IntMatrix.from_rows(rows, t)]
