"""Symmetric 2-groups as 2-term complexes d: C1 → C0 of presented groups.

Objects are elements of c0; a morphism x → y is an m in c1 with
y = x + d(m). 1-morphisms are chain maps (f1, f0). A 2-morphism h: F ⇒ G is a
homotopy h: source.c0 → target.c1 with

    G.f0 - F.f0 = d_target ∘ h      and      G.f1 - F.f1 = h ∘ d_source.

Every constructor checks its identities and raises IllFormed otherwise.
"""
from dataclasses import dataclass
from typing import Dict, List, Tuple

from .errors import BoundaryMismatch, IllFormed
from .logger import get_logger
from .zlin import (
    AbHom,
    FgAbPresentation,
    IntMatrix,
    MapEquation,
    MapTerm,
    Vector,
    cokernel_presentation,
    hom_direct_sum,
    hom_pair,
    is_injective,
    is_isomorphism,
    is_surjective,
    kernel_basis,
    lift_generators,
    solve,
    solve_map_equations,
)

_logger = get_logger("pic2ha.pic2core")


@dataclass(frozen=True)
class Pic2:
    c1: FgAbPresentation
    c0: FgAbPresentation
    d: AbHom

    def __post_init__(self):
        if self.d.source != self.c1 or self.d.target != self.c0:
            raise IllFormed("differential does not run from c1 to c0")

    def is_projective_shape(self) -> bool:
        """disc of a free group: no degree-1 generators and no relations in degree 0."""
        return self.c1.gens == 0 and self.c0.is_free_presentation()

    def is_discrete(self) -> bool:
        return self.c1.is_trivial()

    def hom_set(self, x: Vector, y: Vector) -> List[Vector]:
        """Morphisms x → y by brute force (finite c1 only)."""
        return [m for m in self.c1.elements() if self.c0.equal_elements(tuple(a + b for a, b in zip(x, self.d.apply(m))), y)]


def make_pic2(c1: FgAbPresentation, c0: FgAbPresentation, d: AbHom) -> Pic2:
    if d.source != c1 or d.target != c0:
        raise IllFormed("differential boundaries do not match the given groups")
    return Pic2(c1, c0, d)


def pic2_from_matrix(c1: FgAbPresentation, c0: FgAbPresentation, d: IntMatrix) -> Pic2:
    return Pic2(c1, c0, AbHom(c1, c0, d))


def zero_pic2() -> Pic2:
    z = FgAbPresentation.trivial()
    return Pic2(z, z, AbHom.zero(z, z))


def disc(group: FgAbPresentation) -> Pic2:
    z = FgAbPresentation.trivial()
    return Pic2(z, group, AbHom.zero(z, group))


def homotopy_invariants(p: Pic2) -> Tuple[FgAbPresentation, FgAbPresentation]:
    """(pi0, pi1) = (coker d, ker d), both canonical."""
    pi0, _ = cokernel_presentation(p.d)
    pi1, _ = kernel_basis(p.d)
    return pi0, pi1


def is_zero_2group(p: Pic2) -> bool:
    pi0, pi1 = homotopy_invariants(p)
    return pi0.is_trivial() and pi1.is_trivial()


@dataclass(frozen=True)
class OneMor:
    source: Pic2
    target: Pic2
    f1: AbHom
    f0: AbHom

    def __post_init__(self):
        if (self.f1.source, self.f1.target) != (self.source.c1, self.target.c1):
            raise IllFormed("degree-1 component has the wrong boundaries")
        if (self.f0.source, self.f0.target) != (self.source.c0, self.target.c0):
            raise IllFormed("degree-0 component has the wrong boundaries")
        lhs = self.f0.compose(self.source.d)
        rhs = self.target.d.compose(self.f1)
        if not lhs.equals(rhs):
            raise IllFormed(f"chain condition fails on degree-1 generators {lhs.residual(rhs)}")

    def __add__(self, other: "OneMor") -> "OneMor":
        _check_parallel(self, other)
        return OneMor(self.source, self.target, self.f1 + other.f1, self.f0 + other.f0)

    def __neg__(self) -> "OneMor":
        return OneMor(self.source, self.target, -self.f1, -self.f0)

    def __sub__(self, other: "OneMor") -> "OneMor":
        return self + (-other)

    def equals(self, other: "OneMor") -> bool:
        return (self.source, self.target) == (other.source, other.target) \
            and self.f1.equals(other.f1) and self.f0.equals(other.f0)


def _check_parallel(f: OneMor, g: OneMor) -> None:
    if f.source != g.source or f.target != g.target:
        raise BoundaryMismatch("1-morphisms are not parallel")


def identity(p: Pic2) -> OneMor:
    return OneMor(p, p, AbHom.identity(p.c1), AbHom.identity(p.c0))


def zero_one_mor(source: Pic2, target: Pic2) -> OneMor:
    return OneMor(source, target, AbHom.zero(source.c1, target.c1), AbHom.zero(source.c0, target.c0))


def compose_one_mor(f: OneMor, g: OneMor) -> OneMor:
    """G∘F: first f, then g."""
    if f.target != g.source:
        raise BoundaryMismatch("cannot compose: target of the first is not the source of the second")
    return OneMor(f.source, g.target, g.f1.compose(f.f1), g.f0.compose(f.f0))


@dataclass(frozen=True)
class TwoMor:
    source: OneMor  # "from"
    target: OneMor  # "to"
    h: AbHom

    def __post_init__(self):
        _check_parallel(self.source, self.target)
        src, tgt = self.source.source, self.source.target
        if (self.h.source, self.h.target) != (src.c0, tgt.c1):
            raise IllFormed("homotopy must run from source.c0 to target.c1")
        deg0 = self.target.f0 - self.source.f0
        if not deg0.equals(tgt.d.compose(self.h)):
            raise IllFormed(f"degree-0 homotopy identity fails on generators {deg0.residual(tgt.d.compose(self.h))}")
        deg1 = self.target.f1 - self.source.f1
        if not deg1.equals(self.h.compose(src.d)):
            raise IllFormed(f"degree-1 homotopy identity fails on generators {deg1.residual(self.h.compose(src.d))}")

    def equals(self, other: "TwoMor") -> bool:
        return self.source.equals(other.source) and self.target.equals(other.target) and self.h.equals(other.h)

    @classmethod
    def canonical(cls, f: OneMor) -> "TwoMor":
        return canonical_two_mor(f)

    def component(self, x: Vector) -> Vector:
        """The morphism F(x) → G(x) in the target 2-group."""
        return self.h.apply(x)


def canonical_two_mor(f: OneMor) -> TwoMor:
    """The identity 2-cell ("can") on f."""
    return TwoMor(f, f, AbHom.zero(f.source.c0, f.target.c1))


def two_mor_from_matrix(f: OneMor, g: OneMor, h: IntMatrix) -> TwoMor:
    return TwoMor(f, g, AbHom(f.source.c0, g.target.c1, h))


def null_two_mor(f: OneMor, h: AbHom) -> TwoMor:
    """2-morphism f ⇒ 0 with homotopy h."""
    return TwoMor(f, zero_one_mor(f.source, f.target), h)


def vertical(alpha: TwoMor, beta: TwoMor) -> TwoMor:
    """beta after alpha: F ⇒ G ⇒ K."""
    if not alpha.target.equals(beta.source):
        raise BoundaryMismatch("vertical composite of non-adjacent 2-morphisms")
    return TwoMor(alpha.source, beta.target, alpha.h + beta.h)


def inverse_two_mor(alpha: TwoMor) -> TwoMor:
    return TwoMor(alpha.target, alpha.source, -alpha.h)


def whisker_left(k: OneMor, alpha: TwoMor) -> TwoMor:
    """K∘alpha: K∘F ⇒ K∘G, homotopy K.f1 ∘ h."""
    return TwoMor(compose_one_mor(alpha.source, k), compose_one_mor(alpha.target, k), k.f1.compose(alpha.h))


def whisker_right(alpha: TwoMor, k: OneMor) -> TwoMor:
    """alpha∘K: F∘K ⇒ G∘K, homotopy h ∘ K.f0."""
    return TwoMor(compose_one_mor(k, alpha.source), compose_one_mor(k, alpha.target), alpha.h.compose(k.f0))


def horizontal(alpha: TwoMor, beta: TwoMor) -> TwoMor:
    """beta ⋆ alpha: G∘F ⇒ G'∘F' for alpha: F ⇒ F' and beta: G ⇒ G'."""
    return vertical(whisker_left(beta.source, alpha), whisker_right(beta, alpha.target))


def one_mor_pi0(f: OneMor) -> AbHom:
    """Induced map pi0(source) → pi0(target) in canonical coordinates."""
    pi0_s, p_s = cokernel_presentation(f.source.d)
    pi0_t, p_t = cokernel_presentation(f.target.d)
    back = lift_generators(p_s)
    return AbHom(pi0_s, pi0_t, p_t.matrix @ f.f0.matrix @ back)


def one_mor_pi1(f: OneMor) -> AbHom:
    """Induced map pi1(source) → pi1(target) in canonical coordinates."""
    _, i_s = kernel_basis(f.source.d)
    pi1_t, i_t = kernel_basis(f.target.d)
    images = f.f1.compose(i_s)
    lifted = IntMatrix.from_columns([solve(i_t, c) for c in images.matrix.columns()], pi1_t.gens)
    return AbHom(i_s.source, pi1_t, lifted)


@dataclass(frozen=True)
class MorphismFlags:
    essentially_surjective: bool
    faithful: bool
    full: bool
    equivalence: bool

    def to_dict(self) -> Dict[str, bool]:
        return {
            "essentially_surjective": self.essentially_surjective,
            "faithful": self.faithful,
            "full": self.full,
            "equivalence": self.equivalence,
        }


def classify_morphism(f: OneMor) -> MorphismFlags:
    pi0 = one_mor_pi0(f)
    pi1 = one_mor_pi1(f)
    pi0_surj, pi0_inj = is_surjective(pi0), is_injective(pi0)
    pi1_surj, pi1_inj = is_surjective(pi1), is_injective(pi1)
    return MorphismFlags(
        essentially_surjective=pi0_surj,
        faithful=pi1_inj,
        full=pi1_surj and pi0_inj,
        equivalence=pi0_surj and pi0_inj and pi1_surj and pi1_inj,
    )


def is_equivalence(f: OneMor) -> bool:
    return is_isomorphism(one_mor_pi0(f)) and is_isomorphism(one_mor_pi1(f))


def quasi_inverse(f: OneMor) -> Tuple[OneMor, TwoMor, TwoMor]:
    """For an equivalence F: P → Q, a G: Q → P with G∘F ⇒ id and F∘G ⇒ id.

    (G1, G0, u, v) solve one joint linear system. A strict inverse need not
    exist when the groups are not free, e.g. [Z -2-> Z] → disc(Z/2); that case
    raises NoSolution.
    """
    if not is_equivalence(f):
        raise IllFormed("quasi-inverse requested for a non-equivalence")
    p, q = f.source, f.target
    eye = IntMatrix.identity
    g1, g0, u, v = 0, 1, 2, 3
    equations = [
        # d_P G1 = G0 d_Q
        MapEquation(p.c0, IntMatrix.zeros(p.c0.gens, q.c1.gens), (
            MapTerm(g1, p.d.matrix, eye(q.c1.gens)),
            MapTerm(g0, -eye(p.c0.gens), q.d.matrix))),
        # F0 G0 + d_Q u = id
        MapEquation(q.c0, eye(q.c0.gens), (
            MapTerm(g0, f.f0.matrix, eye(q.c0.gens)),
            MapTerm(u, q.d.matrix, eye(q.c0.gens)))),
        # F1 G1 + u d_Q = id
        MapEquation(q.c1, eye(q.c1.gens), (
            MapTerm(g1, f.f1.matrix, eye(q.c1.gens)),
            MapTerm(u, eye(q.c1.gens), q.d.matrix))),
        # G0 F0 + d_P v = id
        MapEquation(p.c0, eye(p.c0.gens), (
            MapTerm(g0, eye(p.c0.gens), f.f0.matrix),
            MapTerm(v, p.d.matrix, eye(p.c0.gens)))),
        # G1 F1 + v d_P = id
        MapEquation(p.c1, eye(p.c1.gens), (
            MapTerm(g1, eye(p.c1.gens), f.f1.matrix),
            MapTerm(v, eye(p.c1.gens), p.d.matrix))),
    ]
    sol = solve_map_equations([(q.c1, p.c1), (q.c0, p.c0), (q.c0, q.c1), (p.c0, p.c1)], equations)
    g = OneMor(q, p, sol[g1], sol[g0])
    fg_to_id = TwoMor(compose_one_mor(g, f), identity(q), sol[u])
    gf_to_id = TwoMor(compose_one_mor(f, g), identity(p), sol[v])
    _logger.debug("QuasiInverse", {"source_gens": p.c0.gens, "target_gens": q.c0.gens})
    return g, gf_to_id, fg_to_id


def is_equivalent(p: Pic2, q: Pic2) -> bool:
    """Equal canonical pi0 and pi1.

    Strict Picard categories coming from complexes have vanishing
    k-invariant, so the pair of homotopy groups decides equivalence.
    """
    pp0, pp1 = homotopy_invariants(p)
    qp0, qp1 = homotopy_invariants(q)
    return pp0 == qp0 and pp1 == qp1


@dataclass(frozen=True)
class Biproduct:
    product: Pic2
    i1: OneMor
    i2: OneMor
    p1: OneMor
    p2: OneMor


def biproduct(p: Pic2, q: Pic2) -> Biproduct:
    prod = Pic2(p.c1.direct_sum(q.c1), p.c0.direct_sum(q.c0), hom_direct_sum(p.d, q.d))

    def inj(first: bool, grp: FgAbPresentation, other: FgAbPresentation, total: FgAbPresentation) -> AbHom:
        k, m = grp.gens, other.gens
        rows = []
        for i in range(total.gens):
            if first:
                rows.append([1 if (i < k and i == j) else 0 for j in range(k)])
            else:
                rows.append([1 if (i >= m and i - m == j) else 0 for j in range(k)])
        return AbHom(grp, total, IntMatrix.from_rows(rows, k))

    i1 = OneMor(p, prod, inj(True, p.c1, q.c1, prod.c1), inj(True, p.c0, q.c0, prod.c0))
    i2 = OneMor(q, prod, inj(False, q.c1, p.c1, prod.c1), inj(False, q.c0, p.c0, prod.c0))
    p1 = OneMor(prod, p, AbHom(prod.c1, p.c1, i1.f1.matrix.transpose()), AbHom(prod.c0, p.c0, i1.f0.matrix.transpose()))
    p2 = OneMor(prod, q, AbHom(prod.c1, q.c1, i2.f1.matrix.transpose()), AbHom(prod.c0, q.c0, i2.f0.matrix.transpose()))
    return Biproduct(prod, i1, i2, p1, p2)


def pair_into_biproduct(bp: Biproduct, f: OneMor, g: OneMor) -> OneMor:
    """The unique X → P×Q with p1∘u = f and p2∘u = g."""
    if f.source != g.source:
        raise BoundaryMismatch("pairing 1-morphisms with different sources")
    return OneMor(f.source, bp.product, hom_pair(f.f1, g.f1), hom_pair(f.f0, g.f0))


def copair_from_biproduct(bp: Biproduct, f: OneMor, g: OneMor) -> OneMor:
    """f∘p1 + g∘p2: P×Q → Y."""
    return compose_one_mor(bp.p1, f) + compose_one_mor(bp.p2, g)


def enumerate_morphisms(p: Pic2, x: Vector, y: Vector) -> int:
    """Size of the hom-set x → y; equals |pi1| when one morphism exists, else 0."""
    return len(p.hom_set(x, y))
