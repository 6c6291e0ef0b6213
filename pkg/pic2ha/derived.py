"""Additive 2-functors, their left derived 2-functors and the long 2-exact sequence."""
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Tuple, Union

from .complexes import (
    ChainHomotopy2,
    ComplexMorphism,
    ExactnessCertificate,
    Homology,
    TwoChainComplex,
    homology,
    homology_data,
    induced_homology_morphism,
    is_relative_2exact_at,
    truncate_morphism_left,
)
from .errors import IllFormed, NotAnExtension, UnsupportedFunctorKind
from .logger import get_logger
from .pic2core import (
    MorphismFlags,
    OneMor,
    Pic2,
    TwoMor,
    biproduct,
    classify_morphism,
    homotopy_invariants,
    identity,
    pair_into_biproduct,
)
from .relkc import is_2exact_pair
from .resolve import Extension, Resolution, check_extension, comparison_lift, horseshoe, projective_resolution
from .zlin import (
    AbHom,
    FgAbPresentation,
    IntMatrix,
    factor_through_injection,
    factor_through_surjection,
    kernel_basis,
    tor1_oracle,
)

_logger = get_logger("pic2ha.derived")

TENSOR = "tensor"
HOM = "hom"


@lru_cache(maxsize=1024)
def _tensor_group(g: FgAbPresentation, q: FgAbPresentation) -> FgAbPresentation:
    """G ⊗ Q on generators g*m + j; relations R⊗I and I⊗S."""
    m = q.gens
    rels = IntMatrix.vstack(g.relations.kron(IntMatrix.identity(m)),
                            IntMatrix.identity(g.gens).kron(q.relations))
    return FgAbPresentation(g.gens * m, rels)


@lru_cache(maxsize=1024)
def _hom_group(q: FgAbPresentation, g: FgAbPresentation) -> AbHom:
    """Inclusion Hom(Q, G) → G^m; coordinate j*k + i is coordinate i of the image of Q's generator j."""
    k = g.gens
    constraint = AbHom(g.power(q.gens), g.power(q.relations.rows), q.relations.kron(IntMatrix.identity(k)))
    _, incl = kernel_basis(constraint)
    return incl


@dataclass(frozen=True)
class AdditiveFunctor:
    kind: str
    coefficient: FgAbPresentation

    def __post_init__(self):
        if self.kind not in (TENSOR, HOM):
            raise UnsupportedFunctorKind(f"unknown functor kind {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> "AdditiveFunctor":
        """`tensor:<group>` or `hom:<group>` with the cli group notation."""
        from .cli.formats import parse_group

        kind, sep, group = text.partition(":")
        if not sep:
            raise UnsupportedFunctorKind(f"functor {text!r} is not of the form kind:group")
        return cls(kind.strip(), parse_group(group))

    def describe(self) -> str:
        return f"{self.kind}:{self.coefficient.describe()}"

    def group(self, g: FgAbPresentation) -> FgAbPresentation:
        if self.kind == TENSOR:
            return _tensor_group(g, self.coefficient)
        return _hom_group(self.coefficient, g).source

    def hom(self, f: AbHom) -> AbHom:
        if self.kind == TENSOR:
            mat = f.matrix.kron(IntMatrix.identity(self.coefficient.gens))
            return AbHom(self.group(f.source), self.group(f.target), mat)
        incl_s = _hom_group(self.coefficient, f.source)
        incl_t = _hom_group(self.coefficient, f.target)
        blocks = IntMatrix.identity(self.coefficient.gens).kron(f.matrix)
        pointwise = AbHom(incl_s.target, incl_t.target, blocks)
        return factor_through_injection(incl_t, pointwise.compose(incl_s))


Applicable = Union[Pic2, OneMor, TwoMor, TwoChainComplex, ComplexMorphism, ChainHomotopy2]


def apply_functor(t: AdditiveFunctor, x: Applicable) -> Applicable:
    """Degreewise action on every kind of object in the engine."""
    if isinstance(x, Pic2):
        return Pic2(t.group(x.c1), t.group(x.c0), t.hom(x.d))
    if isinstance(x, OneMor):
        return OneMor(apply_functor(t, x.source), apply_functor(t, x.target), t.hom(x.f1), t.hom(x.f0))
    if isinstance(x, TwoMor):
        return TwoMor(apply_functor(t, x.source), apply_functor(t, x.target), t.hom(x.h))
    if isinstance(x, TwoChainComplex):
        return TwoChainComplex(
            tuple(apply_functor(t, o) for o in x.objects),
            tuple(apply_functor(t, m) for m in x.maps),
            tuple(t.hom(h) for h in x.nulls),
        )
    if isinstance(x, ComplexMorphism):
        return ComplexMorphism(
            apply_functor(t, x.source),
            apply_functor(t, x.target),
            tuple(apply_functor(t, f) for f in x.components),
            tuple(t.hom(h) for h in x.squares),
        )
    if isinstance(x, ChainHomotopy2):
        return ChainHomotopy2(
            apply_functor(t, x.source),
            apply_functor(t, x.target),
            tuple(apply_functor(t, s) for s in x.slides),
            tuple(t.hom(h) for h in x.cells),
        )
    raise IllFormed(f"cannot apply a functor to {type(x).__name__}")


@dataclass(frozen=True)
class DerivedResult:
    functor: AdditiveFunctor
    input: Pic2
    degree: int
    value: Pic2
    resolution_hash: str

    @property
    def pi0(self) -> FgAbPresentation:
        return homotopy_invariants(self.value)[0]

    @property
    def pi1(self) -> FgAbPresentation:
        return homotopy_invariants(self.value)[1]

    def to_dict(self) -> dict:
        return {
            "functor": self.functor.describe(),
            "degree": self.degree,
            "pi0": self.pi0.describe(),
            "pi1": self.pi1.describe(),
            "resolution_hash": self.resolution_hash,
        }


def resolution_length(i: int, length: Optional[int] = None) -> int:
    """H_i reads objects up to degree i + 2."""
    return max(length or 0, i + 2)


def derived(t: AdditiveFunctor, m: Pic2, i: int, length: Optional[int] = None, seed: Optional[int] = None,
            resolution: Optional[Resolution] = None) -> DerivedResult:
    """L_iT(ℳ) = H_i(T(P_·))."""
    if i < 0:
        raise IllFormed(f"derived degree {i} is negative")
    res = resolution or projective_resolution(m, resolution_length(i, length), seed=seed)
    value = homology(apply_functor(t, res.complex), i)
    result = DerivedResult(t, m, i, value, res.content_hash())
    _logger.debug("DerivedComputed", result.to_dict())
    return result


def derived_morphism(t: AdditiveFunctor, h: OneMor, i: int, length: Optional[int] = None) -> OneMor:
    """L_iT(H) through the comparison lift of H."""
    n = resolution_length(i, length)
    pres = projective_resolution(h.source, n)
    qres = projective_resolution(h.target, n)
    lift = truncate_morphism_left(comparison_lift(h, pres, qres))
    return induced_homology_morphism(apply_functor(t, lift), i)


@dataclass(frozen=True)
class IndependenceReport:
    first: DerivedResult
    second: DerivedResult
    invariants_equal: bool
    comparison: MorphismFlags

    @property
    def passed(self) -> bool:
        return self.invariants_equal and self.comparison.equivalence


def resolution_independence_check(t: AdditiveFunctor, m: Pic2, i: int, seed_a: Optional[int],
                                  seed_b: Optional[int], length: Optional[int] = None) -> IndependenceReport:
    n = resolution_length(i, length)
    pres = projective_resolution(m, n, seed=seed_a)
    qres = projective_resolution(m, n, seed=seed_b)
    first = derived(t, m, i, resolution=pres)
    second = derived(t, m, i, resolution=qres)
    equal = (first.pi0, first.pi1) == (second.pi0, second.pi1)
    lift = truncate_morphism_left(comparison_lift(identity(m), pres, qres))
    flags = classify_morphism(induced_homology_morphism(apply_functor(t, lift), i))
    _logger.info("ResolutionIndependence", {"degree": i, "equal": equal, "equivalence": flags.equivalence})
    return IndependenceReport(first, second, equal, flags)


def biproduct_preservation_check(t: AdditiveFunctor, a: Pic2, b: Pic2) -> Tuple[OneMor, MorphismFlags]:
    """The comparison T(𝒜×ℬ) → T(𝒜)×T(ℬ) built from T(p1), T(p2), with its classification."""
    bp = biproduct(a, b)
    images = biproduct(apply_functor(t, a), apply_functor(t, b))
    comparison = pair_into_biproduct(images, apply_functor(t, bp.p1), apply_functor(t, bp.p2))
    return comparison, classify_morphism(comparison)


@dataclass(frozen=True)
class RightExactness:
    essentially_surjective: bool
    exact_in_middle: bool

    @property
    def holds(self) -> bool:
        return self.essentially_surjective and self.exact_in_middle


def right_exactness_check(t: AdditiveFunctor, e: Extension) -> RightExactness:
    """T(𝒜) → T(ℬ) → T(𝒞) → 0 is 2-exact at T(ℬ) and at T(𝒞)."""
    tf, tg, tphi = apply_functor(t, e.F), apply_functor(t, e.G), apply_functor(t, e.phi)
    ess = classify_morphism(tg).essentially_surjective
    return RightExactness(ess, is_2exact_pair(tf, tphi, tg).exact)


@dataclass
class LongSequence:
    """S_{3n} = L_nT(𝒞), S_{3n+1} = L_nT(ℬ), S_{3n+2} = L_nT(𝒜); maps S_s → S_{s−1}."""
    entries: List[Pic2]
    labels: List[str]
    complex: TwoChainComplex
    certificates: List[ExactnessCertificate]
    right_end_surjective: bool

    @property
    def certified(self) -> bool:
        return self.right_end_surjective and all(self.certificates)

    def pi0_sequence(self) -> List[FgAbPresentation]:
        return [homotopy_invariants(s)[0] for s in self.entries]


def _block(rows: int, cols: int, top_left: IntMatrix, extra_rows: int, extra_cols: int) -> IntMatrix:
    """[[top_left, 0], [0, 0]] padded to (rows + extra_rows) × (cols + extra_cols)."""
    return IntMatrix.vstack(
        IntMatrix.hstack(top_left, IntMatrix.zeros(rows, extra_cols)),
        IntMatrix.zeros(extra_rows, cols + extra_cols),
    )


class _SequenceBuilder:
    """Homology of T(𝒫), T(𝒦), T(𝒬) and the maps between them; all three are discrete."""

    def __init__(self, x: TwoChainComplex, y: TwoChainComplex, z: TwoChainComplex,
                 inc: ComplexMorphism, prj: ComplexMorphism):
        self.x, self.y, self.z = x, y, z
        self.inc, self.prj = inc, prj
        self._cache = {}

    def data(self, which: str, n: int) -> Homology:
        key = (which, n)
        if key not in self._cache:
            self._cache[key] = homology_data(getattr(self, which), n)
        return self._cache[key]

    def theta(self, k: int) -> IntMatrix:
        """𝒬_k → 𝒫_{k−1} component of the middle differential."""
        mat = self.y.L(k).f0.matrix
        rows = range(self.x.obj(k - 1).c0.gens)
        px = self.x.obj(k).c0.gens
        cols = range(px, px + self.z.obj(k).c0.gens)
        return mat.select_rows(rows).select_cols(cols)

    def connecting(self, n: int) -> OneMor:
        """δ_n: H_nT(𝒬) → H_{n−1}T(𝒫); z ↦ θ_n z on objects, [z'] ↦ [−θ_{n+1} z'] on morphisms."""
        hz, hx = self.data("z", n), self.data("x", n - 1)
        z, x = self.z, self.x
        raw0 = _block(x.obj(n - 1).c0.gens, z.obj(n).c0.gens, self.theta(n),
                      x.obj(n - 2).c1.gens, z.obj(n - 1).c1.gens)
        raw1 = _block(x.obj(n).c0.gens, z.obj(n + 1).c0.gens, -self.theta(n + 1),
                      x.obj(n - 1).c1.gens, z.obj(n).c1.gens)
        f0 = factor_through_injection(hx.cycles, AbHom(hz.cycles.target, hx.cycles.target, raw0).compose(hz.cycles))
        f1 = factor_through_surjection(hz.boundaries,
                                       hx.boundaries.compose(AbHom(hz.boundaries.source, hx.boundaries.source, raw1)))
        return OneMor(hz.pic2, hx.pic2, f1, f0)

    def null_after_connecting(self, n: int) -> AbHom:
        """H(i)∘δ_n ⇒ 0: z ↦ [(0, z)]."""
        hz, hy = self.data("z", n), self.data("y", n - 1)
        z, y, x = self.z, self.y, self.x
        inj2 = IntMatrix.vstack(IntMatrix.zeros(x.obj(n).c0.gens, z.obj(n).c0.gens),
                                IntMatrix.identity(z.obj(n).c0.gens))
        raw = _block(y.obj(n).c0.gens, z.obj(n).c0.gens, inj2, y.obj(n - 1).c1.gens, z.obj(n - 1).c1.gens)
        return hy.boundaries.compose(AbHom(hz.cycles.target, hy.boundaries.source, raw)).compose(hz.cycles)

    def null_before_connecting(self, n: int) -> AbHom:
        """δ_n∘H(p) ⇒ 0: (x, z) ↦ [−x]."""
        hy, hx = self.data("y", n), self.data("x", n - 1)
        y, x, z = self.y, self.x, self.z
        proj1 = -IntMatrix.hstack(IntMatrix.identity(x.obj(n).c0.gens),
                                  IntMatrix.zeros(x.obj(n).c0.gens, z.obj(n).c0.gens))
        raw = _block(x.obj(n).c0.gens, y.obj(n).c0.gens, proj1, x.obj(n - 1).c1.gens, y.obj(n - 1).c1.gens)
        return hx.boundaries.compose(AbHom(hy.cycles.target, hx.boundaries.source, raw)).compose(hy.cycles)


def long_2exact_sequence(t: AdditiveFunctor, e: Extension, length: int) -> LongSequence:
    """L_nT of an extension for n = 0..length, certified point by point."""
    if t.kind != TENSOR:
        raise UnsupportedFunctorKind("the long 2-exact sequence is built for tensor functors only")
    check = check_extension(e)
    if not check.is_extension:
        raise NotAnExtension("input is not an extension")
    n_res = length + 2
    pres = projective_resolution(e.F.source, n_res)
    qres = projective_resolution(e.G.target, n_res)
    hs = horseshoe(e, pres, qres)
    inc = apply_functor(t, truncate_morphism_left(hs.inclusion))
    prj = apply_functor(t, truncate_morphism_left(hs.projection))
    b = _SequenceBuilder(inc.source, inc.target, prj.target, inc, prj)

    entries: List[Pic2] = []
    labels: List[str] = []
    maps: List[OneMor] = []
    nulls: List[AbHom] = []
    for n in range(length + 1):
        for which, name in (("z", "C"), ("y", "B"), ("x", "A")):
            entries.append(b.data(which, n).pic2)
            labels.append(f"L{n}T({name})")
    for s in range(1, len(entries)):
        n, r = divmod(s, 3)
        if r == 1:
            maps.append(induced_homology_morphism(prj, n, b.data("y", n), b.data("z", n)))
        elif r == 2:
            maps.append(induced_homology_morphism(inc, n, b.data("x", n), b.data("y", n)))
        else:
            maps.append(b.connecting(n))
    for s in range(2, len(entries)):
        n, r = divmod(s, 3)
        if r == 2:
            nulls.append(AbHom.zero(entries[s].c0, entries[s - 2].c1))
        elif r == 0:
            nulls.append(b.null_after_connecting(n))
        else:
            nulls.append(b.null_before_connecting(n))
    seq = TwoChainComplex(tuple(entries), tuple(maps), tuple(nulls))
    certificates = []
    for p in range(1, seq.length):
        window = TwoChainComplex(
            (seq.obj(p - 1), seq.obj(p), seq.obj(p + 1)),
            (seq.L(p), seq.L(p + 1)),
            (seq.alpha_h(p + 1),),
        )
        cert = is_relative_2exact_at(window, 1)
        certificates.append(ExactnessCertificate(p, cert.exact, cert.pi0, cert.pi1))
    right_end = classify_morphism(seq.L(1)).essentially_surjective
    out = LongSequence(entries, labels, seq, certificates, right_end)
    _logger.info("LongSequenceBuilt", {"functor": t.describe(), "points": len(entries), "certified": out.certified})
    return out


def tensor_group(g: FgAbPresentation, q: FgAbPresentation) -> FgAbPresentation:
    return _tensor_group(g, q).canonical()[0]


def tor_long_exact_oracle(a: FgAbPresentation, b: FgAbPresentation, c: FgAbPresentation,
                          q: FgAbPresentation) -> List[FgAbPresentation]:
    """Classical … → Tor(A,Q) → C⊗Q ← … read in sequence order: C⊗Q, B⊗Q, A⊗Q, Tor(C,Q), Tor(B,Q), Tor(A,Q)."""
    return [
        tensor_group(c, q), tensor_group(b, q), tensor_group(a, q),
        tor1_oracle(c, q), tor1_oracle(b, q), tor1_oracle(a, q),
    ]
