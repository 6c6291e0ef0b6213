"""Bounded 2-chain complexes of Pic2 values and their homology.

Indexing is homological: L_n: A_n → A_{n−1} for 1 ≤ n ≤ N and
α_n: L_{n−1}∘L_n ⇒ 0 for 2 ≤ n ≤ N. Outside [0, N] the complex is completed
with zero objects, zero maps and zero 2-cells. Nullhomotopies and squares are
stored as bare homotopy matrices so that broken input can be reported
instead of rejected at construction.
"""
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from .errors import BoundaryMismatch, CertificateFailure, IllFormed, IndexOutOfRange, InvalidMorphism
from .logger import get_logger
from .pic2core import (
    OneMor,
    Pic2,
    TwoMor,
    compose_one_mor,
    disc,
    homotopy_invariants,
    identity,
    null_two_mor,
    zero_one_mor,
    zero_pic2,
)
from .relkc import factor_through_kernel, relative_cokernel, relative_kernel
from .zlin import (
    AbHom,
    FgAbPresentation,
    IntMatrix,
    cokernel_presentation,
    factor_through_injection,
    factor_through_surjection,
    kernel_basis,
)

_logger = get_logger("pic2ha.complexes")


@dataclass(frozen=True)
class TwoChainComplex:
    objects: Tuple[Pic2, ...]
    maps: Tuple[OneMor, ...]  # maps[k] = L_{k+1}
    nulls: Tuple[AbHom, ...]  # nulls[k] = homotopy of α_{k+2}

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))
        object.__setattr__(self, "maps", tuple(self.maps))
        object.__setattr__(self, "nulls", tuple(self.nulls))
        if not self.objects:
            raise IllFormed("a complex needs at least one object")
        n = self.length
        if len(self.maps) != n or len(self.nulls) != max(n - 1, 0):
            raise IllFormed(f"complex of length {n} needs {n} maps and {max(n - 1, 0)} nullhomotopies")
        for k, m in enumerate(self.maps):
            if m.source != self.objects[k + 1] or m.target != self.objects[k]:
                raise BoundaryMismatch(f"map {k + 1} does not run from object {k + 1} to object {k}")
        for k, h in enumerate(self.nulls):
            if h.source != self.objects[k + 2].c0 or h.target != self.objects[k].c1:
                raise BoundaryMismatch(f"nullhomotopy {k + 2} has the wrong boundaries")

    @property
    def length(self) -> int:
        return len(self.objects) - 1

    def obj(self, n: int) -> Pic2:
        return self.objects[n] if 0 <= n <= self.length else zero_pic2()

    def L(self, n: int) -> OneMor:
        if 1 <= n <= self.length:
            return self.maps[n - 1]
        return zero_one_mor(self.obj(n), self.obj(n - 1))

    def alpha_h(self, n: int) -> AbHom:
        if 2 <= n <= self.length:
            return self.nulls[n - 2]
        return AbHom.zero(self.obj(n).c0, self.obj(n - 2).c1)

    def alpha(self, n: int) -> TwoMor:
        return null_two_mor(compose_one_mor(self.L(n), self.L(n - 1)), self.alpha_h(n))

    def is_discrete(self) -> bool:
        return all(o.is_discrete() for o in self.objects)


def discrete_complex(groups: Sequence[FgAbPresentation], matrices: Sequence[IntMatrix]) -> TwoChainComplex:
    """disc(A_0) ← disc(A_1) ← … with zero nullhomotopies; matrices[k] = L_{k+1}."""
    objects = [disc(g) for g in groups]
    maps = []
    for k, m in enumerate(matrices):
        src, tgt = objects[k + 1], objects[k]
        maps.append(OneMor(src, tgt, AbHom.zero(src.c1, tgt.c1), AbHom(src.c0, tgt.c0, m)))
    nulls = [AbHom.zero(objects[k + 2].c0, objects[k].c1) for k in range(len(objects) - 2)]
    return TwoChainComplex(tuple(objects), tuple(maps), tuple(nulls))


@dataclass(frozen=True)
class Violation:
    index: int
    identity: str
    residual: List[int]

    def to_dict(self) -> dict:
        return {"index": self.index, "identity": self.identity, "residual": self.residual}


@dataclass
class Report:
    violations: List[Violation] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations

    def add(self, index: int, identity_name: str, residual) -> None:
        self.violations.append(Violation(index, identity_name, list(residual)))

    def raise_if_invalid(self) -> None:
        if self.violations:
            v = self.violations[0]
            raise CertificateFailure(v.identity, v.index, v.residual)


def _check_two_cell(report: Report, index: int, name: str, build) -> Optional[TwoMor]:
    try:
        return build()
    except IllFormed as e:
        report.add(index, f"{name}: {e}", [])
        return None


def check_two_chain_complex(c: TwoChainComplex) -> Report:
    report = Report()
    for n in range(2, c.length + 1):
        _check_two_cell(report, n, "nullhomotopy", lambda n=n: c.alpha(n))
    for n in range(3, c.length + 1):
        lhs = c.L(n - 2).f1.compose(c.alpha_h(n))
        rhs = c.alpha_h(n - 1).compose(c.L(n).f0)
        if not lhs.equals(rhs):
            report.add(n, "coherence", lhs.residual(rhs))
    _logger.debug("ComplexChecked", {"length": c.length, "violations": len(report.violations)})
    return report


def truncate_left(c: TwoChainComplex) -> TwoChainComplex:
    """Drop degree 0 and shift everything down by one."""
    if c.length < 1:
        raise IndexOutOfRange("cannot truncate a complex with a single object")
    return TwoChainComplex(c.objects[1:], c.maps[1:], c.nulls[1:])


def _check_index(c: TwoChainComplex, n: int) -> None:
    if not 0 <= n <= c.length:
        raise IndexOutOfRange(f"degree {n} outside [0, {c.length}]")


def _cycle_map(c: TwoChainComplex, n: int) -> AbHom:
    """(a, u) ↦ (L_n a + d u, L_{n−1} u − α_n a) on A_{n,0} ⊕ A_{n−1,1}."""
    a, prev, prev2 = c.obj(n), c.obj(n - 1), c.obj(n - 2)
    top = IntMatrix.hstack(c.L(n).f0.matrix, prev.d.matrix)
    bottom = IntMatrix.hstack((-c.alpha_h(n)).matrix, c.L(n - 1).f1.matrix)
    return AbHom(a.c0.direct_sum(prev.c1), prev.c0.direct_sum(prev2.c1), IntMatrix.vstack(top, bottom))


@dataclass(frozen=True)
class Homology:
    """H_n together with the coordinates it was built from."""
    pic2: Pic2
    cycles: AbHom  # H0 → A_{n,0} ⊕ A_{n−1,1}
    boundaries: AbHom  # A_{n+1,0} ⊕ A_{n,1} → H1


def homology_data(c: TwoChainComplex, n: int) -> Homology:
    _check_index(c, n)
    h0, incl = kernel_basis(_cycle_map(c, n))
    h1, proj = cokernel_presentation(_cycle_map(c, n + 2))
    up = c.obj(n + 1)
    here, prev = c.obj(n), c.obj(n - 1)
    # [X, x] ↦ (d x − L_{n+1} X, −L_n x − α_{n+1} X)
    top = IntMatrix.hstack((-c.L(n + 1).f0).matrix, here.d.matrix)
    bottom = IntMatrix.hstack((-c.alpha_h(n + 1)).matrix, (-c.L(n).f1).matrix)
    raw = AbHom(up.c0.direct_sum(here.c1), here.c0.direct_sum(prev.c1), IntMatrix.vstack(top, bottom))
    d = factor_through_surjection(proj, factor_through_injection(incl, raw))
    return Homology(Pic2(h1, h0, d), incl, proj)


def homology(c: TwoChainComplex, n: int) -> Pic2:
    return homology_data(c, n).pic2


def homology_via_relkc(c: TwoChainComplex, n: int) -> Pic2:
    """Coker(ᾱ_{n+2}, L'_{n+1}) with L'_{n+1} the factorization of L_{n+1} into Ker(L_n, α_n)."""
    _check_index(c, n)
    kr = relative_kernel(c.L(n), c.L(n - 1), c.alpha(n))
    lifted, _ = factor_through_kernel(kr, c.L(n + 1), c.alpha(n + 1))
    alpha_bar = null_two_mor(compose_one_mor(c.L(n + 2), lifted), c.alpha_h(n + 2))
    return relative_cokernel(c.L(n + 2), lifted, alpha_bar).C


@dataclass(frozen=True)
class ComplexMorphism:
    source: TwoChainComplex
    target: TwoChainComplex
    components: Tuple[OneMor, ...]  # F_n, n = 0..N
    squares: Tuple[AbHom, ...]  # squares[k] = λ_{k+1}: F_k∘L_{k+1} ⇒ M_{k+1}∘F_{k+1}

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "squares", tuple(self.squares))
        if self.source.length != self.target.length:
            raise InvalidMorphism("complex morphisms need complexes of equal length")
        n = self.source.length
        if len(self.components) != n + 1 or len(self.squares) != n:
            raise InvalidMorphism(f"need {n + 1} components and {n} squares")
        for k, f in enumerate(self.components):
            if f.source != self.source.obj(k) or f.target != self.target.obj(k):
                raise BoundaryMismatch(f"component {k} has the wrong boundaries")
        for k, h in enumerate(self.squares):
            if h.source != self.source.obj(k + 1).c0 or h.target != self.target.obj(k).c1:
                raise BoundaryMismatch(f"square {k + 1} has the wrong boundaries")

    def F(self, n: int) -> OneMor:
        if 0 <= n <= self.source.length:
            return self.components[n]
        return zero_one_mor(self.source.obj(n), self.target.obj(n))

    def lam_h(self, n: int) -> AbHom:
        if 1 <= n <= self.source.length:
            return self.squares[n - 1]
        return AbHom.zero(self.source.obj(n).c0, self.target.obj(n - 1).c1)

    def lam(self, n: int) -> TwoMor:
        before = compose_one_mor(self.source.L(n), self.F(n - 1))
        after = compose_one_mor(self.F(n), self.target.L(n))
        return TwoMor(before, after, self.lam_h(n))


def check_complex_morphism(m: ComplexMorphism) -> Report:
    """Each square is a 2-cell and F_{n−2}α_n = β_n F_n + M_{n−1}λ_n + λ_{n−1}L_n."""
    report = Report()
    a, b = m.source, m.target
    for n in range(1, a.length + 1):
        _check_two_cell(report, n, "square", lambda n=n: m.lam(n))
    for n in range(2, a.length + 1):
        lhs = m.F(n - 2).f1.compose(a.alpha_h(n))
        rhs = (b.alpha_h(n).compose(m.F(n).f0)
               + b.L(n - 1).f1.compose(m.lam_h(n))
               + m.lam_h(n - 1).compose(a.L(n).f0))
        if not lhs.equals(rhs):
            report.add(n, "square compatibility", lhs.residual(rhs))
    return report


def identity_complex_morphism(c: TwoChainComplex) -> ComplexMorphism:
    squares = [AbHom.zero(c.obj(k + 1).c0, c.obj(k).c1) for k in range(c.length)]
    return ComplexMorphism(c, c, tuple(identity(o) for o in c.objects), tuple(squares))


def zero_complex_morphism(a: TwoChainComplex, b: TwoChainComplex) -> ComplexMorphism:
    comps = [zero_one_mor(a.obj(k), b.obj(k)) for k in range(a.length + 1)]
    squares = [AbHom.zero(a.obj(k + 1).c0, b.obj(k).c1) for k in range(a.length)]
    return ComplexMorphism(a, b, tuple(comps), tuple(squares))


def compose_complex_morphisms(f: ComplexMorphism, g: ComplexMorphism) -> ComplexMorphism:
    """(G∘F, ν) with ν_n = G_{n−1}λ_n + μ_n F_n."""
    if f.target != g.source:
        raise BoundaryMismatch("complex morphisms do not compose")
    comps = [compose_one_mor(f.F(k), g.F(k)) for k in range(f.source.length + 1)]
    squares = [g.F(n - 1).f1.compose(f.lam_h(n)) + g.lam_h(n).compose(f.F(n).f0)
               for n in range(1, f.source.length + 1)]
    return ComplexMorphism(f.source, g.target, tuple(comps), tuple(squares))


def induced_homology_morphism(m: ComplexMorphism, n: int,
                              source: Optional[Homology] = None,
                              target: Optional[Homology] = None) -> OneMor:
    """H_n(F): (a, u) ↦ (F_n a, F_{n−1} u − λ_n a) and [X, x] ↦ [F_{n+1} X, F_n x + λ_{n+1} X]."""
    ha = source or homology_data(m.source, n)
    hb = target or homology_data(m.target, n)
    a = m.source
    deg0 = IntMatrix.vstack(
        IntMatrix.hstack(m.F(n).f0.matrix, IntMatrix.zeros(m.target.obj(n).c0.gens, a.obj(n - 1).c1.gens)),
        IntMatrix.hstack((-m.lam_h(n)).matrix, m.F(n - 1).f1.matrix),
    )
    deg1 = IntMatrix.vstack(
        IntMatrix.hstack(m.F(n + 1).f0.matrix, IntMatrix.zeros(m.target.obj(n + 1).c0.gens, a.obj(n).c1.gens)),
        IntMatrix.hstack(m.lam_h(n + 1).matrix, m.F(n).f1.matrix),
    )
    raw0 = AbHom(ha.cycles.target, hb.cycles.target, deg0)
    raw1 = AbHom(ha.boundaries.source, hb.boundaries.source, deg1)
    f0 = factor_through_injection(hb.cycles, raw0.compose(ha.cycles))
    f1 = factor_through_surjection(ha.boundaries, hb.boundaries.compose(raw1))
    return OneMor(ha.pic2, hb.pic2, f1, f0)


@dataclass(frozen=True)
class ChainHomotopy2:
    """Slides T_n: A_n → B_{n+1} and cells τ_n: F_n ⇒ M_{n+1}T_n + T_{n−1}L_n + G_n."""
    source: ComplexMorphism  # F
    target: ComplexMorphism  # G
    slides: Tuple[OneMor, ...]  # T_n, n = 0..N
    cells: Tuple[AbHom, ...]  # τ_n, n = 0..N

    def __post_init__(self):
        object.__setattr__(self, "slides", tuple(self.slides))
        object.__setattr__(self, "cells", tuple(self.cells))
        f, g = self.source, self.target
        if f.source != g.source or f.target != g.target:
            raise BoundaryMismatch("homotopy between non-parallel complex morphisms")
        n = f.source.length
        if len(self.slides) != n + 1 or len(self.cells) != n + 1:
            raise InvalidMorphism(f"need {n + 1} slides and {n + 1} cells")
        for k, t in enumerate(self.slides):
            if t.source != f.source.obj(k) or t.target != f.target.obj(k + 1):
                raise BoundaryMismatch(f"slide {k} has the wrong boundaries")

    def T(self, n: int) -> OneMor:
        a, b = self.source.source, self.source.target
        if 0 <= n <= a.length:
            return self.slides[n]
        return zero_one_mor(a.obj(n), b.obj(n + 1))

    def tau_h(self, n: int) -> AbHom:
        a, b = self.source.source, self.source.target
        if 0 <= n <= a.length:
            return self.cells[n]
        return AbHom.zero(a.obj(n).c0, b.obj(n).c1)

    def tau(self, n: int) -> TwoMor:
        a, b = self.source.source, self.source.target
        total = (compose_one_mor(self.T(n), b.L(n + 1))
                 + compose_one_mor(a.L(n), self.T(n - 1))
                 + self.target.F(n))
        return TwoMor(self.source.F(n), total, self.tau_h(n))


def check_two_chain_homotopy(h: ChainHomotopy2) -> Report:
    """Cells are 2-morphisms and Mτ_n + βT_n + λ_n − μ_n − τ_{n−1}L_n − T_{n−2}α_n = 0."""
    report = Report()
    a, b = h.source.source, h.source.target
    for n in range(0, a.length + 1):
        _check_two_cell(report, n, "homotopy cell", lambda n=n: h.tau(n))
    for n in range(1, a.length + 2):
        total = (b.L(n).f1.compose(h.tau_h(n))
                 + b.alpha_h(n + 1).compose(h.T(n).f0)
                 + h.source.lam_h(n)
                 - h.target.lam_h(n)
                 - h.tau_h(n - 1).compose(a.L(n).f0)
                 - h.T(n - 2).f1.compose(a.alpha_h(n)))
        if not total.is_zero():
            report.add(n, "homotopy compatibility", total.residual(AbHom.zero(total.source, total.target)))
    return report


def homotopy_induces_equivalence(h: ChainHomotopy2, n: int) -> TwoMor:
    """The 2-cell H_n(F) ⇒ H_n(G), (a, u) ↦ [T_n a, τ_n a + T_{n−1} u]."""
    check_two_chain_homotopy(h).raise_if_invalid()
    a, b = h.source.source, h.source.target
    ha, hb = homology_data(a, n), homology_data(b, n)
    f = induced_homology_morphism(h.source, n, ha, hb)
    g = induced_homology_morphism(h.target, n, ha, hb)
    raw = IntMatrix.vstack(
        IntMatrix.hstack(h.T(n).f0.matrix, IntMatrix.zeros(b.obj(n + 1).c0.gens, a.obj(n - 1).c1.gens)),
        IntMatrix.hstack(h.tau_h(n).matrix, h.T(n - 1).f1.matrix),
    )
    psi = AbHom(ha.cycles.target, hb.boundaries.source, raw)
    return TwoMor(f, g, hb.boundaries.compose(psi).compose(ha.cycles))


@dataclass(frozen=True)
class ExactnessCertificate:
    index: int
    exact: bool
    pi0: FgAbPresentation
    pi1: FgAbPresentation

    def __bool__(self) -> bool:
        return self.exact

    def to_dict(self) -> dict:
        return {"index": self.index, "exact": self.exact, "pi0": self.pi0.describe(), "pi1": self.pi1.describe()}


def is_relative_2exact_at(c: TwoChainComplex, n: int) -> ExactnessCertificate:
    """Relative 2-exact at n exactly when H_n is the zero 2-group."""
    pi0, pi1 = homotopy_invariants(homology(c, n))
    exact = pi0.is_trivial() and pi1.is_trivial()
    _logger.debug("ExactnessChecked", {"index": n, "exact": exact})
    return ExactnessCertificate(n, exact, pi0, pi1)


def classical_homology(groups: Sequence[FgAbPresentation], matrices: Sequence[IntMatrix],
                       n: int) -> FgAbPresentation:
    """ker D_n / im D_{n+1} for an ordinary chain complex, D_k = matrices[k − 1]."""
    def hom(k: int) -> AbHom:
        src = groups[k] if 0 <= k < len(groups) else FgAbPresentation.trivial()
        tgt = groups[k - 1] if 0 <= k - 1 < len(groups) else FgAbPresentation.trivial()
        if 1 <= k <= len(matrices):
            return AbHom(src, tgt, matrices[k - 1])
        return AbHom.zero(src, tgt)

    _, incl = kernel_basis(hom(n))
    boundary = factor_through_injection(incl, hom(n + 1))
    out, _ = cokernel_presentation(boundary)
    return out


def truncate_morphism_left(m: ComplexMorphism) -> ComplexMorphism:
    """Restrict a morphism of complexes to the degree ≥ 1 parts, shifted down."""
    return ComplexMorphism(truncate_left(m.source), truncate_left(m.target), m.components[1:], m.squares[1:])
