"""Exact integer linear algebra over finitely presented abelian groups.

Groups are kept as presentations (generators plus an integer relation matrix
whose rows are relations). Elements are integer vectors of generator
coefficients and are compared modulo the relation lattice. Smith and Hermite
normal forms and matrix products come from sympy's DomainMatrix machinery over
ZZ, so no arithmetic ever overflows.
"""
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, List, Optional, Sequence, Tuple

from sympy.polys.domains import QQ, ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import hermite_normal_form, smith_normal_decomp

from .errors import IllFormed, NoSolution

Vector = Tuple[int, ...]


@dataclass(frozen=True)
class IntMatrix:
    """Dense integer matrix, row-major, arbitrary precision entries."""
    rows: int
    cols: int
    entries: Tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise IllFormed(f"negative matrix shape {self.rows}x{self.cols}")
        entries = tuple(int(v) for v in self.entries)
        if len(entries) != self.rows * self.cols:
            raise IllFormed(
                f"matrix {self.rows}x{self.cols} needs {self.rows * self.cols} entries, got {len(entries)}"
            )
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> "IntMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            if not rows:
                raise IllFormed("column count is required for a matrix with no rows")
            cols = len(rows[0])
        for r in rows:
            if len(r) != cols:
                raise IllFormed(f"ragged row of length {len(r)}, expected {cols}")
        return cls(len(rows), cols, tuple(v for r in rows for v in r))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int) -> "IntMatrix":
        columns = [list(c) for c in columns]
        for c in columns:
            if len(c) != rows:
                raise IllFormed(f"column of length {len(c)}, expected {rows}")
        return cls(rows, len(columns), tuple(columns[j][i] for i in range(rows) for j in range(len(columns))))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))

    def __getitem__(self, key: Tuple[int, int]) -> int:
        i, j = key
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Vector:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> Vector:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def to_rows(self) -> List[List[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def columns(self) -> List[Vector]:
        return [self.col(j) for j in range(self.cols)]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    def is_zero(self) -> bool:
        return not any(self.entries)

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows, tuple(self[i, j] for j in range(self.cols) for i in range(self.rows)))

    def apply(self, vec: Sequence[int]) -> Vector:
        if len(vec) != self.cols:
            raise IllFormed(f"vector of length {len(vec)} applied to {self.rows}x{self.cols} matrix")
        return tuple(sum(self[i, j] * vec[j] for j in range(self.cols) if vec[j]) for i in range(self.rows))

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise IllFormed(f"cannot multiply {self.shape} by {other.shape}")
        if 0 in (self.rows, self.cols, other.cols):
            return IntMatrix.zeros(self.rows, other.cols)
        return IntMatrix.from_domain(self.to_domain() * other.to_domain())

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape != other.shape:
            raise IllFormed(f"cannot add {self.shape} and {other.shape}")
        return IntMatrix(self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, tuple(-a for a in self.entries))

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return self + (-other)

    def scale(self, k: int) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, tuple(k * a for a in self.entries))

    def select_rows(self, idx: Sequence[int]) -> "IntMatrix":
        return IntMatrix.from_rows([self.row(i) for i in idx], self.cols)

    def select_cols(self, idx: Sequence[int]) -> "IntMatrix":
        return IntMatrix.from_columns([self.col(j) for j in idx], self.rows)

    @staticmethod
    def hstack(*blocks: "IntMatrix") -> "IntMatrix":
        rows = blocks[0].rows
        cols = []
        for b in blocks:
            if b.rows != rows:
                raise IllFormed("hstack row mismatch")
            cols.extend(b.columns())
        return IntMatrix.from_columns(cols, rows)

    @staticmethod
    def vstack(*blocks: "IntMatrix") -> "IntMatrix":
        cols = blocks[0].cols
        rows = []
        for b in blocks:
            if b.cols != cols:
                raise IllFormed("vstack column mismatch")
            rows.extend(b.to_rows())
        return IntMatrix.from_rows(rows, cols)

    @staticmethod
    def block_diag(*blocks: "IntMatrix") -> "IntMatrix":
        total_cols = sum(b.cols for b in blocks)
        rows = []
        offset = 0
        for b in blocks:
            for r in b.to_rows():
                rows.append([0] * offset + r + [0] * (total_cols - offset - b.cols))
            offset += b.cols
        return IntMatrix.from_rows(rows, total_cols)

    def kron(self, other: "IntMatrix") -> "IntMatrix":
        """Kronecker product; index (i, k) of the result block grid is i*other.rows + k."""
        rows = []
        for i in range(self.rows):
            for k in range(other.rows):
                rows.append([self[i, j] * other[k, l] for j in range(self.cols) for l in range(other.cols)])
        return IntMatrix.from_rows(rows, self.cols * other.cols)

    def to_domain(self) -> DomainMatrix:
        return DomainMatrix([[ZZ(v) for v in self.row(i)] for i in range(self.rows)], (self.rows, self.cols), ZZ)

    @classmethod
    def from_domain(cls, dm: DomainMatrix) -> "IntMatrix":
        rows, cols = dm.shape
        return cls(rows, cols, tuple(int(v) for row in dm.to_list() for v in row))

    def det(self) -> int:
        if self.rows != self.cols:
            raise IllFormed("determinant of a non-square matrix")
        if self.rows == 0:
            return 1
        return int(self.to_domain().det())

    def dumps(self) -> str:
        """Matrix text format: header `<rows> <cols>` then one line per row."""
        return f"{self.rows} {self.cols}\n" + self.dump_block()

    def dump_block(self) -> str:
        return "".join(" ".join(str(v) for v in self.row(i)) + "\n" for i in range(self.rows))

    @classmethod
    def loads(cls, text: str) -> "IntMatrix":
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        if not lines:
            raise IllFormed("empty matrix text")
        header = lines[0].split()
        if len(header) != 2:
            raise IllFormed(f"bad matrix header {lines[0]!r}")
        rows, cols = int(header[0]), int(header[1])
        if len(lines) - 1 != rows:
            raise IllFormed(f"expected {rows} matrix rows, found {len(lines) - 1}")
        return cls.parse_block(lines[1:], rows, cols)

    @classmethod
    def parse_block(cls, lines: Sequence[str], rows: int, cols: int) -> "IntMatrix":
        values: List[int] = []
        for n, line in enumerate(lines[:rows]):
            parts = line.split()
            if len(parts) != cols:
                raise IllFormed(f"matrix row {n} has {len(parts)} entries, expected {cols}")
            values.extend(int(p) for p in parts)
        if len(lines) < rows:
            raise IllFormed(f"expected {rows} matrix rows, found {len(lines)}")
        return cls(rows, cols, tuple(values))


def snf(m: IntMatrix) -> Tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Smith normal form S = U*M*V with U, V unimodular and S[i,i] | S[i+1,i+1]."""
    if m.is_zero():
        return m, IntMatrix.identity(m.rows), IntMatrix.identity(m.cols)
    s, u, v = smith_normal_decomp(m.to_domain())
    return IntMatrix.from_domain(s), IntMatrix.from_domain(u), IntMatrix.from_domain(v)


def snf_rank(s: IntMatrix) -> int:
    return sum(1 for i in range(min(s.rows, s.cols)) if s[i, i] != 0)


def unimodular_inverse(v: IntMatrix) -> IntMatrix:
    if v.rows == 0:
        return v
    inv = v.to_domain().convert_to(QQ).inv()
    return IntMatrix.from_domain(inv)


@lru_cache(maxsize=4096)
def _snf_cached(m: IntMatrix) -> Tuple[IntMatrix, IntMatrix, IntMatrix, int]:
    s, u, v = snf(m)
    return s, u, v, snf_rank(s)


def integer_kernel(m: IntMatrix) -> IntMatrix:
    """Columns spanning {x in Z^cols : m x = 0}."""
    _, _, v, r = _snf_cached(m)
    return v.select_cols(range(r, m.cols))


def smith_solve(m: IntMatrix, b: Sequence[int]) -> Optional[Vector]:
    """Some integer x with m x = b, or None."""
    s, u, v, r = _snf_cached(m)
    c = u.apply(b)
    y = [0] * m.cols
    for i in range(m.rows):
        if i < r:
            d = s[i, i]
            if c[i] % d:
                return None
            y[i] = c[i] // d
        elif c[i] != 0:
            return None
    return v.apply(y)


def hermite_rows(vectors: Iterable[Sequence[int]], width: int) -> Tuple[Vector, ...]:
    """Row echelon basis of the lattice spanned by `vectors`.

    Pivots are positive and strictly increasing in column; entries above each
    pivot are reduced into [0, pivot).
    """
    rows = [tuple(int(x) for x in v) for v in vectors if any(v)]
    if not rows or width == 0:
        return ()
    for r in rows:
        if len(r) != width:
            raise IllFormed(f"lattice vector of length {len(r)}, expected {width}")
    # sympy pivots on the last nonzero entry of a column; reversed coordinates put it first
    gens = DomainMatrix([[ZZ(r[width - 1 - i]) for r in rows] for i in range(width)], (width, len(rows)), ZZ)
    h = IntMatrix.from_domain(hermite_normal_form(gens))
    return tuple(tuple(reversed(h.col(j))) for j in reversed(range(h.cols)))


def _pivot(row: Sequence[int]) -> int:
    for i, v in enumerate(row):
        if v:
            return i
    raise IllFormed("zero row in echelon basis")


def reduce_vector(vec: Sequence[int], basis: Sequence[Vector]) -> Vector:
    """Canonical coset representative of vec modulo an echelon basis."""
    out = list(vec)
    for row in basis:
        p = _pivot(row)
        q = out[p] // row[p]
        if q:
            out = [a - q * b for a, b in zip(out, row)]
    return tuple(out)


def echelon_coordinates(vec: Sequence[int], basis: Sequence[Vector]) -> Optional[Vector]:
    """Coefficients c with sum c_j basis_j == vec, or None when vec is outside the lattice."""
    out = list(vec)
    coeffs = []
    for row in basis:
        p = _pivot(row)
        if out[p] % row[p]:
            return None
        q = out[p] // row[p]
        coeffs.append(q)
        if q:
            out = [a - q * b for a, b in zip(out, row)]
    if any(out):
        return None
    return tuple(coeffs)


def lattice_contains(vec: Sequence[int], basis: Sequence[Vector]) -> bool:
    return not any(reduce_vector(vec, basis))


@dataclass(frozen=True)
class FgAbPresentation:
    """Finitely generated abelian group Z^gens / (row span of relations)."""
    gens: int
    relations: IntMatrix

    def __post_init__(self):
        if self.relations.cols != self.gens:
            raise IllFormed(f"relation matrix has {self.relations.cols} columns for {self.gens} generators")

    @classmethod
    def free(cls, k: int) -> "FgAbPresentation":
        return cls(k, IntMatrix.zeros(0, k))

    @classmethod
    def trivial(cls) -> "FgAbPresentation":
        return cls.free(0)

    @classmethod
    def cyclic(cls, n: int) -> "FgAbPresentation":
        """Z/n; n = 0 gives Z."""
        if n == 0:
            return cls.free(1)
        return cls(1, IntMatrix.from_rows([[n]], 1))

    @classmethod
    def from_invariants(cls, torsion: Sequence[int], free_rank: int = 0) -> "FgAbPresentation":
        k = len(torsion) + free_rank
        rows = [[d if j == i else 0 for j in range(k)] for i, d in enumerate(torsion)]
        return cls(k, IntMatrix.from_rows(rows, k))

    @cached_property
    def lattice(self) -> Tuple[Vector, ...]:
        return hermite_rows(self.relations.to_rows(), self.gens)

    def reduce(self, vec: Sequence[int]) -> Vector:
        if len(vec) != self.gens:
            raise IllFormed(f"element of length {len(vec)} in a group with {self.gens} generators")
        return reduce_vector(vec, self.lattice)

    def is_zero_element(self, vec: Sequence[int]) -> bool:
        return not any(self.reduce(vec))

    def equal_elements(self, x: Sequence[int], y: Sequence[int]) -> bool:
        return self.is_zero_element([a - b for a, b in zip(x, y)])

    @cached_property
    def _canonical(self):
        s, _, v, r = _snf_cached(self.relations)
        diag = [s[i, i] if i < min(s.rows, s.cols) else 0 for i in range(self.gens)]
        kept = [i for i in range(self.gens) if diag[i] != 1]
        torsion = tuple(diag[i] for i in kept if diag[i] != 0)
        free_rank = sum(1 for i in kept if diag[i] == 0)
        group = FgAbPresentation.from_invariants(torsion, free_rank)
        vt = v.transpose()
        to_canon = vt.select_rows(kept) if kept else IntMatrix.zeros(0, self.gens)
        back = unimodular_inverse(v)  # rows of V^-1 are images of canonical generators
        from_canon = IntMatrix.from_columns([back.row(i) for i in kept], self.gens)
        return group, to_canon, from_canon, torsion, free_rank

    def invariants(self) -> Tuple[Tuple[int, ...], int]:
        """(invariant factors > 1 ascending, free rank)."""
        _, _, _, torsion, free_rank = self._canonical
        return torsion, free_rank

    def canonical(self) -> Tuple["FgAbPresentation", "AbHom", "AbHom"]:
        """Canonical Z/d1 + ... + Z^r with mutually inverse isomorphisms (to, from)."""
        group, to_canon, from_canon, _, _ = self._canonical
        return group, AbHom(self, group, to_canon), AbHom(group, self, from_canon)

    def is_trivial(self) -> bool:
        torsion, free_rank = self.invariants()
        return not torsion and free_rank == 0

    def is_free_presentation(self) -> bool:
        return self.relations.is_zero()

    def order(self) -> Optional[int]:
        torsion, free_rank = self.invariants()
        if free_rank:
            return None
        n = 1
        for d in torsion:
            n *= d
        return n

    def describe(self) -> str:
        torsion, free_rank = self.invariants()
        parts = [f"Z/{d}" for d in torsion]
        if free_rank == 1:
            parts.append("Z")
        elif free_rank > 1:
            parts.append(f"Z^{free_rank}")
        return " + ".join(parts) if parts else "0"

    def elements(self) -> List[Vector]:
        """All elements as reduced representatives (finite groups only)."""
        torsion, free_rank = self.invariants()
        if free_rank:
            raise IllFormed("cannot enumerate an infinite group")
        _, _, from_canon, _, _ = self._canonical
        coords: List[List[int]] = [[]]
        for d in torsion:
            coords = [c + [t] for c in coords for t in range(d)]
        return [self.reduce(from_canon.apply(c)) for c in coords]

    def direct_sum(self, other: "FgAbPresentation") -> "FgAbPresentation":
        return FgAbPresentation(self.gens + other.gens, IntMatrix.block_diag(self.relations, other.relations))

    def power(self, n: int) -> "FgAbPresentation":
        out = FgAbPresentation.trivial()
        for _ in range(n):
            out = out.direct_sum(self)
        return out


@dataclass(frozen=True)
class AbHom:
    """Homomorphism of presented groups; column j is the image of source generator j."""
    source: FgAbPresentation
    target: FgAbPresentation
    matrix: IntMatrix

    def __post_init__(self):
        if self.matrix.shape != (self.target.gens, self.source.gens):
            raise IllFormed(
                f"hom matrix shape {self.matrix.shape} does not match {self.target.gens}x{self.source.gens}"
            )
        for i in range(self.source.relations.rows):
            image = self.matrix.apply(self.source.relations.row(i))
            if not self.target.is_zero_element(image):
                raise IllFormed(f"source relation {i} is not sent into the target relations")

    @classmethod
    def identity(cls, group: FgAbPresentation) -> "AbHom":
        return cls(group, group, IntMatrix.identity(group.gens))

    @classmethod
    def zero(cls, source: FgAbPresentation, target: FgAbPresentation) -> "AbHom":
        return cls(source, target, IntMatrix.zeros(target.gens, source.gens))

    def apply(self, vec: Sequence[int]) -> Vector:
        return self.target.reduce(self.matrix.apply(vec))

    def compose(self, inner: "AbHom") -> "AbHom":
        """self after inner."""
        if inner.target != self.source:
            raise IllFormed("composition of homs with mismatched groups")
        return AbHom(inner.source, self.target, self.matrix @ inner.matrix)

    def __add__(self, other: "AbHom") -> "AbHom":
        if (self.source, self.target) != (other.source, other.target):
            raise IllFormed("sum of homs with different boundaries")
        return AbHom(self.source, self.target, self.matrix + other.matrix)

    def __neg__(self) -> "AbHom":
        return AbHom(self.source, self.target, -self.matrix)

    def __sub__(self, other: "AbHom") -> "AbHom":
        return self + (-other)

    def equals(self, other: "AbHom") -> bool:
        if (self.source, self.target) != (other.source, other.target):
            return False
        return (self - other).is_zero()

    def is_zero(self) -> bool:
        return all(self.target.is_zero_element(c) for c in self.matrix.columns())

    def residual(self, other: "AbHom") -> List[int]:
        """Source generators on which self and other differ."""
        diff = self.matrix - other.matrix
        return [j for j, c in enumerate(diff.columns()) if not self.target.is_zero_element(c)]


def hom_direct_sum(f: AbHom, g: AbHom) -> AbHom:
    return AbHom(f.source.direct_sum(g.source), f.target.direct_sum(g.target),
                 IntMatrix.block_diag(f.matrix, g.matrix))


def hom_pair(f: AbHom, g: AbHom) -> AbHom:
    """x ↦ (f x, g x)."""
    if f.source != g.source:
        raise IllFormed("pairing homs with different sources")
    return AbHom(f.source, f.target.direct_sum(g.target), IntMatrix.vstack(f.matrix, g.matrix))


def hom_copair(f: AbHom, g: AbHom) -> AbHom:
    """(x, y) ↦ f x + g y."""
    if f.target != g.target:
        raise IllFormed("copairing homs with different targets")
    return AbHom(f.source.direct_sum(g.source), f.target, IntMatrix.hstack(f.matrix, g.matrix))


def _augmented(f: AbHom) -> IntMatrix:
    # [F | R_B^T]: solutions (x, z) of F x + R_B^T z = b
    return IntMatrix.hstack(f.matrix, f.target.relations.transpose())


@lru_cache(maxsize=4096)
def _preimage_of_zero(f: AbHom) -> Tuple[Vector, ...]:
    """Echelon basis of {x in Z^k : f x lies in the target relation lattice}."""
    k = f.source.gens
    kern = integer_kernel(_augmented(f))
    return hermite_rows([c[:k] for c in kern.columns()], k)


def kernel_basis(f: AbHom) -> Tuple[FgAbPresentation, AbHom]:
    """Kernel K of f in canonical form, with its inclusion into f.source."""
    source = f.source
    basis = _preimage_of_zero(f)
    rel_rows = []
    for i in range(source.relations.rows):
        coords = echelon_coordinates(source.relations.row(i), basis)
        if coords is None:
            raise IllFormed(f"relation {i} escaped the preimage lattice")
        rel_rows.append(coords)
    raw = FgAbPresentation(len(basis), IntMatrix.from_rows(rel_rows, len(basis)))
    inclusion_raw = IntMatrix.from_columns(basis, source.gens)
    group, _, from_canon = raw.canonical()
    return group, AbHom(group, source, inclusion_raw @ from_canon.matrix)


def cokernel_presentation(f: AbHom) -> Tuple[FgAbPresentation, AbHom]:
    """Cokernel C of f in canonical form, with the projection from f.target."""
    target = f.target
    raw = FgAbPresentation(
        target.gens, IntMatrix.vstack(target.relations, f.matrix.transpose())
    )
    group, to_canon, _ = raw.canonical()
    return group, AbHom(target, group, to_canon.matrix)


def solve(f: AbHom, b: Sequence[int]) -> Vector:
    """Canonical x with f(x) = b modulo the target relations.

    A particular solution comes from back-substitution through the SNF of
    [F | R_B^T]; it is then reduced modulo the echelon basis of the lattice of
    ambiguity {x : f(x) = 0}, which fixes each pivot coordinate into
    [0, pivot). The result depends only on f and the class of b.
    """
    if len(b) != f.target.gens:
        raise IllFormed(f"right-hand side of length {len(b)} for a target with {f.target.gens} generators")
    particular = smith_solve(_augmented(f), b)
    if particular is None:
        raise NoSolution(f"{list(b)} is not in the image")
    return reduce_vector(particular[:f.source.gens], _preimage_of_zero(f))


def solve_columns(f: AbHom, rhs: IntMatrix) -> IntMatrix:
    """Matrix X with f∘X = rhs columnwise."""
    return IntMatrix.from_columns([solve(f, c) for c in rhs.columns()], f.source.gens)


def is_injective(f: AbHom) -> bool:
    kernel, _ = kernel_basis(f)
    return kernel.is_trivial()


def is_surjective(f: AbHom) -> bool:
    cokernel, _ = cokernel_presentation(f)
    return cokernel.is_trivial()


def is_isomorphism(f: AbHom) -> bool:
    return is_injective(f) and is_surjective(f)


def tor1_oracle(a: FgAbPresentation, b: FgAbPresentation) -> FgAbPresentation:
    """Classical Tor_1(A, B) from the free resolution 0 → Z^r → Z^k → A → 0.

    Only uses the presentation of A (with a basis of its relation lattice so
    the first map is injective) and the kernel of the induced map B^r → B^k.
    """
    rel = a.lattice
    r, k = len(rel), a.gens
    m = b.gens
    rows = []
    for i in range(k):
        for t in range(m):
            rows.append([rel[j][i] if s == t else 0 for j in range(r) for s in range(m)])
    induced = AbHom(b.power(r), b.power(k), IntMatrix.from_rows(rows, r * m))
    tor, _ = kernel_basis(induced)
    return tor


@dataclass(frozen=True)
class MapTerm:
    """left ∘ X[unknown] ∘ right inside a linear map equation."""
    unknown: int
    left: IntMatrix
    right: IntMatrix


@dataclass(frozen=True)
class MapEquation:
    """Σ terms = constant, column by column, modulo the relations of `group`."""
    group: FgAbPresentation
    constant: IntMatrix
    terms: Tuple[MapTerm, ...]


def solve_map_equations(unknowns: Sequence[Tuple[FgAbPresentation, FgAbPresentation]],
                        equations: Sequence[MapEquation]) -> List[AbHom]:
    """Find homomorphisms X_k: source_k → target_k satisfying every equation.

    The unknown entries are stacked column-major and each term L X R
    contributes kron(Rᵀ, L). Well-definedness of every X_k is added as an
    equation of its own. Raises NoSolution when the system is inconsistent.
    """
    shapes = [(t.gens, s.gens) for s, t in unknowns]
    offsets = [0]
    for r, c in shapes:
        offsets.append(offsets[-1] + r * c)
    total = offsets[-1]
    eqs = list(equations)
    for k, (src, tgt) in enumerate(unknowns):
        if src.relations.rows:
            eqs.append(MapEquation(tgt, IntMatrix.zeros(tgt.gens, src.relations.rows),
                                   (MapTerm(k, IntMatrix.identity(tgt.gens), src.relations.transpose()),)))
    rows: List[List[int]] = []
    rhs: List[int] = []
    group = FgAbPresentation.trivial()
    for eq in eqs:
        height = eq.group.gens * eq.constant.cols
        block = [[0] * total for _ in range(height)]
        for term in eq.terms:
            contrib = term.right.transpose().kron(term.left)
            if contrib.rows != height:
                raise IllFormed("map equation term has the wrong shape")
            base = offsets[term.unknown]
            for i in range(contrib.rows):
                for j in range(contrib.cols):
                    if contrib[i, j]:
                        block[i][base + j] += contrib[i, j]
        rows.extend(block)
        rhs.extend(v for c in eq.constant.columns() for v in c)
        group = group.direct_sum(eq.group.power(eq.constant.cols))
    system = AbHom(FgAbPresentation.free(total), group, IntMatrix.from_rows(rows, total))
    flat = solve(system, tuple(rhs))
    out = []
    for k, (src, tgt) in enumerate(unknowns):
        r, c = shapes[k]
        chunk = flat[offsets[k]:offsets[k + 1]]
        out.append(AbHom(src, tgt, IntMatrix.from_columns([chunk[j * r:(j + 1) * r] for j in range(c)], r)))
    return out


def lift_generators(projection: AbHom) -> IntMatrix:
    """Columns are preimages of the target generators under a surjection."""
    cols = []
    for j in range(projection.target.gens):
        e = tuple(1 if i == j else 0 for i in range(projection.target.gens))
        cols.append(solve(projection, e))
    return IntMatrix.from_columns(cols, projection.source.gens)


def factor_through_surjection(projection: AbHom, f: AbHom) -> AbHom:
    """The map g with g∘projection = f; f must vanish on the kernel."""
    if projection.source != f.source:
        raise IllFormed("factoring a map with a different source")
    return AbHom(projection.target, f.target, f.matrix @ lift_generators(projection))


def factor_through_injection(inclusion: AbHom, f: AbHom) -> AbHom:
    """The map g with inclusion∘g = f; f must land in the image."""
    if inclusion.target != f.target:
        raise IllFormed("factoring a map with a different target")
    return AbHom(f.source, inclusion.source, solve_columns(inclusion, f.matrix))


def projection_hom(first: FgAbPresentation, second: FgAbPresentation, index: int) -> AbHom:
    """Projection of first ⊕ second onto summand `index` (0 or 1)."""
    total = first.direct_sum(second)
    a, b = first.gens, second.gens
    if index == 0:
        mat = IntMatrix.hstack(IntMatrix.identity(a), IntMatrix.zeros(a, b))
        return AbHom(total, first, mat)
    mat = IntMatrix.hstack(IntMatrix.zeros(b, a), IntMatrix.identity(b))
    return AbHom(total, second, mat)


def injection_hom(first: FgAbPresentation, second: FgAbPresentation, index: int) -> AbHom:
    """Inclusion of summand `index` into first ⊕ second."""
    total = first.direct_sum(second)
    a, b = first.gens, second.gens
    if index == 0:
        return AbHom(first, total, IntMatrix.vstack(IntMatrix.identity(a), IntMatrix.zeros(b, a)))
    return AbHom(second, total, IntMatrix.vstack(IntMatrix.zeros(a, b), IntMatrix.identity(b)))
