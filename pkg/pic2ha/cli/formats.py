"""Line-oriented text formats for matrices, Pic2 values, complexes and extensions."""
import re
from typing import List

from ..errors import ParseError, Pic2haError
from ..pic2core import OneMor, Pic2, compose_one_mor, null_two_mor
from ..complexes import TwoChainComplex
from ..resolve import Extension
from ..zlin import AbHom, FgAbPresentation, IntMatrix

_GROUP_TERM = re.compile(r"^(?:Z/(\d+)|Z\^(\d+)|Z|0)$")


def parse_group(text: str) -> FgAbPresentation:
    """`Z/d1 + Z/d2 + Z^r` (any order, `0` for the trivial group)."""
    torsion: List[int] = []
    free = 0
    for term in text.split("+"):
        term = term.strip()
        match = _GROUP_TERM.match(term)
        if match is None:
            raise ParseError(f"unrecognised group term {term!r}")
        if match.group(1) is not None:
            d = int(match.group(1))
            if d == 0:
                free += 1
            elif d > 1:
                torsion.append(d)
        elif match.group(2) is not None:
            free += int(match.group(2))
        elif term == "Z":
            free += 1
    return FgAbPresentation.from_invariants(torsion, free)


def dump_matrix_inline(m: IntMatrix) -> str:
    """Rows separated by `;`, entries by `,` for single-line records."""
    return ";".join(",".join(str(v) for v in m.row(i)) for i in range(m.rows)) or "-"


class _Lines:
    """Cursor over the lines of a text document, tracking 1-based line numbers."""

    def __init__(self, text: str):
        self.lines = text.split("\n")
        if self.lines and self.lines[-1] == "":
            self.lines.pop()
        self.pos = 0

    @property
    def lineno(self) -> int:
        return self.pos + 1

    def at_end(self) -> bool:
        return self.pos >= len(self.lines)

    def peek(self) -> str:
        if self.at_end():
            raise ParseError("unexpected end of input", self.lineno)
        return self.lines[self.pos]

    def take(self) -> str:
        line = self.peek()
        self.pos += 1
        return line

    def expect(self, keyword: str) -> str:
        line = self.take()
        if line.split()[:len(keyword.split())] != keyword.split():
            raise ParseError(f"expected {keyword!r}, found {line!r}", self.pos)
        return line

    def block(self, rows: int, cols: int) -> IntMatrix:
        start = self.lineno
        chunk = self.lines[self.pos:self.pos + rows]
        try:
            mat = IntMatrix.parse_block(chunk, rows, cols)
        except (Pic2haError, ValueError) as exc:
            raise ParseError(str(exc), start) from exc
        self.pos += rows
        return mat

    def finish(self) -> None:
        if not self.at_end():
            raise ParseError(f"trailing content {self.peek()!r}", self.lineno)


def _fields(line: str, lineno: int) -> dict:
    out = {}
    for part in line.split()[1:]:
        key, sep, value = part.partition("=")
        if not sep:
            raise ParseError(f"expected key=value, found {part!r}", lineno)
        try:
            out[key] = int(value)
        except ValueError as exc:
            raise ParseError(f"{key} must be an integer", lineno) from exc
    return out


def parse_matrix(text: str) -> IntMatrix:
    try:
        return IntMatrix.loads(text)
    except (Pic2haError, ValueError) as exc:
        raise ParseError(f"matrix: {exc}") from exc


def _read_group(lines: _Lines, label: str) -> FgAbPresentation:
    info = _fields(lines.expect(label), lines.pos)
    if "gens" not in info or "rels" not in info:
        raise ParseError(f"{label} needs gens= and rels=", lines.pos)
    return FgAbPresentation(info["gens"], lines.block(info["rels"], info["gens"]))


def _read_pic2(lines: _Lines) -> Pic2:
    lines.expect("pic2")
    c1 = _read_group(lines, "group1")
    c0 = _read_group(lines, "group0")
    lines.expect("diff")
    start = lines.lineno
    d = lines.block(c0.gens, c1.gens)
    try:
        return Pic2(c1, c0, AbHom(c1, c0, d))
    except Pic2haError as exc:
        raise ParseError(f"differential: {exc}", start) from exc


def _dump_group_block(label: str, g: FgAbPresentation) -> str:
    return f"{label} gens={g.gens} rels={g.relations.rows}\n" + g.relations.dump_block()


def dump_pic2(p: Pic2) -> str:
    return ("pic2\n" + _dump_group_block("group1", p.c1) + _dump_group_block("group0", p.c0)
            + "diff\n" + p.d.matrix.dump_block())


def parse_pic2(text: str) -> Pic2:
    lines = _Lines(text)
    p = _read_pic2(lines)
    lines.finish()
    return p


def _read_one_mor(lines: _Lines, source: Pic2, target: Pic2) -> OneMor:
    start = lines.lineno
    f1 = lines.block(target.c1.gens, source.c1.gens)
    f0 = lines.block(target.c0.gens, source.c0.gens)
    try:
        return OneMor(source, target, AbHom(source.c1, target.c1, f1), AbHom(source.c0, target.c0, f0))
    except Pic2haError as exc:
        raise ParseError(f"1-morphism: {exc}", start) from exc


def _read_homotopy(lines: _Lines, source: Pic2, target: Pic2) -> AbHom:
    start = lines.lineno
    h = lines.block(target.c1.gens, source.c0.gens)
    try:
        return AbHom(source.c0, target.c1, h)
    except Pic2haError as exc:
        raise ParseError(f"homotopy: {exc}", start) from exc


def _dump_one_mor(f: OneMor) -> str:
    return f.f1.matrix.dump_block() + f.f0.matrix.dump_block()


def _read_complex(lines: _Lines) -> TwoChainComplex:
    info = _fields(lines.expect("complex"), lines.pos)
    if "n" not in info or info["n"] < 0:
        raise ParseError("complex needs n=<length>", lines.pos)
    n = info["n"]
    objects: List[Pic2] = []
    for i in range(n + 1):
        lines.expect(f"object {i}")
        objects.append(_read_pic2(lines))
    maps: List[OneMor] = []
    for i in range(1, n + 1):
        lines.expect(f"map {i}")
        maps.append(_read_one_mor(lines, objects[i], objects[i - 1]))
    nulls: List[AbHom] = []
    for i in range(2, n + 1):
        lines.expect(f"null {i}")
        nulls.append(_read_homotopy(lines, objects[i], objects[i - 2]))
    return TwoChainComplex(tuple(objects), tuple(maps), tuple(nulls))


def dump_complex(c: TwoChainComplex) -> str:
    parts = [f"complex n={c.length}\n"]
    for i, o in enumerate(c.objects):
        parts.append(f"object {i}\n" + dump_pic2(o))
    for i, m in enumerate(c.maps, start=1):
        parts.append(f"map {i}\n" + _dump_one_mor(m))
    for i, h in enumerate(c.nulls, start=2):
        parts.append(f"null {i}\n" + h.matrix.dump_block())
    return "".join(parts)


def parse_complex(text: str) -> TwoChainComplex:
    lines = _Lines(text)
    c = _read_complex(lines)
    lines.finish()
    return c


def parse_extension(text: str) -> Extension:
    lines = _Lines(text)
    lines.expect("extension")
    lines.expect("source")
    a = _read_pic2(lines)
    lines.expect("middle")
    b = _read_pic2(lines)
    lines.expect("target")
    c = _read_pic2(lines)
    lines.expect("map F")
    f = _read_one_mor(lines, a, b)
    lines.expect("map G")
    g = _read_one_mor(lines, b, c)
    lines.expect("null")
    start = lines.lineno
    h = _read_homotopy(lines, a, c)
    lines.finish()
    try:
        return Extension(f, g, null_two_mor(compose_one_mor(f, g), h))
    except Pic2haError as exc:
        raise ParseError(f"extension: {exc}", start) from exc


def dump_extension(e: Extension) -> str:
    return ("extension\n"
            + "source\n" + dump_pic2(e.F.source)
            + "middle\n" + dump_pic2(e.F.target)
            + "target\n" + dump_pic2(e.G.target)
            + "map F\n" + _dump_one_mor(e.F)
            + "map G\n" + _dump_one_mor(e.G)
            + "null\n" + e.phi.h.matrix.dump_block())


def dump_resolution(res) -> str:
    """The complex 𝒫_·, then the augmentation 𝒫_0 → ℳ with its target."""
    return (dump_complex(res.complex) + "augmentation\n" + dump_pic2(res.target)
            + _dump_one_mor(res.augmentation))


def detect_kind(text: str) -> str:
    """matrix, pic2, complex or extension, from the first line."""
    first = text.split("\n", 1)[0].split()
    if not first:
        raise ParseError("empty input", 1)
    head = first[0]
    if head in ("pic2", "complex", "extension"):
        return head
    if len(first) == 2 and all(p.lstrip("-").isdigit() for p in first):
        return "matrix"
    raise ParseError(f"unknown document type {head!r}", 1)


def read_text(path: str) -> str:
    try:
        with open(path, "r") as f:
            return f.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
