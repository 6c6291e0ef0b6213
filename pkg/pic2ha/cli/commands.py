# Dispatches parsed jobs to the engine and renders their reports
import hashlib
import sys

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import gcd
from typing import Callable, Dict, List, Optional, TextIO, Tuple

from ..complexes import check_two_chain_complex, homology
from ..config import load_config
from ..derived import AdditiveFunctor, TENSOR, derived, long_2exact_sequence, resolution_length, tor_long_exact_oracle
from ..errors import (
    CertificateFailure,
    IndexOutOfRange,
    NotAnExtension,
    NotEssentiallySurjective,
    ParseError,
    Pic2haError,
    UnsupportedFunctorKind,
)
from ..logger import get_logger
from ..pic2core import disc, homotopy_invariants
from ..resolve import check_extension, projective_resolution
from ..zlin import FgAbPresentation, IntMatrix, snf, tor1_oracle
from .cache import ResolutionCache, cache_key
from .formats import (
    detect_kind,
    dump_matrix_inline,
    dump_pic2,
    parse_complex,
    parse_extension,
    parse_matrix,
    parse_pic2,
    read_text,
)
from .models import CacheEntry, Job

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_CERTIFICATE = 2
EXIT_ORACLE = 3

_logger = get_logger("pic2ha.commands")


class ReportWriter:
    """Collects report lines; `records` mode emits one key=value per line."""

    def __init__(self, fmt: str = "text"):
        self.fmt = fmt
        self.lines: List[str] = []

    @property
    def records(self) -> bool:
        return self.fmt == "records"

    def value(self, key: str, value) -> None:
        self.lines.append(f"{key}={value}" if self.records else f"{key} = {value}")

    def matrix(self, label: str, m: IntMatrix) -> None:
        if self.records:
            self.lines.append(f"{label}={dump_matrix_inline(m)}")
        else:
            self.lines.append(label)
            self.lines.extend(m.dumps().rstrip("\n").split("\n"))

    def text(self, body: str) -> None:
        """Verbatim multi-line text; text mode only."""
        if not self.records:
            self.lines.extend(body.rstrip("\n").split("\n"))

    def status(self, name: str, index, passed: bool, detail: Optional[str] = None) -> None:
        word = "PASS" if passed else "FAIL"
        if self.records:
            self.lines.append(f"{name}.{index}={word}")
            if detail:
                self.lines.append(f"{name}.{index}.detail={detail}")
        else:
            line = f"{word} {name}[{index}]"
            self.lines.append(f"{line} {detail}" if detail else line)

    def render(self) -> str:
        return "".join(line + "\n" for line in self.lines)


@dataclass
class Context:
    engine: Dict = field(default_factory=dict)
    cache: Optional[ResolutionCache] = None

    @classmethod
    def from_config(cls, cache_dir: Optional[str] = None) -> "Context":
        config = load_config()
        cache = ResolutionCache(cache_dir) if cache_dir else None
        return cls(config.engine_config, cache)


def _groups(pi0: FgAbPresentation, pi1: FgAbPresentation) -> str:
    return f"pi0={pi0.describe()} pi1={pi1.describe()}"


def _snf(job: Job, w: ReportWriter, ctx: Context) -> int:
    m = parse_matrix(read_text(job.inputs[0]))
    s, u, v = snf(m)
    w.matrix("S", s)
    w.matrix("U", u)
    w.matrix("V", v)
    return EXIT_OK


def _pi(job: Job, w: ReportWriter, ctx: Context) -> int:
    pi0, pi1 = homotopy_invariants(parse_pic2(read_text(job.inputs[0])))
    w.value("pi0", pi0.describe())
    w.value("pi1", pi1.describe())
    return EXIT_OK


def _homology(job: Job, w: ReportWriter, ctx: Context) -> int:
    c = parse_complex(read_text(job.inputs[0]))
    check_two_chain_complex(c).raise_if_invalid()
    n = job.option("degree")
    if n > c.length:
        raise IndexOutOfRange(f"degree {n} outside [0, {c.length}]")
    pi0, pi1 = homotopy_invariants(homology(c, n))
    w.value("degree", n)
    w.value("pi0", pi0.describe())
    w.value("pi1", pi1.describe())
    return EXIT_OK


def _resolution_key(m, length: int, seed: Optional[int], redundancy: int) -> str:
    return cache_key("resolve", {"input": dump_pic2(m), "length": length, "seed": seed, "redundancy": redundancy})


def _store(entry: CacheEntry, ctx: Context) -> CacheEntry:
    if ctx.cache:
        ctx.cache.put(entry)
    return entry


def _resolution_record(key: str, res, length: int, seed: Optional[int]) -> CacheEntry:
    return CacheEntry(key, res.serialize(), [c.to_dict() for c in res.certificates], {"length": length, "seed": seed})


def _resolution_entry(m, length: int, seed: Optional[int], redundancy: int, ctx: Context) -> CacheEntry:
    key = _resolution_key(m, length, seed, redundancy)
    entry = ctx.cache.get(key) if ctx.cache else None
    if entry is not None:
        return entry
    res = projective_resolution(m, length, seed=seed, redundancy=redundancy)
    return _store(_resolution_record(key, res, length, seed), ctx)


def _derived_entry(t: AdditiveFunctor, m, degree: int, length: Optional[int], seed: Optional[int],
                   redundancy: int, ctx: Context) -> CacheEntry:
    """L_iT(ℳ) keyed by the resolution it is read from; a miss stores that resolution too."""
    n = resolution_length(degree, length)
    resolution_key = _resolution_key(m, n, seed, redundancy)
    key = cache_key("derived", {"resolution": resolution_key, "functor": t.describe(), "degree": degree})
    entry = ctx.cache.get(key) if ctx.cache else None
    if entry is not None and entry.meta and "pi0" in entry.meta:
        return entry
    res = projective_resolution(m, n, seed=seed, redundancy=redundancy)
    _store(_resolution_record(resolution_key, res, n, seed), ctx)
    result = derived(t, m, degree, resolution=res)
    record = CacheEntry(key, result.resolution_hash, [c.to_dict() for c in res.certificates], result.to_dict())
    return _store(record, ctx)


def _resolve(job: Job, w: ReportWriter, ctx: Context) -> int:
    m = parse_pic2(read_text(job.inputs[0]))
    length = job.option("length", ctx.engine.get("default_length", 4))
    redundancy = ctx.engine.get("seed_redundancy", 2)
    entry = _resolution_entry(m, length, job.option("seed"), redundancy, ctx)
    w.text(entry.value)
    w.value("hash", hashlib.sha256(entry.value.encode("utf-8")).hexdigest())
    certified = True
    for cert in entry.certificates:
        w.status("exact", cert["index"], cert["exact"], f"pi0={cert['pi0']} pi1={cert['pi1']}")
        certified = certified and cert["exact"]
    return EXIT_OK if certified else EXIT_CERTIFICATE


def _derived(job: Job, w: ReportWriter, ctx: Context) -> int:
    m = parse_pic2(read_text(job.inputs[0]))
    t = AdditiveFunctor.parse(job.option("functor"))
    redundancy = ctx.engine.get("seed_redundancy", 2)
    entry = _derived_entry(t, m, job.option("degree"), job.option("length"), job.option("seed"), redundancy, ctx)
    w.value("functor", entry.meta["functor"])
    w.value("degree", entry.meta["degree"])
    w.value("pi0", entry.meta["pi0"])
    w.value("pi1", entry.meta["pi1"])
    w.value("resolution", entry.value)
    return EXIT_OK


def _sequence_oracle(e, t: AdditiveFunctor, count: int) -> Optional[List[FgAbPresentation]]:
    """Classical Tor sequence when every term of the extension is discrete."""
    if t.kind != TENSOR:
        return None
    terms = (e.F.source, e.F.target, e.G.target)
    if not all(p.is_discrete() for p in terms):
        return None
    a, b, c = (homotopy_invariants(p)[0] for p in terms)
    expected = tor_long_exact_oracle(a, b, c, t.coefficient)
    return (expected + [FgAbPresentation.trivial()] * count)[:count]


def _longseq(job: Job, w: ReportWriter, ctx: Context) -> int:
    e = parse_extension(read_text(job.inputs[0]))
    t = AdditiveFunctor.parse(job.option("functor"))
    seq = long_2exact_sequence(t, e, job.option("length", 1))
    for label, entry in zip(seq.labels, seq.entries):
        w.value(label, _groups(*homotopy_invariants(entry)))
    w.status("surjective", 1, seq.right_end_surjective)
    for cert in seq.certificates:
        w.status("exact", cert.index, cert.exact, _groups(cert.pi0, cert.pi1))
    status = EXIT_OK if seq.certified else EXIT_CERTIFICATE
    expected = _sequence_oracle(e, t, len(seq.entries))
    if expected is not None:
        for k, (got, want) in enumerate(zip(seq.pi0_sequence(), expected)):
            match = got.invariants() == want.invariants()
            w.status("oracle", k, match, f"pi0={got.describe()} expected={want.describe()}")
            if not match:
                status = EXIT_ORACLE
    return status


def _check(job: Job, w: ReportWriter, ctx: Context) -> int:
    text = read_text(job.inputs[0])
    kind = detect_kind(text)
    w.value("kind", kind)
    if kind == "matrix":
        m = parse_matrix(text)
        s, u, v = snf(m)
        identity_ok = u @ m @ v == s
        diag = [s[i, i] for i in range(min(s.rows, s.cols))]
        divides = all(diag[i + 1] % diag[i] == 0 if diag[i] else diag[i + 1] == 0 for i in range(len(diag) - 1))
        w.status("snf-identity", 0, identity_ok)
        w.status("snf-divisibility", 0, divides)
        return EXIT_OK if identity_ok and divides else EXIT_CERTIFICATE
    if kind == "pic2":
        p = parse_pic2(text)
        w.status("well-defined", 0, True, _groups(*homotopy_invariants(p)))
        return EXIT_OK
    if kind == "complex":
        c = parse_complex(text)
        report = check_two_chain_complex(c)
        for v in report.violations:
            w.status(v.identity, v.index, False, f"residual={v.residual}")
        if not report.valid:
            return EXIT_CERTIFICATE
        w.status("complex", c.length, True)
        for n in range(c.length + 1):
            w.value(f"H{n}", _groups(*homotopy_invariants(homology(c, n))))
        return EXIT_OK
    e = parse_extension(text)
    cert = check_extension(e)
    w.status("essentially-surjective", "G", cert.essentially_surjective)
    w.status("kernel-comparison", "F", cert.comparison_flags.equivalence)
    return EXIT_OK if cert.is_extension else EXIT_CERTIFICATE


def parse_range(text: str) -> Tuple[int, int]:
    lo, sep, hi = text.partition("..")
    try:
        bounds = (int(lo), int(hi))
    except ValueError as exc:
        raise ParseError(f"range {text!r} is not of the form a..b") from exc
    if not sep or bounds[0] < 1 or bounds[0] > bounds[1]:
        raise ParseError(f"range {text!r} is not of the form a..b with 1 <= a <= b")
    return bounds


def table_cell(a: int, b: int) -> Tuple[bool, str]:
    """L_0 and L_1 of −⊗Z/b on disc(Z/a) against the classical values."""
    coefficient = FgAbPresentation.cyclic(b)
    t = AdditiveFunctor(TENSOR, coefficient)
    m = disc(FgAbPresentation.cyclic(a))
    res = projective_resolution(m, 3)
    l0 = derived(t, m, 0, resolution=res)
    l1 = derived(t, m, 1, resolution=res)
    expected = FgAbPresentation.cyclic(gcd(a, b))
    tor = tor1_oracle(FgAbPresentation.cyclic(a), coefficient)
    ok = (l0.pi0.invariants() == expected.invariants()
          and l1.pi0.invariants() == tor.invariants() == expected.invariants()
          and l1.pi1.is_trivial())
    detail = f"L0={l0.pi0.describe()} L1={l1.pi0.describe()} L1.pi1={l1.pi1.describe()} tor={tor.describe()}"
    return ok, detail


def _table(job: Job, w: ReportWriter, ctx: Context) -> int:
    kind = job.option("functor").partition(":")[0].strip()
    if kind != TENSOR:
        raise UnsupportedFunctorKind(f"table compares against Tor and needs a tensor functor, not {kind!r}")
    if job.option("range"):
        lo, hi = parse_range(job.option("range"))
    else:
        lo, hi = ctx.engine.get("table_range", [2, 12])
    jobs = job.option("jobs", ctx.engine.get("table_jobs", 1)) or 1
    pairs = [(a, b) for a in range(lo, hi + 1) for b in range(lo, hi + 1)]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        cells = list(pool.map(lambda ab: table_cell(*ab), pairs))
    status = EXIT_OK
    for (a, b), (ok, detail) in zip(pairs, cells):
        w.status("tor", f"{a},{b}", ok, detail)
        if not ok:
            status = EXIT_ORACLE
    return status


_HANDLERS: Dict[str, Callable[[Job, ReportWriter, Context], int]] = {
    "snf": _snf,
    "pi": _pi,
    "homology": _homology,
    "resolve": _resolve,
    "derived": _derived,
    "longseq": _longseq,
    "check": _check,
    "table": _table,
}


def run(job: Job, stream: Optional[TextIO] = None, context: Optional[Context] = None,
        errors: Optional[TextIO] = None) -> int:
    """Run one job, write its report to `stream` and return the exit status."""
    stream = stream or sys.stdout
    errors = errors or sys.stderr
    context = context or Context.from_config()
    writer = ReportWriter(job.option("format", "text"))
    _logger.debug("CommandStarted", {"command": job.command, "inputs": list(job.inputs)})
    try:
        status = _HANDLERS[job.command](job, writer, context)
    except CertificateFailure as e:
        writer.status(e.invariant, e.index, False, f"residual={e.residual}" if e.residual else None)
        status = EXIT_CERTIFICATE
        errors.write(f"error: {e}\n")
    except (NotAnExtension, NotEssentiallySurjective) as e:
        status = EXIT_CERTIFICATE
        errors.write(f"error: {e}\n")
    except Pic2haError as e:
        status = EXIT_PARSE
        errors.write(f"error: {e}\n")
    stream.write(writer.render())
    _logger.info("CommandFinished", {"command": job.command, "status": status})
    return status
