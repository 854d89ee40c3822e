"""Deterministic timed automata with rectangular guards.

The text format is line based::

    # comments run to end of line
    clocks x, y
    alphabet a, b
    locations q, p
    initial q x=0 && y=0          # a single valuation (omitted clocks are 0)
    start p x=0 && 0<y<1          # optional per-location start constraint
    final q                       # guard defaults to true
    edge q -> p a, b when x<1 reset x
    edge p -> q a, b when 1<y<2 reset {y}

Guards are conjunctions (``&&``, ``and``, ``,`` or ``∧``) of atoms
``x < 3``, ``2 <= x``, ``1 < y < 2`` or ``x = 3``; an equality is stored as
``x >= 3 && x <= 3``.  The same document may also be given as JSON or YAML
with the field names ``clocks``, ``alphabet``, ``locations``, ``initial``,
``start``, ``final`` and ``edges`` (see :func:`automaton_from_data`).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, NamedTuple

import yaml

RELATIONS = ("<", "<=", ">", ">=")


class ParseError(ValueError):
    """Syntax error in an automaton document, with a 1-based position."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)


class ValidationError(ValueError):
    pass


def as_rational(value) -> Fraction:
    """Exact rational from an int, a Fraction, or a string like ``"3/2"`` or ``"0.7"``."""
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, float):
        # floats only reach here from JSON/YAML literals; read them as written
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot read {value!r} as a rational")


def format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class ClockConstraint:
    clock: str
    relation: str
    bound: int

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise ValidationError(f"unknown relation {self.relation!r}")
        if not isinstance(self.bound, int) or self.bound < 0:
            raise ValidationError(f"constraint bound must be a natural number, got {self.bound!r}")

    def holds(self, value) -> bool:
        b = self.bound
        return {"<": value < b, "<=": value <= b, ">": value > b, ">=": value >= b}[self.relation]

    def __str__(self):
        return f"{self.clock}{self.relation}{self.bound}"


@dataclass(frozen=True)
class Interval:
    """Subset of [0, inf) given by two bounds; ``hi is None`` means unbounded."""

    lo: Fraction = Fraction(0)
    lo_strict: bool = False
    hi: Fraction | None = None
    hi_strict: bool = True

    def meet(self, other: Interval) -> Interval:
        if self.lo > other.lo:
            lo, lo_strict = self.lo, self.lo_strict
        elif other.lo > self.lo:
            lo, lo_strict = other.lo, other.lo_strict
        else:
            lo, lo_strict = self.lo, self.lo_strict or other.lo_strict
        if self.hi is None:
            hi, hi_strict = other.hi, other.hi_strict
        elif other.hi is None or self.hi < other.hi:
            hi, hi_strict = self.hi, self.hi_strict
        elif other.hi < self.hi:
            hi, hi_strict = other.hi, other.hi_strict
        else:
            hi, hi_strict = self.hi, self.hi_strict or other.hi_strict
        return Interval(lo, lo_strict, hi, hi_strict)

    def is_empty(self) -> bool:
        if self.hi is None:
            return False
        if self.lo < self.hi:
            return False
        return not (self.lo == self.hi and not self.lo_strict and not self.hi_strict)

    def point(self) -> Fraction | None:
        if self.hi is not None and self.lo == self.hi and not self.is_empty():
            return self.lo
        return None

    def __contains__(self, value) -> bool:
        if value < self.lo or (self.lo_strict and value == self.lo):
            return False
        if self.hi is None:
            return True
        return value < self.hi or (value == self.hi and not self.hi_strict)


def constraint_interval(c: ClockConstraint) -> Interval:
    b = Fraction(c.bound)
    if c.relation == "<":
        return Interval(hi=b, hi_strict=True)
    if c.relation == "<=":
        return Interval(hi=b, hi_strict=False)
    if c.relation == ">":
        return Interval(lo=b, lo_strict=True)
    return Interval(lo=b, lo_strict=False)


@dataclass(frozen=True)
class Guard:
    constraints: tuple[ClockConstraint, ...] = ()

    @classmethod
    def of(cls, *constraints: ClockConstraint) -> Guard:
        return cls(tuple(constraints))

    def clocks(self) -> set[str]:
        return {c.clock for c in self.constraints}

    def intervals(self) -> dict[str, Interval]:
        """Per-clock interval induced by the conjunction (only constrained clocks)."""
        out: dict[str, Interval] = {}
        for c in self.constraints:
            iv = constraint_interval(c)
            out[c.clock] = out[c.clock].meet(iv) if c.clock in out else iv
        return out

    def is_satisfiable(self) -> bool:
        return not any(iv.is_empty() for iv in self.intervals().values())

    def conjoin(self, other: Guard) -> Guard:
        return Guard(self.constraints + other.constraints)

    def holds(self, valuation: Mapping[str, Fraction]) -> bool:
        return all(c.holds(valuation[c.clock]) for c in self.constraints)

    def max_bound(self) -> int:
        return max((c.bound for c in self.constraints), default=0)

    def __str__(self):
        if not self.constraints:
            return "true"
        return " && ".join(str(c) for c in self.constraints)


TRUE = Guard()


@dataclass(frozen=True)
class Edge:
    source: str
    target: str
    label: str
    guard: Guard = TRUE
    resets: frozenset[str] = frozenset()

    def __str__(self):
        resets = ", ".join(sorted(self.resets))
        return f"{self.source} -> {self.target} {self.label} when {self.guard} reset {{{resets}}}"


@dataclass(frozen=True)
class ClockValuation:
    clocks: tuple[str, ...]
    values: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.clocks) != len(self.values):
            raise ValidationError("valuation must give one value per clock")
        if any(v < 0 for v in self.values):
            raise ValidationError("clock values must be nonnegative")

    @classmethod
    def from_mapping(cls, clocks: Iterable[str], mapping: Mapping[str, object]) -> ClockValuation:
        clocks = tuple(clocks)
        missing = set(clocks) - set(mapping)
        if missing:
            raise ValidationError(f"valuation misses clocks {sorted(missing)}")
        return cls(clocks, tuple(as_rational(mapping[c]) for c in clocks))

    @classmethod
    def zero(cls, clocks: Iterable[str]) -> ClockValuation:
        clocks = tuple(clocks)
        return cls(clocks, tuple(Fraction(0) for _ in clocks))

    def __getitem__(self, clock: str) -> Fraction:
        return self.values[self.clocks.index(clock)]

    def as_dict(self) -> dict[str, Fraction]:
        return dict(zip(self.clocks, self.values))

    def __str__(self):
        return "(" + ", ".join(f"{c}={format_rational(v)}" for c, v in zip(self.clocks, self.values)) + ")"


@dataclass(frozen=True)
class TimedWord:
    """Finite timed word ``(a1,t1)...(an,tn)`` with nondecreasing timestamps.

    Letters are any hashable value; after 0-elimination they are frozensets.
    """

    events: tuple[tuple[object, Fraction], ...] = ()

    def __post_init__(self):
        times = [t for _, t in self.events]
        if any(t < 0 for t in times):
            raise ValueError("timestamps must be nonnegative")
        if any(b < a for a, b in zip(times, times[1:])):
            raise ValueError("timestamps must be nondecreasing")

    @classmethod
    def of(cls, *events) -> TimedWord:
        return cls(tuple((a, as_rational(t)) for a, t in events))

    @property
    def duration(self) -> Fraction:
        return self.events[-1][1] if self.events else Fraction(0)

    def letters(self) -> set:
        return {a for a, _ in self.events}

    def __len__(self):
        return len(self.events)

    def __str__(self):
        if not self.events:
            return "ε"
        return " ".join(f"{_format_letter(a)}@{format_rational(t)}" for a, t in self.events)


def _format_letter(a) -> str:
    if isinstance(a, frozenset):
        return "{" + ",".join(sorted(map(str, a))) + "}"
    return str(a)


@dataclass(frozen=True, eq=True)
class TimedAutomaton:
    locations: tuple[str, ...]
    clocks: tuple[str, ...]
    alphabet: tuple[str, ...]
    edges: tuple[Edge, ...]
    initial_location: str
    initial_valuation: ClockValuation
    final: Mapping[str, Guard] = field(default_factory=dict)
    start: Mapping[str, Guard] = field(default_factory=dict)

    __hash__ = None  # mappings inside

    def __post_init__(self):
        for name, items in (("location", self.locations), ("clock", self.clocks), ("letter", self.alphabet)):
            if len(set(items)) != len(items):
                raise ValidationError(f"duplicate {name} declaration")
        locs, clocks = set(self.locations), set(self.clocks)
        if self.initial_location not in locs:
            raise ValidationError(f"undeclared location {self.initial_location!r} in initial")
        if self.initial_valuation.clocks != self.clocks:
            raise ValidationError("initial valuation must list the declared clocks in order")
        if any(v.denominator != 1 for v in self.initial_valuation.values):
            raise ValidationError("initial valuation must have integer coordinates")
        for kind, mapping in (("final", self.final), ("start", self.start)):
            for q, g in mapping.items():
                if q not in locs:
                    raise ValidationError(f"undeclared location {q!r} in {kind}")
                self._check_guard(g, f"{kind} constraint of {q}")
        for e in self.edges:
            for q in (e.source, e.target):
                if q not in locs:
                    raise ValidationError(f"undeclared location {q!r} in edge {e}")
            if e.label not in self.alphabet:
                raise ValidationError(f"undeclared letter {e.label!r} in edge {e}")
            self._check_guard(e.guard, f"guard of edge {e}")
            bad = set(e.resets) - clocks
            if bad:
                raise ValidationError(f"undeclared clocks {sorted(bad)} reset by edge {e}")
        s0 = self.start.get(self.initial_location)
        if s0 is not None and not s0.holds(self.initial_valuation.as_dict()):
            raise ValidationError("initial valuation violates the start constraint of the initial location")

    def _check_guard(self, g: Guard, where: str):
        bad = g.clocks() - set(self.clocks)
        if bad:
            raise ValidationError(f"undeclared clocks {sorted(bad)} in {where}")

    def outgoing(self, q: str) -> list[Edge]:
        return [e for e in self.edges if e.source == q]

    def is_final(self, q: str) -> bool:
        return q in self.final


class DeterminismReport(NamedTuple):
    deterministic: bool
    conflicts: list[tuple[int, int]]


def check_determinism(a: TimedAutomaton) -> DeterminismReport:
    """Pairs ``(i, j)``, ``i < j``, of edge indices violating determinism.

    The initial constraint is a single valuation by construction, so only the
    guard condition on same-source same-label edges with distinct targets is
    checked.
    """
    conflicts = []
    for (i, e1), (j, e2) in combinations(enumerate(a.edges), 2):
        if e1.source != e2.source or e1.label != e2.label or e1.target == e2.target:
            continue
        if e1.guard.conjoin(e2.guard).is_satisfiable():
            conflicts.append((i, j))
    return DeterminismReport(not conflicts, conflicts)


def max_constant(a: TimedAutomaton) -> int:
    guards = [e.guard for e in a.edges] + list(a.final.values()) + list(a.start.values())
    m = max((g.max_bound() for g in guards), default=0)
    return max([m] + [int(v) for v in a.initial_valuation.values])


# --------------------------------------------------------------------------
# text format

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t]+)
  | (?P<comment>\#.*)
  | (?P<arrow>->|→)
  | (?P<op><=|>=|==|≤|≥|<|>|=)
  | (?P<and>&&|∧)
  | (?P<num>\d+(?:/\d+)?(?:\.\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<punct>[,{}\-])
    """,
    re.VERBOSE,
)

_OP_NORMAL = {"≤": "<=", "≥": ">=", "==": "="}
_FLIP = {"<": ">", "<=": ">=", ">": "<", ">=": "<=", "=": "="}
_KEYWORDS = {"clocks", "alphabet", "locations", "initial", "start", "final", "edge"}


class _Tok(NamedTuple):
    kind: str
    text: str
    line: int
    col: int


def _tokenize(line: str, lineno: int) -> list[_Tok]:
    toks, pos = [], 0
    while pos < len(line):
        m = _TOKEN.match(line, pos)
        if m is None:
            raise ParseError(f"unexpected character {line[pos]!r}", lineno, pos + 1)
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            text = m.group()
            if kind == "op":
                text = _OP_NORMAL.get(text, text)
            toks.append(_Tok(kind, text, lineno, pos + 1))
        pos = m.end()
    return toks


class _Cursor:
    def __init__(self, toks: list[_Tok], lineno: int, line: str):
        self.toks, self.i, self.lineno, self.line = toks, 0, lineno, line

    def peek(self, offset: int = 0) -> _Tok | None:
        j = self.i + offset
        return self.toks[j] if j < len(self.toks) else None

    def at_end(self) -> bool:
        return self.i >= len(self.toks)

    def next(self) -> _Tok:
        tok = self.peek()
        if tok is None:
            self.fail("unexpected end of line")
        self.i += 1
        return tok

    def expect(self, kind: str, text: str | None = None) -> _Tok:
        tok = self.next()
        if tok.kind != kind or (text is not None and tok.text != text):
            self.fail(f"expected {text or kind}, found {tok.text!r}", tok)
        return tok

    def accept(self, kind: str, text: str | None = None) -> _Tok | None:
        tok = self.peek()
        if tok is not None and tok.kind == kind and (text is None or tok.text == text):
            self.i += 1
            return tok
        return None

    def fail(self, message: str, tok: _Tok | None = None):
        col = tok.col if tok is not None else len(self.line) + 1
        raise ParseError(message, self.lineno, col)


def _parse_natural(cur: _Cursor, tok: _Tok) -> int:
    if not tok.text.isdigit():
        cur.fail(f"guard constants must be natural numbers, found {tok.text!r}", tok)
    return int(tok.text)


def _atom(clock: str, op: str, bound: int) -> list[ClockConstraint]:
    if op == "=":
        return [ClockConstraint(clock, ">=", bound), ClockConstraint(clock, "<=", bound)]
    return [ClockConstraint(clock, op, bound)]


def _parse_guard(cur: _Cursor, stop: set[str] = frozenset()) -> Guard:
    """Guard up to end of line or one of the ``stop`` keywords."""
    out: list[ClockConstraint] = []

    def done():
        tok = cur.peek()
        return tok is None or (tok.kind == "ident" and tok.text in stop)

    if done():
        return TRUE
    if cur.peek().kind == "ident" and cur.peek().text == "true":
        cur.next()
        if not done():
            cur.fail("'true' cannot be combined with other constraints", cur.peek())
        return TRUE
    while True:
        first = cur.next()
        if first.kind == "ident":
            if cur.peek() is not None and cur.peek().kind == "punct" and cur.peek().text == "-":
                cur.fail("diagonal constraints are not supported", cur.peek())
            op = cur.expect("op")
            out += _atom(first.text, op.text, _parse_natural(cur, cur.expect("num")))
        elif first.kind == "num":
            b1 = _parse_natural(cur, first)
            op1 = cur.expect("op")
            clock = cur.expect("ident")
            out += _atom(clock.text, _FLIP[op1.text], b1)
            op2 = cur.accept("op")
            if op2 is not None:
                out += _atom(clock.text, op2.text, _parse_natural(cur, cur.expect("num")))
        else:
            cur.fail(f"expected a constraint, found {first.text!r}", first)
        if done():
            break
        sep = cur.next()
        if sep.kind == "and" or (sep.kind == "punct" and sep.text == ","):
            continue
        if sep.kind == "ident" and sep.text == "and":
            continue
        cur.fail(f"expected '&&' between constraints, found {sep.text!r}", sep)
    return Guard(tuple(out))


def _parse_names(cur: _Cursor, stop: set[str] = frozenset()) -> list[str]:
    names = []
    braced = cur.accept("punct", "{") is not None
    while not cur.at_end():
        tok = cur.peek()
        if braced and tok.kind == "punct" and tok.text == "}":
            break
        if tok.kind == "ident" and tok.text in stop:
            break
        tok = cur.expect("ident")
        names.append(tok.text)
        if cur.accept("punct", ",") is None:
            break
    if braced:
        cur.expect("punct", "}")
    return names


def parse_automaton(text: str, fmt: str = "auto") -> TimedAutomaton:
    """Parse an automaton document (``fmt`` is ``"text"``, ``"json"``, ``"yaml"`` or ``"auto"``)."""
    if fmt == "auto":
        fmt = _sniff_format(text)
    if fmt == "json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, exc.lineno, exc.colno) from exc
        return automaton_from_data(data)
    if fmt == "yaml":
        try:
            data = yaml.safe_load(text)
        except yaml.MarkedYAMLError as exc:
            mark = exc.problem_mark
            raise ParseError(str(exc.problem), mark.line + 1 if mark else None,
                             mark.column + 1 if mark else None) from exc
        return automaton_from_data(data)
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    return _parse_text(text)


def _sniff_format(text: str) -> str:
    for line in text.splitlines():
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        if s.startswith("{"):
            return "json"
        if re.match(r"^[A-Za-z_]+\s*:", s) or s.startswith("- "):
            return "yaml"
        return "text"
    return "text"


def _parse_text(text: str) -> TimedAutomaton:
    decl: dict[str, list[str]] = {}
    initial = None
    start: dict[str, Guard] = {}
    final: dict[str, Guard] = {}
    edges: list[tuple[Edge, _Tok]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        toks = _tokenize(line, lineno)
        if not toks:
            continue
        cur = _Cursor(toks, lineno, line)
        kw = cur.expect("ident")
        if kw.text not in _KEYWORDS:
            cur.fail(f"unknown declaration {kw.text!r}", kw)
        if kw.text in ("clocks", "alphabet", "locations"):
            if kw.text in decl:
                cur.fail(f"{kw.text} declared twice", kw)
            decl[kw.text] = _parse_names(cur)
        elif kw.text == "initial":
            if initial is not None:
                cur.fail("initial declared twice", kw)
            loc = cur.expect("ident")
            initial = (loc, _parse_guard(cur))
        elif kw.text in ("start", "final"):
            loc = cur.expect("ident")
            target = start if kw.text == "start" else final
            if loc.text in target:
                cur.fail(f"{kw.text} constraint of {loc.text} given twice", loc)
            target[loc.text] = _parse_guard(cur)
        else:
            src = cur.expect("ident")
            cur.expect("arrow")
            dst = cur.expect("ident")
            labels = _parse_names(cur, stop={"when", "reset"})
            if not labels:
                cur.fail("edge needs at least one label", cur.peek())
            guard = TRUE
            if cur.accept("ident", "when"):
                guard = _parse_guard(cur, stop={"reset"})
            resets: list[str] = []
            if cur.accept("ident", "reset"):
                resets = _parse_names(cur)
            if not cur.at_end():
                cur.fail(f"unexpected {cur.peek().text!r}", cur.peek())
            for lab in labels:
                edges.append((Edge(src.text, dst.text, lab, guard, frozenset(resets)), src))
        if not cur.at_end():
            cur.fail(f"unexpected {cur.peek().text!r}", cur.peek())
    for kw in ("clocks", "alphabet", "locations"):
        decl.setdefault(kw, [])
    if initial is None:
        raise ParseError("missing 'initial' declaration")
    loc, g = initial
    clocks = tuple(decl["clocks"])
    return TimedAutomaton(
        locations=tuple(decl["locations"]),
        clocks=clocks,
        alphabet=tuple(decl["alphabet"]),
        edges=tuple(e for e, _ in edges),
        initial_location=loc.text,
        initial_valuation=initial_valuation_from_guard(clocks, g),
        final=final,
        start=start,
    )


def initial_valuation_from_guard(clocks: tuple[str, ...], g: Guard) -> ClockValuation:
    """The single valuation defined by ``g``; clocks it does not mention are 0."""
    bad = g.clocks() - set(clocks)
    if bad:
        raise ValidationError(f"undeclared clocks {sorted(bad)} in initial constraint")
    ivs = g.intervals()
    values = []
    for c in clocks:
        if c not in ivs:
            values.append(Fraction(0))
            continue
        iv = ivs[c]
        if iv.is_empty():
            raise ValidationError(f"initial constraint on {c} is unsatisfiable")
        if iv.point() is None:
            raise ValidationError(f"initial constraint on {c} does not define a single value")
        values.append(iv.point())
    return ClockValuation(clocks, tuple(values))


def serialize_automaton(a: TimedAutomaton) -> str:
    """Inverse of :func:`parse_automaton` for the text format."""
    lines = [
        "clocks " + ", ".join(a.clocks),
        "alphabet " + ", ".join(a.alphabet),
        "locations " + ", ".join(a.locations),
    ]
    init = " && ".join(f"{c}={format_rational(v)}" for c, v in zip(a.clocks, a.initial_valuation.values))
    lines.append(f"initial {a.initial_location} {init}".rstrip())
    for q, g in a.start.items():
        lines.append(f"start {q} {g}")
    for q, g in a.final.items():
        lines.append(f"final {q} {g}")
    for e in a.edges:
        resets = ", ".join(sorted(e.resets))
        lines.append(f"edge {e.source} -> {e.target} {e.label} when {e.guard} reset {{{resets}}}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# structured data (JSON / YAML)

def _guard_from_data(obj, where: str) -> Guard:
    if obj is None or obj is True or obj == "true":
        return TRUE
    if isinstance(obj, str):
        cur = _Cursor(_tokenize(obj, 1), 1, obj)
        g = _parse_guard(cur)
        if not cur.at_end():
            cur.fail(f"unexpected {cur.peek().text!r}", cur.peek())
        return g
    if not isinstance(obj, list):
        raise ValidationError(f"{where}: a guard is a list of {{clock, op, const}} items")
    out: list[ClockConstraint] = []
    for item in obj:
        try:
            clock, op, const = item["clock"], item["op"], item["const"]
        except (KeyError, TypeError):
            raise ValidationError(f"{where}: malformed constraint {item!r}") from None
        op = _OP_NORMAL.get(op, op)
        if op not in _FLIP:
            raise ValidationError(f"{where}: unknown relation {op!r}")
        if isinstance(const, bool) or not isinstance(const, int) or const < 0:
            raise ValidationError(f"{where}: constants must be natural numbers, got {const!r}")
        out += _atom(clock, op, const)
    return Guard(tuple(out))


def _guard_to_data(g: Guard) -> list[dict]:
    return [{"clock": c.clock, "op": c.relation, "const": c.bound} for c in g.constraints]


def automaton_from_data(data: Mapping) -> TimedAutomaton:
    if not isinstance(data, Mapping):
        raise ValidationError("automaton document must be a mapping")
    unknown = set(data) - {"clocks", "alphabet", "locations", "initial", "start", "final", "edges"}
    if unknown:
        raise ValidationError(f"unknown fields {sorted(unknown)}")
    clocks = tuple(data.get("clocks", ()))
    init = data.get("initial")
    if init is None:
        raise ValidationError("missing 'initial'")
    if isinstance(init, str):
        init = {"location": init}
    loc = init.get("location")
    val = init.get("valuation")
    if val is None:
        valuation = ClockValuation.zero(clocks)
    elif isinstance(val, Mapping):
        bad = set(val) - set(clocks)
        if bad:
            raise ValidationError(f"undeclared clocks {sorted(bad)} in initial valuation")
        valuation = ClockValuation.from_mapping(clocks, {c: val.get(c, 0) for c in clocks})
    else:
        valuation = initial_valuation_from_guard(clocks, _guard_from_data(val, "initial"))
    edges = []
    for i, e in enumerate(data.get("edges", ())):
        where = f"edge #{i}"
        try:
            labels = e["label"]
            src, dst = e["from"], e["to"]
        except (KeyError, TypeError):
            raise ValidationError(f"{where}: needs 'from', 'to' and 'label'") from None
        labels = [labels] if isinstance(labels, str) else list(labels)
        guard = _guard_from_data(e.get("guard"), where)
        resets = frozenset(e.get("resets", ()))
        edges += [Edge(src, dst, lab, guard, resets) for lab in labels]
    final = {q: _guard_from_data(g, f"final of {q}") for q, g in (data.get("final") or {}).items()}
    start = {q: _guard_from_data(g, f"start of {q}") for q, g in (data.get("start") or {}).items()}
    return TimedAutomaton(
        locations=tuple(data.get("locations", ())),
        clocks=clocks,
        alphabet=tuple(data.get("alphabet", ())),
        edges=tuple(edges),
        initial_location=loc,
        initial_valuation=valuation,
        final=final,
        start=start,
    )


def automaton_to_data(a: TimedAutomaton) -> dict:
    return {
        "clocks": list(a.clocks),
        "alphabet": list(a.alphabet),
        "locations": list(a.locations),
        "initial": {
            "location": a.initial_location,
            "valuation": {c: format_rational(v) for c, v in zip(a.clocks, a.initial_valuation.values)},
        },
        "start": {q: _guard_to_data(g) for q, g in a.start.items()},
        "final": {q: _guard_to_data(g) for q, g in a.final.items()},
        "edges": [
            {"from": e.source, "to": e.target, "label": e.label,
             "guard": _guard_to_data(e.guard), "resets": sorted(e.resets)}
            for e in a.edges
        ],
    }
