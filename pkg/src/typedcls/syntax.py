"""Terms, patterns, canonical forms and the surface syntax.

Terms and patterns share one representation.  A :class:`Term` is a
multiset of components (stored as a sorted tuple); a component is a
:class:`Seq`, a :class:`Loop` or a term variable.  A term without
variables is *ground*.

Values built directly through the dataclass constructors are *raw*: they
may contain empty sequences, nested parallel terms and unrotated loops.
:func:`normalize` maps a raw value to the unique canonical representative
of its structural-congruence class, so congruence is plain equality of
canonical forms.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

from .errors import KindError, ParseError

TERM, SEQ, ELEM = "term", "seq", "elem"
MARKERS = {TERM: "$", SEQ: "~", ELEM: "?"}
KEYWORDS = frozenset({"loop", "eps"})
ELEMENT_NAME = re.compile(r"[a-z][a-zA-Z0-9_']*\Z")


# Terms are immutable and rebuilt often, so hashes, sort keys and the
# "already canonical" flag are memoized on the instance.  The memo entries
# start with an underscore and are dropped when pickling (string hashes are
# per-process).

def _cached(obj, attr, compute):
    d = obj.__dict__
    v = d.get(attr)
    if v is None:
        v = d[attr] = compute()
    return v


def _plain_state(obj):
    return {k: v for k, v in obj.__dict__.items() if not k.startswith("_")}


@dataclass(frozen=True)
class Var:
    kind: str
    name: str

    def __post_init__(self):
        if self.kind not in MARKERS:
            raise ValueError(f"bad variable kind {self.kind!r}")

    def __str__(self):
        return MARKERS[self.kind] + self.name


@dataclass(frozen=True)
class Seq:
    """A sequence component; ``items`` holds element names and seq/elem variables."""

    items: tuple


@dataclass(frozen=True)
class Loop:
    """A looping sequence ``membrane`` wrapping ``content``."""

    membrane: tuple
    content: "Term"

    def __hash__(self):
        return _cached(self, "_hash", lambda: hash((self.membrane, self.content)))

    __getstate__ = lambda self: _plain_state(self)


@dataclass(frozen=True)
class Term:
    comps: tuple = ()

    def __hash__(self):
        return _cached(self, "_hash", lambda: hash(self.comps))

    __getstate__ = lambda self: _plain_state(self)

    def __str__(self):
        return pretty(self)

    def __bool__(self):
        return bool(self.comps)


Item = Union[str, Var]
Component = Union[Seq, Loop, Var]

EMPTY = Term(())


# ---------------------------------------------------------------------------
# total order

def item_key(item):
    if isinstance(item, str):
        return (0, item)
    return (1, item.kind, item.name)


def items_key(items):
    return tuple(item_key(i) for i in items)


def comp_key(comp):
    if isinstance(comp, Seq):
        return (0, items_key(comp.items))
    if isinstance(comp, Loop):
        return _cached(comp, "_key",
                       lambda: (1, items_key(comp.membrane), term_key(comp.content)))
    return (2, comp.name)


def term_key(term):
    return _cached(term, "_key", lambda: tuple(comp_key(c) for c in term.comps))


# ---------------------------------------------------------------------------
# canonical forms

def is_ground_items(items):
    return all(isinstance(i, str) for i in items)


def least_rotation(items):
    items = tuple(items)
    if len(items) < 2:
        return items
    return min((items[i:] + items[:i] for i in range(len(items))), key=items_key)


def rotations(items):
    """Distinct rotations of a sequence, in first-occurrence order."""
    items = tuple(items)
    if not items:
        return [()]
    seen = []
    for i in range(len(items)):
        r = items[i:] + items[:i]
        if r not in seen:
            seen.append(r)
    return seen


def _flat_items(items):
    out = []
    for i in items:
        if isinstance(i, Seq):
            out.extend(_flat_items(i.items))
        elif isinstance(i, (tuple, list)):
            out.extend(_flat_items(i))
        elif isinstance(i, Var):
            if i.kind == TERM:
                raise ValueError(f"term variable {i} inside a sequence")
            out.append(i)
        elif isinstance(i, str):
            out.append(i)
        else:
            raise TypeError(f"not a sequence item: {i!r}")
    return tuple(out)


def _norm_comps(x, out):
    if isinstance(x, Term):
        if x.__dict__.get("_canon"):
            out.extend(x.comps)
            return
        for c in x.comps:
            _norm_comps(c, out)
    elif isinstance(x, Seq):
        items = _flat_items(x.items)
        if items:
            out.append(Seq(items))
    elif isinstance(x, Loop):
        membrane = _flat_items(x.membrane)
        content = normalize(x.content)
        if not membrane and not content.comps:
            return
        if is_ground_items(membrane):
            membrane = least_rotation(membrane)
        out.append(Loop(membrane, content))
    elif isinstance(x, Var):
        out.append(x if x.kind == TERM else Seq((x,)))
    elif isinstance(x, str):
        out.append(Seq((x,)))
    else:
        raise TypeError(f"not a term: {x!r}")


def normalize(x) -> Term:
    """Canonical form of a raw term or pattern.  Idempotent."""
    if isinstance(x, Term) and x.__dict__.get("_canon"):
        return x
    out = []
    _norm_comps(x, out)
    out.sort(key=comp_key)
    t = Term(tuple(out))
    t.__dict__["_canon"] = True
    return t


def par(*parts) -> Term:
    return normalize(Term(tuple(parts)))


def seq(*items) -> Term:
    return normalize(Seq(tuple(items)))


def loop(membrane, content=EMPTY) -> Term:
    if isinstance(membrane, (str, Var)):
        membrane = (membrane,)
    return normalize(Loop(tuple(membrane), content))


def congruent(t1, t2) -> bool:
    """Structural congruence; strings are parsed as patterns first."""
    if isinstance(t1, str):
        t1 = parse_pattern(t1)
    if isinstance(t2, str):
        t2 = parse_pattern(t2)
    return normalize(t1) == normalize(t2)


# ---------------------------------------------------------------------------
# queries

def iter_vars(x) -> Iterator[Var]:
    if isinstance(x, Term):
        for c in x.comps:
            yield from iter_vars(c)
    elif isinstance(x, Seq):
        for i in x.items:
            if isinstance(i, Var):
                yield i
    elif isinstance(x, Loop):
        for i in x.membrane:
            if isinstance(i, Var):
                yield i
        yield from iter_vars(x.content)
    elif isinstance(x, Var):
        yield x


def variables(x) -> frozenset:
    return frozenset(iter_vars(x))


def is_ground(x) -> bool:
    return next(iter_vars(x), None) is None


def elements(x) -> frozenset:
    """Element names occurring anywhere in ``x``."""
    found = set()

    def walk(y):
        if isinstance(y, Term):
            for c in y.comps:
                walk(c)
        elif isinstance(y, Seq):
            found.update(i for i in y.items if isinstance(i, str))
        elif isinstance(y, Loop):
            found.update(i for i in y.membrane if isinstance(i, str))
            walk(y.content)

    walk(x)
    return frozenset(found)


def size(x) -> int:
    """Elements, variables and loops, counted with multiplicity."""
    if isinstance(x, Term):
        return sum(size(c) for c in x.comps)
    if isinstance(x, Seq):
        return len(x.items)
    if isinstance(x, Loop):
        return 1 + len(x.membrane) + size(x.content)
    return 1


# ---------------------------------------------------------------------------
# printing

def _item_str(i):
    return i if isinstance(i, str) else str(i)


def pretty(x) -> str:
    """Deterministic surface text; ``parse_pattern(pretty(t))`` is congruent to ``t``."""
    if isinstance(x, Term):
        if not x.comps:
            return "eps"
        return " | ".join(pretty(c) for c in x.comps)
    if isinstance(x, Seq):
        return ".".join(_item_str(i) for i in x.items) if x.items else "eps"
    if isinstance(x, Loop):
        membrane = ".".join(_item_str(i) for i in x.membrane) or "eps"
        content = pretty(x.content) if x.content.comps else ""
        return f"loop({membrane}){{{content}}}"
    if isinstance(x, (tuple, list)):
        return ".".join(_item_str(i) for i in x) or "eps"
    return _item_str(x)


# ---------------------------------------------------------------------------
# lexing and parsing

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r\f\v]+)|(?P<nl>\n)|(?P<comment>\#[^\n]*)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_']*)|(?P<arrow>=>)"
    r"|(?P<punct>[|.(){}$~?:;,])"
)


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "punct", "eof"
    text: str
    line: int
    column: int


def tokenize(text: str) -> list:
    tokens = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        if kind == "nl":
            line, col = line + 1, 1
        else:
            if kind in ("ident", "punct", "arrow"):
                tokens.append(Token("ident" if kind == "ident" else "punct", m.group(), line, col))
            col += m.end() - m.start()
        pos = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


class TokenStream:
    """Cursor over a token list with error reporting helpers."""

    def __init__(self, text):
        self.tokens = tokenize(text)
        self.pos = 0

    @property
    def peek(self) -> Token:
        return self.tokens[self.pos]

    def at(self, text) -> bool:
        tok = self.peek
        return tok.kind != "eof" and tok.text == text

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def fail(self, message, expected=()):
        tok = self.peek
        found = repr(tok.text) if tok.kind != "eof" else "end of input"
        raise ParseError(f"{message}, found {found}", tok.line, tok.column, expected)

    def expect(self, text) -> Token:
        if not self.at(text):
            self.fail(f"expected {text!r}", {text})
        return self.advance()

    def ident(self, what="identifier") -> Token:
        if self.peek.kind != "ident":
            self.fail(f"expected {what}", {"IDENT"})
        return self.advance()

    def at_eof(self) -> bool:
        return self.peek.kind == "eof"


_ITEM_START = {"IDENT", "eps", "loop", "$", "~", "?"}


class PatternParser:
    """Recursive-descent parser for the term/pattern grammar.

    ``kinds`` records the marker used for every variable name so a rule's
    two sides can share one table.
    """

    def __init__(self, stream: TokenStream, kinds=None):
        self.s = stream
        self.kinds = {} if kinds is None else kinds

    def term(self) -> Term:
        parts = [self.item()]
        while self.s.at("|"):
            self.s.advance()
            parts.append(self.item())
        return Term(tuple(p for p in parts if p is not None))

    def item(self):
        s = self.s
        if s.at("eps"):
            s.advance()
            return None
        if s.at("loop"):
            return self.loop()
        if s.at("$"):
            var = self.var()
            if s.at("."):
                s.fail(f"term variable {var} cannot appear inside a sequence")
            return var
        if not (s.at("~") or s.at("?") or (s.peek.kind == "ident" and s.peek.text not in KEYWORDS)):
            s.fail("expected a term item", _ITEM_START)
        return Seq(self.seq())

    def loop(self) -> Loop:
        s = self.s
        s.expect("loop")
        s.expect("(")
        if s.at("eps"):
            s.advance()
            membrane = ()
        else:
            membrane = self.seq()
        s.expect(")")
        content = EMPTY
        if s.at("{"):
            s.advance()
            if not s.at("}"):
                content = self.term()
            s.expect("}")
        return Loop(membrane, content)

    def seq(self) -> tuple:
        items = [self.pitem()]
        while self.s.at("."):
            self.s.advance()
            items.append(self.pitem())
        return tuple(items)

    def pitem(self):
        s = self.s
        if s.at("~") or s.at("?"):
            return self.var()
        if s.at("$"):
            s.fail("term variables are only allowed at parallel level")
        if s.peek.kind != "ident" or s.peek.text in KEYWORDS:
            s.fail("expected a sequence item", _ITEM_START - {"eps", "loop", "$"})
        tok = s.advance()
        if not ELEMENT_NAME.match(tok.text):
            raise ParseError(
                f"element names must start with a lowercase letter: {tok.text!r}",
                tok.line, tok.column,
            )
        return tok.text

    def var(self) -> Var:
        s = self.s
        marker = s.advance()
        kind = {"$": TERM, "~": SEQ, "?": ELEM}[marker.text]
        tok = s.ident("variable name")
        seen = self.kinds.setdefault(tok.text, kind)
        if seen != kind:
            raise KindError(
                f"variable {tok.text!r} used as both {MARKERS[seen]}{tok.text} "
                f"and {MARKERS[kind]}{tok.text}",
                tok.line, tok.column,
            )
        return Var(kind, tok.text)


def _parse_all(text):
    s = TokenStream(text)
    if s.at_eof():
        s.fail("empty input", _ITEM_START)
    raw = PatternParser(s).term()
    if not s.at_eof():
        s.fail("unexpected token", {"|", "EOF"})
    return raw


def parse_pattern(text: str) -> Term:
    """Parse and normalize a pattern ($X term, ~x sequence, ?x element variables)."""
    return normalize(_parse_all(text))


def parse_term(text: str) -> Term:
    """Parse and normalize a ground term."""
    raw = _parse_all(text)
    var = next(iter_vars(raw), None)
    if var is not None:
        raise ParseError(f"variable {var} is not allowed in a ground term")
    return normalize(raw)
