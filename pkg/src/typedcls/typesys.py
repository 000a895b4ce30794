"""Present/Required/Excluded types and the syntax-directed type checker.

A type is stored as the pair ``(present, required)``; the excluded set is
always ``excluded_of(present)`` and is never stored.
"""
from __future__ import annotations

from types import MappingProxyType
from typing import NamedTuple

from .errors import (
    EnvError, Incompatible, IllFormedBasis, NotCompatible, ParseError, RequirementNotProvided,
    TypingError, UnboundVariable, UnknownBasicType, UnknownElement,
)
from .syntax import ELEM, SEQ, TERM, Loop, Seq, Term, TokenStream, Var


def fmt_set(types) -> str:
    return "{" + ", ".join(sorted(types)) + "}"


class PREType(NamedTuple):
    present: frozenset
    required: frozenset

    def __str__(self):
        return f"({fmt_set(self.present)}, {fmt_set(self.required)})"


def pretype(present=(), required=()) -> PREType:
    return PREType(frozenset(present), frozenset(required))


UNIT = pretype()


class TypeEnv:
    """Element typing plus the required/excluded table of every basic type.

    ``requires`` and ``excludes`` map basic type names to iterables of basic
    type names; types not listed there default to empty sets.  ``types``
    adds declarations that appear in neither table nor as an element type.
    """

    def __init__(self, elems, requires=None, excludes=None, types=()):
        requires = dict(requires or {})
        excludes = dict(excludes or {})
        declared = set(types) | set(requires) | set(excludes) | set(elems.values())
        self.types = frozenset(declared)
        self.elems = MappingProxyType(dict(elems))
        self.requires = MappingProxyType({t: frozenset(requires.get(t, ())) for t in declared})
        self.excludes = MappingProxyType({t: frozenset(excludes.get(t, ())) for t in declared})
        for t in sorted(declared):
            r, e = self.requires[t], self.excludes[t]
            for u in sorted(r | e):
                if u not in declared:
                    raise EnvError(f"basic type {u!r} used by {t!r} is not declared")
            if t in r or t in e:
                raise EnvError(f"basic type {t!r} requires or excludes itself")
            if r & e:
                raise EnvError(f"basic type {t!r} both requires and excludes {fmt_set(r & e)}")

    def type_of(self, element, position=()):
        try:
            return self.elems[element]
        except KeyError:
            raise UnknownElement(element, position) from None

    def req(self, t) -> frozenset:
        try:
            return self.requires[t]
        except KeyError:
            raise UnknownBasicType(t) from None

    def excl(self, t) -> frozenset:
        try:
            return self.excludes[t]
        except KeyError:
            raise UnknownBasicType(t) from None

    def element_type(self, element, position=()) -> PREType:
        t = self.type_of(element, position)
        return PREType(frozenset((t,)), self.requires[t])

    def __repr__(self):
        return f"TypeEnv(elems={dict(self.elems)!r}, types={sorted(self.types)!r})"

    def describe(self) -> str:
        lines = []
        for t in sorted(self.types):
            line = f"type {t}"
            if self.requires[t]:
                line += " requires " + fmt_set(self.requires[t])
            if self.excludes[t]:
                line += " excludes " + fmt_set(self.excludes[t])
            lines.append(line + ";")
        for a in sorted(self.elems):
            lines.append(f"elem {a} : {self.elems[a]};")
        return "\n".join(lines) + "\n"


def parse_env(text: str) -> TypeEnv:
    """Read ``type t requires {..} excludes {..};`` and ``elem a : t;`` declarations."""
    s = TokenStream(text)
    requires, excludes, types, elems = {}, {}, [], {}

    def type_set():
        s.expect("{")
        out = []
        while not s.at("}"):
            out.append(s.ident("basic type").text)
            if not s.at("}"):
                s.expect(",")
        s.expect("}")
        return out

    while not s.at_eof():
        tok = s.peek
        if s.at("type"):
            if elems:
                raise ParseError("type declarations must precede elem declarations",
                                 tok.line, tok.column)
            s.advance()
            name = s.ident("basic type").text
            if name in types:
                raise ParseError(f"duplicate type {name!r}", tok.line, tok.column)
            types.append(name)
            seen = set()
            while s.at("requires") or s.at("excludes"):
                clause = s.advance()
                if clause.text in seen:
                    raise ParseError(f"repeated {clause.text} clause", clause.line, clause.column)
                seen.add(clause.text)
                (requires if clause.text == "requires" else excludes)[name] = type_set()
            s.expect(";")
        elif s.at("elem"):
            s.advance()
            name = s.ident("element").text
            if name in elems:
                raise ParseError(f"duplicate element {name!r}", tok.line, tok.column)
            s.expect(":")
            t = s.ident("basic type")
            if t.text not in types:
                raise ParseError(f"undeclared basic type {t.text!r}", t.line, t.column)
            elems[name] = t.text
            s.expect(";")
        else:
            s.fail("expected a declaration", {"type", "elem"})
    try:
        return TypeEnv(elems, requires, excludes, types)
    except EnvError as exc:
        raise ParseError(str(exc)) from exc


# ---------------------------------------------------------------------------
# auxiliary definitions

def excluded_of(present, env: TypeEnv) -> frozenset:
    out = frozenset()
    for t in present:
        out |= env.excl(t)
    return out


def well_formed(tau: PREType, env: TypeEnv) -> bool:
    ex = excluded_of(tau.present, env)
    for t in tau.required:
        env.req(t)  # reject unknown names
    return not (tau.present & ex) and not (tau.present & tau.required) and not (tau.required & ex)


def compatible(tau1: PREType, tau2: PREType, env: TypeEnv) -> bool:
    if not (well_formed(tau1, env) and well_formed(tau2, env)):
        return False
    ex1 = excluded_of(tau1.present, env)
    ex2 = excluded_of(tau2.present, env)
    return not (ex1 & tau2.present or ex1 & tau2.required
                or ex2 & tau1.present or ex2 & tau1.required)


def conjunction(tau1: PREType, tau2: PREType, env: TypeEnv) -> PREType:
    if not compatible(tau1, tau2, env):
        raise NotCompatible(f"{tau1} and {tau2} are not compatible")
    present = tau1.present | tau2.present
    return PREType(present, (tau1.required | tau2.required) - present)


# ---------------------------------------------------------------------------
# checking

def check_basis(basis: dict, env: TypeEnv):
    for var, tau in basis.items():
        if not well_formed(tau, env):
            raise IllFormedBasis(f"basis entry {var}: {tau} is not well formed")
        if var.kind == ELEM:
            if len(tau.present) != 1:
                raise IllFormedBasis(f"element variable {var} needs a singleton type")
            (t,) = tau.present
            if tau.required != env.req(t):
                raise IllFormedBasis(f"element variable {var} must have type ({{{t}}}, R_{t})")


def _combine(acc, tau, env, position):
    if not compatible(acc, tau, env):
        raise Incompatible(acc, tau, position)
    present = acc.present | tau.present
    return PREType(present, (acc.required | tau.required) - present)


def _lookup(var, basis, position):
    try:
        return basis[var]
    except KeyError:
        raise UnboundVariable(var) from None


def _check_items(items, basis, env, position):
    acc = None
    for j, item in enumerate(items):
        pos = position + (f"item[{j}]",)
        tau = env.element_type(item, pos) if isinstance(item, str) else _lookup(item, basis, pos)
        acc = tau if acc is None else _combine(acc, tau, env, pos)
    return UNIT if acc is None else acc


def _check_comp(comp, basis, env, position):
    if isinstance(comp, Seq):
        return _check_items(comp.items, basis, env, position)
    if isinstance(comp, Loop):
        mem = _check_items(comp.membrane, basis, env, position + ("membrane",))
        content = _check_term(comp.content, basis, env, position + ("content",))
        if not compatible(mem, content, env):
            raise Incompatible(mem, content, position)
        if not content.required <= mem.present:
            raise RequirementNotProvided(content.required, mem.present, position)
        return PREType(mem.present, mem.required - content.present)
    if isinstance(comp, Var):
        return _lookup(comp, basis, position)
    raise TypeError(f"not a pattern component: {comp!r}")


def _check_term(term, basis, env, position):
    acc = None
    for i, comp in enumerate(term.comps):
        pos = position + (f"comp[{i}]",)
        tau = _check_comp(comp, basis, env, pos)
        acc = tau if acc is None else _combine(acc, tau, env, pos)
    return UNIT if acc is None else acc


def type_check(p: Term, basis: dict | None, env: TypeEnv) -> PREType:
    """The type of ``p`` under ``basis``; raises a TypingError subclass when untypable.

    Parallel components and sequence items are combined left to right in
    canonical order.
    """
    basis = basis or {}
    check_basis(basis, env)
    return _check_term(p, basis, env, ())


def value_type(var: Var, value, env: TypeEnv) -> PREType:
    """Type of the binding of ``var`` under the empty basis."""
    if var.kind == TERM:
        return _check_term(value, {}, env, (str(var),))
    if var.kind == SEQ:
        return _check_items(tuple(value), {}, env, (str(var),))
    return env.element_type(value, (str(var),))


def agrees(sigma: dict, basis: dict, env: TypeEnv) -> bool:
    """Whether every binding of ``sigma`` has exactly the type ``basis`` gives its variable."""
    for var, tau in basis.items():
        if var not in sigma:
            return False
        try:
            if value_type(var, sigma[var], env) != tau:
                return False
        except (TypingError, UnboundVariable):
            return False
    return True


def basis_of(sigma: dict, env: TypeEnv) -> dict:
    """The basis typing each binding of ``sigma``; raises TypingError if one is untypable."""
    return {var: value_type(var, value, env) for var, value in sigma.items()}
