"""Principal typing, constraint evaluation and the typed transition step.

Two independent routes decide whether a rewrite is allowed:

* the *direct* route types the instantiated right-hand side and the
  context with the syntax-directed checker (:mod:`typedcls.typesys`);
* the *inference* route builds a principal typing with symbolic type
  variables once per pattern and only evaluates constraints afterwards.

:func:`typed_step` uses the direct route.  :func:`applicable` implements the
inference route; the test-suite checks that both always agree.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import IllTypedState, NotAReductionRule, TypingError, UnboundTypeVariable
from .matching import DEFAULT_BUDGET, HOLE, Context, core, find_redexes, instantiate, plug
from .rewrite import Rule, _successor_key
from .syntax import ELEM, Loop, Seq, Term, Var
from .typesys import (
    PREType, TypeEnv, basis_of, compatible, fmt_set, type_check, well_formed,
)

HOLE_TERM = Term((HOLE,))


# ---------------------------------------------------------------------------
# type expressions

@dataclass(frozen=True)
class TypeVar:
    """``kind`` is ``"e"`` (one basic type), ``"p"`` or ``"r"`` (sets of basic types)."""

    kind: str
    owner: Var

    def __str__(self):
        return ("ψ_" if self.kind == "r" else "φ_") + self.owner.name


@dataclass(frozen=True)
class Const:
    types: frozenset

    def __str__(self):
        return fmt_set(self.types) if self.types else "∅"


@dataclass(frozen=True)
class ReqOf:
    """The required set of whatever basic type an e-variable denotes."""

    evar: TypeVar

    def __str__(self):
        return f"R({self.evar})"


@dataclass(frozen=True)
class Union:
    left: object
    right: object

    def __str__(self):
        return f"({self.left} ∪ {self.right})"


@dataclass(frozen=True)
class Diff:
    left: object
    right: object

    def __str__(self):
        return f"({self.left} \\ {self.right})"


EMPTY_SET = Const(frozenset())


@dataclass(frozen=True)
class Eq:
    left: object
    right: object

    def __str__(self):
        return f"{self.left} = {self.right}"


@dataclass(frozen=True)
class Ok:
    left: tuple  # (phi, psi)
    right: tuple

    def __str__(self):
        (a, b), (c, d) = self.left, self.right
        return f"ok(({a}, {b}), ({c}, {d}))"


@dataclass(frozen=True)
class Subset:
    sub: object
    sup: object

    def __str__(self):
        return f"{self.sub} ⊆ {self.sup}"


@dataclass(frozen=True)
class PrincipalResult:
    basis: tuple  # ((Var, (TypeVar, TypeVar)), ...) sorted by variable
    phi: object
    psi: object
    constraints: tuple

    def scheme(self) -> dict:
        return dict(self.basis)

    def __str__(self):
        basis = ", ".join(f"{v}: ({a}, {b})" for v, (a, b) in self.basis)
        cons = ", ".join(str(c) for c in self.constraints)
        return f"Θ = {{{basis}}}\ntype = ({self.phi}, {self.psi})\nΞ = {{{cons}}}"

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "basis": {str(v): [str(a), str(b)] for v, (a, b) in self.basis},
            "phi": str(self.phi),
            "psi": str(self.psi),
            "constraints": [str(c) for c in self.constraints],
        }


def type_vars(x):
    """Type variables occurring in an expression, pair or constraint."""
    if isinstance(x, TypeVar):
        return {x}
    if isinstance(x, ReqOf):
        return {x.evar}
    if isinstance(x, (Union, Diff, Eq)):
        return type_vars(x.left) | type_vars(x.right)
    if isinstance(x, Subset):
        return type_vars(x.sub) | type_vars(x.sup)
    if isinstance(x, Ok):
        return type_vars(x.left) | type_vars(x.right)
    if isinstance(x, tuple):
        out = set()
        for y in x:
            out |= type_vars(y)
        return out
    return set()


# ---------------------------------------------------------------------------
# inference

class _Acc:
    def __init__(self):
        self.basis = {}
        self.constraints = []

    def add(self, c):
        if c not in self.constraints:
            self.constraints.append(c)


def _conj(left, right, acc):
    acc.add(Ok(left, right))
    phi = Union(left[0], right[0])
    return phi, Diff(Union(left[1], right[1]), phi)


def _var_type(var, acc):
    if var.kind == ELEM:
        pair = (TypeVar("e", var), TypeVar("r", var))
        acc.add(Eq(pair[1], ReqOf(pair[0])))
    else:
        pair = (TypeVar("p", var), TypeVar("r", var))
    acc.basis[var] = pair
    return pair


def _infer_items(items, env, acc):
    out = None
    for item in items:
        if isinstance(item, str):
            t = env.type_of(item)
            pair = (Const(frozenset((t,))), Const(env.req(t)))
        else:
            pair = _var_type(item, acc)
        out = pair if out is None else _conj(out, pair, acc)
    return (EMPTY_SET, EMPTY_SET) if out is None else out


def _infer_comp(comp, env, acc):
    if isinstance(comp, Seq):
        return _infer_items(comp.items, env, acc)
    if isinstance(comp, Loop):
        mem = _infer_items(comp.membrane, env, acc)
        content = _infer_term(comp.content, env, acc)
        acc.add(Ok(mem, content))
        acc.add(Subset(content[1], mem[0]))
        return mem[0], Diff(mem[1], content[0])
    return _var_type(comp, acc)


def _infer_term(term, env, acc):
    out = None
    for comp in term.comps:
        pair = _infer_comp(comp, env, acc)
        out = pair if out is None else _conj(out, pair, acc)
    return (EMPTY_SET, EMPTY_SET) if out is None else out


@lru_cache(maxsize=4096)
def infer(p: Term, env: TypeEnv) -> PrincipalResult:
    """Principal basis scheme, principal type and constraint set of ``p``.

    Components are combined in the same canonical order the checker uses.
    Raises UnknownElement for undeclared elements.
    """
    acc = _Acc()
    phi, psi = _infer_term(p, env, acc)
    basis = tuple(sorted(acc.basis.items(), key=lambda kv: (kv[0].kind, kv[0].name)))
    return PrincipalResult(basis, phi, psi, tuple(acc.constraints))


# ---------------------------------------------------------------------------
# evaluation

def eval_expr(e, m: dict, env: TypeEnv) -> frozenset:
    if isinstance(e, Const):
        return e.types
    if isinstance(e, TypeVar):
        if e not in m:
            raise UnboundTypeVariable(e)
        value = m[e]
        return frozenset((value,)) if e.kind == "e" else frozenset(value)
    if isinstance(e, ReqOf):
        if e.evar not in m:
            raise UnboundTypeVariable(e.evar)
        return env.req(m[e.evar])
    if isinstance(e, Union):
        return eval_expr(e.left, m, env) | eval_expr(e.right, m, env)
    if isinstance(e, Diff):
        return eval_expr(e.left, m, env) - eval_expr(e.right, m, env)
    raise TypeError(f"not a type expression: {e!r}")


def eval_pair(pair, m, env) -> PREType:
    return PREType(eval_expr(pair[0], m, env), eval_expr(pair[1], m, env))


def satisfies(m: dict, constraints, env: TypeEnv) -> bool:
    for c in constraints:
        if isinstance(c, Eq):
            ok = eval_expr(c.left, m, env) == eval_expr(c.right, m, env)
        elif isinstance(c, Subset):
            ok = eval_expr(c.sub, m, env) <= eval_expr(c.sup, m, env)
        elif isinstance(c, Ok):
            ok = compatible(eval_pair(c.left, m, env), eval_pair(c.right, m, env), env)
        else:
            raise TypeError(f"not a constraint: {c!r}")
        if not ok:
            return False
    return True


def mapping_from_basis(scheme: dict, basis: dict, env: TypeEnv) -> dict:
    """The type mapping that sends each scheme entry to the matching basis entry."""
    m = {}
    for var, (first, second) in scheme.items():
        tau = basis[var]
        if var.kind == ELEM:
            (t,) = tau.present
            m[first] = t
        else:
            m[first] = tau.present
        m[second] = tau.required
    return m


def apply_mapping(scheme: dict, m: dict, env: TypeEnv) -> dict:
    """``m(Θ)``: the concrete basis a type mapping assigns to a basis scheme."""
    out = {}
    for var, (first, second) in scheme.items():
        present = eval_expr(first, m, env)
        out[var] = PREType(present, eval_expr(second, m, env))
    return out


# ---------------------------------------------------------------------------
# hole typing and rule classification

def _hole_occurs(expr) -> bool:
    return any(v.owner == HOLE for v in type_vars(expr))


def ok_for_context_direct(tau: PREType, c: Context, env: TypeEnv) -> bool:
    """Whether filling ``c`` with something of type ``tau`` gives a correct system."""
    if not well_formed(tau, env):
        return False
    try:
        result = type_check(plug(c, HOLE_TERM), {HOLE: tau}, env)
    except TypingError:
        return False
    return not result.required


def context_constraints(c: Context, env: TypeEnv):
    """Principal typing of ``core(c)[X]`` plus the constraints that close it.

    The closing constraint forces the result requirement to be empty when
    the hole's type variables occur in it.
    """
    pr = infer(plug(core(c), HOLE_TERM), env)
    extra = (Eq(pr.psi, EMPTY_SET),) if _hole_occurs(pr.psi) else ()
    return pr, pr.constraints + extra


def ok_for_context_core(tau: PREType, c: Context, env: TypeEnv) -> bool:
    """Constraint-based OK test on the core of ``c``.

    Valid when some term fills ``c`` to a correct system.
    """
    if not well_formed(tau, env):
        return False
    _, constraints = context_constraints(c, env)
    m = {TypeVar("p", HOLE): tau.present, TypeVar("r", HOLE): tau.required}
    return satisfies(m, constraints, env)


def classify_rule(rule: Rule, basis: dict, env: TypeEnv) -> PREType:
    """Type of the right-hand side under ``basis``; NotAReductionRule if it has none."""
    try:
        return type_check(rule.rhs, basis, env)
    except TypingError as exc:
        raise NotAReductionRule(rule.name, exc) from exc


def classify_rule_inferred(rule: Rule, basis: dict, env: TypeEnv) -> PREType:
    """Same as :func:`classify_rule` but through the principal typing of the rhs."""
    pr = infer(rule.rhs, env)
    m = mapping_from_basis(pr.scheme(), basis, env)
    if not satisfies(m, pr.constraints, env):
        raise NotAReductionRule(rule.name, "constraints of the right-hand side are not satisfied")
    return eval_pair((pr.phi, pr.psi), m, env)


def applicable(rule: Rule, sigma: dict, c: Context, env: TypeEnv) -> bool:
    """Inference-route decision whether ``rule`` may fire at ``(c, sigma)``.

    Assumes ``plug(c, instantiate(rule.lhs, sigma))`` is a correct system.
    """
    try:
        basis = basis_of(sigma, env)
    except TypingError:
        return False
    pr = infer(rule.rhs, env)
    ctx, ctx_constraints = context_constraints(c, env)
    m = mapping_from_basis(pr.scheme(), basis, env)
    hole_p, hole_r = TypeVar("p", HOLE), TypeVar("r", HOLE)
    m[hole_p] = eval_expr(pr.phi, m, env)
    m[hole_r] = eval_expr(pr.psi, m, env)
    constraints = pr.constraints + ctx_constraints + (Eq(pr.phi, hole_p), Eq(pr.psi, hole_r))
    return satisfies(m, constraints, env)


def applicable_direct(rule: Rule, sigma: dict, c: Context, env: TypeEnv) -> bool:
    """Direct-route decision: typable bindings, rhs classification, OK hole."""
    try:
        basis = basis_of(sigma, env)
        tau = classify_rule(rule, basis, env)
    except (TypingError, NotAReductionRule):
        return False
    return ok_for_context_direct(tau, c, env)


def check_state(t: Term, env: TypeEnv) -> PREType:
    """Type of a correct system; IllTypedState if ``t`` is not one."""
    try:
        tau = type_check(t, {}, env)
    except TypingError as exc:
        raise IllTypedState(f"state is not typable: {exc}") from exc
    if tau.required:
        raise IllTypedState(f"state has unmet requirements {fmt_set(tau.required)}")
    return tau


def typed_step(rules, t: Term, env: TypeEnv, budget: int = DEFAULT_BUDGET) -> list:
    """Typed successors of ``t`` as ``(rule name, term)`` pairs, unique per rule."""
    check_state(t, env)
    out = []
    for rule in rules:
        succ = set()
        for ctx, sigma in find_redexes(rule.lhs, t, budget):
            if applicable_direct(rule, sigma, ctx, env):
                succ.add(plug(ctx, instantiate(rule.rhs, sigma)))
        out.extend(sorted(((rule.name, s) for s in succ), key=_successor_key))
    return out
