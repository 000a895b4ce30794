"""Instantiation, matching modulo structural congruence, and contexts.

An instantiation is a plain ``dict`` mapping :class:`~typedcls.syntax.Var`
to a canonical :class:`~typedcls.syntax.Term` (term variables), a tuple of
element names (sequence variables) or a single element name (element
variables).
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import product

from .errors import MatchBudgetExceeded, UnboundVariable
from .syntax import (
    ELEM, EMPTY, SEQ, TERM, Loop, Seq, Term, Var, comp_key, iter_vars, least_rotation,
    normalize, parse_pattern, pretty, rotations,
)

DEFAULT_BUDGET = 10_000

# reserved names: not producible by the surface syntax
HOLE = Var(TERM, "□")
_RESIDUAL = Var(TERM, "•")


# ---------------------------------------------------------------------------
# instantiation

def _inst_items(items, sigma):
    out = []
    for i in items:
        if isinstance(i, Var):
            if i not in sigma:
                raise UnboundVariable(i)
            value = sigma[i]
            if i.kind == SEQ:
                out.extend(value)
            else:
                out.append(value)
        else:
            out.append(i)
    return tuple(out)


def _inst(x, sigma):
    if isinstance(x, Term):
        return Term(tuple(_inst(c, sigma) for c in x.comps))
    if isinstance(x, Seq):
        return Seq(_inst_items(x.items, sigma))
    if isinstance(x, Loop):
        return Loop(_inst_items(x.membrane, sigma), _inst(x.content, sigma))
    if isinstance(x, Var):
        if x not in sigma:
            raise UnboundVariable(x)
        return sigma[x]
    raise TypeError(f"not a pattern: {x!r}")


def instantiate(p: Term, sigma: dict) -> Term:
    """Canonical form of ``p`` with every variable replaced by its binding."""
    return normalize(_inst(p, sigma))


def freeze(sigma: dict) -> tuple:
    """Hashable, order-independent view of an instantiation."""
    return tuple(sorted(sigma.items(), key=lambda kv: (kv[0].kind, kv[0].name)))


def format_instantiation(sigma: dict) -> str:
    parts = []
    for var, value in freeze(sigma):
        parts.append(f"{var} -> {pretty(value)}")
    return "{" + ", ".join(parts) + "}"


# ---------------------------------------------------------------------------
# matching

class _Budget:
    def __init__(self, limit, collapse_loops=True):
        self.limit = limit
        self.used = 0
        self.collapse_loops = collapse_loops

    def tick(self):
        self.used += 1
        if self.used > self.limit:
            raise MatchBudgetExceeded(self.limit)


def _bind(sigma, var, value):
    new = dict(sigma)
    new[var] = value
    return new


def _match_items(pitems, titems, sigma, budget):
    if not pitems:
        if not titems:
            yield sigma
        return
    first, rest = pitems[0], pitems[1:]
    if isinstance(first, str):
        if titems and titems[0] == first:
            yield from _match_items(rest, titems[1:], sigma, budget)
        return
    if first.kind == ELEM:
        if not titems:
            return
        if first in sigma:
            if sigma[first] == titems[0]:
                yield from _match_items(rest, titems[1:], sigma, budget)
        else:
            yield from _match_items(rest, titems[1:], _bind(sigma, first, titems[0]), budget)
        return
    # sequence variable
    if first in sigma:
        bound = sigma[first]
        if titems[: len(bound)] == bound:
            yield from _match_items(rest, titems[len(bound):], sigma, budget)
        return
    # every non-sequence-variable item consumes exactly one element
    reserve = sum(1 for i in rest if not (isinstance(i, Var) and i.kind == SEQ))
    for k in range(len(titems) - reserve + 1):
        budget.tick()
        yield from _match_items(rest, titems[k:], _bind(sigma, first, titems[:k]), budget)


def _match_comp(pc, tc, sigma, budget):
    if isinstance(pc, Seq):
        if isinstance(tc, Seq):
            yield from _match_items(pc.items, tc.items, sigma, budget)
    elif isinstance(pc, Loop) and isinstance(tc, Loop):
        for rot in rotations(tc.membrane):
            for s in _match_items(pc.membrane, rot, sigma, budget):
                yield from _match_term(pc.content, tc.content.comps, s, budget)


def _match_vanishing(pc, sigma, budget):
    # instantiations under which pc collapses to eps
    if isinstance(pc, Seq):
        yield from _match_items(pc.items, (), sigma, budget)
    elif budget.collapse_loops:
        for s in _match_items(pc.membrane, (), sigma, budget):
            yield from _match_term(pc.content, (), s, budget)


def _match_term(p, tcomps, sigma, budget):
    pcomps = [c for c in p.comps if not isinstance(c, Var)]
    tvars = [c for c in p.comps if isinstance(c, Var)]
    yield from _match_comps(pcomps, tuple(tcomps), tvars, sigma, budget)


def _match_comps(pcomps, remaining, tvars, sigma, budget):
    if not pcomps:
        yield from _distribute(tvars, remaining, sigma, budget)
        return
    pc, rest = pcomps[0], pcomps[1:]
    for s in _match_vanishing(pc, sigma, budget):
        yield from _match_comps(rest, remaining, tvars, s, budget)
    prev = None
    for j, tc in enumerate(remaining):
        if tc == prev:
            continue
        prev = tc
        budget.tick()
        left = remaining[:j] + remaining[j + 1:]
        for s in _match_comp(pc, tc, sigma, budget):
            yield from _match_comps(rest, left, tvars, s, budget)


def _as_term(pool):
    comps = []
    for comp, n in pool.items():
        comps.extend([comp] * n)
    comps.sort(key=comp_key)
    return Term(tuple(comps))


def _distribute(tvars, remaining, sigma, budget):
    mult = Counter(tvars)
    pool = Counter(remaining)
    free = []
    for var in sorted(mult, key=lambda v: v.name):
        if var in sigma:
            for comp in sigma[var].comps:
                pool[comp] -= mult[var]
                if pool[comp] < 0:
                    return
        else:
            free.append(var)
    pool = Counter({c: n for c, n in pool.items() if n})
    yield from _split(free, mult, pool, sigma, budget)


def _split(free, mult, pool, sigma, budget):
    if not free:
        if not pool:
            yield sigma
        return
    var, k = free[0], mult[free[0]]
    if len(free) == 1:
        if all(n % k == 0 for n in pool.values()):
            budget.tick()
            yield _bind(sigma, var, _as_term(Counter({c: n // k for c, n in pool.items()})))
        return
    comps = sorted(pool, key=comp_key)
    for counts in product(*(range(pool[c] // k + 1) for c in comps)):
        budget.tick()
        taken = Counter({c: n for c, n in zip(comps, counts) if n})
        left = Counter({c: pool[c] - k * taken[c] for c in comps if pool[c] - k * taken[c]})
        yield from _split(free[1:], mult, left, _bind(sigma, var, _as_term(taken)), budget)


def _sort_key(sigma):
    return tuple((str(v), pretty(val)) for v, val in freeze(sigma))


def match(p: Term, t: Term, budget: int = DEFAULT_BUDGET, collapse_loops: bool = True) -> list:
    """All instantiations ``s`` with ``dom(s) == Var(p)`` and ``instantiate(p, s) == t``.

    ``t`` must be canonical.  The result is duplicate-free and sorted.
    With ``collapse_loops=False`` a loop of ``p`` only matches a loop of
    ``t``, never the empty term (``loop(eps){eps}`` is congruent to eps).
    """
    counter = _Budget(budget, collapse_loops)
    found = {}
    for s in _match_term(p, t.comps, {}, counter):
        found.setdefault(freeze(s), s)
    return sorted(found.values(), key=_sort_key)


# ---------------------------------------------------------------------------
# contexts

@dataclass(frozen=True)
class Context:
    """A one-hole context.

    ``outer`` is the residual at top level; ``frames`` lists, outermost
    first, the ``(membrane, residual)`` pairs of the loops enclosing the
    hole.  The hole sits in parallel with the last residual.
    """

    outer: Term = EMPTY
    frames: tuple = ()

    @property
    def depth(self):
        return len(self.frames)

    def __str__(self):
        return pretty(plug(self, Term((HOLE,)))).replace(str(HOLE), "□")


EMPTY_CONTEXT = Context()


def context(outer=EMPTY, *frames) -> Context:
    """Build a context, normalizing every residual and membrane."""
    fixed = []
    for membrane, residual in frames:
        if isinstance(membrane, str):
            membrane = (membrane,)
        fixed.append((least_rotation(membrane), normalize(residual)))
    return Context(normalize(outer), tuple(fixed))


def parse_context(text: str, hole: str = "_") -> Context:
    """Read a context written as a pattern whose hole is the term variable ``$_``."""
    return context_of(parse_pattern(text), Var(TERM, hole))


def context_of(p: Term, hole: Var) -> Context:
    """Split ``p`` around its single occurrence of the term variable ``hole``."""
    if sum(1 for v in iter_vars(p) if v == hole) != 1:
        raise ValueError(f"{hole} must occur exactly once")
    residuals, membranes = [], []
    level = p
    while True:
        if hole in level.comps:
            residuals.append(Term(tuple(c for c in level.comps if c != hole)))
            break
        for i, c in enumerate(level.comps):
            if isinstance(c, Loop) and hole in set(iter_vars(c.content)):
                residuals.append(Term(level.comps[:i] + level.comps[i + 1:]))
                membranes.append(c.membrane)
                level = c.content
                break
        else:
            raise ValueError(f"{hole} occurs inside a sequence")
    return Context(residuals[0], tuple(zip(membranes, residuals[1:])))


def plug(c: Context, t: Term) -> Term:
    """Canonical form of ``c[t]``; ``t`` may be a pattern."""
    cur = t
    for membrane, residual in reversed(c.frames):
        cur = Term((Loop(membrane, Term((residual, cur))),))
    return normalize(Term((c.outer, cur)))


def compose(outer: Context, inner: Context) -> Context:
    """The context ``outer[inner]``."""
    if not outer.frames:
        return Context(normalize(Term((outer.outer, inner.outer))), inner.frames)
    membrane, residual = outer.frames[-1]
    last = (membrane, normalize(Term((residual, inner.outer))))
    return Context(outer.outer, outer.frames[:-1] + (last,) + inner.frames)


def core(c: Context) -> Context:
    """The part of ``c`` that can influence the typing of its hole.

    Contexts with the hole under at most one membrane are their own core;
    otherwise only the two innermost loops are kept.
    """
    if len(c.frames) <= 1:
        return c
    return Context(EMPTY, c.frames[-2:])


def find_redexes(lhs: Term, t: Term, budget: int = DEFAULT_BUDGET) -> list:
    """All ``(context, instantiation)`` pairs with ``plug(C, lhs s) == t`` and ``lhs s`` not eps.

    Every loop of ``lhs`` must be matched by an actual loop of ``t``;
    sequence-only components may still vanish.
    """
    probe = normalize(Term((lhs, _RESIDUAL)))
    found = {}

    def visit(level, residuals, membranes):
        for s in match(probe, level, budget, collapse_loops=False):
            residual = s.pop(_RESIDUAL)
            if not instantiate(lhs, s).comps:
                continue
            rs = residuals + [residual]
            ctx = Context(rs[0], tuple(zip(membranes, rs[1:])))
            found.setdefault((ctx, freeze(s)), (ctx, s))
        prev = None
        for i, comp in enumerate(level.comps):
            if not isinstance(comp, Loop) or comp == prev:
                continue
            prev = comp
            rest = Term(level.comps[:i] + level.comps[i + 1:])
            visit(comp.content, residuals + [rest], membranes + [comp.membrane])

    visit(t, [], [])
    return list(found.values())
