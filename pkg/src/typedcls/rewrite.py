"""Rewrite rules, the untyped transition relation and bounded exploration."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .errors import ParseError, RuleError
from .matching import DEFAULT_BUDGET, find_redexes, instantiate, plug
from .syntax import PatternParser, Term, TokenStream, normalize, pretty, term_key, variables


@dataclass(frozen=True)
class Rule:
    name: str
    lhs: Term
    rhs: Term

    def __str__(self):
        return f"rule {self.name}: {pretty(self.lhs)} => {pretty(self.rhs)} ;"


def validate_rule(rule: Rule):
    """Return ``None`` for a well-formed rule, otherwise the violated clause as a RuleError."""
    if not normalize(rule.lhs).comps:
        return RuleError("EmptyLhs", f"in rule {rule.name}")
    extra = variables(rule.rhs) - variables(rule.lhs)
    if extra:
        names = ", ".join(sorted(str(v) for v in extra))
        return RuleError("UnboundRhsVar", f"{names} in rule {rule.name}")
    return None


def parse_rules(text: str) -> list:
    """Read ``rule NAME: PATTERN => PATTERN ;`` declarations.

    Both sides of a rule share one variable-kind table.  Invalid rules and
    duplicate names raise ParseError.
    """
    s = TokenStream(text)
    rules = []
    names = set()
    while not s.at_eof():
        start = s.expect("rule")
        name = s.ident("rule name").text
        if name in names:
            raise ParseError(f"duplicate rule {name!r}", start.line, start.column)
        names.add(name)
        s.expect(":")
        parser = PatternParser(s)
        lhs = normalize(parser.term())
        s.expect("=>")
        rhs = normalize(parser.term())
        s.expect(";")
        rule = Rule(name, lhs, rhs)
        err = validate_rule(rule)
        if err is not None:
            raise ParseError(str(err), start.line, start.column)
        rules.append(rule)
    return rules


def _successor_key(pair):
    return pair[0], term_key(pair[1])


def untyped_step(rules, t: Term, budget: int = DEFAULT_BUDGET) -> list:
    """Successors of ``t`` as ``(rule name, term)`` pairs, unique per rule, in rule order."""
    out = []
    for rule in rules:
        succ = set()
        for ctx, sigma in find_redexes(rule.lhs, t, budget):
            succ.add(plug(ctx, instantiate(rule.rhs, sigma)))
        out.extend(sorted(((rule.name, s) for s in succ), key=_successor_key))
    return out


@dataclass
class TransitionGraph:
    """Reachable states (discovery order, root first) and labelled edges."""

    root: Term
    states: list = field(default_factory=list)
    edges: list = field(default_factory=list)  # (source, rule name, target)
    truncated: bool = False

    def index(self) -> dict:
        return {s: i for i, s in enumerate(self.states)}

    def successors(self, state):
        return [(r, t) for s, r, t in self.edges if s == state]

    def to_dot(self) -> str:
        idx = self.index()
        lines = ["digraph cls {"]
        for state, i in idx.items():
            shape = ', shape="doublecircle"' if state == self.root else ""
            lines.append(f'  s{i} [label="{_dot_escape(pretty(state))}"{shape}];')
        for s, r, t in self.edges:
            lines.append(f'  s{idx[s]} -> s{idx[t]} [label="{_dot_escape(r)}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        idx = self.index()
        return {
            "schema": 1,
            "root": idx[self.root],
            "states": [pretty(s) for s in self.states],
            "edges": [{"from": idx[s], "rule": r, "to": idx[t]} for s, r, t in self.edges],
            "truncated": self.truncated,
        }


def _dot_escape(text):
    return text.replace("\\", "\\\\").replace('"', '\\"')


def explore(step, t0: Term, max_states: int, max_depth: int) -> TransitionGraph:
    """Breadth-first closure of ``step`` from ``t0``.

    ``step`` maps a canonical term to ``(rule name, successor)`` pairs.
    Exploration stops as soon as ``max_states`` states are known or the
    frontier reaches ``max_depth``; ``truncated`` records that a bound fired.
    """
    if max_states < 1 or max_depth < 0:
        raise ValueError("max_states must be >= 1 and max_depth >= 0")
    t0 = normalize(t0)
    graph = TransitionGraph(root=t0, states=[t0])
    seen = {t0}
    queue = deque([(t0, 0)])
    while queue:
        if len(seen) >= max_states:
            graph.truncated = True
            break
        state, depth = queue.popleft()
        if depth >= max_depth:
            graph.truncated = True
            continue
        edges = set()
        for rule_name, succ in step(state):
            if (rule_name, succ) in edges:
                continue
            if succ not in seen:
                if len(seen) >= max_states:
                    graph.truncated = True
                    continue
                seen.add(succ)
                graph.states.append(succ)
                queue.append((succ, depth + 1))
            edges.add((rule_name, succ))
            graph.edges.append((state, rule_name, succ))
    return graph
