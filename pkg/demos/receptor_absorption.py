"""
Receptor-guarded absorption
===========================

Compound c' requires a receptor r on the membrane around it.  The rule that
absorbs c into a cell is therefore only applicable when the cell has r.
"""
import pathlib

from typedcls.inference import context_constraints, ok_for_context_direct, typed_step
from typedcls.matching import parse_context
from typedcls.rewrite import parse_rules
from typedcls.syntax import parse_term
from typedcls.typesys import parse_env, pretype

models = pathlib.Path(__file__).parent / "models"
env = parse_env((models / "absorption.env").read_text())
rules = parse_rules((models / "absorption.rules").read_text())

for text in ("c | loop(m){}", "c | loop(m.r){}"):
    print(text, "->", [(name, str(u)) for name, u in typed_step(rules, parse_term(text), env)])

# the same question asked about a context: can c' sit in this hole?
tau = pretype({"tC2"}, {"tR"})
for text in ("loop(m){$_}", "loop(m.r){$_}"):
    ctx = parse_context(text)
    _, constraints = context_constraints(ctx, env)
    print(text, ok_for_context_direct(tau, ctx, env), [str(c) for c in constraints])
