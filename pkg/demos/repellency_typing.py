"""
Typing repellent elements
=========================

Element a (type tA) and element b (type tB) exclude each other, so no
compartment may hold both.  The typed step only fires rules whose result is
still correctly typed.
"""
import pathlib

from typedcls.errors import TypingError
from typedcls.inference import typed_step
from typedcls.rewrite import explore, parse_rules, untyped_step
from typedcls.syntax import parse_term
from typedcls.typesys import parse_env, type_check

models = pathlib.Path(__file__).parent / "models"
env = parse_env((models / "repellency.env").read_text())
rules = {r.name: r for r in parse_rules((models / "repellency.rules").read_text())}

t = parse_term("a | loop(m){b}")
print("type of", t, "is", type_check(t, {}, env))

# moving b out would put a and b side by side
r1 = [rules["R1"]]
print("untyped:", [(name, str(u)) for name, u in untyped_step(r1, t)])
print("typed:  ", [(name, str(u)) for name, u in typed_step(r1, t, env)])
try:
    type_check(parse_term("a | b | loop(m){}"), {}, env)
except TypingError as exc:
    print("rejected:", exc)

# with both rules, a moves into the empty compartment and then b can leave
start = parse_term("a | loop(m){b} | loop(m){}")
g = explore(lambda u: typed_step(list(rules.values()), u, env), start, 50, 50)
for src, name, dst in g.edges:
    print(f"{src}  --{name}-->  {dst}")
print(g.to_dot())
