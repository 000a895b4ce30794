"""
Terms and structural congruence
===============================

Terms are parsed into a canonical form, so congruent terms compare equal.
"""
from typedcls.syntax import congruent, normalize, parse_term, pretty, rotations

# parallel composition is a multiset: order does not matter
t = parse_term("loop(m){b} | a | eps")
print(pretty(t))                          # a | loop(m){b}

# looping sequences may rotate; the least rotation is stored
print(pretty(parse_term("loop(c.a.b){}")))
print(rotations(("a", "b", "c")))

# an empty loop around nothing disappears
print(pretty(parse_term("a | loop(eps){}")))

print(congruent(parse_term("loop(b.a){a | b}"), parse_term("loop(a.b){b | a}")))
print(congruent(parse_term("a.b"), parse_term("b.a")))

# normalizing twice changes nothing
print(normalize(t) == t)
