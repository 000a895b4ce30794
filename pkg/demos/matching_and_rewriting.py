"""
Matching and rewriting
======================

Patterns carry term ($X), sequence (~x) and element (?e) variables.  Matching
works modulo the congruence, and rewriting happens inside any context.
"""
from typedcls.matching import find_redexes, format_instantiation, match
from typedcls.rewrite import explore, parse_rules, untyped_step
from typedcls.syntax import parse_pattern, parse_term

# a two-component pattern splits a multiset in every possible way
for sigma in match(parse_pattern("$X | $Y"), parse_term("a | b")):
    print(format_instantiation(sigma))

# sequence variables absorb the rest of a rotated membrane
for sigma in match(parse_pattern("loop(a.~x){}"), parse_term("loop(b.a.c){}")):
    print(format_instantiation(sigma))

# redexes can sit inside compartments
for ctx, sigma in find_redexes(parse_pattern("b"), parse_term("loop(m){a | b}")):
    print(ctx, format_instantiation(sigma))

rules = parse_rules("""
rule R1: loop(~x){$X | b} => b | loop(~x){$X} ;
rule R2: a | loop(~x){$X} => loop(~x){a | $X} ;
""")
for name, succ in untyped_step(rules, parse_term("a | loop(m){b} | loop(m){}")):
    print(name, "->", succ)

# the untyped relation lets a and b end up in the same compartment
g = explore(lambda t: untyped_step(rules, t), parse_term("a | loop(m){b} | loop(m){}"), 50, 50)
print(len(g.states), "states")
for state in g.states:
    print("  ", state)
