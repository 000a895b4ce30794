"""
Principal typing of patterns
============================

Instead of checking a pattern once per basis, infer a basis scheme, a type
built from type variables, and constraints.  Any type mapping that satisfies
the constraints gives a typing, and every typing arises this way.
"""
import pathlib

from typedcls.inference import (
    apply_mapping, eval_pair, infer, mapping_from_basis, satisfies,
)
from typedcls.syntax import SEQ, TERM, Var, parse_pattern
from typedcls.typesys import parse_env, pretype, type_check

models = pathlib.Path(__file__).parent / "models"
env = parse_env((models / "repellency.env").read_text())

p = parse_pattern("b | loop(~x){$X}")
pr = infer(p, env)
print(pr)

# the second basis needs tA from a membrane made only of m
for x_type in (pretype({"tA"}), pretype(set(), {"tA"})):
    basis = {Var(SEQ, "x"): pretype({"tM"}), Var(TERM, "X"): x_type}
    m = mapping_from_basis(pr.scheme(), basis, env)
    ok = satisfies(m, pr.constraints, env)
    print(f"$X : {x_type}  constraints hold: {ok}")
    if ok:
        print("  inferred:", eval_pair((pr.phi, pr.psi), m, env))
        print("  checked: ", type_check(p, basis, env))
        print("  basis recovered:", apply_mapping(pr.scheme(), m, env) == basis)
