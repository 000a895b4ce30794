"""Acceptance suite: one test per criterion, summarized at the end of the run.

Run with ``pytest tests/test_acceptance.py``; the terminal summary prints a
``criterion N: PASS/FAIL`` line for each criterion.
"""
import random
import time

import pytest

from oracles import (
    all_patterns, all_trees, canonical_terms, congruence_class, instances_upto, oracle_type,
    random_basis, random_correct, random_decomposition, random_double_core, random_env,
    random_pattern, random_rule, random_type, six_constraints, tree_to_raw,
)
from typedcls.errors import IllFormedBasis, Incompatible, TypingError
from typedcls.inference import (
    HOLE, TypeVar, apply_mapping, check_state, context_constraints, eval_pair, infer,
    mapping_from_basis, ok_for_context_core, ok_for_context_direct, satisfies, type_vars,
    typed_step,
)
from typedcls.matching import freeze, match
from typedcls.rewrite import explore, untyped_step
from typedcls.syntax import ELEM, SEQ, TERM, Loop, Var, normalize, parse_term, size, variables
from typedcls.typesys import check_basis, pretype, type_check


def T(text):
    return parse_term(text)


@pytest.mark.criterion(1, "repellency typing of a | loop(m){b}")
def test_repellency_typing(env_ex, note):
    tau = type_check(T("a | loop(m){b}"), {}, env_ex)
    note(f"P={sorted(tau.present)} R={sorted(tau.required)}")
    assert tau == pretype({"tA", "tM"}, set())


@pytest.mark.criterion(2, "R1 blocked by typing, allowed untyped")
def test_blocked_r1(env_ex, repellency_rules, note):
    r1 = [repellency_rules["R1"]]
    t = T("a | loop(m){b}")
    typed, untyped = typed_step(r1, t, env_ex), untyped_step(r1, t)
    note(f"typed={len(typed)} untyped={[str(u) for _, u in untyped]}")
    assert typed == []
    assert untyped == [("R1", T("a | b | loop(m){}"))]
    with pytest.raises(Incompatible):
        type_check(untyped[0][1], {}, env_ex)


def _loops(t):
    for c in t.comps:
        if isinstance(c, Loop):
            yield c
            yield from _loops(c.content)


def _elements(t):
    out = set()
    for c in t.comps:
        if isinstance(c, Loop):
            out |= set(c.membrane) | _elements(c.content)
        else:
            out |= set(c.items)
    return out


@pytest.mark.criterion(3, "typed exploration from T' gives the three-state chain")
def test_repellency_chain(env_ex, repellency_rules, note):
    rules = [repellency_rules["R1"], repellency_rules["R2"]]
    t1 = T("a | loop(m){b} | loop(m){}")
    t2 = T("loop(m){a} | loop(m){b}")
    t3 = T("b | loop(m){a} | loop(m){}")
    g = explore(lambda t: typed_step(rules, t, env_ex), t1, 1000, 1000)
    note(f"{len(g.states)} states, {len(g.edges)} edges, truncated={g.truncated}")
    assert not g.truncated
    assert set(g.states) == {t1, t2, t3} and len(g.states) == 3
    assert sorted(g.edges, key=str) == sorted([(t1, "R2", t2), (t2, "R1", t3)], key=str)
    # a never shares a compartment with b
    for state in g.states:
        for loop in _loops(state):
            assert not {"a", "b"} <= _elements(loop.content)


@pytest.mark.criterion(4, "receptor-guarded absorption")
def test_absorption(env_abs, absorption_rules, note):
    rules = [absorption_rules["Rabs"]]
    without = typed_step(rules, T("c | loop(m){}"), env_abs)
    with_r = typed_step(rules, T("c | loop(m.r){}"), env_abs)
    note(f"without receptor {len(without)} steps; with receptor {[str(u) for _, u in with_r]}")
    assert without == []
    assert with_r == [("Rabs", T("loop(m.r){c'}"))]


@pytest.mark.criterion(5, "subject reduction fuzz, 500 instances to depth 4")
def test_subject_reduction(note):
    cap = 1_000_000
    instances = states = edges = fired = violations = i = 0
    while instances < 500:
        rng = random.Random(i)
        i += 1
        env = random_env(rng)
        t0 = random_correct(rng, env, rng.randint(1, 8), depth=3)
        if t0 is None:
            continue
        rules = [random_rule(rng, env, t0, f"r{k}") for k in range(rng.randint(1, 4))]
        g = explore(lambda u: typed_step(rules, u, env), t0, cap, 4)
        assert len(g.states) < cap  # only the depth bound ever stops exploration
        instances += 1
        states += len(g.states)
        edges += len(g.edges)
        fired += bool(g.edges)
        for u in g.states:
            tau = check_state(u, env)
            if tau.required or oracle_type(u, env) != tuple(tau):
                violations += 1
    note(f"{instances} instances, {fired} with steps, {states} states, {edges} edges, "
         f"{violations} violations")
    assert violations == 0


def _random_mapping(rng, pr, universe):
    m = {}
    found = type_vars((pr.constraints, pr.phi, pr.psi, tuple(pr.scheme().values())))
    # sorted so the draws do not depend on set iteration order
    for tv in sorted(found, key=lambda tv: (tv.kind, tv.owner.kind, tv.owner.name)):
        if tv.kind == "e":
            m[tv] = rng.choice(universe)
        else:
            m[tv] = frozenset(u for u in universe if rng.random() < 0.4)
    return m


@pytest.mark.criterion(6, "principal typing sound and complete on 1000 patterns")
def test_inference_sound_complete(note):
    typable = untypable = sampled = satisfied = disagreements = 0
    for seed in range(1000):
        rng = random.Random(seed)
        env = random_env(rng, n_types=3)
        p = random_pattern(rng, env, rng.randint(1, 8), max_vars=3)
        assert size(p) <= 8 and len(variables(p)) <= 3
        pr = infer(p, env)
        scheme = pr.scheme()

        # bases drawn directly: the mapping they induce decides typability
        basis = random_basis(rng, env, variables(p))
        m = mapping_from_basis(scheme, basis, env)
        try:
            tau = type_check(p, basis, env)
        except TypingError:
            untypable += 1
            disagreements += satisfies(m, pr.constraints, env)
        else:
            typable += 1
            ok = (satisfies(m, pr.constraints, env)
                  and eval_pair((pr.phi, pr.psi), m, env) == tau
                  and apply_mapping(scheme, m, env) == basis)
            disagreements += not ok

        # mappings drawn directly: every solution of the constraints is a typing
        universe = sorted(env.types)
        for _ in range(8):
            m = _random_mapping(rng, pr, universe)
            theta = apply_mapping(scheme, m, env)
            try:
                check_basis(theta, env)
            except IllFormedBasis:
                continue
            sampled += 1
            if not satisfies(m, pr.constraints, env):
                continue
            satisfied += 1
            try:
                ok = type_check(p, theta, env) == eval_pair((pr.phi, pr.psi), m, env)
            except TypingError:
                ok = False
            disagreements += not ok
    note(f"bases: {typable} typable, {untypable} not; mappings: {sampled} well formed, "
         f"{satisfied} satisfying; {disagreements} disagreements")
    assert disagreements == 0


@pytest.mark.criterion(7, "OK relation: core constraints agree with direct typing")
def test_ok_paths(note):
    pairs = disagreements = accepted = 0
    depths = {}
    seed = 0
    while pairs < 500:
        rng = random.Random(seed)
        seed += 1
        env = random_env(rng)
        deep = pairs % 2 == 0
        if deep:
            # systems with at least three nesting levels, hole at depth two or more
            t = random_correct(rng, env, rng.randint(6, 12), depth=5, min_depth=3)
        else:
            t = random_correct(rng, env, rng.randint(1, 8), depth=4)
        if t is None:
            continue
        c, _ = random_decomposition(rng, t, 0.9 if deep else 0.6)
        while deep and len(c.frames) < 2:
            c, _ = random_decomposition(rng, t, 0.9)
        tau = random_type(rng, env)
        core_ok, direct_ok = ok_for_context_core(tau, c, env), ok_for_context_direct(tau, c, env)
        disagreements += core_ok != direct_ok
        accepted += direct_ok
        depths[len(c.frames)] = depths.get(len(c.frames), 0) + 1
        pairs += 1
    note(f"{pairs} pairs, context depths {dict(sorted(depths.items()))}, {accepted} OK, "
         f"{disagreements} disagreements")
    assert disagreements == 0
    assert sum(n for d, n in depths.items() if d >= 2) >= 250


@pytest.mark.criterion(8, "double-nested cores: generated constraints equal the six-constraint list")
def test_six_constraints(note):
    cores = disagreements = satisfied = 0
    seed = 0
    while cores < 200:
        rng = random.Random(seed)
        seed += 1
        env = random_env(rng)
        c, parts = random_double_core(rng, env)
        if c is None:
            continue
        cores += 1
        for _ in range(5):
            tau = random_type(rng, env)
            _, cons = context_constraints(c, env)
            m = {TypeVar("p", HOLE): tau.present, TypeVar("r", HOLE): tau.required}
            got = satisfies(m, cons, env)
            satisfied += got
            disagreements += got != all(six_constraints(tau, *parts, env))
    note(f"{cores} cores x 5 types, {satisfied} satisfied, {disagreements} disagreements")
    assert disagreements == 0


@pytest.mark.criterion(9, "match agrees with the brute-force oracle, exhaustively")
def test_match_exhaustive(note):
    start = time.time()
    # the oracle compares instances by canonical form: first confirm canonical forms
    # coincide with congruence classes closed under the axioms, for all small raw trees
    trees = [t for n in range(1, 8) for t in all_trees(n, "ab")]
    by_form = {}
    for t in trees:
        by_form.setdefault(normalize(tree_to_raw(t)), set()).add(t)
    for form, members in by_form.items():
        closure = congruence_class(next(iter(members)), 9)
        assert members <= closure
        assert all(normalize(tree_to_raw(u)) == form for u in closure)

    pool = [Var(TERM, "X"), Var(TERM, "Y"), Var(SEQ, "s"), Var(ELEM, "e")]
    terms = canonical_terms(5, "ab")
    patterns = all_patterns(3, "ab", pool)
    pairs = disagreements = 0
    for p in patterns:
        table = instances_upto(p, 5, "ab", terms)
        for t in terms:
            pairs += 1
            disagreements += {freeze(s) for s in match(p, t)} != table.get(t, set())
    note(f"{len(trees)} trees in {len(by_form)} classes; {len(patterns)} patterns x "
         f"{len(terms)} terms = {pairs} pairs, {disagreements} disagreements, "
         f"{time.time() - start:.0f}s")
    assert disagreements == 0
