"""Command-line front end.

Exit codes: 0 success, 1 type or applicability failure, 2 parse failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from .errors import CLSError, IllTypedState, MatchBudgetExceeded, ParseError, TypingError
from .inference import infer, typed_step
from .rewrite import explore, parse_rules, untyped_step
from .syntax import Term, elements, parse_pattern, parse_term, pretty
from .typesys import TypeEnv, parse_env, type_check

SCHEMA = 1


@dataclass(frozen=True)
class ModelBundle:
    env: TypeEnv
    rules: list
    term: Term


class _Fail(Exception):
    def __init__(self, code, message, payload=None):
        self.code = code
        self.message = message
        self.payload = payload


def _read(path, parse, what):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _Fail(2, f"{path}: cannot read {what}: {exc.strerror}") from exc
    try:
        return parse(text)
    except ParseError as exc:
        raise _Fail(2, f"{path}:{exc}") from exc


def _env(path):
    if path is None:
        return TypeEnv({})
    return _read(path, parse_env, "type environment")


def load_bundle(env_path, rules_path, term_path, require_env=True) -> ModelBundle:
    env = _env(env_path)
    rules = _read(rules_path, parse_rules, "rules")
    term = _read(term_path, parse_term, "term")
    if require_env:
        undeclared = set(elements(term))
        for rule in rules:
            undeclared |= elements(rule.lhs) | elements(rule.rhs)
        undeclared -= set(env.elems)
        if undeclared:
            raise _Fail(2, "undeclared elements: " + ", ".join(sorted(undeclared)))
    return ModelBundle(env, rules, term)


def _type_payload(tau):
    return {"present": sorted(tau.present), "required": sorted(tau.required)}


def _error_payload(exc):
    payload = {"kind": type(exc).__name__, "message": str(exc)}
    position = getattr(exc, "position", None)
    if position is not None:
        payload["position"] = "/" + "/".join(position)
    return {"schema": SCHEMA, "error": payload}


def cmd_fmt(args, out):
    term = _read(args.file, parse_term, "term")
    print(pretty(term), file=out)
    return 0


def cmd_check(args, out):
    env = _env(args.env)
    term = _read(args.file, parse_term, "term")
    try:
        tau = type_check(term, {}, env)
    except (TypingError, CLSError) as exc:
        raise _Fail(1, f"type error: {exc}", _error_payload(exc)) from exc
    if args.json:
        print(json.dumps({"schema": SCHEMA, "type": _type_payload(tau)}, sort_keys=True), file=out)
    else:
        print("P = {%s}; R = {%s}" % (", ".join(sorted(tau.present)),
                                      ", ".join(sorted(tau.required))), file=out)
    return 0


def cmd_infer(args, out):
    env = _env(args.env)
    pattern = _read(args.file, parse_pattern, "pattern")
    try:
        result = infer(pattern, env)
    except CLSError as exc:
        raise _Fail(1, f"type error: {exc}", _error_payload(exc)) from exc
    if args.json:
        print(json.dumps(result.to_json(), sort_keys=True, ensure_ascii=False), file=out)
    else:
        print(result, file=out)
    return 0


def _stepper(bundle, untyped):
    if untyped:
        return lambda t: untyped_step(bundle.rules, t)
    return lambda t: typed_step(bundle.rules, t, bundle.env)


def cmd_step(args, out):
    bundle = load_bundle(args.env, args.rules, args.term, require_env=not args.untyped)
    try:
        successors = _stepper(bundle, args.untyped)(bundle.term)
    except (IllTypedState, MatchBudgetExceeded) as exc:
        raise _Fail(1, f"error: {exc}", _error_payload(exc)) from exc
    if args.json:
        payload = {"schema": SCHEMA,
                   "successors": [{"rule": r, "term": pretty(t)} for r, t in successors]}
        print(json.dumps(payload, sort_keys=True), file=out)
    else:
        for rule_name, t in successors:
            print(f"{rule_name}: {pretty(t)}", file=out)
    return 0


def cmd_run(args, out):
    if args.max_states < 1 or args.max_depth < 0:
        raise _Fail(2, "--max-states must be >= 1 and --max-depth >= 0")
    bundle = load_bundle(args.env, args.rules, args.term, require_env=not args.untyped)
    try:
        graph = explore(_stepper(bundle, args.untyped), bundle.term,
                        args.max_states, args.max_depth)
    except (IllTypedState, MatchBudgetExceeded) as exc:
        raise _Fail(1, f"error: {exc}", _error_payload(exc)) from exc
    if args.dot:
        Path(args.dot).write_text(graph.to_dot(), encoding="utf-8")
    if args.json:
        print(json.dumps(graph.to_json(), sort_keys=True), file=out)
    else:
        print(f"states: {len(graph.states)}", file=out)
        print(f"edges: {len(graph.edges)}", file=out)
        print(f"truncated: {str(graph.truncated).lower()}", file=out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="typedcls", description="Typed rewriting for the Calculus of Looping Sequences.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fmt", help="print the canonical form of a term")
    p.add_argument("file")
    p.set_defaults(func=cmd_fmt)

    p = sub.add_parser("check", help="type-check a ground term")
    p.add_argument("--env")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("infer", help="principal typing of a pattern")
    p.add_argument("--env")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_infer)

    for name, func, help_text in (("step", cmd_step, "list one-step successors"),
                                  ("run", cmd_run, "explore the reachable states")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--env")
        p.add_argument("--rules", required=True)
        p.add_argument("--term", required=True)
        p.add_argument("--untyped", action="store_true")
        p.add_argument("--json", action="store_true")
        if name == "run":
            p.add_argument("--max-states", type=int, default=1000)
            p.add_argument("--max-depth", type=int, default=100)
            p.add_argument("--dot")
        p.set_defaults(func=func)
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    if args.command in ("step", "run") and not args.untyped and args.env is None:
        print("error: typed mode needs --env (or pass --untyped)", file=err)
        return 2
    try:
        return args.func(args, out)
    except _Fail as exc:
        if exc.payload is not None and getattr(args, "json", False):
            print(json.dumps(exc.payload, sort_keys=True), file=out)
        print(exc.message, file=err)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
