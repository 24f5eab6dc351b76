"""Command-line interface.

Exit codes: 0 success or positive result, 2 negative result (not
representable, verification failure, law violation, refuted comparison),
3 invalid input, 4 resource cap exceeded, 64 usage error, 1 internal error.
"""

from __future__ import annotations

import argparse
import json
import re
import sys

from .config import kernel_preference
from .counterexamples import enumerate_small, gen_sn
from .decision import (
    NotRepresentable,
    Representable,
    certificate_to_json,
    decide,
)
from .errors import (
    DemonicError,
    DimensionError,
    ExprError,
    FormatError,
    PreconditionError,
    ResourceCapError,
)
from .oracle import brute_force_represent, law_suite
from .predicates import (
    BlackFact,
    TriFact,
    compute_fixpoint,
    explain,
    format_derivation,
)
from .relcore import parse_relation, relation_from_obj, relation_to_json
from .relexpr import eval_relexpr
from .repbuilder import (
    export_dot,
    parse_representation,
    representation_to_json,
    represent,
    verify,
)
from .structure import (
    Diagnostics,
    parse_structure,
    serialize_structure,
    structure_to_obj,
    validate,
)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_NEGATIVE = 2
EXIT_INVALID = 3
EXIT_RESOURCE = 4
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from None


def _write(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        obj = json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise FormatError(f"config is not valid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise FormatError("config must be a JSON object")
    return obj


def _resolve_settings(args) -> tuple[str | None, int | None]:
    """Engine and memory cap with precedence: flags, config file, environment."""
    cfg = _load_config(getattr(args, "config", None))
    engine = getattr(args, "engine", None) or cfg.get("kernel")
    if engine is not None:
        kernel_preference(engine)  # validate the name early
    mem = getattr(args, "mem_mb", None)
    if mem is None:
        mem = cfg.get("mem_mb")
    return engine, mem


def _diag_obj(diag: Diagnostics) -> dict:
    return {
        "status": diag.status,
        "witness": list(diag.witness) if diag.witness else None,
        "detail": diag.detail,
    }


# --- subcommands ------------------------------------------------------------


def cmd_validate(args) -> int:
    s = parse_structure(_read(args.structure))
    diag = validate(s)
    if args.json:
        print(json.dumps(_diag_obj(diag)))
    elif diag.is_valid:
        print(f"valid: {s.size} elements")
    else:
        print(f"{diag.status}: {diag.detail} fails at {', '.join(diag.witness)}")
    return EXIT_OK if diag.is_valid else EXIT_INVALID


def cmd_check(args) -> int:
    s = parse_structure(_read(args.structure))
    engine, mem = _resolve_settings(args)
    cert = decide(s, engine=engine)
    if args.json:
        sys.stdout.write(certificate_to_json(s, cert))
    elif isinstance(cert, Representable):
        print(f"representable: base size {cert.representation.base_size}")
    elif isinstance(cert, NotRepresentable):
        print(
            f"not representable: witness ({s.elements[cert.a]}, {s.elements[cert.b]}), "
            f"minimal violated stage {cert.min_violated_stage}"
        )
    else:
        d = cert.diagnostics
        print(f"invalid structure: {d.detail} fails at {', '.join(d.witness)}")
    if isinstance(cert, Representable):
        return EXIT_OK
    return EXIT_NEGATIVE if isinstance(cert, NotRepresentable) else EXIT_INVALID


def cmd_represent(args) -> int:
    s = parse_structure(_read(args.structure))
    engine, mem = _resolve_settings(args)
    try:
        rep = represent(s, engine=engine)
    except PreconditionError as exc:
        print(f"cannot represent: {exc}", file=sys.stderr)
        invalid = isinstance(exc.diagnostics, Diagnostics)
        return EXIT_INVALID if invalid else EXIT_NEGATIVE
    _write(args.output, representation_to_json(rep))
    if args.dot:
        _write(args.dot, export_dot(rep))
    return EXIT_OK


def cmd_verify(args) -> int:
    s = parse_structure(_read(args.structure))
    rep = parse_representation(_read(args.representation), s)
    report = verify(s, rep)
    if args.json:
        print(json.dumps(report.to_obj()))
    elif report.passed:
        print("verification passed")
    else:
        print(f"verification failed: {len(report.failures)} failing checks")
        for law, a, b, detail in report.failures:
            print(f"  {law} at ({a}, {b}): {detail}")
    return EXIT_OK if report.passed else EXIT_NEGATIVE


def cmd_gen_sn(args) -> int:
    engine, mem = _resolve_settings(args)
    s = gen_sn(args.n, mem_mb=mem)
    _write(args.output, serialize_structure(s))
    return EXIT_OK


def cmd_enumerate(args) -> int:
    engine, _ = _resolve_settings(args)
    had_internal = False
    for s in enumerate_small(args.max_size, dedupe=args.dedupe):
        line: dict = {"structure": structure_to_obj(s)}
        if args.classify:
            try:
                cert = decide(s, engine=engine)
                summary: dict = {"status": cert.status}
                if isinstance(cert, Representable):
                    summary["base_size"] = cert.representation.base_size
                elif isinstance(cert, NotRepresentable):
                    summary["witness"] = [s.elements[cert.a], s.elements[cert.b]]
                    summary["min_violated_stage"] = cert.min_violated_stage
                else:
                    summary["diagnostics"] = _diag_obj(cert.diagnostics)
            except RuntimeError as exc:
                summary = {"status": "internal_error", "detail": str(exc)}
                had_internal = True
            line["certificate"] = summary
        print(json.dumps(line))
    return EXIT_INTERNAL if had_internal else EXIT_OK


_FACT_RES = (
    re.compile(r"^\s*(?P<a>[^<\s◀◁]+)\s*(?:◀|<\*)\s*(?P<b>[^<\s◀◁]+)\s*$"),
    re.compile(
        r"^\s*(?P<a>[^<\s◀◁]+)\s*(?:◁|<\|)\[(?P<s>[^]\s]+)\]\s*(?P<b>[^<\s◀◁]+)\s*$"
    ),
)


def _parse_fact(s, text: str):
    m = _FACT_RES[0].match(text)
    if m:
        return BlackFact(s.index(m.group("a")), s.index(m.group("b")))
    m = _FACT_RES[1].match(text)
    if m:
        return TriFact(s.index(m.group("s")), s.index(m.group("a")), s.index(m.group("b")))
    return None


def cmd_stages(args) -> int:
    s = parse_structure(_read(args.structure))
    engine, mem = _resolve_settings(args)
    f = compute_fixpoint(s, engine=engine, mem_mb=mem)
    names = s.elements
    if args.fact is None:
        if args.json:
            black = [
                [names[a], names[b], int(f.black_stage[a, b])]
                for a in range(s.size)
                for b in range(s.size)
                if f.black[a, b]
            ]
            tri = [
                [names[sx], names[a], names[b], int(f.tri_stage[sx, a, b])]
                for sx in range(s.size)
                for a in range(s.size)
                for b in range(s.size)
                if f.tri[sx, a, b]
            ]
            print(json.dumps({"elements": list(names), "black": black, "tri": tri}))
        else:
            for a in range(s.size):
                for b in range(s.size):
                    if f.black[a, b]:
                        print(f"{names[a]} <* {names[b]} @ {f.black_stage[a, b]}")
            for sx in range(s.size):
                for a in range(s.size):
                    for b in range(s.size):
                        if f.tri[sx, a, b]:
                            print(
                                f"{names[a]} <|[{names[sx]}] {names[b]} @ {f.tri_stage[sx, a, b]}"
                            )
        return EXIT_OK
    fact = _parse_fact(s, args.fact)
    if fact is None:
        print(
            f"cannot parse fact {args.fact!r}: use 'a <* b' or 'a <|[s] b'",
            file=sys.stderr,
        )
        return EXIT_USAGE
    if isinstance(fact, BlackFact):
        stage = f.stage_black(fact.a, fact.b)
        shown = f"{names[fact.a]} <* {names[fact.b]}"
    else:
        stage = f.stage_tri(fact.s, fact.a, fact.b)
        shown = f"{names[fact.a]} <|[{names[fact.s]}] {names[fact.b]}"
    if stage is None:
        print(f"{shown}: not derivable")
        return EXIT_NEGATIVE
    if args.explain:
        print(format_derivation(s, explain(f, fact)))
    else:
        print(f"{shown} @ {stage}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    s = parse_structure(_read(args.structure))
    try:
        rep = brute_force_represent(
            s, args.max_base, size_cap=args.size_cap, base_cap=args.base_cap
        )
    except PreconditionError as exc:
        print(f"oracle refused: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if rep is None:
        print(
            f"no representation over bases 1..{args.max_base} "
            "(not a proof of non-representability)"
        )
        return EXIT_NEGATIVE
    sys.stdout.write(representation_to_json(rep))
    return EXIT_OK


def cmd_laws(args) -> int:
    report = law_suite(args.seed, args.trials, max_base=args.max_base)
    if args.json:
        print(json.dumps(report.to_obj()))
    else:
        print(
            f"law suite: seed={report.seed} trials={report.trials} "
            f"checks={report.checks} violations={len(report.violations)}"
        )
        for v in report.violations:
            print(f"  {v.law} over base {v.base}: {[list(r) for r in v.relations]}")
    return EXIT_OK if report.passed else EXIT_NEGATIVE


def cmd_eval(args) -> int:
    env = {}
    if args.env:
        try:
            obj = json.loads(_read(args.env))
        except json.JSONDecodeError as exc:
            raise FormatError(f"environment is not valid JSON: {exc}") from None
        if not isinstance(obj, dict):
            raise FormatError("environment must be a JSON object of named relations")
        for name, rel in obj.items():
            env[name] = relation_from_obj(rel)
    for item in args.let or ():
        name, eq, spec = item.partition("=")
        if not eq or not name:
            print(f"--let expects NAME=FILE or NAME=JSON, got {item!r}", file=sys.stderr)
            return EXIT_USAGE
        env[name] = parse_relation(spec if spec.lstrip().startswith("{") else _read(spec))
    result = eval_relexpr(env, args.expr, base=args.base)
    if isinstance(result, bool):
        print("true" if result else "false")
        return EXIT_OK if result else EXIT_NEGATIVE
    print(relation_to_json(result))
    return EXIT_OK


# --- wiring -----------------------------------------------------------------


def _add_common(p, mem=True):
    p.add_argument("--config", help="optional JSON config file (flags win)")
    p.add_argument(
        "--engine", choices=("auto", "compiled", "python"), help="fixpoint engine"
    )
    if mem:
        p.add_argument("--mem-mb", type=int, help="memory cap in MiB for cube allocation")


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="demonic", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check partial order and associativity")
    p.add_argument("structure")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("check", help="decide representability, emit certificate")
    p.add_argument("structure")
    p.add_argument("--json", action="store_true")
    _add_common(p)
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("represent", help="build the explicit representation")
    p.add_argument("structure")
    p.add_argument("-o", "--output", help="representation JSON path (default stdout)")
    p.add_argument("--dot", help="also write a graph rendering")
    _add_common(p)
    p.set_defaults(fn=cmd_represent)

    p = sub.add_parser("verify", help="check a representation against a structure")
    p.add_argument("structure")
    p.add_argument("representation")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("gen-sn", help="generate a counterexample-family structure")
    p.add_argument("n", type=int)
    p.add_argument("-o", "--output", help="output path (default stdout)")
    _add_common(p)
    p.set_defaults(fn=cmd_gen_sn)

    p = sub.add_parser("enumerate", help="stream small valid structures")
    p.add_argument("--max-size", type=int, required=True)
    p.add_argument("--dedupe", action="store_true", help="one structure per isomorphism class")
    p.add_argument("--classify", action="store_true", help="attach certificate summaries")
    _add_common(p)
    p.set_defaults(fn=cmd_enumerate)

    p = sub.add_parser("stages", help="print stabilized predicate facts with stages")
    p.add_argument("structure")
    p.add_argument("--fact", help="query one fact: 'a <* b' or 'a <|[s] b'")
    p.add_argument("--explain", action="store_true", help="print the derivation tree")
    p.add_argument("--json", action="store_true")
    _add_common(p)
    p.set_defaults(fn=cmd_stages)

    p = sub.add_parser("oracle", help="brute-force search for a small representation")
    p.add_argument("structure")
    p.add_argument("--max-base", type=int, default=3)
    p.add_argument("--size-cap", type=int, default=3)
    p.add_argument("--base-cap", type=int, default=3)
    p.set_defaults(fn=cmd_oracle)

    p = sub.add_parser("laws", help="randomized relation-law suite")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--max-base", type=int, default=6)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_laws)

    p = sub.add_parser("eval", help="evaluate a relation expression")
    p.add_argument("expr")
    p.add_argument("--env", help="JSON file mapping names to relations")
    p.add_argument(
        "--let",
        action="append",
        metavar="NAME=SPEC",
        help="bind NAME to a relation file or inline JSON (repeatable)",
    )
    p.add_argument("--base", type=int, help="base size when the environment is empty")
    p.set_defaults(fn=cmd_eval)

    return top


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.fn(args)
    except ResourceCapError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (FormatError, DimensionError, ExprError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except DemonicError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE
    except RuntimeError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
