"""Command-line driver: ``memsched gen|compile|stats|solve|bench``.

Exit status is 0 on success, 1 when the answer is FAIL or there is no
solution, 2 on usage or parse errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence, TextIO

from .core import UsageError
from .formats import (
    emit_compiled,
    emit_rule_file,
    format_domains,
    parse_compiled,
    parse_constraint_file,
    parse_query,
    parse_rule_file,
)
from .precompile import CompiledRuleSet, compile_ruleset
from .rulegen import generate_canonical_rules
from .solver import CspInstance, SearchState, propagate, search_bench, write_csv


def stats_text(cs: CompiledRuleSet) -> str:
    dist = " ".join(f"{size}×{count}" for size, count in cs.size_distribution())
    return "\n".join(
        [
            f"constraint {cs.name}/{len(cs.universe)}",
            f"rules {len(cs)}",
            f"solving {cs.solving_count}/{len(cs)}",
            f"sizes {dist}".rstrip(),
            f"average {cs.average_size():.2f}",
        ]
    ) + "\n"


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _emit(text: str, out_path: str | None, stdout: TextIO) -> None:
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
    else:
        stdout.write(text)


def _table_for(args, cs: CompiledRuleSet):
    if not getattr(args, "constraint", None):
        return None
    table = parse_constraint_file(_read(args.constraint))
    if table.universe.values != cs.universe.values:
        raise UsageError("constraint table and compiled set disagree on the value universes")
    return table


def _cmd_gen(args, stdout) -> int:
    c = parse_constraint_file(_read(args.constraint_file))
    rules = generate_canonical_rules(c, args.equality_only)
    kind = "equality" if args.equality_only else "membership"
    text = f"% {len(rules)} {kind} rules for {c.name}/{c.arity}\n"
    text += emit_rule_file(c.name, c.universe, rules)
    _emit(text, args.output, stdout)
    return 0


def _cmd_compile(args, stdout) -> int:
    rf = parse_rule_file(_read(args.rule_file))
    c = parse_constraint_file(_read(args.constraint_file))
    if rf.arity != c.arity:
        raise UsageError(f"rule file arity {rf.arity} differs from constraint arity {c.arity}")
    cs = compile_ruleset(rf.to_rules(c.universe), c.universe, c.name)
    _emit(emit_compiled(cs), args.output, stdout)
    return 0


def _cmd_stats(args, stdout) -> int:
    stdout.write(stats_text(parse_compiled(_read(args.compiled_file))))
    return 0


def _cmd_solve(args, stdout) -> int:
    cs = parse_compiled(_read(args.compiled_file))
    csp = CspInstance.single(cs, _table_for(args, cs))
    start = parse_query(args.query, cs.universe)
    if start.is_top:
        stdout.write("FAIL\n")
        return 1
    if args.label:
        rep = search_bench(csp, args.engine, mode="all_solutions", start=start)
        for sol in sorted(rep.solutions):
            stdout.write(
                " ".join(f"{n}={cs.universe.values[i][v]}" for i, (n, v) in enumerate(zip(cs.universe.names, sol)))
                + "\n"
            )
        if not rep.solutions:
            stdout.write("FAIL\n")
            return 1
        return 0
    state = SearchState.initial(csp, args.engine, start=start)
    ok = propagate(csp, state, args.engine)
    stdout.write("\n".join(format_domains(cs.universe, state.store)) + "\n")
    return 0 if ok else 1


def _cmd_bench(args, stdout) -> int:
    cs = parse_compiled(_read(args.compiled_file))
    csp = CspInstance.single(cs, _table_for(args, cs))
    mode = {"tree": "randomized_tree", "all": "all_solutions"}[args.mode]
    reports = [search_bench(csp, args.engine, seed, mode) for seed in range(args.seed, args.seed + args.runs)]
    write_csv(reports, stdout)
    if mode == "all_solutions" and not any(r.solutions for r in reports):
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="memsched", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate canonical rules from a constraint table")
    p.add_argument("constraint_file")
    p.add_argument("--equality-only", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("compile", help="compute friends/obviated lists for a rule file")
    p.add_argument("rule_file")
    p.add_argument("constraint_file")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_compile)

    p = sub.add_parser("stats", help="solving-rule statistics of a compiled set")
    p.add_argument("compiled_file")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("solve", help="propagate a query, optionally label")
    p.add_argument("compiled_file")
    p.add_argument("query", help="e.g. 'X=t Y=t' or 'X=f; Z=f,u'")
    p.add_argument("--engine", choices=("gi", "r"), default="r")
    p.add_argument("--label", action="store_true", help="enumerate all solutions")
    p.add_argument("--constraint", help="constraint table used to check solutions")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("bench", help="seeded search benchmark, CSV on stdout")
    p.add_argument("compiled_file")
    p.add_argument("--engine", choices=("gi", "r"), default="r")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=("tree", "all"), default="tree")
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--constraint", help="constraint table used to check solutions")
    p.set_defaults(func=_cmd_bench)
    return parser


def run(argv: Sequence[str] | None = None, stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, stdout)
    except (UsageError, OSError) as exc:
        stderr.write(f"memsched {args.command}: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
