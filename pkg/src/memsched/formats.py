"""Text formats: CHR-style rule files, constraint tables, compiled rule sets.

Rule file, one propagation rule per ``.``-terminated statement::

    % comment
    c(X1,X2,X3,X4) ==> in(X1,[a,b]) | X2 ## a, X4 ## b.

Constraint table::

    constraint eq3/3
    vars X Y Z            % optional
    values 1: t f u
    values 2: t f u
    values 3: t f u
    tuples:
    t t t
    ...

Compiled rule set: the constraint header followed by one line per rule::

    rule 0: in(Y,[t]), in(Z,[f,u]) | X ## t ; friends 9 ; obviated 0 1 2 ; solving no
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .core import (
    Conclusion,
    Condition,
    MembershipRule,
    UsageError,
    ValueUniverse,
    bits,
)
from .precompile import CompiledRule, CompiledRuleSet
from .rulegen import ConstraintDef


class ParseError(UsageError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


_TOKEN = re.compile(
    r"(?P<ws>[ \t\r\n]+)|(?P<comment>%[^\n]*)|(?P<arrow>==>)|(?P<neq>\#\#)"
    r"|(?P<name>[A-Za-z0-9_]+)|(?P<punct>[()\[\],|.])"
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str, line0: int = 1) -> list[_Tok]:
    toks = []
    pos = 0
    line, line_start = line0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            toks.append(_Tok(kind, m.group(), line, pos - line_start + 1))
        chunk = m.group()
        if "\n" in chunk:
            line += chunk.count("\n")
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    return toks


class _Parser:
    def __init__(self, toks: list[_Tok], end: tuple[int, int]):
        self.toks = toks
        self.i = 0
        self.end = end

    def peek(self) -> _Tok | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def at(self, text: str) -> bool:
        t = self.peek()
        return t is not None and t.text == text

    def expect(self, text: str | None = None, kind: str | None = None) -> _Tok:
        t = self.peek()
        want = repr(text) if text else kind
        if t is None:
            raise ParseError(f"expected {want}, found end of input", *self.end)
        if (text is not None and t.text != text) or (kind is not None and t.kind != kind):
            raise ParseError(f"expected {want}, found {t.text!r}", t.line, t.col)
        self.i += 1
        return t


@dataclass
class SurfaceRule:
    """A parsed rule with variable positions and value names."""

    conditions: list[tuple[int, list[str]]]
    conclusions: list[tuple[int, str]]
    line: int
    col: int


@dataclass
class RuleFile:
    name: str
    arity: int
    var_names: tuple[str, ...]
    rules: list[SurfaceRule] = field(default_factory=list)

    def to_rules(self, universe: ValueUniverse) -> list[MembershipRule]:
        if len(universe) != self.arity:
            raise UsageError(
                f"rule file {self.name}/{self.arity} does not match a universe of arity {len(universe)}"
            )
        out = []
        for k, sr in enumerate(self.rules):
            try:
                conds = tuple(
                    Condition(pos, universe.mask(pos, vals, strict=False))
                    for pos, vals in sr.conditions
                )
                concls = tuple(Conclusion(pos, universe.index(pos, v)) for pos, v in sr.conclusions)
            except UsageError as exc:
                raise ParseError(f"rule {k + 1}: {exc}", sr.line, sr.col) from None
            out.append(MembershipRule(conds, concls, f"r{k + 1}"))
        return out


def _parse_head(p: _Parser) -> tuple[str, list[str], _Tok]:
    name = p.expect(kind="name")
    p.expect("(")
    variables = [p.expect(kind="name").text]
    while p.at(","):
        p.expect(",")
        variables.append(p.expect(kind="name").text)
    p.expect(")")
    return name.text, variables, name


def _parse_value_list(p: _Parser) -> list[str]:
    p.expect("[")
    vals = []
    if not p.at("]"):
        vals.append(p.expect(kind="name").text)
        while p.at(","):
            p.expect(",")
            vals.append(p.expect(kind="name").text)
    p.expect("]")
    return vals


def _parse_guard_body(
    p: _Parser, variables: Sequence[str], label: str, start: _Tok
) -> SurfaceRule:
    index = {v: i for i, v in enumerate(variables)}

    def var_pos(tok: _Tok) -> int:
        if tok.text not in index:
            raise ParseError(f"{label}: unknown head variable {tok.text}", tok.line, tok.col)
        return index[tok.text]

    conditions: list[tuple[int, list[str]]] = []
    if not p.at("|"):
        while True:
            p.expect("in")
            p.expect("(")
            vt = p.expect(kind="name")
            pos = var_pos(vt)
            if any(pos == c for c, _ in conditions):
                raise ParseError(f"{label}: duplicate condition on {vt.text}", vt.line, vt.col)
            p.expect(",")
            conditions.append((pos, _parse_value_list(p)))
            p.expect(")")
            if not p.at(","):
                break
            p.expect(",")
    bar = p.expect("|")
    conclusions = []
    if p.at("."):
        raise ParseError(f"{label}: empty body", bar.line, bar.col)
    while True:
        vt = p.expect(kind="name")
        pos = var_pos(vt)
        p.expect(kind="neq")
        conclusions.append((pos, p.expect(kind="name").text))
        if not p.at(","):
            break
        p.expect(",")
    return SurfaceRule(conditions, conclusions, start.line, start.col)


def _end_pos(text: str) -> tuple[int, int]:
    lines = text.split("\n")
    return len(lines), len(lines[-1]) + 1


def parse_rule_file(text: str) -> RuleFile:
    """Parse CHR-style propagation rules; all heads must name the same constraint."""
    p = _Parser(_tokenize(text), _end_pos(text))
    rf: RuleFile | None = None
    while p.peek() is not None:
        label = f"rule {len(rf.rules) + 1 if rf else 1}"
        name, variables, start = _parse_head(p)
        if len(set(variables)) != len(variables):
            raise ParseError(f"{label}: repeated head variable", start.line, start.col)
        if rf is None:
            rf = RuleFile(name, len(variables), tuple(variables))
        elif name != rf.name or len(variables) != rf.arity:
            raise ParseError(
                f"{label}: head {name}/{len(variables)} differs from {rf.name}/{rf.arity}",
                start.line,
                start.col,
            )
        p.expect(kind="arrow")
        rf.rules.append(_parse_guard_body(p, variables, label, start))
        p.expect(".")
    if rf is None:
        raise ParseError("no rules found", *p.end)
    return rf


def _guard_body_text(r: MembershipRule, universe: ValueUniverse) -> tuple[str, str]:
    guard = ", ".join(
        f"in({universe.names[c.var]},[{','.join(universe.value_names(c.var, c.mask))}])"
        for c in r.conditions
    )
    body = ", ".join(
        f"{universe.names[c.var]} ## {universe.values[c.var][c.value]}" for c in r.conclusions
    )
    return guard, body


def emit_rule_file(name: str, universe: ValueUniverse, rules: Iterable[MembershipRule]) -> str:
    head = f"{name}({','.join(universe.names)})"
    lines = []
    for r in rules:
        guard, body = _guard_body_text(r, universe)
        lines.append(f"{head} ==> {guard} | {body}." if guard else f"{head} ==> | {body}.")
    return "\n".join(lines) + "\n"


def _strip_comment(line: str) -> str:
    return line.split("%", 1)[0].strip()


_HEADER = re.compile(r"^(constraint|compiled)\s+([A-Za-z0-9_]+)\s*/\s*(\d+)$")
_VALUES = re.compile(r"^values\s+(\d+)\s*:\s*(.*)$")


def _parse_header(
    lines: list[str], keyword: str
) -> tuple[str, ValueUniverse, int]:
    """Parse ``<keyword> name/arity``, ``vars`` and ``values`` lines; returns the next line index."""
    name = None
    arity = 0
    names: tuple[str, ...] = ()
    values: dict[int, tuple[str, ...]] = {}
    i = 0
    while i < len(lines):
        raw = lines[i]
        line = _strip_comment(raw)
        lineno = i + 1
        if not line:
            i += 1
            continue
        if name is None:
            m = _HEADER.match(line)
            if not m or m.group(1) != keyword:
                raise ParseError(f"expected '{keyword} <name>/<arity>'", lineno, 1)
            name, arity = m.group(2), int(m.group(3))
        elif line.startswith("vars"):
            names = tuple(line.split()[1:])
            if len(names) != arity:
                raise ParseError(f"expected {arity} variable names", lineno, 1)
        elif (m := _VALUES.match(line)) is not None:
            k = int(m.group(1))
            if not 1 <= k <= arity:
                raise ParseError(f"variable number {k} outside 1..{arity}", lineno, 1)
            if k in values:
                raise ParseError(f"values for variable {k} given twice", lineno, 1)
            vs = tuple(m.group(2).split())
            if not vs:
                raise ParseError(f"empty universe for variable {k}", lineno, 1)
            if len(set(vs)) != len(vs):
                raise ParseError(f"duplicate value names for variable {k}", lineno, 1)
            values[k] = vs
        else:
            break
        i += 1
    if name is None:
        raise ParseError(f"missing '{keyword}' header", len(lines) or 1, 1)
    missing = [k for k in range(1, arity + 1) if k not in values]
    if missing:
        raise ParseError(f"no values line for variable(s) {missing}", i + 1 if i < len(lines) else len(lines), 1)
    universe = ValueUniverse(tuple(values[k] for k in range(1, arity + 1)), names)
    return name, universe, i


def parse_constraint_file(text: str) -> ConstraintDef:
    lines = text.split("\n")
    name, universe, i = _parse_header(lines, "constraint")
    if i >= len(lines) or _strip_comment(lines[i]) != "tuples:":
        raise ParseError("expected 'tuples:'", min(i + 1, len(lines)), 1)
    tuples = []
    for j in range(i + 1, len(lines)):
        line = _strip_comment(lines[j])
        if not line:
            continue
        row = line.split()
        if len(row) != len(universe):
            raise ParseError(f"tuple has {len(row)} values, arity is {len(universe)}", j + 1, 1)
        t = []
        for k, v in enumerate(row):
            if v not in universe.values[k]:
                col = lines[j].find(v) + 1
                raise ParseError(f"value {v!r} outside the universe of variable {k + 1}", j + 1, col)
            t.append(universe.values[k].index(v))
        tuples.append(tuple(t))
    return ConstraintDef(name, universe, frozenset(tuples))


def _universe_header(keyword: str, name: str, universe: ValueUniverse) -> list[str]:
    out = [f"{keyword} {name}/{len(universe)}", "vars " + " ".join(universe.names)]
    out += [f"values {i + 1}: {' '.join(vs)}" for i, vs in enumerate(universe.values)]
    return out


def emit_constraint_file(c: ConstraintDef) -> str:
    out = _universe_header("constraint", c.name, c.universe) + ["tuples:"]
    out += [" ".join(t) for t in c.named_tuples()]
    return "\n".join(out) + "\n"


def emit_compiled(cs: CompiledRuleSet) -> str:
    out = ["% compiled membership rules", *_universe_header("compiled", cs.name, cs.universe)]
    out.append(f"rules {len(cs.rules)}")
    for i, cr in enumerate(cs.rules):
        guard, body = _guard_body_text(cr.rule, cs.universe)
        out.append(
            f"rule {i}: {guard} | {body}"
            f" ; friends {' '.join(map(str, cr.friends))}".rstrip()
            + f" ; obviated {' '.join(map(str, cr.obviated))}".rstrip()
            + f" ; solving {'yes' if cr.solving else 'no'}"
        )
    return "\n".join(out) + "\n"


_RULE_LINE = re.compile(r"^rule\s+(\d+)\s*:(.*)$")


def _parse_indices(field_text: str, keyword: str, n: int, lineno: int) -> tuple[int, ...]:
    parts = field_text.split()
    if not parts or parts[0] != keyword:
        raise ParseError(f"expected '{keyword}'", lineno, 1)
    try:
        idx = tuple(int(x) for x in parts[1:])
    except ValueError:
        raise ParseError(f"non-integer index in {keyword}", lineno, 1) from None
    for k in idx:
        if not 0 <= k < n:
            raise ParseError(f"rule index {k} out of range in {keyword}", lineno, 1)
    return idx


def parse_compiled(text: str) -> CompiledRuleSet:
    lines = text.split("\n")
    name, universe, i = _parse_header(lines, "compiled")
    line = _strip_comment(lines[i]) if i < len(lines) else ""
    m = re.match(r"^rules\s+(\d+)$", line)
    if not m:
        raise ParseError("expected 'rules <count>'", i + 1, 1)
    n = int(m.group(1))
    compiled = []
    for j in range(i + 1, len(lines)):
        line = _strip_comment(lines[j])
        if not line:
            continue
        lineno = j + 1
        m = _RULE_LINE.match(line)
        if not m or int(m.group(1)) != len(compiled):
            raise ParseError(f"expected 'rule {len(compiled)}: ...'", lineno, 1)
        fields = m.group(2).split(";")
        if len(fields) != 4:
            raise ParseError("expected rule ; friends ; obviated ; solving", lineno, 1)
        # pad so token columns count from the start of the raw line
        offset = lines[j].index(":") + 1
        p = _Parser(_tokenize(" " * offset + fields[0], lineno), (lineno, len(lines[j]) + 1))
        sr = _parse_guard_body(p, universe.names, f"rule {len(compiled)}", _Tok("", "", lineno, 1))
        if p.peek() is not None:
            t = p.peek()
            raise ParseError(f"unexpected {t.text!r}", t.line, t.col)
        rf = RuleFile(name, len(universe), universe.names, [sr])
        r = rf.to_rules(universe)[0]
        friends = _parse_indices(fields[1], "friends", n, lineno)
        obviated = _parse_indices(fields[2], "obviated", n, lineno)
        sol = fields[3].split()
        if len(sol) != 2 or sol[0] != "solving" or sol[1] not in ("yes", "no"):
            raise ParseError("expected 'solving yes|no'", lineno, 1)
        never = any(c.mask == 0 for c in r.conditions)
        r = MembershipRule(r.conditions, r.conclusions, f"{name}_{len(compiled)}")
        compiled.append(CompiledRule(r, friends, obviated, sol[1] == "yes", never))
    if len(compiled) != n:
        raise ParseError(f"expected {n} rules, found {len(compiled)}", len(lines), 1)
    return CompiledRuleSet(name, universe, tuple(compiled))


def parse_query(text: str, universe: ValueUniverse):
    """Parse ``NAME=v1,v2 NAME=v3`` (items separated by blanks or ``;``) into a store."""
    domains: list[list[str] | None] = [None] * len(universe)
    for item in re.split(r"[;\s]+", text.strip()):
        if not item:
            continue
        if "=" not in item:
            raise UsageError(f"query item {item!r} is not NAME=values")
        var, vals = item.split("=", 1)
        k = universe.var_index(var)
        names = [v for v in vals.split(",") if v]
        for v in names:
            universe.index(k, v)
        domains[k] = names
    return universe.store(*domains)


def format_domains(universe: ValueUniverse, store) -> list[str]:
    if store.is_top:
        return ["FAIL"]
    return [
        f"{name}: {{{','.join(universe.values[i][v] for v in bits(m))}}}"
        for i, (name, m) in enumerate(zip(universe.names, store.masks))
    ]
