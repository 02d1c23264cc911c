"""OTTER-style problem files.

::

    % problem: Satz3.17
    set(binary_res).
    assign(max_weight, 16).
    list(usable).
    E(xa,xb,xb,xa).
    end_of_list.
    list(sos).
    ...
    end_of_list.

Passive clauses carry their goal number as an answer literal,
``-T(a,b,c) | $ANS(3).``.  Clauses longer than 80 columns are broken after a
``|`` and continued on indented lines.  Output is byte-stable: the same
problem always prints the same text.
"""

from __future__ import annotations

import re
from pathlib import Path
from typing import Union

from .kernel import Clause, ParseError, format_clause, format_literal, parse_clause
from .saturation import ALL_RULES, HINT_MODES, ProblemSpec, Settings

WIDTH = 80
LISTS = ("usable", "sos", "passive", "demodulators", "hot", "hints")

_RULE_FLAGS = {
    "binary": ("binary_res",),
    "hyper": ("hyper_res",),
    "unit": ("unit_res",),
    "para": ("para_from", "para_into"),
    "factor": ("factor",),
}
_INT_PARAMS = ("max_weight", "pick_given_ratio", "max_proofs", "max_distinct_vars",
               "max_given", "bsub_hint_wt", "fsub_hint_wt", "rewrite_limit")
_ANS = re.compile(r"\s*\|\s*\$ANS\((\d+)\)\s*\.\s*$")


class ProblemFileError(ValueError):
    def __init__(self, message: str, line: int = 0):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


def wrap_clause(text: str, width: int = WIDTH) -> list:
    """Split a clause line at ``|`` separators so no line exceeds ``width``."""
    if len(text) <= width:
        return [text]
    parts = text.split(" | ")
    lines, cur = [], parts[0]
    for part in parts[1:]:
        if len(cur) + 2 + len(part) + 3 > width and cur.strip():
            lines.append(cur + " |")
            cur = "    " + part
        else:
            cur = cur + " | " + part
    lines.append(cur)
    return lines


def _number(x) -> str:
    if isinstance(x, float) and x.is_integer():
        return str(int(x))
    return str(x)


def format_problem(p: ProblemSpec) -> str:
    s = p.settings
    out = [f"% problem: {p.name}"]
    for rule in ALL_RULES:
        for flag in _RULE_FLAGS[rule]:
            out.append(f"{'set' if rule in s.rules else 'clear'}({flag}).")
    out.append(f"{'set' if s.para_from_vars else 'clear'}(para_from_vars).")
    for name in _INT_PARAMS:
        value = getattr(s, name)
        if value is not None:
            out.append(f"assign({name}, {value}).")
    if s.max_seconds is not None:
        out.append(f"assign(max_seconds, {_number(s.max_seconds)}).")
    out.append(f"assign(hint_mode, {s.hint_mode}).")

    def block(name: str, lines: list):
        out.append(f"list({name}).")
        for text in lines:
            out.extend(wrap_clause(text))
        out.append("end_of_list.")

    block("usable", [format_clause(c) for c in p.usable])
    block("sos", [format_clause(c) for c in p.sos])
    if p.passive:
        block("passive", [_passive_line(g, c) for g, c in p.passive])
    if p.demodulators:
        block("demodulators", [format_clause(c) for c in p.demodulators])
    if p.hot:
        block("hot", [format_clause(c) for c in p.hot])
    if p.hints:
        block("hints", [format_clause(c) for c in p.hints])
    return "\n".join(out) + "\n"


def _passive_line(goal: int, c: Clause) -> str:
    body = " | ".join(format_literal(l) for l in c.literals) if c.literals else "$F"
    return f"{body} | $ANS({goal})."


def parse_problem(text: str) -> ProblemSpec:
    name = "problem"
    fields: dict = {}
    rules_on: set = set()
    rules_off: set = set()
    lists = {k: [] for k in LISTS}
    current = None
    pending, start = "", 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        stripped = raw.strip()
        if stripped.startswith("%"):
            m = re.match(r"%\s*problem:\s*(\S+)", stripped)
            if m and current is None:
                name = m.group(1)
            continue
        if not stripped:
            continue
        if not pending:
            start = lineno
        pending = (pending + " " + stripped).strip() if pending else stripped
        if not pending.endswith("."):
            continue
        stmt, pending = pending, ""
        if current is None:
            m = re.fullmatch(r"list\((\w+)\)\.", stmt)
            if m:
                if m.group(1) not in LISTS:
                    raise ProblemFileError(f"unknown list {m.group(1)!r}", start)
                current = m.group(1)
                continue
            m = re.fullmatch(r"(set|clear)\((\w+)\)\.", stmt)
            if m:
                (rules_on if m.group(1) == "set" else rules_off).add(m.group(2))
                continue
            m = re.fullmatch(r"assign\((\w+),\s*([^)]+)\)\.", stmt)
            if m:
                fields[m.group(1)] = (m.group(2).strip(), start)
                continue
            raise ProblemFileError(f"unexpected statement {stmt!r}", start)
        if stmt == "end_of_list.":
            current = None
            continue
        try:
            if current == "passive":
                m = _ANS.search(stmt)
                if not m:
                    raise ProblemFileError("passive clause without $ANS(n)", start)
                body = stmt[:m.start()].strip()
                clause = Clause(()) if body == "$F" else parse_clause(body + ".")
                lists["passive"].append((int(m.group(1)), clause))
            else:
                lists[current].append(parse_clause(stmt))
        except ParseError as exc:
            raise ProblemFileError(str(exc), start) from exc
    if pending:
        raise ProblemFileError("statement not terminated by '.'", start)
    if current is not None:
        raise ProblemFileError(f"list({current}) is not closed")

    settings = _settings(fields, rules_on, rules_off)
    try:
        return ProblemSpec(name=name, settings=settings, **lists)
    except ValueError as exc:
        raise ProblemFileError(str(exc)) from exc


def _settings(fields: dict, on: set, off: set) -> Settings:
    kwargs: dict = {}
    for key, (value, line) in fields.items():
        try:
            if key in _INT_PARAMS:
                kwargs[key] = int(value)
            elif key == "max_seconds":
                kwargs[key] = float(value)
            elif key == "hint_mode":
                if value not in HINT_MODES:
                    raise ValueError(value)
                kwargs[key] = value
            else:
                raise ProblemFileError(f"unknown parameter {key!r}", line)
        except ValueError as exc:
            raise ProblemFileError(f"bad value for {key}: {value!r}", line) from exc
    known_flags = {f for flags in _RULE_FLAGS.values() for f in flags} | {"para_from_vars"}
    unknown = (on | off) - known_flags
    if unknown:
        raise ProblemFileError(f"unknown flag(s): {', '.join(sorted(unknown))}")
    # a rule is on if any of its flags is set, or if none of them is mentioned
    kwargs["rules"] = tuple(
        r for r in ALL_RULES
        if any(f in on for f in _RULE_FLAGS[r]) or not any(f in off for f in _RULE_FLAGS[r]))
    if "para_from_vars" in on:
        kwargs["para_from_vars"] = True
    elif "para_from_vars" in off:
        kwargs["para_from_vars"] = False
    try:
        return Settings(**kwargs)
    except ValueError as exc:
        raise ProblemFileError(str(exc)) from exc


def read_problem(path: Union[str, Path]) -> ProblemSpec:
    return parse_problem(Path(path).read_text())


def write_problem(path: Union[str, Path], p: ProblemSpec) -> None:
    Path(path).write_text(format_problem(p))


__all__ = ["ProblemFileError", "format_problem", "parse_problem", "read_problem",
           "wrap_clause", "write_problem"]
