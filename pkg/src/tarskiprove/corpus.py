"""The master list: axioms, theorem entries and their mechanical checks.

A master-list file is plain text.  Entries start with a header line
(``axiom <Name>``, ``definition <Name>`` or ``theorem <Name>``) followed by
labelled blocks, one clause per line::

    theorem Satz2.2
    flags: mechanical
    positive:
      -E(xa,xb,xc,xd) | E(xc,xd,xa,xb).
    negated:
      E(a,b,c,d).
      -E(c,d,a,b).

Recognised labels are ``clauses:`` (axioms and definitions), ``positive:``,
``negated:``, ``diagram:``, ``cases:``, ``flags:``, ``skolem:`` and ``vars:``.
``skolem: ext/4 (q,a,b,c)`` declares a Skolem symbol together with the order
of its arguments, named by the entry's constants.  ``vars: cx -> x`` renames
a constant to a specific variable when the positive form is computed; by
default a constant ``a`` becomes the variable ``xa``.  ``#`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

from .kernel import (
    EQ,
    Clause,
    Literal,
    ParseError,
    Term,
    format_clause,
    is_var,
    is_var_name,
    parse_clause,
)
from .inference import variant
from .saturation import ProblemSpec, Settings

DIFFICULTIES = ("mechanical", "diagram", "subformula", "hints", "hard")
KNOWN_FLAGS = frozenset(DIFFICULTIES) | {
    "cases", "optional", "manual_skolemization", "extension"}

_HEADER = re.compile(r"^(axiom|definition|theorem)\s+(\S+)\s*$")
_LABEL = re.compile(r"^(clauses|positive|negated|diagram|cases|flags|skolem|vars):\s*(.*)$")
_SKOLEM = re.compile(r"^([A-Za-z0-9_]+)\s*/\s*(\d+)\s*(?:\(([^)]*)\))?$")
_VARMAP = re.compile(r"^([A-Za-z0-9_]+)\s*->\s*([A-Za-z0-9_]+)$")


# --------------------------------------------------------------------------
# Model
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SkolemSymbol:
    name: str
    arity: int
    arg_order: tuple = ()  # constant names of the introducing entry

    def render(self) -> str:
        order = f" ({','.join(self.arg_order)})" if self.arg_order else ""
        return f"{self.name}/{self.arity}{order}"


@dataclass(frozen=True)
class DiagramEquation:
    """``new_constant = definition``, naming a constructed point."""

    new_constant: str
    definition: Term

    @classmethod
    def from_clause(cls, c: Clause) -> "DiagramEquation":
        if not c.is_unit or not c.literals[0].positive or not c.literals[0].is_equality:
            raise ValueError("a diagram line must be a single positive equation")
        _, lhs, rhs = c.literals[0].atom
        if is_var(lhs) or len(lhs) != 1:
            raise ValueError("the left side of a diagram equation must be a constant")
        if is_var(rhs) or len(rhs) == 1:
            raise ValueError("the right side of a diagram equation must be a compound term")
        return cls(lhs[0], rhs)

    def clause(self) -> Clause:
        return Clause((Literal(True, (EQ, (self.new_constant,), self.definition)),))

    def demodulator(self) -> Clause:
        """The equation oriented to rewrite the construction to its name."""
        return Clause((Literal(True, (EQ, self.definition, (self.new_constant,))),))


@dataclass
class AxiomGroup:
    name: str
    kind: str  # "axiom" or "definition"
    clauses: tuple = ()
    skolem_symbols: tuple = ()
    line: int = 0


@dataclass
class TheoremEntry:
    name: str
    positive_form: tuple = ()
    negated_form: tuple = ()
    diagram: tuple = ()
    skolem_symbols: tuple = ()
    cases: tuple = ()
    flags: frozenset = frozenset()
    var_map: dict = field(default_factory=dict)
    line: int = 0

    @property
    def difficulty(self) -> str:
        for tag in reversed(DIFFICULTIES):
            if tag in self.flags:
                return tag
        return "mechanical"

    @property
    def chapter(self) -> str:
        m = re.match(r"^[A-Za-z]*(\d+)\.", self.name)
        return m.group(1) if m else ""


@dataclass
class MasterList:
    axioms: list = field(default_factory=list)
    definitions: list = field(default_factory=list)
    theorems: list = field(default_factory=list)
    source: str = "<string>"

    @property
    def names(self) -> list:
        return [t.name for t in self.theorems]

    def index(self, name: str) -> int:
        for i, t in enumerate(self.theorems):
            if t.name == name:
                return i
        raise KeyError(f"unknown theorem {name!r}")

    def theorem(self, name: str) -> TheoremEntry:
        return self.theorems[self.index(name)]

    def groups(self) -> list:
        return [*self.axioms, *self.definitions]


@dataclass
class Diagnostic:
    entry: str
    field: str
    message: str
    line: int = 0

    def __str__(self):
        where = f"line {self.line}: " if self.line else ""
        return f"{where}{self.entry or '<file>'} [{self.field}] {self.message}"


class MasterListError(ValueError):
    def __init__(self, diagnostics: Sequence[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(map(str, self.diagnostics)))


# --------------------------------------------------------------------------
# Parsing
# --------------------------------------------------------------------------

def parse_master_list(text: str, source: str = "<string>") -> MasterList:
    """Parse master-list text; raise :class:`MasterListError` listing every problem."""
    diags: list = []
    raw_entries: list = []
    current = None
    label = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _HEADER.match(line)
        if m:
            current = dict(kind=m.group(1), name=m.group(2), line=lineno, blocks={})
            raw_entries.append(current)
            label = None
            continue
        if current is None:
            diags.append(Diagnostic("", "header", f"text outside any entry: {line!r}", lineno))
            continue
        m = _LABEL.match(line)
        if m:
            label = m.group(1)
            current["blocks"].setdefault(label, [])
            if m.group(2):
                current["blocks"][label].append((lineno, m.group(2)))
            continue
        if label is None:
            diags.append(Diagnostic(current["name"], "header",
                                    f"line before any block label: {line!r}", lineno))
            continue
        current["blocks"][label].append((lineno, line))

    if not raw_entries and not diags:
        diags.append(Diagnostic("", "file", "no entries"))

    m = MasterList(source=source)
    seen: dict = {}
    for raw in raw_entries:
        key = (raw["kind"] == "theorem", raw["name"])
        if key in seen:
            diags.append(Diagnostic(raw["name"], "name",
                                    f"duplicate name (first defined at line {seen[key]})",
                                    raw["line"]))
            continue
        seen[key] = raw["line"]
        entry = _build_entry(raw, diags)
        if entry is None:
            continue
        if isinstance(entry, TheoremEntry):
            m.theorems.append(entry)
        elif entry.kind == "axiom":
            m.axioms.append(entry)
        else:
            m.definitions.append(entry)
    if diags:
        raise MasterListError(diags)
    return m


def load_master_list(path: Union[str, Path]) -> MasterList:
    path = Path(path)
    return parse_master_list(path.read_text(), source=str(path))


def starter_corpus() -> MasterList:
    """The shipped master list of axioms and betweenness theorems."""
    text = resources.files("tarskiprove").joinpath("data/starter.master").read_text()
    return parse_master_list(text, source="starter.master")


def _build_entry(raw: dict, diags: list):
    name, blocks, kind = raw["name"], raw["blocks"], raw["kind"]
    n_before = len(diags)
    allowed = {"clauses", "skolem"} if kind != "theorem" else \
        {"positive", "negated", "diagram", "cases", "flags", "skolem", "vars"}
    for label in blocks:
        if label not in allowed:
            diags.append(Diagnostic(name, label, f"block not allowed in a {kind} entry", raw["line"]))

    def clauses(label: str) -> tuple:
        out = []
        for lineno, text in blocks.get(label, ()):
            try:
                out.append(parse_clause(text))
            except ParseError as exc:
                diags.append(Diagnostic(name, label, str(exc), lineno))
        return tuple(out)

    skolems = []
    for lineno, text in blocks.get("skolem", ()):
        sm = _SKOLEM.match(text)
        if not sm:
            diags.append(Diagnostic(name, "skolem", f"expected name/arity (args): {text!r}", lineno))
            continue
        order = tuple(a.strip() for a in sm.group(3).split(",") if a.strip()) if sm.group(3) else ()
        sym = SkolemSymbol(sm.group(1), int(sm.group(2)), order)
        if order and len(order) != sym.arity:
            diags.append(Diagnostic(name, "skolem",
                                    f"{sym.name}: argument order lists {len(order)} names "
                                    f"for arity {sym.arity}", lineno))
        skolems.append(sym)

    if kind != "theorem":
        group = AxiomGroup(name, kind, clauses("clauses"), tuple(skolems), raw["line"])
        if not group.clauses:
            diags.append(Diagnostic(name, "clauses", "no clauses", raw["line"]))
        return group if len(diags) == n_before else None

    flags = set()
    for lineno, text in blocks.get("flags", ()):
        for tag in re.split(r"[,\s]+", text.strip()):
            if not tag:
                continue
            if tag not in KNOWN_FLAGS:
                diags.append(Diagnostic(name, "flags", f"unknown flag {tag!r}", lineno))
            flags.add(tag)

    var_map = {}
    for lineno, text in blocks.get("vars", ()):
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            vm = _VARMAP.match(part)
            if not vm:
                diags.append(Diagnostic(name, "vars", f"expected 'constant -> variable': {part!r}", lineno))
                continue
            var_map[vm.group(1)] = vm.group(2)

    diagram = []
    for lineno, text in blocks.get("diagram", ()):
        try:
            diagram.append(DiagramEquation.from_clause(parse_clause(text)))
        except (ParseError, ValueError) as exc:
            diags.append(Diagnostic(name, "diagram", str(exc), lineno))

    entry = TheoremEntry(
        name=name,
        positive_form=clauses("positive"),
        negated_form=clauses("negated"),
        diagram=tuple(diagram),
        skolem_symbols=tuple(skolems),
        cases=clauses("cases"),
        flags=frozenset(flags),
        var_map=var_map,
        line=raw["line"],
    )
    for label, value in (("positive", entry.positive_form), ("negated", entry.negated_form)):
        if not value and len(diags) == n_before:
            diags.append(Diagnostic(name, label, "missing or empty block", raw["line"]))
    return entry if len(diags) == n_before else None


def format_master_list(m: MasterList) -> str:
    """Render a master list back into the text format."""
    out: list = []
    for g in m.groups():
        out.append(f"{g.kind} {g.name}")
        out += [f"skolem: {s.render()}" for s in g.skolem_symbols]
        out.append("clauses:")
        out += [f"  {format_clause(c)}" for c in g.clauses]
        out.append("")
    for t in m.theorems:
        out.append(f"theorem {t.name}")
        if t.flags:
            out.append("flags: " + ", ".join(sorted(t.flags)))
        out += [f"skolem: {s.render()}" for s in t.skolem_symbols]
        if t.var_map:
            out.append("vars: " + ", ".join(f"{k} -> {v}" for k, v in t.var_map.items()))
        for label, clauses in (("positive", t.positive_form), ("negated", t.negated_form),
                               ("diagram", [d.clause() for d in t.diagram]),
                               ("cases", t.cases)):
            if clauses:
                out.append(f"{label}:")
                out += [f"  {format_clause(c)}" for c in clauses]
        out.append("")
    return "\n".join(out)


# --------------------------------------------------------------------------
# Skolemization
# --------------------------------------------------------------------------

class SkolemizationError(ValueError):
    pass


class MultipleDisjunctions(SkolemizationError):
    """More than one negated clause is a disjunction; the form must be checked by hand."""


def _constants(t: Term, out: set) -> set:
    if not is_var(t):
        if len(t) == 1:
            out.add(t[0])
        for a in t[1:]:
            _constants(a, out)
    return out


def clause_constants(c: Clause) -> set:
    out: set = set()
    for lit in c.literals:
        for a in lit.atom[1:]:
            _constants(a, out)
    return out


def _functions(t: Term, out: set) -> set:
    if not is_var(t) and len(t) > 1:
        out.add((t[0], len(t) - 1))
        for a in t[1:]:
            _functions(a, out)
    return out


def clause_functions(c: Clause) -> set:
    out: set = set()
    for lit in c.literals:
        for a in lit.atom[1:]:
            _functions(a, out)
    return out


def _variable_for(entry: TheoremEntry, constant: str) -> str:
    return entry.var_map.get(constant, "x" + constant)


def skolemize_negated(entry: TheoremEntry) -> tuple:
    """Compute the positive form of a theorem from its negated form.

    Ground unit clauses of the negated form are hypotheses (or a negated goal
    literal); their complements are disjoined.  At most one clause may be a
    disjunction or contain variables: its variables are the witnesses of the
    goal, replaced by the entry's Skolem symbols in order of first
    occurrence, and the result has one clause per literal of that clause.
    """
    units, goal = [], None
    for c in entry.negated_form:
        if c.is_unit and not any(is_var(a) for a in _all_args(c.literals[0])):
            units.append(c.literals[0])
        elif goal is None:
            goal = c
        else:
            raise MultipleDisjunctions(f"{entry.name}: more than one disjunctive negated clause")

    constants: set = set()
    for c in entry.negated_form:
        constants |= clause_constants(c)
    for k, v in entry.var_map.items():
        if k not in constants:
            raise SkolemizationError(f"{entry.name}: annotated constant {k!r} does not occur")
        if not is_var_name(v):
            raise SkolemizationError(f"{entry.name}: {v!r} is not a variable name")
    names = {c: _variable_for(entry, c) for c in constants}

    witnesses: list = []
    if goal is not None:
        for lit in goal.literals:
            for a in lit.atom[1:]:
                _collect_vars(a, witnesses)
    if len(witnesses) > len(entry.skolem_symbols):
        raise SkolemizationError(
            f"{entry.name}: {len(witnesses)} witness(es) but "
            f"{len(entry.skolem_symbols)} Skolem symbol(s)")
    skolem_terms: dict = {}
    for w, sym in zip(witnesses, entry.skolem_symbols):
        if len(sym.arg_order) != sym.arity:
            raise SkolemizationError(f"{entry.name}: {sym.name} needs an argument order")
        unknown = [arg for arg in sym.arg_order if arg not in constants]
        if unknown:
            raise SkolemizationError(
                f"{entry.name}: Skolem argument(s) {', '.join(unknown)} are not constants")
        skolem_terms[w] = (sym.name, *(names[arg] for arg in sym.arg_order))

    def conv(t: Term) -> Term:
        if is_var(t):
            return skolem_terms[t]
        if len(t) == 1:
            return names[t[0]]
        return (t[0], *(conv(a) for a in t[1:]))

    def flip(lit: Literal) -> Literal:
        return Literal(not lit.positive, (lit.atom[0], *(conv(a) for a in lit.atom[1:])))

    base = tuple(flip(l) for l in units)
    if goal is None:
        return (Clause(base),)
    return tuple(Clause(base + (flip(l),)) for l in goal.literals)


def _all_args(lit: Literal) -> list:
    out: list = []
    for a in lit.atom[1:]:
        _collect_vars(a, out)
    return out


def _collect_vars(t: Term, out: list) -> list:
    if is_var(t):
        if t not in out:
            out.append(t)
    else:
        for a in t[1:]:
            _collect_vars(a, out)
    return out


def same_clauses(a: Sequence[Clause], b: Sequence[Clause]) -> bool:
    """Equal as multisets of clauses up to variable renaming and literal order."""
    if len(a) != len(b):
        return False
    rest = list(b)
    for c in a:
        for i, d in enumerate(rest):
            if variant(c, d):
                del rest[i]
                break
        else:
            return False
    return True


# --------------------------------------------------------------------------
# Checking
# --------------------------------------------------------------------------

@dataclass
class Violation:
    entry: str
    check: str  # skolemization | diagram | skolem-symbols | order
    message: str

    def __str__(self):
        return f"{self.entry}: [{self.check}] {self.message}"


@dataclass
class CheckReport:
    violations: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    entries_checked: int = 0

    @property
    def clean(self) -> bool:
        return not self.violations

    def render(self) -> str:
        lines = [f"checked {self.entries_checked} entries: "
                 f"{len(self.violations)} violation(s), {len(self.warnings)} warning(s)"]
        lines += [f"  VIOLATION {v}" for v in self.violations]
        lines += [f"  warning   {w}" for w in self.warnings]
        return "\n".join(lines)


def check_master_list(m: MasterList) -> CheckReport:
    report = CheckReport()
    _check_skolem_symbols(m, report)
    for t in m.theorems:
        report.entries_checked += 1
        _check_skolemization(t, report)
        _check_diagram(t, report)
    report.entries_checked += len(m.groups())
    return report


def _check_skolemization(t: TheoremEntry, report: CheckReport):
    if "manual_skolemization" in t.flags:
        report.warnings.append(f"{t.name}: positive form checked manually")
        return
    try:
        computed = skolemize_negated(t)
    except MultipleDisjunctions as exc:
        report.warnings.append(f"{exc}; recorded positive form used")
        return
    except SkolemizationError as exc:
        report.violations.append(Violation(t.name, "skolemization", str(exc)))
        return
    if not same_clauses(computed, t.positive_form):
        shown = " ; ".join(format_clause(c) for c in computed)
        report.violations.append(Violation(
            t.name, "skolemization",
            f"positive form does not match the Skolemized negated form (expected {shown})"))


def _check_diagram(t: TheoremEntry, report: CheckReport):
    negated: set = set()
    for c in t.negated_form:
        negated |= clause_constants(c)
    defined: dict = {}
    right_sides: set = set()
    for k, eq in enumerate(t.diagram):
        right_sides |= _constants(eq.definition, set())
        c = eq.new_constant
        if c in negated:
            report.violations.append(Violation(
                t.name, "diagram", f"equation {k + 1}: {c} already occurs in the negated form"))
        if c in defined:
            report.violations.append(Violation(
                t.name, "diagram", f"equation {k + 1}: {c} is defined twice"))
        if c in right_sides:
            report.violations.append(Violation(
                t.name, "diagram",
                f"equation {k + 1}: {c} is used on the right side of this or an earlier "
                f"equation before its introduction"))
        defined[c] = k


def _check_skolem_symbols(m: MasterList, report: CheckReport):
    introduced: dict = {}  # name -> (entry, arity, position)
    order = [*m.groups(), *m.theorems]
    for pos, e in enumerate(order):
        for sym in e.skolem_symbols:
            if sym.name in introduced:
                first = introduced[sym.name][0]
                report.violations.append(Violation(
                    e.name, "skolem-symbols",
                    f"{sym.name} is introduced again (already introduced by {first})"))
                continue
            introduced[sym.name] = (e.name, sym.arity, pos)

    for pos, e in enumerate(order):
        if isinstance(e, AxiomGroup):
            parts = [("clauses", e.clauses, True)]
        else:
            parts = [("negated", e.negated_form, False),
                     ("diagram", [d.clause() for d in e.diagram], False),
                     ("cases", e.cases, False),
                     ("positive", e.positive_form, True)]
        for label, clauses, own_ok in parts:
            used: set = set()
            for c in clauses:
                used |= clause_functions(c)
            for name, arity in sorted(used):
                if name not in introduced:
                    report.violations.append(Violation(
                        e.name, "skolem-symbols", f"{name}/{arity} in {label} is never introduced"))
                    continue
                owner, true_arity, at = introduced[name]
                if arity != true_arity:
                    report.violations.append(Violation(
                        e.name, "skolem-symbols",
                        f"{name} used with arity {arity} in {label}, introduced as {true_arity}"))
                if at > pos or (at == pos and not own_ok):
                    check = "order" if label == "positive" else "skolem-symbols"
                    report.violations.append(Violation(
                        e.name, check, f"{name} used in {label} before its introduction by {owner}"))


# --------------------------------------------------------------------------
# Problem building
# --------------------------------------------------------------------------

REFLEXIVITY = "x = x."


def build_problem(m: MasterList, name: str, use_diagram: bool = False,
                  use_cases: bool = False, hints: Optional[Iterable[Clause]] = None,
                  settings: Optional[Settings] = None,
                  assumed: Optional[Iterable[str]] = None) -> ProblemSpec:
    """The input problem for theorem ``name``.

    sos holds the negated form (plus diagram equations and case clauses on
    request); usable holds every axiom and definition and the positive forms
    of all earlier theorems.  Diagram equations are also installed as
    demodulators rewriting each construction to its name.  ``assumed``
    restricts the earlier theorems to the given names.
    """
    idx = m.index(name)
    entry = m.theorems[idx]
    allowed = None if assumed is None else set(assumed)
    usable: list = []
    for g in m.groups():
        usable += [Clause(c.literals) for c in g.clauses]
    refl = parse_clause(REFLEXIVITY)
    if not any(variant(refl, c) for c in usable):
        usable.append(refl)
    for t in m.theorems[:idx]:
        if allowed is None or t.name in allowed:
            usable += [Clause(c.literals) for c in t.positive_form]
    sos = [Clause(c.literals) for c in entry.negated_form]
    demods: list = []
    if use_diagram:
        sos += [d.clause() for d in entry.diagram]
        demods = [d.demodulator() for d in entry.diagram]
    if use_cases:
        sos += [Clause(c.literals) for c in entry.cases]
    return ProblemSpec(
        name=name,
        sos=sos,
        usable=usable,
        hints=[Clause(c.literals) for c in (hints or ())],
        demodulators=demods,
        settings=settings or Settings(),
    )


def select_theorems(m: MasterList, names: Sequence[str] = (),
                    chapters: Sequence[str] = (), flags: Sequence[str] = ()) -> list:
    """Theorem names matching any selector, in master-list order; no selector means all."""
    out = []
    for t in m.theorems:
        if not (names or chapters or flags):
            out.append(t.name)
        elif t.name in names or t.chapter in chapters or (set(flags) & t.flags):
            out.append(t.name)
    unknown = set(names) - set(m.names)
    if unknown:
        raise KeyError(f"unknown theorem(s): {', '.join(sorted(unknown))}")
    return out


__all__ = [
    "AxiomGroup", "CheckReport", "DIFFICULTIES", "DiagramEquation", "Diagnostic",
    "MasterList", "MasterListError", "MultipleDisjunctions", "SkolemSymbol",
    "SkolemizationError", "TheoremEntry", "Violation", "build_problem",
    "check_master_list", "clause_constants", "clause_functions", "format_master_list",
    "load_master_list", "parse_master_list", "same_clauses", "select_theorems",
    "skolemize_negated", "starter_corpus",
]
