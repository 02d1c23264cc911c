"""First-order terms, literals and clauses in OTTER-style concrete syntax.

Representation
--------------
A *term* is either a variable, represented by a plain ``str``, or an
application, represented by a tuple ``(symbol, arg1, ..., argn)``.  A constant
is a zero-arity application such as ``("a",)``.  Atoms use the same tuple shape
with the predicate symbol in front; equality is the predicate ``"="``.

An identifier names a variable iff its first character is one of
``x y z w u v``.  Everything here is immutable, so values may be shared freely.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Optional, Union

Term = Union[str, tuple]
Atom = tuple
Substitution = dict  # variable name -> Term

VARIABLE_INITIALS = frozenset("xyzwuv")
EQ = "="
EMPTY_CLAUSE_TOKEN = "$F"

ORIGINS = (
    "input-sos",
    "input-usable",
    "input-demodulator",
    "input-hot",
    "input-passive",
    "derived",
)


def is_var(t: Term) -> bool:
    return isinstance(t, str)


def is_var_name(name: str) -> bool:
    return name[:1] in VARIABLE_INITIALS


class Literal(NamedTuple):
    positive: bool
    atom: Atom

    @property
    def predicate(self) -> str:
        return self.atom[0]

    @property
    def key(self) -> tuple:
        return (self.positive, self.atom[0], len(self.atom) - 1)

    @property
    def is_equality(self) -> bool:
        return self.atom[0] == EQ

    def negate(self) -> "Literal":
        return Literal(not self.positive, self.atom)

    def __str__(self) -> str:
        return format_literal(self)


@dataclass(eq=False)
class Clause:
    """A disjunction of literals plus derivation metadata.

    Equality and hashing look at the literal sequence only; ids, weights and
    parentage are bookkeeping.
    """

    literals: tuple
    id: int = 0
    origin: str = "derived"
    rule: Optional[str] = None
    parents: tuple = ()
    weight: int = 0
    demods: tuple = ()
    extra: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.literals = tuple(self.literals)

    def __eq__(self, other):
        if not isinstance(other, Clause):
            return NotImplemented
        return self.literals == other.literals

    def __hash__(self):
        return hash(self.literals)

    def __len__(self):
        return len(self.literals)

    def __iter__(self) -> Iterator[Literal]:
        return iter(self.literals)

    def __str__(self):
        return format_clause(self)

    @property
    def is_empty(self) -> bool:
        return not self.literals

    @property
    def is_unit(self) -> bool:
        return len(self.literals) == 1

    @property
    def is_positive(self) -> bool:
        return all(lit.positive for lit in self.literals)

    @property
    def is_negative(self) -> bool:
        return all(not lit.positive for lit in self.literals)

    @property
    def is_input(self) -> bool:
        return self.origin != "derived"

    def with_literals(self, literals) -> "Clause":
        return Clause(tuple(literals))


# --------------------------------------------------------------------------
# Printing
# --------------------------------------------------------------------------

def format_term(t: Term) -> str:
    if isinstance(t, str):
        return t
    if len(t) == 1:
        return t[0]
    return t[0] + "(" + ",".join(format_term(a) for a in t[1:]) + ")"


def format_literal(lit: Literal) -> str:
    atom = lit.atom
    if atom[0] == EQ:
        op = " = " if lit.positive else " != "
        return format_term(atom[1]) + op + format_term(atom[2])
    text = format_term(atom)
    return text if lit.positive else "-" + text


def format_clause(c: Union[Clause, Iterable[Literal]]) -> str:
    lits = c.literals if isinstance(c, Clause) else tuple(c)
    if not lits:
        return EMPTY_CLAUSE_TOKEN + "."
    return " | ".join(format_literal(lit) for lit in lits) + "."


# --------------------------------------------------------------------------
# Parsing
# --------------------------------------------------------------------------

class ParseError(ValueError):
    def __init__(self, message: str, position: int = 0, text: str = ""):
        self.message = message
        self.position = position
        self.text = text
        super().__init__(f"{message} (at column {position})")


class SymbolTable:
    """Arity and kind bookkeeping shared by all clauses of one problem."""

    def __init__(self):
        self.functions: dict[str, int] = {}
        self.predicates: dict[str, int] = {}

    def note(self, name: str, arity: int, kind: str, pos: int = 0, text: str = ""):
        own, other = (
            (self.functions, self.predicates) if kind == "function"
            else (self.predicates, self.functions)
        )
        if name in other:
            other_kind = "predicate" if kind == "function" else "function"
            raise ParseError(f"symbol {name!r} already used as a {other_kind}", pos, text)
        seen = own.setdefault(name, arity)
        if seen != arity:
            raise ParseError(
                f"arity clash for {name!r}: used with {seen} and {arity} arguments",
                pos, text)


_TOKEN = re.compile(r"\s*(?:(?P<ident>[A-Za-z0-9_]+)|(?P<op>!=|\$F|[-|=(),.]))")


def _tokenize(text: str):
    pos = 0
    tokens = []
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip() == "":
                break
            col = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[col]!r}", col, text)
        kind = "ident" if m.group("ident") is not None else "op"
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, value=None):
        tok = self.toks[self.i]
        if value is not None and tok[1] != value:
            what = "end of input" if tok[0] == "end" else repr(tok[1])
            raise ParseError(f"expected {value!r}, found {what}", tok[2], self.text)
        self.i += 1
        return tok

    def term(self) -> Term:
        kind, value, pos = self.take()
        if kind != "ident":
            what = "end of input" if kind == "end" else repr(value)
            raise ParseError(f"expected a term, found {what}", pos, self.text)
        if self.peek()[1] == "(":
            if is_var_name(value):
                raise ParseError(f"variable {value!r} applied to arguments", pos, self.text)
            return (value, *self.args())
        if is_var_name(value):
            return value
        return (value,)

    def args(self) -> list:
        self.take("(")
        args = [self.term()]
        while self.peek()[1] == ",":
            self.take(",")
            args.append(self.term())
        self.take(")")
        return args

    def literal(self) -> Literal:
        positive = True
        if self.peek()[1] == "-":
            self.take("-")
            positive = False
        kind, value, pos = self.peek()
        if kind != "ident":
            what = "end of input" if kind == "end" else repr(value)
            raise ParseError(f"expected a literal, found {what}", pos, self.text)
        left = self.term()
        op = self.peek()[1]
        if op in ("=", "!="):
            self.take()
            right = self.term()
            eq_positive = (op == "=") == positive
            return Literal(eq_positive, (EQ, left, right))
        if isinstance(left, str):
            raise ParseError(f"variable {left!r} used as an atom", pos, self.text)
        return Literal(positive, left)

    def clause(self) -> tuple:
        if self.peek()[1] == "$F":
            self.take()
            self.take(".")
            self._end()
            return ()
        lits = [self.literal()]
        while self.peek()[1] == "|":
            self.take("|")
            lits.append(self.literal())
        self.take(".")
        self._end()
        return tuple(lits)

    def _end(self):
        kind, value, pos = self.peek()
        if kind != "end":
            raise ParseError(f"trailing input {value!r}", pos, self.text)


def _parse_literals(text: str, symbols: Optional[SymbolTable]) -> tuple:
    lits = _Parser(text).clause()
    if symbols is not None:
        for lit in lits:
            _register_literal(lit, symbols, text)
    return lits


def _register_literal(lit: Literal, symbols: SymbolTable, text: str):
    atom = lit.atom
    if atom[0] != EQ:
        symbols.note(atom[0], len(atom) - 1, "predicate", text.find(atom[0]), text)
    for arg in atom[1:]:
        _register_term(arg, symbols, text)


def _register_term(t: Term, symbols: SymbolTable, text: str):
    if isinstance(t, str):
        return
    symbols.note(t[0], len(t) - 1, "function", text.find(t[0]), text)
    for arg in t[1:]:
        _register_term(arg, symbols, text)


def parse_clause(text: str, symbols: Optional[SymbolTable] = None, **meta) -> Clause:
    """Parse one clause such as ``-T(x,y,z) | T(z,y,x).``

    ``symbols``, when given, is checked and extended so that arities stay
    consistent across a whole problem.
    """
    if symbols is None:
        symbols = SymbolTable()
    return Clause(_parse_literals(text.strip(), symbols), **meta)


def parse_term(text: str) -> Term:
    p = _Parser(text.strip())
    t = p.term()
    p._end()
    return t


def parse_literal(text: str) -> Literal:
    text = text.strip()
    if text.endswith("."):
        text = text[:-1]
    p = _Parser(text)
    lit = p.literal()
    p._end()
    return lit


# --------------------------------------------------------------------------
# Term utilities
# --------------------------------------------------------------------------

def term_vars(t: Term, out: Optional[list] = None) -> list:
    """Variables of ``t`` in order of first occurrence (no duplicates)."""
    if out is None:
        out = []
    if isinstance(t, str):
        if t not in out:
            out.append(t)
    else:
        for a in t[1:]:
            term_vars(a, out)
    return out


def clause_vars(lits: Iterable[Literal]) -> list:
    out: list = []
    for lit in lits:
        term_vars(lit.atom, out)
    return out


def is_ground(t: Term) -> bool:
    if isinstance(t, str):
        return False
    return all(is_ground(a) for a in t[1:])


def symbol_count(t: Term) -> int:
    if isinstance(t, str):
        return 1
    n = 1
    for a in t[1:]:
        n += symbol_count(a)
    return n


def symbols_of(t: Term, out: Optional[set] = None) -> set:
    if out is None:
        out = set()
    if not isinstance(t, str):
        out.add(t[0])
        for a in t[1:]:
            symbols_of(a, out)
    return out


def walk(t: Term, s: Substitution) -> Term:
    while isinstance(t, str) and t in s:
        t = s[t]
    return t


def apply(t: Term, s: Substitution) -> Term:
    """Apply a (possibly triangular) substitution all the way down."""
    if not s:
        return t
    if isinstance(t, str):
        if t in s:
            return apply(s[t], s)
        return t
    if len(t) == 1:
        return t
    return (t[0], *[apply(a, s) for a in t[1:]])


def substitute(t: Term, s: Substitution) -> Term:
    """Replace variables simultaneously, in one pass.

    This is the right reading of a matching substitution, whose range may
    mention the same variable names as its domain.
    """
    if isinstance(t, str):
        return s.get(t, t)
    if len(t) == 1:
        return t
    return (t[0], *[substitute(a, s) for a in t[1:]])


def apply_literal(lit: Literal, s: Substitution) -> Literal:
    return Literal(lit.positive, apply(lit.atom, s)) if s else lit


def apply_clause(lits: Iterable[Literal], s: Substitution) -> tuple:
    return tuple(apply_literal(l, s) for l in lits)


def normalize(s: Substitution) -> Substitution:
    """Fully resolve a triangular substitution so that it is idempotent."""
    return {v: apply(t, s) for v, t in s.items()}


def _occurs(v: str, t: Term, s: Substitution) -> bool:
    t = walk(t, s)
    if isinstance(t, str):
        return t == v
    for a in t[1:]:
        if _occurs(v, a, s):
            return True
    return False


def _unify(a: Term, b: Term, s: Substitution) -> bool:
    a = walk(a, s)
    b = walk(b, s)
    if a == b:
        return True
    if isinstance(a, str):
        if _occurs(a, b, s):
            return False
        s[a] = b
        return True
    if isinstance(b, str):
        if _occurs(b, a, s):
            return False
        s[b] = a
        return True
    if a[0] != b[0] or len(a) != len(b):
        return False
    for x, y in zip(a[1:], b[1:]):
        if not _unify(x, y, s):
            return False
    return True


def unify(a: Term, b: Term, s: Optional[Substitution] = None) -> Optional[Substitution]:
    """Most general unifier of two terms or atoms, extending ``s``.

    Returns a fresh triangular substitution or ``None`` on failure; use
    :func:`normalize` for an idempotent view.
    """
    s = dict(s) if s else {}
    return s if _unify(a, b, s) else None


def _match(p: Term, t: Term, s: Substitution) -> bool:
    if isinstance(p, str):
        bound = s.get(p)
        if bound is None:
            s[p] = t
            return True
        return bound == t
    if isinstance(t, str) or p[0] != t[0] or len(p) != len(t):
        return False
    for x, y in zip(p[1:], t[1:]):
        if not _match(x, y, s):
            return False
    return True


def match(pattern: Term, target: Term, s: Optional[Substitution] = None) -> Optional[Substitution]:
    """One-way matching: variables of ``target`` behave as constants."""
    s = dict(s) if s else {}
    return s if _match(pattern, target, s) else None


def match_onto(pattern, target, s: Optional[Substitution] = None) -> Optional[Substitution]:
    """Match a term, atom, literal or clause onto another of the same kind.

    For clauses the literals are matched position by position.
    """
    if isinstance(pattern, Clause):
        pattern, target = pattern.literals, target.literals
    if isinstance(pattern, Literal):
        if pattern.positive != target.positive:
            return None
        return match(pattern.atom, target.atom, s)
    if isinstance(pattern, tuple) and pattern and isinstance(pattern[0], Literal):
        if len(pattern) != len(target):
            return None
        s = dict(s) if s else {}
        for p, t in zip(pattern, target):
            if p.positive != t.positive or not _match(p.atom, t.atom, s):
                return None
        return s
    return match(pattern, target, s)


def rename_term(t: Term, mapping: dict) -> Term:
    if isinstance(t, str):
        return mapping.get(t, t)
    if len(t) == 1:
        return t
    return (t[0], *[rename_term(a, mapping) for a in t[1:]])


def rename_literals(lits: Iterable[Literal], mapping: dict) -> tuple:
    return tuple(Literal(l.positive, rename_term(l.atom, mapping)) for l in lits)


def suffix_vars(lits: tuple, suffix: str) -> tuple:
    """Cheap renaming apart used inside inference: append ``suffix`` to every variable."""
    mapping = {v: v + suffix for v in clause_vars(lits)}
    return rename_literals(lits, mapping) if mapping else lits


def fresh_var_names() -> Iterator[str]:
    yield from ("x", "y", "z", "u", "v", "w")
    i = 6
    while True:
        yield f"v{i}"
        i += 1


def normalize_vars(lits: tuple) -> tuple:
    """Rename variables to x, y, z, u, v, w, v6, ... in order of occurrence."""
    vs = clause_vars(lits)
    if not vs:
        return lits
    names = fresh_var_names()
    mapping = {v: next(names) for v in vs}
    if all(k == v for k, v in mapping.items()):
        return lits
    return rename_literals(lits, mapping)


def rename_apart(c: Clause, taken: Iterable[str]) -> Clause:
    """A variant of ``c`` whose variables avoid every name in ``taken``."""
    taken = set(taken)
    mapping = {}
    used = set(taken)
    cvars = clause_vars(c.literals)
    used.update(cvars)
    for v in cvars:
        if v in taken:
            i = 1
            while f"{v}{i}" in used:
                i += 1
            mapping[v] = f"{v}{i}"
            used.add(mapping[v])
    if not mapping:
        return c
    return Clause(rename_literals(c.literals, mapping), id=c.id, origin=c.origin,
                  rule=c.rule, parents=c.parents, weight=c.weight, demods=c.demods)


def merge_duplicates(lits: Iterable[Literal]) -> tuple:
    """Drop repeated identical literals, keeping the first occurrence."""
    out = []
    seen = set()
    for lit in lits:
        if lit not in seen:
            seen.add(lit)
            out.append(lit)
    return tuple(out)
