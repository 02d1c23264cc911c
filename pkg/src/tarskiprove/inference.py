"""Inference rules and redundancy checks.

Every rule works on :class:`~tarskiprove.kernel.Clause` values and returns
:class:`InferenceResult` records whose conclusions carry the rule name and
parent ids but no id or weight yet.  The partner clause is renamed apart
internally, so callers may pass the same clause twice.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

from .kernel import (
    EQ,
    Clause,
    Literal,
    Term,
    _match,
    _unify,
    apply,
    apply_clause,
    clause_vars,
    format_literal,
    merge_duplicates,
    normalize,
    normalize_vars,
    symbol_count,
    substitute,
    suffix_vars,
    term_vars,
)

DEFAULT_REWRITE_LIMIT = 1000


@dataclass
class InferenceResult:
    conclusion: Clause
    rule: str
    parents: tuple
    unifier: dict = field(default_factory=dict, repr=False)


class RewriteLimitExceeded(RuntimeError):
    pass


def _finish(lits: Iterable[Literal], s: dict) -> tuple:
    return normalize_vars(merge_duplicates(apply_clause(lits, s)))


def _result(lits: tuple, rule: str, parents: tuple, s: dict) -> InferenceResult:
    return InferenceResult(Clause(lits, rule=rule, parents=parents), rule, parents, s)


# --------------------------------------------------------------------------
# Resolution
# --------------------------------------------------------------------------

def resolve_pair(lits1: tuple, i: int, lits2: tuple, j: int) -> Optional[tuple]:
    """Resolve literal ``i`` of ``lits1`` against literal ``j`` of ``lits2``.

    ``lits2`` must already be renamed apart.  Returns ``(conclusion, mgu)``.
    """
    a, b = lits1[i], lits2[j]
    if a.positive == b.positive:
        return None
    s: dict = {}
    if not _unify(a.atom, b.atom, s):
        return None
    rest = lits1[:i] + lits1[i + 1:] + lits2[:j] + lits2[j + 1:]
    return _finish(rest, s), s


def binary_resolve(c1: Clause, c2: Clause) -> list:
    """All binary resolvents of ``c1`` and ``c2``, one per clashing literal pair."""
    l1 = c1.literals
    l2 = suffix_vars(c2.literals, "'")
    out = []
    for i, a in enumerate(l1):
        for j, b in enumerate(l2):
            if a.positive == b.positive or a.atom[0] != b.atom[0]:
                continue
            r = resolve_pair(l1, i, l2, j)
            if r is not None:
                out.append(_result(r[0], "binary", (c1.id, c2.id), r[1]))
    return out


def unit_resolve(c1: Clause, c2: Clause) -> list:
    """Binary resolution restricted to pairs where one parent is a unit."""
    if not (c1.is_unit or c2.is_unit):
        return []
    out = []
    longest = max(len(c1), len(c2))
    for r in binary_resolve(c1, c2):
        if len(r.conclusion) < longest or longest == 1:
            r.rule = r.conclusion.rule = "unit"
            out.append(r)
    return out


def hyper_search(nucleus: tuple, candidates: Sequence[Sequence[tuple]]) -> Iterator[tuple]:
    """Backtracking core of positive hyperresolution.

    ``candidates[k]`` lists ``(satellite_literals, literal_index, tag)`` for the
    k-th negative literal of ``nucleus``; satellite literals must already be
    renamed apart from the nucleus and from each other.  Yields
    ``(conclusion, tags, mgu)``.
    """
    negs = [i for i, lit in enumerate(nucleus) if not lit.positive]
    if not negs or len(candidates) != len(negs):
        return
    keep = [lit for lit in nucleus if lit.positive]
    chosen: list = []

    def search(k: int, s: dict):
        if k == len(negs):
            lits = list(keep)
            for sat, j, _ in chosen:
                lits.extend(sat[:j] + sat[j + 1:])
            yield _finish(lits, s), tuple(tag for _, _, tag in chosen), s
            return
        atom = nucleus[negs[k]].atom
        for sat, j, tag in candidates[k]:
            s2 = dict(s)
            if _unify(atom, sat[j].atom, s2):
                chosen.append((sat, j, tag))
                yield from search(k + 1, s2)
                chosen.pop()

    yield from search(0, {})


def hyper_resolvents(nucleus: Clause, satellites: Sequence[Clause]) -> list:
    """Every hyperresolvent using ``satellites[k]`` for the k-th negative literal."""
    negs = [lit for lit in nucleus.literals if not lit.positive]
    if not negs or len(satellites) != len(negs):
        return []
    if any(not sat.is_positive or sat.is_empty for sat in satellites):
        return []
    cands = []
    for k, sat in enumerate(satellites):
        lits = suffix_vars(sat.literals, f"'{k}")
        cands.append([(lits, j, sat.id) for j, lit in enumerate(lits)
                      if lit.atom[0] == negs[k].atom[0]])
    parents = (nucleus.id, *(sat.id for sat in satellites))
    out = []
    for lits, _, s in hyper_search(nucleus.literals, cands):
        out.append(_result(lits, "hyper", parents, s))
    return out


def hyper_resolve(nucleus: Clause, satellites: Sequence[Clause]) -> Optional[InferenceResult]:
    """First hyperresolvent of the nucleus with the satellites, or ``None``."""
    res = hyper_resolvents(nucleus, satellites)
    return res[0] if res else None


# --------------------------------------------------------------------------
# Paramodulation
# --------------------------------------------------------------------------

def subterm_positions(t: Term, path: tuple = ()) -> Iterator[tuple]:
    """Yield ``(path, subterm)`` for every non-variable subterm of ``t``."""
    if isinstance(t, str):
        return
    yield path, t
    for k, arg in enumerate(t[1:], 1):
        yield from subterm_positions(arg, path + (k,))


def atom_positions(atom: tuple) -> Iterator[tuple]:
    """Non-variable argument positions of an atom; the atom itself is excluded."""
    for k, arg in enumerate(atom[1:], 1):
        yield from subterm_positions(arg, (k,))


def replace_at(t: Term, path: tuple, new: Term) -> Term:
    if not path:
        return new
    k = path[0]
    return t[:k] + (replace_at(t[k], path[1:], new),) + t[k + 1:]


def para_pair(from_lits: tuple, i: int, left_to_right: bool,
              into_lits: tuple, j: int, path: tuple) -> Optional[tuple]:
    """One paramodulant: rewrite position ``path`` of literal ``j`` of the
    (renamed-apart) ``into_lits`` with equality ``i`` of ``from_lits``."""
    eq = from_lits[i].atom
    s_side, t_side = (eq[1], eq[2]) if left_to_right else (eq[2], eq[1])
    target = into_lits[j]
    u = _get(target.atom, path)
    s: dict = {}
    if not _unify(s_side, u, s):
        return None
    new_lit = Literal(target.positive, replace_at(target.atom, path, t_side))
    lits = into_lits[:j] + (new_lit,) + into_lits[j + 1:] + from_lits[:i] + from_lits[i + 1:]
    return _finish(lits, s), s


def _get(t: Term, path: tuple) -> Term:
    for k in path:
        t = t[k]
    return t


def paramodulate(from_c: Clause, into_c: Clause, from_vars: bool = True) -> list:
    """All paramodulants from the positive equalities of ``from_c`` into ``into_c``.

    Both orientations of each equation are used.  Paramodulation into a
    variable position never happens; ``from_vars=False`` also forbids using an
    equation side that is a bare variable.
    """
    fl = from_c.literals
    il = suffix_vars(into_c.literals, "'")
    out = []
    for i, lit in enumerate(fl):
        if not lit.positive or lit.atom[0] != EQ:
            continue
        for ltr in (True, False):
            side = lit.atom[1] if ltr else lit.atom[2]
            if isinstance(side, str) and not from_vars:
                continue
            for j, target in enumerate(il):
                for path, _ in atom_positions(target.atom):
                    r = para_pair(fl, i, ltr, il, j, path)
                    if r is not None:
                        out.append(_result(r[0], "para", (from_c.id, into_c.id), r[1]))
    return out


# --------------------------------------------------------------------------
# Factoring
# --------------------------------------------------------------------------

def factor_literals(lits: tuple) -> list:
    out = []
    for i in range(len(lits)):
        for j in range(i + 1, len(lits)):
            a, b = lits[i], lits[j]
            if a.positive != b.positive or a.atom[0] != b.atom[0]:
                continue
            s: dict = {}
            if _unify(a.atom, b.atom, s):
                out.append((_finish(lits[:j] + lits[j + 1:], s), s))
    return out


def factor(c: Clause) -> list:
    """One factor per unifiable pair of same-sign literals."""
    return [_result(lits, "factor", (c.id,), s) for lits, s in factor_literals(c.literals)]


# --------------------------------------------------------------------------
# Subsumption
# --------------------------------------------------------------------------

def subsumes_literals(general: tuple, specific: tuple) -> bool:
    n = len(general)
    if n > len(specific):
        return False
    if n == 1:
        g = general[0]
        for lit in specific:
            if lit.positive == g.positive and lit.atom[0] == g.atom[0] \
                    and _match(g.atom, lit.atom, {}):
                return True
        return False
    # candidates per general literal, matched in isolation; most constrained first
    cands = []
    for g in general:
        c = [idx for idx, lit in enumerate(specific)
             if lit.positive == g.positive and lit.atom[0] == g.atom[0]
             and _match(g.atom, lit.atom, {})]
        if not c:
            return False
        cands.append((len(c), g, c))
    cands.sort(key=lambda e: e[0])
    used = [False] * len(specific)

    def search(k: int, s: dict) -> bool:
        if k == n:
            return True
        _, g, c = cands[k]
        for idx in c:
            if used[idx]:
                continue
            s2 = dict(s)
            if _match(g.atom, specific[idx].atom, s2):
                used[idx] = True
                if search(k + 1, s2):
                    return True
                used[idx] = False
        return False

    return search(0, {})


def subsumes(general: Clause, specific: Clause) -> bool:
    """Theta-subsumption: some instance of ``general`` is a sub-multiset of ``specific``."""
    return subsumes_literals(general.literals, specific.literals)


def variant(a: Clause, b: Clause) -> bool:
    """Equal up to variable renaming and literal order."""
    return (len(a) == len(b)
            and subsumes_literals(a.literals, b.literals)
            and subsumes_literals(b.literals, a.literals))


def is_tautology(lits: tuple) -> bool:
    seen = set(lits)
    for lit in lits:
        if lit.positive and lit.atom[0] == EQ and lit.atom[1] == lit.atom[2]:
            return True
        if lit.positive and Literal(False, lit.atom) in seen:
            return True
    return False


# --------------------------------------------------------------------------
# Demodulation
# --------------------------------------------------------------------------

class Demodulator:
    """A unit positive equation used as a left-to-right rewrite rule."""

    def __init__(self, clause: Clause, check_order: bool = False):
        lits = clause.literals
        if len(lits) != 1 or not lits[0].positive or lits[0].atom[0] != EQ:
            raise ValueError(f"demodulator must be a positive unit equality: {clause}")
        _, lhs, rhs = lits[0].atom
        if isinstance(lhs, str):
            raise ValueError(f"demodulator left side is a variable: {clause}")
        if not set(term_vars(rhs)) <= set(term_vars(lhs)):
            raise ValueError(f"right side has variables missing on the left: {clause}")
        if check_order and not _heavier(lhs, rhs):
            raise ValueError(f"demodulator is not oriented toward a simpler term: {clause}")
        self.clause = clause
        self.lhs = lhs
        self.rhs = rhs

    @property
    def id(self) -> int:
        return self.clause.id

    def __repr__(self):
        return f"Demodulator({format_literal(self.clause.literals[0])})"


def _heavier(lhs: Term, rhs: Term) -> bool:
    wl, wr = symbol_count(lhs), symbol_count(rhs)
    if wl != wr:
        return wl > wr
    return repr(lhs) > repr(rhs)


class _Rewriter:
    def __init__(self, demods: Sequence[Demodulator], limit: int):
        self.demods = demods
        self.limit = limit
        self.steps = 0
        self.used: set = set()

    def term(self, t: Term) -> Term:
        if isinstance(t, str):
            return t
        if len(t) > 1:
            args = tuple(self.term(a) for a in t[1:])
            t = (t[0], *args)
        for d in self.demods:
            if d.lhs[0] != t[0]:
                continue
            s: dict = {}
            if _match(d.lhs, t, s):
                self.steps += 1
                if self.steps > self.limit:
                    raise RewriteLimitExceeded(
                        f"more than {self.limit} rewrite steps; demodulators may not terminate")
                self.used.add(d.id)
                return self.term(substitute(d.rhs, s))
        return t


def demodulate_literals(lits: tuple, demods: Sequence[Demodulator],
                        limit: int = DEFAULT_REWRITE_LIMIT) -> tuple:
    """Rewrite to normal form; returns ``(literals, ids of demodulators used)``."""
    if not demods:
        return lits, ()
    rw = _Rewriter(demods, limit)
    out = tuple(Literal(l.positive, (l.atom[0], *(rw.term(a) for a in l.atom[1:])))
                for l in lits)
    used = tuple(d.id for d in demods if d.id in rw.used)
    return out, used


def demodulate(c: Clause, demods: Sequence[Demodulator],
               limit: int = DEFAULT_REWRITE_LIMIT) -> Clause:
    """Rewrite innermost-leftmost with the demodulators until nothing applies."""
    lits, used = demodulate_literals(c.literals, demods, limit)
    if not used:
        return c
    return Clause(lits, id=c.id, origin=c.origin, rule=c.rule, parents=c.parents,
                  weight=c.weight, demods=tuple(dict.fromkeys(c.demods + used)))
