"""Search strategies layered over the given-clause loop.

* the subformula strategy: every sos literal and its negation become hints;
* hints harvested from earlier proofs;
* case splits, either adjoined as a tautology ``A | -A`` or solved as two
  separate problems whose proofs are then welded into one refutation;
* lemma adjunction: intermediate goals from a book proof become hints and
  passive goals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

from .inference import variant
from .kernel import Clause, Literal, ParseError, format_clause, is_ground, merge_duplicates, parse_clause
from .saturation import (
    Proof,
    ProblemSpec,
    ProofStep,
    RunResult,
    parse_proof,
    search,
    verify_proof,
)


# --------------------------------------------------------------------------
# Hint sets
# --------------------------------------------------------------------------

@dataclass
class HintSet:
    """Hint clauses without variant duplicates, each with where it came from."""

    clauses: list = field(default_factory=list)
    provenance: list = field(default_factory=list)

    def add(self, clause: Clause, source: str = "manual") -> bool:
        if any(variant(clause, c) for c in self.clauses):
            return False
        self.clauses.append(Clause(clause.literals))
        self.provenance.append(source)
        return True

    def extend(self, clauses: Iterable[Clause], source: str = "manual") -> "HintSet":
        for c in clauses:
            self.add(c, source)
        return self

    def merged(self, other: "HintSet") -> "HintSet":
        out = HintSet(list(self.clauses), list(self.provenance))
        for c, src in zip(other.clauses, other.provenance):
            out.add(c, src)
        return out

    def __len__(self):
        return len(self.clauses)

    def __iter__(self):
        return iter(self.clauses)

    def to_text(self) -> str:
        lines = []
        for c, src in zip(self.clauses, self.provenance):
            lines.append(f"{format_clause(c)}  # {src}")
        return "\n".join(lines) + ("\n" if lines else "")


def negate_literal(lit: Literal) -> Literal:
    # for an equality this turns = into != and back
    return lit.negate()


def generate_subformula_hints(sos: Iterable[Clause]) -> HintSet:
    """Unit hints for every literal of every sos clause and for its negation."""
    hints = HintSet()
    for c in sos:
        for lit in c.literals:
            hints.add(Clause((lit,)), "subformula")
            hints.add(Clause((negate_literal(lit),)), "subformula")
    return hints


def _as_proof(proof_file: Union[Proof, str, Path]) -> Proof:
    if isinstance(proof_file, Proof):
        return proof_file
    if isinstance(proof_file, Path) or (isinstance(proof_file, str) and "\n" not in proof_file
                                        and Path(proof_file).is_file()):
        return parse_proof(Path(proof_file).read_text())
    return parse_proof(proof_file)


def extract_hints_from_proof(proof_file: Union[Proof, str, Path]) -> HintSet:
    """Every derived, non-empty clause of a proof, as hints.

    Accepts a :class:`Proof`, a path to a proof file, or proof text; a
    malformed file raises :class:`~tarskiprove.saturation.ProofFormatError`.
    """
    pf = _as_proof(proof_file)
    source = f"proof:{pf.problem}" if pf.problem else "proof"
    hints = HintSet()
    for step in pf.steps:
        if step.rule == "input" or step.clause.is_empty:
            continue
        hints.add(step.clause, source)
    return hints


def read_hints_file(path: Union[str, Path]) -> HintSet:
    """A hints sidecar: one clause per line, ``#`` comments allowed."""
    path = Path(path)
    hints = HintSet()
    for lineno, raw in enumerate(path.read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            hints.add(parse_clause(line), f"file:{path.name}")
        except ParseError as exc:
            raise ParseError(f"{path}:{lineno}: {exc.message}", exc.position, exc.text) from exc
    return hints


def write_hints_file(path: Union[str, Path], hints: HintSet) -> None:
    Path(path).write_text(hints.to_text())


def with_hints(p: ProblemSpec, hints: Iterable[Clause]) -> ProblemSpec:
    """``p`` with extra hints appended, skipping variants of hints it already has."""
    current = HintSet().extend(p.hints)
    current.extend(hints, "added")
    return p.copy(hints=list(current.clauses))


# --------------------------------------------------------------------------
# Cases
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CaseSplit:
    atom: Literal

    def __post_init__(self):
        if not self.atom.positive:
            object.__setattr__(self, "atom", self.atom.negate())

    def clause(self) -> Clause:
        return Clause((self.atom, self.atom.negate()))

    @classmethod
    def parse(cls, text: str) -> "CaseSplit":
        c = parse_clause(text)
        if not c.is_unit:
            raise ValueError("a case split names a single literal")
        return cls(c.literals[0])


def adjoin_cases(p: ProblemSpec, splits: Sequence[CaseSplit]) -> ProblemSpec:
    """Add the tautology ``A | -A`` to sos for every split."""
    if not splits:
        return p
    return p.copy(sos=list(p.sos) + [s.clause() for s in splits])


def split_problem(p: ProblemSpec, atom: Literal) -> tuple:
    """The two branches: ``p`` with ``atom`` in sos, and ``p`` with its negation."""
    pos = atom if atom.positive else atom.negate()
    return (p.copy(name=f"{p.name}+case", sos=list(p.sos) + [Clause((pos,))]),
            p.copy(name=f"{p.name}-case", sos=list(p.sos) + [Clause((pos.negate(),))]))


class NotCombinable(ValueError):
    """The branch proofs cannot be welded by adding the case literal."""


def _input_id(pf: Proof, lit: Literal) -> Optional[int]:
    unit = Clause((lit,))
    for step in pf.steps:
        if step.rule == "input" and variant(step.clause, unit):
            return step.id
    return None


def combine_case_proofs(pf_p: Proof, pf_not_p: Proof, atom: Literal) -> Proof:
    """Weld refutations of ``inputs + A`` and ``inputs + -A`` into one.

    Every step of the first proof that descends from the input ``A`` gets
    ``-A`` disjoined, the input itself becomes ``A | -A``, and the proof then
    ends in the unit ``-A``.  That unit replaces the ``-A`` input of the
    second proof.  Raises :class:`NotCombinable` when a hyperresolution step
    or a step that fails to replay is affected.
    """
    pos = atom if atom.positive else atom.negate()
    neg = pos.negate()
    a_id = _input_id(pf_p, pos)
    if a_id is None:
        return pf_p
    affected = {a_id}
    for step in pf_p.steps:
        if any(p in affected for p in (*step.parents, *step.demods)):
            affected.add(step.id)
    if pf_p.steps[-1].id not in affected:
        return pf_p
    na_id = _input_id(pf_not_p, neg)
    if na_id is None:
        return pf_not_p

    steps: list = []
    for step in pf_p.steps:
        if step.id not in affected:
            steps.append(step)
            continue
        if step.id == a_id:
            steps.append(ProofStep(step.id, Clause((pos, neg)), "input"))
            continue
        if step.rule == "hyper":
            raise NotCombinable(f"step {step.id} is a hyperresolution step on an affected clause")
        if step.rule == "passive":
            raise NotCombinable(f"step {step.id} is a passive-goal step")
        if any(d in affected for d in step.demods):
            raise NotCombinable(f"step {step.id} demodulates with an affected clause")
        rule = "binary" if step.rule == "unit" else step.rule
        lits = merge_duplicates(step.clause.literals + (neg,))
        steps.append(ProofStep(step.id, Clause(lits), rule, step.parents, step.demods))
    witness = steps[-1].id

    offset = max(s.id for s in steps)
    remap = {na_id: witness}
    for step in pf_not_p.steps:
        if step.id != na_id:
            remap[step.id] = step.id + offset
    for step in pf_not_p.steps:
        if step.id == na_id:
            continue
        steps.append(ProofStep(remap[step.id], step.clause, step.rule,
                               tuple(remap[p] for p in step.parents),
                               tuple(remap[d] for d in step.demods)))
    combined = Proof(steps, "main", pf_p.problem or pf_not_p.problem, pf_p.settings_digest)
    check = verify_proof(combined)
    if not check:
        raise NotCombinable(f"combined proof fails at step {check.failed_step}: {check.reason}")
    return combined


# --------------------------------------------------------------------------
# Lemma adjunction
# --------------------------------------------------------------------------

def lemma_adjunction_plan(p: ProblemSpec, book_steps: Sequence[Clause]) -> ProblemSpec:
    """Hints plus passive goals for the intermediate steps of a book proof.

    Each step must be a ground unit, so that its negation is again a clause;
    the step becomes a hint and its negation a passive goal with a fresh goal
    number.  ``max_proofs`` is raised so the run can report every goal and
    still reach the main proof.
    """
    bad = [format_clause(c) for c in book_steps
           if not c.is_unit or not all(is_ground(a) for a in c.literals[0].atom[1:])]
    if bad:
        raise ValueError("book steps must be ground units; rejected: " + "; ".join(bad))
    needed = max(p.settings.max_proofs, len(book_steps) + 1)
    settings = p.settings.with_(max_proofs=needed)
    if not book_steps:
        return p.copy(settings=settings)
    next_goal = max((g for g, _ in p.passive), default=0) + 1
    passive = list(p.passive)
    for k, c in enumerate(book_steps):
        passive.append((next_goal + k, Clause((c.literals[0].negate(),))))
    hints = HintSet().extend(p.hints, "existing").extend(book_steps, "book")
    return p.copy(hints=list(hints.clauses), passive=passive, settings=settings)


def harvest_hints(result: RunResult) -> HintSet:
    """Hints from every proof (main or passive goal) of a run."""
    hints = HintSet()
    for pf in result.proofs:
        hints = hints.merged(extract_hints_from_proof(pf))
    return hints


def lemma_adjunction_rounds(p: ProblemSpec, book_steps: Sequence[Clause],
                            rounds: int = 2) -> list:
    """Run, harvest passive-goal proofs as hints, re-run; one result per round."""
    plan = lemma_adjunction_plan(p, book_steps)
    results = []
    for _ in range(rounds):
        result = search(plan)
        results.append(result)
        plan = with_hints(plan, harvest_hints(result))
    return results


def read_book_steps(path: Union[str, Path]) -> list:
    """Book steps sidecar, in the hints-file format."""
    return list(read_hints_file(path).clauses)


__all__ = [
    "CaseSplit", "HintSet", "NotCombinable", "adjoin_cases", "combine_case_proofs",
    "extract_hints_from_proof", "generate_subformula_hints", "harvest_hints",
    "lemma_adjunction_plan", "lemma_adjunction_rounds", "negate_literal", "read_book_steps",
    "read_hints_file", "split_problem", "with_hints", "write_hints_file",
]
