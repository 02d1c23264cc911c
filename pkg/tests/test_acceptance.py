"""Acceptance criteria, one test per criterion.

Each test prints a single ``ACCEPTANCE <n> PASS|FAIL ...`` line and the
session summary repeats them all.  Tolerances are the ones stated in the
criteria; nothing is loosened here.
"""

import random
import time

import pytest

from tarskiprove.corpus import build_problem, check_master_list, starter_corpus
from tarskiprove.kernel import Clause, Literal
from tarskiprove.saturation import ProblemSpec, Proof, Settings, search, verify_proof
from tarskiprove.strategies import (
    CaseSplit,
    NotCombinable,
    adjoin_cases,
    combine_case_proofs,
    extract_hints_from_proof,
    generate_subformula_hints,
    split_problem,
    with_hints,
)

from conftest import ACCEPTANCE_LINES
from mutations import MUTATIONS, apply_mutation, caught, proof_mutations, starter_text
from oracles import truth_table_unsat

EASY = {"Satz2.1": 4, "Satz2.2": 4, "Satz3.1": 4, "Satz3.2": 4, "Satz3.5": 4}  # reported lengths
CROSSBAR = "Satz3.17"


def report(capsys, n, ok, detail):
    line = f"ACCEPTANCE {n:>2} {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    with capsys.disabled():
        print("\n" + line)
    return ok


def corpus_problem(m, name, **overrides):
    """The default problem for a corpus entry: its diagram is used when it has one."""
    return build_problem(m, name, use_diagram=bool(m.theorem(name).diagram), **overrides)


class Runs:
    """Timed default-settings runs shared by several criteria."""

    def __init__(self):
        self.m = starter_corpus()
        self.cache = {}

    def run(self, name, budget):
        if name not in self.cache:
            p = corpus_problem(self.m, name, settings=Settings(max_seconds=budget))
            t = time.monotonic()
            r = search(p)
            self.cache[name] = (p, r, time.monotonic() - t)
        return self.cache[name]


@pytest.fixture(scope="module")
def runs():
    return Runs()


# ---------------------------------------------------------------- 1

def test_criterion_01_corpus_integrity(capsys):
    t = time.monotonic()
    m = starter_corpus()
    report_ = check_master_list(m)
    elapsed = time.monotonic() - t
    text = starter_text()
    missed = [label for label, *_ in MUTATIONS if not caught(apply_mutation(text, (label, *_)))[0]]
    ok = report_.clean and not missed and len(MUTATIONS) == 12 and elapsed < 1.0
    report(capsys, 1, ok, f"check clean={report_.clean} in {elapsed:.3f}s (<1s); "
                          f"mutations caught {len(MUTATIONS) - len(missed)}/{len(MUTATIONS)}"
                          + (f"; missed: {missed}" if missed else ""))
    assert ok


# ---------------------------------------------------------------- 2

def test_criterion_02_easy_tier(capsys, runs):
    parts, ok = [], True
    for name, reported in EASY.items():
        p, r, secs = runs.run(name, 60)
        length = r.proof.length if r.proved else None
        good = r.proved and secs < 60 and length <= 3 * reported and p.settings.max_weight == 16 \
            and p.settings.pick_given_ratio == 4
        ok &= bool(good)
        parts.append(f"{name}: {'len ' + str(length) if r.proved else r.reason} {secs:.1f}s")
    report(capsys, 2, ok, "; ".join(parts) + " (limits: <60s, len<=12)")
    assert ok


# ---------------------------------------------------------------- 3

def test_criterion_03_outer_transitivity(capsys, runs):
    _, r, secs = runs.run("Satz3.7", 120)
    ok = r.proved and secs < 120 and r.proof.length <= 50
    report(capsys, 3, ok, f"Satz3.7: {'len ' + str(r.proof.length) if r.proved else r.reason} "
                          f"{secs:.1f}s (limits: <120s, len<=50)")
    assert ok


# ---------------------------------------------------------------- 4

def test_criterion_04_five_point(capsys, runs):
    p, r, secs = runs.run("FivePoint", 60)
    m = runs.m
    chapter3 = [c for t in m.theorems if t.chapter == "3" for c in t.positive_form]
    in_usable = all(any(c == u for u in p.usable) for c in chapter3)
    ok = r.proved and secs < 60 and r.proof.length <= 20 and in_usable
    report(capsys, 4, ok, f"FivePoint: {'len ' + str(r.proof.length) if r.proved else r.reason} "
                          f"{secs:.1f}s, Satz 3.x positive forms in usable={in_usable} "
                          f"(limits: <60s, len<=20)")
    assert ok


# ---------------------------------------------------------------- 5

def test_criterion_05_diagram_effect(capsys):
    m = starter_corpus()
    with_d = build_problem(m, CROSSBAR, use_diagram=True, settings=Settings(max_seconds=10))
    t = time.monotonic()
    r1 = search(with_d)
    t1 = time.monotonic() - t
    budget = 10 * t1
    without = build_problem(m, CROSSBAR, use_diagram=False, settings=Settings(max_seconds=budget))
    t = time.monotonic()
    r2 = search(without)
    t2 = time.monotonic() - t
    if not r2.proved:
        ok = r1.proved and t1 < 10
        detail = f"with diagram: proved in {t1:.2f}s; without: no proof in {t2:.2f}s (10x budget)"
    else:
        ratio = r2.stats["given"] / max(1, r1.stats["given"])
        ok = r1.proved and t1 < 10 and ratio >= 10
        detail = (f"with diagram: {t1:.2f}s; without: proved, given-clause ratio {ratio:.1f} "
                  f"(needs >=10)")
    report(capsys, 5, ok, detail)
    assert ok


# ---------------------------------------------------------------- 6

def test_criterion_06_hint_round_trip(capsys, runs):
    parts, ok = [], True
    for name in [*EASY, "Satz3.7", "FivePoint"]:
        p, r, _ = runs.run(name, 120)
        assert r.proved
        hints = extract_hints_from_proof(r.proof)
        q = with_hints(p, hints).copy(settings=p.settings.with_(hint_mode="both", max_weight=8))
        again = search(q)
        good = again.proved and again.stats["given"] <= r.stats["given"]
        ok &= bool(good)
        parts.append(f"{name} {r.stats['given']}->{again.stats['given'] if again.proved else 'none'}")
    report(capsys, 6, ok, "given clauses before->after hints: " + ", ".join(parts))
    assert ok


# ---------------------------------------------------------------- 7

def _random_clause_set(rng):
    preds = [("P", 1), ("Q", 2), ("T", 3), ("=", 2)]
    consts = ["a", "b", "c"]
    vars_ = ["x", "y", "z"]

    def term():
        return rng.choice(vars_) if rng.random() < 0.4 else (rng.choice(consts),)

    out = []
    for _ in range(rng.randint(0, 5)):
        lits = []
        for _ in range(rng.randint(1, 4)):
            p, n = rng.choice(preds)
            lits.append(Literal(rng.random() < 0.5, (p, *(term() for _ in range(n)))))
        out.append(Clause(tuple(lits)))
    return out


def test_criterion_07_subformula(capsys):
    sos = starter_corpus().theorem("Satz5.1").negated_form
    hints = generate_subformula_hints(sos)
    n_lits = sum(len(c) for c in sos)
    exact = len(hints) == 10 == 2 * n_lits
    rng = random.Random(7)
    violations = 0
    for _ in range(1000):
        cs = _random_clause_set(rng)
        if len(generate_subformula_hints(cs)) > 2 * sum(len(c) for c in cs):
            violations += 1
    ok = exact and violations == 0
    report(capsys, 7, ok, f"Satz5.1 sos: {len(hints)} hints from {n_lits} literals; "
                          f"bound violations in 1000 random sets: {violations}")
    assert ok


# ---------------------------------------------------------------- 8

def test_criterion_08_proof_replay(capsys, runs):
    proofs = []
    for name in [*EASY, "Satz3.7", "FivePoint"]:
        p, r, _ = runs.run(name, 120)
        proofs += [(p, pf) for pf in r.proofs]
    passed = sum(bool(verify_proof(pf, p.usable + p.sos + p.demodulators)) for p, pf in proofs)
    mutants = escaped = 0
    for p, pf in proofs:
        for label, k, step in proof_mutations(pf):
            steps = list(pf.steps)
            steps[k] = step
            mutants += 1
            if verify_proof(Proof(steps, pf.target, pf.problem), p.usable + p.sos + p.demodulators):
                escaped += 1
    ok = passed == len(proofs) and escaped == 0
    report(capsys, 8, ok, f"{passed}/{len(proofs)} proofs verify; "
                          f"{mutants - escaped}/{mutants} single-step mutants rejected")
    assert ok


# ---------------------------------------------------------------- 9

def test_criterion_09_cases(capsys):
    from tarskiprove.kernel import parse_clause as C
    base = ProblemSpec(name="ground-cases", sos=[C("-Q(a).")],
                       usable=[C("-A(a) | Q(a)."), C("A(a) | R(a)."), C("-R(a) | Q(a).")],
                       settings=Settings(rules=("binary",)))
    atom = Literal(True, ("A", ("a",)))
    assert truth_table_unsat(base.sos + base.usable)
    plus, minus = split_problem(base, atom)
    r_plus, r_minus = search(plus), search(minus)
    try:
        combined = combine_case_proofs(r_plus.proof, r_minus.proof, atom)
        welded = bool(verify_proof(combined, base.sos + base.usable + [CaseSplit(atom).clause()]))
    except NotCombinable as exc:
        welded, combined = False, str(exc)
    adjoined = search(adjoin_cases(base, [CaseSplit(atom)])).proved
    ok = r_plus.proved and r_minus.proved and welded and adjoined
    report(capsys, 9, ok, f"branches refuted: {r_plus.proved}/{r_minus.proved}; "
                          f"combined proof verifies: {welded}; adjoin_cases refutable: {adjoined}")
    assert ok


# ---------------------------------------------------------------- 10

def test_criterion_10_out_of_scope(capsys):
    # Stated as not reproducible at desk scale.  The stretch target (outer
    # connectivity with a one-hour budget) is run by demos/stretch_outer_connectivity.py,
    # not by the test suite.
    report(capsys, 10, True, "NOT REPRODUCIBLE at desk scale (long proofs, multi-hour runs, "
                             "212-theorem success rates, de Bruijn factor); substitutes are the "
                             "invariant suites; stretch target is optional and not run here")


# ---------------------------------------------------------------- 11

def test_criterion_11_determinism(capsys):
    m = starter_corpus()
    same = []
    for name in EASY:
        texts = [search(corpus_problem(m, name)).proof.to_text() for _ in range(2)]
        same.append(texts[0] == texts[1])
    ok = all(same)
    report(capsys, 11, ok, f"byte-identical proof files on repeat: {sum(same)}/{len(same)}")
    assert ok
