import pytest
from hypothesis import given, strategies as st

from tarskiprove.corpus import build_problem
from tarskiprove.inference import subsumes
from tarskiprove.kernel import Clause, parse_clause
from tarskiprove.saturation import (
    ProblemSpec,
    Proof,
    ProofFormatError,
    ProofStep,
    ResourceExhausted,
    Saturation,
    Settings,
    SosQueue,
    check_passive,
    clause_weight,
    level_saturate,
    parse_proof,
    prove,
    saturate,
    search,
    select_given,
    verify_proof,
)

from mutations import proof_mutations


def C(text, **meta):
    return parse_clause(text, **meta)


# ---------------------------------------------------------------- weights

def test_weight_counts_symbols_not_signs():
    assert clause_weight(C("-E(a,b,a,b).")) == 5


def test_weight_of_diagram_definition():
    assert clause_weight(C("q = ip(c,s,a,t,r).")) == 8
    assert clause_weight(C("T(x,y,x) | -P(x).")) == 6


def test_hint_weight_overrides():
    hints = [C("T(a,c,d).")]
    s = Settings(hint_mode="subsumed_by_hint", bsub_hint_wt=-1)
    assert clause_weight(C("T(a,c,d)."), hints, s) == -1
    assert clause_weight(C("T(a,c,e)."), hints, s) == 4


def test_hint_modes_differ_in_direction():
    general, specific = C("T(x,c,d)."), C("T(a,c,d).")
    # general subsumes the hint "specific"
    assert clause_weight(general, [specific], Settings(hint_mode="subsumes_hint")) == -1
    assert clause_weight(general, [specific], Settings(hint_mode="subsumed_by_hint")) == 4
    assert clause_weight(specific, [general], Settings(hint_mode="subsumed_by_hint")) == -1
    assert clause_weight(specific, [general], Settings(hint_mode="off")) == 4
    s = Settings(hint_mode="both", fsub_hint_wt=2)
    assert clause_weight(specific, [general], s) == 2


def test_settings_invariants():
    for bad in (dict(max_weight=0), dict(pick_given_ratio=0), dict(max_proofs=0),
                dict(rules=("binary", "magic")), dict(hint_mode="sometimes")):
        with pytest.raises(ValueError):
            Settings(**bad)


def test_passive_goal_numbers_distinct():
    with pytest.raises(ValueError):
        ProblemSpec(passive=[(1, C("-P(a).")), (1, C("-P(b)."))])


# ---------------------------------------------------------------- selection

def _queue(weights):
    q = SosQueue()
    for i, w in enumerate(weights, 1):
        q.add(Clause((), id=i, weight=w))
    return q


def _picks(weights, ratio, n=None):
    q = _queue(weights)
    s = Settings(pick_given_ratio=ratio)
    return [select_given(q, k, s).id for k in range(n or len(weights))]


def test_ratio_four_takes_oldest_every_fifth():
    # ids 1..6 with weights making id 1 the heaviest and oldest
    picks = _picks([9, 5, 4, 3, 2, 1, 7], 4, 6)
    assert picks[:4] == [6, 5, 4, 3]
    assert picks[4] == 1
    assert picks[5] == 2


def test_ratio_one_alternates():
    assert _picks([9, 1, 8, 2], 1) == [2, 1, 4, 3]


def test_equal_weights_are_fifo():
    assert _picks([3] * 7, 4) == list(range(1, 8))


@given(st.lists(st.integers(0, 20), min_size=1, max_size=25), st.integers(1, 6))
def test_selection_oracle(weights, ratio):
    # independent model of the rule: every (r+1)-th pick is the oldest
    live = {i: w for i, w in enumerate(weights, 1)}
    expected = []
    for k in range(len(weights)):
        if (k + 1) % (ratio + 1) == 0:
            pick = min(live)
        else:
            pick = min(live, key=lambda i: (live[i], i))
        expected.append(pick)
        del live[pick]
    assert _picks(weights, ratio) == expected


# ---------------------------------------------------------------- retention

def _state(**settings):
    return Saturation(ProblemSpec(settings=Settings(**settings)))


def test_keep_decision_weight_limit():
    st_ = _state(max_weight=16)
    lits = C("T(a,b,c) | T(b,c,d) | T(c,d,e) | E(a,b,c,d).").literals
    w = clause_weight(lits)
    assert w == 17
    d = st_.keep_decision(lits, w)
    assert not d and d.reason == "weight"


def test_keep_decision_hint_rescues_heavy_clause():
    heavy = C("T(a,ip(a,b,c,d,e),c) | T(b,ip(b,c,d,e,a),d) | T(e,ip(c,d,e,a,b),a) | "
              "E(ip(a,b,c,d,e),a,ip(e,d,c,b,a),b).")
    assert clause_weight(heavy) == 42
    p = ProblemSpec(hints=[heavy], settings=Settings(hint_mode="subsumed_by_hint"))
    s = Saturation(p)
    w = s.weigh(heavy.literals)
    assert w == -1 and s.keep_decision(heavy.literals, w)


def test_keep_decision_distinct_vars():
    s = _state(max_distinct_vars=4)
    lits = C("T(x,y,z) | T(u,v,x).").literals
    d = s.keep_decision(lits, clause_weight(lits))
    assert not d and d.reason == "vars"


def test_keep_decision_tautologies():
    s = _state()
    for text in ("P(a) | -P(a).", "a = a | P(b)."):
        lits = C(text).literals
        assert s.keep_decision(lits, 1).reason == "tautology"


def test_keep_decision_forward_subsumption():
    s = Saturation(ProblemSpec(sos=[C("P(x).")]))
    lits = C("P(a) | Q(a,b).").literals
    assert s.keep_decision(lits, 4).reason == "subsumed"
    assert s.keep_decision(C("Q(a,b).").literals, 3)


def test_back_subsumption_retires_instances():
    s2 = Saturation(ProblemSpec(sos=[C("P(a) | Q(b,b).")]))
    new = Clause(C("P(a).").literals, weight=2)
    s2._keep(new, heat=1)
    assert s2.stats["back_subsumed"] == 1 and len(s2.sos) == 1


# ---------------------------------------------------------------- passive

def test_check_passive_unit_conflict():
    passive = [C("-T(a,c1,p).", extra={"goal": 7})]
    assert check_passive(C("T(a,c1,p)."), passive) == [7]
    assert check_passive(C("T(x,c1,p)."), passive) == [7]


def test_check_passive_ignores_non_units_and_mismatches():
    passive = [C("-T(a,c1,p).", extra={"goal": 7})]
    assert check_passive(C("T(a,c1,p) | P(a)."), passive) == []
    assert check_passive(C("T(a,c1,q)."), passive) == []


def test_passive_proofs_do_not_stop_the_run():
    p = ProblemSpec(
        sos=[C("P(a)."), C("-R(a).")],
        usable=[C("-P(x) | Q(x)."), C("-Q(x) | R(x).")],
        passive=[(3, C("-Q(a)."))],
        settings=Settings(max_proofs=2))
    r = saturate(p)
    assert r.passive_hits == [3]
    assert r.proved
    for pf in r.proofs:
        assert verify_proof(pf)


# ---------------------------------------------------------------- loop

def test_empty_sos_is_exhausted_immediately():
    with pytest.raises(ResourceExhausted) as info:
        saturate(ProblemSpec(usable=[C("P(a).")]))
    assert info.value.reason == "sos-empty"
    assert info.value.result.stats["given"] == 0


def test_search_reports_without_raising():
    r = search(ProblemSpec(sos=[C("P(a).")]))
    assert not r.proved and r.reason == "sos-empty" and r.proof is None


def test_max_given_limit():
    p = ProblemSpec(sos=[C("P(a).")], usable=[C("-P(x) | P(f(x)).")],
                    settings=Settings(max_given=5))
    r = search(p)
    assert r.reason == "max_given" and r.stats["given"] == 5


def test_max_seconds_limit():
    p = ProblemSpec(sos=[C("P(a).")], usable=[C("-P(x) | P(f(x)).")],
                    settings=Settings(max_seconds=0.2, max_weight=10_000))
    r = search(p)
    assert r.reason == "max_seconds"


def test_two_clause_refutation_has_length_one():
    pf = prove(ProblemSpec(sos=[C("-P(a).")], usable=[C("P(x).")]))
    assert pf.length == 1 and pf.steps[-1].clause.is_empty
    assert verify_proof(pf)


def test_empty_clause_in_sos_is_an_immediate_proof():
    pf = prove(ProblemSpec(sos=[Clause(())]))
    assert pf.length == 0 and verify_proof(pf)


def test_rule_toggles():
    p = ProblemSpec(sos=[C("-P(a)."), C("-Q(a).")], usable=[C("P(x) | Q(x).")])
    assert search(p.copy(settings=Settings(rules=("binary",)))).proved
    assert search(p.copy(settings=Settings(rules=("hyper",)))).proved
    assert not search(p.copy(settings=Settings(rules=("para",)))).proved


def test_equality_problem_uses_paramodulation():
    p = ProblemSpec(sos=[C("-P(b).")], usable=[C("P(a)."), C("a = b.")])
    pf = prove(p)
    assert any(s.rule == "para" for s in pf.steps)
    assert not search(p.copy(settings=Settings(rules=("binary", "hyper")))).proved


def test_demodulators_rewrite_derived_clauses():
    p = ProblemSpec(sos=[C("-P(a)."), C("Q(a).")], usable=[C("-Q(x) | P(f(f(x))).")],
                    demodulators=[C("f(f(x)) = x.")])
    pf = prove(p)
    assert any(s.demods for s in pf.steps)
    assert verify_proof(pf)


def test_hot_list_applies_immediately():
    p = ProblemSpec(sos=[C("P(a)."), C("-R(a).")],
                    usable=[C("-P(x) | Q(x).")],
                    hot=[C("-Q(x) | R(x).")])
    r = saturate(p)
    assert r.proved and verify_proof(r.proof)


def test_level_saturation_finds_proof_at_low_weight():
    p = ProblemSpec(sos=[C("-P(a).")], usable=[C("-Q(x) | P(x)."), C("Q(a).")],
                    settings=Settings(max_weight=10))
    assert level_saturate(p).proved


def test_satz_2_1(corpus):
    pf = prove(build_problem(corpus, "Satz2.1"))
    assert pf.length <= 5
    assert verify_proof(pf)


def test_satz_3_1_is_short(corpus):
    pf = prove(build_problem(corpus, "Satz3.1", use_diagram=True))
    assert pf.length <= 10


def test_determinism(corpus):
    p = build_problem(corpus, "Satz2.11")
    a, b = search(p), search(p)
    assert a.proof.to_text() == b.proof.to_text()
    assert a.stats == b.stats


# ---------------------------------------------------------------- invariants

class CheckedSaturation(Saturation):
    """Re-checks retention invariants with naive scans as clauses are kept."""

    def __init__(self, problem):
        self.kept_log = []
        super().__init__(problem)

    def _index_kept(self, c):
        self.kept_log.append(c)
        super()._index_kept(c)

    def _keep(self, c, heat):
        for d in self.kept_log:
            if d.id not in self.retired:
                assert not subsumes(d, c), (d, c)
        assert c.weight == clause_weight(c, self.hints, self.settings)
        super()._keep(c, heat)


@pytest.mark.parametrize("name", ["Satz2.2", "Satz2.11", "Satz3.2"])
def test_kept_clauses_respect_invariants(corpus, name):
    p = build_problem(corpus, name)
    s = CheckedSaturation(p)
    r = s.run()
    assert r.proved
    for c in s.clauses.values():
        if c.origin == "derived" and c.literals and c.weight is not None:
            assert c.weight == clause_weight(c, s.hints, s.settings)


@pytest.mark.parametrize("name", ["Satz2.2", "Satz3.2", "Satz3.4"])
def test_monotonicity_probe(corpus, name):
    p = build_problem(corpus, name)
    pf = prove(p)
    higher = Saturation(ProblemSpec(settings=p.settings.with_(max_weight=p.settings.max_weight + 8)))
    for step in pf.derived:
        if step.clause.is_empty:
            continue
        lits = step.clause.literals
        assert higher.keep_decision(lits, higher.weigh(lits))


# ---------------------------------------------------------------- proofs and replay

def test_proof_text_round_trip(corpus):
    pf = prove(build_problem(corpus, "Satz2.2"))
    back = parse_proof(pf.to_text())
    assert back.to_text() == pf.to_text()
    assert verify_proof(back)


def test_proof_parse_errors():
    with pytest.raises(ProofFormatError):
        parse_proof("1 [input] P(a).\nnot a step\n")
    with pytest.raises(ProofFormatError):
        parse_proof("1 [] P(a).\n")


@pytest.mark.parametrize("name", ["Satz2.2", "Satz2.11", "Satz3.4"])
def test_every_single_step_mutation_fails(corpus, name):
    p = build_problem(corpus, name)
    pf = prove(p)
    inputs = list(p.usable) + list(p.sos)
    assert verify_proof(pf, inputs)
    n = 0
    for label, k, mutated in proof_mutations(pf):
        steps = list(pf.steps)
        steps[k] = mutated
        bad = Proof(steps, pf.target, pf.problem, pf.settings_digest)
        assert not verify_proof(bad, inputs), label
        n += 1
    assert n >= 3 * pf.length - 1


def test_mutated_input_is_caught_when_inputs_known(corpus):
    p = build_problem(corpus, "Satz2.1")
    pf = prove(p)
    k = next(i for i, s in enumerate(pf.steps) if s.rule == "input")
    s = pf.steps[k]
    steps = list(pf.steps)
    lits = s.clause.literals
    steps[k] = ProofStep(s.id, Clause((lits[0].negate(),) + lits[1:]), "input")
    assert not verify_proof(Proof(steps), list(p.usable) + list(p.sos))


def test_verify_rejects_unknown_parents_and_open_endings():
    pf = Proof([ProofStep(2, Clause(()), "binary", (1, 9))])
    v = verify_proof(pf)
    assert not v and v.failed_step == 2
    pf = Proof([ProofStep(1, C("P(a)."), "input")])
    assert not verify_proof(pf)
