import pytest
from hypothesis import given, strategies as st

from tarskiprove.corpus import build_problem
from tarskiprove.kernel import format_clause, parse_clause
from tarskiprove.problemfile import (
    ProblemFileError,
    format_problem,
    parse_problem,
    read_problem,
    wrap_clause,
    write_problem,
)
from tarskiprove.saturation import ProblemSpec, Settings
from tarskiprove.strategies import generate_subformula_hints, with_hints

from strategies_gen import clauses


def C(text):
    return parse_clause(text)


def test_layout(corpus):
    text = format_problem(build_problem(corpus, "Satz3.17", use_diagram=True))
    lines = text.splitlines()
    assert lines[0] == "% problem: Satz3.17"
    assert "set(binary_res)." in lines and "assign(max_weight, 16)." in lines
    start = lines.index("list(sos).")
    assert lines[start + 1:start + 8] == [
        "T(a,s,c).", "T(b,t,c).", "T(a,p,b).", "-T(p,x,c) | -T(s,x,t).",
        "r = ip(c,t,b,a,p).", "q = ip(c,s,a,t,r).", "end_of_list."]
    assert "list(demodulators)." in lines
    assert "list(hints)." not in lines and "list(passive)." not in lines


def test_lines_stay_within_80_columns(corpus):
    for name in corpus.names:
        text = format_problem(build_problem(corpus, name, use_diagram=True, use_cases=True))
        assert max(len(l) for l in text.splitlines()) <= 80


def test_wrap_clause():
    long = " | ".join(f"-T(a{i},b{i},c{i})" for i in range(12)) + "."
    lines = wrap_clause(long)
    assert len(lines) > 1 and all(len(l) <= 80 for l in lines)
    assert all(l.startswith("    ") for l in lines[1:])
    assert parse_clause(" ".join(l.strip() for l in lines)) == parse_clause(long)
    assert wrap_clause("P(a).") == ["P(a)."]


@pytest.mark.parametrize("name", ["Satz2.1", "Satz3.17", "Satz5.1", "FivePoint"])
def test_round_trip_is_byte_identical(corpus, name):
    p = build_problem(corpus, name, use_diagram=True, use_cases=True)
    p = with_hints(p, generate_subformula_hints(p.sos))
    p = p.copy(passive=[(4, C("-T(a,b,c).")), (9, C("d != e."))],
               hot=[C("-T(x,y,x) | x = y.")],
               settings=Settings(max_weight=12, max_seconds=7.5, max_distinct_vars=4,
                                 rules=("binary", "para"), hint_mode="both", para_from_vars=True))
    text = format_problem(p)
    back = parse_problem(text)
    assert format_problem(back) == text
    assert back.settings == p.settings
    assert back.passive[0][0] == 4 and format_clause(back.passive[1][1]) == "d != e."


@given(st.lists(clauses(1, 6), max_size=6), st.lists(clauses(1, 3), max_size=3))
def test_round_trip_property(usable, sos):
    p = ProblemSpec(name="random", usable=usable, sos=sos)
    text = format_problem(p)
    assert format_problem(parse_problem(text)) == text


def test_hints_block_is_appended_last(corpus):
    plain = format_problem(build_problem(corpus, "Satz3.2"))
    hinted = format_problem(build_problem(corpus, "Satz3.2", hints=[C("T(c,b,a).")]))
    assert hinted.startswith(plain)
    assert hinted[len(plain):] == "list(hints).\nT(c,b,a).\nend_of_list.\n"


def test_file_io(tmp_path, corpus):
    p = build_problem(corpus, "Satz2.2")
    path = tmp_path / "Satz2.2.in"
    write_problem(path, p)
    assert format_problem(read_problem(path)) == path.read_text()


def test_rules_default_on_when_unmentioned():
    p = parse_problem("list(sos).\nP(a).\nend_of_list.\n")
    assert p.settings.rules == Settings().rules
    p = parse_problem("clear(para_from).\nclear(para_into).\nlist(sos).\nP(a).\nend_of_list.\n")
    assert "para" not in p.settings.rules


@pytest.mark.parametrize("text, where", [
    ("list(sos).\nP(a.\nend_of_list.\n", 2),
    ("list(sos).\nP(a).\n", 0),
    ("list(bogus).\nend_of_list.\n", 1),
    ("assign(max_weight, heavy).\n", 1),
    ("assign(colour, 3).\n", 1),
    ("set(magic).\n", 0),
    ("frobnicate.\n", 1),
    ("list(passive).\n-P(a).\nend_of_list.\n", 2),
    ("list(passive).\n-P(a) | $ANS(1).\n-P(b) | $ANS(1).\nend_of_list.\n", 0),
    ("list(sos).\nP(a)\n", 2),
])
def test_errors_carry_line_numbers(text, where):
    with pytest.raises(ProblemFileError) as info:
        parse_problem(text)
    assert info.value.line == where
