"""A resolution and paramodulation prover for Tarskian geometry.

The package is organised as

* :mod:`~tarskiprove.kernel`: terms, literals, clauses, parsing, unification;
* :mod:`~tarskiprove.inference`: resolution, paramodulation, factoring,
  subsumption and demodulation;
* :mod:`~tarskiprove.saturation`: the given-clause loop, proofs and replay;
* :mod:`~tarskiprove.strategies`: subformula hints, proof hints, case splits
  and lemma adjunction;
* :mod:`~tarskiprove.corpus`: the master list of axioms and theorems;
* :mod:`~tarskiprove.problemfile`: OTTER-style problem files;
* :mod:`~tarskiprove.cli`: the ``tarskiprove`` command.
"""

from .kernel import Clause, Literal, ParseError, format_clause, parse_clause, parse_literal, parse_term
from .saturation import (
    Proof,
    ProblemSpec,
    ResourceExhausted,
    RunResult,
    Settings,
    parse_proof,
    prove,
    saturate,
    search,
    verify_proof,
)
from .corpus import MasterList, TheoremEntry, build_problem, check_master_list, starter_corpus
from .strategies import (
    CaseSplit,
    HintSet,
    adjoin_cases,
    combine_case_proofs,
    extract_hints_from_proof,
    generate_subformula_hints,
    lemma_adjunction_plan,
    split_problem,
)

__version__ = "0.1.0"

__all__ = [
    "CaseSplit", "Clause", "HintSet", "Literal", "MasterList", "ParseError", "Proof",
    "ProblemSpec", "ResourceExhausted", "RunResult", "Settings", "TheoremEntry",
    "adjoin_cases", "build_problem", "check_master_list", "combine_case_proofs",
    "extract_hints_from_proof", "format_clause", "generate_subformula_hints",
    "lemma_adjunction_plan", "parse_clause", "parse_literal", "parse_proof", "parse_term",
    "prove", "saturate", "search", "split_problem", "starter_corpus", "verify_proof",
]
