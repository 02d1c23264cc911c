"""Two effects on a small corpus: a diagram makes the crossbar theorem easy,
and hints taken from a finished proof make a second run much shorter.

Run with ``python3 demos/diagrams_and_hints.py``.
"""

import time

from tarskiprove import Settings, build_problem, search, starter_corpus
from tarskiprove.strategies import extract_hints_from_proof, with_hints


def timed(problem):
    t = time.monotonic()
    r = search(problem)
    return r, time.monotonic() - t


def main():
    m = starter_corpus()

    r, secs = timed(build_problem(m, "Satz3.17", use_diagram=True))
    print(f"Satz3.17 with its diagram: proved={r.proved} in {secs:.2f}s, {r.stats['given']} given")
    r, secs = timed(build_problem(m, "Satz3.17", use_diagram=False,
                                  settings=Settings(max_seconds=5)))
    print(f"Satz3.17 without it:       {r.reason} after {secs:.2f}s")
    print()

    for name in ("Satz3.5", "Satz3.7"):
        p = build_problem(m, name, use_diagram=bool(m.theorem(name).diagram))
        first, _ = timed(p)
        hints = extract_hints_from_proof(first.proof)
        q = with_hints(p, hints).copy(settings=p.settings.with_(hint_mode="both", max_weight=8))
        again, _ = timed(q)
        print(f"{name}: {first.stats['given']} given clauses, "
              f"{again.stats['given']} with {len(hints)} hints from the first proof")
    print()
    print(first.proof.to_text())


if __name__ == "__main__":
    main()
