"""Optional long run: outer connectivity (Satz5.1) with every strategy stacked.

This is the hardest entry of the starter corpus and is not expected to fall
at desk scale; the default budget is one hour.  Pass a number of seconds to
shorten it, e.g. ``python3 demos/stretch_outer_connectivity.py 600``.
"""

import sys
import time

from tarskiprove import Settings, starter_corpus
from tarskiprove.cli import BatchConfig, escalation
from tarskiprove.saturation import search


def main(budget: float = 3600.0):
    m = starter_corpus()
    attempts = escalation(m, "Satz5.1", BatchConfig(settings=Settings(max_seconds=budget)))
    stage, label, problem = attempts[-1]
    print(f"stage {stage} ({label}): {len(problem.sos)} sos clauses, {len(problem.hints)} hints")
    t = time.monotonic()
    r = search(problem)
    print(f"{r.reason} after {time.monotonic() - t:.0f}s; given={r.stats['given']}")
    if r.proved:
        print(r.proof.to_text())


if __name__ == "__main__":
    main(float(sys.argv[1]) if len(sys.argv) > 1 else 3600.0)
