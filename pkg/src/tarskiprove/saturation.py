"""The weighted given-clause loop, proof extraction and proof replay."""

from __future__ import annotations

import hashlib
import heapq
import json
import re
import time
from functools import lru_cache
from itertools import product
from dataclasses import asdict, dataclass, field, replace
from typing import Iterable, Optional, Sequence

from .inference import (
    Demodulator,
    RewriteLimitExceeded,
    binary_resolve,
    demodulate_literals,
    factor,
    factor_literals,
    hyper_resolvents,
    hyper_search,
    is_tautology,
    para_pair,
    paramodulate,
    resolve_pair,
    subsumes_literals,
    subterm_positions,
    unit_resolve,
    variant,
)
from .kernel import (
    EQ,
    Clause,
    Literal,
    _unify,
    clause_vars,
    format_clause,
    merge_duplicates,
    normalize_vars,
    parse_clause,
    suffix_vars,
    symbol_count,
)

ALL_RULES = ("binary", "hyper", "unit", "para", "factor")
HINT_MODES = ("off", "subsumes_hint", "subsumed_by_hint", "both")


@dataclass(frozen=True)
class Settings:
    max_weight: int = 16
    pick_given_ratio: int = 4
    max_proofs: int = 1
    max_distinct_vars: Optional[int] = None
    max_seconds: Optional[float] = 60.0
    max_given: Optional[int] = None
    rules: tuple = ALL_RULES
    hint_mode: str = "subsumes_hint"
    bsub_hint_wt: int = -1
    fsub_hint_wt: Optional[int] = None
    para_from_vars: bool = False
    rewrite_limit: int = 1000

    def __post_init__(self):
        if self.max_weight < 1:
            raise ValueError("max_weight must be at least 1")
        if self.pick_given_ratio < 1:
            raise ValueError("pick_given_ratio must be at least 1")
        if self.max_proofs < 1:
            raise ValueError("max_proofs must be at least 1")
        unknown = set(self.rules) - set(ALL_RULES)
        if unknown:
            raise ValueError(f"unknown inference rules: {sorted(unknown)}")
        if self.hint_mode not in HINT_MODES:
            raise ValueError(f"hint_mode must be one of {HINT_MODES}")
        object.__setattr__(self, "rules", tuple(r for r in ALL_RULES if r in self.rules))

    def digest(self) -> str:
        blob = json.dumps(asdict(self), sort_keys=True, default=str)
        return hashlib.sha256(blob.encode()).hexdigest()[:12]

    def with_(self, **changes) -> "Settings":
        return replace(self, **changes)


@dataclass
class ProblemSpec:
    name: str = "problem"
    sos: list = field(default_factory=list)
    usable: list = field(default_factory=list)
    hints: list = field(default_factory=list)
    passive: list = field(default_factory=list)  # (goal number, Clause) pairs
    demodulators: list = field(default_factory=list)
    hot: list = field(default_factory=list)
    settings: Settings = field(default_factory=Settings)

    def __post_init__(self):
        goals = [g for g, _ in self.passive]
        if len(goals) != len(set(goals)):
            raise ValueError("passive clauses must carry distinct goal numbers")

    def copy(self, **changes) -> "ProblemSpec":
        fields = dict(name=self.name, sos=list(self.sos), usable=list(self.usable),
                      hints=list(self.hints), passive=list(self.passive),
                      demodulators=list(self.demodulators), hot=list(self.hot),
                      settings=self.settings)
        fields.update(changes)
        return ProblemSpec(**fields)


@dataclass
class ProofStep:
    id: int
    clause: Clause
    rule: str
    parents: tuple = ()
    demods: tuple = ()

    @property
    def text(self) -> str:
        return format_clause(self.clause)

    def render(self) -> str:
        tags = [self.rule, *map(str, self.parents)]
        if self.demods:
            tags += ["demod", *map(str, self.demods)]
        return f"{self.id} [{','.join(tags)}] {self.text}"


@dataclass
class Proof:
    steps: list
    target: object = "main"  # "main" or a passive goal number
    problem: str = ""
    settings_digest: str = ""

    @property
    def length(self) -> int:
        return sum(1 for s in self.steps if s.rule != "input")

    @property
    def derived(self) -> list:
        return [s for s in self.steps if s.rule != "input"]

    def to_text(self) -> str:
        lines = [
            f"% problem: {self.problem}",
            f"% settings: {self.settings_digest}",
            f"% target: {self.target}",
            f"% length: {self.length}",
        ]
        lines += [s.render() for s in self.steps]
        return "\n".join(lines) + "\n"


class ProofFormatError(ValueError):
    pass


_STEP = re.compile(r"^(\d+)\s+\[([^\]]*)\]\s+(.*)$")


def parse_proof(text: str) -> Proof:
    """Read a proof written by :meth:`Proof.to_text`."""
    header: dict = {}
    steps = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("%"):
            key, _, value = line[1:].partition(":")
            header[key.strip()] = value.strip()
            continue
        m = _STEP.match(line)
        if not m:
            raise ProofFormatError(f"line {lineno}: not a proof step: {line!r}")
        tags = [t.strip() for t in m.group(2).split(",") if t.strip()]
        if not tags:
            raise ProofFormatError(f"line {lineno}: missing rule name")
        rule, rest = tags[0], tags[1:]
        demods: list = []
        if "demod" in rest:
            k = rest.index("demod")
            rest, demods = rest[:k], rest[k + 1:]
        try:
            parents = tuple(int(p) for p in rest)
            demods = tuple(int(d) for d in demods)
            clause = parse_clause(m.group(3))
        except ValueError as exc:
            raise ProofFormatError(f"line {lineno}: {exc}") from exc
        steps.append(ProofStep(int(m.group(1)), clause, rule, parents, demods))
    target = header.get("target", "main")
    if target != "main":
        try:
            target = int(target)
        except ValueError as exc:
            raise ProofFormatError(f"bad target {target!r}") from exc
    return Proof(steps, target, header.get("problem", ""), header.get("settings", ""))


@dataclass
class RunResult:
    proofs: list
    reason: str  # "max_proofs", "sos-empty", "max_seconds", "max_given"
    stats: dict
    seconds: float = 0.0

    @property
    def main_proofs(self) -> list:
        return [p for p in self.proofs if p.target == "main"]

    @property
    def proved(self) -> bool:
        return bool(self.main_proofs)

    @property
    def proof(self) -> Optional[Proof]:
        main = self.main_proofs
        return main[0] if main else None

    @property
    def passive_hits(self) -> list:
        return [p.target for p in self.proofs if p.target != "main"]


class ResourceExhausted(RuntimeError):
    def __init__(self, reason: str, result: Optional[RunResult] = None):
        self.reason = reason
        self.result = result
        super().__init__(f"no proof found: {reason}")


# --------------------------------------------------------------------------
# Weighting, selection, retention
# --------------------------------------------------------------------------

def raw_weight(lits: Iterable[Literal]) -> int:
    return sum(symbol_count(l.atom) for l in lits)


def hint_weight(lits: tuple, hints: Sequence[Clause], settings: Settings) -> Optional[int]:
    """Hint-adjusted weight for ``lits``, or ``None`` when no hint applies."""
    mode = settings.hint_mode
    if mode == "off" or not hints:
        return None
    best = None
    for h in hints:
        if mode in ("subsumes_hint", "both") and subsumes_literals(lits, h.literals):
            w = settings.bsub_hint_wt
        elif mode in ("subsumed_by_hint", "both") and len(lits) <= len(h.literals) \
                and subsumes_literals(h.literals, lits):
            # only instances of the hint count; a weakening (hint plus extra
            # literals) would otherwise inherit the hint's low weight
            w = settings.fsub_hint_wt if settings.fsub_hint_wt is not None else settings.bsub_hint_wt
        else:
            continue
        best = w if best is None else min(best, w)
    return best


def clause_weight(c, hints: Sequence[Clause] = (), settings: Settings = Settings()) -> int:
    """Symbol count of the clause, overridden by the hint weight when a hint matches."""
    lits = c.literals if isinstance(c, Clause) else tuple(c)
    hw = hint_weight(lits, hints, settings)
    return raw_weight(lits) if hw is None else hw


class SosQueue:
    """Set of support with lightest-first and oldest-first access."""

    def __init__(self):
        self._by_weight: list = []
        self._by_age: list = []
        self._live: dict = {}

    def add(self, c: Clause):
        self._live[c.id] = c
        heapq.heappush(self._by_weight, (c.weight, c.id))
        heapq.heappush(self._by_age, c.id)

    def discard(self, c: Clause):
        self._live.pop(c.id, None)

    def __len__(self):
        return len(self._live)

    def __contains__(self, c: Clause):
        return c.id in self._live

    def __iter__(self):
        return iter(list(self._live.values()))

    def pop_lightest(self) -> Clause:
        while True:
            _, cid = heapq.heappop(self._by_weight)
            if cid in self._live:
                return self._live.pop(cid)

    def pop_oldest(self) -> Clause:
        while True:
            cid = heapq.heappop(self._by_age)
            if cid in self._live:
                return self._live.pop(cid)


def select_given(sos: SosQueue, counter: int, settings: Settings) -> Clause:
    """Pick the next given clause; ``counter`` is the number of earlier picks.

    Every ``(ratio + 1)``-th pick takes the oldest clause, the others the
    lightest (ties go to the lowest id).
    """
    r = settings.pick_given_ratio
    if (counter + 1) % (r + 1) == 0:
        return sos.pop_oldest()
    return sos.pop_lightest()


@dataclass
class Decision:
    keep: bool
    reason: str = ""

    def __bool__(self):
        return self.keep


# --------------------------------------------------------------------------
# The prover state
# --------------------------------------------------------------------------

class _Stop(Exception):
    pass


def literal_signature(lit: Literal) -> tuple:
    """Sign, predicate and the top symbol of each argument (``None`` for variables)."""
    return (lit.positive, lit.atom[0],
            tuple(None if isinstance(a, str) else a[0] for a in lit.atom[1:]))


@lru_cache(maxsize=None)
def _generalizations(sig: tuple) -> tuple:
    """Signatures of literals that could match onto a literal with signature ``sig``."""
    choices = [(top, None) if top is not None else (None,) for top in sig[2]]
    return tuple((sig[0], sig[1], tops) for tops in product(*choices))


def _compatible(instance_of: tuple, sig: tuple) -> bool:
    # can a literal with signature ``sig`` be an instance of one with ``instance_of``?
    return all(a is None or a == b for a, b in zip(instance_of, sig))


class Saturation:
    """One given-clause run over a :class:`ProblemSpec`."""

    def __init__(self, problem: ProblemSpec):
        self.problem = problem
        self.settings = problem.settings
        self.hints = list(problem.hints)
        self.clauses: dict = {}
        self.next_id = 1
        self.sos = SosQueue()
        self.usable: list = []
        self.retired: set = set()
        self.proofs: list = []
        self.passive: list = []
        self.passive_hit: set = set()
        self.hot: list = []
        self.demods: list = []
        self.stats = dict(given=0, generated=0, kept=0, forward_subsumed=0,
                          back_subsumed=0, weight_discarded=0, vars_discarded=0,
                          tautologies=0, rewrite_failures=0)
        # indexes over kept clauses (sos + usable)
        self._kept_by_key: dict = {}
        self._kept_by_lit: dict = {}
        self._units: dict = {}
        # indexes over usable
        self._pos: dict = {}
        self._neg: dict = {}
        self._sat: dict = {}
        self._eq_sides: dict = {}
        self._var_sides: list = []
        self._into: dict = {}
        self._all_into: list = []
        self._renamed: dict = {}
        self._deadline = None
        self._ticks = 0
        self._load()

    # ---- setup -----------------------------------------------------------

    def _new_id(self) -> int:
        i = self.next_id
        self.next_id += 1
        return i

    def _input(self, c: Clause, origin: str) -> Clause:
        c = Clause(c.literals, id=self._new_id(), origin=origin)
        c.weight = clause_weight(c, self.hints, self.settings)
        self.clauses[c.id] = c
        return c

    def _load(self):
        p = self.problem
        for c in p.usable:
            c = self._input(c, "input-usable")
            self._index_kept(c)
            self._add_usable(c)
        sos_in = [self._input(c, "input-sos") for c in p.sos]
        for goal, c in p.passive:
            c = self._input(c, "input-passive")
            c.extra["goal"] = goal
            self.passive.append(c)
        for c in p.demodulators:
            c = self._input(c, "input-demodulator")
            self.demods.append(Demodulator(c))
        for c in p.hot:
            self.hot.append(self._input(c, "input-hot"))
        self._pending_empty = []
        for c in sos_in:
            if c.is_empty:
                self._pending_empty.append(c)
                continue
            self._index_kept(c)
            self.sos.add(c)

    # ---- indexes -----------------------------------------------------------

    def _index_kept(self, c: Clause):
        if c.literals:
            self._kept_by_key.setdefault(literal_signature(c.literals[0]), []).append(c)
        for sig in dict.fromkeys(literal_signature(l) for l in c.literals):
            self._kept_by_lit.setdefault(sig[:2], {}).setdefault(sig[2], []).append(c)
        if c.is_unit:
            self._units.setdefault(c.literals[0].key, []).append(c)

    def _add_usable(self, c: Clause):
        self.usable.append(c)
        positive = c.is_positive
        for i, lit in enumerate(c.literals):
            idx = self._pos if lit.positive else self._neg
            bucket = idx.setdefault(lit.atom[0], [])
            if not bucket or bucket[-1] is not c:
                bucket.append(c)
            if positive:
                sb = self._sat.setdefault(lit.atom[0], [])
                if not sb or sb[-1] is not c:
                    sb.append(c)
            if lit.positive and lit.atom[0] == EQ and lit.atom[1] != lit.atom[2]:
                for ltr in (True, False):
                    side = lit.atom[1] if ltr else lit.atom[2]
                    if isinstance(side, str):
                        self._var_sides.append((c, i, ltr))
                    else:
                        self._eq_sides.setdefault(side[0], []).append((c, i, ltr))
            for k, arg in enumerate(lit.atom[1:], 1):
                for path, sub in subterm_positions(arg, (k,)):
                    entry = (c, i, path)
                    self._into.setdefault(sub[0], []).append(entry)
                    self._all_into.append(entry)

    def _live(self, c: Clause) -> bool:
        return c.id not in self.retired

    def _rn(self, c: Clause, suffix: str) -> tuple:
        key = (c.id, suffix)
        r = self._renamed.get(key)
        if r is None:
            r = suffix_vars(c.literals, suffix)
            self._renamed[key] = r
        return r

    # ---- retention ---------------------------------------------------------

    def weigh(self, lits: tuple) -> int:
        return clause_weight(lits, self.hints, self.settings)

    def forward_subsumed(self, lits: tuple) -> bool:
        n = len(lits)
        sigs = dict.fromkeys(literal_signature(l) for l in lits)
        for sig in sigs:
            for gen in _generalizations(sig):
                for d in self._kept_by_key.get(gen, ()):
                    if len(d.literals) <= n and d.id not in self.retired \
                            and subsumes_literals(d.literals, lits):
                        return True
        return False

    def keep_decision(self, lits: tuple, weight: int) -> Decision:
        s = self.settings
        if is_tautology(lits):
            return Decision(False, "tautology")
        if weight > s.max_weight:
            return Decision(False, "weight")
        if s.max_distinct_vars is not None and len(clause_vars(lits)) > s.max_distinct_vars:
            return Decision(False, "vars")
        if self.forward_subsumed(lits):
            return Decision(False, "subsumed")
        return Decision(True)

    def back_subsume(self, c: Clause):
        lits = c.literals
        n = len(lits)
        # anything c subsumes holds an instance of c's most specific literal
        sig = max((literal_signature(l) for l in lits),
                  key=lambda g: sum(t is not None for t in g[2]))
        buckets = self._kept_by_lit.get(sig[:2], {})
        for tops, bucket in list(buckets.items()):
            if not _compatible(sig[2], tops):
                continue
            for d in bucket:
                if d is c or d.id in self.retired or len(d.literals) < n:
                    continue
                if subsumes_literals(lits, d.literals):
                    self.retired.add(d.id)
                    self.sos.discard(d)
                    self.stats["back_subsumed"] += 1

    # ---- generation --------------------------------------------------------

    def _tick(self):
        self._ticks += 1
        if self._deadline is not None and self._ticks % 64 == 0 \
                and time.monotonic() > self._deadline:
            raise _Stop("max_seconds")

    def process(self, lits: tuple, rule: str, parents: tuple, heat: int = 0):
        """Post-process one raw conclusion: demodulate, weigh, keep or drop."""
        self.stats["generated"] += 1
        self._tick()
        demods: tuple = ()
        if self.demods:
            try:
                lits, demods = demodulate_literals(lits, self.demods, self.settings.rewrite_limit)
            except RewriteLimitExceeded:
                self.stats["rewrite_failures"] += 1
                return None
            if demods:
                lits = normalize_vars(merge_duplicates(lits))
        if not lits:
            self._found_empty(Clause((), id=self._new_id(), rule=rule,
                                     parents=parents, demods=demods))
            return None
        weight = self.weigh(lits)
        decision = self.keep_decision(lits, weight)
        base = Clause(lits, rule=rule, parents=parents, demods=demods, weight=weight)
        if decision:
            self._keep(base, heat)
        else:
            self.stats[{"tautology": "tautologies", "weight": "weight_discarded",
                        "vars": "vars_discarded", "subsumed": "forward_subsumed"}
                       [decision.reason]] += 1
        if "factor" in self.settings.rules and len(lits) > 1:
            for flits, _ in factor_literals(lits):
                self._process_factor(base, flits, heat)
        return base if decision else None

    def _process_factor(self, base: Clause, lits: tuple, heat: int):
        self.stats["generated"] += 1
        if not lits:
            return
        weight = self.weigh(lits)
        if not self.keep_decision(lits, weight):
            return
        if not base.id:
            base.id = self._new_id()
            base.origin = "derived"
            self.clauses[base.id] = base
        self._keep(Clause(lits, rule="factor", parents=(base.id,), weight=weight), heat)

    def _keep(self, c: Clause, heat: int):
        c.id = self._new_id()
        c.origin = "derived"
        self.clauses[c.id] = c
        self.stats["kept"] += 1
        self.back_subsume(c)
        self._index_kept(c)
        self.sos.add(c)
        if c.is_unit:
            self._unit_conflicts(c)
            self._check_passive(c)
        if heat == 0 and self.hot:
            self._apply_hot(c)

    def _found_empty(self, c: Clause):
        self.clauses[c.id] = c
        self.proofs.append(extract_proof(self, c))
        if len(self.proofs) >= self.settings.max_proofs:
            raise _Stop("max_proofs")

    def _unit_conflicts(self, c: Clause):
        lit = c.literals[0]
        opposite = (not lit.positive, lit.atom[0], len(lit.atom) - 1)
        renamed = suffix_vars(c.literals, "'")
        for d in list(self._units.get(opposite, ())):
            if d.id in self.retired or d is c:
                continue
            s: dict = {}
            if _unify(renamed[0].atom, d.literals[0].atom, s):
                self._found_empty(Clause((), id=self._new_id(), rule="binary",
                                         parents=(d.id, c.id)))
                return

    def _check_passive(self, c: Clause):
        for goal in check_passive(c, self.passive):
            if goal in self.passive_hit:
                continue
            self.passive_hit.add(goal)
            p = next(pc for pc in self.passive if pc.extra["goal"] == goal)
            end = Clause((), id=self._new_id(), rule="passive", parents=(c.id, p.id))
            self.clauses[end.id] = end
            self.proofs.append(extract_proof(self, end, target=goal))
            if len(self.proofs) >= self.settings.max_proofs:
                raise _Stop("max_proofs")

    def _apply_hot(self, c: Clause):
        results = []
        for h in self.hot:
            if "unit" in self.settings.rules or "binary" in self.settings.rules:
                results += unit_resolve(h, c)
            if "para" in self.settings.rules:
                results += paramodulate(h, c, self.settings.para_from_vars)
                results += paramodulate(c, h, self.settings.para_from_vars)
        for r in results:
            self.process(r.conclusion.literals, r.rule, r.parents, heat=1)

    def infer(self, g: Clause):
        """Yield every raw conclusion of the given clause with usable clauses."""
        rules = self.settings.rules
        seen: set = set()

        def emit(lits, rule, parents):
            key = (lits, rule)
            if key in seen:
                return
            seen.add(key)
            self.process(lits, rule, parents)

        gl = g.literals
        if "binary" in rules or "unit" in rules:
            rule = "binary" if "binary" in rules else "unit"
            partners: dict = {}
            for lit in gl:
                idx = self._neg if lit.positive else self._pos
                for u in idx.get(lit.atom[0], ()):
                    if self._live(u):
                        partners[u.id] = u
            for uid in sorted(partners):
                u = partners[uid]
                if rule == "unit" and not (g.is_unit or u.is_unit):
                    continue
                ul = self._rn(u, "'")
                for i, a in enumerate(gl):
                    for j, b in enumerate(ul):
                        if a.positive == b.positive or a.atom[0] != b.atom[0]:
                            continue
                        r = resolve_pair(gl, i, ul, j)
                        if r is not None:
                            emit(r[0], rule, (g.id, u.id))
        if "hyper" in rules:
            self._hyper(g, emit)
        if "para" in rules:
            self._para(g, emit)

    def _hyper(self, g: Clause, emit):
        gl = g.literals
        if any(not l.positive for l in gl):
            negs = [l for l in gl if not l.positive]
            cands = []
            for k, lit in enumerate(negs):
                suffix = f"'{k}"
                cands.append([(self._rn(u, suffix), j, u.id)
                              for u in self._sat.get(lit.atom[0], ()) if self._live(u)
                              for j, ul in enumerate(u.literals) if ul.atom[0] == lit.atom[0]])
                if not cands[-1]:
                    break
            else:
                for lits, tags, _ in hyper_search(gl, cands):
                    emit(lits, "hyper", (g.id, *tags))
        elif gl:
            preds = {l.atom[0] for l in gl}
            nuclei: dict = {}
            for p in sorted(preds):
                for n in self._neg.get(p, ()):
                    if self._live(n):
                        nuclei[n.id] = n
            for nid in sorted(nuclei):
                n = nuclei[nid]
                nl = self._rn(n, "")
                negs = [l for l in nl if not l.positive]
                for k, target in enumerate(negs):
                    if target.atom[0] not in preds:
                        continue
                    cands = []
                    for m, lit in enumerate(negs):
                        suffix = f"'{m}"
                        if m == k:
                            gr = self._rn(g, suffix)
                            cands.append([(gr, j, g.id) for j, l in enumerate(gr)
                                          if l.atom[0] == lit.atom[0]])
                        else:
                            cands.append([(self._rn(u, suffix), j, u.id)
                                          for u in self._sat.get(lit.atom[0], ())
                                          if self._live(u) and not (m < k and u is g)
                                          for j, ul in enumerate(u.literals)
                                          if ul.atom[0] == lit.atom[0]])
                        if not cands[-1]:
                            break
                    else:
                        for lits, tags, _ in hyper_search(nl, cands):
                            emit(lits, "hyper", (n.id, *tags))

    def _para(self, g: Clause, emit):
        gl = g.literals
        from_vars = self.settings.para_from_vars
        # from the given clause into usable clauses
        for i, lit in enumerate(gl):
            if not lit.positive or lit.atom[0] != EQ or lit.atom[1] == lit.atom[2]:
                continue
            for ltr in (True, False):
                side = lit.atom[1] if ltr else lit.atom[2]
                if isinstance(side, str):
                    if not from_vars:
                        continue
                    targets = self._all_into
                else:
                    targets = self._into.get(side[0], ())
                for u, j, path in list(targets):
                    if not self._live(u):
                        continue
                    r = para_pair(gl, i, ltr, self._rn(u, "'"), j, path)
                    if r is not None:
                        emit(r[0], "para", (g.id, u.id))
        # from usable equations into the given clause
        for j, lit in enumerate(gl):
            for k, arg in enumerate(lit.atom[1:], 1):
                for path, sub in subterm_positions(arg, (k,)):
                    sources = list(self._eq_sides.get(sub[0], ()))
                    if from_vars:
                        sources += self._var_sides
                    for u, i, ltr in sources:
                        if not self._live(u):
                            continue
                        r = para_pair(self._rn(u, "'"), i, ltr, gl, j, path)
                        if r is not None:
                            emit(r[0], "para", (u.id, g.id))

    # ---- main loop ---------------------------------------------------------

    def run(self) -> RunResult:
        s = self.settings
        start = time.monotonic()
        self._deadline = None if s.max_seconds is None else start + s.max_seconds
        reason = "sos-empty"
        try:
            for c in self._pending_empty:
                self._found_empty(Clause((), id=c.id, rule="input", origin="input-sos"))
            for c in self.usable:
                if c.is_unit:
                    self._check_passive(c)
            for c in list(self.sos):
                if c.is_unit:
                    self._unit_conflicts(c)
                    self._check_passive(c)
            counter = 0
            while len(self.sos):
                if self._deadline is not None and time.monotonic() > self._deadline:
                    raise _Stop("max_seconds")
                if s.max_given is not None and counter >= s.max_given:
                    raise _Stop("max_given")
                g = select_given(self.sos, counter, s)
                counter += 1
                self.stats["given"] += 1
                self._add_usable(g)
                self.infer(g)
        except _Stop as stop:
            reason = str(stop)
        return RunResult(self.proofs, reason, dict(self.stats), time.monotonic() - start)


def check_passive(c: Clause, passive: Sequence[Clause]) -> list:
    """Goal numbers of unit passive clauses that clash with the unit ``c``."""
    if not c.is_unit:
        return []
    lit = c.literals[0]
    renamed = suffix_vars(c.literals, "'")[0]
    hits = []
    for p in passive:
        if not p.is_unit:
            continue
        q = p.literals[0]
        if q.positive == lit.positive or q.atom[0] != lit.atom[0]:
            continue
        s: dict = {}
        if _unify(renamed.atom, q.atom, s):
            hits.append(p.extra.get("goal", p.id))
    return hits


def extract_proof(state: Saturation, final: Clause, target="main") -> Proof:
    """Collect the derivation of ``final``, ordered by clause id."""
    needed: dict = {}
    stack = [final]
    while stack:
        c = stack.pop()
        if c.id in needed:
            continue
        needed[c.id] = c
        for pid in (*c.parents, *c.demods):
            if pid not in needed:
                stack.append(state.clauses[pid])
    steps = []
    for cid in sorted(needed):
        c = needed[cid]
        rule = "input" if c.origin != "derived" and c.rule is None else c.rule
        steps.append(ProofStep(cid, Clause(c.literals), rule, tuple(c.parents), tuple(c.demods)))
    return Proof(steps, target, state.problem.name, state.settings.digest())


def search(problem: ProblemSpec) -> RunResult:
    """Run the given-clause loop and return whatever was found, proof or not."""
    return Saturation(problem).run()


def saturate(problem: ProblemSpec) -> RunResult:
    """Run the given-clause loop; raise :class:`ResourceExhausted` without a main proof.

    The exception carries the partial :class:`RunResult`, so passive-goal
    proofs found along the way are not lost.
    """
    result = search(problem)
    if not result.proved:
        raise ResourceExhausted(result.reason, result)
    return result


def prove(problem: ProblemSpec) -> Proof:
    """The first main-goal proof of ``problem``."""
    return saturate(problem).proof


def level_saturate(problem: ProblemSpec, start: int = 1) -> RunResult:
    """Re-run with ``max_weight`` = start, start+1, ... up to the configured limit."""
    limit = problem.settings.max_weight
    result = None
    for w in range(start, limit + 1):
        result = search(problem.copy(settings=problem.settings.with_(max_weight=w)))
        if result.proved:
            break
    return result


# --------------------------------------------------------------------------
# Replay
# --------------------------------------------------------------------------

@dataclass
class Verification:
    ok: bool
    failed_step: Optional[int] = None
    reason: str = ""

    def __bool__(self):
        return self.ok


def replay_candidates(step: ProofStep, parents: list, demods: list) -> list:
    """Clauses the step's rule produces from its parents (before comparison)."""
    rule = step.rule
    if rule in ("binary", "unit") and len(parents) == 2:
        fn = binary_resolve if rule == "binary" else unit_resolve
        res = fn(parents[0], parents[1]) + fn(parents[1], parents[0])
    elif rule == "hyper" and len(parents) >= 2:
        res = hyper_resolvents(parents[0], parents[1:])
    elif rule == "para" and len(parents) == 2:
        res = paramodulate(parents[0], parents[1])
    elif rule == "factor" and len(parents) == 1:
        res = factor(parents[0])
    elif rule == "passive" and len(parents) == 2:
        a, b = parents
        res = [r for r in binary_resolve(a, b) if r.conclusion.is_empty] \
            if a.is_unit and b.is_unit else []
    else:
        return []
    out = []
    for r in res:
        lits = r.conclusion.literals
        if demods:
            lits, _ = demodulate_literals(lits, demods)
            lits = merge_duplicates(lits)
        out.append(Clause(lits))
    return out


def verify_proof(pf: Proof, inputs: Optional[Sequence[Clause]] = None) -> Verification:
    """Replay every step; report the first one that cannot be re-derived."""
    known: dict = {}
    for step in pf.steps:
        if step.id in known:
            return Verification(False, step.id, "duplicate step id")
        if step.rule == "input":
            if inputs is not None and not any(variant(step.clause, c) for c in inputs):
                return Verification(False, step.id, "input clause not among the inputs")
            known[step.id] = step.clause
            continue
        missing = [p for p in (*step.parents, *step.demods) if p not in known]
        if missing:
            return Verification(False, step.id, f"unknown parents {missing}")
        parents = [Clause(known[p].literals, id=p) for p in step.parents]
        try:
            demods = [Demodulator(Clause(known[d].literals, id=d)) for d in step.demods]
        except ValueError as exc:
            return Verification(False, step.id, str(exc))
        if not any(variant(step.clause, c) for c in replay_candidates(step, parents, demods)):
            return Verification(False, step.id, f"{step.rule} does not yield the recorded clause")
        known[step.id] = step.clause
    if not pf.steps:
        return Verification(False, None, "empty proof")
    last = pf.steps[-1]
    if not last.clause.is_empty:
        return Verification(False, last.id, "proof does not end in the empty clause")
    return Verification(True)
