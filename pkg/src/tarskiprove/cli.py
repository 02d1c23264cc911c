"""Command-line front end: prove, batch, check-master, gen, verify, hints."""

from __future__ import annotations

import argparse
import csv
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .corpus import (
    MasterList,
    MasterListError,
    build_problem,
    check_master_list,
    load_master_list,
    select_theorems,
    starter_corpus,
)
from .problemfile import ProblemFileError, format_problem, read_problem
from .saturation import (
    ALL_RULES,
    ProblemSpec,
    ProofFormatError,
    ResourceExhausted,
    Settings,
    parse_proof,
    saturate,
    verify_proof,
)
from .strategies import (
    HintSet,
    extract_hints_from_proof,
    generate_subformula_hints,
    with_hints,
)

log = logging.getLogger("tarskiprove")

EXIT_OK, EXIT_NO_PROOF, EXIT_INPUT, EXIT_VERIFY = 0, 1, 2, 3
LEDGER_FIELDS = ("theorem", "stage", "strategy", "status", "length", "given",
                 "seconds", "settings", "proof_file")
STAGES = ("plain", "diagram", "subformula", "hints", "cases")


# --------------------------------------------------------------------------
# Shared helpers
# --------------------------------------------------------------------------

def settings_from_args(args, base: Optional[Settings] = None) -> Settings:
    changes = {}
    for name in ("max_weight", "max_seconds", "pick_given_ratio", "max_distinct_vars",
                 "max_proofs"):
        value = getattr(args, name, None)
        if value is not None:
            changes[name] = value
    if getattr(args, "rules", None):
        changes["rules"] = tuple(r.strip() for r in args.rules.split(",") if r.strip())
    return (base or Settings()).with_(**changes)


def load_master(args) -> MasterList:
    path = getattr(args, "master", None)
    return load_master_list(path) if path else starter_corpus()


def proof_hints(directory: Optional[str], name: str) -> Optional[HintSet]:
    """Hints from ``<directory>/<name>.proof``; ``None`` when absent."""
    if not directory:
        return None
    path = Path(directory) / f"{name}.proof"
    if not path.is_file():
        return None
    return extract_hints_from_proof(path)


def corpus_problem(m: MasterList, name: str, args, settings: Settings) -> ProblemSpec:
    entry = m.theorem(name)
    use_diagram = args.diagram if args.diagram is not None else bool(entry.diagram)
    p = build_problem(m, name, use_diagram=use_diagram, use_cases=args.cases, settings=settings)
    if args.subformula:
        p = with_hints(p, generate_subformula_hints(p.sos))
    if args.hints_from:
        hints = proof_hints(args.hints_from, name)
        if hints is None:
            log.warning("no proof file for %s in %s; continuing without hints", name, args.hints_from)
        else:
            p = with_hints(p, hints)
    return p


def _status(reason: str) -> str:
    return "timeout" if reason in ("max_seconds", "max_given") else "exhausted"


# --------------------------------------------------------------------------
# prove / verify / hints
# --------------------------------------------------------------------------

def cmd_prove(args) -> int:
    target = args.target
    settings = settings_from_args(args)
    path = Path(target)
    try:
        if path.suffix in (".in", ".otter", ".problem") or path.is_file():
            if not path.is_file():
                print(f"error: file not found: {target}", file=sys.stderr)
                return EXIT_INPUT
            p = read_problem(path)
            p = p.copy(settings=settings_from_args(args, p.settings))
            if args.subformula:
                p = with_hints(p, generate_subformula_hints(p.sos))
        else:
            m = load_master(args)
            p = corpus_problem(m, target, args, settings)
    except (ProblemFileError, MasterListError) as exc:
        print(f"error: parse: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return EXIT_INPUT

    start = time.monotonic()
    try:
        result = saturate(p)
    except ResourceExhausted as exc:
        res = exc.result
        print(f"{p.name}: no proof ({_status(exc.reason)}: {exc.reason}) "
              f"given={res.stats['given'] if res else 0} "
              f"seconds={time.monotonic() - start:.2f}")
        return EXIT_NO_PROOF
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    main_file = out / f"{p.name}.proof"
    main_file.write_text(result.proof.to_text())
    for pf in result.proofs:
        if pf.target != "main":
            (out / f"{p.name}.goal{pf.target}.proof").write_text(pf.to_text())
    check = verify_proof(result.proof, p.usable + p.sos + [c for _, c in p.passive]
                         + p.demodulators + p.hot)
    if not check:
        print(f"{p.name}: proof failed verification at step {check.failed_step}: {check.reason}")
        return EXIT_VERIFY
    print(f"{p.name}: proved length={result.proof.length} given={result.stats['given']} "
          f"seconds={result.seconds:.2f} proof={main_file}")
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        pf = parse_proof(Path(args.proof).read_text())
    except FileNotFoundError:
        print(f"error: file not found: {args.proof}", file=sys.stderr)
        return EXIT_INPUT
    except ProofFormatError as exc:
        print(f"error: parse: {exc}", file=sys.stderr)
        return EXIT_INPUT
    inputs = None
    if args.problem:
        p = read_problem(args.problem)
        inputs = p.usable + p.sos + [c for _, c in p.passive] + p.demodulators + p.hot
    check = verify_proof(pf, inputs)
    if check:
        print(f"{args.proof}: ok ({pf.length} derived steps)")
        return EXIT_OK
    print(f"{args.proof}: FAILED at step {check.failed_step}: {check.reason}")
    return EXIT_VERIFY


def cmd_hints(args) -> int:
    try:
        hints = extract_hints_from_proof(Path(args.proof))
    except FileNotFoundError:
        print(f"error: file not found: {args.proof}", file=sys.stderr)
        return EXIT_INPUT
    except ProofFormatError as exc:
        print(f"error: parse: {exc}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(hints.to_text())
    return EXIT_OK


# --------------------------------------------------------------------------
# check-master / gen
# --------------------------------------------------------------------------

def cmd_check_master(args) -> int:
    try:
        m = load_master_list(args.file) if args.file else starter_corpus()
    except FileNotFoundError:
        print(f"error: file not found: {args.file}", file=sys.stderr)
        return 1
    except MasterListError as exc:
        for d in exc.diagnostics:
            print(f"error: {d}")
        return 1
    report = check_master_list(m)
    print(report.render())
    return 0 if report.clean else 1


def cmd_gen(args) -> int:
    try:
        m = load_master(args)
        names = select_theorems(m, args.names, args.chapter or ())
    except (MasterListError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report = check_master_list(m)
    if not report.clean:
        print(report.render(), file=sys.stderr)
        return EXIT_INPUT
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    settings = settings_from_args(args)
    for name in names:
        p = corpus_problem(m, name, args, settings)
        dest = out / f"{name}.in"
        dest.write_text(format_problem(p))
        print(dest)
    return EXIT_OK


# --------------------------------------------------------------------------
# batch
# --------------------------------------------------------------------------

@dataclass
class BatchConfig:
    names: Sequence[str] = ()
    chapters: Sequence[str] = ()
    flags: Sequence[str] = ()
    only_unproved: bool = False
    settings: Settings = field(default_factory=Settings)
    diagram: bool = True
    cases: bool = True
    subformula: bool = True
    hints_from: Optional[str] = None
    out: str = "batch-out"
    ledger: Optional[str] = None
    jobs: int = 1

    @property
    def ledger_path(self) -> Path:
        return Path(self.ledger) if self.ledger else Path(self.out) / "ledger.tsv"


def escalation(m: MasterList, name: str, cfg: BatchConfig) -> list:
    """The (stage, strategy, problem) attempts for one theorem, in order.

    Stages that would repeat an earlier problem are skipped.
    """
    entry = m.theorem(name)
    settings = cfg.settings
    use_diagram = False
    hints = HintSet()
    use_cases = False
    attempts = []
    strategy: list = []
    for stage in STAGES:
        if stage == "diagram":
            if not (cfg.diagram and entry.diagram):
                continue
            use_diagram = True
        elif stage == "subformula":
            if not cfg.subformula:
                continue
            hints = hints.merged(generate_subformula_hints(entry.negated_form))
        elif stage == "hints":
            found = proof_hints(cfg.hints_from, name)
            if found is None:
                continue
            hints = hints.merged(found)
        elif stage == "cases":
            if not (cfg.cases and entry.cases):
                continue
            use_cases = True
        strategy.append(stage)
        p = build_problem(m, name, use_diagram=use_diagram, use_cases=use_cases,
                          hints=list(hints), settings=settings)
        attempts.append((STAGES.index(stage) + 1, "+".join(strategy), p))
    return attempts


def run_theorem(m: MasterList, name: str, cfg: BatchConfig) -> list:
    """Try the escalation stages for one theorem; ledger rows for every attempt."""
    rows = []
    out = Path(cfg.out)
    for stage, strategy, p in escalation(m, name, cfg):
        row = dict(theorem=name, stage=stage, strategy=strategy, length="", given="",
                   seconds="", settings=p.settings.digest(), proof_file="")
        start = time.monotonic()
        try:
            result = saturate(p)
        except ResourceExhausted as exc:
            row.update(status=_status(exc.reason),
                       given=exc.result.stats["given"] if exc.result else 0)
        except Exception as exc:  # recorded, the batch goes on
            row.update(status="error", strategy=f"{strategy} ({type(exc).__name__}: {exc})")
        else:
            dest = out / "proofs" / f"{name}.proof"
            dest.parent.mkdir(parents=True, exist_ok=True)
            dest.write_text(result.proof.to_text())
            ok = verify_proof(result.proof)
            row.update(status="proved" if ok else "error", length=result.proof.length,
                       given=result.stats["given"], proof_file=str(dest))
        row["seconds"] = f"{time.monotonic() - start:.2f}"
        rows.append(row)
        if row["status"] == "proved":
            break
    return rows


def _run_theorem_job(payload):
    m, name, cfg = payload
    return run_theorem(m, name, cfg)


def proved_in_ledger(path: Path) -> set:
    if not path.is_file():
        return set()
    with path.open(newline="") as fh:
        return {r["theorem"] for r in csv.DictReader(fh, delimiter="\t") if r.get("status") == "proved"}


def append_ledger(path: Path, rows: list) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    new = not path.is_file() or path.stat().st_size == 0
    with path.open("a", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=LEDGER_FIELDS, delimiter="\t", lineterminator="\n")
        if new:
            w.writeheader()
        for r in rows:
            w.writerow({k: r.get(k, "") for k in LEDGER_FIELDS})


def run_batch(m: MasterList, cfg: BatchConfig) -> list:
    """Attempt every selected theorem; append one ledger row per attempt."""
    names = select_theorems(m, cfg.names, cfg.chapters, cfg.flags)
    if not names:
        raise ValueError("the selector matches no theorem")
    if cfg.only_unproved:
        done = proved_in_ledger(cfg.ledger_path)
        names = [n for n in names if n not in done]
    jobs = [(m, n, cfg) for n in names]
    if cfg.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_run_theorem_job, jobs))
    else:
        results = [_run_theorem_job(j) for j in jobs]
    rows = [r for rs in results for r in rs]
    append_ledger(cfg.ledger_path, rows)
    return rows


def cmd_batch(args) -> int:
    try:
        m = load_master(args)
    except MasterListError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    base = settings_from_args(args)
    cfg = BatchConfig(
        names=args.names, chapters=args.chapter or (), flags=args.flag or (),
        only_unproved=args.only_unproved, settings=base,
        diagram=args.diagram is not False, cases=True, subformula=True,
        hints_from=args.hints_from, out=args.out, ledger=args.ledger, jobs=args.jobs)
    try:
        rows = run_batch(m, cfg)
    except (KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    final = {}
    for r in rows:
        final[r["theorem"]] = r
    for name, r in final.items():
        print(f"{name}\t{r['status']}\t{r['strategy']}\t{r['length']}\t{r['seconds']}")
    proved = sum(r["status"] == "proved" for r in final.values())
    print(f"proved {proved}/{len(final)}; ledger {cfg.ledger_path}")
    return EXIT_OK


# --------------------------------------------------------------------------
# Argument parsing
# --------------------------------------------------------------------------

def _rules(text: str) -> str:
    bad = [r for r in text.split(",") if r.strip() and r.strip() not in ALL_RULES]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown rule(s) {bad}; choose from {ALL_RULES}")
    return text


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("search settings")
    g.add_argument("--max-weight", type=int)
    g.add_argument("--max-seconds", type=float)
    g.add_argument("--pick-given-ratio", type=int)
    g.add_argument("--max-distinct-vars", type=int)
    g.add_argument("--max-proofs", type=int)
    g.add_argument("--rules", type=_rules, help=f"comma-separated subset of {','.join(ALL_RULES)}")
    s = common.add_argument_group("strategies")
    s.add_argument("--subformula", action="store_true", help="add subformula hints")
    s.add_argument("--diagram", action=argparse.BooleanOptionalAction, default=None,
                   help="include diagram equations (default: when the entry has them)")
    s.add_argument("--cases", action="store_true", help="adjoin the entry's case tautologies")
    s.add_argument("--hints-from", metavar="DIR", help="take hints from DIR/<name>.proof")
    s.add_argument("--jobs", type=int, default=1)
    common.add_argument("--master", metavar="FILE", help="master list (default: starter corpus)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="tarskiprove", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prove", parents=[common], help="prove a theorem or problem file")
    p.add_argument("target", help="theorem name or problem file")
    p.add_argument("--out", default="proofs", help="directory for proof files")
    p.set_defaults(func=cmd_prove)

    b = sub.add_parser("batch", parents=[common], help="run many theorems with escalation")
    b.add_argument("names", nargs="*")
    b.add_argument("--chapter", action="append")
    b.add_argument("--flag", action="append", help="select entries carrying this flag")
    b.add_argument("--only-unproved", action="store_true")
    b.add_argument("--out", default="batch-out")
    b.add_argument("--ledger", help="ledger file (default: OUT/ledger.tsv)")
    b.set_defaults(func=cmd_batch)

    c = sub.add_parser("check-master", help="check a master list")
    c.add_argument("file", nargs="?")
    c.set_defaults(func=cmd_check_master)

    gen = sub.add_parser("gen", parents=[common], help="write problem files")
    gen.add_argument("names", nargs="*")
    gen.add_argument("--chapter", action="append")
    gen.add_argument("--out", default="problems")
    gen.set_defaults(func=cmd_gen)

    v = sub.add_parser("verify", help="replay a proof file")
    v.add_argument("proof")
    v.add_argument("--problem", help="problem file whose clauses the inputs must come from")
    v.set_defaults(func=cmd_verify)

    h = sub.add_parser("hints", help="print the hints extracted from a proof file")
    h.add_argument("proof")
    h.set_defaults(func=cmd_hints)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
