"""Command-line front end: ``freedl <command> ...``.

Exit codes: 0 satisfiable, 1 unsatisfiable (possibly only up to bounds),
2 errors and exhausted budgets.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

from . import counting, decide, reductions as red
from .encoders import encode_minsky, eliminate_u_for_encoding
from .parser import ParseError, parse_document, parse_minsky, print_concept, print_ontology
from .semantics import (KStarN, KfStarN, Kn, LTLFinite, LTLInfinitePrefix, ModelBounds,
                        ResourceError, S5n, format_model, model_to_dict, oracle_sat)
from .syntax import Ontology, has_iota, individuals, modal_depth

EXIT = {"sat": 0, "unsat": 1, "unsat-up-to-bounds": 1, "budget-exhausted": 2, "error": 2}


class Report:
    def __init__(self, command: str):
        self.data = {"command": command, "verdict": None, "pipeline": [], "fresh": {}}
        self.t0 = time.perf_counter()

    def step(self, name: str, result=None):
        self.data["pipeline"].append(name)
        if result is not None and getattr(result, "fresh", None):
            self.data["fresh"].update({k: _show(v) for k, v in result.fresh.items()})

    def done(self, args, status: str) -> int:
        """Finish a command that transforms rather than decides."""
        self.data["status"] = status
        self.finish(args, None)
        return 0

    def finish(self, args, verdict: str | None, **extra):
        self.data["verdict"] = verdict
        self.data.update(extra)
        if not args.deterministic:
            self.data["seconds"] = round(time.perf_counter() - self.t0, 4)
        return EXIT.get(verdict, 0)


def _show(v):
    try:
        return print_concept(v)
    except Exception:
        return str(v)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _load(path: str):
    doc = parse_document(_read(path), counting=True)
    return doc.goal, doc.ontology


def _emit(args, report: Report, text: str | None = None):
    if args.json:
        print(json.dumps(report.data, indent=2, sort_keys=True))
    elif text is not None:
        print(text)


# ------------------------------------------------------------------ parse

def cmd_parse(args, report):
    goal, o = _load(args.file)
    report.data.update(cis=len(o), goal=_show(goal) if goal is not None else None,
                       modalities=o.modality_count, individuals=individuals(
                           [o] + ([goal] if goal is not None else [])))
    report.done(args, "parsed")
    _emit(args, report, print_ontology(o, goal).rstrip())
    return 0


# ----------------------------------------------------------------- reduce

def _needs_goal(goal):
    if goal is None:
        raise ValueError("this reduction needs a goal concept in the input")
    return goal


def _reduce(kind: str, goal, o, args):
    """Returns (goal, ontology, ReductionResult)."""
    concept_only = len(o) == 0
    pair = (goal, o)
    if kind == "rda":
        if concept_only:
            c = red.enforce_rda_concept_total(_needs_goal(goal), args.designation)
            return c, o, red.ReductionResult(c)
        r = red.enforce_rda_ontology(pair)
    elif kind == "totalize":
        r = red.totalize_concept(_needs_goal(goal)) if concept_only else red.totalize_ontology(pair)
    elif kind == "partialize":
        r = red.partialize_concept(_needs_goal(goal)) if concept_only else red.partialize_ontology(pair)
    elif kind == "normalize":
        r = red.normalize_concept_result(_needs_goal(goal)) if concept_only else red.normalize_ontology(pair)
    elif kind == "elim-u":
        r = red.eliminate_universal_role(pair)
    elif kind == "nominals-to-iota":
        r = red.nominals_to_iota(_needs_goal(goal) if concept_only else pair)
    elif kind == "iota-to-nominals":
        f = red.iota_pipeline_total if args.designation == "total" else red.iota_pipeline_partial
        r = f(_needs_goal(goal), None if concept_only else o)
    elif kind == "relativize":
        r = red.relativize_to_constant((_needs_goal(goal), o))
    elif kind == "elo-disjunction":
        r = red.eliminate_disjunction_elo(o, finite=args.finite)
        return goal, r.output, r
    elif kind == "elo-bottom":
        r = red.eliminate_bot_elo(o)
        return goal, r.output, r
    else:
        raise ValueError(f"unknown reduction {kind!r}")
    out = r.output
    if isinstance(out, tuple):
        return out[0], out[1] if out[1] is not None else o, r
    if isinstance(out, Ontology):
        return goal, out, r
    return out, o, r


def cmd_reduce(args, report):
    goal, o = _load(args.file)
    g2, o2, r = _reduce(args.kind, goal, o, args)
    report.step(args.kind, r)
    text = print_ontology(o2, g2)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    report.data.update(cis=len(o2), notes=getattr(r, "notes", {}))
    report.done(args, "reduced")
    _emit(args, report, None if args.output else text.rstrip())
    return 0


# -------------------------------------------------------------------- sat

LOGICS = ("alcou", "kn", "s5n", "ltlf-next", "ltl-next", "kfn")


def _oracle_frame(logic: str, n: int, length: int):
    return {"alcou": Kn(1), "kn": Kn(n), "s5n": S5n(n), "ltlf-next": LTLFinite(length),
            "ltl-next": LTLInfinitePrefix(length), "kfn": KfStarN(n)}[logic]


def _fallback(args, report, goal, o, why):
    """Bounded oracle search when no complete procedure applies."""
    report.step(f"oracle-fallback ({why})")
    n = max(1, o.modality_count if len(o) else max(1, _max_index(goal)))
    length = modal_depth(goal) + 1
    b = ModelBounds(args.worlds, args.domain, _oracle_frame(args.logic, n, length),
                    args.domains, args.designation, args.rda)
    r = oracle_sat(goal, o, b)
    report.data["bounds"] = b.describe()
    return r.verdict, r.witness


def _max_index(c):
    from .syntax import modal_indices
    return max(modal_indices(c), default=1)


def cmd_sat(args, report):
    goal, o = _load(args.file)
    goal = _needs_goal(goal)
    logic = args.logic
    if logic == "alcou" and args.domains == "expanding":
        args.domains = "constant"       # one world: the distinction is void
    # rigid designation first, before any fresh non-rigid names appear
    if args.rda:
        if len(o):
            r = red.enforce_rda_ontology((goal, o))
            goal, o = r.output
            report.step("enforce_rda_ontology")
        elif args.designation == "total":
            goal = red.enforce_rda_concept_total(goal)
            report.step("enforce_rda_concept")
        else:
            verdict, w = _fallback(args, report, goal, o, "no RDA elimination for partial concepts")
            return _finish_sat(args, report, verdict, w)
    if args.domains == "expanding" and logic != "kfn":
        if args.designation == "total":
            goal, o = _to_partial(goal, o, report)
        r = red.relativize_to_constant((goal, o))
        goal, o = r.output
        o = o if o is not None else Ontology((), 1)
        report.step("relativize_to_constant", r)
        designation = "partial"
    elif args.domains == "constant" and logic == "kfn":
        verdict, w = _fallback(args, report, goal, o, "kfn search assumes expanding domains")
        return _finish_sat(args, report, verdict, w)
    else:
        designation = args.designation
    if has_iota(goal) or has_iota(o):
        f = red.iota_pipeline_total if designation == "total" else red.iota_pipeline_partial
        r = f(goal, o if len(o) else None)
        goal, o = r.output if isinstance(r.output, tuple) else (r.output, o)
        report.step("eliminate_descriptions", r)
    if designation == "partial":
        r = red.partialize_ontology((goal, o)) if len(o) else red.partialize_concept(goal)
        goal, o = r.output if isinstance(r.output, tuple) else (r.output, o)
        report.step("partial_to_total", r)
    if len(o) and logic != "alcou":
        raise decide.FragmentError(f"--logic {logic} decides concepts only; drop the ontology")
    report.step(f"decide:{logic}")
    witness = None
    if logic == "alcou":
        r = decide.alcou_sat(goal, o if len(o) else None)
        verdict, witness = ("sat", r.model) if r.sat else ("unsat", None)
    elif logic in ("kn", "s5n"):
        f = decide.kn_sat if logic == "kn" else decide.s5n_sat
        r = f(goal, max_tracked=args.tracked)
        verdict = "sat" if r.sat else "unsat"
        witness = r.witness.model if r.sat else None
        report.data["tracked_elements_searched"] = r.searched_tracked
    elif logic in ("ltlf-next", "ltl-next"):
        r = decide.ltl_next_sat(goal, "finite" if logic == "ltlf-next" else "infinite")
        verdict, witness = ("sat", r.model) if r.sat else ("unsat", None)
        if r.sat:
            report.data["instants"] = r.m0 + 1
    else:
        r = decide.kfn_sat_budgeted(goal, max_worlds=args.budget)
        verdict = "sat" if r.sat else "unsat-up-to-bounds"
        witness = r.model
        report.data["bounds"] = f"trees with at most {args.budget} worlds"
        if r.sat:
            report.data["canonical"] = r.witness["canonical"]
    return _finish_sat(args, report, verdict, witness)


def _to_partial(goal, o, report):
    r = red.totalize_ontology((goal, o)) if len(o) else red.totalize_concept(goal)
    report.step("total_to_partial", r)
    return r.output if isinstance(r.output, tuple) else (r.output, o)


def _finish_sat(args, report, verdict, witness):
    code = report.finish(args, verdict)
    if witness is not None and args.witness:
        report.data["witness"] = model_to_dict(witness)
    text = verdict
    if witness is not None and args.witness:
        text += "\n" + format_model(witness)
    _emit(args, report, text)
    return code


# ----------------------------------------------------------------- oracle

FRAMES = {"kn": Kn, "s5n": S5n, "kstar": KStarN, "kfstar": KfStarN,
          "ltlf": LTLFinite, "ltli": LTLInfinitePrefix}


def cmd_oracle(args, report):
    goal, o = _load(args.file)
    fc = FRAMES[args.frames](args.n if args.frames not in ("ltlf", "ltli") else args.worlds)
    b = ModelBounds(args.worlds, args.domain, fc, args.domains, args.designation, args.rda)
    r = oracle_sat(goal, o, b, engine=args.engine)
    report.data["bounds"] = b.describe()
    return _finish_sat(args, report, r.verdict, r.witness)


# --------------------------------------------------------------- counting

def cmd_counting(args, report):
    goal, o = _load(args.file)
    if args.direction == "to-alcou":
        r = counting.mldiff_to_mlalcou((goal, o) if len(o) else _needs_goal(goal))
        out = r.output
        g2, o2 = out if isinstance(out, tuple) else (out, o)
        report.step("mldiff_to_mlalcou", r)
        text = print_ontology(o2, g2)
    else:
        cands, o2 = counting.mlalcou_to_mldiff(_needs_goal(goal), o, cap=args.cap)
        report.step("mlalcou_to_mldiff")
        report.data["candidates"] = [print_concept(c) for c in cands]
        text = print_ontology(o2) + "".join(f"# candidate: {print_concept(c)}\n" for c in cands)
    report.done(args, "translated")
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
        text = None
    _emit(args, report, text.rstrip() if text else None)
    return 0


# ----------------------------------------------------------------- encode

def cmd_encode(args, report):
    m = parse_minsky(_read(args.file))
    o, goal = encode_minsky(m, args.mode)
    report.step(f"encode_minsky:{args.mode}")
    if args.no_u:
        o = eliminate_u_for_encoding(o)
        report.step("eliminate_universal_role")
    text = print_ontology(o, goal)
    report.data.update(cis=len(o), states=len(m.states))
    report.done(args, "encoded")
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
        text = None
    _emit(args, report, text.rstrip() if text else None)
    return 0


# --------------------------------------------------------------- selftest

def cmd_selftest(args, report):
    from .acceptance import run_all
    lines = []
    results = run_all(quick=args.quick, out=(lambda s: None) if args.json else print)
    for r in results:
        lines.append({"criterion": r.number, "ok": r.ok, "line": r.line() if not args.deterministic
                      else r.line().rsplit(" (", 1)[0]})
    passed = sum(r.ok for r in results)
    report.data.update(results=lines, passed=passed, total=len(results))
    report.done(args, "passed" if passed == len(results) else "failed")
    if args.json:
        print(json.dumps(report.data, indent=2, sort_keys=True))
    else:
        print(f"{passed}/{len(results)} criteria pass")
    return 0 if passed == len(results) else 1


# ------------------------------------------------------------------ main

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print a JSON report")
    common.add_argument("--deterministic", action="store_true",
                        help="leave timings out so reports are byte-identical")

    def modes(p):
        p.add_argument("--designation", choices=("partial", "total"), default="partial")
        p.add_argument("--domains", choices=("constant", "expanding"), default="constant")
        p.add_argument("--rda", action="store_true", help="names are rigid")

    ap = argparse.ArgumentParser(prog="freedl", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", parents=[common], help="parse and pretty-print a .fdl file")
    p.add_argument("file")

    p = sub.add_parser("reduce", parents=[common], help="apply one reduction")
    p.add_argument("kind", choices=("rda", "totalize", "partialize", "normalize", "elim-u",
                                    "nominals-to-iota", "iota-to-nominals", "relativize",
                                    "elo-disjunction", "elo-bottom"))
    p.add_argument("file")
    p.add_argument("-o", "--output")
    p.add_argument("--designation", choices=("partial", "total"), default="partial")
    p.add_argument("--finite", action="store_true", help="finite flows (ELO rewrites)")

    p = sub.add_parser("sat", parents=[common], help="decide satisfiability of the goal")
    p.add_argument("file")
    p.add_argument("--logic", choices=LOGICS, required=True)
    modes(p)
    p.add_argument("--budget", type=int, default=3, help="kfn: largest tree size")
    p.add_argument("--tracked", type=int, default=None, help="kn/s5n: cap on tracked elements")
    p.add_argument("--worlds", type=int, default=3, help="oracle fallback bound")
    p.add_argument("--domain", type=int, default=3, help="oracle fallback bound")
    p.add_argument("--witness", action="store_true", help="include the model")

    p = sub.add_parser("oracle", parents=[common], help="bounded model search")
    p.add_argument("file")
    p.add_argument("--frames", choices=sorted(FRAMES), default="kn")
    p.add_argument("-n", type=int, default=1, help="number of base modalities")
    p.add_argument("--worlds", type=int, default=2)
    p.add_argument("--domain", type=int, default=2)
    p.add_argument("--engine", choices=("sat", "enumerate"), default="sat")
    p.add_argument("--witness", action="store_true")
    modes(p)

    p = sub.add_parser("counting", parents=[common], help="counting-quantifier translations")
    p.add_argument("direction", choices=("to-alcou", "to-diff"))
    p.add_argument("file")
    p.add_argument("-o", "--output")
    p.add_argument("--cap", type=int, default=counting.DEFAULT_COUNTING_CAP)

    p = sub.add_parser("encode", parents=[common], help="encode a Minsky machine")
    p.add_argument("what", choices=("minsky",))
    p.add_argument("file")
    p.add_argument("--mode", choices=("finite", "infinite"), default="finite")
    p.add_argument("--no-u", action="store_true", help="also eliminate the universal role")
    p.add_argument("-o", "--output")

    p = sub.add_parser("selftest", parents=[common], help="run the acceptance suite")
    p.add_argument("--quick", action="store_true", help="small instance counts")
    return ap


COMMANDS = {"parse": cmd_parse, "reduce": cmd_reduce, "sat": cmd_sat, "oracle": cmd_oracle,
            "counting": cmd_counting, "encode": cmd_encode, "selftest": cmd_selftest}


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    report = Report(args.command)
    try:
        return COMMANDS[args.command](args, report)
    except (ParseError, ValueError, ResourceError, OSError) as e:
        kind = ("budget-exhausted" if isinstance(e, ResourceError) else "error")
        code = getattr(e, "code", None)
        report.data.update(error=str(e), error_code=code if isinstance(code, str) else None)
        span = getattr(e, "span", None)
        if span is not None:
            report.data["location"] = {"line": span.line, "column": span.column}
        report.finish(args, kind)
        if args.json:
            print(json.dumps(report.data, indent=2, sort_keys=True))
        print(f"freedl: {e}", file=sys.stderr)
        return EXIT[kind]


if __name__ == "__main__":
    sys.exit(main())
