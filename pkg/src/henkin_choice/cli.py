"""Command-line front end: ``henkin-choice {claims,eval,enumerate,construct}``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import warnings
from typing import Optional, Sequence

from . import claims as claims_mod
from .choice_constructions import (
    ChoiceInput,
    FidelityError,
    PreconditionError,
    _sigma2,
    _sigma3,
    is_choice_relation,
)
from .evaluator import Assignment, evaluate
from .formula import FormulaError, IndivVar, PredVar
from .predicate_domain import (
    CertificateError,
    EnumerationGuardError,
    FidelityWarning,
    QuantifierPolicy,
    Strategy,
    build_model,
)
from .syntax import ParseError, parse

log = logging.getLogger("henkin_choice")


def _kv(items: Optional[Sequence[str]], what: str) -> dict[str, str]:
    out = {}
    for it in items or ():
        if "=" not in it:
            raise SystemExit(f"{what} must look like name=value, got {it!r}")
        k, v = it.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _dump(obj, path: Optional[str]) -> None:
    text = json.dumps(obj, indent=2, sort_keys=False, default=str)
    if path and path != "-":
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _structure(args):
    kw = {}
    if args.s_univ is not None:
        kw["s_univ"] = args.s_univ
    if args.s_exist is not None:
        kw["s_exist"] = args.s_exist
    policy = None
    if kw or args.providers or args.strategy:
        base = QuantifierPolicy(s_univ=kw.get("s_univ", 0 if args.model == "full" else 1))
        policy = base.with_(**kw, providers=tuple(p for p in (args.providers or "").split(",") if p),
                            strategy=Strategy(args.strategy or "hybrid"))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", FidelityWarning)
        h = build_model(args.model, args.size, args.size1, policy)
    for w in caught:
        log.warning("%s", w.message)
    return h


def _add_structure_args(p: argparse.ArgumentParser, models=("sigma0", "sigma2", "sigma3", "full")) -> None:
    p.add_argument("--model", required=True, choices=models)
    p.add_argument("--size", type=int, required=True, help="N (part-0 size for sigma3)")
    p.add_argument("--size1", type=int, default=None, help="part-1 size for sigma3 (default: --size)")
    p.add_argument("--s-univ", type=int, default=None)
    p.add_argument("--s-exist", type=int, default=None)
    p.add_argument("--providers", default=None, help="comma-separated witness providers")
    p.add_argument("--strategy", choices=[s.value for s in Strategy], default=None)


# -- subcommands -------------------------------------------------------------------

def cmd_claims_list(args) -> int:
    out = {"claims": [c.to_json() for c in claims_mod.registry()],
           "annotations": [a.to_json() for a in claims_mod.annotations()]}
    if args.json:
        _dump(out, args.json)
        return 0
    for c in claims_mod.registry():
        print(f"{c.id:40s} expected={c.expected:18s} {c.statement}")
    for a in claims_mod.annotations():
        ref = f" [{', '.join(a.claims)}]" if a.claims else ""
        print(f"{a.id:40s} annotation:{a.status}{ref} {a.statement}")
    return 0


def cmd_claims_run(args) -> int:
    params = _kv(args.param, "--param")
    if args.all or args.filter:
        if params:
            raise SystemExit("--param applies to a single claim id")
        results = claims_mod.run_all(args.filter, seed=args.seed, workers=args.workers)
    else:
        if not args.ids:
            raise SystemExit("give claim ids or --all")
        results = []
        cache: dict = {}
        for cid in args.ids:
            results.append(claims_mod.run_claim(cid, params, seed=args.seed, force=args.force, _results=cache))
    for r in results:
        print(f"{'MATCH' if r.match else 'MISMATCH':8s} {r.claim_id:40s} verdict={r.verdict:18s} "
              f"expected={r.expected:18s} {r.elapsed_s:7.2f}s", file=sys.stderr if args.json == "-" else sys.stdout)
    if args.json:
        _dump(claims_mod.report(results, timing=not args.no_timing), args.json)
    return 0 if all(r.match for r in results) else 1


def cmd_eval(args) -> int:
    h = _structure(args)
    preds = {}
    for name, path in _kv(args.assign, "--assign").items():
        preds[name] = h.load_predicate(path)
    indivs = {}
    for name, val in _kv(args.indiv, "--indiv").items():
        part, index = (int(v) for v in val.split(","))
        indivs[name] = h.group.point(part, index)
    text = args.formula
    if os.path.isfile(text):
        with open(text, encoding="utf-8") as fh:
            text = fh.read()
    sorts = {n: p.arity for n, p in h.named.items()}
    sorts.update({n: p.arity for n, p in preds.items()})
    f = parse(text, sorts)
    asg = Assignment({IndivVar(k): v for k, v in indivs.items()},
                     {PredVar(k, p.arity): p for k, p in preds.items()})
    out = evaluate(h, asg, f, trace=args.trace)
    _dump({"structure": h.params(), "fidelity": h.fidelity_notes, **out.to_json()}, args.json)
    return 0


def cmd_enumerate(args) -> int:
    h = _structure(args)
    preds = h.enumerate_predicates(args.arity, args.support)
    out = {"structure": h.params(), "arity": args.arity, "budget": args.support, "count": len(preds)}
    if args.list:
        out["predicates"] = [h.predicate_to_json(p) for p in preds]
    _dump(out, args.json)
    return 0


def cmd_construct(args) -> int:
    h = _structure(args)
    rho = h.load_predicate(args.rho)
    alpha = h.load_predicate(args.alpha) if args.alpha else None
    inp = ChoiceInput.from_rho(h, rho, alpha)
    tr = (_sigma2 if args.model == "sigma2" else _sigma3)(inp, h)
    ind = h.group.individual
    _dump({"structure": h.params(), "sigma": h.predicate_to_json(tr.sigma),
           "choice_relation": is_choice_relation(inp.alpha, inp.rho, tr.sigma),
           "cases": {str(tuple(ind(x))): c for x, c in sorted(tr.cases.items())},
           "extra_support": [list(ind(x)) for x in tr.extra]}, args.json)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="henkin-choice", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    cl = sub.add_parser("claims", help="list or run registered claims")
    csub = cl.add_subparsers(dest="claims_cmd", required=True)
    ls = csub.add_parser("list")
    ls.add_argument("--json", default=None)
    ls.set_defaults(fn=cmd_claims_list)
    run = csub.add_parser("run")
    run.add_argument("ids", nargs="*")
    run.add_argument("--all", action="store_true")
    run.add_argument("--filter", default=None, help="run claims whose id contains this text")
    run.add_argument("--param", action="append", help="override a default parameter, k=v")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--json", default=None, help="write the report here ('-' for stdout)")
    run.add_argument("--no-timing", action="store_true", help="omit timing fields from the report")
    run.add_argument("--force", action="store_true", help="run even below a fidelity guard")
    run.add_argument("--workers", type=int, default=1)
    run.set_defaults(fn=cmd_claims_run)

    ev = sub.add_parser("eval", help="evaluate a formula in a structure")
    _add_structure_args(ev)
    ev.add_argument("--formula", required=True, help="formula text or a file containing it")
    ev.add_argument("--assign", action="append", help="name=predicate.json")
    ev.add_argument("--indiv", action="append", help="name=part,index")
    ev.add_argument("--trace", action="store_true")
    ev.add_argument("--json", default=None)
    ev.set_defaults(fn=cmd_eval)

    en = sub.add_parser("enumerate", help="enumerate admissible predicates")
    _add_structure_args(en)
    en.add_argument("--arity", type=int, required=True)
    en.add_argument("--support", type=int, required=True, help="support budget")
    en.add_argument("--list", action="store_true", help="include the predicates, not just the count")
    en.add_argument("--json", default=None)
    en.set_defaults(fn=cmd_enumerate)

    co = sub.add_parser("construct", help="build a choice relation for rho")
    _add_structure_args(co, models=("sigma2", "sigma3"))
    co.add_argument("--rho", required=True)
    co.add_argument("--alpha", default=None)
    co.add_argument("--json", default=None)
    co.set_defaults(fn=cmd_construct)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.fn(args)
    except (claims_mod.UnknownClaim, claims_mod.GuardViolation, KeyError) as e:
        print(f"error: {e.args[0] if e.args else e}", file=sys.stderr)
        return 2
    except (ParseError, FormulaError, CertificateError, EnumerationGuardError, PreconditionError,
            FidelityError, ValueError, OSError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
