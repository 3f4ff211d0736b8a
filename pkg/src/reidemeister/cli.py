"""Command-line interface.

Exit codes: 0 success, 1 invalid input, 2 methods disagree, 3 budget exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Any


from . import characters as ch
from . import modarith as ma
from .autos import (
    Automorphism,
    AutomorphismBatch,
    enumerate_automorphisms,
    reidemeister_numbers,
    twisted_class_counts,
)
from .errors import DEFAULT_AUT_BUDGET, DEFAULT_GROUP_BUDGET, BudgetExceeded, ValidationError, check_budget
from .group import SmcGroup, decompose, valid_alphas
from .spectrum import classify_case, spec_full
from .verify import SWEEP_AUT_BUDGET, run_sweep

EXIT_OK, EXIT_INVALID, EXIT_DISAGREE, EXIT_BUDGET = 0, 1, 2, 3

METHODS = ("formula", "bruteforce", "characters", "both", "all")


def _expand(method: str) -> list[str]:
    if method == "both":
        return ["formula", "bruteforce"]
    if method == "all":
        return ["formula", "bruteforce", "characters"]
    return [method]


def _params(G: SmcGroup) -> dict[str, int]:
    dec = decompose(G)
    return {
        "n": G.n,
        "m": G.m,
        "p": G.p,
        "alpha": G.alpha,
        "alpha_mod_n": G.alpha % G.n,
        "alpha_mod_pm": G.alpha % G.pm,
        "h": dec.h,
        "n_free": dec.n_free,
    }


def _case(G: SmcGroup) -> str:
    dec = decompose(G)
    return str(classify_case(dec.n_free, G.m, G.p, dec.alpha_reduced))


def spectrum_record(G: SmcGroup, method: str, budget: int, aut_budget: int) -> dict[str, Any]:
    t0 = time.perf_counter()
    methods: dict[str, list[int]] = {}
    autos = None
    R = None
    for name in _expand(method):
        if name == "formula":
            methods[name] = spec_full(G.n, G.m, G.p, G.alpha)
            continue
        check_budget("group order", G.order, budget)
        if autos is None:
            autos = enumerate_automorphisms(G, budget, aut_budget)
        if name == "bruteforce":
            R = reidemeister_numbers(G, autos)
            methods[name] = sorted(set(R.tolist()))
        else:
            methods[name] = sorted(set(ch.reidemeister_via_characters(G, autos).tolist()))
    values = list(methods.values())
    return {
        "params": _params(G),
        "case": _case(G),
        "spectrum": values[0],
        "methods": methods,
        "agree": all(v == values[0] for v in values),
        "ms": int(round((time.perf_counter() - t0) * 1000)),
    }


def reidemeister_record(
    G: SmcGroup, phi: Automorphism, method: str, budget: int
) -> dict[str, Any]:
    t0 = time.perf_counter()
    check_budget("group order", G.order, budget)
    batch = AutomorphismBatch.of(G, [phi])
    methods: dict[str, int] = {}
    for name in _expand(method):
        if name == "formula":
            if phi.preserves_base:
                methods[name] = int(ch.ch1_fixed(G, batch)[0] + ch.chp_fixed(G, batch)[0])
        elif name == "bruteforce":
            methods["classes"] = int(reidemeister_numbers(G, batch)[0])
            methods["twisted"] = int(twisted_class_counts(G, batch)[0])
        else:
            methods[name] = int(ch.reidemeister_via_characters(G, batch)[0])
    values = list(methods.values())
    params = _params(G)
    params.update(img_x=list(phi.img_x), img_y=list(phi.img_y))
    return {
        "params": params,
        "case": _case(G),
        "spectrum": sorted(set(values)),
        "methods": methods,
        "agree": len(set(values)) == 1,
        "ms": int(round((time.perf_counter() - t0) * 1000)),
    }


def _format_record(rec: dict[str, Any]) -> str:
    pr = rec["params"]
    head = (
        f"n={pr['n']} m={pr['m']} p={pr['p']} alpha={pr['alpha']} "
        f"(mod n: {pr['alpha_mod_n']}, mod p^m: {pr['alpha_mod_pm']}; h={pr['h']}, free n={pr['n_free']})"
    )
    lines = [head, f"  case: {rec['case']}"]
    if "img_x" in pr:
        lines.append(f"  phi(x) = x^{pr['img_x'][0]} y^{pr['img_x'][1]}, phi(y) = x^{pr['img_y'][0]} y^{pr['img_y'][1]}")
    for name, val in rec["methods"].items():
        shown = "{" + ", ".join(map(str, val)) + "}" if isinstance(val, list) else str(val)
        lines.append(f"  {name}: {shown}")
    if len(rec["methods"]) > 1:
        lines.append(f"  agree: {str(rec['agree']).lower()}")
    return "\n".join(lines)


def _emit(args, payload: Any, text: str) -> None:
    out = json.dumps(payload, indent=2, sort_keys=False) if args.json else text
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(payload, indent=2) + "\n")
    print(out)


def cmd_spectrum(args) -> int:
    N = args.n * args.p**args.m
    if args.alpha is None:
        alphas = valid_alphas(args.n, args.m, args.p)
        if not alphas:
            raise ValidationError(f"no nontrivial action of C_{args.p} on C_{N}")
    else:
        alphas = [args.alpha]
    records = [
        spectrum_record(SmcGroup(args.n, args.m, args.p, a), args.method, args.budget, args.aut_budget)
        for a in alphas
    ]
    payload = records[0] if args.alpha is not None else records
    _emit(args, payload, "\n".join(_format_record(r) for r in records))
    return EXIT_OK if all(r["agree"] for r in records) else EXIT_DISAGREE


def cmd_reidemeister(args) -> int:
    G = SmcGroup(args.n, args.m, args.p, args.alpha)
    if args.img_x is not None or args.img_y is not None:
        ix = tuple(args.img_x) if args.img_x else (1, 0)
        iy = tuple(args.img_y) if args.img_y else (0, 1)
        phi = Automorphism(G, ix, iy)
    else:
        phi = Automorphism.structured(G, args.gamma, args.a_img)
    rec = reidemeister_record(G, phi, args.method, args.budget)
    _emit(args, rec, _format_record(rec))
    return EXIT_OK if rec["agree"] else EXIT_DISAGREE


def cmd_verify(args) -> int:
    summary = run_sweep(
        args.budget,
        triple_max=args.triple_max,
        inner_max=args.inner_max,
        aut_budget=args.aut_budget,
        jobs=args.jobs,
        inject_fault=args.inject_fault,
    )
    d = summary.to_dict()
    lines = [
        f"groups: {d['groups']}  passed: {d['passed']}  failed: {d['failed']}  "
        f"automorphisms: {d['automorphisms']}  time: {d['seconds']:.1f}s"
    ]
    for name, t in d["checks"].items():
        lines.append(f"  {name:18s} pass {t['pass']:6d}  fail {t['fail']}")
    if d["counterexample"]:
        ce = d["counterexample"]
        lines.append(f"first counterexample: params {tuple(ce['params'])}")
        lines.extend(f"  {f}" for f in ce["failures"])
    _emit(args, d, "\n".join(lines))
    return EXIT_OK if summary.ok else EXIT_DISAGREE


def cmd_witness(args) -> int:
    problem = ma.WitnessProblem(args.n, args.p, args.a % args.n if args.n > 1 else 0, tuple(args.d))
    gamma = ma.gcd_witness(problem)
    checks = [
        {"i": i, "power": pow(args.a, i, args.n), "gcd": ma.gcd(gamma - pow(args.a, i, args.n), args.n), "target": d}
        for i, d in enumerate(args.d)
    ]
    payload = {
        "params": {"n": args.n, "p": args.p, "a": args.a, "d": list(args.d)},
        "gamma": gamma,
        "gcd_gamma_n": ma.gcd(gamma, args.n),
        "checks": checks,
        "verified": problem.check(gamma),
    }
    lines = [f"gamma = {gamma} (mod {args.n})", f"  gcd(gamma, n) = {payload['gcd_gamma_n']}"]
    lines += [f"  gcd(gamma - a^{c['i']}, n) = {c['gcd']}  (target {c['target']})" for c in checks]
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK if payload["verified"] else EXIT_DISAGREE


def cmd_classify(args) -> int:
    G = SmcGroup(args.n, args.m, args.p, args.alpha)
    dec = decompose(G)
    tag = classify_case(dec.n_free, G.m, G.p, dec.alpha_reduced)
    payload = {"params": _params(G), "case": tag.kind.value, "beta": tag.beta, "tag": str(tag)}
    _emit(args, payload, f"{_format_record({'params': _params(G), 'case': str(tag), 'methods': {}})}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reidemeister",
        description="Reidemeister numbers and spectra of (C_n x C_{p^m}) x| C_p.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, budget_default):
        sp.add_argument("--budget", type=int, default=budget_default, help="group order budget")
        sp.add_argument("--aut-budget", type=int, default=DEFAULT_AUT_BUDGET, help="automorphism count budget")
        sp.add_argument("--json", action="store_true", help="print JSON")
        sp.add_argument("--out", metavar="FILE", help="also write JSON to FILE")

    def group_args(sp, alpha_required=True):
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--m", type=int, required=True)
        sp.add_argument("--p", type=int, required=True)
        sp.add_argument("--alpha", type=int, required=alpha_required, help="residue mod N = n p^m")

    sp = sub.add_parser("spectrum", help="Reidemeister spectrum of a group")
    group_args(sp, alpha_required=False)
    sp.add_argument("--method", choices=METHODS, default="formula")
    common(sp, DEFAULT_GROUP_BUDGET)
    sp.set_defaults(func=cmd_spectrum)

    sp = sub.add_parser("reidemeister", help="R(phi) for phi(x) = x^gamma, phi(y) = x^a y")
    group_args(sp)
    sp.add_argument("--gamma", type=int, default=1)
    sp.add_argument("--a-img", type=int, default=0)
    sp.add_argument("--img-x", type=int, nargs=2, metavar=("I", "J"), help="arbitrary image of x as x^I y^J")
    sp.add_argument("--img-y", type=int, nargs=2, metavar=("I", "J"), help="arbitrary image of y as x^I y^J")
    sp.add_argument("--method", choices=METHODS, default="all")
    common(sp, DEFAULT_GROUP_BUDGET)
    sp.set_defaults(func=cmd_reidemeister)

    sp = sub.add_parser("verify", help="sweep all groups up to the budget against every oracle")
    common(sp, 2000)
    sp.set_defaults(aut_budget=SWEEP_AUT_BUDGET)
    sp.add_argument("--jobs", type=int, default=1, help="worker processes (0 = one per CPU)")
    sp.add_argument("--triple-max", type=int, default=500, help="largest order for per-automorphism checks")
    sp.add_argument("--inner-max", type=int, default=200, help="largest order for inner-automorphism checks")
    sp.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("witness", help="gamma with gcd(gamma - a^i, n) = d_i")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--a", type=int, required=True)
    sp.add_argument("--d", type=int, nargs="+", required=True)
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--out", metavar="FILE")
    sp.set_defaults(func=cmd_witness)

    sp = sub.add_parser("classify", help="case of the spectrum formula for a group")
    group_args(sp)
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--out", metavar="FILE")
    sp.set_defaults(func=cmd_classify)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ValidationError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
