"""Sweep harness comparing closed forms against the orbit-counting and character oracles."""
from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Iterator

import numpy as np

from . import characters as ch
from . import modarith as ma
from .autos import (
    AutomorphismBatch,
    enumerate_automorphisms,
    fixed_point_counts,
    reidemeister_numbers,
    twisted_class_counts,
    twisted_map_image_sizes,
)
from .group import (
    SmcGroup,
    commutator_subgroup_order,
    commutator_subgroup_order_oracle,
    conjugacy_classes,
    decompose,
    inv_arrays,
    mul_arrays,
    valid_alphas,
)
from .spectrum import (
    CaseKind,
    classify_case,
    commutator_order_by_case,
    realizations,
    spec_full,
)

SWEEP_AUT_BUDGET = 10**6


def sweep_parameters(max_order: int, min_order: int = 1) -> Iterator[tuple[int, int, int, int]]:
    """Every ``(n, m, p, alpha)`` with ``min_order <= n p^(m+1) <= max_order`` and a nontrivial action."""
    for order in range(max(min_order, 2), max_order + 1):
        for p, _ in ma.factorize(order):
            N = order // p
            n, m = N, 0
            while n % p == 0:
                n //= p
                m += 1
            for a in valid_alphas(n, m, p):
                yield (n, m, p, a)


@dataclass
class GroupReport:
    params: tuple[int, int, int, int]
    case: str
    order: int
    automorphisms: int
    formula: list[int]
    bruteforce: list[int]
    checks: dict[str, bool] = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures

    def fail(self, check: str, detail: str) -> None:
        self.checks[check] = False
        self.failures.append(f"{check}: {detail}")

    def passed(self, check: str) -> None:
        self.checks.setdefault(check, True)


def _first_mismatch(name: str, autos: AutomorphismBatch, lhs: np.ndarray, rhs: np.ndarray) -> str | None:
    bad = np.flatnonzero(lhs != rhs)
    if not len(bad):
        return None
    k = int(bad[0])
    phi = autos[k]
    return f"{name} phi(x)={tuple(phi.img_x)} phi(y)={tuple(phi.img_y)}: {int(lhs[k])} != {int(rhs[k])}"


def inner_invariance_mismatch(G: SmcGroup, autos: AutomorphismBatch, R: np.ndarray) -> str | None:
    """Check ``R(tau_g o phi) = R(phi)`` for all ``g``; also checks the enumeration is closed under it."""
    keys = autos.keys()
    order = np.argsort(keys)
    skeys, sR = keys[order], R[order]
    I, J = G.all_x[None, :], G.all_y[None, :]
    gi_, gj_ = inv_arrays(G, I, J)
    for part, Rp in zip(autos.chunks(G.order * 6), _split(R, autos, G.order * 6)):
        xs = []
        for ai, aj in ((part.xi, part.xj), (part.yi, part.yj)):
            ti, tj = mul_arrays(G, I, J, ai[:, None], aj[:, None])
            ti, tj = mul_arrays(G, ti, tj, gi_, gj_)
            xs.append(tj * G.N + ti)
        k = xs[0] * G.order + xs[1]
        pos = np.searchsorted(skeys, k)
        pos[pos >= len(skeys)] = 0
        if np.any(skeys[pos] != k):
            return "tau_g o phi missing from the enumerated automorphisms"
        got = sR[pos]
        bad = np.argwhere(got != Rp[:, None])
        if len(bad):
            a, g = bad[0]
            return f"R(tau_g o phi) = {int(got[a, g])} but R(phi) = {int(Rp[a])} for g = {G.element(int(g))}"
    return None


def _split(R: np.ndarray, autos: AutomorphismBatch, cells: int) -> Iterator[np.ndarray]:
    start = 0
    for part in autos.chunks(cells):
        yield R[start : start + len(part)]
        start += len(part)


def check_group(
    params: tuple[int, int, int, int],
    triple_max: int = 500,
    inner_max: int = 200,
    aut_budget: int | None = SWEEP_AUT_BUDGET,
    inject_fault: bool = False,
) -> GroupReport:
    """Run every oracle comparison that applies to one group."""
    t0 = time.perf_counter()
    n, m, p, alpha = params
    G = SmcGroup(n, m, p, alpha)
    dec = decompose(G)
    tag = classify_case(dec.n_free, m, p, dec.alpha_reduced)
    if inject_fault:
        from .spectrum import fault_injected

        with fault_injected():
            formula = spec_full(n, m, p, alpha)
    else:
        formula = spec_full(n, m, p, alpha)
    classes = conjugacy_classes(G, budget=None)
    autos = enumerate_automorphisms(G, budget=None, aut_budget=aut_budget)
    R = reidemeister_numbers(G, autos, classes)
    brute = sorted(set(R.tolist()))
    rep = GroupReport(params, str(tag), G.order, len(autos), formula, brute)

    # formula against orbit counting
    if formula != brute:
        rep.fail("spectrum", f"formula {formula} != bruteforce {brute}")
    rep.passed("spectrum")

    # structure of [G,G] and character totals
    comm = commutator_subgroup_order_oracle(G, all_pairs_limit=300)
    if comm != commutator_subgroup_order(G) or comm != commutator_order_by_case(tag):
        rep.fail("commutator", f"oracle {comm}, <x^(alpha-1)> {commutator_subgroup_order(G)}, case {commutator_order_by_case(tag)}")
    rep.passed("commutator")
    reps, sizes = ch.dual_orbits(G)
    n1, np_ = int((sizes == 1).sum()), int((sizes == p).sum())
    ident = AutomorphismBatch.of(G, [_identity(G)])
    ch1_all = int(ch.ch1_fixed(G, ident)[0])
    if not (
        n1 == G.abelianization_modulus
        and set(sizes.tolist()) <= {1, p}
        and ch1_all == G.order // comm
        and ch1_all == ch.ch1_total(G)
        and ch1_all + p * p * np_ == G.order
        and np_ == ch.chp_total(G)
        and ch1_all + np_ == len(classes)
    ):
        rep.fail(
            "character_totals",
            f"ch1={ch1_all} [G:G']={G.order // comm} chp={np_} classes={len(classes)} |G|={G.order}",
        )
    rep.passed("character_totals")

    # p-group: each automorphism fixes all or none of the degree-p characters
    if n == 1 and tag.kind is CaseKind.PGROUP:
        chp = ch.chp_fixed_direct(G, autos, budget=None)
        allowed = {0, p ** (m - 2) * (p - 1)}
        got = set(chp.tolist())
        if not got <= allowed:
            rep.fail("pgroup_chp", f"ch_p values {sorted(got)} not within {sorted(allowed)}")
        rep.passed("pgroup_chp")

    # per-automorphism triple agreement
    if G.order <= triple_max:
        T = twisted_class_counts(G, autos)
        C = ch.reidemeister_via_characters(G, autos)
        for name, other in (("twisted", T), ("characters", C)):
            msg = _first_mismatch(f"classes vs {name}", autos, R, other)
            if msg:
                rep.fail("triple", msg)
        keep = autos.xj == 0
        if keep.any():
            sub = autos[np.flatnonzero(keep)]
            msg = _first_mismatch("chp formula vs direct", sub, ch.chp_fixed(G, sub), ch.chp_fixed_direct(G, sub))
            if msg:
                rep.fail("chp_formula", msg)
            rep.passed("chp_formula")
        msg = _first_mismatch("ch1 vs dual", autos, ch.ch1_fixed(G, autos), ch.ch1_fixed_dual(G, autos))
        if msg:
            rep.fail("ch1_dual", msg)
        rep.passed("ch1_dual")
        rep.passed("triple")

    # inner invariance and the R = 1 equivalences
    if G.order <= inner_max:
        msg = inner_invariance_mismatch(G, autos, R)
        if msg:
            rep.fail("inner", msg)
        rep.passed("inner")
        fix = fixed_point_counts(G, autos)
        img = twisted_map_image_sizes(G, autos)
        if np.any((R == 1) != (fix == 1)) or np.any((R == 1) != (img == G.order)):
            rep.fail("r_equals_one", "R = 1, Fix = 1 and bijectivity of g -> g phi(g)^-1 disagree")
        rep.passed("r_equals_one")

    # constructed automorphisms realize their predicted values
    real = realizations(n, m, p, alpha)
    rv = reidemeister_numbers(G, AutomorphismBatch.of(G, [r.automorphism for r in real]), classes)
    wrong = [(r.value, int(v), r.family) for r, v in zip(real, rv) if int(v) != r.value]
    if wrong:
        rep.fail("realizability", f"predicted/measured/family {wrong[0]}")
    if sorted({r.value for r in real}) != formula:
        rep.fail("realizability", "constructed values do not cover the formula spectrum")
    rep.passed("realizability")

    rep.seconds = time.perf_counter() - t0
    return rep


def _identity(G: SmcGroup):
    from .autos import Automorphism

    return Automorphism.identity(G)


@dataclass
class SweepSummary:
    max_order: int
    groups: int = 0
    passed: int = 0
    failed: int = 0
    automorphisms: int = 0
    checks: dict[str, list[int]] = field(default_factory=dict)
    counterexample: dict | None = None
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def add(self, rep: GroupReport) -> None:
        self.groups += 1
        self.automorphisms += rep.automorphisms
        for name, ok in rep.checks.items():
            tally = self.checks.setdefault(name, [0, 0])
            tally[0 if ok else 1] += 1
        if rep.ok:
            self.passed += 1
        else:
            self.failed += 1
            if self.counterexample is None:
                self.counterexample = asdict(rep)

    def to_dict(self) -> dict:
        return {
            "max_order": self.max_order,
            "groups": self.groups,
            "passed": self.passed,
            "failed": self.failed,
            "automorphisms": self.automorphisms,
            "checks": {k: {"pass": v[0], "fail": v[1]} for k, v in sorted(self.checks.items())},
            "counterexample": self.counterexample,
            "seconds": round(self.seconds, 3),
        }


def _check_star(args):
    return check_group(*args)


def run_sweep(
    max_order: int,
    triple_max: int = 500,
    inner_max: int = 200,
    aut_budget: int | None = SWEEP_AUT_BUDGET,
    jobs: int = 1,
    inject_fault: bool = False,
    params: Iterable[tuple[int, int, int, int]] | None = None,
) -> SweepSummary:
    """Check every group up to ``max_order``; results are folded in parameter order."""
    t0 = time.perf_counter()
    plist = sorted(params if params is not None else sweep_parameters(max_order))
    summary = SweepSummary(max_order)
    work = [(pr, triple_max, inner_max, aut_budget, inject_fault) for pr in plist]
    if jobs == 1:
        results: Iterable[GroupReport] = map(_check_star, work)
        for rep in results:
            summary.add(rep)
    else:
        with ProcessPoolExecutor(max_workers=jobs or None) as pool:
            for rep in pool.map(_check_star, work, chunksize=8):
                summary.add(rep)
    summary.seconds = time.perf_counter() - t0
    return summary
