"""Closed-form Reidemeister spectra and automorphisms realizing every value.

A spectrum is a sorted list of distinct positive integers. The group is first
split as ``C_h x S`` (``h`` = part of ``C_n`` fixed by the action); the
spectrum is ``spec_cyclic(h) * spec(S)`` and ``spec(S)`` is given by one of five
case formulas selected by :func:`classify_case`.
"""
from __future__ import annotations

import contextlib
import enum
import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator

from . import modarith as ma
from .autos import Automorphism
from .errors import ValidationError
from .group import GroupElement, SmcGroup, decompose, fixed_subgroup_H

Spectrum = list[int]


def as_spectrum(values: Iterable[int]) -> Spectrum:
    return sorted(set(int(v) for v in values))


def set_product(A: Iterable[int], B: Iterable[int]) -> Spectrum:
    B = list(B)
    return as_spectrum(a * b for a in A for b in B)


def set_sum(A: Iterable[int], B: Iterable[int]) -> Spectrum:
    B = list(B)
    return as_spectrum(a + b for a in A for b in B)


def spec_cyclic(n: int) -> Spectrum:
    """``{gcd(g - 1, n)}`` over units ``g``: every divisor for odd ``n``, even divisors for even ``n``."""
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    divs = ma.divisors(n)
    return divs if n % 2 else [d for d in divs if d % 2 == 0]


def spec_cyclic_bruteforce(n: int) -> Spectrum:
    if n == 1:
        return [1]
    return as_spectrum(math.gcd(g - 1, n) for g in ma.units(n))


def divisor_tuples(a: int, b: int, require3: bool = False) -> list[tuple[int, ...]]:
    """``D(a, b)``: ``b``-tuples of pairwise coprime divisors of ``a`` (``D'`` when ``require3``).

    Each prime power ``q^e || a`` contributes ``q^f`` (``1 <= f <= e``) to at most one slot.
    """
    if a < 1 or b < 1:
        raise ValidationError(f"need a, b >= 1, got a = {a}, b = {b}")
    options = []
    for q, e in ma.factorize(a):
        opts = [None] + [(slot, q**f) for slot in range(b) for f in range(1, e + 1)]
        options.append(opts)
    out = []
    for choice in itertools.product(*options):
        d = [1] * b
        for c in choice:
            if c is not None:
                d[c[0]] *= c[1]
        if require3 and not any(x % 3 == 0 for x in d):
            continue
        out.append(tuple(d))
    return sorted(out)


def divisor_tuples_bruteforce(a: int, b: int, require3: bool = False) -> list[tuple[int, ...]]:
    divs = ma.divisors(a)
    out = []
    for d in itertools.product(divs, repeat=b):
        if all(math.gcd(d[i], d[j]) == 1 for i in range(b) for j in range(i + 1, b)):
            if not require3 or any(x % 3 == 0 for x in d):
                out.append(tuple(d))
    return sorted(out)


# -- case classification ----------------------------------------------------------


class CaseKind(enum.Enum):
    TRIVIAL = "TrivialPPart"
    NONTRIVIAL = "NontrivialPPart"
    P2_INVERSION = "P2Inversion"
    P2_CASE2 = "P2Case2"
    PGROUP = "PGroup"


@dataclass(frozen=True)
class CaseTag:
    kind: CaseKind
    n_free: int
    m: int
    p: int
    beta: int | None = None

    def __str__(self) -> str:
        extra = f", beta={self.beta}" if self.beta is not None else ""
        return f"{self.kind.value}(n={self.n_free}, m={self.m}, p={self.p}{extra})"


def classify_case(n_free: int, m: int, p: int, alpha: int) -> CaseTag:
    """Which spectrum formula applies to ``SMC(n_free, m, p)`` with action ``alpha``.

    Requires a free action on ``C_{n_free}`` and a nontrivial action overall.
    """
    if n_free < 1 or m < 0 or not ma.is_prime(p) or n_free % p == 0:
        raise ValidationError(f"invalid parameters n={n_free}, m={m}, p={p}")
    N = n_free * p**m
    alpha %= N
    if math.gcd(alpha, N) != 1 or pow(alpha, p, N) != 1 % N:
        raise ValidationError(f"alpha = {alpha} is not a unit of order dividing p mod {N}")
    if math.gcd(alpha - 1, n_free) != 1:
        raise ValidationError(f"alpha = {alpha} fixes nontrivial elements of C_{n_free}; decompose first")
    if alpha == 1 % N:
        raise ValidationError("the action is trivial")
    pm = p**m
    ap = alpha % pm
    if ap == 1 % pm:
        if n_free < 2:
            raise ValidationError("the action is trivial")
        return CaseTag(CaseKind.TRIVIAL, n_free, m, p)
    if p == 2:
        if m >= 2 and ap == pm - 1:
            return CaseTag(CaseKind.P2_INVERSION, n_free, m, p)
        if m >= 3 and ap == pm // 2 - 1:
            return CaseTag(CaseKind.P2_CASE2, n_free, m, p)
        if m >= 3 and ap == pm // 2 + 1:
            kind = CaseKind.NONTRIVIAL if n_free >= 2 else CaseKind.PGROUP
            return CaseTag(kind, n_free, m, p, 1)
    elif m >= 2:
        step = p ** (m - 1)
        if (ap - 1) % step == 0:
            beta = (ap - 1) // step
            kind = CaseKind.NONTRIVIAL if n_free >= 2 else CaseKind.PGROUP
            return CaseTag(kind, n_free, m, p, beta)
    raise ValidationError(f"cannot classify alpha = {alpha} for n={n_free}, m={m}, p={p}")


def classify_group(G: SmcGroup) -> CaseTag:
    dec = decompose(G)
    return classify_case(dec.n_free, G.m, G.p, dec.alpha_reduced)


def commutator_order_by_case(tag: CaseTag) -> int:
    """``|[S,S]|`` for the free part ``S`` as predicted case by case."""
    if tag.kind is CaseKind.TRIVIAL:
        return tag.n_free
    if tag.kind in (CaseKind.NONTRIVIAL, CaseKind.PGROUP):
        return tag.n_free * tag.p
    return tag.n_free * tag.p**tag.m // 2


# -- case formulas ------------------------------------------------------------------

# Constant added in the inversion case; the fault-injection switch perturbs it.
_INVERSION_OFFSETS = [2, 4]


@contextlib.contextmanager
def fault_injected() -> Iterator[None]:
    """Temporarily corrupt the inversion-case formula (for testing the verifier)."""
    saved = list(_INVERSION_OFFSETS)
    _INVERSION_OFFSETS[:] = [2, 6]
    try:
        yield
    finally:
        _INVERSION_OFFSETS[:] = saved


def _needs_d3(n: int, p: int) -> bool:
    return p == 2 and n % 3 == 0


def _exact_div(a: int, b: int) -> int:
    q, r = divmod(a, b)
    if r:
        raise ArithmeticError(f"{a} is not divisible by {b}")
    return q


def _trivial_terms(n: int, m: int, p: int) -> Iterator[tuple[int, int, tuple[int, ...], bool]]:
    """``(value, e, tuple, shifted_y)`` for every term of the trivial-action formula."""
    for d in divisor_tuples(n, p, _needs_d3(n, p)):
        s = sum(_exact_div(di - 1, p) for di in d)
        if m == 0:
            yield p + s, 0, d, False
            continue
        for e in range(0 if p != 2 else 1, m + 1):
            yield p ** (e + 1) + p**e * s, e, d, False
        yield p**m + p**m * s, m, d, True


def _nontrivial_terms(n: int, m: int, p: int) -> Iterator[tuple[int, int, tuple[int, ...]]]:
    for d in divisor_tuples(n * p, p, _needs_d3(n, p)):
        has_p = any(di % p == 0 for di in d)
        for e in range(0 if p != 2 else 1, m):
            if has_p != (e == m - 1):
                continue
            if e >= 1:
                v = p ** (e + 1) + p ** (e - 1) * sum(di - 1 for di in d)
            else:
                v = p + sum(_exact_div(di - 1, p) for di in d)
            yield v, e, d


def _p2_terms(n: int, m: int) -> Iterator[tuple[int, int, tuple[int, ...]]]:
    for d in divisor_tuples(n, 2, _needs_d3(n, 2)):
        for e in range(1, m):
            yield 2**e * d[0] + d[1] - 2, e, d


def _check_free(n: int, p: int) -> None:
    if n < 1 or n % p == 0:
        raise ValidationError(f"n = {n} must be a positive integer prime to p = {p}")
    for q, _ in ma.factorize(n):
        if (q - 1) % p:
            raise ValidationError(f"C_{p} cannot act freely on C_{n}: prime {q} is not 1 mod {p}")


def spec_trivial_ppart(n: int, m: int, p: int) -> Spectrum:
    if n < 2:
        raise ValidationError("trivial action on the p-part needs n >= 2")
    _check_free(n, p)
    return as_spectrum(v for v, *_ in _trivial_terms(n, m, p))


def spec_nontrivial_ppart(n: int, m: int, p: int, beta: int = 1) -> Spectrum:
    if n < 2 or m < (2 if p != 2 else 3) or beta % p == 0:
        raise ValidationError(f"need n >= 2, m large enough and beta != 0 mod p (n={n}, m={m}, beta={beta})")
    _check_free(n, p)
    return as_spectrum(v for v, *_ in _nontrivial_terms(n, m, p))


def spec_p2_inversion(n: int, m: int) -> Spectrum:
    if m < 2 or n % 2 == 0:
        raise ValidationError(f"need m >= 2 and odd n (n={n}, m={m})")
    return set_sum(_INVERSION_OFFSETS, (v for v, *_ in _p2_terms(n, m)))


def spec_p2_case2(n: int, m: int) -> Spectrum:
    if m < 3 or n % 2 == 0:
        raise ValidationError(f"need m >= 3 and odd n (n={n}, m={m})")
    return as_spectrum(v + 4 for v, *_ in _p2_terms(n, m))


def spec_pgroup(m: int, p: int) -> Spectrum:
    if m < (2 if p != 2 else 3):
        raise ValidationError(f"m = {m} too small for the p-group case with p = {p}")
    lo = 1 if p != 2 else 2
    powers = [p**i for i in range(lo, m)]
    return as_spectrum(
        powers + [2 * p ** (m - 1) - p ** (m - 2), p**m + p ** (m - 1) - p ** (m - 2)]
    )


def spec_for_case(tag: CaseTag) -> Spectrum:
    n, m, p = tag.n_free, tag.m, tag.p
    if tag.kind is CaseKind.TRIVIAL:
        return spec_trivial_ppart(n, m, p)
    if tag.kind is CaseKind.NONTRIVIAL:
        return spec_nontrivial_ppart(n, m, p, tag.beta)
    if tag.kind is CaseKind.P2_INVERSION:
        return spec_p2_inversion(n, m)
    if tag.kind is CaseKind.P2_CASE2:
        return spec_p2_case2(n, m)
    return spec_pgroup(m, p)


def spec_full(n: int, m: int, p: int, alpha: int) -> Spectrum:
    """Spectrum of ``(C_n x C_{p^m}) x|_alpha C_p`` for any nontrivial action."""
    N = n * p**m
    if alpha % N == 1 % N:
        raise ValidationError("alpha = 1 mod N: the action is trivial")
    G = SmcGroup(n, m, p, alpha)
    h, n_free, ar = fixed_subgroup_H(G.n, G.m, G.p, G.alpha)
    tag = classify_case(n_free, m, p, ar)
    return set_product(spec_cyclic(h), spec_for_case(tag))


# -- realizing automorphisms ------------------------------------------------------


@dataclass(frozen=True)
class Realization:
    value: int
    family: str
    automorphism: Automorphism


def _case_realizations(S: SmcGroup, tag: CaseTag) -> Iterator[tuple[int, str, GroupElement, GroupElement]]:
    """``(predicted R, family, img_x, img_y)`` on ``S`` for every term of the case formula."""
    n, m, p = tag.n_free, tag.m, tag.p
    pm = p**m
    a_n = S.alpha % n
    y = GroupElement(0, 1)

    def lift(gamma1: int, low: int) -> int:
        return ma.crt_solve([(gamma1 % n, n), (low % pm, pm)])[0]

    if tag.kind is CaseKind.TRIVIAL:
        for v, e, d, shifted in _trivial_terms(n, m, p):
            g1 = ma.gcd_witness(ma.WitnessProblem(n, p, a_n, d))
            if m == 0:
                yield v, f"x->x^g d={d}", GroupElement(g1, 0), y
                continue
            gamma = lift(g1, 1 + p**e)
            img_y = GroupElement(n * p ** (m - 1), 1) if shifted else y
            yield v, f"e={e} d={d}{' shifted y' if shifted else ''}", GroupElement(gamma, 0), img_y
    elif tag.kind is CaseKind.NONTRIVIAL:
        binv = pow(tag.beta, -1, p)
        for v, e, d in _nontrivial_terms(n, m, p):
            d = list(d)
            k = next((i for i, di in enumerate(d) if di % p == 0), None)
            if k is not None:
                d[k], d[binv] = d[binv], d[k]
            stripped = tuple(di // p if di % p == 0 else di for di in d)
            g1 = ma.gcd_witness(ma.WitnessProblem(n, p, a_n, stripped))
            yield v, f"e={e} d={tuple(d)}", GroupElement(lift(g1, 1 + p**e), 0), y
    elif tag.kind in (CaseKind.P2_INVERSION, CaseKind.P2_CASE2):
        for v, e, d in _p2_terms(n, m):
            g1 = ma.gcd_witness(ma.WitnessProblem(n, 2, a_n, d))
            gamma = lift(g1, 1 + 2 ** (e + 1))
            yield v + 4, f"e={e} d={d}", GroupElement(gamma, 0), y
            if tag.kind is CaseKind.P2_INVERSION:
                yield v + 2, f"e={e} d={d} y->xy", GroupElement(gamma, 0), GroupElement(1, 1)
    else:
        for i in range(0 if p != 2 else 1, m):
            v = p ** (i + 1) if i <= m - 2 else pm + p ** (m - 2) * (p - 1)
            yield v, f"x->x^(p^{i}+1)", GroupElement(p**i + 1, 0), y
        # x -> x^a y with a chosen so that x^p is fixed: every degree-p character
        # is then fixed, since it vanishes off the centre <x^p>
        a = p ** (m - 1) + 1 if p != 2 else 2 ** (m - 2) + 1
        yield p ** (m - 1) + p ** (m - 2) * (p - 1), f"x->x^{a} y", GroupElement(a, 1), y


def realizations(n: int, m: int, p: int, alpha: int) -> list[Realization]:
    """One constructed automorphism for every term of the closed-form spectrum."""
    G = SmcGroup(n, m, p, alpha)
    dec = decompose(G)
    if dec.free is None:
        raise ValidationError("the action is trivial")
    tag = classify_case(dec.n_free, m, p, dec.alpha_reduced)
    out = []
    for c in spec_cyclic(dec.h):
        gh = ma.cyclic_witness(dec.h, c)
        for v, family, ix, iy in _case_realizations(dec.free, tag):
            img_x = dec.join(gh, ix, G)
            img_y = dec.join(0, iy, G)
            label = f"{family}; C_{dec.h} part {c}" if dec.h > 1 else family
            out.append(Realization(c * v, label, Automorphism(G, img_x, img_y)))
    return out


def realizing_automorphisms(n: int, m: int, p: int, alpha: int) -> dict[int, Automorphism]:
    """First constructed automorphism for each spectrum value."""
    out: dict[int, Automorphism] = {}
    for r in realizations(n, m, p, alpha):
        out.setdefault(r.value, r.automorphism)
    return out
