"""Fixed irreducible characters of ``C_N x| C_p``.

Irreducible characters have degree 1 or p. The degree-p ones are induced from
characters ``chi_a: x^k -> zeta^(a k)`` of ``C_N`` whose orbit under
``a -> a alpha`` has size p. They vanish off ``C_N`` and equal
``sum_i zeta^(a alpha^i k)`` on ``x^k``. Values are kept exact: a sum of N-th
roots of unity is reduced modulo the N-th cyclotomic polynomial.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .autos import (
    CHUNK_CELLS,
    Automorphism,
    AutomorphismBatch,
    abelianization_fixed_points,
    abelianization_images,
)
from . import modarith as ma
from .errors import DEFAULT_GROUP_BUDGET, ValidationError, check_budget
from .group import ConjugacyClasses, GroupElement, SmcGroup, conjugacy_classes


# -- exact cyclotomic arithmetic ---------------------------------------------


def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    """Exact quotient of integer polynomials (coefficients low degree first, monic ``den``)."""
    num = num[:]
    dq = len(den) - 1
    out = [0] * (len(num) - dq)
    for k in range(len(out) - 1, -1, -1):
        c = num[k + dq]
        out[k] = c
        if c:
            for t, dc in enumerate(den):
                num[k + t] -= c * dc
    if any(num[:dq]):
        raise ArithmeticError("polynomial division left a remainder")
    return out


@lru_cache(maxsize=None)
def cyclotomic_poly(N: int) -> tuple[int, ...]:
    """Coefficients of the N-th cyclotomic polynomial, constant term first."""
    from .modarith import divisors

    poly = [-1] + [0] * (N - 1) + [1]
    for d in divisors(N):
        if d < N:
            poly = _poly_divexact(poly, list(cyclotomic_poly(d)))
    return tuple(poly)


@lru_cache(maxsize=32)
def root_basis(N: int) -> np.ndarray:
    """Row ``e`` holds the coordinates of ``zeta_N^e`` in the power basis of ``Z[zeta_N]``."""
    phi = np.array(cyclotomic_poly(N), dtype=np.int64)
    deg = len(phi) - 1
    out = np.zeros((N, deg), dtype=np.int64)
    cur = np.zeros(deg, dtype=np.int64)
    cur[0] = 1
    for e in range(N):
        out[e] = cur
        top = cur[-1]
        cur = np.concatenate(([0], cur[:-1]))
        if top:
            cur -= top * phi[:-1]
    out.setflags(write=False)
    return out


def cyclotomic_value(exponents, N: int) -> tuple[int, ...]:
    """Canonical form of ``sum zeta_N^e`` over the given exponents."""
    B = root_basis(N)
    e = np.asarray(list(exponents), dtype=np.int64) % N
    return tuple(B[e].sum(axis=0).tolist()) if len(e) else (0,) * B.shape[1]


# -- dual group and induced characters --------------------------------------------


@dataclass(frozen=True)
class DualCharacter:
    """``chi_a: x^k -> zeta^(a k)`` on ``C_N``."""

    a: int
    N: int

    def value_exponent(self, k: int) -> int:
        return (self.a * k) % self.N


@dataclass(frozen=True)
class InducedCharacter:
    a: int
    dimension: int


def dual_orbits(G: SmcGroup) -> tuple[np.ndarray, np.ndarray]:
    """Orbit representatives (smallest element) and sizes of ``a -> a alpha`` on ``Z_N``."""
    N = G.N
    a = np.arange(N, dtype=np.int64)
    orbit = (a[:, None] * G.pow_arr[None, :]) % N
    rep = orbit.min(axis=1)
    reps, sizes = np.unique(rep, return_counts=True)
    return reps, sizes


def induced(G: SmcGroup, a: int) -> InducedCharacter:
    orbit = {(a * t) % G.N for t in G.alpha_powers}
    return InducedCharacter(min(orbit), len(orbit))


def induced_character_value(G: SmcGroup, a: int, g: GroupElement) -> tuple[int, ...]:
    """Value of the induced character at ``g`` as a sorted multiset of exponents of ``zeta_N``.

    The empty multiset means 0 (``g`` outside ``C_N``).
    """
    if induced(G, a).dimension != G.p:
        raise ValidationError(f"a = {a} has a nontrivial stabiliser; it does not induce an irreducible of degree p")
    if g.yexp % G.p:
        return ()
    return tuple(sorted((a * t * g.xexp) % G.N for t in G.alpha_powers))


# -- degree-one characters -----------------------------------------------------


def ch1_fixed(G: SmcGroup, autos: AutomorphismBatch) -> np.ndarray:
    """Fixed linear characters, i.e. fixed points of the induced map on ``G/[G,G]``."""
    return abelianization_fixed_points(G, autos)


def ch1_fixed_dual(G: SmcGroup, autos: AutomorphismBatch) -> np.ndarray:
    """Fixed characters of ``Z_c x Z_p`` under precomposition, by enumerating the dual.

    With ``L = lcm(c, p)`` the character ``(s, t)`` sends ``(u, v)`` to
    ``zeta_L^((L/c) s u + (L/p) t v)``.
    """
    c, p = G.abelianization_modulus, G.p
    L = math.lcm(c, p)
    s = np.repeat(np.arange(c, dtype=np.int64), p)[None, :]
    t = np.tile(np.arange(p, dtype=np.int64), c)[None, :]
    out = []
    for part in autos.chunks(c * p * 2):
        a, b, u, v = (col[:, None] for col in abelianization_images(G, part))
        # value of chi o phi on the generators vs value of chi
        e1 = ((L // c) * s * a + (L // p) * t * b - (L // c) * s) % L
        e2 = ((L // c) * s * u + (L // p) * t * v - (L // p) * t) % L
        out.append(((e1 == 0) & (e2 == 0)).sum(axis=1))
    return np.concatenate(out) if out else np.zeros(0, dtype=np.int64)


def ch1_candidates(G: SmcGroup, phi: Automorphism) -> set[int]:
    """Values of ``ch_1`` allowed for ``phi`` by the case analysis."""
    from .group import decompose
    from .spectrum import CaseKind, classify_case

    dec = decompose(G)
    tag = classify_case(dec.n_free, G.m, G.p, dec.alpha_reduced)
    p, m = G.p, G.m
    h_part = math.gcd(phi.img_x.xexp - 1, dec.h)
    if tag.kind is CaseKind.PGROUP:
        lo = 1 if p != 2 else 2
        base = {p**i for i in range(lo, m + 1)}
    else:
        gamma = phi.img_x.xexp
        r = math.gcd(gamma - 1, G.pm)
        e = ma.valuation(r, p)
        if tag.kind is CaseKind.TRIVIAL:
            base = {p**e, p ** (e + 1)} if m else {p}
        elif tag.kind is CaseKind.NONTRIVIAL:
            base = {p ** min(m, e + 1)}
        elif tag.kind is CaseKind.P2_INVERSION:
            base = {2, 4}
        else:
            base = {4}
    return {h_part * v for v in base}


# -- degree-p characters ---------------------------------------------------------


def ch1_total(G: SmcGroup) -> int:
    return G.p * G.abelianization_modulus


def chp_total(G: SmcGroup) -> int:
    c = G.abelianization_modulus
    q, r = divmod(G.N - c, G.p)
    assert r == 0
    return q


def chp_fixed(G: SmcGroup, autos: AutomorphismBatch) -> np.ndarray:
    """``(1/p) sum_i gcd(gamma - alpha^i, N) - gcd(gamma - 1, alpha - 1, N)`` for ``phi(x) = x^gamma``.

    Requires every automorphism to map ``C_N`` to itself. The division is exact
    and checked.
    """
    if np.any(autos.xj != 0):
        raise ValidationError("gcd formula needs phi(C_N) = C_N")
    N, p = G.N, G.p
    gam = autos.xi[:, None]
    total = np.gcd((gam - G.pow_arr[None, :]) % N, N)
    total[total == 0] = N
    s = total.sum(axis=1)
    if np.any(s % p):
        raise ArithmeticError("sum of gcds not divisible by p")
    corr = np.gcd(np.gcd((autos.xi - 1) % N, (G.alpha - 1) % N), N)
    corr[corr == 0] = N
    return s // p - corr


def _chp_direct_preserving(G: SmcGroup, gammas: np.ndarray) -> np.ndarray:
    """Per ``gamma``: orbits of size p whose ``a`` satisfies ``a gamma = a alpha^i`` for some ``i``."""
    N, p = G.N, G.p
    a = np.arange(N, dtype=np.int64)[None, :]
    moving = (a * (G.alpha - 1)) % N != 0
    ug, back = np.unique(gammas, return_inverse=True)
    res = np.zeros(len(ug), dtype=np.int64)
    step = max(1, CHUNK_CELLS // max(1, N * p))
    for s in range(0, len(ug), step):
        g = ug[s : s + step, None, None]
        hit = ((a[:, :, None] * (g - G.pow_arr[None, None, :])) % N == 0).any(axis=2)
        cnt = (hit & moving).sum(axis=1)
        if np.any(cnt % p):
            raise ArithmeticError("fixed inducing characters do not form whole orbits")
        res[s : s + step] = cnt // p
    return res[back.ravel()]


@lru_cache(maxsize=16)
def _induced_value_ids(G: SmcGroup) -> tuple[np.ndarray, int]:
    """Integer id of the exact value ``sum_i zeta^(r alpha^i)`` for each ``r`` in ``Z_N``, and the id of 0."""
    N = G.N
    B = root_basis(N)
    r = np.arange(N, dtype=np.int64)
    vals = np.zeros((N, B.shape[1]), dtype=np.int64)
    for t in G.alpha_powers:
        vals += B[(r * t) % N]
    rows = np.vstack([vals, np.zeros((1, B.shape[1]), dtype=np.int64)])
    _, ids = np.unique(rows, axis=0, return_inverse=True)
    ids = ids.ravel()
    return ids[:N], int(ids[N])


def chp_fixed_by_values(
    G: SmcGroup, autos: AutomorphismBatch, classes: ConjugacyClasses | None = None
) -> np.ndarray:
    """Degree-p characters with ``chi o phi = chi``, comparing exact values on every class.

    Works for any automorphism, including ones that move ``C_N``.
    """
    if classes is None:
        classes = conjugacy_classes(G)
    ids, zero = _induced_value_ids(G)
    reps, sizes = dual_orbits(G)
    a = reps[sizes == G.p][:, None]
    ri, rj = classes.reps % G.N, classes.reps // G.N
    own = np.where(rj[None, :] == 0, ids[(a * ri[None, :]) % G.N], zero)
    out = np.zeros(len(autos), dtype=np.int64)
    k0 = 0
    cells = max(1, len(a) * len(ri))
    for part in autos.chunks(cells):
        ti, tj = part.apply(ri, rj)
        img = np.where(tj[:, None, :] == 0, ids[(a[None, :, :] * ti[:, None, :]) % G.N], zero)
        out[k0 : k0 + len(part)] = (img == own[None, :, :]).all(axis=2).sum(axis=1)
        k0 += len(part)
    return out


def chp_fixed_direct(
    G: SmcGroup, autos: AutomorphismBatch, budget: int | None = DEFAULT_GROUP_BUDGET
) -> np.ndarray:
    """Fixed degree-p characters by testing each dual orbit.

    Automorphisms preserving ``C_N`` use the criterion ``a gamma = a alpha^i (mod N)``;
    the rest compare exact character values class by class.
    """
    check_budget("group order", G.order, budget)
    out = np.zeros(len(autos), dtype=np.int64)
    keep = autos.xj == 0
    if keep.any():
        out[keep] = _chp_direct_preserving(G, autos.xi[keep])
    if (~keep).any():
        out[~keep] = chp_fixed_by_values(G, autos[np.flatnonzero(~keep)])
    return out


def reidemeister_via_characters(G: SmcGroup, autos: AutomorphismBatch) -> np.ndarray:
    """``R(phi) = ch_1 + ch_p`` (every irreducible has degree 1 or p)."""
    return ch1_fixed(G, autos) + chp_fixed_direct(G, autos)


def cyclic_fixed_points(n: int, gamma: int) -> int:
    return sum(1 for k in range(n) if (k * (gamma - 1)) % n == 0)


def cyclic_dual_fixed_points(n: int, gamma: int) -> int:
    """Characters ``chi_a`` of ``C_n`` with ``chi_a(x^gamma) = chi_a(x)``, by comparing values on every element."""
    return sum(
        1 for a in range(n) if all((a * gamma * k - a * k) % n == 0 for k in range(n))
    )
