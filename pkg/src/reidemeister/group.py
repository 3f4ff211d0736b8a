"""The split metacyclic group C_N x| C_p on exponent pairs.

An element ``x^i y^j`` is stored as ``(i mod N, j mod p)`` and indexed in flat
arrays as ``j * N + i``. The defining relation is ``y^-1 x y = x^alpha``, so
``y^b x^c = x^(c * alpha^-b) y^b``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, NamedTuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import modarith as ma
from .errors import DEFAULT_GROUP_BUDGET, ValidationError, check_budget


class GroupElement(NamedTuple):
    xexp: int
    yexp: int

    def __str__(self) -> str:
        return f"x^{self.xexp} y^{self.yexp}"


@dataclass(frozen=True)
class SmcGroup:
    """``(C_n x C_{p^m}) x|_alpha C_p`` with ``alpha`` a residue mod ``N = n p^m``.

    The action need not be free on ``C_n``; :func:`fixed_subgroup_H` splits off
    the pointwise fixed part.
    """

    n: int
    m: int
    p: int
    alpha: int

    def __post_init__(self) -> None:
        n, m, p = self.n, self.m, self.p
        if n < 1:
            raise ValidationError(f"n must be >= 1, got {n}")
        if m < 0:
            raise ValidationError(f"m must be >= 0, got {m}")
        if not ma.is_prime(p):
            raise ValidationError(f"p = {p} is not prime")
        if n % p == 0:
            raise ValidationError(f"gcd(n, p) = {math.gcd(n, p)} != 1")
        N = n * p**m
        alpha = self.alpha % N
        object.__setattr__(self, "alpha", alpha)
        if math.gcd(alpha, N) != 1:
            raise ValidationError(f"alpha = {alpha} is not a unit mod N = {N}")
        if pow(alpha, p, N) != 1 % N:
            raise ValidationError(f"alpha^p = {pow(alpha, p, N)} != 1 mod N = {N}")
        if alpha == 1 % N:
            raise ValidationError("alpha = 1 mod N: the action is trivial")

    # -- derived scalars ------------------------------------------------

    @property
    def N(self) -> int:
        return self.n * self.p**self.m

    @property
    def pm(self) -> int:
        return self.p**self.m

    @property
    def order(self) -> int:
        return self.N * self.p

    @property
    def params(self) -> tuple[int, int, int, int]:
        return (self.n, self.m, self.p, self.alpha)

    @cached_property
    def alpha_powers(self) -> tuple[int, ...]:
        return tuple(pow(self.alpha, k, self.N) for k in range(self.p))

    @cached_property
    def alpha_inv_powers(self) -> tuple[int, ...]:
        N = self.N
        return tuple(pow(self.alpha, (-k) % self.p, N) for k in range(self.p))

    @cached_property
    def beta(self) -> int | None:
        """``beta`` with ``alpha = beta p^(m-1) + 1 mod p^m`` and ``beta != 0 mod p``, if any."""
        if self.m < 1:
            return None
        pm, step = self.pm, self.p ** (self.m - 1)
        r = (self.alpha - 1) % pm
        if r == 0 or r % step:
            return None
        return r // step

    @cached_property
    def cycle_sums(self) -> tuple[int, ...]:
        """``S_b = sum_{t<p} alpha^(-t b) mod N``; then ``(x^c y^b)^p = x^(c S_b)``."""
        N, p = self.N, self.p
        return tuple(
            sum(self.alpha_inv_powers[(t * b) % p] for t in range(p)) % N
            for b in range(p)
        )

    @cached_property
    def abelianization_modulus(self) -> int:
        """``gcd(alpha - 1, N)``; ``G/[G,G]`` is ``Z_c x Z_p`` for this ``c``."""
        return math.gcd(self.alpha - 1, self.N)

    # -- flat-array views -----------------------------------------------

    @cached_property
    def geom(self) -> np.ndarray:
        """``geom[b, e] = sum_{t<e} alpha^(-t b) mod N`` for ``0 <= e <= max(N, p)``.

        ``(x^c y^b)^e = x^(c * geom[b, e]) y^(b e)``.
        """
        N, p = self.N, self.p
        L = max(N, p)
        inv = np.array(self.alpha_inv_powers, dtype=np.int64)
        e = np.arange(L, dtype=np.int64)
        out = np.zeros((p, L + 1), dtype=np.int64)
        for b in range(p):
            out[b, 1:] = np.cumsum(inv[(e * b) % p]) % N
        out.setflags(write=False)
        return out

    @cached_property
    def inv_pow_arr(self) -> np.ndarray:
        a = np.array(self.alpha_inv_powers, dtype=np.int64)
        a.setflags(write=False)
        return a

    @cached_property
    def pow_arr(self) -> np.ndarray:
        a = np.array(self.alpha_powers, dtype=np.int64)
        a.setflags(write=False)
        return a

    def index(self, g: GroupElement) -> int:
        return g.yexp * self.N + g.xexp

    def element(self, idx: int) -> GroupElement:
        return GroupElement(idx % self.N, idx // self.N)

    def elements(self) -> Iterator[GroupElement]:
        for j in range(self.p):
            for i in range(self.N):
                yield GroupElement(i, j)

    @cached_property
    def all_x(self) -> np.ndarray:
        a = np.tile(np.arange(self.N, dtype=np.int64), self.p)
        a.setflags(write=False)
        return a

    @cached_property
    def all_y(self) -> np.ndarray:
        a = np.repeat(np.arange(self.p, dtype=np.int64), self.N)
        a.setflags(write=False)
        return a

    def __str__(self) -> str:
        return f"SMC(n={self.n}, m={self.m}, p={self.p}, alpha={self.alpha})"


IDENTITY = GroupElement(0, 0)


def element(G: SmcGroup, i: int, j: int = 0) -> GroupElement:
    return GroupElement(i % G.N, j % G.p)


def multiply(g: GroupElement, h: GroupElement, G: SmcGroup) -> GroupElement:
    a, b = g
    c, d = h
    return GroupElement((a + c * G.alpha_inv_powers[b % G.p]) % G.N, (b + d) % G.p)


def inverse(g: GroupElement, G: SmcGroup) -> GroupElement:
    a, b = g
    return GroupElement((-a * G.alpha_powers[b % G.p]) % G.N, (-b) % G.p)


def power(g: GroupElement, e: int, G: SmcGroup) -> GroupElement:
    if e < 0:
        return power(inverse(g, G), -e, G)
    a, b = g
    q, r = divmod(e, G.p)
    s = q * G.cycle_sums[b] + sum(G.alpha_inv_powers[(t * b) % G.p] for t in range(r))
    return GroupElement((a * s) % G.N, (b * e) % G.p)


def conjugate(g: GroupElement, by: GroupElement, G: SmcGroup) -> GroupElement:
    """``by^-1 g by``."""
    return multiply(multiply(inverse(by, G), g, G), by, G)


def commutator(g: GroupElement, h: GroupElement, G: SmcGroup) -> GroupElement:
    """``[g, h] = g^-1 h^-1 g h``."""
    return multiply(
        multiply(inverse(g, G), inverse(h, G), G), multiply(g, h, G), G
    )


def element_order(g: GroupElement, G: SmcGroup) -> int:
    c, d = g
    N = G.N
    if d % G.p == 0:
        return N // math.gcd(c, N)
    return G.p * (N // math.gcd(c * G.cycle_sums[d % G.p], N))


def element_order_naive(g: GroupElement, G: SmcGroup) -> int:
    t, h = 1, g
    while h != IDENTITY:
        h = multiply(h, g, G)
        t += 1
    return t


# -- vectorized arithmetic ------------------------------------------------


def mul_arrays(G: SmcGroup, ai, aj, bi, bj) -> tuple[np.ndarray, np.ndarray]:
    ai, aj, bi, bj = (np.asarray(v, dtype=np.int64) for v in (ai, aj, bi, bj))
    return (ai + bi * G.inv_pow_arr[aj]) % G.N, (aj + bj) % G.p


def inv_arrays(G: SmcGroup, ai, aj) -> tuple[np.ndarray, np.ndarray]:
    ai, aj = np.asarray(ai, dtype=np.int64), np.asarray(aj, dtype=np.int64)
    return (-ai * G.pow_arr[aj]) % G.N, (-aj) % G.p


def pow_arrays(G: SmcGroup, ci, cj, e) -> tuple[np.ndarray, np.ndarray]:
    """``(x^ci y^cj)^e`` elementwise for ``0 <= e <= max(N, p)``."""
    ci, cj, e = (np.asarray(v, dtype=np.int64) for v in (ci, cj, e))
    return (ci * G.geom[cj, e]) % G.N, (cj * e) % G.p


def element_order_arrays(G: SmcGroup, ci, cj) -> np.ndarray:
    ci, cj = np.asarray(ci, dtype=np.int64), np.asarray(cj, dtype=np.int64)
    N = G.N
    S = np.array(G.cycle_sums, dtype=np.int64)
    in_base = N // np.gcd(ci, N)
    outside = G.p * (N // np.gcd(ci * S[cj] % N, N))
    return np.where(cj == 0, in_base, outside)


# -- conjugacy ------------------------------------------------------------


@dataclass(frozen=True)
class ConjugacyClasses:
    """Class id per flat element index, plus one representative per class.

    Class ids are numbered by the smallest flat index they contain.
    """

    group: SmcGroup
    labels: np.ndarray
    reps: np.ndarray
    sizes: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.reps)

    def classes(self) -> list[list[GroupElement]]:
        buckets: list[list[GroupElement]] = [[] for _ in range(len(self.reps))]
        for idx, lab in enumerate(self.labels.tolist()):
            buckets[lab].append(self.group.element(idx))
        return [sorted(b) for b in buckets]

    def class_of(self, g: GroupElement) -> int:
        return int(self.labels[self.group.index(g)])


def orbit_labels(n_nodes: int, sources: np.ndarray, targets: np.ndarray) -> tuple[int, np.ndarray]:
    """Connected components of an undirected graph, relabelled by first occurrence."""
    graph = coo_matrix(
        (np.ones(len(sources), dtype=np.int8), (sources, targets)),
        shape=(n_nodes, n_nodes),
    )
    k, raw = connected_components(graph, directed=False)
    # renumber so that ids follow the smallest member
    first = np.full(k, n_nodes, dtype=np.int64)
    np.minimum.at(first, raw, np.arange(n_nodes))
    order = np.argsort(first, kind="stable")
    remap = np.empty(k, dtype=np.int64)
    remap[order] = np.arange(k)
    return k, remap[raw]


def conjugacy_classes(G: SmcGroup, budget: int | None = DEFAULT_GROUP_BUDGET) -> ConjugacyClasses:
    check_budget("group order", G.order, budget)
    I, J = G.all_x, G.all_y
    idx = J * G.N + I
    sources, targets = [idx], [idx]
    for gi, gj in ((1, 0), (0, 1)):
        hi, hj = inv_arrays(G, gi, gj)
        ti, tj = mul_arrays(G, hi, hj, I, J)
        ti, tj = mul_arrays(G, ti, tj, gi, gj)
        sources.append(idx)
        targets.append(tj * G.N + ti)
    k, labels = orbit_labels(G.order, np.concatenate(sources), np.concatenate(targets))
    reps = np.full(k, G.order, dtype=np.int64)
    np.minimum.at(reps, labels, idx)
    sizes = np.bincount(labels, minlength=k)
    for arr in (labels, reps, sizes):
        arr.setflags(write=False)
    return ConjugacyClasses(G, labels, reps, sizes)


# -- distinguished subgroups ----------------------------------------------


def fixed_subgroup_H(n: int, m: int, p: int, alpha: int) -> tuple[int, int, int]:
    """Split off the part of ``C_n`` fixed pointwise by ``x -> x^alpha``.

    Each prime power ``q^e || n`` is either fixed pointwise (``alpha = 1 mod q^e``)
    or acted on without fixed points, so ``h`` is the product of the former.
    Returns ``(h, n_free, alpha mod n_free p^m)``.
    """
    h = 1
    for q, e in ma.factorize(n):
        qe = q**e
        if (alpha - 1) % qe == 0:
            h *= qe
        elif math.gcd(alpha - 1, qe) != 1:
            raise ValidationError(
                f"alpha = {alpha} acts with nontrivial fixed points on C_{qe} without fixing it"
            )
    n_free = n // h
    return h, n_free, alpha % (n_free * p**m)


@dataclass(frozen=True)
class Decomposition:
    """``G = C_h x S`` where ``S = SMC(n_free, m, p)`` acts freely on its ``C_{n_free}``.

    The isomorphism sends ``x^i y^j`` to ``(i mod h, x_S^(i mod N_S) y_S^j)``.
    ``free`` is ``None`` when the action on the free part is trivial.
    """

    h: int
    n_free: int
    alpha_reduced: int
    free: SmcGroup | None

    def split(self, g: GroupElement) -> tuple[int, GroupElement]:
        NS = self.n_free * (self.free.pm if self.free else 1)
        return g.xexp % self.h, GroupElement(g.xexp % NS, g.yexp)

    def join(self, h_part: int, s: GroupElement, G: SmcGroup) -> GroupElement:
        NS = G.N // self.h
        i, _ = ma.crt_solve([(h_part % self.h, self.h), (s.xexp % NS, NS)])
        return GroupElement(i, s.yexp)


def decompose(G: SmcGroup) -> Decomposition:
    h, n_free, ar = fixed_subgroup_H(G.n, G.m, G.p, G.alpha)
    try:
        free = SmcGroup(n_free, G.m, G.p, ar)
    except ValidationError:
        free = None
    return Decomposition(h, n_free, ar, free)


def commutator_subgroup_order(G: SmcGroup) -> int:
    """``|[G,G]|`` from ``[G,G] = <x^(alpha-1)>``."""
    return G.N // G.abelianization_modulus


def generated_subgroup(G: SmcGroup, gens_i: np.ndarray, gens_j: np.ndarray) -> np.ndarray:
    """Membership mask (over flat indices) of the subgroup generated by the given elements."""
    gens = np.unique(np.asarray(gens_j, dtype=np.int64) * G.N + np.asarray(gens_i, dtype=np.int64))
    gi, gj = gens % G.N, gens // G.N
    mask = np.zeros(G.order, dtype=bool)
    mask[0] = True
    frontier = np.array([0], dtype=np.int64)
    while len(frontier):
        fi, fj = frontier % G.N, frontier // G.N
        ri, rj = mul_arrays(G, fi[:, None], fj[:, None], gi[None, :], gj[None, :])
        new = np.unique(rj * G.N + ri)
        new = new[~mask[new]]
        mask[new] = True
        frontier = new
    return mask


def commutator_subgroup_order_oracle(G: SmcGroup, all_pairs_limit: int = 2000) -> int:
    """``|[G,G]|`` by generation: from every commutator when ``|G|`` is small,
    otherwise from the normal closure of ``[x, y]``."""
    if G.order <= all_pairs_limit:
        I, J = G.all_x, G.all_y
        ai, aj = I[:, None], J[:, None]
        bi, bj = I[None, :], J[None, :]
        gi, gj = inv_arrays(G, ai, aj)
        hi, hj = inv_arrays(G, bi, bj)
        ui, uj = mul_arrays(G, gi, gj, hi, hj)
        vi, vj = mul_arrays(G, ai, aj, bi, bj)
        ci, cj = mul_arrays(G, ui, uj, vi, vj)
        return int(generated_subgroup(G, ci.ravel(), cj.ravel()).sum())
    c = commutator(GroupElement(1, 0), GroupElement(0, 1), G)
    # conjugates of [x, y] by every element
    I, J = G.all_x, G.all_y
    wi, wj = inv_arrays(G, I, J)
    ti, tj = mul_arrays(G, wi, wj, c.xexp, c.yexp)
    ti, tj = mul_arrays(G, ti, tj, I, J)
    return int(generated_subgroup(G, ti, tj).sum())


def centre(G: SmcGroup, budget: int | None = DEFAULT_GROUP_BUDGET) -> list[GroupElement]:
    check_budget("group order", G.order, budget)
    I, J = G.all_x, G.all_y
    ok = np.ones(G.order, dtype=bool)
    for si, sj in ((1, 0), (0, 1)):
        li, lj = mul_arrays(G, I, J, si, sj)
        ri, rj = mul_arrays(G, si, sj, I, J)
        ok &= (li == ri) & (lj == rj)
    return [G.element(int(k)) for k in np.flatnonzero(ok)]


def centralizer_size(G: SmcGroup, g: GroupElement) -> int:
    I, J = G.all_x, G.all_y
    li, lj = mul_arrays(G, I, J, g.xexp, g.yexp)
    ri, rj = mul_arrays(G, g.xexp, g.yexp, I, J)
    return int(((li == ri) & (lj == rj)).sum())


def valid_alphas(n: int, m: int, p: int) -> list[int]:
    """All ``alpha`` mod ``N`` giving a valid nontrivial action (any fixed part allowed)."""
    N = n * p**m
    if n % p == 0 or N == 1:
        return []
    out = []
    for a in ma.units(N):
        if a != 1 and pow(a, p, N) == 1:
            try:
                fixed_subgroup_H(n, m, p, a)
            except ValidationError:
                continue
            out.append(a)
    return out
