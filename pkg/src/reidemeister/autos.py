"""Automorphisms, their enumeration, and Reidemeister numbers by orbit counting.

An automorphism is fixed by the images of ``x`` and ``y``. Most routines act
on an :class:`AutomorphismBatch` (parallel arrays of images) so that whole
automorphism groups are processed with numpy rather than one map at a time.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import modarith as ma
from .errors import (
    DEFAULT_AUT_BUDGET,
    DEFAULT_GROUP_BUDGET,
    ValidationError,
    check_budget,
)
from .group import (
    ConjugacyClasses,
    GroupElement,
    SmcGroup,
    conjugacy_classes,
    decompose,
    element_order,
    inv_arrays,
    inverse,
    mul_arrays,
    multiply,
    orbit_labels,
    pow_arrays,
    power,
)

# Upper bound on the number of int64 cells one vectorized step may allocate.
CHUNK_CELLS = 1 << 22


def relation_obstruction(G: SmcGroup, img_x: GroupElement, img_y: GroupElement) -> str | None:
    """Why ``x -> img_x, y -> img_y`` fails to define an automorphism, or ``None``."""
    ox = element_order(img_x, G)
    if ox != G.N:
        return f"image of x has order {ox}, x has order {G.N}"
    if power(img_y, G.p, G) != (0, 0):
        return f"image of y has order {element_order(img_y, G)}, which does not divide p = {G.p}"
    lhs = multiply(multiply(inverse(img_y, G), img_x, G), img_y, G)
    if lhs != power(img_x, G.alpha, G):
        return "conjugation relation y^-1 x y = x^alpha fails on the images"
    step = G.N // G.p
    if img_y == (0, 0) or any(power(img_x, k * step, G) == img_y for k in range(1, G.p)):
        return "images do not generate G (image of y lies in the cyclic subgroup of the image of x)"
    return None


@dataclass(frozen=True)
class Automorphism:
    group: SmcGroup
    img_x: GroupElement
    img_y: GroupElement

    def __post_init__(self) -> None:
        G = self.group
        object.__setattr__(self, "img_x", GroupElement(self.img_x[0] % G.N, self.img_x[1] % G.p))
        object.__setattr__(self, "img_y", GroupElement(self.img_y[0] % G.N, self.img_y[1] % G.p))
        why = relation_obstruction(G, self.img_x, self.img_y)
        if why:
            raise ValidationError(f"not an automorphism of {G}: {why}")

    @classmethod
    def structured(cls, G: SmcGroup, gamma: int, a: int = 0) -> "Automorphism":
        """``x -> x^gamma``, ``y -> x^a y``."""
        if math.gcd(gamma, G.N) != 1:
            raise ValidationError(
                f"gamma = {gamma} is not a unit mod N = {G.N} (gcd = {math.gcd(gamma, G.N)})"
            )
        return cls(G, GroupElement(gamma, 0), GroupElement(a, 1))

    @classmethod
    def identity(cls, G: SmcGroup) -> "Automorphism":
        return cls(G, GroupElement(1, 0), GroupElement(0, 1))

    @property
    def preserves_base(self) -> bool:
        """Whether the cyclic subgroup ``C_N`` is mapped to itself."""
        return self.img_x.yexp == 0

    @property
    def gamma(self) -> int:
        if not self.preserves_base:
            raise ValueError("image of x lies outside C_N")
        return self.img_x.xexp

    def __call__(self, g: GroupElement) -> GroupElement:
        G = self.group
        return multiply(power(self.img_x, g[0], G), power(self.img_y, g[1], G), G)

    def compose(self, other: "Automorphism") -> "Automorphism":
        """``self o other``."""
        return Automorphism(self.group, self(other.img_x), self(other.img_y))

    def key(self) -> tuple[int, int]:
        return (self.group.index(self.img_x), self.group.index(self.img_y))


def inner(G: SmcGroup, g: GroupElement) -> Automorphism:
    """``tau_g: z -> g z g^-1``."""
    gi = inverse(g, G)
    return Automorphism(
        G,
        multiply(multiply(g, GroupElement(1, 0), G), gi, G),
        multiply(multiply(g, GroupElement(0, 1), G), gi, G),
    )


def compose_with_inner(phi: Automorphism, g: GroupElement) -> Automorphism:
    """``tau_g o phi``."""
    return inner(phi.group, g).compose(phi)


@dataclass(frozen=True)
class AutomorphismBatch:
    """Parallel arrays of generator images (``img_x = (xi, xj)``, ``img_y = (yi, yj)``)."""

    group: SmcGroup
    xi: np.ndarray
    xj: np.ndarray
    yi: np.ndarray
    yj: np.ndarray

    def __len__(self) -> int:
        return len(self.xi)

    def __getitem__(self, k) -> "AutomorphismBatch | Automorphism":
        if isinstance(k, (int, np.integer)):
            return Automorphism(
                self.group,
                GroupElement(int(self.xi[k]), int(self.xj[k])),
                GroupElement(int(self.yi[k]), int(self.yj[k])),
            )
        return AutomorphismBatch(self.group, self.xi[k], self.xj[k], self.yi[k], self.yj[k])

    def __iter__(self) -> Iterator[Automorphism]:
        for k in range(len(self)):
            yield self[k]

    @classmethod
    def of(cls, G: SmcGroup, autos: list[Automorphism]) -> "AutomorphismBatch":
        arr = np.array([(*a.img_x, *a.img_y) for a in autos], dtype=np.int64).reshape(-1, 4)
        return cls(G, arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3])

    def keys(self) -> np.ndarray:
        """``index(img_x) * |G| + index(img_y)``; distinct automorphisms have distinct keys."""
        G = self.group
        return (self.xj * G.N + self.xi) * G.order + (self.yj * G.N + self.yi)

    def chunks(self, cells_per_item: int) -> Iterator["AutomorphismBatch"]:
        step = max(1, CHUNK_CELLS // max(1, cells_per_item))
        for s in range(0, len(self), step):
            yield self[s : s + step]

    def apply(self, ei: np.ndarray, ej: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Images of the elements ``x^ei y^ej`` under every automorphism; shape ``(K, len(ei))``."""
        G = self.group
        ei = np.asarray(ei, dtype=np.int64)[None, :]
        ej = np.asarray(ej, dtype=np.int64)[None, :]
        ai, aj = pow_arrays(G, self.xi[:, None], self.xj[:, None], ei)
        bi, bj = pow_arrays(G, self.yi[:, None], self.yj[:, None], ej)
        return mul_arrays(G, ai, aj, bi, bj)


# -- enumeration ----------------------------------------------------------


def base_is_characteristic(G: SmcGroup) -> bool:
    """``C_N`` is characteristic once the free part of ``C_n`` is nontrivial."""
    return decompose(G).n_free >= 2


def count_structured(G: SmcGroup) -> int:
    return ma.totient(G.N) * math.gcd(G.cycle_sums[1], G.N)


def enumerate_structured(G: SmcGroup, aut_budget: int | None = DEFAULT_AUT_BUDGET) -> AutomorphismBatch:
    """All ``x -> x^gamma, y -> x^a y`` with ``gamma`` a unit and ``a * S_1 = 0 mod N``.

    Complete only when ``C_N`` is characteristic (see :func:`base_is_characteristic`).
    """
    check_budget("automorphism count", count_structured(G), aut_budget)
    N = G.N
    gammas = np.array(ma.units(N), dtype=np.int64) if N > 1 else np.array([0], dtype=np.int64)
    step = N // math.gcd(G.cycle_sums[1], N)
    avals = np.arange(0, N, step, dtype=np.int64)
    xi = np.repeat(gammas, len(avals))
    yi = np.tile(avals, len(gammas))
    zeros = np.zeros_like(xi)
    return AutomorphismBatch(G, xi, zeros, yi, np.ones_like(xi))


def enumerate_generic(
    G: SmcGroup,
    budget: int | None = DEFAULT_GROUP_BUDGET,
    aut_budget: int | None = DEFAULT_AUT_BUDGET,
) -> AutomorphismBatch:
    """Relation-checking search over images of ``x`` of order ``N`` and of ``y`` of order ``p``."""
    check_budget("group order", G.order, budget)
    from .group import element_order_arrays

    I, J = G.all_x, G.all_y
    orders = element_order_arrays(G, I, J)
    cx = np.flatnonzero(orders == G.N)
    cy = np.flatnonzero(orders == G.p)
    cyi, cyj = cy % G.N, cy // G.N
    step = G.N // G.p
    found = []
    total = 0
    rows = max(1, CHUNK_CELLS // max(1, len(cy) * 4))
    for s in range(0, len(cx), rows):
        part = cx[s : s + rows]
        xi, xj = (part % G.N)[:, None], (part // G.N)[:, None]
        yi, yj = cyi[None, :], cyj[None, :]
        # y'^-1 x' y' == x'^alpha
        ui, uj = inv_arrays(G, yi, yj)
        li, lj = mul_arrays(G, ui, uj, xi, xj)
        li, lj = mul_arrays(G, li, lj, yi, yj)
        ri, rj = pow_arrays(G, xi, xj, G.alpha)
        ok = (li == ri) & (lj == rj)
        # y' must avoid the order-p elements of <x'>
        for k in range(1, G.p):
            pi, pj = pow_arrays(G, xi, xj, k * step)
            ok &= ~((pi == yi) & (pj == yj))
        a, b = np.nonzero(ok)
        total += len(a)
        check_budget("automorphism count", total, aut_budget)
        found.append((part[a], cy[b]))
    if found:
        X = np.concatenate([f[0] for f in found])
        Y = np.concatenate([f[1] for f in found])
    else:
        X = Y = np.zeros(0, dtype=np.int64)
    return AutomorphismBatch(G, X % G.N, X // G.N, Y % G.N, Y // G.N)


def enumerate_automorphisms(
    G: SmcGroup,
    budget: int | None = DEFAULT_GROUP_BUDGET,
    aut_budget: int | None = DEFAULT_AUT_BUDGET,
    method: str = "auto",
) -> AutomorphismBatch:
    """Every automorphism of ``G`` once. ``method`` is ``auto``, ``structured`` or ``generic``."""
    if method == "auto":
        method = "structured" if base_is_characteristic(G) else "generic"
    if method == "structured":
        if not base_is_characteristic(G):
            raise ValidationError("structured enumeration needs a characteristic C_N (free part n >= 2)")
        return enumerate_structured(G, aut_budget)
    if method == "generic":
        return enumerate_generic(G, budget, aut_budget)
    raise ValueError(f"unknown enumeration method {method!r}")


# -- Reidemeister numbers via fixed conjugacy classes -----------------------


def reidemeister_numbers(
    G: SmcGroup, autos: AutomorphismBatch, classes: ConjugacyClasses | None = None
) -> np.ndarray:
    """``R(phi)`` for every automorphism, as the number of conjugacy classes ``phi`` fixes."""
    if classes is None:
        classes = conjugacy_classes(G)
    labels, reps = classes.labels, classes.reps
    ri, rj = reps % G.N, reps // G.N
    inside = rj == 0
    in_i, in_lab = ri[inside], labels[reps[inside]]
    out_i, out_j, out_lab = ri[~inside], rj[~inside], labels[reps[~inside]]

    # classes inside C_N only depend on img_x
    xkey = autos.xj * G.N + autos.xi
    ukeys, back = np.unique(xkey, return_inverse=True)
    uxi, uxj = ukeys % G.N, ukeys // G.N
    fixed_inner = np.zeros(len(ukeys), dtype=np.int64)
    step = max(1, CHUNK_CELLS // max(1, len(in_i)))
    for s in range(0, len(ukeys), step):
        ci, cj = uxi[s : s + step, None], uxj[s : s + step, None]
        ti, tj = pow_arrays(G, ci, cj, in_i[None, :])
        fixed_inner[s : s + step] = (labels[tj * G.N + ti] == in_lab[None, :]).sum(axis=1)

    out = fixed_inner[back.ravel()].copy()
    if len(out_i):
        start = 0
        for part in autos.chunks(len(out_i)):
            ti, tj = part.apply(out_i, out_j)
            out[start : start + len(part)] += (labels[tj * G.N + ti] == out_lab[None, :]).sum(axis=1)
            start += len(part)
    return out


def reidemeister_via_classes(
    G: SmcGroup, phi: Automorphism, classes: ConjugacyClasses | None = None
) -> int:
    return int(reidemeister_numbers(G, AutomorphismBatch.of(G, [phi]), classes)[0])


def reidemeister_spectrum_bruteforce(
    G: SmcGroup,
    budget: int | None = DEFAULT_GROUP_BUDGET,
    aut_budget: int | None = DEFAULT_AUT_BUDGET,
) -> list[int]:
    check_budget("group order", G.order, budget)
    autos = enumerate_automorphisms(G, budget, aut_budget)
    return sorted(set(reidemeister_numbers(G, autos).tolist()))


# -- twisted conjugacy ------------------------------------------------------


@dataclass(frozen=True)
class TwistedClassPartition:
    group: SmcGroup
    labels: np.ndarray
    count: int

    def classes(self) -> list[set[GroupElement]]:
        out: list[set[GroupElement]] = [set() for _ in range(self.count)]
        for idx, lab in enumerate(self.labels.tolist()):
            out[lab].add(self.group.element(idx))
        return out


def _twisted_edges(G: SmcGroup, autos: AutomorphismBatch) -> tuple[np.ndarray, np.ndarray]:
    """Edges ``z -> s z phi(s)^-1`` for ``s`` in ``{x, y}`` on the block-diagonal node set."""
    K = len(autos)
    I, J = G.all_x[None, :], G.all_y[None, :]
    src = (np.arange(K, dtype=np.int64)[:, None] * G.order + (J * G.N + I)).ravel()
    srcs, dsts = [src], [src]
    for (si, sj), (fi, fj) in (
        ((1, 0), (autos.xi, autos.xj)),
        ((0, 1), (autos.yi, autos.yj)),
    ):
        hi, hj = inv_arrays(G, fi[:, None], fj[:, None])
        ti, tj = mul_arrays(G, si, sj, I, J)
        ti, tj = mul_arrays(G, ti, tj, hi, hj)
        dst = (np.arange(K, dtype=np.int64)[:, None] * G.order + (tj * G.N + ti)).ravel()
        srcs.append(src)
        dsts.append(dst)
    return np.concatenate(srcs), np.concatenate(dsts)


def twisted_classes(
    G: SmcGroup, phi: Automorphism, budget: int | None = DEFAULT_GROUP_BUDGET
) -> TwistedClassPartition:
    """Orbits of ``z -> g z phi(g)^-1``, by union-find over the whole group."""
    check_budget("group order", G.order, budget)
    s, d = _twisted_edges(G, AutomorphismBatch.of(G, [phi]))
    k, labels = orbit_labels(G.order, s, d)
    labels.setflags(write=False)
    return TwistedClassPartition(G, labels, k)


def _components_per_block(n_nodes: int, src, dst, block_of_node: np.ndarray, n_blocks: int) -> np.ndarray:
    graph = coo_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(n_nodes, n_nodes))
    k, raw = connected_components(graph, directed=False)
    comp_block = np.zeros(k, dtype=np.int64)
    comp_block[raw] = block_of_node
    return np.bincount(comp_block, minlength=n_blocks)


def twisted_class_counts_full(G: SmcGroup, autos: AutomorphismBatch) -> np.ndarray:
    """Number of twisted classes per automorphism by union-find on all of ``G``."""
    out = np.zeros(len(autos), dtype=np.int64)
    start = 0
    for part in autos.chunks(3 * G.order):
        K = len(part)
        s, d = _twisted_edges(G, part)
        block = np.repeat(np.arange(K, dtype=np.int64), G.order)
        out[start : start + K] = _components_per_block(K * G.order, s, d, block, K)
        start += K
    return out


def _twisted_counts_reduced(G: SmcGroup, autos: AutomorphismBatch) -> np.ndarray:
    """Twisted class counts for automorphisms with ``phi(x) = x^gamma``.

    Inside the coset ``C_N y^j``, ``x`` acts by ``i -> i + 1 - gamma alpha^-j``,
    so its orbits are the residues mod ``g_j = gcd(1 - gamma alpha^-j, N)``.
    These orbits are the nodes; ``y`` supplies the edges.
    """
    N, p = G.N, G.p
    K = len(autos)
    gam = autos.xi[:, None]
    g = np.gcd((1 - gam * G.inv_pow_arr[None, :]) % N, N)
    g[g == 0] = N
    sizes = g.ravel()
    starts = np.concatenate(([0], np.cumsum(sizes)[:-1]))
    total = int(sizes.sum())
    cell = np.repeat(np.arange(K * p, dtype=np.int64), sizes)
    r = np.arange(total, dtype=np.int64) - starts[cell]
    k, j = cell // p, cell % p
    hi, hj = inv_arrays(G, autos.yi[k], autos.yj[k])
    wi, wj = mul_arrays(G, 0, 1, r, j)
    wi, wj = mul_arrays(G, wi, wj, hi, hj)
    tcell = k * p + wj
    dst = starts[tcell] + wi % sizes[tcell]
    src = np.arange(total, dtype=np.int64)
    return _components_per_block(total, src, dst, k, K)


def twisted_class_counts(G: SmcGroup, autos: AutomorphismBatch) -> np.ndarray:
    """``|twisted classes|`` for every automorphism; reduced orbit graph where ``phi(C_N) = C_N``."""
    out = np.zeros(len(autos), dtype=np.int64)
    keep = autos.xj == 0
    idx = np.flatnonzero(keep)
    if len(idx):
        sub = autos[idx]
        per_item = int(np.gcd((1 - sub.xi[:, None] * G.inv_pow_arr[None, :]) % G.N, G.N).sum(axis=1).max()) or G.N
        res = []
        start = 0
        for part in sub.chunks(max(per_item, 1) * 4):
            res.append(_twisted_counts_reduced(G, part))
            start += len(part)
        out[idx] = np.concatenate(res)
    rest = np.flatnonzero(~keep)
    if len(rest):
        out[rest] = twisted_class_counts_full(G, autos[rest])
    return out


# -- fixed points and the abelianization ---------------------------------------


def fixed_point_counts(G: SmcGroup, autos: AutomorphismBatch) -> np.ndarray:
    """``|Fix(phi)|`` for every automorphism."""
    I, J = G.all_x, G.all_y
    out = []
    for part in autos.chunks(G.order * 3):
        ti, tj = part.apply(I, J)
        out.append(((ti == I[None, :]) & (tj == J[None, :])).sum(axis=1))
    return np.concatenate(out) if out else np.zeros(0, dtype=np.int64)


def twisted_map_image_sizes(G: SmcGroup, autos: AutomorphismBatch) -> np.ndarray:
    """``|{g phi(g)^-1}|`` for every automorphism."""
    I, J = G.all_x, G.all_y
    out = []
    for part in autos.chunks(G.order * 4):
        ti, tj = part.apply(I, J)
        hi, hj = inv_arrays(G, ti, tj)
        ri, rj = mul_arrays(G, I[None, :], J[None, :], hi, hj)
        key = np.sort(rj * G.N + ri, axis=1)
        out.append(1 + (np.diff(key, axis=1) != 0).sum(axis=1))
    return np.concatenate(out) if out else np.zeros(0, dtype=np.int64)


def abelianization_images(G: SmcGroup, autos: AutomorphismBatch) -> tuple[np.ndarray, ...]:
    """Images of the generators of ``G_ab = Z_c x Z_p`` (``c = gcd(alpha - 1, N)``)."""
    c = G.abelianization_modulus
    return autos.xi % c, autos.xj % G.p, autos.yi % c, autos.yj % G.p


def abelianization_fixed_points(G: SmcGroup, autos: AutomorphismBatch) -> np.ndarray:
    """``|Fix|`` of the induced map on ``G/[G,G]``, by enumerating the quotient."""
    c, p = G.abelianization_modulus, G.p
    u = np.repeat(np.arange(c, dtype=np.int64), p)[None, :]
    v = np.tile(np.arange(p, dtype=np.int64), c)[None, :]
    out = []
    for part in autos.chunks(c * p * 2):
        a, b, s, t = (col[:, None] for col in abelianization_images(G, part))
        fu = (u * a + v * s) % c
        fv = (u * b + v * t) % p
        out.append(((fu == u) & (fv == v)).sum(axis=1))
    return np.concatenate(out) if out else np.zeros(0, dtype=np.int64)
