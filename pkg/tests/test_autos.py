import itertools
import math

import numpy as np
import pytest

from reidemeister import autos as au
from reidemeister import group as gp
from reidemeister import modarith as ma
from reidemeister.errors import BudgetExceeded, ValidationError
from reidemeister.group import GroupElement as E
from reidemeister.group import SmcGroup

from helpers import small_groups


def _brute_automorphisms(G):
    """Every pair of images that defines a bijective homomorphism, checked elementwise."""
    els = list(G.elements())
    out = set()
    for ix, iy in itertools.product(els, els):
        if au.relation_obstruction(G, ix, iy):
            continue
        phi = au.Automorphism(G, ix, iy)
        if len({phi(g) for g in els}) == G.order:
            out.add(phi.key())
    return out


@pytest.mark.parametrize(
    "params, size",
    [((5, 0, 2, 4), 20), ((1, 2, 2, 3), 8), ((7, 0, 3, 2), 42), ((1, 2, 3, 4), 54), ((1, 3, 2, 3), 16), ((3, 0, 2, 2), 6)],
)
def test_automorphism_counts(params, size):
    G = SmcGroup(*params)
    A = au.enumerate_automorphisms(G)
    assert len(A) == size
    assert len(set(A.keys().tolist())) == size


@pytest.mark.parametrize(
    "params", [(5, 0, 2, 4), (1, 2, 2, 3), (1, 3, 2, 5), (3, 1, 2, 5), (7, 0, 3, 4), (1, 2, 3, 7), (15, 0, 2, 4)]
)
def test_enumeration_matches_brute_force(params):
    G = SmcGroup(*params)
    A = au.enumerate_automorphisms(G)
    assert {tuple(k) for k in zip(*divmod(A.keys(), G.order))} == _brute_automorphisms(G)


@pytest.mark.parametrize("params", [p for p in small_groups(150) if SmcGroup(*p).order <= 150][::3])
def test_structured_equals_generic_when_characteristic(params):
    G = SmcGroup(*params)
    if not au.base_is_characteristic(G):
        with pytest.raises(ValidationError):
            au.enumerate_automorphisms(G, method="structured")
        return
    s = np.sort(au.enumerate_automorphisms(G, method="structured").keys())
    g = np.sort(au.enumerate_automorphisms(G, method="generic").keys())
    assert np.array_equal(s, g)
    assert len(s) == au.count_structured(G)


def test_c_n_not_characteristic_with_fixed_part():
    # C_3 x (C_8 x| C_2, alpha = 5): n_free = 1 and x y also has order 24
    G = SmcGroup(3, 3, 2, 13)
    A = au.enumerate_automorphisms(G)
    assert not au.base_is_characteristic(G)
    assert np.any(A.xj != 0)


def test_aut_budget():
    with pytest.raises(BudgetExceeded):
        au.enumerate_automorphisms(SmcGroup(997, 0, 2, 996), aut_budget=1000)


def test_invalid_images_rejected():
    G = SmcGroup(5, 0, 2, 4)
    with pytest.raises(ValidationError):
        au.Automorphism(G, E(1, 0), E(0, 0))
    with pytest.raises(ValidationError):
        au.Automorphism.structured(G, 5, 0)
    with pytest.raises(ValidationError):
        au.Automorphism(G, E(2, 0), E(1, 0))


def test_composition_closed_and_associative():
    G = SmcGroup(1, 2, 3, 4)
    A = list(au.enumerate_automorphisms(G))
    keys = {a.key() for a in A}
    for f, g in itertools.product(A[::5], A[::7]):
        assert f.compose(g).key() in keys
        for z in list(G.elements())[::4]:
            assert f.compose(g)(z) == f(g(z))


def test_automorphisms_are_homomorphisms():
    G = SmcGroup(3, 1, 2, 5)
    els = list(G.elements())
    for phi in au.enumerate_automorphisms(G):
        for a, b in itertools.product(els[::3], els[::2]):
            assert phi(gp.multiply(a, b, G)) == gp.multiply(phi(a), phi(b), G)


def test_inner_and_conjugation():
    G = SmcGroup(7, 0, 3, 2)
    for g in G.elements():
        t = au.inner(G, g)
        for z in list(G.elements())[::4]:
            assert t(z) == gp.conjugate(z, gp.inverse(g, G), G)


def test_tau_y_composed_with_structured_map():
    # the inner twist by y turns x -> x^g into x -> x^(g alpha)
    G = SmcGroup(5, 0, 2, 4)
    for g in ma.units(5):
        phi = au.Automorphism.structured(G, g, 0)
        t = au.compose_with_inner(phi, E(0, 1))
        assert t.img_x == E((g * 4) % 5, 0)
        assert t.img_x == E((-g) % 5, 0)


def _twisted_brute(G, phi):
    els = list(G.elements())
    seen, count = set(), 0
    for z in els:
        if z in seen:
            continue
        count += 1
        orbit = {gp.multiply(gp.multiply(g, z, G), gp.inverse(phi(g), G), G) for g in els}
        seen |= orbit
    return count


@pytest.mark.parametrize("params", [(5, 0, 2, 4), (1, 2, 2, 3), (1, 2, 3, 4), (3, 2, 2, 7), (7, 0, 3, 2)])
def test_all_r_computations_agree_with_naive_orbits(params):
    G = SmcGroup(*params)
    A = au.enumerate_automorphisms(G)
    R = au.reidemeister_numbers(G, A)
    T = au.twisted_class_counts(G, A)
    F = au.twisted_class_counts_full(G, A)
    assert np.array_equal(R, T) and np.array_equal(R, F)
    for k in range(0, len(A), max(1, len(A) // 8)):
        phi = A[k]
        assert _twisted_brute(G, phi) == R[k]
        part = au.twisted_classes(G, phi)
        assert part.count == R[k]
        assert sum(len(c) for c in part.classes()) == G.order


@pytest.mark.parametrize("params", [p for p in small_groups(200) if SmcGroup(*p).order <= 200])
def test_reduced_twisted_graph_matches_full(params):
    G = SmcGroup(*params)
    A = au.enumerate_automorphisms(G)
    keep = A[np.flatnonzero(A.xj == 0)]
    assert np.array_equal(au.twisted_class_counts(G, keep), au.twisted_class_counts_full(G, keep))


def test_known_spectra_by_brute_force():
    assert au.reidemeister_spectrum_bruteforce(SmcGroup(5, 0, 2, 4)) == [2, 4]
    assert au.reidemeister_spectrum_bruteforce(SmcGroup(1, 2, 2, 3)) == [3, 5]


def test_direct_product_multiplicativity():
    # G = C_3 x D_5 (n = 15, alpha = 4 fixes C_3): automorphisms of the form id x phi
    G = SmcGroup(15, 0, 2, 4)
    S = SmcGroup(5, 0, 2, 4)
    RS = {a.key(): r for a, r in zip(au.enumerate_automorphisms(S), au.reidemeister_numbers(S, au.enumerate_automorphisms(S)))}
    dec = gp.decompose(G)
    for phi in au.enumerate_automorphisms(S):
        for g3 in (1, 2):
            ix = dec.join(g3 % 3, phi.img_x, G)
            iy = dec.join(0, phi.img_y, G)
            big = au.Automorphism(G, ix, iy)
            r_cyc = math.gcd(g3 - 1, 3)
            assert au.reidemeister_via_classes(G, big) == r_cyc * RS[phi.key()]


def test_characteristic_subgroup_mapped_to_itself():
    G = SmcGroup(35, 0, 2, 34)
    A = au.enumerate_automorphisms(G)
    assert au.base_is_characteristic(G)
    assert np.all(A.xj == 0)
    for phi in list(A)[::17]:
        imgs = {phi(E(i, 0)) for i in range(G.N)}
        assert imgs == {E(i, 0) for i in range(G.N)}


@pytest.mark.parametrize("params", [(5, 0, 2, 4), (1, 2, 3, 4), (1, 3, 2, 5), (3, 1, 2, 5)])
def test_r_equals_one_equivalences(params):
    G = SmcGroup(*params)
    A = au.enumerate_automorphisms(G)
    R = au.reidemeister_numbers(G, A)
    fix = au.fixed_point_counts(G, A)
    img = au.twisted_map_image_sizes(G, A)
    assert np.array_equal(R == 1, fix == 1)
    assert np.array_equal(R == 1, img == G.order)
    assert np.all(fix * img == G.order)


def test_abelianization_fixed_points_match_brute():
    G = SmcGroup(3, 1, 2, 5)
    A = au.enumerate_automorphisms(G)
    c = G.abelianization_modulus
    got = au.abelianization_fixed_points(G, A)
    for k, phi in enumerate(A):
        count = 0
        for u, v in itertools.product(range(c), range(G.p)):
            im = phi(E(u, v))
            count += (im.xexp - u) % c == 0 and (im.yexp - v) % G.p == 0
        assert got[k] == count
