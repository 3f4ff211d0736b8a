import cmath
import math

import numpy as np
import pytest

from reidemeister import autos as au
from reidemeister import characters as ch
from reidemeister.errors import ValidationError
from reidemeister.group import GroupElement as E
from reidemeister.group import SmcGroup

from helpers import small_groups

GROUPS_200 = [p for p in small_groups(200)]


def _numeric(exponents, N):
    return sum(cmath.exp(2j * math.pi * e / N) for e in exponents)


@pytest.mark.parametrize("N", [1, 2, 3, 4, 6, 8, 9, 12, 15, 30])
def test_cyclotomic_poly_degree_and_roots(N):
    phi = ch.cyclotomic_poly(N)
    assert len(phi) - 1 == sum(1 for k in range(1, N + 1) if math.gcd(k, N) == 1)
    z = cmath.exp(2j * math.pi / N)
    assert abs(sum(c * z**i for i, c in enumerate(phi))) < 1e-9


@pytest.mark.parametrize("N", [2, 5, 8, 12, 21])
def test_cyclotomic_value_is_exact(N):
    assert ch.cyclotomic_value(range(N), N) == (0,) * (len(ch.cyclotomic_poly(N)) - 1)
    B = ch.root_basis(N)
    z = cmath.exp(2j * math.pi / N)
    for e in range(N):
        assert abs(sum(int(c) * z**i for i, c in enumerate(B[e])) - z**e) < 1e-9
    # equal values iff equal canonical forms, checked numerically on pairs
    sets = [(0,), (1, N - 1), (2, N - 2), (0, 0)]
    for s in sets:
        for t in sets:
            same = abs(_numeric(s, N) - _numeric(t, N)) < 1e-9
            assert same == (ch.cyclotomic_value(s, N) == ch.cyclotomic_value(t, N))


def test_induced_character_values_d5():
    G = SmcGroup(5, 0, 2, 4)
    for a in (1, 2):
        assert ch.induced(G, a).dimension == 2
        for k in range(5):
            v = ch.induced_character_value(G, a, E(k, 0))
            assert abs(_numeric(v, 5) - 2 * math.cos(2 * math.pi * a * k / 5)) < 1e-9
        assert ch.induced_character_value(G, a, E(3, 1)) == ()
    with pytest.raises(ValidationError):
        ch.induced_character_value(G, 0, E(1, 0))


@pytest.mark.parametrize("params", [(5, 0, 2, 4), (1, 2, 3, 4), (1, 3, 2, 3), (7, 0, 3, 2)])
def test_induced_characters_are_irreducible(params):
    # <chi, chi> = 1 using exact values at every element
    G = SmcGroup(*params)
    reps, sizes = ch.dual_orbits(G)
    for a in reps[sizes == G.p].tolist():
        total = sum(abs(_numeric(ch.induced_character_value(G, a, g), G.N)) ** 2 for g in G.elements())
        assert abs(total / G.order - 1) < 1e-9


@pytest.mark.parametrize("params", GROUPS_200)
def test_character_counts(params):
    G = SmcGroup(*params)
    reps, sizes = ch.dual_orbits(G)
    assert set(sizes.tolist()) <= {1, G.p}
    assert ch.ch1_total(G) + G.p**2 * ch.chp_total(G) == G.order
    assert int((sizes == G.p).sum()) == ch.chp_total(G)


@pytest.mark.parametrize("params", GROUPS_200[::2])
def test_r_is_ch1_plus_chp(params):
    G = SmcGroup(*params)
    A = au.enumerate_automorphisms(G)
    R = au.reidemeister_numbers(G, A)
    c1 = ch.ch1_fixed(G, A)
    assert np.array_equal(c1, ch.ch1_fixed_dual(G, A))
    assert np.array_equal(c1, au.abelianization_fixed_points(G, A))
    cp = ch.chp_fixed_direct(G, A)
    assert np.array_equal(cp, ch.chp_fixed_by_values(G, A))
    assert np.array_equal(R, c1 + cp)
    keep = A[np.flatnonzero(A.xj == 0)]
    if len(keep):
        assert np.array_equal(ch.chp_fixed(G, keep), ch.chp_fixed_direct(G, keep))
    for phi, v in list(zip(A, c1.tolist()))[:: max(1, len(A) // 20)]:
        assert v in ch.ch1_candidates(G, phi)


def test_chp_formula_needs_preserving_maps():
    G = SmcGroup(1, 3, 2, 5)
    A = au.enumerate_automorphisms(G)
    assert np.any(A.xj != 0)
    with pytest.raises(ValidationError):
        ch.chp_fixed(G, A)


@pytest.mark.parametrize("m, p", [(2, 3), (3, 3), (3, 2), (4, 2), (2, 5)])
def test_pgroup_chp_all_or_nothing(m, p):
    from reidemeister.group import valid_alphas
    from reidemeister.spectrum import CaseKind, classify_group

    groups = [SmcGroup(1, m, p, a) for a in valid_alphas(1, m, p)]
    groups = [G for G in groups if classify_group(G).kind is CaseKind.PGROUP]
    assert groups
    for G in groups:
        A = au.enumerate_automorphisms(G, aut_budget=None)
        got = set(ch.chp_fixed_direct(G, A).tolist())
        assert got <= {0, p ** (m - 2) * (p - 1)}


@pytest.mark.parametrize("n", range(1, 41))
def test_cyclic_fixed_points_and_dual(n):
    for g in [u for u in range(n) if math.gcd(u, n) == 1] or [0]:
        assert ch.cyclic_fixed_points(n, g) == ch.cyclic_dual_fixed_points(n, g) == math.gcd(g - 1, n)
