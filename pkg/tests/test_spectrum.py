import pytest
from hypothesis import given
from hypothesis import strategies as st

from reidemeister import autos as au
from reidemeister import spectrum as sp
from reidemeister.errors import ValidationError
from reidemeister.group import SmcGroup

from helpers import small_groups


def test_set_algebra():
    assert sp.set_product([1, 3], [2, 4]) == [2, 4, 6, 12]
    assert sp.set_sum([2, 4], [1, 5]) == [3, 5, 7, 9]
    assert sp.as_spectrum([3, 1, 3]) == [1, 3]


@given(st.lists(st.integers(1, 50), min_size=1, max_size=5), st.lists(st.integers(1, 50), min_size=1, max_size=5))
def test_set_algebra_properties(A, B):
    assert sp.set_product(A, B) == sp.set_product(B, A)
    assert sp.set_sum(A, B) == sp.set_sum(B, A)
    assert sp.set_product(A, [1]) == sp.as_spectrum(A)


@pytest.mark.parametrize("n", range(1, 121))
def test_spec_cyclic(n):
    assert sp.spec_cyclic(n) == sp.spec_cyclic_bruteforce(n)


def test_spec_cyclic_examples():
    assert sp.spec_cyclic(9) == [1, 3, 9]
    assert sp.spec_cyclic(12) == [2, 4, 6, 12]
    with pytest.raises(ValidationError):
        sp.spec_cyclic(0)


def test_divisor_tuple_examples():
    assert len(sp.divisor_tuples(15, 2)) == 9
    assert len(sp.divisor_tuples(15, 2, require3=True)) == 6
    assert sp.divisor_tuples(1, 3) == [(1, 1, 1)]
    assert sp.divisor_tuples(9, 1) == [(1,), (3,), (9,)]


@pytest.mark.parametrize("a", [1, 4, 12, 15, 36, 45, 105, 225])
@pytest.mark.parametrize("b", [1, 2, 3])
def test_divisor_tuples_match_filtered_grid(a, b):
    for r3 in (False, True):
        assert sp.divisor_tuples(a, b, r3) == sp.divisor_tuples_bruteforce(a, b, r3)


@pytest.mark.parametrize(
    "params, kind, beta",
    [
        ((5, 0, 2, 4), sp.CaseKind.TRIVIAL, None),
        ((7, 3, 2, 55), sp.CaseKind.P2_INVERSION, None),
        ((1, 3, 2, 3), sp.CaseKind.P2_CASE2, None),
        ((1, 3, 2, 5), sp.CaseKind.PGROUP, 1),
        ((1, 2, 3, 7), sp.CaseKind.PGROUP, 2),
        ((7, 2, 3, 46), sp.CaseKind.TRIVIAL, None),
        ((7, 2, 3, 25), sp.CaseKind.NONTRIVIAL, 2),
        ((5, 3, 2, 29), sp.CaseKind.NONTRIVIAL, 1),
    ],
)
def test_classify_examples(params, kind, beta):
    tag = sp.classify_group(SmcGroup(*params))
    assert tag.kind is kind and tag.beta == beta


def test_classify_rejects_non_free_input():
    with pytest.raises(ValidationError):
        sp.classify_case(15, 0, 2, 4)


@pytest.mark.parametrize(
    "params, expected",
    [
        ((5, 0, 2, 4), [2, 4]),
        ((15, 0, 2, 14), [3, 5, 9]),
        ((1, 2, 3, 4), [3, 5, 11]),
        ((1, 3, 2, 3), [5, 7]),
        ((1, 3, 2, 5), [4, 6, 10]),
        ((1, 2, 2, 3), [3, 5]),
        ((7, 0, 3, 2), [3, 5]),
    ],
)
def test_pinned_spectra(params, expected):
    assert sp.spec_full(*params) == expected
    assert au.reidemeister_spectrum_bruteforce(SmcGroup(*params)) == expected


def test_fixed_part_multiplies_spectrum():
    # C_3 x D_5
    assert sp.spec_full(15, 0, 2, 4) == sp.set_product(sp.spec_cyclic(3), [2, 4])


def test_pgroup_formula_values():
    assert sp.spec_pgroup(2, 3) == [3, 5, 11]
    assert sp.spec_pgroup(3, 2) == [4, 6, 10]
    with pytest.raises(ValidationError):
        sp.spec_pgroup(2, 2)


def test_fault_injection_changes_inversion_case_only():
    base = sp.spec_p2_inversion(1, 2)
    with sp.fault_injected():
        bad = sp.spec_p2_inversion(1, 2)
        assert sp.spec_pgroup(2, 3) == [3, 5, 11]
    assert base != bad
    assert sp.spec_p2_inversion(1, 2) == base


@pytest.mark.parametrize("params", small_groups(150))
def test_realizations_hit_their_values(params):
    G = SmcGroup(*params)
    reals = sp.realizations(*params)
    batch = au.AutomorphismBatch.of(G, [r.automorphism for r in reals])
    measured = au.reidemeister_numbers(G, batch).tolist()
    assert measured == [r.value for r in reals]
    assert sorted(set(measured)) == sp.spec_full(*params)
    assert sorted(sp.realizing_automorphisms(*params)) == sp.spec_full(*params)


@pytest.mark.parametrize("m", range(3, 8))
def test_pgroup_p2_psi_value(m):
    # x -> x^(2^(m-2)+1) y realizes 2^m - 2^(m-2); the odd-p shape x^(2^(m-1)+1) y gives 2^(m-1)
    G = SmcGroup(1, m, 2, 2 ** (m - 1) + 1)
    fixed = au.Automorphism(G, (2 ** (m - 2) + 1, 1), (0, 1))
    naive = au.Automorphism(G, (2 ** (m - 1) + 1, 1), (0, 1))
    assert au.reidemeister_via_classes(G, fixed) == 2**m - 2 ** (m - 2)
    assert au.reidemeister_via_classes(G, naive) == 2 ** (m - 1)
