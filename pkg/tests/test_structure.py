import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.errors import GroupInputError, StructuralError
from src.group_core import SubgroupSet, closure, power
from src.structure import (
    abelian_invariants,
    build_structure_report,
    center,
    commutator_set,
    count_homomorphisms_abelian,
    derived_subgroup,
    direct_factor_witness,
    exponent,
    find_abelian_subgroup_of_index_p,
    frattini,
    frattini_by_maximal_subgroups,
    is_camina_pair,
    is_purely_nonabelian,
    lower_central_series,
    maximal_subgroups,
    minimal_generating_tuple,
    nilpotency_class,
    prime_power,
    rank_d,
    second_center,
)
from tests.corpus import EVERY_GROUP, MAX_CLASS_32, ORDER_243, SMALL, UP_TO_81, corpus_group, marked

NOT_P_GROUPS = {"c6", "s3", "d12", "s3_table"}

# name: (|Z|, |G'|, cl, d)
INVARIANTS = {
    "d8": (2, 2, 2, 2),
    "q8": (2, 2, 2, 2),
    "d16": (2, 4, 3, 2),
    "q16": (2, 4, 3, 2),
    "sd16": (2, 4, 3, 2),
    "m16": (4, 2, 2, 2),
    "c4_semi_c4": (4, 2, 2, 2),
    "c2xd8": (4, 2, 2, 3),
    "c2xq8": (4, 2, 2, 3),
    "heis27": (3, 3, 2, 2),
    "ext27": (3, 3, 2, 2),
    "c3xheis27": (9, 3, 2, 3),
    "m81": (9, 3, 2, 2),
    "c9_semi_c9": (9, 3, 2, 2),
    "d32": (2, 8, 4, 2),
    "sd32": (2, 8, 4, 2),
    "q32": (2, 8, 4, 2),
    "hol_c8": (2, 4, 3, 3),
    "hol_c8_nonsplit": (2, 4, 3, 3),
    "c2xd16": (4, 4, 3, 3),
    "c4xd8": (8, 2, 2, 3),
    "cl2_32": (4, 4, 2, 3),
}


def test_prime_power():
    assert prime_power(32) == (2, 5)
    assert prime_power(243) == (3, 5)
    assert prime_power(7) == (7, 1)
    assert prime_power(12) is None
    assert prime_power(1) is None


@pytest.mark.parametrize("name", sorted(INVARIANTS))
def test_invariants(name):
    t = corpus_group(name)
    z, g1, cl, d = INVARIANTS[name]
    assert len(center(t)) == z
    assert len(derived_subgroup(t)) == g1
    assert nilpotency_class(t) == cl
    assert rank_d(t) == d
    assert len(minimal_generating_tuple(t)) == d


def test_lower_central_series_of_d32():
    t = corpus_group("d32")
    assert [len(s) for s in lower_central_series(t)] == [32, 8, 4, 2, 1]
    assert len(second_center(t)) == 4


def test_second_center_of_class_two_is_whole(d8):
    assert second_center(d8).is_whole()


def test_abelian_groups_have_class_one():
    assert nilpotency_class(corpus_group("c2xc4")) == 1
    assert derived_subgroup(corpus_group("c4xc4")).is_trivial()


def test_non_nilpotent_group():
    s3 = corpus_group("s3")
    with pytest.raises(StructuralError):
        nilpotency_class(s3)
    assert len(lower_central_series(s3)[-1]) == 3


@pytest.mark.parametrize("name,count", [("d8", 3), ("c2x3", 7), ("heis27", 4), ("c8", 1), ("s3", 4)])
def test_maximal_subgroup_counts(name, count):
    assert len(maximal_subgroups(corpus_group(name))) == count


@pytest.mark.parametrize("name", marked([n for n in EVERY_GROUP if n not in NOT_P_GROUPS]))
def test_frattini_agrees_with_maximal_subgroups(name):
    t = corpus_group(name)
    phi = frattini(t)
    assert phi == frattini_by_maximal_subgroups(t)
    assert t.order // len(phi) == prime_power(t.order)[0] ** rank_d(t)


def test_frattini_of_non_p_groups():
    assert frattini(corpus_group("d12")).is_trivial()
    assert frattini(corpus_group("s3")).is_trivial()
    assert rank_d(corpus_group("c6")) == 1
    assert rank_d(corpus_group("s3")) == 2


@pytest.mark.parametrize("name,expected", [("d8", 4), ("q8", 4), ("m16", 8), ("d32", 16), ("heis27", 3), ("ext27", 9), ("c2x3", 2)])
def test_exponent(name, expected):
    assert exponent(corpus_group(name)) == expected


@pytest.mark.parametrize(
    "name,expected",
    [
        ("c6", [2, 3]),
        ("c2xc4", [2, 4]),
        ("c4xc4", [4, 4]),
        ("c2x3", [2, 2, 2]),
        ("c2xc16", [2, 16]),
        ("klein4_table", [2, 2]),
    ],
)
def test_abelian_invariants(name, expected):
    assert abelian_invariants(corpus_group(name)) == expected


def test_abelian_invariants_of_subgroups(d8):
    assert abelian_invariants(d8, center(d8)) == [2]
    assert abelian_invariants(d8, closure(d8, [d8.generators["r"]])) == [4]
    with pytest.raises(StructuralError):
        abelian_invariants(d8)


def test_count_homomorphisms_abelian():
    assert count_homomorphisms_abelian([2, 2], [2]) == 4
    assert count_homomorphisms_abelian([4, 4], [4, 4]) == 256
    assert count_homomorphisms_abelian([3], [2]) == 1
    assert count_homomorphisms_abelian([], [5]) == 1


# ------- Commutator sets and Camina pairs -------

def test_commutator_set(d8):
    r = d8.generators["r"]
    assert commutator_set(d8, r) == {0, power(d8, r, 2)}
    assert commutator_set(d8, 0) == {0}
    with pytest.raises(GroupInputError):
        commutator_set(d8, 99)


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(UP_TO_81), st.integers(min_value=0, max_value=10 ** 6))
def test_commutator_set_size_is_class_size(name, k):
    t = corpus_group(name)
    x = k % t.order
    assert len(commutator_set(t, x)) == len(t.classes.class_of_element(x))


@pytest.mark.slow
@pytest.mark.parametrize("name", ORDER_243)
def test_commutator_set_size_is_class_size_order_243(name):
    t = corpus_group(name)
    for x in range(t.order):
        assert len(commutator_set(t, x)) == len(t.classes.class_of_element(x))


@pytest.mark.parametrize("name", ["d8", "q8", "heis27", "ext27"])
def test_extraspecial_groups_are_camina_pairs_with_their_center(name):
    t = corpus_group(name)
    verdict = is_camina_pair(t, center(t))
    assert verdict.holds
    assert verdict.witness is None


@pytest.mark.parametrize("name", MAX_CLASS_32)
def test_maximal_class_center_is_not_camina(name):
    t = corpus_group(name)
    x = t.generators["x"]
    verdict = is_camina_pair(t, center(t))
    assert not verdict.holds
    assert verdict.witness == (x, power(t, x, 8))


def test_camina_pair_input_errors(d8):
    with pytest.raises(GroupInputError):
        is_camina_pair(d8, SubgroupSet.trivial(d8))
    with pytest.raises(GroupInputError):
        is_camina_pair(d8, SubgroupSet.whole(d8))
    with pytest.raises(GroupInputError):
        is_camina_pair(d8, closure(d8, [d8.generators["s"]]))


# ------- Abelian subgroups and direct factors -------

@pytest.mark.parametrize("name", ["d8", "q8", "d16", "m16", "heis27", "c2xd8", "cl2_32", "c4xd8", "c2xd16"])
def test_abelian_subgroup_of_index_p(name):
    t = corpus_group(name)
    a = find_abelian_subgroup_of_index_p(t)
    assert a is not None
    assert a.index == prime_power(t.order)[0]
    assert a.is_abelian(t)


@pytest.mark.parametrize("name", ["hol_c8", "hol_c8_nonsplit"])
def test_no_abelian_subgroup_of_index_p(name):
    assert find_abelian_subgroup_of_index_p(corpus_group(name)) is None


def test_abelian_subgroup_search_needs_a_p_group():
    assert find_abelian_subgroup_of_index_p(corpus_group("c2xc4")).is_whole()
    with pytest.raises(GroupInputError):
        find_abelian_subgroup_of_index_p(corpus_group("s3"))


@pytest.mark.parametrize("name", ["c2xd8", "c2xq8", "c3xheis27", "c4xd8"])
def test_direct_factor_found(name):
    t = corpus_group(name)
    factor = direct_factor_witness(t)
    assert factor is not None
    assert factor.issubset(center(t))
    assert len(factor.intersection(derived_subgroup(t))) == 1
    assert not is_purely_nonabelian(t)


@pytest.mark.parametrize("name", ["d8", "q8", "m16", "c4_semi_c4", "heis27", "d32", "hol_c8", "cl2_32"])
def test_purely_nonabelian(name):
    assert is_purely_nonabelian(corpus_group(name))


# ------- Report -------

def test_structure_report(d8):
    report = build_structure_report(d8)
    assert report.order == 8
    assert report.prime == 2
    assert report.nilpotency_class == 2
    assert report.rank_d == 2
    assert report.exponent == 4
    assert report.purely_nonabelian
    assert report.direct_factor is None
    assert sorted(report.class_sizes) == [1, 1, 2, 2, 2]
    assert report.digest == d8.digest()
    assert [len(s) for s in report.lower_central] == [8, 2, 1]


def test_structure_report_of_non_nilpotent_group():
    report = build_structure_report(corpus_group("s3"))
    assert report.prime is None
    assert report.nilpotency_class is None


@pytest.mark.parametrize("name", SMALL)
def test_center_matches_class_sizes(name):
    t = corpus_group(name)
    report = build_structure_report(t)
    assert report.class_sizes.count(1) == len(report.center)
