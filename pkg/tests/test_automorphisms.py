import numpy as np
import pytest

from src.automorphisms import (
    Automorphism,
    AutomorphismSet,
    Flag,
    brute_force_automorphisms,
    center_of_inner,
    central_automorphisms,
    central_part,
    class_preserving_subset,
    conjugator_witnesses,
    count_central_homomorphisms,
    enumerate_class_preserving,
    find_noninner_witness,
    inner_automorphisms,
    intersect,
    is_automorphism,
    is_central,
    is_class_preserving,
    order_formula_check,
    outc_order,
    witness_report,
)
from src.errors import GroupInputError, ResourceOverflowError, StructuralError, VerificationFailure
from src.structure import derived_subgroup
from tests.corpus import EVERY_GROUP, FLAGGED_32, MAX_CLASS_32, ORDERS, SMALL, TABLE_ORDERS, corpus_group, marked

AUT_ORDERS = {
    "c2": 1, "c4": 2, "c5": 4, "klein4": 6, "c6": 2, "s3": 6, "c8": 4, "c2xc4": 8, "c2x3": 168,
    "d8": 8, "q8": 24, "d12": 12, "d16": 16, "q16": 16, "sd16": 16,
    "c4xc4": 96, "c2xq8": 192, "c2xd8": 64,
    "klein4_table": 6, "c4_table": 2, "s3_table": 6,
}
TRIVIAL_OUTC = sorted(n for n, o in ORDERS.items() if o <= 16 or o in (27, 81)) + sorted(TABLE_ORDERS)


def _valid_conjugators(t, alpha):
    return all(
        t.conjugation_matrix[x, g] == alpha.image[x] for x, g in enumerate(alpha.conjugators)
    )


# ------- Automorphism values -------

def test_automorphism_must_fix_identity():
    with pytest.raises(StructuralError):
        Automorphism((1, 0))


def test_compose_and_inverse(d8):
    inn = inner_automorphisms(d8)
    for a in inn:
        assert a.compose(a.inverse()).is_identity()
        for b in inn:
            c = a.compose(b)
            assert c in inn
            assert all(c(x) == a(b(x)) for x in range(d8.order))


def test_equality_ignores_flags():
    a = Automorphism((0, 1, 2), is_inner=Flag.YES)
    b = Automorphism((0, 1, 2))
    assert a == b
    assert hash(a) == hash(b)


def test_set_requires_identity_and_closure(d8):
    inn = inner_automorphisms(d8)
    non_identity = [a for a in inn if not a.is_identity()]
    with pytest.raises(VerificationFailure):
        AutomorphismSet(d8.order, non_identity)
    with pytest.raises(VerificationFailure):
        AutomorphismSet(d8.order, inn.elements[:-1])
    with pytest.raises(GroupInputError):
        AutomorphismSet(4, inn.elements)


def test_set_is_sorted_and_deduplicated(d8):
    inn = inner_automorphisms(d8)
    again = AutomorphismSet(d8.order, list(inn) + list(inn))
    assert len(again) == 4
    assert again.images() == sorted(again.images())
    assert again.matrix().shape == (4, 8)
    assert again.get(tuple(range(8))) is not None


# ------- Predicates -------

def test_predicates(d8):
    identity = list(range(d8.order))
    assert is_automorphism(d8, identity)
    assert not is_automorphism(d8, [0] * d8.order)
    assert is_class_preserving(d8, identity)
    assert is_central(d8, identity)


def test_conjugator_witnesses_only_for_class_preserving_maps(d8):
    aut = brute_force_automorphisms(d8)
    for a in aut:
        witnesses = conjugator_witnesses(d8, a.image)
        assert (witnesses is not None) == (a.is_class_preserving == Flag.YES)


def test_class_preserving_flag_needs_conjugators():
    with pytest.raises(StructuralError):
        Automorphism((0, 1, 2), is_class_preserving=Flag.YES)


@pytest.mark.parametrize("search", [central_automorphisms, brute_force_automorphisms])
def test_every_class_preserving_map_carries_its_conjugators(d8, search):
    found = [a for a in search(d8) if a.is_class_preserving == Flag.YES]
    assert found
    for alpha in found:
        assert alpha.conjugators is not None
        assert _valid_conjugators(d8, alpha)


# ------- Inn(G) and its center -------

@pytest.mark.parametrize("name", SMALL)
def test_inner_automorphisms(name):
    t = corpus_group(name)
    inn = inner_automorphisms(t)
    assert len(inn) * len([s for s in t.classes.sizes() if s == 1]) == t.order
    assert all(a.is_inner == Flag.YES for a in inn)


@pytest.mark.parametrize("name,expected", [("d8", 4), ("d16", 2), ("q8", 4), ("c4", 1), ("s3", 1)])
def test_center_of_inner(name, expected):
    assert len(center_of_inner(corpus_group(name))) == expected


# ------- Aut_c(G) -------

@pytest.mark.parametrize("name", SMALL)
def test_backtracking_matches_filtered_brute_force(name):
    t = corpus_group(name)
    aut = brute_force_automorphisms(t)
    if name in AUT_ORDERS:
        assert len(aut) == AUT_ORDERS[name]
    assert class_preserving_subset(t, aut).images() == enumerate_class_preserving(t).images()


@pytest.mark.parametrize("name", TRIVIAL_OUTC)
def test_out_c_is_trivial_up_to_order_81(name):
    assert outc_order(corpus_group(name)) == 1


@pytest.mark.parametrize("name", MAX_CLASS_32)
def test_maximal_class_groups(name):
    t = corpus_group(name)
    aut_c = enumerate_class_preserving(t)
    assert len(aut_c) == 16
    assert outc_order(t, aut_c=aut_c) == 1
    assert count_central_homomorphisms(t) == 4
    assert len(central_automorphisms(t)) == 4


@pytest.mark.parametrize("name", FLAGGED_32)
def test_flagged_order_32_groups(name):
    t = corpus_group(name)
    aut_c = enumerate_class_preserving(t)
    inn = inner_automorphisms(t)
    assert len(aut_c) == 32
    assert len(inn) == 16
    assert outc_order(t, aut_c=aut_c, inn=inn) == 2
    assert inn.is_normal_in(aut_c)
    aut_z = central_automorphisms(t)
    assert len(aut_z) == 8
    assert all(a in aut_c for a in aut_z)
    assert len(intersect(aut_c, aut_z)) == len(central_part(t, aut_c)) == 8


def test_every_class_preserving_map_has_conjugators():
    t = corpus_group("hol_c8")
    for alpha in enumerate_class_preserving(t):
        assert alpha.is_class_preserving == Flag.YES
        assert _valid_conjugators(t, alpha)


def test_parallel_search_matches_serial():
    t = corpus_group("hol_c8")
    assert enumerate_class_preserving(t, jobs=2).images() == enumerate_class_preserving(t, jobs=1).images()


def test_explicit_generators(d8):
    r, s = d8.generators["r"], d8.generators["s"]
    assert len(enumerate_class_preserving(d8, gens=[s, r])) == 4
    with pytest.raises(GroupInputError):
        enumerate_class_preserving(d8, gens=[r])
    with pytest.raises(GroupInputError):
        enumerate_class_preserving(d8, gens=[r, 42])


# ------- Aut_z(G) -------

def test_central_automorphisms_of_abelian_group():
    t = corpus_group("c2xc4")
    assert count_central_homomorphisms(t) == 32
    assert len(central_automorphisms(t)) == 8
    with pytest.raises(ResourceOverflowError):
        central_automorphisms(t, limit=16)


def test_central_automorphisms_of_d8(d8):
    aut_z = central_automorphisms(d8)
    assert len(aut_z) == 4
    assert all(a.is_central == Flag.YES for a in aut_z)
    assert all(a.is_class_preserving == Flag.YES for a in aut_z)


# ------- Order formula -------

def test_order_formula_on_d8(d8):
    report = order_formula_check(d8)
    assert report.hypothesis_verified
    assert report.holds
    assert report.aut_c_order == 4
    assert report.aut_c_cap_aut_z_order == 4
    assert report.inn_order == 4
    assert report.center_of_inn_order == 4
    assert report.rhs == "4"
    assert report.factorization_verified


@pytest.mark.parametrize("name", FLAGGED_32 + MAX_CLASS_32)
def test_order_formula_on_order_32(name):
    t = corpus_group(name)
    report = order_formula_check(t)
    assert report.hypothesis_verified
    assert report.quotient_outc_order == 1
    assert report.holds
    assert report.lhs == report.aut_c_order
    assert report.rhs == str(report.aut_c_order)


def test_order_formula_on_abelian_group():
    report = order_formula_check(corpus_group("c2xc4"))
    assert report.holds
    assert report.aut_c_order == report.inn_order == 1


@pytest.mark.parametrize("name", marked(EVERY_GROUP))
def test_order_formula_on_every_corpus_group(name):
    report = order_formula_check(corpus_group(name))
    if report.hypothesis_verified:
        assert report.holds
        assert report.factorization_verified
        assert report.lhs == report.aut_c_order
        assert report.rhs == str(report.aut_c_order)
    else:
        assert report.quotient_outc_order > 1
        assert not report.holds


# ------- Witnesses -------

def test_no_witness_when_out_c_is_trivial(d8):
    assert find_noninner_witness(d8) is None


@pytest.mark.parametrize("name", FLAGGED_32)
def test_noninner_witness(name):
    t = corpus_group(name)
    alpha = find_noninner_witness(t)
    assert alpha is not None
    assert alpha not in inner_automorphisms(t)
    assert is_automorphism(t, alpha.image)
    assert is_class_preserving(t, alpha.image)
    assert _valid_conjugators(t, alpha)

    report = witness_report(t, alpha, with_conjugators=True)
    assert [g for g, _ in report.generator_images] == ["x", "a", "b"]
    assert report.conjugators is not None
    assert np.array_equal(np.array(report.image), np.array(alpha.image))
    assert witness_report(t, alpha).conjugators is None


@pytest.mark.slow
def test_out_c_of_order_243_flagged_group():
    t = corpus_group("phi7_243")
    aut_c = enumerate_class_preserving(t)
    inn = inner_automorphisms(t)
    assert len(aut_c) == 243
    assert len(inn) == 81
    assert outc_order(t, aut_c=aut_c, inn=inn) == 3


@pytest.mark.parametrize("name", ["d8", "q8", "m16", "heis27", "cl2_32"])
def test_class_two_images_stay_in_derived_cosets(name):
    t = corpus_group(name)
    derived = derived_subgroup(t).mask()
    for alpha in enumerate_class_preserving(t):
        moved = t.product[t.inverse, np.array(alpha.image)]
        assert derived[moved].all()
