import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.errors import GroupAxiomError, GroupInputError, StructuralError
from src.group_core import (
    GroupTable,
    SubgroupSet,
    centralizer,
    closure,
    commutator,
    conjugacy_classes,
    conjugate,
    cyclic_table,
    direct_product,
    element_order,
    extend_homomorphism,
    format_table,
    inverse,
    is_normal,
    multiply,
    parse_table_text,
    power,
    quotient,
)
from src.structure import center
from tests.corpus import EVERY_GROUP, ORDER_243, UP_TO_81, corpus_group, marked


# ------- Tables and axioms -------

def test_cyclic_table_basics():
    t = cyclic_table(6)
    assert t.order == 6
    assert t.is_abelian
    assert t.element_orders.tolist() == [1, 6, 3, 2, 3, 6]
    assert multiply(t, 4, 5) == 3
    assert inverse(t, 2) == 4
    assert power(t, 1, -1) == 5


def test_identity_is_moved_to_index_zero():
    # Z3 with the identity stored at index 2
    product = [[1, 2, 0], [2, 0, 1], [0, 1, 2]]
    t = GroupTable(product, labels=["a", "b", "e"])
    assert t.product[0].tolist() == [0, 1, 2]
    assert t.product[:, 0].tolist() == [0, 1, 2]
    assert t.label(0) == "e"
    assert sorted(t.labels) == ["a", "b", "e"]


def test_rejects_non_latin_table():
    with pytest.raises(GroupAxiomError):
        GroupTable([[0, 1], [1, 1]])


def test_rejects_out_of_range_entry():
    with pytest.raises(GroupAxiomError) as e:
        GroupTable([[0, 1], [1, 2]])
    assert e.value.witness == (1, 1)


def test_rejects_non_associative_loop():
    # Latin square with identity 0 in which every element is an involution:
    # impossible for a group of order 5
    loop = [
        [0, 1, 2, 3, 4],
        [1, 0, 3, 4, 2],
        [2, 4, 0, 1, 3],
        [3, 2, 4, 0, 1],
        [4, 3, 1, 2, 0],
    ]
    with pytest.raises(GroupAxiomError):
        GroupTable(loop)


def test_index_checks(d8):
    with pytest.raises(GroupInputError):
        multiply(d8, 0, 8)
    with pytest.raises(GroupInputError):
        element_order(d8, -1)


def test_digest_is_content_based():
    a = cyclic_table(4, name="first")
    b = cyclic_table(4, name="second")
    assert a.digest() == b.digest()
    assert a == b
    assert a.digest() != cyclic_table(5).digest()


# ------- Element arithmetic -------

def test_commutator_and_conjugation_conventions(d8):
    r, s = d8.generators["r"], d8.generators["s"]
    assert conjugate(d8, r, s) == inverse(d8, r)
    # [r, s] = r^-1 s^-1 r s = r^-2
    assert commutator(d8, r, s) == power(d8, r, 2)
    assert d8.conjugation_matrix[r, s] == conjugate(d8, r, s)
    assert d8.commutator_matrix[r, s] == commutator(d8, r, s)
    assert element_order(d8, r) == 4
    assert element_order(d8, s) == 2


# ------- Subgroups -------

def test_closure_and_centralizer(d8):
    r = d8.generators["r"]
    rot = closure(d8, [r])
    assert rot.order == 4
    assert rot.index == 2
    assert centralizer(d8, r) == rot
    assert closure(d8, []) == SubgroupSet.trivial(d8)
    assert closure(d8, d8.generators.values()).is_whole()


def test_subgroup_set_rejects_non_subgroups(d8):
    r = d8.generators["r"]
    with pytest.raises(StructuralError):
        SubgroupSet.of(d8, [0, r])


def test_quotient_by_center_is_klein(d8):
    q = quotient(d8, center(d8))
    assert q.table.order == 4
    assert q.table.is_abelian
    assert max(q.table.element_orders) == 2
    assert len(set(q.projection)) == 4
    assert q.representative(0) == 0


def test_quotient_rejects_non_normal(d8):
    s = d8.generators["s"]
    h = closure(d8, [s])
    assert not is_normal(d8, h)
    with pytest.raises(StructuralError):
        quotient(d8, h)


def test_conjugacy_classes_of_d8(d8):
    classes = conjugacy_classes(d8)
    assert sorted(classes.sizes()) == [1, 1, 2, 2, 2]
    assert classes.class_of_element(0) == (0,)
    r = d8.generators["r"]
    assert set(classes.class_of_element(r)) == {r, inverse(d8, r)}


@pytest.mark.parametrize("name", marked(EVERY_GROUP))
def test_class_equation(name):
    t = corpus_group(name)
    sizes = conjugacy_classes(t).sizes()
    assert sum(sizes) == t.order
    assert all(t.order % s == 0 for s in sizes)
    assert sizes.count(1) == center(t).order


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(UP_TO_81), st.integers(min_value=0, max_value=10 ** 6))
def test_orbit_stabilizer(name, k):
    t = corpus_group(name)
    x = k % t.order
    class_size = len(conjugacy_classes(t).class_of_element(x))
    assert class_size * centralizer(t, x).order == t.order


@pytest.mark.slow
@pytest.mark.parametrize("name", ORDER_243)
def test_orbit_stabilizer_order_243(name):
    t = corpus_group(name)
    classes = conjugacy_classes(t)
    for x in range(t.order):
        assert len(classes.class_of_element(x)) * centralizer(t, x).order == t.order


# ------- Homomorphisms and products -------

def test_extend_homomorphism():
    c4, c2, c3 = cyclic_table(4), cyclic_table(2), cyclic_table(3)
    assert extend_homomorphism(c4, [1], [1], c2) == [0, 1, 0, 1]
    assert extend_homomorphism(c4, [1], [1], c3) is None
    partial = extend_homomorphism(c4, [2], [0], c2, partial=True)
    assert partial == [0, -1, 0, -1]
    assert extend_homomorphism(c4, [2], [0], c2) is None


def test_direct_product():
    v = direct_product(cyclic_table(2), cyclic_table(2))
    assert v.order == 4
    assert v.is_abelian
    assert max(v.element_orders) == 2
    c2xd8 = direct_product(cyclic_table(2), corpus_group("d8"))
    assert c2xd8.order == 16
    assert center(c2xd8).order == 4


# ------- Table files -------

def test_table_text_round_trip(d8):
    t = parse_table_text(format_table(d8))
    assert t == d8
    assert t.labels == d8.labels


def test_table_parser_requires_identity_at_zero():
    text = "3\n1 2 0\n2 0 1\n0 1 2\n"
    with pytest.raises(GroupAxiomError):
        parse_table_text(text)


def test_table_parser_errors():
    with pytest.raises(GroupInputError):
        parse_table_text("")
    with pytest.raises(GroupInputError):
        parse_table_text("2\n0 1\n")
    with pytest.raises(GroupInputError):
        parse_table_text("2\n0 1\n1 x\n")


def test_bundled_tables():
    s3 = corpus_group("s3_table")
    assert s3.order == 6
    assert not s3.is_abelian
    assert s3.label(3) == "s"
    assert np.array_equal(corpus_group("klein4_table").product, corpus_group("klein4_table").product.T)
    assert corpus_group("c4_table").element_orders.tolist() == [1, 4, 2, 4]
