"""
Structural invariants: Z(G), G', lower central series, Frattini subgroup,
d(G), exponent, commutator sets [x, G], Camina pairs, abelian subgroups of
index p and abelian direct factors.
"""

import itertools
import logging
import math
from typing import List, Optional, Sequence, Set, Tuple

import numpy as np
from sympy import factorint

from src.config import FULL_CHECK_LIMIT
from src.errors import GroupInputError, StructuralError, VerificationFailure
from src.group_core import (
    GroupTable,
    SubgroupSet,
    closure,
    centralizer,
    conjugacy_classes,
    cyclic_table,
    extend_homomorphism,
    greedy_generators,
    is_normal,
    quotient,
)
from src.schemas import CaminaVerdict, StructureReport

logger = logging.getLogger(__name__)


def prime_power(n: int) -> Optional[Tuple[int, int]]:
    """(p, k) with n = p^k, or None when n is 1 or not a prime power."""
    factors = factorint(n)
    if len(factors) != 1:
        return None
    (p, k), = factors.items()
    return int(p), int(k)


def _require_p_group(t: GroupTable) -> int:
    pk = prime_power(t.order)
    if pk is None:
        raise GroupInputError(f"order {t.order} is not a prime power")
    return pk[0]


# -----------------------------
# Center and commutator subgroups
# -----------------------------

def center(t: GroupTable) -> SubgroupSet:
    commuting = (t.product == t.product.T).all(axis=1)
    return SubgroupSet.of(t, np.nonzero(commuting)[0].tolist())


def derived_subgroup(t: GroupTable) -> SubgroupSet:
    return closure(t, np.unique(t.commutator_matrix).tolist())


def lower_central_series(t: GroupTable) -> List[SubgroupSet]:
    """gamma_1 = G, gamma_{i+1} = <[gamma_i, G]>, until trivial or stable."""
    series = [SubgroupSet.whole(t)]
    while not series[-1].is_trivial():
        cur = np.array(series[-1].members, dtype=np.int64)
        nxt = closure(t, np.unique(t.commutator_matrix[cur, :]).tolist())
        if nxt == series[-1]:
            break
        series.append(nxt)
    return series


def nilpotency_class(t: GroupTable) -> int:
    series = lower_central_series(t)
    if not series[-1].is_trivial():
        raise StructuralError(f"group is not nilpotent (lower central series stops at order {len(series[-1])})")
    return len(series) - 1


def second_center(t: GroupTable) -> SubgroupSet:
    """Z_2(G): preimage of Z(G/Z(G))."""
    q = quotient(t, center(t))
    zq = center(q.table)
    return SubgroupSet.of(t, [x for x in range(t.order) if q.projection[x] in zq])


# -----------------------------
# Frattini subgroup and rank
# -----------------------------

def _frattini_power_product(t: GroupTable, p: int) -> SubgroupSet:
    """G' G^p."""
    idx = np.arange(t.order)
    powers = idx.copy()
    for _ in range(p - 1):
        powers = t.product[powers, idx]
    seed = set(derived_subgroup(t).members) | set(np.unique(powers).tolist())
    return closure(t, seed)


def maximal_subgroups(t: GroupTable) -> List[SubgroupSet]:
    """
    Maximal subgroups, sorted by member tuple.

    p-groups: kernels of the surjections G/G' -> C_p.
    Other groups: join search from cyclic subgroups (desk-scale orders only).
    """
    if t.order == 1:
        return []
    pk = prime_power(t.order)
    if pk is not None:
        p = pk[0]
        q = quotient(t, derived_subgroup(t))
        qgens = greedy_generators(q.table)
        cp = cyclic_table(p)
        kernels: Set[Tuple[int, ...]] = set()
        for images in itertools.product(range(p), repeat=len(qgens)):
            if not any(images):
                continue
            img = extend_homomorphism(q.table, qgens, images, cp)
            if img is None:
                continue
            kernels.add(tuple(x for x in range(t.order) if img[q.projection[x]] == 0))
        return [SubgroupSet.of(t, k) for k in sorted(kernels)]

    if t.order > FULL_CHECK_LIMIT:
        raise StructuralError(f"maximal subgroup search is limited to order {FULL_CHECK_LIMIT}")
    cyclic = {closure(t, [x]) for x in range(1, t.order)}
    cyclic_list = sorted((c for c in cyclic if not c.is_whole()), key=lambda s: s.members)
    found = {c.members: c for c in cyclic_list}
    frontier = list(cyclic_list)
    while frontier:
        nxt = []
        for h in frontier:
            for c in cyclic_list:
                if c.issubset(h):
                    continue
                j = closure(t, set(h.members) | set(c.members))
                if not j.is_whole() and j.members not in found:
                    found[j.members] = j
                    nxt.append(j)
        frontier = nxt
    subs = list(found.values())
    maximal = [h for h in subs if not any(len(k) > len(h) and h.issubset(k) for k in subs)]
    return sorted(maximal, key=lambda s: s.members)


def frattini_by_maximal_subgroups(t: GroupTable) -> SubgroupSet:
    result = SubgroupSet.whole(t)
    for m in maximal_subgroups(t):
        result = result.intersection(m)
    return result


def frattini(t: GroupTable) -> SubgroupSet:
    """
    Phi(G). For p-groups G'G^p, cross-checked against the intersection of
    maximal subgroups up to FULL_CHECK_LIMIT; otherwise the intersection.
    """
    pk = prime_power(t.order)
    if pk is None:
        return frattini_by_maximal_subgroups(t)
    phi = _frattini_power_product(t, pk[0])
    if t.order <= FULL_CHECK_LIMIT:
        dual = frattini_by_maximal_subgroups(t)
        if dual != phi:
            raise VerificationFailure(
                f"Frattini mismatch: G'G^p has order {len(phi)}, maximal-subgroup intersection {len(dual)}"
            )
    return phi


def minimal_generating_tuple(t: GroupTable) -> Tuple[int, ...]:
    """
    A generating tuple of size d(G). For p-groups: smallest-index elements
    outside the span of Phi(G) and the earlier choices (Burnside basis).
    """
    if t.order == 1:
        return ()
    if prime_power(t.order) is not None:
        phi = frattini(t)
        gens: List[int] = []
        current = phi
        while not current.is_whole():
            x = next(x for x in range(t.order) if x not in current)
            gens.append(x)
            current = closure(t, set(phi.members) | set(gens))
        return tuple(gens)
    for k in range(1, t.order):
        for combo in itertools.combinations(range(1, t.order), k):
            if closure(t, combo).is_whole():
                return combo
    raise StructuralError("no generating tuple found")


def rank_d(t: GroupTable) -> int:
    if t.order == 1:
        return 0
    pk = prime_power(t.order)
    if pk is None:
        return len(minimal_generating_tuple(t))
    p = pk[0]
    d = round(math.log(t.order // len(frattini(t)), p))
    return d


def exponent(t: GroupTable) -> int:
    return int(np.lcm.reduce(t.element_orders))


def abelian_invariants(t: GroupTable, h: Optional[SubgroupSet] = None) -> List[int]:
    """
    Elementary divisors (prime powers, sorted) of an abelian subgroup h
    (default: the whole group), read off from element-order counts.
    """
    h = h if h is not None else SubgroupSet.whole(t)
    if not h.is_abelian(t):
        raise StructuralError("abelian invariants of a non-abelian subgroup")
    orders = t.element_orders[np.array(h.members, dtype=np.int64)]
    divisors: List[int] = []
    for p, k in sorted(factorint(len(h)).items()):
        p, k = int(p), int(k)
        # counts[j] = #{x : x^(p^j) = 1}; log_p(counts[j]/counts[j-1]) factors have exponent >= j
        counts = [int((p ** j % orders == 0).sum()) for j in range(k + 1)]
        at_least = [0] + [round(math.log(counts[j] // counts[j - 1], p)) for j in range(1, k + 1)] + [0]
        for j in range(1, k + 1):
            divisors.extend([p ** j] * (at_least[j] - at_least[j + 1]))
    return sorted(divisors)


def count_homomorphisms_abelian(a: Sequence[int], b: Sequence[int]) -> int:
    """|Hom(A, B)| for abelian A, B given by elementary divisors."""
    total = 1
    for x in a:
        for y in b:
            total *= math.gcd(x, y)
    return total


# -----------------------------
# Commutator sets and Camina pairs
# -----------------------------

def commutator_set(t: GroupTable, x: int) -> Set[int]:
    """[x, G] = {[x, g] : g in G}; its size always equals |x^G|."""
    if not 0 <= x < t.order:
        raise GroupInputError(f"element index {x} out of range [0, {t.order})")
    values = set(t.commutator_matrix[x].tolist())
    class_size = len(np.unique(t.conjugation_matrix[x]))
    if len(values) != class_size:
        raise VerificationFailure(f"|[x,G]| = {len(values)} but |x^G| = {class_size} for x = {x}")
    return values


def uncovered_element(t: GroupTable, h: SubgroupSet, excluded: SubgroupSet) -> Optional[Tuple[int, int]]:
    """First (x, z) with x outside `excluded` and z in h but not in [x, G]."""
    h_arr = np.array(h.members, dtype=np.int64)
    present = np.zeros(t.order, dtype=bool)
    for x in range(t.order):
        if x in excluded:
            continue
        present[:] = False
        present[t.commutator_matrix[x]] = True
        missing = h_arr[~present[h_arr]]
        if len(missing):
            return x, int(missing[0])
    return None


def is_camina_pair(t: GroupTable, h: SubgroupSet) -> CaminaVerdict:
    if h.is_trivial() or h.is_whole():
        raise GroupInputError("a Camina pair needs a proper non-trivial subgroup")
    if not is_normal(t, h):
        raise GroupInputError("a Camina pair needs a normal subgroup")
    witness = uncovered_element(t, h, h)
    return CaminaVerdict(subgroup=list(h.members), holds=witness is None, witness=witness)


# -----------------------------
# Abelian subgroups and direct factors
# -----------------------------

def find_abelian_subgroup_of_index_p(t: GroupTable) -> Optional[SubgroupSet]:
    """
    An abelian subgroup of index p (the whole group when G is abelian).

    In a non-abelian p-group an abelian subgroup A of index p contains a
    non-central x, and then A = C_G(x). Scanning the centralizers of the
    non-central elements in index order is therefore exhaustive.
    """
    p = _require_p_group(t)
    if t.is_abelian:
        return SubgroupSet.whole(t)
    z = center(t)
    seen: Set[Tuple[int, ...]] = set()
    for x in range(t.order):
        if x in z:
            continue
        c = centralizer(t, x)
        if c.members in seen:
            continue
        seen.add(c.members)
        if c.index == p and c.is_abelian(t):
            return c
    return None


def direct_factor_witness(t: GroupTable) -> Optional[SubgroupSet]:
    """
    A non-trivial abelian direct factor of G, or None.

    Any such factor has a cyclic direct factor C = <z> with z central and
    C ∩ G' = 1; C is a direct factor iff some homomorphism G/G' -> C maps
    zG' to a generator of C. Every central cyclic subgroup is tried.
    """
    if t.order == 1:
        return None
    if t.is_abelian:
        return SubgroupSet.whole(t)
    derived = derived_subgroup(t)
    q = quotient(t, derived)
    qgens = greedy_generators(q.table)
    qorders = [int(q.table.element_orders[g]) for g in qgens]
    orders = t.element_orders
    seen: Set[Tuple[int, ...]] = set()
    for z in center(t).members[1:]:
        c = closure(t, [z])
        if c.members in seen:
            continue
        seen.add(c.members)
        if len(c.intersection(derived)) > 1:
            continue
        m = len(c)
        choices = [[y for y in c.members if o % int(orders[y]) == 0] for o in qorders]
        for images in itertools.product(*choices):
            img = extend_homomorphism(q.table, qgens, images, t)
            if img is not None and int(orders[img[q.projection[z]]]) == m:
                logger.debug("abelian direct factor of order %d generated by %d", m, z)
                return c
    return None


def is_purely_nonabelian(t: GroupTable) -> bool:
    return direct_factor_witness(t) is None


# -----------------------------
# Report
# -----------------------------

def build_structure_report(t: GroupTable) -> StructureReport:
    pk = prime_power(t.order)
    series = lower_central_series(t)
    nilpotent = series[-1].is_trivial()
    classes = conjugacy_classes(t)
    factor = direct_factor_witness(t)
    return StructureReport(
        name=t.name,
        digest=t.digest(),
        order=t.order,
        prime=pk[0] if pk else None,
        is_abelian=t.is_abelian,
        center=list(center(t).members),
        derived=list(derived_subgroup(t).members),
        lower_central=[list(s.members) for s in series],
        frattini=list(frattini(t).members),
        nilpotency_class=len(series) - 1 if nilpotent else None,
        rank_d=rank_d(t),
        exponent=exponent(t),
        class_sizes=classes.sizes(),
        purely_nonabelian=factor is None,
        direct_factor=list(factor.members) if factor is not None else None,
    )
