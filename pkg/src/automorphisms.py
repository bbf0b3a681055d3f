"""
Automorphism enumeration: Inn(G), Aut_c(G) (class-preserving), Aut_z(G)
(central), their intersections, Out_c(G) and the order formula

    |Aut_c| = |Aut_c ∩ Aut_z| |Inn| / |Z(Inn)|

which holds whenever Out_c(G/Z(G)) = 1.

Every automorphism is stored as its full image vector over element indices.
"""

import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.config import CENTRAL_ENUM_LIMIT, JOBS
from src.errors import GroupInputError, ResourceOverflowError, StructuralError, VerificationFailure
from src.group_core import (
    GroupTable,
    closure,
    extend_homomorphism,
    greedy_generators,
    quotient,
)
from src.schemas import OrderFormulaReport, WitnessReport
from src.structure import (
    abelian_invariants,
    center,
    count_homomorphisms_abelian,
    derived_subgroup,
    is_purely_nonabelian,
    minimal_generating_tuple,
    second_center,
)

logger = logging.getLogger(__name__)


class Flag(str, Enum):
    YES = "yes"
    NO = "no"
    UNCHECKED = "unchecked"


def _flag(value: bool) -> Flag:
    return Flag.YES if value else Flag.NO


@dataclass(frozen=True, eq=False)
class Automorphism:
    """An automorphism as its image vector; equality and hashing use the image only."""

    image: Tuple[int, ...]
    is_inner: Flag = Flag.UNCHECKED
    is_class_preserving: Flag = Flag.UNCHECKED
    is_central: Flag = Flag.UNCHECKED
    conjugators: Optional[Tuple[int, ...]] = None  # g_x with image[x] = g_x^-1 x g_x

    def __post_init__(self):
        if not self.image or self.image[0] != 0:
            raise StructuralError("an automorphism must fix the identity")
        if self.conjugators is not None and len(self.conjugators) != len(self.image):
            raise StructuralError("conjugator table has the wrong length")
        if self.is_class_preserving == Flag.YES and self.conjugators is None:
            raise StructuralError("a class-preserving automorphism needs its conjugator table")

    def __eq__(self, other) -> bool:
        return isinstance(other, Automorphism) and self.image == other.image

    def __hash__(self) -> int:
        return hash(self.image)

    def __call__(self, x: int) -> int:
        return self.image[x]

    def compose(self, other: "Automorphism") -> "Automorphism":
        """self ∘ other, i.e. x -> self(other(x))."""
        return Automorphism(tuple(self.image[y] for y in other.image))

    def inverse(self) -> "Automorphism":
        inv = [0] * len(self.image)
        for x, y in enumerate(self.image):
            inv[y] = x
        return Automorphism(tuple(inv))

    def is_identity(self) -> bool:
        return all(x == y for x, y in enumerate(self.image))


class AutomorphismSet:
    """
    A finite group of automorphisms, deduplicated by image and sorted
    lexicographically. `certificate` is a generating list found while
    checking closure: the set equals the group those maps generate.
    """

    def __init__(self, degree: int, elements: Iterable[Automorphism], verify: bool = True):
        by_image: Dict[Tuple[int, ...], Automorphism] = {}
        for a in elements:
            if len(a.image) != degree:
                raise GroupInputError(f"automorphism of degree {len(a.image)} in a set of degree {degree}")
            by_image.setdefault(a.image, a)
        self.degree = degree
        self.elements: Tuple[Automorphism, ...] = tuple(by_image[k] for k in sorted(by_image))
        self._by_image = by_image
        self.certificate: Tuple[Automorphism, ...] = ()
        if verify:
            self.certificate = self._closure_certificate()

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[Automorphism]:
        return iter(self.elements)

    def __contains__(self, item: Union[Automorphism, Sequence[int]]) -> bool:
        key = item.image if isinstance(item, Automorphism) else tuple(item)
        return key in self._by_image

    def __repr__(self) -> str:
        return f"AutomorphismSet(degree={self.degree}, size={len(self)})"

    def get(self, image: Sequence[int]) -> Optional[Automorphism]:
        return self._by_image.get(tuple(image))

    def images(self) -> List[Tuple[int, ...]]:
        return [a.image for a in self.elements]

    def matrix(self) -> np.ndarray:
        return np.array(self.images(), dtype=np.int64).reshape(len(self), self.degree)

    def _closure_certificate(self) -> Tuple[Automorphism, ...]:
        identity = tuple(range(self.degree))
        if identity not in self._by_image:
            raise VerificationFailure("automorphism set does not contain the identity")
        reached = {identity}
        frontier = [identity]
        gens: List[Tuple[int, ...]] = []
        while True:
            while frontier:
                nxt = []
                for r in frontier:
                    for g in gens:
                        c = tuple(r[y] for y in g)
                        if c not in self._by_image:
                            raise VerificationFailure("automorphism set is not closed under composition")
                        if c not in reached:
                            reached.add(c)
                            nxt.append(c)
                frontier = nxt
            if len(reached) == len(self.elements):
                break
            g = next(a.image for a in self.elements if a.image not in reached)
            gens.append(g)
            # new generator: restart the sweep from everything reached so far
            frontier = list(reached)
        return tuple(self._by_image[g] for g in gens)

    def is_normal_in(self, other: "AutomorphismSet") -> bool:
        """Whether self is a normal subgroup of other (checked on generators)."""
        if not all(a in other for a in self.elements):
            return False
        gens = self.certificate or self._closure_certificate()
        for b in other.certificate or other._closure_certificate():
            b_inv = b.inverse()
            for a in gens:
                if b.compose(a).compose(b_inv) not in self:
                    return False
        return True


# -----------------------------
# Predicates on image vectors
# -----------------------------

def is_automorphism(t: GroupTable, image: Sequence[int]) -> bool:
    a = np.asarray(image, dtype=np.int64)
    if a.shape != (t.order,) or len(np.unique(a)) != t.order:
        return False
    return bool(np.array_equal(a[t.product], t.product[a[:, None], a[None, :]]))


def is_class_preserving(t: GroupTable, image: Sequence[int]) -> bool:
    cls = t.class_index
    return bool((cls[np.asarray(image, dtype=np.int64)] == cls).all())


def is_central(t: GroupTable, image: Sequence[int]) -> bool:
    """x^-1 α(x) ∈ Z(G) for every x."""
    moved = t.product[t.inverse, np.asarray(image, dtype=np.int64)]
    return bool(center(t).mask()[moved].all())


def conjugator_witnesses(t: GroupTable, image: Sequence[int]) -> Optional[Tuple[int, ...]]:
    """Smallest g_x with image[x] = g_x^-1 x g_x for each x, or None if some x has none."""
    hit = t.conjugation_matrix == np.asarray(image, dtype=np.int64)[:, None]
    if not hit.any(axis=1).all():
        return None
    return tuple(np.argmax(hit, axis=1).tolist())


# -----------------------------
# Inn(G)
# -----------------------------

def inner_automorphisms(t: GroupTable) -> AutomorphismSet:
    conj = t.conjugation_matrix
    zmask = center(t).mask()
    seen: Dict[Tuple[int, ...], int] = {}
    for g in range(t.order):
        seen.setdefault(tuple(conj[:, g].tolist()), g)
    auts = []
    for image, g in seen.items():
        moved = t.product[t.inverse, np.array(image)]
        auts.append(
            Automorphism(
                image=image,
                is_inner=Flag.YES,
                is_class_preserving=Flag.YES,
                is_central=_flag(bool(zmask[moved].all())),
                conjugators=(g,) * t.order,
            )
        )
    inn = AutomorphismSet(t.order, auts)
    if len(inn) * len(center(t)) != t.order:
        raise VerificationFailure(f"|Inn| = {len(inn)} but |G|/|Z| = {t.order // len(center(t))}")
    return inn


def center_of_inner(t: GroupTable, inn: Optional[AutomorphismSet] = None) -> AutomorphismSet:
    """Z(Inn(G)) under composition; its order is checked against |Z_2(G)/Z(G)|."""
    inn = inn if inn is not None else inner_automorphisms(t)
    m = inn.matrix()
    central = []
    for k, a in enumerate(inn.elements):
        # row b of left is a∘b, row b of right is b∘a
        left = m[k][m]
        right = m[:, m[k]]
        if np.array_equal(left, right):
            central.append(a)
    zinn = AutomorphismSet(t.order, central)
    expected = len(second_center(t)) // len(center(t))
    if len(zinn) != expected:
        raise VerificationFailure(f"|Z(Inn)| = {len(zinn)} but |Z_2/Z| = {expected}")
    return zinn


# -----------------------------
# Aut_c(G): backtracking over class-restricted generator images
# -----------------------------

def _consistent_prefix(t: GroupTable, gens: Sequence[int], images: Tuple[int, ...]) -> Optional[List[int]]:
    """Partial extension on <gens[:k]>, kept only if injective and class-preserving there."""
    img = extend_homomorphism(t, gens[: len(images)], images, t, partial=True)
    if img is None:
        return None
    arr = np.array(img, dtype=np.int64)
    defined = arr >= 0
    values = arr[defined]
    if len(np.unique(values)) != len(values):
        return None
    cls = t.class_index
    if not (cls[values] == cls[defined]).all():
        return None
    return img


def _backtrack(
    t: GroupTable,
    gens: Tuple[int, ...],
    candidates: List[Tuple[int, ...]],
    prefix: Tuple[int, ...],
) -> List[Tuple[int, ...]]:
    found: List[Tuple[int, ...]] = []

    def search(images: Tuple[int, ...]) -> None:
        img = _consistent_prefix(t, gens, images)
        if img is None:
            return
        if len(images) == len(gens):
            # gens generate G, so img is total, injective and class-preserving elementwise
            found.append(tuple(img))
            return
        for c in candidates[len(images)]:
            search(images + (c,))

    search(prefix)
    return found


def _backtrack_worker(args) -> List[Tuple[int, ...]]:
    return _backtrack(*args)


def _resolve_generators(t: GroupTable, gens: Optional[Sequence[int]]) -> Tuple[int, ...]:
    if gens is None:
        return minimal_generating_tuple(t)
    gens = tuple(int(g) for g in gens)
    for g in gens:
        if not 0 <= g < t.order:
            raise GroupInputError(f"generator index {g} out of range [0, {t.order})")
    if not closure(t, gens).is_whole():
        raise GroupInputError(f"elements {list(gens)} do not generate the group")
    return gens


def enumerate_class_preserving(
    t: GroupTable,
    gens: Optional[Sequence[int]] = None,
    jobs: int = JOBS,
) -> AutomorphismSet:
    """
    All class-preserving automorphisms of G.

    Generator images range over the generators' conjugacy classes; partial
    extensions are pruned as soon as they stop being injective or
    class-preserving on the subgroup they cover. Each surviving full
    extension is checked class-preserving on every element and given a
    conjugator witness table.
    """
    gens = _resolve_generators(t, gens)
    classes = t.classes
    candidates = [classes.class_of_element(g) for g in gens]
    logger.debug(
        "Aut_c search on %s: generators %s, %d candidate tuples",
        t.name or f"order {t.order}",
        list(gens),
        int(np.prod([len(c) for c in candidates])) if candidates else 1,
    )

    if jobs > 1 and gens and len(candidates[0]) > 1:
        tasks = [(t, gens, candidates, (c,)) for c in candidates[0]]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            images = [img for part in pool.map(_backtrack_worker, tasks) for img in part]
    else:
        images = _backtrack(t, gens, candidates, ())

    inner_images = set(inner_automorphisms(t).images())
    zmask = center(t).mask()
    auts = []
    for image in images:
        if not is_class_preserving(t, image):
            raise VerificationFailure(f"backtracking produced a non class-preserving map {list(image)}")
        witnesses = conjugator_witnesses(t, image)
        if witnesses is None:
            raise VerificationFailure(f"no conjugator table for class-preserving map {list(image)}")
        moved = t.product[t.inverse, np.array(image)]
        auts.append(
            Automorphism(
                image=image,
                is_inner=_flag(image in inner_images),
                is_class_preserving=Flag.YES,
                is_central=_flag(bool(zmask[moved].all())),
                conjugators=witnesses,
            )
        )
    aut_c = AutomorphismSet(t.order, auts)
    logger.info("|Aut_c(%s)| = %d", t.name or f"order {t.order}", len(aut_c))
    return aut_c


# -----------------------------
# Aut_z(G)
# -----------------------------

def count_central_homomorphisms(t: GroupTable) -> int:
    """|Hom(G/G', Z(G))| from the abelian invariants of both sides."""
    q = quotient(t, derived_subgroup(t))
    return count_homomorphisms_abelian(abelian_invariants(q.table), abelian_invariants(t, center(t)))


def central_automorphisms(t: GroupTable, limit: int = CENTRAL_ENUM_LIMIT) -> AutomorphismSet:
    """
    Aut_z(G): the bijective maps x -> x f(xG') for f in Hom(G/G', Z(G)).
    Raises ResourceOverflowError when the hom count is above `limit`.
    """
    expected = count_central_homomorphisms(t)
    if expected > limit:
        raise ResourceOverflowError(f"|Hom(G/G', Z(G))| = {expected} exceeds the enumeration limit {limit}")
    z = center(t)
    q = quotient(t, derived_subgroup(t))
    qgens = greedy_generators(q.table)
    qorders = q.table.element_orders
    orders = t.element_orders
    choices = [[y for y in z.members if int(qorders[g]) % int(orders[y]) == 0] for g in qgens]
    proj = np.array(q.projection, dtype=np.int64)
    idx = np.arange(t.order)
    cls = t.class_index

    homs = 0
    auts = []
    for images in itertools.product(*choices):
        f = extend_homomorphism(q.table, qgens, images, t)
        if f is None:
            continue
        homs += 1
        image = t.product[idx, np.array(f, dtype=np.int64)[proj]]
        if len(np.unique(image)) != t.order:
            continue
        witnesses = conjugator_witnesses(t, image) if (cls[image] == cls).all() else None
        auts.append(
            Automorphism(
                image=tuple(image.tolist()),
                is_central=Flag.YES,
                is_class_preserving=_flag(witnesses is not None),
                conjugators=witnesses,
            )
        )
    if homs != expected:
        raise VerificationFailure(f"enumerated {homs} homomorphisms G/G' -> Z(G), expected {expected}")
    if t.order > 1 and not t.is_abelian and len(auts) != homs and is_purely_nonabelian(t):
        raise VerificationFailure(
            f"purely non-abelian group: {len(auts)} central automorphisms but {homs} homomorphisms"
        )
    return AutomorphismSet(t.order, auts)


def central_part(t: GroupTable, s: AutomorphismSet) -> AutomorphismSet:
    """The central automorphisms inside s."""
    return AutomorphismSet(t.order, [a for a in s if is_central(t, a.image)])


def intersect(a: AutomorphismSet, b: AutomorphismSet) -> AutomorphismSet:
    if a.degree != b.degree:
        raise GroupInputError(f"automorphism sets of degrees {a.degree} and {b.degree}")
    return AutomorphismSet(a.degree, [x for x in a if x in b])


# -----------------------------
# Out_c(G) and the order formula
# -----------------------------

def outc_order(
    t: GroupTable,
    gens: Optional[Sequence[int]] = None,
    jobs: int = JOBS,
    aut_c: Optional[AutomorphismSet] = None,
    inn: Optional[AutomorphismSet] = None,
) -> int:
    aut_c = aut_c if aut_c is not None else enumerate_class_preserving(t, gens, jobs)
    inn = inn if inn is not None else inner_automorphisms(t)
    if not inn.is_normal_in(aut_c):
        raise VerificationFailure("Inn(G) is not a normal subgroup of Aut_c(G)")
    if len(aut_c) % len(inn):
        raise VerificationFailure(f"|Inn| = {len(inn)} does not divide |Aut_c| = {len(aut_c)}")
    return len(aut_c) // len(inn)


def _factorization_holds(t: GroupTable, aut_c: AutomorphismSet) -> bool:
    """Every α in Aut_c is i_a ∘ β with β(x) = a α(x) a^-1 central and class-preserving."""
    n = t.order
    idx = np.arange(n)
    zmask = center(t).mask()
    for alpha in aut_c:
        a_img = np.array(alpha.image, dtype=np.int64)
        # beta[a, x] = a α(x) a^-1
        beta = t.product[t.product[idx[:, None], a_img[None, :]], t.inverse[:, None]]
        central = zmask[t.product[t.inverse[None, :], beta]].all(axis=1)
        if not any(tuple(beta[a].tolist()) in aut_c for a in np.nonzero(central)[0]):
            logger.debug("no factorization for %s", list(alpha.image))
            return False
    return True


def order_formula_check(
    t: GroupTable,
    gens: Optional[Sequence[int]] = None,
    jobs: int = JOBS,
    aut_c: Optional[AutomorphismSet] = None,
) -> OrderFormulaReport:
    """
    Check the order formula for Aut_c(G) under the hypothesis Out_c(G/Z(G)) = 1.

    The hypothesis is decided by enumerating Aut_c of the quotient table.
    When it holds, the formula and the factorization α = i_a ∘ β must both
    hold, otherwise VerificationFailure.
    """
    z = center(t)
    aut_c = aut_c if aut_c is not None else enumerate_class_preserving(t, gens, jobs)
    inn = inner_automorphisms(t)
    zinn = center_of_inner(t, inn)
    cap = central_part(t, aut_c)

    if z.is_whole():
        quotient_outc = 1
    else:
        quotient_outc = outc_order(quotient(t, z).table, jobs=jobs)

    report = OrderFormulaReport(
        hypothesis_verified=quotient_outc == 1,
        quotient_outc_order=quotient_outc,
        aut_c_order=len(aut_c),
        aut_c_cap_aut_z_order=len(cap),
        inn_order=len(inn),
        center_of_inn_order=len(zinn),
    )
    if not report.hypothesis_verified:
        logger.info("Out_c(G/Z) has order %d; order formula not asserted", quotient_outc)
        return report

    rhs = Fraction(len(cap) * len(inn), len(zinn))
    if rhs != len(aut_c):
        raise VerificationFailure(
            f"|Aut_c| = {len(aut_c)} but |Aut_c ∩ Aut_z| |Inn| / |Z(Inn)| = {rhs}"
        )
    if not _factorization_holds(t, aut_c):
        raise VerificationFailure("some class-preserving automorphism is not inner times central")
    return report.model_copy(
        update={"holds": True, "lhs": len(aut_c), "rhs": str(rhs), "factorization_verified": True}
    )


# -----------------------------
# Witnesses
# -----------------------------

def find_noninner_witness(
    t: GroupTable,
    gens: Optional[Sequence[int]] = None,
    jobs: int = JOBS,
    aut_c: Optional[AutomorphismSet] = None,
) -> Optional[Automorphism]:
    """First class-preserving automorphism (in sorted order) that is not inner."""
    aut_c = aut_c if aut_c is not None else enumerate_class_preserving(t, gens, jobs)
    inn = inner_automorphisms(t)
    for alpha in aut_c:
        if alpha in inn:
            continue
        if any(alpha.image == i.image for i in inn.elements):
            raise VerificationFailure("inner automorphism lookup disagrees with the explicit comparison")
        return alpha
    return None


def witness_report(t: GroupTable, alpha: Automorphism, with_conjugators: bool = False) -> WitnessReport:
    """Generator images as labels; named presentation generators when the table has them."""
    if t.generators:
        named = list(t.generators.items())
    else:
        named = [(t.label(g), g) for g in minimal_generating_tuple(t)]
    return WitnessReport(
        generator_images=[(name, t.label(alpha(g))) for name, g in named],
        image=list(alpha.image),
        conjugators=list(alpha.conjugators) if with_conjugators and alpha.conjugators is not None else None,
    )


# -----------------------------
# Unrestricted search (oracle path)
# -----------------------------

def brute_force_automorphisms(t: GroupTable) -> AutomorphismSet:
    """
    Aut(G) by trying every tuple of elements as images of a minimal
    generating tuple. Exponential in d(G); meant for small orders.
    """
    gens = minimal_generating_tuple(t)
    inner_images = set(inner_automorphisms(t).images())
    auts = []
    for images in itertools.product(range(t.order), repeat=len(gens)):
        img = extend_homomorphism(t, gens, images, t)
        if img is None or len(set(img)) != t.order:
            continue
        image = tuple(img)
        witnesses = conjugator_witnesses(t, image)
        auts.append(
            Automorphism(
                image=image,
                is_inner=_flag(image in inner_images),
                is_class_preserving=_flag(witnesses is not None),
                is_central=_flag(is_central(t, image)),
                conjugators=witnesses,
            )
        )
    logger.debug("|Aut(%s)| = %d by unrestricted search", t.name or f"order {t.order}", len(auts))
    return AutomorphismSet(t.order, auts)


def class_preserving_subset(t: GroupTable, s: AutomorphismSet) -> AutomorphismSet:
    return AutomorphismSet(t.order, [a for a in s if is_class_preserving(t, a.image)])
