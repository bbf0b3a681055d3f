"""
Decision conditions for Out_c(G) != 1 on groups of order p^5, checked
against direct enumeration. A disagreement is never tolerated: it raises
VerificationFailure carrying a structural dump of the group.

Out_c(G) != 1 holds exactly when |Z(G)| = p, Z(G) < G' and either
    (i)  cl(G) = 3 and d(G) = 3, or
    (ii) cl(G) = 4 and Z(G) ⊆ [x, G] for every x outside G'.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional, Sequence, Set, Tuple

from tqdm import tqdm

from src.automorphisms import (
    central_automorphisms,
    enumerate_class_preserving,
    find_noninner_witness,
    inner_automorphisms,
    outc_order,
    witness_report,
)
from src.config import JOBS
from src.errors import GroupInputError, VerificationFailure
from src.group_core import GroupTable, quotient
from src.schemas import (
    CriteriaReport,
    LargeCenterBranch,
    LargeCenterReport,
    ScanRecord,
    ScanReport,
    TheoremVerdict,
)
from src.structure import (
    build_structure_report,
    center,
    derived_subgroup,
    exponent,
    find_abelian_subgroup_of_index_p,
    frattini,
    is_camina_pair,
    is_purely_nonabelian,
    nilpotency_class,
    prime_power,
    rank_d,
    uncovered_element,
)

logger = logging.getLogger(__name__)


def _require_order_p5(t: GroupTable) -> int:
    pk = prime_power(t.order)
    if pk is None or pk[1] != 5:
        raise GroupInputError(f"expected a group of order p^5, got order {t.order}")
    return pk[0]


def _is_cyclic(t: GroupTable, members: Sequence[int]) -> bool:
    return any(int(t.element_orders[x]) == len(members) for x in members)


def structure_dump(t: GroupTable, verdict: Optional[TheoremVerdict] = None) -> str:
    dump = build_structure_report(t).model_dump_json(indent=2)
    if verdict is not None:
        dump += "\n" + verdict.model_dump_json(indent=2)
    return dump


# -----------------------------
# Prediction
# -----------------------------

def evaluate_conditions(t: GroupTable) -> TheoremVerdict:
    """
    What this does:
    - computes |Z|, Z < G', cl(G), d(G)
    - evaluates the Camina-type condition literally over every x outside G'
      (only when |Z| = p, Z < G' and cl(G) = 4)
    - returns the prediction; nothing is enumerated here
    """
    p = _require_order_p5(t)
    z = center(t)
    derived = derived_subgroup(t)
    cl = nilpotency_class(t)
    d = rank_d(t)
    center_lt_derived = z.issubset(derived) and len(z) < len(derived)

    camina: Optional[bool] = None
    camina_witness: Optional[Tuple[int, int]] = None
    if len(z) == p and center_lt_derived and cl == 4:
        camina_witness = uncovered_element(t, z, derived)
        camina = camina_witness is None

    predicted = (
        len(z) == p
        and center_lt_derived
        and ((cl == 3 and d == 3) or (cl == 4 and bool(camina)))
    )
    return TheoremVerdict(
        order=t.order,
        prime=p,
        center_order=len(z),
        center_lt_derived=center_lt_derived,
        nilpotency_class=cl,
        rank=d,
        camina_on_nonderived=camina,
        camina_witness=camina_witness,
        predicted_nontrivial=predicted,
    )


# -----------------------------
# Prediction vs. enumeration
# -----------------------------

def verify(
    t: GroupTable,
    gens: Optional[Sequence[int]] = None,
    jobs: int = JOBS,
    with_conjugators: bool = False,
) -> TheoremVerdict:
    verdict = evaluate_conditions(t)
    p = verdict.prime
    aut_c = enumerate_class_preserving(t, gens, jobs)
    inn = inner_automorphisms(t)
    computed = outc_order(t, aut_c=aut_c, inn=inn)
    agree = verdict.predicted_nontrivial == (computed > 1)
    verdict = verdict.model_copy(update={"computed_outc_order": computed, "agree": agree})

    def fail(message: str) -> VerificationFailure:
        return VerificationFailure(f"{t.name or 'group'}: {message}", dump=structure_dump(t, verdict))

    if not agree:
        raise fail(f"predicted nontrivial={verdict.predicted_nontrivial} but |Out_c| = {computed}")

    if verdict.predicted_nontrivial:
        if computed != p:
            raise fail(f"flagged group has |Out_c| = {computed}, expected {p}")
        if len(aut_c) != p ** 5 or len(inn) != p ** 4:
            raise fail(f"|Aut_c| = {len(aut_c)}, |Inn| = {len(inn)}; expected p^5 and p^4")
        if verdict.nilpotency_class not in (3, 4) or verdict.rank not in (2, 3):
            raise fail("flagged group outside cl in {3,4}, d in {2,3}")
        aut_z = central_automorphisms(t)
        if not all(a in aut_c for a in aut_z):
            raise fail("Aut_z(G) is not contained in Aut_c(G)")
        if verdict.nilpotency_class == 3:
            if len(derived_subgroup(t)) != p ** 2 or len(frattini(t)) != p ** 2:
                raise fail("flagged class-3 group without |G'| = |Phi(G)| = p^2")
            if not is_camina_pair(t, center(t)).holds:
                raise fail("flagged class-3 group where (G, Z(G)) is not a Camina pair")

    if computed > 1:
        if not is_purely_nonabelian(t):
            raise fail("group with Out_c != 1 has an abelian direct factor")
        alpha = find_noninner_witness(t, aut_c=aut_c)
        if alpha is None:
            raise fail("Out_c != 1 but no non-inner class-preserving automorphism was found")
        verdict = verdict.model_copy(update={"witness": witness_report(t, alpha, with_conjugators)})
    logger.info(
        "%s: predicted=%s computed |Out_c|=%d",
        t.name or f"order {t.order}",
        verdict.predicted_nontrivial,
        computed,
    )
    return verdict


def _verify_worker(args) -> TheoremVerdict:
    t, with_conjugators = args
    return verify(t, jobs=1, with_conjugators=with_conjugators)


def scan_database(
    groups: Sequence[Tuple[str, GroupTable]],
    jobs: int = JOBS,
    progress: bool = False,
    with_conjugators: bool = False,
) -> ScanReport:
    """Verify every entry; records keep input order, flagged names follow it."""
    if not groups:
        return ScanReport()
    names = [name for name, _ in groups]
    if len(set(names)) != len(names):
        raise GroupInputError("group names in a scan must be unique")
    orders = sorted({t.order for _, t in groups})
    if len(orders) > 1:
        raise GroupInputError(f"scan needs groups of one order, got orders {orders}")
    p = _require_order_p5(groups[0][1])

    if jobs > 1 and len(groups) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            itr = pool.map(_verify_worker, [(t, with_conjugators) for _, t in groups])
            if progress:
                itr = tqdm(itr, desc="verify", total=len(groups))
            verdicts: List[TheoremVerdict] = list(itr)
    else:
        itr = groups
        if progress:
            itr = tqdm(groups, desc="verify")
        verdicts = [verify(t, jobs=1, with_conjugators=with_conjugators) for _, t in itr]

    records = [ScanRecord(name=name, verdict=v) for name, v in zip(names, verdicts)]
    flagged = [r.name for r in records if (r.verdict.computed_outc_order or 1) > 1]
    logger.info("scanned %d groups of order %d, %d flagged", len(records), orders[0], len(flagged))
    return ScanReport(order=orders[0], prime=p, records=records, flagged=flagged)


# -----------------------------
# Large centers and the classical criteria
# -----------------------------

def _check_class_three_counting(t: GroupTable, p: int, sizes: Set[int], aut_c_order: int) -> None:
    """Every class outside G' has size p^2, and that bounds |Aut_c(G)| by p^4."""
    if sizes != {p ** 2}:
        raise VerificationFailure(f"class sizes outside G' are {sorted(sizes)}", dump=structure_dump(t))
    if aut_c_order > p ** 4:
        raise VerificationFailure(f"|Aut_c| = {aut_c_order} exceeds p^4", dump=structure_dump(t))


def large_center_check(t: GroupTable, gens: Optional[Sequence[int]] = None, jobs: int = JOBS) -> LargeCenterReport:
    """
    Groups of order p^5 with |Z(G)| >= p^2 have Out_c(G) = 1. Reports which
    argument applies and checks the structural fact that argument relies on.
    """
    p = _require_order_p5(t)
    z = center(t)
    if len(z) < p ** 2:
        raise GroupInputError(f"|Z(G)| = {len(z)} is below p^2 = {p ** 2}")
    aut_c = enumerate_class_preserving(t, gens, jobs)
    computed = outc_order(t, aut_c=aut_c)
    if computed != 1:
        raise VerificationFailure(f"|Z(G)| >= p^2 but |Out_c| = {computed}", dump=structure_dump(t))

    cl = nilpotency_class(t)
    derived = derived_subgroup(t)
    abelian = find_abelian_subgroup_of_index_p(t)

    def need_abelian(reason: str) -> None:
        if abelian is None or abelian.is_whole():
            raise VerificationFailure(f"no abelian subgroup of index p ({reason})", dump=structure_dump(t))

    if t.is_abelian:
        branch = LargeCenterBranch.ABELIAN
    elif len(z) >= p ** 3:
        branch = LargeCenterBranch.LARGE_CENTER
        need_abelian("|Z(G)| >= p^3")
    elif cl == 2 and _is_cyclic(t, derived.members):
        branch = LargeCenterBranch.CYCLIC_DERIVED
    elif cl == 2:
        if derived != z or rank_d(t) != 3:
            raise VerificationFailure("class 2 with non-cyclic G' but Z != G' or d != 3", dump=structure_dump(t))
        if len(z) == p ** 2 and exponent(quotient(t, z).table) != p:
            raise VerificationFailure("class 2 with Z = G' of order p^2 but exp(G/Z) != p", dump=structure_dump(t))
        branch = LargeCenterBranch.MAXIMAL_ABELIAN
        need_abelian("class 2, Z = G' of order p^2")
    elif len(z) == p ** 2 and cl == 3 and len(derived) not in (p ** 2, p ** 3):
        raise VerificationFailure(f"class 3, |Z| = p^2 but |G'| = {len(derived)}", dump=structure_dump(t))
    elif len(derived) == p ** 2:
        branch = LargeCenterBranch.MAXIMAL_ABELIAN
        need_abelian("class 3, |G'| = p^2")
    else:
        sizes = {len(t.classes.class_of_element(x)) for x in range(t.order) if x not in derived}
        if p in sizes:
            branch = LargeCenterBranch.MAXIMAL_ABELIAN
            need_abelian("class 3, some class outside G' of size p")
        else:
            _check_class_three_counting(t, p, sizes, len(aut_c))
            branch = LargeCenterBranch.CLASS_THREE_COUNTING

    return LargeCenterReport(
        center_order=len(z),
        nilpotency_class=cl,
        derived_order=len(derived),
        branch=branch,
        abelian_subgroup=list(abelian.members) if abelian is not None else None,
        aut_c_order=len(aut_c),
        outc_order=computed,
    )


def check_criteria(t: GroupTable, jobs: int = JOBS) -> CriteriaReport:
    """
    Two classical sufficient conditions for Out_c(G) = 1 on p-groups:
    an abelian subgroup of index p, or class 2 with cyclic G'.
    Whenever one applies, the computed Out_c must be trivial.
    """
    abelian = find_abelian_subgroup_of_index_p(t) if prime_power(t.order) else None
    derived = derived_subgroup(t)
    cyclic_class_two = (
        prime_power(t.order) is not None
        and not t.is_abelian
        and nilpotency_class(t) == 2
        and _is_cyclic(t, derived.members)
    )
    computed = outc_order(t, jobs=jobs)
    if (abelian is not None or cyclic_class_two) and computed != 1:
        raise VerificationFailure(
            f"{t.name or 'group'}: sufficient condition holds but |Out_c| = {computed}",
            dump=structure_dump(t),
        )
    return CriteriaReport(
        name=t.name,
        abelian_index_p_subgroup=list(abelian.members) if abelian is not None else None,
        class_two_cyclic_derived=cyclic_class_two,
        outc_order=computed,
    )
