"""
Cross-check of the Aut_c backtracking search: unrestricted Aut(G) filtered
by the class-preserving predicate must give exactly the same set.
"""

import logging
from typing import Callable, Optional, Sequence, Tuple

from tqdm import tqdm

from src.automorphisms import (
    AutomorphismSet,
    brute_force_automorphisms,
    class_preserving_subset,
    enumerate_class_preserving,
)
from src.config import ORACLE_MAX_ORDER
from src.group_core import GroupTable
from src.schemas import OracleRecord, OracleReport

logger = logging.getLogger(__name__)

Enumerator = Callable[[GroupTable], AutomorphismSet]


def _default_enumerator(t: GroupTable) -> AutomorphismSet:
    return enumerate_class_preserving(t, jobs=1)


def oracle_record(name: str, t: GroupTable, enumerate_fn: Optional[Enumerator] = None) -> OracleRecord:
    enumerate_fn = enumerate_fn or _default_enumerator
    aut = brute_force_automorphisms(t)
    filtered = class_preserving_subset(t, aut)
    searched = enumerate_fn(t)
    match = filtered.images() == searched.images()
    if not match:
        logger.error(
            "oracle mismatch on %s: filtered |Aut_c| = %d, backtracking %d",
            name,
            len(filtered),
            len(searched),
        )
    return OracleRecord(
        name=name,
        order=t.order,
        aut_order=len(aut),
        brute_force_aut_c=len(filtered),
        backtracking_aut_c=len(searched),
        match=match,
    )


def run_oracle(
    groups: Sequence[Tuple[str, GroupTable]],
    max_order: int = ORACLE_MAX_ORDER,
    enumerate_fn: Optional[Enumerator] = None,
    progress: bool = False,
) -> OracleReport:
    """Oracle over every group of order <= max_order (others are skipped)."""
    if max_order > 16:
        logger.warning("oracle max order %d above 16: unrestricted Aut(G) search may be slow", max_order)
    selected = [(name, t) for name, t in groups if t.order <= max_order]
    itr = selected
    if progress:
        itr = tqdm(selected, desc="oracle")
    records = [oracle_record(name, t, enumerate_fn) for name, t in itr]
    return OracleReport(max_order=max_order, records=records)
