import logging
from typing import Optional, Sequence, Tuple, TypedDict

from langgraph.graph import END, StateGraph

from src.automorphisms import (
    AutomorphismSet,
    central_automorphisms,
    central_part,
    count_central_homomorphisms,
    enumerate_class_preserving,
    find_noninner_witness,
    inner_automorphisms,
    order_formula_check,
    outc_order,
    witness_report,
)
from src.config import CENTRAL_ENUM_LIMIT, JOBS
from src.group_core import GroupTable
from src.ingest import StructureCache
from src.schemas import AnalysisReport, OrderFormulaReport, StructureReport, WitnessReport

logger = logging.getLogger(__name__)


# The state that flows through the analysis graph.
# Each node reads what earlier nodes produced and adds its own fields.
class AnalysisState(TypedDict):
    # Inputs
    table: GroupTable
    gens: Optional[Tuple[int, ...]]
    jobs: int
    with_conjugators: bool
    cache: StructureCache

    # Intermediate values
    structure: Optional[StructureReport]
    aut_c: Optional[AutomorphismSet]
    inn: Optional[AutomorphismSet]
    aut_z_order: Optional[int]
    cap_order: Optional[int]
    outc_order: Optional[int]
    order_formula: Optional[OrderFormulaReport]
    witness: Optional[WitnessReport]

    # Output
    report: Optional[AnalysisReport]


# -------------------------
# Graph nodes
# -------------------------

def node_structure(state: AnalysisState) -> AnalysisState:
    return {**state, "structure": state["cache"].structure(state["table"])}


def node_automorphisms(state: AnalysisState) -> AnalysisState:
    t = state["table"]
    aut_c = enumerate_class_preserving(t, state["gens"], state["jobs"])
    inn = inner_automorphisms(t)
    if count_central_homomorphisms(t) <= CENTRAL_ENUM_LIMIT:
        aut_z_order: Optional[int] = len(central_automorphisms(t))
    else:
        logger.info("Aut_z not enumerated: |Hom(G/G', Z)| above %d", CENTRAL_ENUM_LIMIT)
        aut_z_order = None
    return {
        **state,
        "aut_c": aut_c,
        "inn": inn,
        "aut_z_order": aut_z_order,
        "cap_order": len(central_part(t, aut_c)),
        "outc_order": outc_order(t, aut_c=aut_c, inn=inn),
    }


def node_order_formula(state: AnalysisState) -> AnalysisState:
    report = order_formula_check(state["table"], jobs=state["jobs"], aut_c=state["aut_c"])
    return {**state, "order_formula": report}


def node_witness(state: AnalysisState) -> AnalysisState:
    t = state["table"]
    alpha = find_noninner_witness(t, aut_c=state["aut_c"])
    witness = witness_report(t, alpha, state["with_conjugators"]) if alpha is not None else None
    return {**state, "witness": witness}


def node_report(state: AnalysisState) -> AnalysisState:
    t = state["table"]
    report = AnalysisReport(
        name=t.name,
        structure=state["structure"],
        aut_c_order=len(state["aut_c"]),
        inn_order=len(state["inn"]),
        aut_z_order=state["aut_z_order"],
        aut_c_cap_aut_z_order=state["cap_order"],
        outc_order=state["outc_order"],
        order_formula=state["order_formula"],
        witness=state.get("witness"),
    )
    return {**state, "report": report}


def route_after_order_formula(state: AnalysisState) -> str:
    return "witness" if state["outc_order"] > 1 else "report"


def build_analysis_graph():
    """
    Builds the analysis workflow.

    Sequence:
    structure -> automorphisms -> order_formula -> [witness, only when Out_c != 1] -> report -> END
    """
    graph = StateGraph(AnalysisState)

    graph.add_node("structure", node_structure)
    graph.add_node("automorphisms", node_automorphisms)
    graph.add_node("order_formula", node_order_formula)
    graph.add_node("witness", node_witness)
    graph.add_node("report", node_report)

    graph.set_entry_point("structure")
    graph.add_edge("structure", "automorphisms")
    graph.add_edge("automorphisms", "order_formula")
    graph.add_conditional_edges("order_formula", route_after_order_formula, {"witness": "witness", "report": "report"})
    graph.add_edge("witness", "report")
    graph.add_edge("report", END)

    return graph.compile()


def run_analysis(
    t: GroupTable,
    gens: Optional[Sequence[int]] = None,
    jobs: int = JOBS,
    with_conjugators: bool = False,
    cache: Optional[StructureCache] = None,
) -> AnalysisReport:
    app = build_analysis_graph()
    final = app.invoke(
        {
            "table": t,
            "gens": tuple(gens) if gens is not None else None,
            "jobs": jobs,
            "with_conjugators": with_conjugators,
            "cache": cache if cache is not None else StructureCache(),
            "structure": None,
            "aut_c": None,
            "inn": None,
            "aut_z_order": None,
            "cap_order": None,
            "outc_order": None,
            "order_formula": None,
            "witness": None,
            "report": None,
        }
    )
    return final["report"]
