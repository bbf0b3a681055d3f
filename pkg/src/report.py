"""
Report rendering.

- text:    sectioned, for people
- machine: one `key=value` per line, keys in model field order, so two
           runs on the same input give byte-identical output
"""

from enum import Enum
from typing import Any, Iterator, List, Optional, Tuple

from pydantic import BaseModel

from src.schemas import AnalysisReport, OracleReport, ScanReport, TheoremVerdict, WitnessReport

TEXT = "text"
MACHINE = "machine"


# -----------------------------
# machine format
# -----------------------------

def _scalar(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Enum):
        return str(value.value)
    return str(value)


def _is_flat(values) -> bool:
    return all(not isinstance(v, (list, tuple, dict, BaseModel)) for v in values)


def _flatten(prefix: str, value: Any) -> Iterator[Tuple[str, str]]:
    if isinstance(value, BaseModel):
        for field in type(value).model_fields:
            yield from _flatten(f"{prefix}.{field}" if prefix else field, getattr(value, field))
    elif isinstance(value, (list, tuple)):
        if _is_flat(value):
            yield prefix, ",".join(_scalar(v) for v in value)
        else:
            yield f"{prefix}.count", str(len(value))
            for i, v in enumerate(value):
                yield from _flatten(f"{prefix}.{i}", v)
    else:
        yield prefix, _scalar(value)


def to_machine(model: BaseModel, prefix: str = "") -> str:
    return "".join(f"{k}={v}\n" for k, v in _flatten(prefix, model))


# -----------------------------
# text format
# -----------------------------

def _subgroup(members: List[int]) -> str:
    if len(members) <= 16:
        return "{" + ", ".join(str(x) for x in members) + "}"
    return f"{{{', '.join(str(x) for x in members[:8])}, ... }} ({len(members)} elements)"


def _witness_lines(w: WitnessReport) -> List[str]:
    lines = ["Non-inner class-preserving automorphism:"]
    lines.extend(f"  {g} -> {img}" for g, img in w.generator_images)
    if w.conjugators is not None:
        lines.append("  conjugators (x: g_x):")
        lines.extend(f"    {x}: {g}" for x, g in enumerate(w.conjugators))
    return lines


def analysis_text(r: AnalysisReport) -> str:
    s = r.structure
    lines = [
        f"=== {r.name or 'group'} ===",
        f"Order: {s.order}" + (f" (p = {s.prime})" if s.prime else ""),
        f"Abelian: {'yes' if s.is_abelian else 'no'}",
        f"|Z(G)|: {len(s.center)}  Z(G) = {_subgroup(s.center)}",
        f"|G'|: {len(s.derived)}",
        f"|Phi(G)|: {len(s.frattini)}",
        f"Lower central series orders: {' > '.join(str(len(g)) for g in s.lower_central)}",
        f"Nilpotency class: {s.nilpotency_class if s.nilpotency_class is not None else 'not nilpotent'}",
        f"d(G): {s.rank_d}",
        f"Exponent: {s.exponent}",
        f"Class sizes: {' '.join(str(c) for c in s.class_sizes)}",
        f"Purely non-abelian: {'yes' if s.purely_nonabelian else 'no'}",
        "",
        "=== Automorphisms ===",
        f"|Aut_c(G)|: {r.aut_c_order}",
        f"|Inn(G)|: {r.inn_order}",
        f"|Aut_z(G)|: {r.aut_z_order if r.aut_z_order is not None else 'not enumerated'}",
        f"|Aut_c ∩ Aut_z|: {r.aut_c_cap_aut_z_order}",
        f"|Out_c(G)|: {r.outc_order}",
        "",
        "=== Order formula ===",
    ]
    formula = r.order_formula
    if formula.hypothesis_verified:
        lines.append(
            f"Out_c(G/Z) = 1; |Aut_c| = {formula.lhs} = {formula.aut_c_cap_aut_z_order}·{formula.inn_order}/"
            f"{formula.center_of_inn_order} ({'holds' if formula.holds else 'FAILS'})"
        )
    else:
        lines.append(f"hypothesis fails: |Out_c(G/Z)| = {formula.quotient_outc_order}")
    if r.witness is not None:
        lines.append("")
        lines.extend(_witness_lines(r.witness))
    return "\n".join(lines) + "\n"


def _verdict_line(name: str, v: TheoremVerdict) -> str:
    camina = "n/a" if v.camina_on_nonderived is None else ("yes" if v.camina_on_nonderived else "no")
    computed = "-" if v.computed_outc_order is None else str(v.computed_outc_order)
    return (
        f"{name}: order={v.order} p={v.prime} |Z|={v.center_order} Z<G'={'yes' if v.center_lt_derived else 'no'} "
        f"cl={v.nilpotency_class} d={v.rank} camina={camina} predicted={'nontrivial' if v.predicted_nontrivial else 'trivial'} "
        f"|Out_c|={computed}"
    )


def scan_text(r: ScanReport) -> str:
    lines = [_verdict_line(rec.name, rec.verdict) for rec in r.records]
    for rec in r.records:
        if rec.verdict.witness is not None:
            lines.append(f"-- witness for {rec.name}")
            lines.extend(_witness_lines(rec.verdict.witness))
    flagged = ", ".join(r.flagged) if r.flagged else "none"
    lines.append(f"summary: {len(r.records)} groups, {len(r.flagged)} flagged ({flagged})")
    return "\n".join(lines) + "\n"


def scan_machine(r: ScanReport) -> str:
    out = [f"order={_scalar(r.order)}", f"prime={_scalar(r.prime)}", f"groups={len(r.records)}"]
    for i, rec in enumerate(r.records):
        out.append(f"record.{i}.name={rec.name}")
        out.extend(f"{k}={v}" for k, v in _flatten(f"record.{i}", rec.verdict))
    out.append(f"summary.flagged={len(r.flagged)}")
    out.append(f"summary.names={','.join(r.flagged)}")
    return "\n".join(out) + "\n"


def oracle_text(r: OracleReport) -> str:
    lines = [
        f"{rec.name}: order={rec.order} |Aut|={rec.aut_order} "
        f"filtered={rec.brute_force_aut_c} backtracking={rec.backtracking_aut_c} {'ok' if rec.match else 'MISMATCH'}"
        for rec in r.records
    ]
    lines.append(f"oracle: {len(r.records)} groups up to order {r.max_order}, {'pass' if r.passed else 'FAIL'}")
    return "\n".join(lines) + "\n"


def render(model: BaseModel, fmt: str = TEXT) -> str:
    if fmt not in (TEXT, MACHINE):
        raise ValueError(f"unknown report format {fmt!r}")
    if isinstance(model, ScanReport):
        return scan_text(model) if fmt == TEXT else scan_machine(model)
    if fmt == MACHINE:
        return to_machine(model)
    if isinstance(model, AnalysisReport):
        return analysis_text(model)
    if isinstance(model, OracleReport):
        return oracle_text(model)
    return model.model_dump_json(indent=2) + "\n"


def write_report(text: str, out: Optional[str] = None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        print(text, end="")
