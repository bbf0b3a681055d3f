from enum import Enum
from typing import List, Optional, Tuple

from pydantic import BaseModel, Field

# ------- Structure schemas -------

class StructureReport(BaseModel):
    name: str = ""
    digest: str
    order: int = Field(..., ge=1)
    prime: Optional[int] = None  # p when the order is a prime power
    is_abelian: bool
    center: List[int]
    derived: List[int]
    lower_central: List[List[int]]  # gamma_1 = G, gamma_2 = G', ...
    frattini: List[int]
    nilpotency_class: Optional[int] = None  # None = not nilpotent
    rank_d: int = Field(..., ge=0)
    exponent: int = Field(..., ge=1)
    class_sizes: List[int]  # ordered like the classes (by smallest member)
    purely_nonabelian: bool
    direct_factor: Optional[List[int]] = None  # abelian direct factor, if any


class CaminaVerdict(BaseModel):
    subgroup: List[int]
    holds: bool
    # (x, z) with x outside H and z in H but not in [x, G]
    witness: Optional[Tuple[int, int]] = None


# ------- Automorphism schemas -------

class WitnessReport(BaseModel):
    generator_images: List[Tuple[str, str]]  # (generator word, image word)
    image: List[int]
    conjugators: Optional[List[int]] = None  # g_x with alpha(x) = g_x^-1 x g_x


class OrderFormulaReport(BaseModel):
    hypothesis_verified: bool  # Out_c(G/Z(G)) = 1
    quotient_outc_order: int = Field(..., ge=1)
    holds: Optional[bool] = None  # None when the hypothesis failed
    lhs: Optional[int] = None  # |Aut_c(G)|
    rhs: Optional[str] = None  # |Aut_c ∩ Aut_z| |Inn| / |Z(Inn)| as a fraction
    aut_c_order: int
    aut_c_cap_aut_z_order: int
    inn_order: int
    center_of_inn_order: int
    factorization_verified: Optional[bool] = None


# ------- Theorem-checker schemas -------

class TheoremVerdict(BaseModel):
    order: int
    prime: int
    center_order: int
    center_lt_derived: bool
    nilpotency_class: int
    rank: int
    camina_on_nonderived: Optional[bool] = None  # None = not evaluated
    camina_witness: Optional[Tuple[int, int]] = None
    predicted_nontrivial: bool
    computed_outc_order: Optional[int] = None  # None = not computed
    agree: Optional[bool] = None
    witness: Optional[WitnessReport] = None


class LargeCenterBranch(str, Enum):
    ABELIAN = "abelian"
    LARGE_CENTER = "large-center"
    CYCLIC_DERIVED = "cyclic-derived"
    MAXIMAL_ABELIAN = "maximal-abelian"
    CLASS_THREE_COUNTING = "class-three-counting"


class LargeCenterReport(BaseModel):
    center_order: int
    nilpotency_class: int
    derived_order: int
    branch: LargeCenterBranch
    abelian_subgroup: Optional[List[int]] = None
    aut_c_order: int
    outc_order: int


class CriteriaReport(BaseModel):
    name: str = ""
    abelian_index_p_subgroup: Optional[List[int]] = None
    class_two_cyclic_derived: bool
    outc_order: int


class ScanRecord(BaseModel):
    name: str
    verdict: TheoremVerdict


class ScanReport(BaseModel):
    order: Optional[int] = None
    prime: Optional[int] = None
    records: List[ScanRecord] = []
    flagged: List[str] = []

    @property
    def all_agree(self) -> bool:
        return all(r.verdict.agree for r in self.records)


# ------- CLI schemas -------

class AnalysisReport(BaseModel):
    name: str
    structure: StructureReport
    aut_c_order: int
    inn_order: int
    aut_z_order: Optional[int] = None  # None = above the central enumeration limit
    aut_c_cap_aut_z_order: int
    outc_order: int
    order_formula: OrderFormulaReport
    witness: Optional[WitnessReport] = None


class OracleRecord(BaseModel):
    name: str
    order: int
    aut_order: int  # |Aut(G)| from the unrestricted search
    brute_force_aut_c: int
    backtracking_aut_c: int
    match: bool


class OracleReport(BaseModel):
    max_order: int
    records: List[OracleRecord] = []

    @property
    def passed(self) -> bool:
        return all(r.match for r in self.records)


class CacheEntry(BaseModel):
    digest: str
    structure: StructureReport
    classes: List[List[int]]
