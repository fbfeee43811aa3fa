from pydantic import BaseModel, Field, field_validator
from typing import List, Dict, Optional


SUITES = (
    "theta",
    "kernels",
    "algebra-rational",
    "algebra-trig",
    "elliptic-rep",
    "ktheory-degeneration",
    "pushforward",
    "lemma-integral",
    "degeneration-tower",
)


class Mismatch(BaseModel):
    z_exp: int
    w_exp: int
    p_ord: int
    lhs: str
    rhs: str


class CheckReport(BaseModel):
    suite: str
    relation: str
    level: str
    status: str  # PASS or FAIL
    first_mismatch: Optional[Mismatch] = None
    seed: Optional[int] = None
    np: int
    window: int
    rank: Optional[int] = None
    millis: int = 0
    detail: List[str] = []

    @property
    def passed(self) -> bool:
        return self.status == "PASS"


class SuiteConfig(BaseModel):
    suite: str
    np: int = Field(6, ge=0)
    window: int = Field(8, gt=0)
    rank: int = Field(2, ge=1, le=4)
    seeds: List[int] = [1, 2, 3]
    params: Optional[Dict[str, str]] = None  # explicit ParamSpec, exact rationals as text
    workers: int = 1

    @field_validator("suite")
    @classmethod
    def known_suite(cls, value: str) -> str:
        if value not in SUITES:
            raise ValueError(f"unknown suite '{value}', expected one of {', '.join(SUITES)}")
        return value


class ReportDocument(BaseModel):
    tool_version: str
    config: Dict
    reports: List[CheckReport]
    wall_millis: int = 0

    # Timing per report; zeroed by --deterministic
    timing: Dict[str, int] = {}

    @property
    def failed(self) -> int:
        return sum(1 for r in self.reports if not r.passed)
