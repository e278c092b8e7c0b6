"""
Report and request models shared by the CLI, the batch runner and the HTTP
routes.
"""

from enum import Enum
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from config import settings


class Verdict(str, Enum):
    """Outcome of a single command"""

    PASS = "pass"
    FAIL = "fail"


class Witness(BaseModel):
    """First test tuple on which an identity failed"""

    arguments: List[str] = Field(..., description="Canonical strings of the arguments")
    value: str = Field(..., description="Nonzero value (or residual) found on them")
    extra: Dict[str, str] = Field(default_factory=dict)


class JacobiReport(BaseModel):
    """
    Result of evaluating an identity over a finite test space.

    ``soundness_bound`` is the per-slot degree at which agreement of the
    bounded-order operators involved amounts to a proof; ``degree_bound`` is
    the degree actually used by the test space.
    """

    schema_version: str = Field(default_factory=lambda: settings.REPORT_SCHEMA_VERSION)
    identity: str
    operators: List[str]
    n: int
    degree_bound: int
    soundness_bound: int
    basis_size: int
    arity: int
    tuples_total: int
    tuples_checked: int
    unshuffles_per_tuple: int = 0
    passed: bool
    vacuous: bool = False
    certifying: bool = True
    witness: Optional[Witness] = None
    parameters: Dict[str, Any] = Field(default_factory=dict)
    notes: List[str] = Field(default_factory=list)
    seed: Optional[int] = None

    @model_validator(mode="after")
    def verdict_matches_witness(self):
        if self.passed == (self.witness is not None):
            raise ValueError("A report passes exactly when it carries no witness")
        return self

    @property
    def verdict(self) -> Verdict:
        return Verdict.PASS if self.passed else Verdict.FAIL


class ValueReport(BaseModel):
    """A computed value (bracket, constant, rank table) with its parameters"""

    schema_version: str = Field(default_factory=lambda: settings.REPORT_SCHEMA_VERSION)
    command: str
    result: Any
    passed: bool = True
    certificate_degree: Optional[int] = None
    parameters: Dict[str, Any] = Field(default_factory=dict)
    notes: List[str] = Field(default_factory=list)
    witness: Optional[Witness] = None


class RunConfig(BaseModel):
    """One CLI / HTTP invocation"""

    command: str = Field(..., description="Subcommand name, e.g. 'jacobi'")
    op: Optional[str] = None
    op2: Optional[str] = None
    ops: Optional[str] = None
    args: Optional[str] = None
    base: Optional[str] = None
    indices: Optional[str] = None
    exponents: Optional[str] = None
    algebra: Optional[str] = None
    check: Optional[str] = None
    y: Optional[str] = None
    phis: Optional[str] = None
    n: Optional[int] = None
    k: Optional[int] = None
    k_in: Optional[int] = None
    k_out: Optional[int] = None
    N: Optional[int] = None
    p: Optional[int] = None
    r: Optional[int] = None
    deg: Optional[int] = None
    truncation: Optional[int] = None
    weight_shift: int = 0
    seed: Optional[int] = None
    budget: Optional[int] = None
    sample: Optional[int] = None
    format: Literal["json", "text"] = Field(default_factory=lambda: settings.OUTPUT_FORMAT)

    @field_validator("budget")
    @classmethod
    def budget_positive(cls, value):
        if value is not None and value <= 0:
            raise ValueError("budget must be positive")
        return value

    @field_validator("sample")
    @classmethod
    def sample_positive(cls, value):
        if value is not None and value <= 0:
            raise ValueError("sample size must be positive")
        return value

    @property
    def certifying(self) -> bool:
        return self.sample is None

    class Config:
        json_schema_extra = {
            "example": {
                "command": "jacobi",
                "op": "W[0,1,2]",
                "deg": 6,
                "format": "json",
            }
        }


class RunResult(BaseModel):
    """Exit status plus the report emitted for one RunConfig"""

    exit_code: int
    report: Dict[str, Any] = Field(default_factory=dict)
    error: Optional[str] = None


class BatchEntry(BaseModel):
    name: str
    argv: List[str]
    expect: Verdict = Verdict.PASS


class BatchOutcome(BaseModel):
    name: str
    exit_code: int
    expected: Verdict
    ok: bool
    error: Optional[str] = None


class BatchSummary(BaseModel):
    schema_version: str = Field(default_factory=lambda: settings.REPORT_SCHEMA_VERSION)
    total: int
    ok: int
    failed: int
    expected_failures_matched: int
    results: List[BatchOutcome] = Field(default_factory=list)
    warnings: List[str] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failed == 0
