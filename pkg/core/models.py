from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, Field, model_validator


class FamilyRole(str, Enum):
    FIBONACCI = "F"
    LUCAS = "L"
    LUCAS_U = "U"
    LUCAS_V = "V"
    GIBONACCI = "gibonacci"
    HORADAM = "horadam"


class Component(str, Enum):
    REAL = "real"
    IMAG = "imag"


class OutputFormat(str, Enum):
    TEXT = "text"
    JSON = "json"


class CheckMode(str, Enum):
    PROVE = "prove"
    VERIFY = "verify"
    NUMERIC = "numeric"


class Verdict(str, Enum):
    PROVED = "proved"
    REFUTED = "refuted"
    PASSED = "passed"
    FAILED = "failed"
    ERROR = "error"


class EntryKind(str, Enum):
    IDENTITY = "identity"
    DERIVATION = "derivation"
    DERIVATIVE_RULES = "derivative-rules"


class FamilyDecl(BaseModel):
    name: str = ""
    role: FamilyRole
    p: int = 1
    q: int = -1
    seeds: Optional[Tuple[int, int]] = None


class Counterexample(BaseModel):
    point: Dict[str, int]
    lhs: str
    rhs: str
    note: Optional[str] = None


class SkippedPoint(BaseModel):
    point: Dict[str, int]
    reason: str


class VerifyReport(BaseModel):
    identity_id: str = ""
    identity: str
    mode: str = "exact"
    grid: Dict[str, Tuple[int, int]] = {}
    parameters: Dict[str, str] = {}
    cases: int = 0
    passed: int = 0
    failed: int = 0
    skipped: int = 0
    skipped_points: List[SkippedPoint] = []
    counterexample: Optional[Counterexample] = None
    elapsed_ms: float = 0.0

    @property
    def ok(self) -> bool:
        return self.failed == 0 and self.passed > 0


class ParityCase(BaseModel):
    signs: Dict[str, int]
    zero: bool
    residue: str


class ProofVerdict(BaseModel):
    identity_id: str = ""
    identity: str
    verdict: Verdict
    parameters: Dict[str, str] = {}
    cases: List[ParityCase] = []
    side_conditions: List[str] = []
    elapsed_ms: float = 0.0

    @property
    def proved(self) -> bool:
        return self.verdict == Verdict.PROVED


class TraceStep(BaseModel):
    step: str
    output: str


class CheckOutcome(BaseModel):
    mode: CheckMode
    ok: bool
    verdict: Optional[ProofVerdict] = None
    report: Optional[VerifyReport] = None
    note: Optional[str] = None


class DerivationTrace(BaseModel):
    source: str
    wrt: str
    component: Component
    shift: Optional[str] = None
    pivot: Optional[str] = None
    combine: Optional[str] = None
    simplify: bool = False
    parameters: Dict[str, str] = {}
    steps: List[TraceStep] = []
    result: str = ""
    check: Optional[CheckOutcome] = None


class RunConfig(BaseModel):
    """Everything a CLI command needs, validated once at the boundary"""

    command: str
    identity: Optional[str] = None
    input_path: Optional[Path] = None
    wrt: Optional[str] = None
    component: Component = Component.REAL
    shift: Optional[str] = None
    pivot: Optional[str] = None
    combine: Optional[str] = None
    simplify: bool = False
    grid: Dict[str, Tuple[int, int]] = {}
    p: int = 1
    q: int = -1
    precision: int = 30
    output_format: OutputFormat = OutputFormat.TEXT
    tags: List[str] = []
    seeds: Dict[str, int] = {}
    corpus_dir: Optional[Path] = None

    @model_validator(mode="after")
    def check_command_requirements(self):
        if self.command == "derive" and not self.wrt:
            raise ValueError("derive requires --wrt")
        if self.command == "derive" and self.component == Component.IMAG and self.q >= 0:
            raise ValueError("the imaginary component requires q < 0")
        if self.command != "corpus" and self.identity is None and self.input_path is None:
            raise ValueError(f"{self.command} requires an identity or --input file")
        return self


class DerivationSpec(BaseModel):
    source: str
    wrt: str
    component: Component = Component.REAL
    shift: Optional[str] = None
    pivot: Optional[str] = None
    combine: Optional[str] = None
    target: Optional[str] = None


class ParameterSample(BaseModel):
    p: int
    q: int


class CorpusEntry(BaseModel):
    id: str
    source: str = ""
    kind: EntryKind = EntryKind.IDENTITY
    identity: Optional[str] = None
    family: Optional[str] = None
    constraints: List[str] = []
    tags: List[str] = []
    grid: Dict[str, Tuple[int, int]] = {}
    samples: List[ParameterSample] = []
    seeds: Dict[str, int] = {}
    precision: Optional[int] = None
    derivation: Optional[DerivationSpec] = None

    @property
    def mode(self) -> CheckMode:
        for mode in (CheckMode.NUMERIC, CheckMode.PROVE, CheckMode.VERIFY):
            if mode.value in self.tags:
                return mode
        return CheckMode.VERIFY

    @model_validator(mode="after")
    def check_kind_fields(self):
        if self.kind == EntryKind.IDENTITY and not self.identity:
            raise ValueError(f"entry {self.id}: identity entries need an identity")
        if self.kind == EntryKind.DERIVATION and self.derivation is None:
            raise ValueError(f"entry {self.id}: derivation entries need a derivation table")
        if self.kind == EntryKind.DERIVATIVE_RULES and not self.family:
            raise ValueError(f"entry {self.id}: derivative-rule entries need a family")
        return self


class CorpusFile(BaseModel):
    path: str = ""
    families: Dict[str, FamilyDecl] = {}
    entries: List[CorpusEntry] = Field(default=[], alias="entry")

    model_config = {"populate_by_name": True}


class ParsedIdentity(BaseModel):
    identity: str
    lhs: str
    rhs: str
    free_indices: List[str] = []
    constraints: List[str] = []
    families: List[str] = []


class EntryResult(BaseModel):
    id: str
    file: str = ""
    mode: CheckMode
    status: Verdict
    notes: List[str] = []
    verdicts: List[ProofVerdict] = []
    reports: List[VerifyReport] = []
    derived: Optional[str] = None
    error: Optional[str] = None
    elapsed_ms: float = 0.0

    @property
    def ok(self) -> bool:
        return self.status in (Verdict.PROVED, Verdict.PASSED)


class CorpusSummary(BaseModel):
    entries: List[EntryResult] = []
    total: int = 0
    passed: int = 0
    failed: int = 0
    elapsed_ms: float = 0.0

    @property
    def ok(self) -> bool:
        return self.failed == 0 and self.total > 0
