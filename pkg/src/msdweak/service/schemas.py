"""Request/response models shared by the REST service and the CLI client."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator


class ModelSpec(BaseModel):
    """Exactly one measurement-noise parameterization."""

    beta: Optional[float] = None
    h: Optional[float] = None
    eta: Optional[float] = None
    lam: Optional[float] = Field(default=None, alias="lambda")
    kappa: Optional[float] = None

    model_config = {"populate_by_name": True}

    @model_validator(mode="after")
    def _exactly_one(self):
        given = [k for k in ("beta", "h", "eta", "lam", "kappa")
                 if getattr(self, k) is not None]
        if len(given) != 1:
            raise ValueError(
                f"exactly one of beta/h/eta/lambda/kappa must be set, got {given or 'none'}")
        return self

    @property
    def kind_value(self) -> tuple[str, float]:
        for field, kind in (("beta", "gaussian"), ("h", "h"), ("eta", "eta"),
                            ("lam", "lambda"), ("kappa", "kappa")):
            v = getattr(self, field)
            if v is not None:
                return kind, float(v)
        raise ValueError("empty model spec")


class CodeSpec(BaseModel):
    """A built-in code name or inline code-definition text."""

    name: Optional[str] = None
    text: Optional[str] = None

    @model_validator(mode="after")
    def _exactly_one(self):
        if (self.name is None) == (self.text is None):
            raise ValueError("provide exactly one of 'name' or 'text'")
        return self


class InputStateSpec(BaseModel):
    """Per-copy input state: explicit Bloch vector or depolarized target."""

    kind: Literal["bloch", "depolarized-t", "t"] = "t"
    bloch: Optional[tuple[float, float, float]] = None
    error_rate: Optional[float] = None

    @model_validator(mode="after")
    def _consistent(self):
        if self.kind == "bloch" and self.bloch is None:
            raise ValueError("kind 'bloch' requires the bloch field")
        if self.kind == "depolarized-t" and self.error_rate is None:
            raise ValueError("kind 'depolarized-t' requires error_rate")
        return self


Orientation = Literal["auto", "none", "I", "X", "Y", "Z"]


class IterateRequest(BaseModel):
    code: CodeSpec
    model: ModelSpec
    input: InputStateSpec = InputStateSpec(kind="t")
    tol: float = Field(default=1e-12, gt=0)
    max_iter: int = Field(default=100_000, ge=1)
    orientation: Orientation = "auto"


class TrajectoryResponse(BaseModel):
    code: str
    lam: float
    classification: str
    steps: int
    points: list[tuple[float, float, float]]
    success_probs: list[float]


class EvaluateRequest(BaseModel):
    code: CodeSpec
    model: ModelSpec
    input: InputStateSpec = InputStateSpec(kind="t")
    per_qubit_bloch: Optional[list[tuple[float, float, float]]] = None


class EvaluateResponse(BaseModel):
    code: str
    lam: float
    labels: list[str]
    expectations: list[float]
    success_probability: float
    marginals: list[tuple[float, float, float]]


class FlowRequest(BaseModel):
    code: CodeSpec
    model: ModelSpec
    z: float = 0.0
    extent: float = Field(default=1.0, gt=0)
    resolution: int = Field(default=21, ge=2)
    jobs: int = Field(default=1, ge=1)
    orientation: Orientation = "auto"


class FlowRow(BaseModel):
    x: float
    y: float
    z: float
    x1: float
    y1: float
    z1: float
    p_succ: float
    basin: str


class FlowResponse(BaseModel):
    code: str
    lam: float
    rows: list[FlowRow]


class ThresholdRequest(BaseModel):
    code: CodeSpec
    lo: float = 1.0
    hi: float = 2.5
    tol_beta: float = Field(default=1e-3, gt=0)
    model_kind: Literal["gaussian", "h", "eta", "lambda", "kappa"] = "gaussian"
    orientation: Orientation = "auto"


class ThresholdResponse(BaseModel):
    code: str
    model_kind: str
    beta_star: float
    lambda_star: float
    bracket: tuple[float, float]
    eigen_trace: list[tuple[float, float]]
    fixed_point_above: tuple[float, float, float]


class ScanRequest(BaseModel):
    code: CodeSpec
    betas: list[float]
    model_kind: Literal["gaussian", "h", "eta", "lambda", "kappa"] = "gaussian"
    fit: bool = False
    orientation: Orientation = "auto"

    @model_validator(mode="after")
    def _nonempty(self):
        if not self.betas:
            raise ValueError("betas must be a nonempty list")
        return self


class ScanRow(BaseModel):
    beta: float
    lam: float
    rx: float
    ry: float
    rz: float
    mx: float
    my: float
    zres: float
    k_prime: Optional[float] = None
    dom_eig: Optional[float] = None


class ScanResponse(BaseModel):
    code: str
    model_kind: str
    rows: list[ScanRow]
    slope_mx: Optional[float] = None
    slope_my: Optional[float] = None
    truncated_at: Optional[float] = None


class CostRequest(BaseModel):
    n: int
    k: int = 1
    eps_raw: float
    eps_target: float
    regime: Literal["ideal", "linear"]
    d: Optional[float] = None
    c: float = 1.0
    k_prime: Optional[float] = None


class CostResponse(BaseModel):
    regime: str
    n: int
    k: int
    eps_raw: float
    eps_target: float
    exponent: float
    levels: int
    cost: float
    levels_smooth: float
    cost_smooth: float


class StandardFormRequest(BaseModel):
    code: CodeSpec


class StandardFormResponse(BaseModel):
    code: str
    rank: int
    qubit_permutation: list[int]
    code_text: str
    destabilizers: list[str]
    destabilizer_weights: list[int]
    logical_x: list[str]
    logical_z: list[str]


class OracleCheckRequest(BaseModel):
    codes: list[str] = ["4-2-2", "5-1-3", "steane-7-1-3"]
    lambdas: list[float] = [0.0, 0.3, 0.7, 1.0]
    gaussian_beta: float = 1.5
    tolerance: float = 1e-10


class OracleCheckEntry(BaseModel):
    code: str
    model: str
    state: tuple[float, float, float]
    max_expectation_dev: float
    success_dev: float
    passed: bool


class OracleCheckResponse(BaseModel):
    passed: bool
    tolerance: float
    entries: list[OracleCheckEntry]
    lambda_interpretation: dict[str, float]
    lambda_interpretation_verdict: str


class CodeInfo(BaseModel):
    name: str
    n: int
    k: int
    convention: str


class ValidateRequest(BaseModel):
    text: str


class ValidateResponse(BaseModel):
    ok: bool
    is_css: bool
    violations: list[dict[str, str]]
    name: Optional[str] = None
