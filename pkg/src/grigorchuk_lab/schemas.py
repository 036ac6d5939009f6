"""Pydantic schemas for reports, run configs and API request/response."""

from datetime import datetime
from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from grigorchuk_lab.config import settings
from grigorchuk_lab.services.measures import FrAnalysis, MixtureSampler
from grigorchuk_lab.services.subst_calculus import ExponentReportData
from grigorchuk_lab.services.verify import Check
from grigorchuk_lab.services.walk_lab import (
    GreenResult,
    GreenSumResult,
    GrowthResult,
    StabilizationResult,
    TailResult,
)

FR_REPORT_BLOCKS = 8


class ErrorResponse(BaseModel):
    """Standard error response."""

    detail: str


class FrReport(BaseModel):
    """Fr(D) scan of an omega string."""

    omega: str
    D: int = Field(ge=3)
    passed: bool
    shift: int = Field(default=0, ge=0)
    normalized: Optional[str] = None
    m: list[int] = Field(default_factory=list, description="m_k for the first blocks")
    index_points: list[int] = Field(default_factory=list, description="I_omega up to the shown blocks")
    failure_block: Optional[int] = None

    @classmethod
    def from_analysis(cls, fr: FrAnalysis, blocks: int = FR_REPORT_BLOCKS) -> "FrReport":
        if not fr.passed:
            return cls(omega=str(fr.omega), D=fr.D, passed=False, failure_block=fr.failure_block)
        return cls(
            omega=str(fr.omega),
            D=fr.D,
            passed=True,
            shift=fr.shift,
            normalized=str(fr.normalized),
            m=fr.m_values(blocks),
            index_points=fr.index_points(blocks * fr.D + fr.D),
        )


class ExponentReport(BaseModel):
    """Growth exponent alpha = q log 2 / log lambda over one period."""

    omega: str
    lam: float = Field(gt=0)
    alpha: float = Field(gt=0, le=1)
    period: int = Field(ge=1)
    tail_exponents: dict[str, float] = Field(default_factory=dict)

    @classmethod
    def from_data(cls, omega: str, data: ExponentReportData, tails: Optional[dict[str, float]] = None):
        return cls(omega=omega, lam=data.lam, alpha=data.alpha, period=data.period, tail_exponents=tails or {})


class MatrixReport(BaseModel):
    name: str
    matrix: list[list[int]]
    spectral_radius: float


class RunConfig(BaseModel):
    """Resolved parameters of one CLI run; mirrors the command-line flags."""

    model_config = ConfigDict(extra="forbid")

    command: str
    omega: str = "|012"
    D: int = Field(default=3, ge=3)
    beta: float = Field(default=0.9, gt=0, lt=1)
    A: int = Field(default=6, ge=1)
    nmax: Optional[int] = Field(default=None, ge=1)
    epsilon: float = Field(default=0.1, gt=0)
    steps: int = Field(default=1000, ge=1)
    trials: int = Field(default=10, ge=1)
    radius: int = Field(default=6, ge=0)
    seed: int = Field(default_factory=lambda: settings.default_seed)
    mode: Literal["desk", "theorem"] = "desk"
    sampler: str = "mu-beta"
    experiment: Literal["stabilization", "green", "green-sum", "tail", "trajectories"] = "stabilization"
    suite: Optional[str] = None
    targets: list[int] = Field(default_factory=lambda: [0])
    samples: int = Field(default=64, ge=0)
    out: Optional[str] = None


class CheckResult(BaseModel):
    suite: str
    name: str
    passed: bool
    detail: str = ""
    seconds: float = Field(default=0.0, ge=0)

    @classmethod
    def from_check(cls, check: Check) -> "CheckResult":
        return cls(**check._asdict())


class VerifyReport(BaseModel):
    """Pass/fail table of one suite (or of all suites)."""

    suite: str
    passed: bool
    total: int
    failed: int
    checks: list[CheckResult]

    @classmethod
    def from_checks(cls, suite: str, checks: list[Check]) -> "VerifyReport":
        failed = sum(not c.passed for c in checks)
        return cls(
            suite=suite,
            passed=failed == 0,
            total=len(checks),
            failed=failed,
            checks=[CheckResult.from_check(c) for c in checks],
        )


class TrajectorySummary(BaseModel):
    """One JSON line per simulated trajectory."""

    seed: int
    steps: int
    completed: int
    final_position: int = Field(ge=0)
    max_position: int = Field(ge=0)
    final_germ: Literal["e", "b", "c", "d"]
    flip_count: int = Field(ge=0)
    last_flip: Optional[int] = None
    truncated: bool = False


class StabilizationReport(BaseModel):
    steps: int
    trials: int
    seeds: list[int]
    checkpoints: list[int]
    fraction_flipping_after: list[float]
    histogram: dict[int, int] = Field(description="flip counts binned by bit length of the flip time")
    total_flips: int
    truncated_runs: int
    decreasing: bool

    @classmethod
    def from_result(cls, result: StabilizationResult) -> "StabilizationReport":
        return cls(
            steps=result.steps,
            trials=result.trials,
            seeds=result.seeds,
            checkpoints=result.checkpoints,
            fraction_flipping_after=result.fraction_flipping_after,
            histogram=result.histogram,
            total_flips=result.total_flips,
            truncated_runs=result.truncated_runs,
            decreasing=result.decreasing,
        )


class GreenEstimate(BaseModel):
    target: int = Field(ge=0)
    visits: int = Field(ge=0)
    trials: int = Field(ge=1)
    estimate: float = Field(ge=0)
    stderr: float = Field(ge=0)
    half_horizon_estimate: float = Field(ge=0)
    converged: bool

    @classmethod
    def from_result(cls, result: GreenResult) -> "GreenEstimate":
        return cls(**vars(result))


class GreenSumReport(BaseModel):
    radius_cap: int
    total: float = Field(ge=0)
    flattening: bool
    partial_sums: list[float]
    weights: list[float]

    @classmethod
    def from_result(cls, result: GreenSumResult) -> "GreenSumReport":
        return cls(
            radius_cap=result.radius_cap,
            total=result.total,
            flattening=result.flattening,
            partial_sums=result.partial_sums,
            weights=result.weights,
        )


class GrowthTable(BaseModel):
    omega: str
    radii: list[int]
    sizes: list[int]
    exponent_estimates: dict[int, float]

    @classmethod
    def from_result(cls, result: GrowthResult) -> "GrowthTable":
        return cls(
            omega=str(result.omega),
            radii=result.radii,
            sizes=result.sizes,
            exponent_estimates=result.exponent_estimates,
        )


class TailReport(BaseModel):
    trials: int
    grid: list[float]
    tail: list[float]
    rho: dict[int, float]
    phi: dict[int, float]
    R: dict[int, float]
    volume_lower_curve: list[tuple[float, int]]
    envelope_constant: Optional[float] = None
    max_length: float = 0.0
    mean_length: float = 0.0

    @classmethod
    def from_result(cls, result: TailResult) -> "TailReport":
        return cls(
            trials=result.trials,
            grid=result.grid,
            tail=result.tail,
            rho=result.rho,
            phi=result.phi,
            R=result.R,
            volume_lower_curve=result.volume_lower_curve,
            envelope_constant=result.envelope_constant,
            max_length=result.max_length,
            mean_length=result.mean_length,
        )


class SamplerSpec(BaseModel):
    """Resolved description of a mixture sampler."""

    name: str
    seed: int
    weights: dict[str, float]
    symmetric: bool
    entropy_proxy: float
    spec: dict[str, Any]
    flags: dict[str, Any] = Field(default_factory=dict)

    @classmethod
    def from_sampler(cls, sampler: MixtureSampler) -> "SamplerSpec":
        return cls(
            name=sampler.name,
            seed=sampler.seed,
            weights=sampler.weight_table(),
            symmetric=sampler.is_symmetric,
            entropy_proxy=sampler.entropy_proxy(),
            spec=sampler.spec,
            flags=sampler.flags,
        )


class AnalyzeRequest(BaseModel):
    """Request for the omega analysis."""

    omega: str = Field(min_length=1, max_length=256, description="preperiod|period over 012")
    D: int = Field(default=3, ge=3, le=64)


class AnalyzeResponse(BaseModel):
    fr: FrReport
    exponent: Optional[ExponentReport] = None
    volume_exponent: Optional[float] = Field(default=None, gt=0)
    code: Optional[str] = None


class RunResponse(BaseModel):
    """A ledger row."""

    code: str = Field(min_length=6, max_length=6)
    command: str
    omega: Optional[str]
    seed: Optional[int]
    status: str
    config: dict[str, Any]
    result: Any
    created_at: datetime
