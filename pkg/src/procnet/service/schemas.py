"""Request and response bodies for the benchmark service.

The report fields mirror bench.RunReport one-to-one so JSON payloads from
the service round-trip through the same serializers the CLI uses.
"""

from pydantic import BaseModel, Field

from ..runtime import DEFAULT_MAX_CYCLES
from ..words import DEFAULT_WIDTH

Dims = tuple[int, int, int]


class JobRequest(BaseModel):
    """Common knobs for run, compare and sweep-k."""

    designs: list[str] = Field(min_length=1)
    dims: list[Dims] = Field(min_length=1)
    seed: int = 42
    width: int = DEFAULT_WIDTH
    max_cycles: int = DEFAULT_MAX_CYCLES
    small_values: bool = False


class RunReportModel(BaseModel):
    design: str
    dims: Dims
    cycles: int
    communications: int
    process_count: int
    channel_count: int
    items_out: int
    throughput_items_per_cycle: float | None
    verified: bool
    warnings: list[str]


class RunResponse(BaseModel):
    reports: list[RunReportModel]
    exit_code: int


class FitModel(BaseModel):
    slope: float
    intercept: float
    max_abs_residual: float


class SweepSeriesModel(BaseModel):
    design: str
    n: int
    m: int
    ks: list[int]
    cycles: list[int]
    process_count: int
    channel_count: int
    counts_constant: bool
    verified: bool
    ran_clean: bool
    warnings: list[str]
    fit: FitModel | None
    affine: bool


class SweepResponse(BaseModel):
    series: list[SweepSeriesModel]
    exit_code: int


class DesignInfo(BaseModel):
    id: str
    label: str
    k_independent: bool


class HealthResponse(BaseModel):
    status: str
    version: str
