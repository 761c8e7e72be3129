"""Request and response models of the solve service."""

from pydantic import BaseModel, Field

from .experiment import BUNDLED_DATASET


class SolveSettings(BaseModel):
    """Problem knobs shared by the solve endpoints."""

    dataset_path: str = BUNDLED_DATASET
    n_f: int = Field(default=576, ge=1)
    eps: float = Field(default=1e-2, gt=0.0)
    debias: bool = False
    support: str = "p"
    solver: dict = Field(default_factory=dict)
    trainer: dict = Field(default_factory=dict)


class SolvePathRequest(BaseModel):
    alpha: float = Field(gt=0.0)
    output_dir: str
    settings: SolveSettings = Field(default_factory=SolveSettings)


class RichLimitRequest(BaseModel):
    output_dir: str
    settings: SolveSettings = Field(default_factory=SolveSettings)


class KernelRequest(BaseModel):
    output_dir: str
    ridge: float = Field(default=0.0, ge=0.0)
    settings: SolveSettings = Field(default_factory=SolveSettings)


class TrainRequest(BaseModel):
    beta: float = Field(gt=0.0)
    output_dir: str
    settings: SolveSettings = Field(default_factory=SolveSettings)


class SweepRequest(BaseModel):
    config: dict


class EvalRequest(BaseModel):
    solution: str
    resolution: int = Field(default=50, ge=2)
    out: str = "surface.csv"


class CompareRequest(BaseModel):
    vp_dir: str
    gd_dir: str


class SolveResponse(BaseModel):
    objective: float
    constraint_residual: float
    iterations: int
    status: str
    output_dir: str


class KernelResponse(BaseModel):
    min_norm_value: float
    jitter: float
    output_dir: str


class TrainResponse(BaseModel):
    beta: float
    final_loss: float
    iterations: int
    output_dir: str


class SweepResponse(BaseModel):
    output_dir: str
    config_hash: str
    cells: int
    failed_cells: int


class EvalResponse(BaseModel):
    path: str
    rows: int


class CompareResponse(BaseModel):
    alpha: float
    beta: float
    vp_value: float
    gd_value: float
    gap: float
    status: str


class HealthResponse(BaseModel):
    status: str
    version: str
