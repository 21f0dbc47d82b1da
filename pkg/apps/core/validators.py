"""
Pydantic schemas for command options and experiment configuration.

This module validates every structured option object before heavy work
starts, so bad flags or config files fail fast as usage errors.
"""

from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from apps.core.presets import DESK, DESK_EXPERIMENT, WORKLOAD_DEFAULTS


# =============================================================================
# CLI - options shared by every subcommand
# =============================================================================

class GlobalOptions(BaseModel):
    """Options accepted by every subcommand."""
    model_config = ConfigDict(extra="forbid")

    threads: int = Field(default=0, ge=0, description="Worker count, 0 = all cores")
    seed: int = Field(default=0, description="Root seed for all randomness")
    log_level: Optional[Literal["DEBUG", "INFO", "WARNING", "ERROR"]] = Field(
        None,
        description="Override for the 'apps' logger level"
    )
    output_format: Literal["csv", "json"] = Field(default="csv")

    @field_validator("log_level", mode="before")
    @classmethod
    def normalize_level(cls, v):
        """Accept lower-case level names."""
        return v.upper() if isinstance(v, str) else v


# =============================================================================
# WORKLOAD APP - generation settings
# =============================================================================

class WorkloadSpec(BaseModel):
    """
    Target shape of an unbiased workload.

    Q queries are drawn from h equal-length hardness segments after
    trimming the [trim_lo, trim_hi] quantile tails.
    """
    model_config = ConfigDict(extra="forbid")

    Q: int = Field(..., ge=1, description="Target query count")
    h: int = Field(..., ge=1, description="Number of hardness segments")
    trim_lo: float = Field(default=WORKLOAD_DEFAULTS["trim_lo"], ge=0.0, le=1.0)
    trim_hi: float = Field(default=WORKLOAD_DEFAULTS["trim_hi"], ge=0.0, le=1.0)
    seed: int = 0

    @model_validator(mode="after")
    def validate_ranges(self) -> "WorkloadSpec":
        """Q must cover every segment and the trim window must be non-empty."""
        if self.h > self.Q:
            raise ValueError("Q must be at least h")
        if not self.trim_lo < self.trim_hi:
            raise ValueError("trim_lo must be smaller than trim_hi")
        return self

    @property
    def per_segment(self) -> int:
        return -(-self.Q // self.h)


class GmmSettings(BaseModel):
    """Diagonal Gaussian mixture fitting knobs."""
    model_config = ConfigDict(extra="forbid")

    n_components: int = Field(default=WORKLOAD_DEFAULTS["components"], ge=1)
    max_iter: int = Field(default=WORKLOAD_DEFAULTS["max_iter"], ge=1)
    tol: float = Field(default=WORKLOAD_DEFAULTS["tol"], gt=0.0)
    variance_floor: float = Field(default=WORKLOAD_DEFAULTS["variance_floor"], gt=0.0)
    seed: int = 0


# =============================================================================
# EVALHARNESS APP - experiment configuration (flat TOML document)
# =============================================================================

HARDNESS_MEASURES = ("steiner", "lid", "rc", "qe", "eps")


class ExperimentConfig(BaseModel):
    """
    Configuration of one correlation experiment.

    Example (exp.toml):
        base = "data/base.fvecs"
        queries = "data/query.fvecs"
        index = "hnsw"
        instances = 3
        recall_targets = [0.9]
    """
    model_config = ConfigDict(extra="forbid")

    # Data: explicit files, or a synthetic Gaussian set when both are absent
    base: Optional[Path] = None
    queries: Optional[Path] = None
    normalize: bool = False
    synthetic_count: int = Field(default=DESK_EXPERIMENT["count"], ge=2)
    synthetic_dim: int = Field(default=DESK_EXPERIMENT["dim"], ge=1)
    synthetic_queries: int = Field(default=DESK_EXPERIMENT["queries"], ge=1)

    # Index under evaluation
    index: Literal["hnsw", "kgraph", "mrng"] = "hnsw"
    M: int = Field(default=DESK_EXPERIMENT["M"], ge=2)
    ef_construction: int = Field(default=DESK_EXPERIMENT["ef_construction"], ge=1)
    K: int = Field(default=DESK["k"] * 2, ge=1)
    index_efc: int = Field(default=DESK["efc"], ge=1)
    instances: int = Field(default=DESK_EXPERIMENT["instances"], ge=1)
    seed: int = 0

    # Effort measurement
    k: int = Field(default=DESK["k"], ge=1)
    recall_targets: list[float] = Field(
        default_factory=lambda: list(DESK_EXPERIMENT["recall_targets"])
    )
    entry: Literal["fixed", "random"] = "fixed"
    repeats: int = Field(default=1, ge=1)

    # Hardness
    measures: list[str] = Field(default_factory=lambda: list(HARDNESS_MEASURES))
    acc: float = Field(default=DESK["acc"], gt=0.0, le=1.0)
    p: float = Field(default=DESK["p"], gt=0.0, le=1.0)
    efc: int = Field(default=DESK["efc"], ge=1)
    eps: float = Field(default=DESK["eps"], ge=0.0)

    @field_validator("recall_targets")
    @classmethod
    def validate_targets(cls, v: list[float]) -> list[float]:
        """Recall targets must lie in (0, 1]."""
        if not v:
            raise ValueError("At least one recall target is required")
        for target in v:
            if not 0.0 < target <= 1.0:
                raise ValueError(f"Recall target {target} outside (0, 1]")
        return sorted(set(v))

    @field_validator("measures")
    @classmethod
    def validate_measures(cls, v: list[str]) -> list[str]:
        """Only known hardness measures are allowed."""
        unknown = sorted(set(v) - set(HARDNESS_MEASURES))
        if unknown:
            raise ValueError(f"Unknown hardness measures: {', '.join(unknown)}")
        return [m for m in HARDNESS_MEASURES if m in v]

    @model_validator(mode="after")
    def validate_data_source(self) -> "ExperimentConfig":
        """Base and query files come together or not at all."""
        if (self.base is None) != (self.queries is None):
            raise ValueError("base and queries must be given together")
        return self
