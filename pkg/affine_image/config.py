"""Configuration management for the affine-image engine and CLI."""

import os
from typing import Optional

from pydantic import BaseModel, Field, field_validator

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


class EngineConfig(BaseModel):
    """Image-algorithm configuration."""

    jobs: int = Field(default=1, description="Worker threads for chart eliminations")
    slice_retries: int = Field(
        default=8, description="Random slices tried before giving up"
    )
    slice_coefficient_bound: int = Field(
        default=20, description="Slice coefficients are drawn from [-bound, bound]"
    )
    round_limit_extra: int = Field(
        default=2, description="Rounds allowed beyond the domain dimension"
    )

    @field_validator("jobs")
    @classmethod
    def jobs_valid(cls, v):
        if v < 1:
            raise ValueError("Jobs must be at least 1")
        return v

    @field_validator("slice_retries")
    @classmethod
    def slice_retries_valid(cls, v):
        if v < 1:
            raise ValueError("Slice retries must be at least 1")
        return v

    @field_validator("slice_coefficient_bound")
    @classmethod
    def slice_coefficient_bound_valid(cls, v):
        if v < 1:
            raise ValueError("Slice coefficient bound must be at least 1")
        return v

    @field_validator("round_limit_extra")
    @classmethod
    def round_limit_extra_valid(cls, v):
        if v < 0:
            raise ValueError("Round limit extra must be >= 0")
        return v


class SamplingConfig(BaseModel):
    """Fiber-sampling configuration for certificates."""

    samples: int = Field(default=10, description="Points sampled off the target")
    on_target_samples: Optional[int] = Field(
        default=None, description="Points sampled on the target; defaults to samples"
    )
    coordinate_bound: int = Field(
        default=5, description="Sample coordinates are drawn from [-bound, bound]"
    )
    on_target_attempts: int = Field(
        default=400, description="Grid draws tried when searching points on the target"
    )

    @field_validator("samples", "on_target_samples")
    @classmethod
    def samples_valid(cls, v):
        if v is not None and v < 0:
            raise ValueError("Samples must be >= 0")
        return v

    @field_validator("coordinate_bound", "on_target_attempts")
    @classmethod
    def positive(cls, v):
        if v < 1:
            raise ValueError("Bounds and attempt counts must be at least 1")
        return v


class BuilderConfig(BaseModel):
    """Surjection-construction configuration."""

    change_coefficient_bound: int = Field(
        default=10,
        description="Linear-change coefficients are drawn from [-bound, bound]",
    )
    change_retries: int = Field(
        default=16, description="Coordinate changes tried before giving up"
    )

    @field_validator("change_coefficient_bound", "change_retries")
    @classmethod
    def positive(cls, v):
        if v < 1:
            raise ValueError("Bounds and retry counts must be at least 1")
        return v


class Config(BaseModel):
    """Main application configuration."""

    engine: EngineConfig = Field(default_factory=EngineConfig)
    sampling: SamplingConfig = Field(default_factory=SamplingConfig)
    builder: BuilderConfig = Field(default_factory=BuilderConfig)
    seed: int = Field(default=0, description="Seed for every random choice")
    log_level: str = Field(default="WARNING", description="Logging level")

    @field_validator("log_level")
    @classmethod
    def log_level_valid(cls, v):
        v = v.upper()
        if v not in LOG_LEVELS:
            raise ValueError(f"Log level must be one of {', '.join(LOG_LEVELS)}")
        return v

    @classmethod
    def from_env(cls) -> "Config":
        """Create configuration from environment variables."""
        return cls(
            engine=EngineConfig(
                jobs=int(os.getenv("AFFINE_IMAGE_JOBS", "1")),
                slice_retries=int(os.getenv("AFFINE_IMAGE_SLICE_RETRIES", "8")),
            ),
            sampling=SamplingConfig(
                samples=int(os.getenv("AFFINE_IMAGE_SAMPLES", "10")),
            ),
            seed=int(os.getenv("AFFINE_IMAGE_SEED", "0")),
            log_level=os.getenv("AFFINE_IMAGE_LOG_LEVEL", "WARNING"),
        )

    def with_overrides(
        self,
        seed: Optional[int] = None,
        samples: Optional[int] = None,
        jobs: Optional[int] = None,
        log_level: Optional[str] = None,
    ) -> "Config":
        """Copy with command-line values applied over the current ones."""
        data = self.model_dump()
        if seed is not None:
            data["seed"] = seed
        if samples is not None:
            data["sampling"]["samples"] = samples
        if jobs is not None:
            data["engine"]["jobs"] = jobs
        if log_level is not None:
            data["log_level"] = log_level
        return Config.model_validate(data)
