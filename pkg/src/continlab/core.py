"""Verdicts, witnesses, configuration and seeded randomness shared by every checker."""
from __future__ import annotations

import dataclasses
import enum
import zlib
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

SCHEMA = "continlab/1"


class Verdict(str, enum.Enum):
    HOLDS = "Holds"
    FAILS = "Fails"
    UNRESOLVED = "Unresolved"

    @property
    def decisive(self) -> bool:
        return self is not Verdict.UNRESOLVED


class Reason(str, enum.Enum):
    """Why a check came back Unresolved."""

    INSUFFICIENT_SAMPLES = "insufficient-samples"
    TOLERANCE_AMBIGUITY = "tolerance-ambiguity"
    ORACLE_TIMEOUT = "oracle-timeout"
    PRECONDITION = "precondition"


class Robustness(str, enum.Enum):
    RAW_GRID = "RawGrid"
    SURVIVED_REFINEMENT = "SurvivedRefinement"


class UnresolvedError(RuntimeError):
    """Raised by geometric searches that exhaust their budget."""

    def __init__(self, message: str, reason: Reason = Reason.INSUFFICIENT_SAMPLES):
        super().__init__(message)
        self.reason = reason


def _as_point(p) -> tuple[float, ...]:
    return tuple(float(v) for v in np.asarray(p, dtype=float).ravel())


@dataclass(frozen=True)
class Witness:
    points: tuple[tuple[float, ...], ...]
    scalars: tuple[float, ...] = ()
    description: str = ""
    robustness: Robustness = Robustness.SURVIVED_REFINEMENT

    @classmethod
    def make(cls, points: Iterable, scalars: Iterable = (), description: str = "",
             robustness: Robustness = Robustness.SURVIVED_REFINEMENT) -> "Witness":
        return cls(tuple(_as_point(p) for p in points),
                   tuple(float(s) for s in scalars), description, robustness)

    def to_dict(self) -> dict:
        return {
            "points": [list(p) for p in self.points],
            "scalars": list(self.scalars),
            "description": self.description,
            "robustness": self.robustness.value,
        }


@dataclass(frozen=True)
class CheckConfig:
    """Knobs for every sampled check.

    ``continuity_modulus_budget`` is the oscillation a candidate point must
    keep at the finest probed scale before it counts as a discontinuity;
    ``oscillation_ratio`` is the contraction threshold between successive
    halvings of the probe radius.
    """

    cmp_tolerance: float = 1e-9
    grid_resolution: int = 201
    lambda_resolution: int = 501
    sample_count: int = 500
    seed: int = 42
    refinement_rounds: int = 1
    continuity_modulus_budget: float = 1e-3
    oscillation_ratio: float = 0.9
    density_pattern: str = "between"

    def __post_init__(self):
        if not self.cmp_tolerance > 0:
            raise ValueError("cmp_tolerance must be positive")
        if self.grid_resolution < 3:
            raise ValueError("grid_resolution must be at least 3")
        if self.lambda_resolution < 3:
            raise ValueError("lambda_resolution must be at least 3")
        if self.sample_count < 1:
            raise ValueError("sample_count must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")
        if self.refinement_rounds < 1:
            raise ValueError("refinement_rounds must be at least 1")
        if not self.continuity_modulus_budget > 0:
            raise ValueError("continuity_modulus_budget must be positive")
        if not 0 < self.oscillation_ratio < 1:
            raise ValueError("oscillation_ratio must lie in (0, 1)")
        if self.density_pattern not in ("printed", "between"):
            raise ValueError("density_pattern must be 'printed' or 'between'")

    def refined(self) -> "CheckConfig":
        """The same config with grid and lambda resolutions doubled."""
        return dataclasses.replace(
            self,
            grid_resolution=2 * self.grid_resolution - 1,
            lambda_resolution=2 * self.lambda_resolution - 1,
        )

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "CheckConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        return cls(**data)


@dataclass(frozen=True)
class PropertyReport:
    property_id: str
    verdict: Verdict
    witnesses: tuple[Witness, ...] = ()
    samples_used: int = 0
    config_echo: CheckConfig = field(default_factory=CheckConfig)
    notes: str = ""
    reason: Reason | None = None

    def __post_init__(self):
        if self.verdict is Verdict.FAILS and not self.witnesses:
            raise ValueError(f"{self.property_id}: Fails needs a witness")
        if self.verdict is Verdict.HOLDS and self.witnesses:
            raise ValueError(f"{self.property_id}: Holds cannot carry witnesses")
        if self.verdict is Verdict.UNRESOLVED and self.reason is None:
            object.__setattr__(self, "reason", Reason.INSUFFICIENT_SAMPLES)

    @property
    def robust_failure(self) -> bool:
        return self.verdict is Verdict.FAILS and any(
            w.robustness is Robustness.SURVIVED_REFINEMENT for w in self.witnesses)

    def renamed(self, property_id: str) -> "PropertyReport":
        return dataclasses.replace(self, property_id=property_id)

    def to_dict(self) -> dict:
        return {
            "property_id": self.property_id,
            "verdict": self.verdict.value,
            "reason": self.reason.value if self.reason else None,
            "witnesses": [w.to_dict() for w in self.witnesses],
            "samples_used": self.samples_used,
            "notes": self.notes,
            "config": self.config_echo.to_dict(),
        }


def holds(pid: str, cfg: CheckConfig, samples: int, notes: str = "") -> PropertyReport:
    return PropertyReport(pid, Verdict.HOLDS, (), int(samples), cfg, notes)


def fails(pid: str, cfg: CheckConfig, samples: int, witnesses: Sequence[Witness],
          notes: str = "") -> PropertyReport:
    return PropertyReport(pid, Verdict.FAILS, tuple(witnesses), int(samples), cfg, notes)


def unresolved(pid: str, cfg: CheckConfig, samples: int, reason: Reason,
               notes: str = "") -> PropertyReport:
    return PropertyReport(pid, Verdict.UNRESOLVED, (), int(samples), cfg, notes, reason)


def combine(pid: str, cfg: CheckConfig, parts: Sequence[PropertyReport],
            notes: str = "") -> PropertyReport:
    """Conjunction of sub-reports: any Fails wins, then any Unresolved."""
    samples = sum(p.samples_used for p in parts)
    failed = [p for p in parts if p.verdict is Verdict.FAILS]
    sub = "; ".join(f"{p.property_id}={p.verdict.value}" for p in parts)
    text = f"{notes}; {sub}" if notes else sub
    if failed:
        return fails(pid, cfg, samples, [w for p in failed for w in p.witnesses], text)
    pending = [p for p in parts if p.verdict is Verdict.UNRESOLVED]
    if pending:
        return unresolved(pid, cfg, samples, pending[0].reason or Reason.INSUFFICIENT_SAMPLES, text)
    return holds(pid, cfg, samples, text)


MIN_LAMBDA = 17


def lambda_floor(rep: PropertyReport) -> PropertyReport:
    """Downgrade a Holds reached on a λ-grid too coarse to count as evidence."""
    cfg = rep.config_echo
    if rep.verdict is Verdict.HOLDS and cfg.lambda_resolution < MIN_LAMBDA:
        return unresolved(rep.property_id, cfg, rep.samples_used, Reason.INSUFFICIENT_SAMPLES,
                          f"lambda grid of {cfg.lambda_resolution} points is below {MIN_LAMBDA}")
    return rep


def stream_key(property_id: str) -> int:
    return zlib.crc32(property_id.encode("utf-8"))


def rng_for(cfg: CheckConfig, property_id: str, index: int = 0) -> np.random.Generator:
    """Independent generator for one (check, sample block) pair.

    Streams are keyed by the root seed, a stable hash of the property id and
    the sample index, so checks give the same draws in any execution order.
    """
    seq = np.random.SeedSequence([cfg.seed & 0xFFFFFFFF, cfg.seed >> 32,
                                  stream_key(property_id), int(index)])
    return np.random.default_rng(seq)


def jsonable(obj: Any) -> Any:
    """Recursively convert numpy scalars/arrays and enums for json.dumps."""
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    return obj
