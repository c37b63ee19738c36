"""Experiment configuration: YAML in, validated pydantic model out.

Unknown keys are rejected. Validation errors carry the offending field path
and, when the document came from text, its line number.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from functools import cached_property
from typing import Literal, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..bounds import _check_delta
from ..core import NORMALIZATION_TOL, Distribution, DomainSpace, HypothesisClass, LossFunction, ZERO_ONE
from ..credal import CredalSet
from ..errors import ConfigError
from ..seeding import MASK64, SeedSpec

CLAMP_BELOW = 1e-12
ALL_TABLES_CAP = 4096

TrainingMode = Literal["fixed_vertex", "uniform_vertex", "random_mixture", "oracle_aligned", "adversarial"]
Statistic = Literal["auto", "test_risk", "excess_risk", "worst_case_risk"]
CandidateBound = Literal["auto", "realisable", "agnostic", "none"]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class DomainConfig(_Strict):
    inputs: int = Field(ge=1)
    labels: int = Field(ge=1)


class HypothesesConfig(_Strict):
    all_tables: bool = False
    cap: int = Field(default=ALL_TABLES_CAP, ge=1, le=ALL_TABLES_CAP)
    tables: Optional[list[list[int]]] = None

    @model_validator(mode="after")
    def _one_source(self):
        if self.all_tables == (self.tables is not None):
            raise ValueError("give exactly one of all_tables: true or an explicit tables list")
        if self.tables is not None and not self.tables:
            raise ValueError("tables must be non-empty")
        return self


class TrainingConfig(_Strict):
    mode: TrainingMode = "fixed_vertex"
    vertex: Optional[int] = None

    @model_validator(mode="after")
    def _vertex_only_when_fixed(self):
        if self.mode != "fixed_vertex" and self.vertex is not None:
            raise ValueError(f"vertex is only meaningful for mode fixed_vertex, not {self.mode}")
        return self


def _normalise_row(row: list[float], where: str) -> list[float]:
    out = []
    for v in row:
        if v < 0 and v < -CLAMP_BELOW:
            raise ValueError(f"{where}: negative probability {v}")
        out.append(0.0 if v < CLAMP_BELOW else float(v))
    total = sum(out)
    if abs(total - 1.0) > NORMALIZATION_TOL:
        raise ValueError(f"{where}: probability row sums to {total!r}, not 1")
    return out


class ExperimentConfig(_Strict):
    name: Optional[str] = None
    domain: DomainConfig
    hypotheses: HypothesesConfig
    distribution: Optional[list[float]] = None
    credal_set: Optional[list[list[float]]] = None
    training: Optional[TrainingConfig] = None
    n: int = Field(ge=1)
    trials: int = Field(ge=1)
    delta: float = 0.05
    eps_grid: list[float]
    loss: Literal["zero_one"] = "zero_one"
    seed: int = Field(default=0, ge=0, le=MASK64)
    statistic: Statistic = "auto"
    candidate_bound: CandidateBound = "auto"

    @field_validator("delta")
    @classmethod
    def _delta_range(cls, v):
        _check_delta(v)
        return v

    @field_validator("eps_grid")
    @classmethod
    def _grid_sorted(cls, v):
        if not v:
            raise ValueError("eps_grid must be non-empty")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("eps_grid must be sorted in strictly ascending order")
        return v

    @field_validator("distribution")
    @classmethod
    def _clean_distribution(cls, v):
        return None if v is None else _normalise_row(v, "distribution")

    @field_validator("credal_set")
    @classmethod
    def _clean_vertices(cls, v):
        if v is None:
            return None
        if not v:
            raise ValueError("credal_set needs at least one vertex")
        return [_normalise_row(row, f"vertex {k}") for k, row in enumerate(v)]

    @model_validator(mode="after")
    def _consistent(self):
        size = self.domain.inputs * self.domain.labels
        if (self.distribution is None) == (self.credal_set is None):
            raise ValueError("give exactly one of distribution (classical mode) or credal_set (credal mode)")
        rows = [self.distribution] if self.distribution is not None else self.credal_set
        for k, row in enumerate(rows):
            if len(row) != size:
                what = "distribution" if self.distribution is not None else f"vertex {k}"
                raise ValueError(f"{what} has {len(row)} entries, domain has {size} outcomes")
        if self.hypotheses.all_tables:
            count = self.domain.labels**self.domain.inputs
            if count > self.hypotheses.cap:
                raise ValueError(f"all_tables would create {count} hypotheses, above the cap of {self.hypotheses.cap}")
        else:
            for t in self.hypotheses.tables:
                if len(t) != self.domain.inputs or any(not 0 <= y < self.domain.labels for y in t):
                    raise ValueError(f"hypothesis table {t} does not fit the domain")
            if len({tuple(t) for t in self.hypotheses.tables}) != len(self.hypotheses.tables):
                raise ValueError("hypothesis tables must be pairwise distinct")
        training = self.training or TrainingConfig()
        if training.mode == "fixed_vertex" and training.vertex is not None:
            if not 0 <= training.vertex < len(rows):
                raise ValueError(f"training vertex {training.vertex} out of range (have {len(rows)} vertices)")
        if self.credal_set is None and training.mode not in ("fixed_vertex",):
            raise ValueError(f"training mode {training.mode} needs a credal_set")
        if self.credal_set is None and self.statistic == "worst_case_risk":
            raise ValueError("worst_case_risk needs a credal_set")
        return self

    @property
    def classical(self) -> bool:
        return self.credal_set is None

    @property
    def training_mode(self) -> str:
        return (self.training or TrainingConfig()).mode

    @property
    def training_vertex(self) -> int:
        t = self.training or TrainingConfig()
        return t.vertex or 0

    def resolved_statistic(self) -> str:
        if self.statistic != "auto":
            return self.statistic
        return "test_risk" if self.classical else "worst_case_risk"

    def digest(self) -> str:
        return config_digest(self)

    def build(self) -> "Instance":
        return Instance(self)


def canonical_json(cfg: ExperimentConfig) -> str:
    return json.dumps(cfg.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))


def config_digest(cfg: ExperimentConfig) -> str:
    return "sha256:" + hashlib.sha256(canonical_json(cfg).encode()).hexdigest()


@dataclass(frozen=True, eq=False)
class Instance:
    """Library objects built from a validated config."""

    config: ExperimentConfig

    @cached_property
    def domain(self) -> DomainSpace:
        return DomainSpace(self.config.domain.inputs, self.config.domain.labels)

    @cached_property
    def hypotheses(self) -> HypothesisClass:
        h = self.config.hypotheses
        if h.all_tables:
            return HypothesisClass.all_tables(self.domain, h.cap)
        return HypothesisClass.from_tables(self.domain, h.tables)

    @cached_property
    def credal_set(self) -> CredalSet:
        rows = [self.config.distribution] if self.config.classical else self.config.credal_set
        return CredalSet(tuple(Distribution(self.domain, r) for r in rows))

    @property
    def loss(self) -> LossFunction:
        return ZERO_ONE

    @property
    def seed(self) -> SeedSpec:
        return SeedSpec(self.config.seed)


def _node_line(node, loc) -> Optional[int]:
    """1-based line of the YAML node at ``loc``, or of its deepest existing ancestor."""
    line = node.start_mark.line + 1 if node is not None else None
    for key in loc:
        if isinstance(node, yaml.MappingNode):
            nxt = next((v for k, v in node.value if k.value == key), None)
            if nxt is None:
                nxt = next((k for k, _ in node.value if k.value == key), None)
        elif isinstance(node, yaml.SequenceNode) and isinstance(key, int) and key < len(node.value):
            nxt = node.value[key]
        else:
            nxt = None
        if nxt is None:
            break
        node = nxt
        line = node.start_mark.line + 1
    return line


def _validation_error(exc: ValidationError, root=None) -> ConfigError:
    err = exc.errors()[0]
    loc = tuple(err["loc"])
    field = ".".join(str(p) for p in loc) or "<document>"
    msg = err["msg"]
    if err["type"] == "extra_forbidden":
        msg = "unknown key"
    line = _node_line(root, loc) if root is not None else None
    location = f"line {line}, field {field}" if line else f"field {field}"
    extra = f" (+{len(exc.errors()) - 1} more)" if len(exc.errors()) > 1 else ""
    return ConfigError(msg + extra, location)


def parse_config(text: str) -> ExperimentConfig:
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}" if mark else None
        raise ConfigError(f"malformed document: {getattr(exc, 'problem', exc)}", where) from None
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping at the top level", "line 1")
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        raise _validation_error(exc, root) from None


def from_dict(data: dict) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        raise _validation_error(exc) from None


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def emit_config(cfg: ExperimentConfig) -> str:
    data = cfg.model_dump(mode="json", exclude_none=True, exclude_defaults=False)
    return yaml.safe_dump(data, sort_keys=False, default_flow_style=None)


def json_schema() -> dict:
    return ExperimentConfig.model_json_schema()
