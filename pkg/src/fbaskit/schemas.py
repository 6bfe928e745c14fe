"""Pydantic request/response models for the HTTP service and the CLI client."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field


class QuorumSetModel(BaseModel):
    threshold: int = 0
    validators: list[str] = Field(default_factory=list)
    innerQuorumSets: list["QuorumSetModel"] = Field(default_factory=list)


class NodeModel(BaseModel):
    publicKey: str
    quorumSet: QuorumSetModel | None = None


class OrganizationModel(BaseModel):
    id: str = ""
    name: str | None = None
    validators: list[str] = Field(default_factory=list)


class AnalysisOptions(BaseModel):
    intersection_algo: Literal["pairwise", "complement"] = "complement"
    symmetric_shortcuts: bool = True
    abort_above: int | None = 40


class AnalyzeRequest(AnalysisOptions):
    nodes: list[NodeModel]
    organizations: list[OrganizationModel] | None = None
    merge_by_org: bool = False


class FamilyModel(BaseModel):
    sets: list[list[str]]
    count: int
    histogram: dict[str, int]
    min_cardinality: int | None
    max_cardinality: int | None
    mean_cardinality: float | None


class AnalysisResponse(BaseModel):
    has_quorum_intersection: bool
    no_quorums_warning: bool
    top_tier: list[str]
    top_tier_size: int
    minimal_quorums: FamilyModel
    minimal_blocking_sets: FamilyModel
    minimal_splitting_sets: FamilyModel


class GraphEdgeModel(BaseModel):
    source: int
    target: int


class TrustGraphModel(BaseModel):
    node_count: int
    edges: list[GraphEdgeModel]
    names: list[str] | None = None


class SimulateRequest(AnalysisOptions):
    policy: Literal["super-safe", "ideal-open", "all-neighbors", "higher-tier"]
    tier_ratio: float = 2.0
    graph: TrustGraphModel | None = None
    as_rel_text: str | None = None
    direction_rule: Literal["both", "customer-to-provider"] = "both"
    seed: int | None = None


class GenerateRequest(BaseModel):
    topology: Literal["flat", "stellar-like"]
    size: int
    seed: int | None = None


class GenerateResponse(BaseModel):
    nodes: list[NodeModel]


class OracleCheckRequest(BaseModel):
    nodes: list[NodeModel]


class OracleCheckResponse(BaseModel):
    match: bool
    detail: dict[str, bool]
