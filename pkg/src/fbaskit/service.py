"""FastAPI service exposing analysis, simulation, generation and validation.

The handler functions (``run_*``) contain all behaviour and raise plain
exceptions; the routes map those onto HTTP status codes.  The CLI calls the
same handlers in-process, or POSTs the same models against a running
instance.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from . import io as fbas_io
from . import oracle
from .analysis import (
    AnalysisAborted,
    analyze,
    canonical_family,
    find_minimal_blocking_sets,
    find_minimal_quorums,
    find_minimal_splitting_sets,
    has_quorum_intersection_complement,
    has_quorum_intersection_pairwise,
    merge_families_by_group,
)
from .core import Fbas, node_set
from .qsc import (
    QscPolicy,
    TrustGraph,
    generate_flat_topology,
    generate_stellar_like_topology,
    simulate_and_analyze,
)
from .schemas import (
    AnalysisResponse,
    AnalyzeRequest,
    GenerateRequest,
    GenerateResponse,
    NodeModel,
    OracleCheckRequest,
    OracleCheckResponse,
    SimulateRequest,
)


def _parse_request_nodes(nodes: list[NodeModel]) -> Fbas:
    return fbas_io.parse_nodes([record.model_dump() for record in nodes])


def run_analyze(request: AnalyzeRequest) -> AnalysisResponse:
    fbas = _parse_request_nodes(request.nodes)
    groupings = []
    if request.organizations is not None:
        groupings = fbas_io.parse_organizations(
            [record.model_dump() for record in request.organizations], fbas)
    if request.merge_by_org and request.organizations is None:
        raise ValueError("merge_by_org requires organizations")
    result = analyze(fbas,
                     intersection_algo=request.intersection_algo,
                     symmetric_shortcuts=request.symmetric_shortcuts,
                     abort_above=request.abort_above)
    if request.merge_by_org:
        result = merge_families_by_group(result, groupings)
    return AnalysisResponse(**fbas_io.result_to_dict(result))


def run_simulate(request: SimulateRequest) -> AnalysisResponse:
    if (request.graph is None) == (request.as_rel_text is None):
        raise ValueError("provide exactly one of graph or as_rel_text")
    if request.graph is not None:
        graph = TrustGraph.from_edges(
            request.graph.node_count,
            [(e.source, e.target) for e in request.graph.edges],
            request.graph.names)
    else:
        graph = fbas_io.parse_as_rel(request.as_rel_text, request.direction_rule)
    policy = QscPolicy(request.policy, request.tier_ratio)
    result = simulate_and_analyze(graph, policy,
                                  intersection_algo=request.intersection_algo,
                                  symmetric_shortcuts=request.symmetric_shortcuts,
                                  abort_above=request.abort_above)
    return AnalysisResponse(**fbas_io.result_to_dict(result))


def run_generate(request: GenerateRequest) -> GenerateResponse:
    if request.size < 1:
        raise ValueError("size must be at least 1")
    if request.topology == "flat":
        fbas = generate_flat_topology(request.size)
    else:
        fbas = generate_stellar_like_topology(request.size)
    return GenerateResponse(
        nodes=[NodeModel(**record) for record in fbas_io.nodes_document_records(fbas)])


def run_oracle_check(request: OracleCheckRequest) -> OracleCheckResponse:
    fbas = _parse_request_nodes(request.nodes)
    if fbas.n > oracle.MAX_NODES:
        raise ValueError(
            f"population of {fbas.n} exceeds the oracle limit of {oracle.MAX_NODES}")
    minimal_quorums = find_minimal_quorums(fbas)
    detail = {
        "minimal_quorums": minimal_quorums == canonical_family(
            node_set(s) for s in oracle.brute_minimal_quorums(fbas)),
        "minimal_blocking_sets": find_minimal_blocking_sets(fbas)
        == canonical_family(node_set(s) for s in oracle.brute_blocking_sets(fbas)),
        "minimal_splitting_sets": find_minimal_splitting_sets(fbas, minimal_quorums)
        == canonical_family(node_set(s) for s in oracle.brute_splitting_sets(fbas)),
        "quorum_intersection": (
            has_quorum_intersection_pairwise(fbas, minimal_quorums)
            == has_quorum_intersection_complement(fbas, minimal_quorums)
            == oracle.brute_has_quorum_intersection(fbas)),
    }
    return OracleCheckResponse(match=all(detail.values()), detail=detail)


app = FastAPI(title="fbaskit",
              description="Liveness and safety buffers of federated Byzantine "
                          "agreement systems: minimal quorums, blocking sets "
                          "and splitting sets, plus quorum-set configuration "
                          "policy simulation.")


@app.get("/health")
def health() -> dict[str, str]:
    return {"status": "ok"}


def _guarded(handler, request):
    try:
        return handler(request)
    except AnalysisAborted as exc:
        raise HTTPException(status_code=409, detail=str(exc)) from exc
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc


@app.post("/analyze", response_model=AnalysisResponse)
def analyze_endpoint(request: AnalyzeRequest) -> AnalysisResponse:
    return _guarded(run_analyze, request)


@app.post("/simulate", response_model=AnalysisResponse)
def simulate_endpoint(request: SimulateRequest) -> AnalysisResponse:
    return _guarded(run_simulate, request)


@app.post("/generate", response_model=GenerateResponse)
def generate_endpoint(request: GenerateRequest) -> GenerateResponse:
    return _guarded(run_generate, request)


@app.post("/oracle-check", response_model=OracleCheckResponse)
def oracle_check_endpoint(request: OracleCheckRequest) -> OracleCheckResponse:
    return _guarded(run_oracle_check, request)
