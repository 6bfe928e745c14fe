"""Command-line front end.

All subcommands build the same request models the HTTP service accepts and
run the service handlers in-process; with ``--url`` they are sent to a
running service instead.  Exit codes are monitoring-friendly:

    0  success
    1  unreadable or malformed input (or an oracle-check mismatch)
    2  the analyzed FBAS lacks quorum intersection
    3  analysis aborted because too many nodes are relevant
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import httpx
import pydantic

from .analysis import AnalysisAborted
from .io import FORMATS, render_report
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
from .service import run_analyze, run_generate, run_oracle_check, run_simulate

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_NO_INTERSECTION = 2
EXIT_ABORTED = 3

_ENDPOINTS = {
    AnalyzeRequest: ("/analyze", AnalysisResponse),
    SimulateRequest: ("/simulate", AnalysisResponse),
    GenerateRequest: ("/generate", GenerateResponse),
    OracleCheckRequest: ("/oracle-check", OracleCheckResponse),
}

_LOCAL_HANDLERS = {
    AnalyzeRequest: run_analyze,
    SimulateRequest: run_simulate,
    GenerateRequest: run_generate,
    OracleCheckRequest: run_oracle_check,
}


class CliError(Exception):
    def __init__(self, message: str, exit_code: int = EXIT_INPUT_ERROR):
        super().__init__(message)
        self.exit_code = exit_code


def _dispatch(request, url: str | None):
    """Run a request locally or against a remote service."""
    path, response_type = _ENDPOINTS[type(request)]
    if url is None:
        try:
            return _LOCAL_HANDLERS[type(request)](request)
        except AnalysisAborted as exc:
            raise CliError(str(exc), EXIT_ABORTED) from exc
        except ValueError as exc:
            raise CliError(str(exc)) from exc
    response = httpx.post(url.rstrip("/") + path,
                          json=request.model_dump(), timeout=None)
    if response.status_code == 409:
        raise CliError(str(response.json().get("detail")), EXIT_ABORTED)
    if response.status_code != 200:
        raise CliError(f"service error {response.status_code}: {response.text}")
    return response_type(**response.json())


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc


def _load_node_models(path: str) -> list[NodeModel]:
    try:
        records = json.loads(_read_text(path))
        return [NodeModel(**record) for record in records]
    except (json.JSONDecodeError, TypeError, pydantic.ValidationError) as exc:
        raise CliError(f"malformed nodes document {path}: {exc}") from exc


def _print_analysis(response: AnalysisResponse, fmt: str) -> int:
    sys.stdout.write(render_report(response.model_dump(), fmt))
    return EXIT_OK if response.has_quorum_intersection else EXIT_NO_INTERSECTION


def _add_analysis_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--intersection-algo", choices=("pairwise", "complement"),
                        default="complement",
                        help="quorum intersection check to use")
    parser.add_argument("--no-symmetric-shortcuts", action="store_true",
                        help="disable closed-form analysis of symmetric top tiers")
    parser.add_argument("--abort-above", type=int, default=40, metavar="N",
                        help="refuse enumeration above N relevant nodes "
                             "(default 40; pass a negative value to disable)")
    parser.add_argument("--format", choices=FORMATS, default="text",
                        dest="fmt", help="report format")


def _abort_above(value: int) -> int | None:
    return None if value < 0 else value


def cmd_analyze(args: argparse.Namespace) -> int:
    organizations = None
    if args.organizations:
        try:
            organizations = json.loads(_read_text(args.organizations))
        except json.JSONDecodeError as exc:
            raise CliError(f"malformed organizations document: {exc}") from exc
    if args.merge_by_org and organizations is None:
        raise CliError("--merge-by-org requires --organizations")
    request = AnalyzeRequest(
        nodes=_load_node_models(args.nodes),
        organizations=organizations,
        merge_by_org=args.merge_by_org,
        intersection_algo=args.intersection_algo,
        symmetric_shortcuts=not args.no_symmetric_shortcuts,
        abort_above=_abort_above(args.abort_above),
    )
    return _print_analysis(_dispatch(request, args.url), args.fmt)


def cmd_simulate(args: argparse.Namespace) -> int:
    request = SimulateRequest(
        policy=args.policy,
        tier_ratio=args.tier_ratio,
        as_rel_text=_read_text(args.graph),
        direction_rule=args.direction_rule,
        seed=args.seed,
        intersection_algo=args.intersection_algo,
        symmetric_shortcuts=not args.no_symmetric_shortcuts,
        abort_above=_abort_above(args.abort_above),
    )
    return _print_analysis(_dispatch(request, args.url), args.fmt)


def cmd_generate(args: argparse.Namespace) -> int:
    if args.size < 1:
        raise CliError("size must be at least 1")
    request = GenerateRequest(topology=args.topology, size=args.size,
                              seed=args.seed)
    response = _dispatch(request, args.url)
    text = json.dumps([node.model_dump() for node in response.nodes],
                      indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_oracle_check(args: argparse.Namespace) -> int:
    request = OracleCheckRequest(nodes=_load_node_models(args.nodes))
    response = _dispatch(request, args.url)
    for name, ok in response.detail.items():
        print(f"{name}: {'match' if ok else 'MISMATCH'}")
    if not response.match:
        return EXIT_INPUT_ERROR
    print("all families match the brute-force oracle")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run("fbaskit.service:app", host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fbaskit",
        description="Liveness and safety buffers of federated Byzantine "
                    "agreement systems.")
    parser.add_argument("--url", metavar="URL", default=None,
                        help="send the request to a running fbaskit service "
                             "instead of computing locally")
    sub = parser.add_subparsers(dest="command", required=True)

    p_analyze = sub.add_parser("analyze", help="analyze a nodes document")
    p_analyze.add_argument("nodes", help="path to a nodes JSON document")
    p_analyze.add_argument("--organizations", metavar="PATH",
                           help="organizations JSON document")
    p_analyze.add_argument("--merge-by-org", action="store_true",
                           help="collapse result families onto organizations")
    _add_analysis_flags(p_analyze)
    p_analyze.set_defaults(func=cmd_analyze)

    p_simulate = sub.add_parser(
        "simulate", help="bootstrap an FBAS from a trust graph and analyze it")
    p_simulate.add_argument("graph", help="path to an AS-relationship file")
    p_simulate.add_argument("--policy", required=True,
                            choices=("super-safe", "ideal-open",
                                     "all-neighbors", "higher-tier"))
    p_simulate.add_argument("--tier-ratio", type=float, default=2.0)
    p_simulate.add_argument("--direction-rule",
                            choices=("both", "customer-to-provider"),
                            default="both")
    p_simulate.add_argument("--seed", type=int, default=None,
                            help="seed for stochastic policies (current "
                                 "policies are deterministic)")
    _add_analysis_flags(p_simulate)
    p_simulate.set_defaults(func=cmd_simulate)

    p_generate = sub.add_parser("generate",
                                help="write a synthetic topology document")
    p_generate.add_argument("topology", choices=("flat", "stellar-like"))
    p_generate.add_argument("size", type=int,
                            help="node count (flat) or organization count")
    p_generate.add_argument("--out", metavar="PATH", default=None)
    p_generate.add_argument("--seed", type=int, default=None)
    p_generate.set_defaults(func=cmd_generate)

    p_oracle = sub.add_parser(
        "oracle-check",
        help="validate the enumeration algorithms against brute force")
    p_oracle.add_argument("nodes", help="path to a nodes JSON document")
    p_oracle.set_defaults(func=cmd_oracle_check)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except pydantic.ValidationError as exc:
        print(f"error: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except httpx.HTTPError as exc:
        print(f"error: cannot reach service: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
