"""Command-line client for the benchmark service.

Commands run against an in-process copy of the service by default, so no
server is needed; pass --url to talk to a running one instead (start one
with `procnet serve`). Exit codes: 0 all verified, 1 verification or
affinity failure, 2 deadlock/budget/transport trouble, 3 usage errors.
"""

import argparse
import asyncio
import sys

import httpx

from .bench import (FORMATS, UsageError, RunReport, exit_code, format_reports,
                    format_sweep, parse_designs, parse_dims, sweep_exit_code)
from .runtime import DEFAULT_MAX_CYCLES
from .words import DEFAULT_WIDTH

ALL_DESIGNS = "d1,d2,d3,d4,d5"
PIPELINED = "d3,d4,d5"
_PATHS = {"run": "/run", "compare": "/compare", "sweep-k": "/sweep-k"}


class _Parser(argparse.ArgumentParser):
    # usage problems must exit 3, not argparse's default 2
    def error(self, message):
        raise UsageError(message)


def build_parser():
    p = _Parser(prog="procnet",
                description="Benchmark process-network matrix-multiply "
                            "designs on a deterministic cycle simulator.")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")

    def job_flags(sp, designs_default, dims_default):
        sp.add_argument("--designs", default=designs_default, metavar="IDS",
                        help="comma-separated design ids "
                             f"(default {designs_default})")
        sp.add_argument("--dims", action="append", metavar="N,M,K",
                        help="matrix dims, repeatable "
                             f"(default {' '.join(dims_default)})")
        sp.set_defaults(dims_default=dims_default)
        sp.add_argument("--seed", type=int, default=42,
                        help="rng seed for the operand matrices (default 42)")
        sp.add_argument("--width", type=int, default=DEFAULT_WIDTH,
                        help=f"word width in bits (default {DEFAULT_WIDTH})")
        sp.add_argument("--max-cycles", type=int, default=DEFAULT_MAX_CYCLES,
                        help="cycle budget per run "
                             f"(default {DEFAULT_MAX_CYCLES})")
        sp.add_argument("--format", choices=FORMATS, default="table",
                        help="output format (default table)")
        sp.add_argument("--small-values", action="store_true",
                        help="draw matrix entries from [-8, 8] instead of "
                             "the full word range")
        sp.add_argument("--url", default=None, metavar="URL",
                        help="benchmark service to use instead of the "
                             "in-process one")

    sp = sub.add_parser("run", help="run designs and report each")
    job_flags(sp, ALL_DESIGNS, ["3,3,3"])
    sp = sub.add_parser("compare",
                        help="run several designs on one dims, fastest first")
    job_flags(sp, ALL_DESIGNS, ["3,3,3"])
    sp = sub.add_parser("sweep-k",
                        help="cycles versus k for the pipelined designs")
    job_flags(sp, PIPELINED, ["3,3,4", "3,3,8", "3,3,16", "3,3,32"])

    sp = sub.add_parser("serve", help="start the benchmark service")
    sp.add_argument("--host", default="127.0.0.1")
    sp.add_argument("--port", type=int, default=8000)
    return p


async def _post(url, path, payload):
    if url:
        client = httpx.AsyncClient(base_url=url, timeout=600.0)
    else:
        from .service.app import app
        client = httpx.AsyncClient(transport=httpx.ASGITransport(app=app),
                                   base_url="http://procnet.internal",
                                   timeout=600.0)
    async with client:
        resp = await client.post(path, json=payload)
        return resp.status_code, resp.json()


def _detail(body):
    detail = body.get("detail", body)
    if isinstance(detail, list):  # request-model validation errors
        parts = []
        for err in detail:
            loc = ".".join(str(x) for x in err.get("loc", []) if x != "body")
            parts.append(f"{loc}: {err.get('msg', 'invalid')}")
        return "; ".join(parts)
    return str(detail)


def _run_job(args):
    payload = {
        "designs": parse_designs(args.designs),
        "dims": [list(parse_dims(t)) for t in (args.dims or args.dims_default)],
        "seed": args.seed,
        "width": args.width,
        "max_cycles": args.max_cycles,
        "small_values": args.small_values,
    }
    try:
        status, body = asyncio.run(_post(args.url, _PATHS[args.command],
                                         payload))
    except httpx.HTTPError as exc:
        print(f"error: cannot reach {args.url}: {exc}", file=sys.stderr)
        return 2
    if status in (400, 422):
        print(f"error: {_detail(body)}", file=sys.stderr)
        return 3
    if status != 200:
        print(f"error: service returned {status}: {_detail(body)}",
              file=sys.stderr)
        return 2
    if args.command == "sweep-k":
        series = body["series"]
        sys.stdout.write(format_sweep(series, args.format))
        return sweep_exit_code(series)
    reports = [RunReport.from_dict(d) for d in body["reports"]]
    sys.stdout.write(format_reports(reports, args.format))
    return exit_code(reports)


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    if args.command == "serve":
        import uvicorn
        uvicorn.run("procnet.service.app:app", host=args.host, port=args.port)
        return 0
    try:
        return _run_job(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
