"""Command-line front end: a thin client of the compute service.

By default the service app runs in-process through an ASGI transport, so
``choquard`` works standalone and deterministically; pass ``--server URL`` to
target a running instance instead (``choquard serve`` starts one).

Exit codes: 0 success, 1 usage, 2 config validation, 3 numerical
non-convergence, 4 invariant violation (verify).
"""

from __future__ import annotations

import argparse
import json
import sys

import httpx

from .serialize import dump_csv, dump_json

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_INVARIANT = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _build_parser() -> _Parser:
    parser = _Parser(prog="choquard",
                     description="Concave-convex Choquard solver (thin client)")
    parser.add_argument("--server", default=None,
                        help="base URL of a running service; default runs in-process")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="path to JSON run config")

    p = sub.add_parser("extremal", help="compute the extremal parameters")
    common(p)
    p.add_argument("--out", required=True)

    p = sub.add_parser("solve", help="solve one Nehari branch at one parameter")
    common(p)
    p.add_argument("--lam", type=float, required=True)
    p.add_argument("--relative-to-lambda-n", action="store_true")
    p.add_argument("--branch", choices=["plus", "minus"], default="plus")
    p.add_argument("--out", required=True)

    p = sub.add_parser("sweep", help="two-branch continuation over a parameter ladder")
    common(p)
    p.add_argument("--lambda-min", type=float, required=True)
    p.add_argument("--lambda-max", type=float, required=True)
    p.add_argument("--steps", type=int, default=24)
    p.add_argument("--relative-to-lambda-n", action="store_true")
    p.add_argument("--out", required=True)

    p = sub.add_parser("fibering", help="dump the fibering curves of a seed profile")
    common(p)
    p.add_argument("--seed-profile", choices=["gaussian", "exp"], default="gaussian")
    p.add_argument("--t-min", type=float, default=0.0)
    p.add_argument("--t-max", type=float, default=10.0)
    p.add_argument("--samples", type=int, default=400)
    p.add_argument("--out", required=True)

    p = sub.add_parser("verify", help="run the self-verification suite")
    common(p)
    p.add_argument("--suite", choices=["fast", "full"], default="fast")
    p.add_argument("--out", default=None)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    return parser


class _InProcessClient:
    """Synchronous facade over the ASGI app; one event loop per request."""

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False

    def post(self, path: str, json: dict) -> httpx.Response:
        import asyncio

        from .service import app

        async def go():
            transport = httpx.ASGITransport(app=app)
            async with httpx.AsyncClient(transport=transport,
                                         base_url="http://choquard.local",
                                         timeout=None) as client:
                return await client.post(path, json=json)

        return asyncio.run(go())


def _client(server: str | None):
    if server:
        return httpx.Client(base_url=server, timeout=None)
    return _InProcessClient()


def _load_config_dict(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config {path}: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def _post(client: httpx.Client, path: str, payload: dict) -> dict:
    reply = client.post(path, json=payload)
    if reply.status_code == 200:
        return reply.json()
    detail = ""
    try:
        detail = reply.json().get("detail", "")
    except Exception:
        detail = reply.text
    print(f"error: {detail}", file=sys.stderr)
    if reply.status_code == 422:
        raise SystemExit(EXIT_CONFIG)
    if reply.status_code == 409:
        raise SystemExit(EXIT_NUMERICAL)
    raise SystemExit(EXIT_NUMERICAL)


def _write_table_csv(out: str, data: dict, marker_comment: str | None = None) -> None:
    comments = [f"config-sha256={data['config_hash']}"]
    if marker_comment:
        comments.append(marker_comment)
    dump_csv(out, data["columns"], data["rows"], comments)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)

    if args.command == "serve":
        import uvicorn
        from .service import app
        uvicorn.run(app, host=args.host, port=args.port)
        return EXIT_OK

    config = _load_config_dict(args.config)
    with _client(args.server) as client:
        if args.command == "extremal":
            data = _post(client, "/extremal", {"config": config})
            dump_json(data, args.out)
            print(f"lambda_n = {data['lambda_n']:.12g}, "
                  f"lambda_e = {data['lambda_e']:.12g} -> {args.out}")
            return EXIT_OK

        if args.command == "solve":
            data = _post(client, "/solve", {
                "config": config, "lam": args.lam,
                "relative_to_lambda_n": args.relative_to_lambda_n,
                "branch": args.branch})
            dump_json(data, args.out)
            print(f"branch {data['branch']} at lambda = {data['lambda']:.10g}: "
                  f"energy = {data['energy']:.10g} -> {args.out}")
            return EXIT_OK

        if args.command == "sweep":
            data = _post(client, "/sweep", {
                "config": config, "lambda_min": args.lambda_min,
                "lambda_max": args.lambda_max, "steps": args.steps,
                "relative_to_lambda_n": args.relative_to_lambda_n})
            _write_table_csv(args.out, data)
            print(f"{len(data['rows'])} rows -> {args.out}")
            return EXIT_NUMERICAL if data.get("any_failed") else EXIT_OK

        if args.command == "fibering":
            data = _post(client, "/fibering", {
                "config": config, "profile": args.seed_profile,
                "t_min": args.t_min, "t_max": args.t_max,
                "samples": args.samples})
            m = data["markers"]
            marker = ("markers t_n={t_n:.17g} t_e={t_e:.17g} "
                      "lambda_n_u={lambda_n_u:.17g} lambda_e_u={lambda_e_u:.17g}"
                      ).format(**m)
            _write_table_csv(args.out, data, marker)
            if data.get("clipped"):
                print("warning: t range clipped to (0, t_zero]", file=sys.stderr)
            print(f"{len(data['rows'])} samples -> {args.out}")
            return EXIT_OK

        if args.command == "verify":
            data = _post(client, "/verify", {"config": config,
                                             "suite": args.suite})
            for chk in data["checks"]:
                status = "PASS" if chk["passed"] else "FAIL"
                print(f"[{status}] {chk['name']}: {chk['detail']}")
            if args.out:
                dump_json(data, args.out)
            return EXIT_OK if data["passed"] else EXIT_INVARIANT

    raise SystemExit(EXIT_USAGE)


if __name__ == "__main__":
    sys.exit(main())
