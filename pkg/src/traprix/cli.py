"""Command-line front end.

Commands run in-process by default. With ``--server URL`` the gen, build,
query and ratio commands send the same request to a running ``traprix
serve`` instance and print its reply.
"""
from __future__ import annotations

import argparse
import os
import sys
from typing import Callable, Optional

from . import harness
from .errors import RebuildLimitExceeded, TraprixError
from .trapmap import VERIFIERS, BuildConfig

EXIT_OK, EXIT_INVALID, EXIT_REBUILD_LIMIT, EXIT_IO = 0, 2, 3, 4
SEED_ENV = "TRAPRIX_SEED"
U64_MAX = (1 << 64) - 1


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def u64(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value <= U64_MAX:
        raise argparse.ArgumentTypeError(f"seed out of 64-bit range: {text}")
    return value


def size_list(text: str) -> list[int]:
    try:
        values = [int(t) for t in text.split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of integers: {text!r}") from None
    if not values or any(v < 0 for v in values):
        raise argparse.ArgumentTypeError(f"expected non-negative sizes: {text!r}")
    return values


def resolve_seed(seed: Optional[int]) -> int:
    if seed is not None:
        return seed
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 0
    try:
        return u64(env)
    except argparse.ArgumentTypeError as exc:
        raise CliError(f"{SEED_ENV}: {exc}", EXIT_INVALID) from None


def add_build_flags(p: argparse.ArgumentParser, verifier: str = "depth"):
    p.add_argument("--verifier", choices=VERIFIERS, default=verifier)
    p.add_argument("--seed", type=u64, default=None,
                   help=f"64-bit seed (default: ${SEED_ENV} or 0)")
    p.add_argument("--depth-c", type=float, default=6.0)
    p.add_argument("--size-c", type=float, default=12.0)
    p.add_argument("--max-rebuilds", type=int, default=32)
    p.add_argument("--order", choices=("suggested", "shuffled"), default="shuffled")


def add_output_flags(p: argparse.ArgumentParser):
    p.add_argument("--out", default="-", help="output path, or - for standard output")
    p.add_argument("--server", default=None, help="URL of a running traprix service")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="traprix", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a scene file")
    gen.add_argument("kind", choices=harness.SCENARIOS)
    gen.add_argument("--n", type=int, help="segment count (random, recursive)")
    gen.add_argument("--k", type=int, help="block count (sqrt)")
    gen.add_argument("--seed", type=u64, default=None)
    gen.add_argument("--method", choices=("arrangement", "rejection"), default="arrangement")
    add_output_flags(gen)

    b = sub.add_parser("build", help="build a map and print its statistics as CSV")
    b.add_argument("--scene", required=True)
    add_build_flags(b)
    b.add_argument("--timing", action="store_true", help="fill the ms column")
    add_output_flags(b)

    q = sub.add_parser("query", help="locate query points")
    q.add_argument("--scene", required=True)
    q.add_argument("--queries", required=True, help="file with one point per line")
    add_build_flags(q)
    add_output_flags(q)

    r = sub.add_parser("ratio", help="depth / search-path ratio experiment")
    r.add_argument("--scenario", choices=harness.SCENARIOS, default="random")
    r.add_argument("--n", type=size_list, required=True,
                   help="comma-separated sizes (k for sqrt scenes)")
    r.add_argument("--repeats", type=int, default=20)
    add_build_flags(r, verifier="none")
    r.add_argument("--with-arrdepth", action="store_true", help="fill the arrdepth column")
    r.add_argument("--timing", action="store_true", help="fill the ms column")
    add_output_flags(r)

    s = sub.add_parser("serve", help="run the HTTP service")
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int, default=8000)
    return parser


def _config(args) -> BuildConfig:
    return BuildConfig(verifier=args.verifier, depth_c=args.depth_c, size_c=args.size_c,
                       max_rebuilds=args.max_rebuilds, order=args.order)


def _build_params(args) -> dict:
    return {"verifier": args.verifier, "seed": resolve_seed(args.seed), "depth_c": args.depth_c,
            "size_c": args.size_c, "max_rebuilds": args.max_rebuilds, "order": args.order}


def _read(path: str) -> str:
    try:
        return harness.read_text(path)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror or exc}", EXIT_IO) from None


def _gen_size(args) -> int:
    size = args.k if args.kind == "sqrt" else args.n
    flag = "--k" if args.kind == "sqrt" else "--n"
    if size is None:
        raise CliError(f"gen {args.kind} requires {flag}", EXIT_INVALID)
    return size


def run_local(args) -> str:
    if args.command == "gen":
        return harness.cmd_gen(args.kind, _gen_size(args), resolve_seed(args.seed), args.method)
    if args.command == "build":
        return harness.cmd_build(_read(args.scene), _config(args), resolve_seed(args.seed),
                                 timing=args.timing)
    if args.command == "query":
        return harness.cmd_query(_read(args.scene), _read(args.queries), _config(args),
                                 resolve_seed(args.seed))
    if args.command == "ratio":
        return harness.cmd_ratio(args.scenario, args.n, args.repeats, resolve_seed(args.seed),
                                 _config(args), args.with_arrdepth, args.timing)
    raise AssertionError(args.command)


def run_remote(args, client_factory: Callable) -> str:
    """Send the command to a service and return the text it would have printed."""
    if args.command == "gen":
        path, body = "/gen", {"kind": args.kind, "size": _gen_size(args),
                              "seed": resolve_seed(args.seed), "method": args.method}
    elif args.command == "build":
        path, body = "/build", {"scene": _read(args.scene), "timing": args.timing,
                                **_build_params(args)}
    elif args.command == "query":
        path, body = "/query", {"scene": _read(args.scene), "queries": _read(args.queries),
                                **_build_params(args)}
    else:
        params = _build_params(args)
        path, body = "/ratio", {"scenario": args.scenario, "sizes": args.n,
                                "repeats": args.repeats, "seed": params.pop("seed"),
                                "params": params, "with_arrdepth": args.with_arrdepth,
                                "timing": args.timing}
    import httpx

    try:
        with client_factory(args.server) as client:
            resp = client.post(path, json=body)
    except httpx.HTTPError as exc:
        raise CliError(f"cannot reach {args.server}: {exc}", EXIT_IO) from None
    if resp.status_code == 409:
        raise CliError(resp.json().get("detail", "rebuild limit"), EXIT_REBUILD_LIMIT)
    if resp.status_code != 200:
        raise CliError(f"server error {resp.status_code}: {resp.text}", EXIT_INVALID)
    data = resp.json()
    if args.command == "gen":
        return data["scene"]
    if args.command == "build":
        return data["csv"]
    return data["output"]


def _default_client(base_url: str):
    import httpx

    return httpx.Client(base_url=base_url, timeout=None)


def _write(text: str, out: str):
    if out == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    try:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(f"cannot write {out}: {exc.strerror or exc}", EXIT_IO) from None


def main(argv: Optional[list[str]] = None, client_factory: Callable = _default_client) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        import uvicorn

        uvicorn.run("traprix.service.app:app", host=args.host, port=args.port)
        return EXIT_OK
    try:
        if args.server:
            text = run_remote(args, client_factory)
        else:
            text = run_local(args)
        _write(text, args.out)
    except CliError as exc:
        print(f"traprix: {exc}", file=sys.stderr)
        return exc.code
    except RebuildLimitExceeded as exc:
        print(f"traprix: {exc}", file=sys.stderr)
        return EXIT_REBUILD_LIMIT
    except (TraprixError, ValueError) as exc:
        print(f"traprix: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
