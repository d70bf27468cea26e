"""Command-line client for the sweep service.

Each sweep subcommand builds a request, sends it to the service (an
in-process instance by default, or a running server via --server), and
writes the returned CSV report to --out. Exit codes: 0 success, 1 usage
error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from typing import Dict, List, Optional

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3

_ENDPOINTS = {
    "sweep-epsilon": "/sweeps/epsilon",
    "sweep-cardinality": "/sweeps/cardinality",
    "sweep-dimensionality": "/sweeps/dimensionality",
    "time": "/sweeps/timing",
}

_DEFAULTS = {
    "delimiter": ",",
    "algorithms": "NOISELESS,OFPA,OFAA",
    "seed": "0",
    "repetitions": "10",
    "epochs": "40",
    "eta": "1e-3",
    "max-rounds": "50",
    "epsilon": "0.8",
    "alg1-sensitivity": "4.0",
}


class CliError(Exception):
    """Usage-level problem; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="privlogit", description=__doc__)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    for name, help_text in [
        ("sweep-epsilon", "misclassification across a privacy-budget grid"),
        ("sweep-cardinality", "misclassification across subsampling rates"),
        ("sweep-dimensionality", "misclassification across feature counts"),
        ("time", "wall-clock training time per algorithm per epsilon"),
    ]:
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--data", help="CSV dataset path")
        cmd.add_argument("--schema", help="column schema path")
        cmd.add_argument("--delimiter", help="CSV delimiter (default ,)")
        cmd.add_argument(
            "--synthetic",
            metavar="SPEC",
            help="synthetic source instead of --data, e.g. n=2000,d=10,separation=3",
        )
        cmd.add_argument("--algorithms", help="comma list from NOISELESS,OFPA,OFAA,ALG1")
        cmd.add_argument("--out", help="where to write the CSV report")
        cmd.add_argument("--seed", help="root seed (non-negative integer)")
        cmd.add_argument("--repetitions", help="runs averaged per sweep point")
        cmd.add_argument("--epochs", help="gradient descent epochs per round")
        cmd.add_argument("--eta", help="convergence threshold on the global update")
        cmd.add_argument("--max-rounds", dest="max_rounds", help="round cap per run")
        cmd.add_argument("--grid", help="comma list of sweep points for this axis")
        cmd.add_argument("--epsilon", help="fixed epsilon for cardinality/dimension sweeps")
        cmd.add_argument(
            "--alg1-sensitivity",
            dest="alg1_sensitivity",
            help="global sensitivity assumed by the ALG1 baseline (default 4)",
        )
        cmd.add_argument("--config", help="key = value file supplying any of these flags")
        cmd.add_argument("--server", help="base URL of a running service (default: in-process)")

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def _read_config(path: str) -> Dict[str, str]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except FileNotFoundError:
        raise CliError(f"no such config file: {path}") from None
    values: Dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise CliError(f"config line {lineno}: expected 'key = value'")
        key, _, value = (part.strip() for part in line.partition("="))
        values[key] = value
    return values


def _resolve(args: argparse.Namespace, config: Dict[str, str], key: str) -> Optional[str]:
    """Flag value if given, else config value, else the built-in default."""
    flag = getattr(args, key.replace("-", "_"), None)
    if flag is not None:
        return str(flag)
    if key in config:
        return config[key]
    return _DEFAULTS.get(key)


def _parse_number(raw: str, kind, flag: str):
    try:
        return kind(raw)
    except ValueError:
        raise CliError(f"--{flag}: cannot parse {raw!r}") from None


def _parse_synthetic(raw: str) -> Dict[str, object]:
    fields = {"n": 2000, "d": 10, "separation": 3.0, "seed": 0}
    for item in raw.split(","):
        if not item.strip():
            continue
        if "=" not in item:
            raise CliError(f"--synthetic: expected key=value, got {item!r}")
        key, _, value = item.partition("=")
        key = key.strip()
        if key not in fields:
            raise CliError(f"--synthetic: unknown key {key!r}")
        caster = float if key == "separation" else int
        fields[key] = _parse_number(value.strip(), caster, "synthetic")
    return {"kind": "synthetic", **fields}


def _build_request(args: argparse.Namespace, config: Dict[str, str]) -> Dict[str, object]:
    if args.synthetic is not None or (args.data is None and "synthetic" in config):
        raw = args.synthetic if args.synthetic is not None else config["synthetic"]
        source = _parse_synthetic(raw)
    else:
        data = _resolve(args, config, "data")
        schema = _resolve(args, config, "schema")
        if data is None or schema is None:
            raise CliError("provide --data with --schema, or --synthetic")
        source = {
            "kind": "csv",
            "data_path": data,
            "schema_path": schema,
            "delimiter": _resolve(args, config, "delimiter"),
        }

    algorithms = [a.strip().upper() for a in _resolve(args, config, "algorithms").split(",") if a.strip()]
    if not algorithms:
        raise CliError("--algorithms must name at least one algorithm")
    for a in algorithms:
        if a not in ("NOISELESS", "OFPA", "OFAA", "ALG1"):
            raise CliError(f"unknown algorithm {a!r}")

    seed = _parse_number(_resolve(args, config, "seed"), int, "seed")
    if seed < 0:
        raise CliError("--seed must be non-negative")

    request: Dict[str, object] = {
        "source": source,
        "algorithms": algorithms,
        "seed": seed,
        "repetitions": _parse_number(_resolve(args, config, "repetitions"), int, "repetitions"),
        "epochs": _parse_number(_resolve(args, config, "epochs"), int, "epochs"),
        "eta": _parse_number(_resolve(args, config, "eta"), float, "eta"),
        "max_rounds": _parse_number(_resolve(args, config, "max-rounds"), int, "max-rounds"),
        "epsilon": _parse_number(_resolve(args, config, "epsilon"), float, "epsilon"),
        "alg1_sensitivity": _parse_number(
            _resolve(args, config, "alg1-sensitivity"), float, "alg1-sensitivity"
        ),
    }
    grid = _resolve(args, config, "grid")
    if grid is not None:
        points = [_parse_number(p.strip(), float, "grid") for p in grid.split(",") if p.strip()]
        if not points:
            raise CliError("--grid must list at least one point")
        request["grid"] = points
    return request


def _make_client(server: Optional[str]):
    if server:
        import httpx

        return httpx.Client(base_url=server, timeout=None)
    # no server given: run the app in this process through the ASGI stack
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DeprecationWarning)
        from fastapi.testclient import TestClient

    from .service.app import create_app

    return TestClient(create_app())


def _run_sweep(command: str, args: argparse.Namespace) -> int:
    config = _read_config(args.config) if args.config else {}
    request = _build_request(args, config)
    out_path = _resolve(args, config, "out")
    if out_path is None:
        raise CliError("--out is required")
    server = _resolve(args, config, "server")

    with _make_client(server) as client:
        response = client.post(_ENDPOINTS[command], json=request)

    if response.status_code == 200:
        payload = response.json()
        try:
            with open(out_path, "w", encoding="utf-8", newline="") as fh:
                fh.write(payload["csv"])
        except OSError as exc:
            print(f"error: cannot write {out_path}: {exc}", file=sys.stderr)
            return EXIT_DATA
        print(f"wrote {len(payload['rows'])} rows to {out_path}")
        return EXIT_OK

    if response.status_code == 400:
        body = response.json()
        kind = body.get("kind", "usage_error")
        print(f"error: {body.get('detail', response.text)}", file=sys.stderr)
        return {
            "data_error": EXIT_DATA,
            "numerical_error": EXIT_NUMERICAL,
        }.get(kind, EXIT_USAGE)
    print(f"error: service returned {response.status_code}: {response.text}", file=sys.stderr)
    return EXIT_USAGE


def _serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run("privlogit.service.app:app", host=args.host, port=args.port)
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_usage(sys.stderr)
            return EXIT_USAGE
        if args.command == "serve":
            return _serve(args)
        return _run_sweep(args.command, args)
    except CliError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except KeyboardInterrupt:
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
