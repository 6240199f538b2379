"""Command-line entry point: run the memory sandbox HTTP service."""

from __future__ import annotations

import argparse
import logging
import socket
import sys
from pathlib import Path

import uvicorn

from . import core, gateway, service


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="memsandbox",
        description="Serve the conversational memory sandbox over HTTP.",
    )
    parser.add_argument("--host", default="127.0.0.1", help="bind address")
    parser.add_argument(
        "--port", type=int, default=service.DEFAULT_PORT, help="listen port"
    )
    parser.add_argument(
        "--store",
        default=service.DEFAULT_STORE_DIR,
        help="workspace store directory (one JSON document per workspace)",
    )
    parser.add_argument(
        "--provider-url",
        default=gateway.DEFAULT_PROVIDER_URL,
        help="base URL of the chat-completions provider",
    )
    parser.add_argument(
        "--model",
        default=core.DEFAULT_MODEL_NAME,
        help="default model name for new conversations",
    )
    parser.add_argument(
        "--budget",
        type=int,
        default=core.DEFAULT_TOKEN_BUDGET,
        help="default token budget for new conversations",
    )
    parser.add_argument(
        "--mock-llm",
        action="store_true",
        help="use the deterministic offline backend instead of a provider",
    )
    parser.add_argument(
        "--llm-timeout-seconds",
        type=float,
        default=gateway.DEFAULT_TIMEOUT_SECONDS,
        help="provider request timeout",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO)

    store_dir = Path(args.store)
    try:
        store_dir.mkdir(parents=True, exist_ok=True)
        probe = store_dir / ".write-probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        print(f"memsandbox: store directory {store_dir} is not usable: {exc}", file=sys.stderr)
        return 1

    try:
        with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as probe_sock:
            probe_sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
            probe_sock.bind((args.host, args.port))
    except OSError as exc:
        print(f"memsandbox: cannot bind {args.host}:{args.port}: {exc}", file=sys.stderr)
        return 1

    settings = service.ServiceSettings(
        store_dir=store_dir,
        provider_url=args.provider_url,
        model_name=args.model,
        token_budget=args.budget,
        mock_llm=args.mock_llm,
        llm_timeout_seconds=args.llm_timeout_seconds,
    )
    app = service.create_app(settings)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


if __name__ == "__main__":
    sys.exit(main())
