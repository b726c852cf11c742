"""``chemjson`` command line: validate, convert, formula, upload, serve.

Exit status is 0 on success, 1 when a document fails validation and 2 for
I/O or network trouble.
"""

from __future__ import annotations

import argparse
import json
import sys
import urllib.error
import urllib.request
from pathlib import Path

from . import _jsonio
from .cjson import serialize_cjson, validate_cjson
from .errors import ChemDataError
from .extchem import serialize_extchem, validate_extchem
from .nwparse import parse_log
from .ops import cjson_to_extchem, extchem_to_cjson, hill_formula
from .server.metadata import detect_format, load_document

EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 1, 2
_BY_EXTENSION = {".cjson": "cjson", ".json": "extchem", ".out": "log", ".log": "log", ".nwo": "log"}


class CliError(Exception):
    def __init__(self, message: str, code: int):
        self.code = code
        super().__init__(message)


def detect_kind(path: Path, text: str) -> str:
    """Extension first; ``.json`` and unknown extensions are confirmed by sniffing."""
    kind = _BY_EXTENSION.get(path.suffix.lower())
    if kind == "log":
        return kind
    try:
        return detect_format(_jsonio.loads(text))
    except ChemDataError:
        if kind is not None:
            return kind
    return "log"


def read_input(path: str) -> tuple[str, str]:
    p = Path(path)
    try:
        text = p.read_text("utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise CliError(f"{path}: {exc}", EXIT_IO) from None
    return detect_kind(p, text), text


def load_any(path: str):
    """``(kind, document)``; log files come back already converted to ExtendedChem."""
    kind, text = read_input(path)
    try:
        if kind == "log":
            return "extchem", parse_log(text)
        return load_document(text, kind)
    except ChemDataError as exc:
        raise CliError(f"{path}: {exc}", EXIT_INVALID) from None


def convert_text(kind: str, doc, target: str) -> str:
    if target == "cjson":
        return serialize_cjson(doc if kind == "cjson" else extchem_to_cjson(doc))
    return serialize_extchem(doc if kind == "extchem" else cjson_to_extchem(doc))


def cmd_validate(args) -> int:
    kind, text = read_input(args.file)
    try:
        if kind == "log":
            doc = parse_log(text)
            problems = validate_extchem(doc)
        else:
            _, doc = load_document(text, kind)
            problems = validate_cjson(doc) if kind == "cjson" else validate_extchem(doc)
    except ChemDataError as exc:
        problems = exc.violations or [exc]
    for p in problems:
        print(f"{args.file}: {p}", file=sys.stderr)
    if problems:
        return EXIT_INVALID
    print(f"{args.file}: ok")
    return EXIT_OK


def cmd_convert(args) -> int:
    kind, doc = load_any(args.input)
    try:
        text = convert_text(kind, doc, args.to)
    except ChemDataError as exc:
        raise CliError(f"{args.input}: {exc}", EXIT_INVALID) from None
    if args.output:
        try:
            Path(args.output).write_text(text, "utf-8")
        except OSError as exc:
            raise CliError(f"{args.output}: {exc}", EXIT_IO) from None
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_formula(args) -> int:
    kind, doc = load_any(args.file)
    if kind == "cjson":
        numbers = doc.atoms.element_numbers
    else:
        numbers = doc.molecules[-1].element_numbers if doc.molecules else []
    print(hill_formula(numbers))
    return EXIT_OK


def _post(server: str, token: str, body: str, fmt: str) -> str:
    url = server.rstrip("/") + f"/api/v1/molecules?format={fmt}"
    req = urllib.request.Request(url, data=body.encode("utf-8"), method="POST", headers={
        "Authorization": f"Bearer {token}", "Content-Type": "application/json"})
    with urllib.request.urlopen(req, timeout=60) as resp:
        return json.loads(resp.read())["id"]


def cmd_upload(args) -> int:
    status = EXIT_OK
    for path in args.files:
        try:
            kind, doc = load_any(path)
            body = convert_text(kind, doc, kind)
            server_id = _post(args.server, args.token, body, kind)
        except CliError as exc:
            print(str(exc), file=sys.stderr)
            status = max(status, exc.code)
            continue
        except urllib.error.HTTPError as exc:
            detail = exc.read().decode("utf-8", "replace")
            print(f"{path}: HTTP {exc.code}: {detail}", file=sys.stderr)
            status = max(status, EXIT_INVALID if exc.code in (400, 422) else EXIT_IO)
            continue
        except (urllib.error.URLError, OSError) as exc:
            print(f"{path}: {exc}", file=sys.stderr)
            status = EXIT_IO
            continue
        print(f"{server_id}  {path}")
        sys.stdout.flush()
    return status


def cmd_serve(args) -> int:
    from .server.app import ServerConfig, serve

    host, _, port = args.listen.rpartition(":")
    config = ServerConfig.from_env(data_dir=args.data, token=args.token, max_body=args.max_body)
    serve(config, host or "127.0.0.1", int(port))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chemjson", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a document, print violations")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("convert", help="convert between formats (log files accepted as input)")
    p.add_argument("input")
    p.add_argument("--to", required=True, choices=("cjson", "extchem"))
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("formula", help="print the Hill formula")
    p.add_argument("file")
    p.set_defaults(func=cmd_formula)

    p = sub.add_parser("upload", help="ingest files into a running server")
    p.add_argument("files", nargs="+")
    p.add_argument("--server", required=True)
    p.add_argument("--token", required=True)
    p.set_defaults(func=cmd_upload)

    p = sub.add_parser("serve", help="run the HTTP server")
    p.add_argument("--data", default=None)
    p.add_argument("--listen", default="127.0.0.1:8080")
    p.add_argument("--token", default=None)
    p.add_argument("--max-body", type=int, default=None)
    p.set_defaults(func=cmd_serve)
    return parser


def run_cli(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(str(exc), file=sys.stderr)
        return exc.code


def main() -> None:
    sys.exit(run_cli())
