"""Minimal threaded JSON HTTP server used by both API surfaces.

Routes are (method, path regex, handler) triples. Handlers receive a
Request and return a Response; raised package exceptions are mapped onto
the documented status classes (validation 400, unknown resource 404,
no snapshot yet 503). Permissive CORS headers are attached everywhere so
the dashboard can talk to both listeners from one origin.
"""

from __future__ import annotations

import json
import logging
import mimetypes
import re
import threading
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlsplit

from .errors import NotFoundError, SnapshotUnavailable, ValidationError

logger = logging.getLogger(__name__)


@dataclass
class Request:
    method: str
    path: str
    params: tuple[str, ...]
    query: dict[str, str]
    body: dict | None


@dataclass
class Response:
    status: int = 200
    body: object = None
    content_type: str = "application/json"
    headers: dict[str, str] = field(default_factory=dict)


Route = tuple[str, str, object]


def status_for(exc: Exception) -> int:
    if isinstance(exc, ValidationError):
        return 400
    if isinstance(exc, NotFoundError):
        return 404
    if isinstance(exc, SnapshotUnavailable):
        return 503
    return 500


class ApiServer:
    """Wraps ThreadingHTTPServer; serve_forever runs on a daemon thread."""

    def __init__(self, host: str, port: int, routes: list[Route], static_dir: str | Path | None = None):
        self._routes = [(method, re.compile(pattern), fn) for method, pattern, fn in routes]
        self._static_dir = Path(static_dir).resolve() if static_dir else None
        handler = self._make_handler()
        self._httpd = ThreadingHTTPServer((host, port), handler)
        self._httpd.daemon_threads = True
        self._thread: threading.Thread | None = None

    @property
    def host(self) -> str:
        return self._httpd.server_address[0]

    @property
    def port(self) -> int:
        return self._httpd.server_address[1]

    @property
    def base_url(self) -> str:
        return f"http://{self.host}:{self.port}"

    def start(self) -> None:
        # short poll interval keeps shutdown() near-instant
        self._thread = threading.Thread(
            target=lambda: self._httpd.serve_forever(poll_interval=0.05), daemon=True
        )
        self._thread.start()

    def stop(self) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)

    def _dispatch(self, method: str, raw_path: str, body_bytes: bytes) -> Response:
        parts = urlsplit(raw_path)
        query = {k: v[0] for k, v in parse_qs(parts.query).items()}
        body = None
        if body_bytes:
            try:
                body = json.loads(body_bytes)
            except json.JSONDecodeError:
                return Response(400, {"error": "request body is not valid JSON"})
        for route_method, pattern, fn in self._routes:
            if route_method != method:
                continue
            match = pattern.fullmatch(parts.path)
            if match is None:
                continue
            request = Request(method, parts.path, match.groups(), query, body)
            try:
                return fn(request)
            except Exception as exc:
                status = status_for(exc)
                if status == 500:
                    logger.exception("handler error on %s %s", method, parts.path)
                    return Response(500, {"error": "internal error"})
                return Response(status, {"error": str(exc)})
        if method == "GET" and self._static_dir is not None:
            return self._serve_static(parts.path)
        return Response(404, {"error": f"no route for {method} {parts.path}"})

    def _serve_static(self, path: str) -> Response:
        rel = path.lstrip("/") or "index.html"
        target = (self._static_dir / rel).resolve()
        if not str(target).startswith(str(self._static_dir)) or not target.is_file():
            return Response(404, {"error": f"no route for GET {path}"})
        ctype = mimetypes.guess_type(target.name)[0] or "application/octet-stream"
        return Response(200, target.read_bytes(), content_type=ctype)

    def _make_handler(self):
        server = self

        class Handler(BaseHTTPRequestHandler):
            protocol_version = "HTTP/1.1"

            def log_message(self, fmt, *args):
                logger.debug("%s %s", self.address_string(), fmt % args)

            def _handle(self, method: str) -> None:
                length = int(self.headers.get("Content-Length") or 0)
                body = self.rfile.read(length) if length else b""
                response = server._dispatch(method, self.path, body)
                payload = response.body
                if isinstance(payload, bytes):
                    data = payload
                elif isinstance(payload, str):
                    data = payload.encode("utf-8")
                elif payload is None:
                    data = b""
                else:
                    data = json.dumps(payload).encode("utf-8")
                self.send_response(response.status)
                self.send_header("Content-Type", response.content_type)
                self.send_header("Content-Length", str(len(data)))
                self.send_header("Access-Control-Allow-Origin", "*")
                for key, value in response.headers.items():
                    self.send_header(key, value)
                self.end_headers()
                self.wfile.write(data)

            def do_GET(self):
                self._handle("GET")

            def do_POST(self):
                self._handle("POST")

            def do_PUT(self):
                self._handle("PUT")

            def do_PATCH(self):
                self._handle("PATCH")

            def do_OPTIONS(self):
                self.send_response(204)
                self.send_header("Access-Control-Allow-Origin", "*")
                self.send_header("Access-Control-Allow-Methods", "GET, POST, PUT, PATCH, OPTIONS")
                self.send_header("Access-Control-Allow-Headers", "Content-Type")
                self.send_header("Content-Length", "0")
                self.end_headers()

        return Handler
