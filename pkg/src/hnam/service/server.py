"""JSON-over-HTTP shell around the forecast service."""

from __future__ import annotations

import json
import logging
import mimetypes
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from .core import ForecastService, ServiceError

logger = logging.getLogger(__name__)


def make_handler(service: ForecastService, static_dir: Path | None):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):
            logger.debug("http: " + fmt, *args)

        def _send_json(self, body: dict, status: int = 200) -> None:
            payload = json.dumps(body).encode()
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(payload)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            self.wfile.write(payload)

        def _send_error_class(self, error_class: str, message: str, status: int) -> None:
            self._send_json(
                {"v": 1, "error": {"class": error_class, "message": message}}, status
            )

        def _read_body(self) -> dict:
            length = int(self.headers.get("Content-Length") or 0)
            if length == 0:
                return {}
            try:
                return json.loads(self.rfile.read(length).decode())
            except json.JSONDecodeError as exc:
                raise ServiceError("BAD_REQUEST", f"invalid JSON body: {exc}", 400)

        def _serve_static(self, path: str) -> None:
            if static_dir is None:
                self._send_error_class("NOT_FOUND", "no static assets configured", 404)
                return
            rel = path.lstrip("/") or "index.html"
            if rel.startswith("static/"):
                rel = rel[len("static/"):] or "index.html"
            target = (static_dir / rel).resolve()
            if not str(target).startswith(str(static_dir.resolve())) or not target.is_file():
                self._send_error_class("NOT_FOUND", f"no such asset {rel!r}", 404)
                return
            data = target.read_bytes()
            ctype = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
            self.send_response(200)
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(data)))
            self.end_headers()
            self.wfile.write(data)

        def do_GET(self):
            parsed = urlparse(self.path)
            try:
                if parsed.path == "/meta":
                    self._send_json(service.meta())
                elif parsed.path == "/series":
                    self._send_json(service.series())
                elif parsed.path == "/adjustments":
                    q = parse_qs(parsed.query)
                    fid = (q.get("forecast_id") or [""])[0]
                    self._send_json(service.adjustments(fid))
                elif parsed.path == "/" or parsed.path.startswith("/static"):
                    self._serve_static(parsed.path)
                else:
                    self._send_error_class("NOT_FOUND", f"no route {parsed.path}", 404)
            except ServiceError as exc:
                self._send_error_class(exc.error_class, str(exc), exc.status)
            except Exception as exc:  # pragma: no cover - defensive
                logger.exception("request failed")
                self._send_error_class("INTERNAL", str(exc), 500)

        def do_POST(self):
            parsed = urlparse(self.path)
            try:
                body = self._read_body()
                if parsed.path == "/forecast":
                    if "series" not in body or "origin" not in body:
                        raise ServiceError(
                            "BAD_REQUEST", "need series and origin", 400
                        )
                    self._send_json(service.forecast(body["series"], body["origin"]))
                elif parsed.path == "/whatif":
                    self._send_json(service.whatif(body))
                elif parsed.path == "/adjust":
                    self._send_json(service.adjust(body))
                else:
                    self._send_error_class("NOT_FOUND", f"no route {parsed.path}", 404)
            except ServiceError as exc:
                self._send_error_class(exc.error_class, str(exc), exc.status)
            except Exception as exc:  # pragma: no cover - defensive
                logger.exception("request failed")
                self._send_error_class("INTERNAL", str(exc), 500)

    return Handler


class ForecastHttpServer:
    """Threaded HTTP server over an immutable snapshot."""

    def __init__(
        self,
        service: ForecastService,
        host: str = "127.0.0.1",
        port: int = 8321,
        static_dir: str | Path | None = None,
    ):
        static = Path(static_dir) if static_dir else None
        self.httpd = ThreadingHTTPServer(
            (host, port), make_handler(service, static)
        )
        self._thread: threading.Thread | None = None

    @property
    def port(self) -> int:
        return self.httpd.server_address[1]

    def start_background(self) -> None:
        self._thread = threading.Thread(target=self.httpd.serve_forever, daemon=True)
        self._thread.start()

    def serve_forever(self) -> None:
        logger.info("serving on port %d", self.port)
        self.httpd.serve_forever()

    def shutdown(self) -> None:
        self.httpd.shutdown()
        if self._thread:
            self._thread.join(timeout=5)
        self.httpd.server_close()
