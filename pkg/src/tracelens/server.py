"""JSON/HTTP service over exported explanations, study pages and ratings.

Read endpoints serve documents straight from disk; the only write path is
POST /ratings, which validates a rating record and appends one CSV row
through a single-writer lock so rows are never torn.
"""

from __future__ import annotations

import json
import os
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .study import (
    MoreInfo,
    RATINGS_HEADER,
    RatingRecord,
    format_rating_row,
)


class RatingsWriter:
    """Append-only ratings CSV with whole-row writes."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()

    def append(self, record: RatingRecord) -> None:
        row = format_rating_row(record) + "\n"
        with self._lock:
            fresh = not self.path.exists() or self.path.stat().st_size == 0
            payload = (RATINGS_HEADER + "\n" + row) if fresh else row
            fd = os.open(self.path, os.O_WRONLY | os.O_CREAT | os.O_APPEND, 0o644)
            try:
                os.write(fd, payload.encode("utf-8"))
            finally:
                os.close(fd)


def parse_rating_json(body: bytes) -> RatingRecord:
    """Decode a POST /ratings body; raises ValueError with a reason on any
    invariant violation."""
    try:
        doc = json.loads(body.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ValueError(f"invalid JSON body: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValueError("body must be an object")
    likert = []
    for i in range(1, 6):
        value = doc.get(f"q{i}")
        if (
            not isinstance(value, (list, tuple))
            or len(value) != 2
            or not all(isinstance(v, int) and not isinstance(v, bool) for v in value)
        ):
            raise ValueError(f"q{i} must be a pair of integers [exp1, exp2]")
        likert.append((value[0], value[1]))
    raw_more = doc.get("more_info")
    try:
        more_info = MoreInfo(raw_more)
    except ValueError as exc:
        raise ValueError("more_info must be one of: yes, no, idk") from exc
    record = RatingRecord(
        participant=str(doc.get("participant", "")),
        page=str(doc.get("page", "")),
        likert=tuple(likert),
        more_info=more_info,
        feedback=str(doc.get("feedback", "")),
        justification=str(doc.get("justification", "")),
    )
    problems = record.validate()
    if problems:
        raise ValueError("; ".join(problems))
    return record


class ExplanationService:
    def __init__(
        self,
        export_dir: str | Path,
        ratings_path: str | Path,
        pages_path: str | Path | None = None,
    ):
        self.export_dir = Path(export_dir)
        self.ratings = RatingsWriter(ratings_path)
        if pages_path is None:
            candidate = self.export_dir / "pages.json"
            pages_path = candidate if candidate.exists() else None
        self.pages_path = Path(pages_path) if pages_path else None

    def list_explanations(self) -> list[dict]:
        entries = []
        for path in sorted(self.export_dir.glob("*.json")):
            if self.pages_path and path.resolve() == self.pages_path.resolve():
                continue
            try:
                doc = json.loads(path.read_text("utf-8"))
            except (OSError, json.JSONDecodeError):
                continue
            if "layers" not in doc:
                continue
            entries.append(
                {
                    "id": path.stem,
                    "scenario": doc.get("scenario", ""),
                    "domain": doc.get("domain", ""),
                }
            )
        return entries

    def explanation_bytes(self, explanation_id: str) -> bytes | None:
        if "/" in explanation_id or "\\" in explanation_id or ".." in explanation_id:
            return None
        path = self.export_dir / f"{explanation_id}.json"
        if not path.exists():
            return None
        return path.read_bytes()

    def pages_doc(self) -> dict:
        if self.pages_path is None or not self.pages_path.exists():
            return {"pages": []}
        return json.loads(self.pages_path.read_text("utf-8"))


class _Handler(BaseHTTPRequestHandler):
    service: ExplanationService  # set by make_server

    def log_message(self, format: str, *args) -> None:  # noqa: A002 (stdlib signature)
        pass

    def _send(self, status: int, payload: bytes, content_type: str = "application/json") -> None:
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(payload)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.end_headers()
        self.wfile.write(payload)

    def _send_json(self, status: int, doc) -> None:
        self._send(status, (json.dumps(doc, ensure_ascii=False) + "\n").encode("utf-8"))

    def do_OPTIONS(self) -> None:
        self._send(204, b"")

    def do_GET(self) -> None:
        path = self.path.split("?", 1)[0].rstrip("/") or "/"
        if path == "/explanations":
            self._send_json(200, self.service.list_explanations())
        elif path.startswith("/explanations/"):
            body = self.service.explanation_bytes(path[len("/explanations/"):])
            if body is None:
                self._send_json(404, {"error": "unknown explanation"})
            else:
                self._send(200, body)
        elif path == "/pages":
            self._send_json(200, self.service.pages_doc().get("pages", []))
        elif path.startswith("/pages/"):
            page_id = path[len("/pages/"):]
            for page in self.service.pages_doc().get("pages", []):
                if page.get("id") == page_id:
                    self._send_json(200, page)
                    return
            self._send_json(404, {"error": "unknown page"})
        else:
            self._send_json(404, {"error": "unknown path"})

    def do_POST(self) -> None:
        path = self.path.split("?", 1)[0].rstrip("/")
        if path != "/ratings":
            self._send_json(404, {"error": "unknown path"})
            return
        length = int(self.headers.get("Content-Length", "0"))
        body = self.rfile.read(length) if length else b""
        try:
            record = parse_rating_json(body)
        except ValueError as exc:
            self._send_json(400, {"error": str(exc)})
            return
        self.service.ratings.append(record)
        self._send_json(201, {"status": "recorded", "page": record.page})


def make_server(
    service: ExplanationService, host: str = "127.0.0.1", port: int = 8787
) -> ThreadingHTTPServer:
    handler = type("BoundHandler", (_Handler,), {"service": service})
    return ThreadingHTTPServer((host, port), handler)


def serve_forever(service: ExplanationService, host: str, port: int) -> None:
    server = make_server(service, host, port)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.shutdown()
        server.server_close()
