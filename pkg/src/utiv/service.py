"""Local annotation service: browse frames, edit boxes, persist canonical XML.

The service owns a dataset root in the standard layout and exposes a small
JSON/HTTP API for the browser frontend:

    GET  /frames?channel=&video=&page=&page_size=   frame summaries (paged)
    GET  /frames/{key}                              annotation + revision
    GET  /frames/{key}/image                        raw image bytes
    PUT  /frames/{key}                              save annotation
    GET  /progress                                  per-channel counts

Keys are ``<video_id>_<frame_number>``. PUT bodies are JSON mirroring the
annotation XML schema (channel, video, number, width, height, lines[]) and
must carry the last seen revision in the ``X-Expected-Revision`` header;
a stale revision is rejected with 409 and the disk is left untouched.
Writes are write-through and atomic: the XML is written to a temp file and
renamed over the target, so a crash mid-save never corrupts an existing
annotation. Persistence is the same XML tree the rest of the toolkit reads;
there is no separate database.

The server binds to loopback unless explicitly told otherwise; this is a
single-user labeling tool, not a hardened public service.
"""

from __future__ import annotations

import json
import logging
import os
import tempfile
import threading
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from PIL import Image

from utiv.dataset.corpus import IMAGE_SUFFIXES, find_frame_image
from utiv.dataset.model import SCRIPTS, FrameAnnotation, TextLine
from utiv.dataset.xml_io import parse_frame_annotation, write_frame_annotation
from utiv.errors import (
    AnnotationError,
    DatasetError,
    StaleRevisionError,
    UnknownFrameError,
    ValidationFailure,
)
from utiv.geometry import Rect

logger = logging.getLogger(__name__)

_MIME = {".png": "image/png", ".jpg": "image/jpeg", ".jpeg": "image/jpeg"}


@dataclass
class _FrameEntry:
    key: str
    channel: str
    video_id: str
    frame_number: int
    image_path: Path
    xml_path: Path
    width: int
    height: int
    revision: int = 0


def split_key(key: str) -> tuple[str, int]:
    video_id, _, number = key.rpartition("_")
    if not video_id:
        raise UnknownFrameError(f"malformed frame key {key!r}")
    try:
        return video_id, int(number)
    except ValueError:
        raise UnknownFrameError(f"malformed frame key {key!r}") from None


class AnnotationSession:
    """Stateful view over a dataset root for the annotation workflow.

    Frames are discovered from images (annotation XML is optional until the
    first save). Revisions start at 0 per frame and advance by exactly one
    per accepted write; writers must present the revision they read.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)
        if not self.root.is_dir():
            raise DatasetError(f"dataset root {self.root} is not a directory")
        self._lock = threading.Lock()
        self._frames: dict[str, _FrameEntry] = {}
        self._scan()

    def _scan(self) -> None:
        for image_path in sorted(self.root.glob("*/*/frames/*")):
            if image_path.suffix.lower() not in IMAGE_SUFFIXES:
                continue
            video_dir = image_path.parent.parent
            channel = video_dir.parent.name
            video_id, frame_number = split_key(image_path.stem)
            xml_path = video_dir / "gt" / f"{image_path.stem}.xml"
            if xml_path.exists():
                fa = parse_frame_annotation(xml_path.read_text(encoding="utf-8"))
                width, height = fa.width, fa.height
            else:
                with Image.open(image_path) as image:
                    width, height = image.size
            self._frames[image_path.stem] = _FrameEntry(
                key=image_path.stem,
                channel=channel,
                video_id=video_id,
                frame_number=frame_number,
                image_path=image_path,
                xml_path=xml_path,
                width=width,
                height=height,
            )

    def _entry(self, key: str) -> _FrameEntry:
        try:
            return self._frames[key]
        except KeyError:
            raise UnknownFrameError(f"unknown frame {key!r}") from None

    def list_frames(
        self,
        channel: str | None = None,
        video: str | None = None,
        page: int = 0,
        page_size: int = 100,
    ) -> dict:
        entries = [
            e
            for e in self._frames.values()
            if (channel is None or e.channel == channel) and (video is None or e.video_id == video)
        ]
        entries.sort(key=lambda e: (e.channel, e.video_id, e.frame_number))
        start = page * page_size
        window = entries[start : start + page_size]
        summaries = []
        for e in window:
            annotation = self._read_annotation(e)
            summaries.append(
                {
                    "key": e.key,
                    "channel": e.channel,
                    "video": e.video_id,
                    "number": e.frame_number,
                    "width": e.width,
                    "height": e.height,
                    "line_count": len(annotation.lines) if annotation else 0,
                    "annotated": e.xml_path.exists(),
                    "revision": e.revision,
                }
            )
        return {"frames": summaries, "page": page, "page_size": page_size, "total": len(entries)}

    def _read_annotation(self, entry: _FrameEntry) -> FrameAnnotation | None:
        if not entry.xml_path.exists():
            return None
        return parse_frame_annotation(entry.xml_path.read_text(encoding="utf-8"))

    def get_annotation(self, key: str) -> tuple[FrameAnnotation, int]:
        entry = self._entry(key)
        annotation = self._read_annotation(entry)
        if annotation is None:
            annotation = FrameAnnotation(
                channel=entry.channel,
                video_id=entry.video_id,
                frame_number=entry.frame_number,
                width=entry.width,
                height=entry.height,
                lines=(),
            )
        return annotation, entry.revision

    def get_image(self, key: str) -> tuple[bytes, str]:
        entry = self._entry(key)
        mime = _MIME.get(entry.image_path.suffix.lower(), "application/octet-stream")
        return entry.image_path.read_bytes(), mime

    def put_annotation(self, key: str, fa: FrameAnnotation, expected_revision: int) -> int:
        entry = self._entry(key)
        problems = []
        if fa.video_id != entry.video_id or fa.frame_number != entry.frame_number:
            problems.append(
                f"annotation names frame {fa.video_id}_{fa.frame_number}, expected {key}"
            )
        if fa.channel != entry.channel:
            problems.append(f"annotation names channel {fa.channel!r}, expected {entry.channel!r}")
        if (fa.width, fa.height) != (entry.width, entry.height):
            problems.append(
                f"annotation says {fa.width}x{fa.height}, frame is {entry.width}x{entry.height}"
            )
        problems.extend(fa.line_bounds_problems())
        if problems:
            raise ValidationFailure(problems)
        with self._lock:
            if expected_revision != entry.revision:
                raise StaleRevisionError(expected_revision, entry.revision)
            self._write_atomic(entry.xml_path, write_frame_annotation(fa))
            entry.revision += 1
            return entry.revision

    @staticmethod
    def _write_atomic(path: Path, text: str) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, temp_name = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".xml")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                handle.write(text)
            os.replace(temp_name, path)
        except BaseException:
            try:
                os.unlink(temp_name)
            except OSError:
                pass
            raise

    def progress(self) -> dict:
        """Per-channel annotation progress, recomputed from the current disk state."""
        channels: dict[str, dict[str, int]] = {}
        for entry in self._frames.values():
            bucket = channels.setdefault(
                entry.channel,
                {"frames": 0, "annotated": 0, "unannotated": 0, "urdu_lines": 0, "english_lines": 0},
            )
            bucket["frames"] += 1
            annotation = self._read_annotation(entry)
            if annotation is None:
                bucket["unannotated"] += 1
                continue
            bucket["annotated"] += 1
            for line in annotation.lines:
                bucket["urdu_lines" if line.script == "urdu" else "english_lines"] += 1
        totals = {"frames": 0, "annotated": 0, "unannotated": 0, "urdu_lines": 0, "english_lines": 0}
        for bucket in channels.values():
            for field in totals:
                totals[field] += bucket[field]
        return {"channels": channels, "total": totals}


def annotation_to_json(fa: FrameAnnotation) -> dict:
    return {
        "channel": fa.channel,
        "video": fa.video_id,
        "number": fa.frame_number,
        "width": fa.width,
        "height": fa.height,
        "lines": [
            {
                "x": line.box.x,
                "y": line.box.y,
                "width": line.box.width,
                "height": line.box.height,
                "script": line.script,
                "transcription": line.transcription,
            }
            for line in fa.lines
        ],
    }


def annotation_from_json(doc: object) -> FrameAnnotation:
    """Validate a JSON annotation document; raises ValidationFailure."""
    problems: list[str] = []
    if not isinstance(doc, dict):
        raise ValidationFailure(["annotation body must be a JSON object"])

    def field(name: str, kind: type, minimum: int | None = None):
        value = doc.get(name)
        if not isinstance(value, kind) or isinstance(value, bool):
            problems.append(f"field {name!r} must be {kind.__name__}")
            return None
        if minimum is not None and value < minimum:
            problems.append(f"field {name!r} must be >= {minimum}")
            return None
        return value

    channel = field("channel", str)
    video = field("video", str)
    number = field("number", int, minimum=0)
    width = field("width", int, minimum=1)
    height = field("height", int, minimum=1)
    raw_lines = doc.get("lines", [])
    if not isinstance(raw_lines, list):
        problems.append("field 'lines' must be a list")
        raw_lines = []
    lines = []
    for i, raw in enumerate(raw_lines):
        if not isinstance(raw, dict):
            problems.append(f"line {i}: must be an object")
            continue
        try:
            box = Rect(int(raw["x"]), int(raw["y"]), int(raw["width"]), int(raw["height"]))
        except (KeyError, TypeError, ValueError) as exc:
            problems.append(f"line {i}: bad box ({exc})")
            continue
        script = raw.get("script")
        if script not in SCRIPTS:
            problems.append(f"line {i}: unknown script {script!r}")
            continue
        transcription = raw.get("transcription", "")
        if not isinstance(transcription, str):
            problems.append(f"line {i}: transcription must be a string")
            continue
        lines.append(TextLine(box=box, script=script, transcription=transcription))
    if problems:
        raise ValidationFailure(problems)
    assert channel is not None and video is not None and number is not None
    assert width is not None and height is not None
    return FrameAnnotation(
        channel=channel,
        video_id=video,
        frame_number=number,
        width=width,
        height=height,
        lines=tuple(lines),
    )


class _Handler(BaseHTTPRequestHandler):
    server_version = "utiv-annotate/0.1"
    session: AnnotationSession  # injected by make_server
    ui_dir: Path | None = None

    def log_message(self, format: str, *args) -> None:  # noqa: A002 - stdlib signature
        logger.debug("%s %s", self.address_string(), format % args)

    def _send_json(self, status: int, payload: dict) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, PUT, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type, X-Expected-Revision")
        self.end_headers()
        self.wfile.write(body)

    def _send_bytes(self, status: int, body: bytes, mime: str) -> None:
        self.send_response(status)
        self.send_header("Content-Type", mime)
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def do_OPTIONS(self) -> None:  # CORS preflight for the dev frontend
        self._send_json(200, {})

    def do_GET(self) -> None:
        parsed = urlparse(self.path)
        parts = [p for p in parsed.path.split("/") if p]
        query = parse_qs(parsed.query)
        try:
            if parts == ["frames"]:
                self._send_json(
                    200,
                    self.session.list_frames(
                        channel=query.get("channel", [None])[0],
                        video=query.get("video", [None])[0],
                        page=int(query.get("page", ["0"])[0]),
                        page_size=int(query.get("page_size", ["100"])[0]),
                    ),
                )
            elif parts == ["progress"]:
                self._send_json(200, self.session.progress())
            elif len(parts) == 2 and parts[0] == "frames":
                annotation, revision = self.session.get_annotation(parts[1])
                self._send_json(
                    200, {"revision": revision, "annotation": annotation_to_json(annotation)}
                )
            elif len(parts) == 3 and parts[0] == "frames" and parts[2] == "image":
                body, mime = self.session.get_image(parts[1])
                self._send_bytes(200, body, mime)
            elif self.ui_dir is not None:
                self._serve_ui(parts)
            else:
                self._send_json(404, {"error": f"no such resource {parsed.path!r}"})
        except UnknownFrameError as exc:
            self._send_json(404, {"error": str(exc)})
        except ValueError as exc:
            self._send_json(422, {"error": f"bad query parameter: {exc}"})

    def _serve_ui(self, parts: list[str]) -> None:
        assert self.ui_dir is not None
        relative = "/".join(parts) if parts else "index.html"
        candidate = (self.ui_dir / relative).resolve()
        if not str(candidate).startswith(str(self.ui_dir.resolve())) or not candidate.is_file():
            self._send_json(404, {"error": f"no such file {relative!r}"})
            return
        mime = {
            ".html": "text/html; charset=utf-8",
            ".js": "text/javascript; charset=utf-8",
            ".css": "text/css; charset=utf-8",
        }.get(candidate.suffix, "application/octet-stream")
        self._send_bytes(200, candidate.read_bytes(), mime)

    def do_PUT(self) -> None:
        parsed = urlparse(self.path)
        parts = [p for p in parsed.path.split("/") if p]
        if len(parts) != 2 or parts[0] != "frames":
            self._send_json(404, {"error": f"no such resource {parsed.path!r}"})
            return
        key = parts[1]
        revision_header = self.headers.get("X-Expected-Revision")
        try:
            if revision_header is None:
                raise ValidationFailure(["missing X-Expected-Revision header"])
            try:
                expected_revision = int(revision_header)
            except ValueError:
                raise ValidationFailure([f"bad X-Expected-Revision {revision_header!r}"]) from None
            length = int(self.headers.get("Content-Length", "0"))
            raw = self.rfile.read(length)
            try:
                doc = json.loads(raw.decode("utf-8"))
            except (UnicodeDecodeError, json.JSONDecodeError) as exc:
                raise ValidationFailure([f"body is not valid JSON: {exc}"]) from None
            fa = annotation_from_json(doc)
            revision = self.session.put_annotation(key, fa, expected_revision)
            self._send_json(200, {"revision": revision})
        except UnknownFrameError as exc:
            self._send_json(404, {"error": str(exc)})
        except StaleRevisionError as exc:
            self._send_json(409, {"error": str(exc), "revision": exc.actual})
        except ValidationFailure as exc:
            self._send_json(422, {"error": "validation failed", "problems": exc.problems})
        except AnnotationError as exc:
            self._send_json(422, {"error": str(exc)})


def make_server(
    session: AnnotationSession,
    host: str = "127.0.0.1",
    port: int = 0,
    ui_dir: str | Path | None = None,
) -> ThreadingHTTPServer:
    """Build the HTTP server; port 0 picks a free ephemeral port."""
    handler = type(
        "BoundHandler",
        (_Handler,),
        {"session": session, "ui_dir": Path(ui_dir) if ui_dir else None},
    )
    return ThreadingHTTPServer((host, port), handler)


def serve(root: str | Path, host: str = "127.0.0.1", port: int = 8765, ui_dir: str | Path | None = None) -> None:
    """Run the annotation service until interrupted."""
    session = AnnotationSession(root)
    server = make_server(session, host, port, ui_dir)
    logger.info("annotation service on http://%s:%d (root=%s)", host, server.server_address[1], root)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
