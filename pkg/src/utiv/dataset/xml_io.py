"""Canonical XML round-trip for frame annotations.

One file per frame, named ``<video_id>_<frame_number>.xml``:

    <frame channel="..." video="..." number="..." width="..." height="...">
      <textline x="..." y="..." width="..." height="..." script="urdu|english">
        <transcription>...</transcription>
      </textline>
    </frame>

The writer emits a fixed element order, fixed attribute order, 2-space
indentation and UTF-8, so ``parse o write`` is the identity and
``write o parse`` canonicalizes any equivalent document. Transcriptions are
stored verbatim; surrounding markup whitespace is never folded into them.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from xml.parsers import expat
from xml.sax.saxutils import escape, quoteattr

from utiv.dataset.model import SCRIPTS, FrameAnnotation, TextLine
from utiv.errors import (
    InvalidValueError,
    MalformedXmlError,
    MissingAttributeError,
    OutOfBoundsError,
    SchemaError,
    UnknownScriptError,
)
from utiv.geometry import Rect

logger = logging.getLogger(__name__)

_FRAME_ATTRS = ("channel", "video", "number", "width", "height")
_LINE_ATTRS = ("x", "y", "width", "height", "script")


@dataclass
class _Node:
    tag: str
    attrs: dict[str, str]
    line: int
    column: int
    children: list["_Node"] = field(default_factory=list)
    text: str = ""


def _build_tree(xml_text: str) -> _Node:
    """Parse into a minimal node tree, recording 1-based line/column."""
    parser = expat.ParserCreate()
    root: list[_Node] = []
    stack: list[_Node] = []

    def start(tag: str, attrs: dict[str, str]) -> None:
        node = _Node(tag, attrs, parser.CurrentLineNumber, parser.CurrentColumnNumber + 1)
        if stack:
            stack[-1].children.append(node)
        else:
            root.append(node)
        stack.append(node)

    def end(tag: str) -> None:
        stack.pop()

    def chars(data: str) -> None:
        if stack:
            stack[-1].text += data

    parser.StartElementHandler = start
    parser.EndElementHandler = end
    parser.CharacterDataHandler = chars
    try:
        parser.Parse(xml_text, True)
    except expat.ExpatError as exc:
        raise MalformedXmlError(
            expat.errors.messages[exc.code], line=exc.lineno, column=exc.offset + 1
        ) from exc
    return root[0]


def _int_attr(node: _Node, name: str, minimum: int | None = None) -> int:
    if name not in node.attrs:
        raise MissingAttributeError(
            f"<{node.tag}> missing required attribute {name!r}", node.line, node.column
        )
    raw = node.attrs[name]
    try:
        value = int(raw)
    except ValueError:
        raise InvalidValueError(
            f"<{node.tag}> attribute {name}={raw!r} is not an integer", node.line, node.column
        ) from None
    if minimum is not None and value < minimum:
        raise InvalidValueError(
            f"<{node.tag}> attribute {name}={value} below minimum {minimum}", node.line, node.column
        )
    return value


def _str_attr(node: _Node, name: str) -> str:
    if name not in node.attrs:
        raise MissingAttributeError(
            f"<{node.tag}> missing required attribute {name!r}", node.line, node.column
        )
    return node.attrs[name]


def _reject_unknown(node: _Node, known_attrs: tuple[str, ...], strict: bool) -> None:
    for name in node.attrs:
        if name not in known_attrs:
            message = f"<{node.tag}> has unknown attribute {name!r}"
            if strict:
                raise SchemaError(message, node.line, node.column)
            logger.warning("%s (line %d)", message, node.line)


def _parse_textline(node: _Node, frame_width: int, frame_height: int, strict: bool) -> TextLine:
    _reject_unknown(node, _LINE_ATTRS, strict)
    x = _int_attr(node, "x")
    y = _int_attr(node, "y")
    width = _int_attr(node, "width", minimum=1)
    height = _int_attr(node, "height", minimum=1)
    script = _str_attr(node, "script")
    if script not in SCRIPTS:
        raise UnknownScriptError(
            f"unknown script {script!r}, expected one of {SCRIPTS}", node.line, node.column
        )
    if x < 0 or y < 0 or x + width > frame_width or y + height > frame_height:
        raise OutOfBoundsError(
            f"box ({x},{y},{width},{height}) outside frame {frame_width}x{frame_height}",
            node.line,
            node.column,
        )
    transcription = ""
    seen = False
    for child in node.children:
        if child.tag == "transcription":
            if seen:
                message = "<textline> has more than one <transcription>"
                if strict:
                    raise SchemaError(message, child.line, child.column)
                logger.warning("%s (line %d)", message, child.line)
                continue
            seen = True
            transcription = child.text
        else:
            message = f"<textline> has unknown child <{child.tag}>"
            if strict:
                raise SchemaError(message, child.line, child.column)
            logger.warning("%s (line %d)", message, child.line)
    if not seen and strict:
        raise SchemaError("<textline> missing <transcription>", node.line, node.column)
    return TextLine(box=Rect(x, y, width, height), script=script, transcription=transcription)


def parse_frame_annotation(xml_text: str, strict: bool = False) -> FrameAnnotation:
    """Parse one annotation document.

    In strict mode unknown elements and attributes are rejected; in lenient
    mode they are logged and skipped. Structural and value errors (malformed
    XML, missing attributes, degenerate or out-of-bounds boxes, unknown
    scripts) are rejected in both modes, each with line/column context.
    """
    root = _build_tree(xml_text)
    if root.tag != "frame":
        raise SchemaError(f"root element must be <frame>, got <{root.tag}>", root.line, root.column)
    _reject_unknown(root, _FRAME_ATTRS, strict)
    channel = _str_attr(root, "channel")
    video = _str_attr(root, "video")
    number = _int_attr(root, "number", minimum=0)
    width = _int_attr(root, "width", minimum=1)
    height = _int_attr(root, "height", minimum=1)
    if root.text.strip():
        message = "<frame> contains stray text"
        if strict:
            raise SchemaError(message, root.line, root.column)
        logger.warning("%s (line %d)", message, root.line)
    lines = []
    for child in root.children:
        if child.tag == "textline":
            lines.append(_parse_textline(child, width, height, strict))
        else:
            message = f"<frame> has unknown child <{child.tag}>"
            if strict:
                raise SchemaError(message, child.line, child.column)
            logger.warning("%s (line %d)", message, child.line)
    return FrameAnnotation(
        channel=channel,
        video_id=video,
        frame_number=number,
        width=width,
        height=height,
        lines=tuple(lines),
    )


def write_frame_annotation(fa: FrameAnnotation) -> str:
    """Serialize to the canonical document (fixed order, 2-space indent)."""
    out = ['<?xml version="1.0" encoding="UTF-8"?>']
    out.append(
        "<frame"
        f" channel={quoteattr(fa.channel)}"
        f" video={quoteattr(fa.video_id)}"
        f' number="{fa.frame_number}"'
        f' width="{fa.width}"'
        f' height="{fa.height}">'
    )
    for line in fa.lines:
        b = line.box
        out.append(
            "  <textline"
            f' x="{b.x}" y="{b.y}" width="{b.width}" height="{b.height}"'
            f" script={quoteattr(line.script)}>"
        )
        out.append(f"    <transcription>{escape(line.transcription)}</transcription>")
        out.append("  </textline>")
    out.append("</frame>")
    return "\n".join(out) + "\n"
