from __future__ import annotations

import random

import pytest

from utiv.dataset.model import FrameAnnotation, TextLine
from utiv.dataset.xml_io import parse_frame_annotation, write_frame_annotation
from utiv.errors import (
    InvalidValueError,
    MalformedXmlError,
    MissingAttributeError,
    OutOfBoundsError,
    SchemaError,
    UnknownScriptError,
)
from utiv.geometry import Rect

from .helpers import random_annotation

MINIMAL = '<frame channel="newsone" video="vid01" number="0" width="320" height="240">\n</frame>\n'


def test_parse_minimal_frame():
    fa = parse_frame_annotation(MINIMAL)
    assert fa == FrameAnnotation("newsone", "vid01", 0, 320, 240, ())


def test_parse_single_urdu_line():
    doc = (
        '<frame channel="newsone" video="vid01" number="7" width="900" height="600">\n'
        '  <textline x="10" y="20" width="300" height="40" script="urdu">\n'
        "    <transcription>خبر</transcription>\n"
        "  </textline>\n"
        "</frame>\n"
    )
    fa = parse_frame_annotation(doc)
    assert len(fa.lines) == 1
    line = fa.lines[0]
    assert line.box == Rect(10, 20, 300, 40)
    assert line.script == "urdu"
    assert line.transcription == "خبر"


def test_write_is_canonical_and_parse_inverts():
    fa = FrameAnnotation(
        channel="newsone",
        video_id="vid01",
        frame_number=3,
        width=640,
        height=360,
        lines=(
            TextLine(Rect(5, 6, 100, 30), "english", 'Quote "x" & <tag>'),
            TextLine(Rect(5, 200, 400, 30), "urdu", "تازہ ترین"),
        ),
    )
    text = write_frame_annotation(fa)
    assert parse_frame_annotation(text, strict=True) == fa
    # canonicalization is idempotent
    assert write_frame_annotation(parse_frame_annotation(text)) == text


def test_round_trip_on_random_corpus():
    rng = random.Random(50)
    for i in range(50):
        fa = random_annotation(rng, frame_number=i)
        text = write_frame_annotation(fa)
        assert parse_frame_annotation(text, strict=True) == fa
        assert write_frame_annotation(parse_frame_annotation(text)) == text


def test_transcription_preserved_verbatim():
    fa = FrameAnnotation(
        "c", "v", 0, 100, 100, (TextLine(Rect(0, 0, 10, 10), "english", "  spaced  out  "),)
    )
    back = parse_frame_annotation(write_frame_annotation(fa), strict=True)
    assert back.lines[0].transcription == "  spaced  out  "


def test_empty_transcription_round_trips():
    fa = FrameAnnotation("c", "v", 0, 100, 100, (TextLine(Rect(0, 0, 10, 10), "urdu", ""),))
    back = parse_frame_annotation(write_frame_annotation(fa), strict=True)
    assert back.lines[0].transcription == ""


class TestParseErrors:
    def test_malformed_xml_has_position(self):
        with pytest.raises(MalformedXmlError) as err:
            parse_frame_annotation("<frame channel='a'\n  <oops")
        assert err.value.line is not None

    def test_missing_attribute(self):
        doc = '<frame channel="c" video="v" number="0" width="100"></frame>'
        with pytest.raises(MissingAttributeError, match="height"):
            parse_frame_annotation(doc)

    def test_bad_integer(self):
        doc = '<frame channel="c" video="v" number="x" width="100" height="100"></frame>'
        with pytest.raises(InvalidValueError, match="number"):
            parse_frame_annotation(doc)

    def test_zero_size_frame(self):
        doc = '<frame channel="c" video="v" number="0" width="0" height="100"></frame>'
        with pytest.raises(InvalidValueError):
            parse_frame_annotation(doc)

    def test_box_outside_frame(self):
        doc = (
            '<frame channel="c" video="v" number="0" width="100" height="100">'
            '<textline x="50" y="0" width="60" height="10" script="urdu">'
            "<transcription>t</transcription></textline></frame>"
        )
        with pytest.raises(OutOfBoundsError) as err:
            parse_frame_annotation(doc)
        assert err.value.line == 1

    def test_degenerate_box_rejected_in_both_modes(self):
        doc = (
            '<frame channel="c" video="v" number="0" width="100" height="100">'
            '<textline x="0" y="0" width="0" height="10" script="urdu">'
            "<transcription>t</transcription></textline></frame>"
        )
        for strict in (False, True):
            with pytest.raises(InvalidValueError):
                parse_frame_annotation(doc, strict=strict)

    def test_unknown_script(self):
        doc = (
            '<frame channel="c" video="v" number="0" width="100" height="100">'
            '<textline x="0" y="0" width="10" height="10" script="latin">'
            "<transcription>t</transcription></textline></frame>"
        )
        with pytest.raises(UnknownScriptError, match="latin"):
            parse_frame_annotation(doc)

    def test_wrong_root(self):
        with pytest.raises(SchemaError, match="frame"):
            parse_frame_annotation("<annotation></annotation>")


class TestStrictVsLenient:
    UNKNOWN_CHILD = (
        '<frame channel="c" video="v" number="0" width="100" height="100">'
        "<metadata>extra</metadata></frame>"
    )
    UNKNOWN_ATTR = '<frame channel="c" video="v" number="0" width="100" height="100" fps="25"></frame>'

    def test_unknown_element_strict(self):
        with pytest.raises(SchemaError, match="metadata"):
            parse_frame_annotation(self.UNKNOWN_CHILD, strict=True)

    def test_unknown_element_lenient_warns(self, caplog):
        with caplog.at_level("WARNING"):
            fa = parse_frame_annotation(self.UNKNOWN_CHILD, strict=False)
        assert fa.lines == ()
        assert any("metadata" in rec.message for rec in caplog.records)

    def test_unknown_attribute_strict(self):
        with pytest.raises(SchemaError, match="fps"):
            parse_frame_annotation(self.UNKNOWN_ATTR, strict=True)

    def test_unknown_attribute_lenient(self, caplog):
        with caplog.at_level("WARNING"):
            fa = parse_frame_annotation(self.UNKNOWN_ATTR, strict=False)
        assert fa.width == 100

    def test_missing_transcription_strict(self):
        doc = (
            '<frame channel="c" video="v" number="0" width="100" height="100">'
            '<textline x="0" y="0" width="10" height="10" script="urdu"></textline></frame>'
        )
        with pytest.raises(SchemaError, match="transcription"):
            parse_frame_annotation(doc, strict=True)
        assert parse_frame_annotation(doc).lines[0].transcription == ""
