import { describe, expect, it } from "vitest";

import { EditorModel, MIN_BOX_SIZE, clampBoxToImage, normalizeDrag } from "../src/model.js";
import type { AnnotationDoc } from "../src/types.js";

function emptyDoc(lines: AnnotationDoc["lines"] = []): AnnotationDoc {
  return { channel: "ch", video: "vid", number: 0, width: 320, height: 240, lines };
}

describe("normalizeDrag", () => {
  it("turns a forward drag into a box", () => {
    expect(normalizeDrag({ startX: 10, startY: 10, endX: 110, endY: 40 }, 320, 240)).toEqual({
      x: 10,
      y: 10,
      width: 100,
      height: 30,
    });
  });

  it("normalizes a reverse drag to the same box", () => {
    expect(normalizeDrag({ startX: 110, startY: 40, endX: 10, endY: 10 }, 320, 240)).toEqual({
      x: 10,
      y: 10,
      width: 100,
      height: 30,
    });
  });

  it("clamps a drag past the right edge to the image", () => {
    expect(normalizeDrag({ startX: 300, startY: 0, endX: 500, endY: 20 }, 320, 240)).toEqual({
      x: 300,
      y: 0,
      width: 20,
      height: 20,
    });
  });

  it("discards sub-minimum drags", () => {
    expect(normalizeDrag({ startX: 5, startY: 5, endX: 5 + MIN_BOX_SIZE - 1, endY: 100 }, 320, 240)).toBeNull();
    expect(normalizeDrag({ startX: 5, startY: 5, endX: 100, endY: 7 }, 320, 240)).toBeNull();
  });

  it("rounds fractional coordinates", () => {
    expect(normalizeDrag({ startX: 10.4, startY: 9.6, endX: 110.5, endY: 40.2 }, 320, 240)).toEqual({
      x: 10,
      y: 10,
      width: 101,
      height: 30,
    });
  });
});

describe("clampBoxToImage", () => {
  it("keeps in-bounds boxes unchanged", () => {
    expect(clampBoxToImage({ x: 5, y: 5, width: 50, height: 20 }, 320, 240)).toEqual({
      x: 5,
      y: 5,
      width: 50,
      height: 20,
    });
  });

  it("trims overflow", () => {
    expect(clampBoxToImage({ x: 300, y: 230, width: 100, height: 100 }, 320, 240)).toEqual({
      x: 300,
      y: 230,
      width: 20,
      height: 10,
    });
  });
});

describe("EditorModel", () => {
  it("is clean after load and dirty after an edit", () => {
    const model = new EditorModel();
    model.loadFrame("vid_0", emptyDoc(), 0);
    expect(model.dirty).toBe(false);
    model.addBox({ x: 1, y: 2, width: 30, height: 10 });
    expect(model.dirty).toBe(true);
    model.markSaved(1);
    expect(model.dirty).toBe(false);
    expect(model.revision).toBe(1);
  });

  it("defaults the first box to urdu, later boxes to the previous script", () => {
    const model = new EditorModel();
    model.loadFrame("vid_0", emptyDoc(), 0);
    const first = model.addBox({ x: 0, y: 0, width: 10, height: 10 });
    expect(model.line(first).script).toBe("urdu");
    model.setScript(first, "english");
    const second = model.addBox({ x: 0, y: 20, width: 10, height: 10 });
    expect(model.line(second).script).toBe("english");
  });

  it("cycles the selection in both directions", () => {
    const model = new EditorModel();
    model.loadFrame(
      "vid_0",
      emptyDoc([
        { x: 0, y: 0, width: 10, height: 10, script: "urdu", transcription: "" },
        { x: 0, y: 20, width: 10, height: 10, script: "urdu", transcription: "" },
      ]),
      0,
    );
    expect(model.selected).toBe(0);
    model.cycleSelection(1);
    expect(model.selected).toBe(1);
    model.cycleSelection(1);
    expect(model.selected).toBe(0);
    model.cycleSelection(-1);
    expect(model.selected).toBe(1);
  });

  it("keeps local edits through a conflict and retry", () => {
    const model = new EditorModel();
    model.loadFrame("vid_0", emptyDoc(), 0);
    model.addBox({ x: 5, y: 5, width: 40, height: 12 });
    const serverDoc = emptyDoc([
      { x: 100, y: 100, width: 20, height: 20, script: "english", transcription: "them" },
    ]);
    model.markConflict(serverDoc, 3);
    expect(model.conflict?.serverRevision).toBe(3);
    expect(model.annotation?.lines).toHaveLength(1); // local copy untouched
    model.resolveKeepMine();
    expect(model.conflict).toBeNull();
    expect(model.revision).toBe(3);
    expect(model.annotation?.lines[0]?.x).toBe(5);
  });

  it("can adopt the server copy instead", () => {
    const model = new EditorModel();
    model.loadFrame("vid_0", emptyDoc(), 0);
    model.addBox({ x: 5, y: 5, width: 40, height: 12 });
    const serverDoc = emptyDoc([
      { x: 100, y: 100, width: 20, height: 20, script: "english", transcription: "them" },
    ]);
    model.markConflict(serverDoc, 3);
    model.resolveTakeServer();
    expect(model.annotation?.lines[0]?.transcription).toBe("them");
    expect(model.dirty).toBe(false);
    expect(model.revision).toBe(3);
  });

  it("deleting the last line clears the selection", () => {
    const model = new EditorModel();
    model.loadFrame("vid_0", emptyDoc(), 0);
    model.addBox({ x: 0, y: 0, width: 10, height: 10 });
    model.deleteLine(0);
    expect(model.selected).toBeNull();
    expect(model.annotation?.lines).toHaveLength(0);
  });
});
