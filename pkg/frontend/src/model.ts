import type { AnnotationDoc, Box, LineDoc, Script } from "./types.js";

/** Drags smaller than this (after clamping) are accidental clicks. */
export const MIN_BOX_SIZE = 4;

export interface DragGesture {
  startX: number;
  startY: number;
  endX: number;
  endY: number;
}

/**
 * Turn a drag in image coordinates into a box: direction-normalized
 * (dragging up-left works), clamped to the image, rounded to pixels.
 * Returns null for sub-minimum drags.
 */
export function normalizeDrag(gesture: DragGesture, imageWidth: number, imageHeight: number): Box | null {
  const clampX = (v: number) => Math.min(Math.max(Math.round(v), 0), imageWidth);
  const clampY = (v: number) => Math.min(Math.max(Math.round(v), 0), imageHeight);
  const x0 = clampX(Math.min(gesture.startX, gesture.endX));
  const x1 = clampX(Math.max(gesture.startX, gesture.endX));
  const y0 = clampY(Math.min(gesture.startY, gesture.endY));
  const y1 = clampY(Math.max(gesture.startY, gesture.endY));
  if (x1 - x0 < MIN_BOX_SIZE || y1 - y0 < MIN_BOX_SIZE) return null;
  return { x: x0, y: y0, width: x1 - x0, height: y1 - y0 };
}

export function clampBoxToImage(box: Box, imageWidth: number, imageHeight: number): Box {
  const x = Math.min(Math.max(box.x, 0), imageWidth - 1);
  const y = Math.min(Math.max(box.y, 0), imageHeight - 1);
  return {
    x,
    y,
    width: Math.max(1, Math.min(box.width, imageWidth - x)),
    height: Math.max(1, Math.min(box.height, imageHeight - y)),
  };
}

/**
 * Working state for one frame: the editable annotation copy, the last saved
 * snapshot (for the dirty flag), the selection, the revision last read from
 * the server, and a pending conflict, if a save was rejected as stale.
 */
export class EditorModel {
  key: string | null = null;
  annotation: AnnotationDoc | null = null;
  revision = 0;
  selected: number | null = null;
  conflict: { server: AnnotationDoc; serverRevision: number } | null = null;
  private savedSnapshot = "";

  loadFrame(key: string, annotation: AnnotationDoc, revision: number): void {
    this.key = key;
    this.annotation = structuredClone(annotation);
    this.revision = revision;
    this.selected = annotation.lines.length > 0 ? 0 : null;
    this.conflict = null;
    this.savedSnapshot = JSON.stringify(this.annotation.lines);
  }

  get dirty(): boolean {
    if (!this.annotation) return false;
    return JSON.stringify(this.annotation.lines) !== this.savedSnapshot;
  }

  /** Script for the next new box: whatever the previous box used. */
  get defaultScript(): Script {
    const lines = this.annotation?.lines;
    if (lines && lines.length > 0) return lines[lines.length - 1]!.script;
    return "urdu";
  }

  addBox(box: Box): number {
    if (!this.annotation) throw new Error("no frame loaded");
    const line: LineDoc = { ...box, script: this.defaultScript, transcription: "" };
    this.annotation.lines.push(line);
    this.selected = this.annotation.lines.length - 1;
    return this.selected;
  }

  line(index: number): LineDoc {
    const line = this.annotation?.lines[index];
    if (!line) throw new Error(`no line ${index}`);
    return line;
  }

  setScript(index: number, script: Script): void {
    this.line(index).script = script;
  }

  toggleScript(index: number): Script {
    const line = this.line(index);
    line.script = line.script === "urdu" ? "english" : "urdu";
    return line.script;
  }

  setTranscription(index: number, text: string): void {
    this.line(index).transcription = text;
  }

  deleteLine(index: number): void {
    if (!this.annotation) return;
    this.annotation.lines.splice(index, 1);
    if (this.annotation.lines.length === 0) this.selected = null;
    else if (this.selected !== null) this.selected = Math.min(this.selected, this.annotation.lines.length - 1);
  }

  cycleSelection(step: 1 | -1): void {
    const count = this.annotation?.lines.length ?? 0;
    if (count === 0) return;
    const current = this.selected ?? (step === 1 ? -1 : 0);
    this.selected = (current + step + count) % count;
  }

  markSaved(revision: number): void {
    this.revision = revision;
    this.conflict = null;
    this.savedSnapshot = JSON.stringify(this.annotation?.lines ?? []);
  }

  markConflict(server: AnnotationDoc, serverRevision: number): void {
    this.conflict = { server: structuredClone(server), serverRevision };
  }

  /** Keep local edits and retry against the server's revision. */
  resolveKeepMine(): void {
    if (!this.conflict) return;
    this.revision = this.conflict.serverRevision;
    this.conflict = null;
  }

  /** Discard local edits in favor of the server copy. */
  resolveTakeServer(): void {
    if (!this.conflict || !this.annotation) return;
    this.annotation = structuredClone(this.conflict.server);
    this.revision = this.conflict.serverRevision;
    this.selected = this.annotation.lines.length > 0 ? 0 : null;
    this.savedSnapshot = JSON.stringify(this.annotation.lines);
    this.conflict = null;
  }
}
