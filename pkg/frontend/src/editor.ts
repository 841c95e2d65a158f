import { ApiClient } from "./api.js";
import { bindShortcuts } from "./keyboard.js";
import { EditorModel, normalizeDrag } from "./model.js";
import type { AnnotationDoc, FrameSummary, LineDoc } from "./types.js";

export interface EditorOptions {
  api: ApiClient;
  root: HTMLElement;
  /** Called before leaving a dirty frame; return true to discard edits. */
  confirmUnsaved?: () => boolean;
}

/**
 * The annotation editor: an image with a drag-to-draw overlay, a line list
 * with script + transcription inputs, save with optimistic concurrency, and
 * frame navigation with an unsaved-changes guard.
 *
 * Every rendered box is derived from the model on each render pass, so the
 * canvas can never drift from the data.
 */
export class Editor {
  readonly model = new EditorModel();
  private readonly api: ApiClient;
  private readonly root: HTMLElement;
  private readonly confirmUnsaved: () => boolean;
  private frames: FrameSummary[] = [];
  private frameIndex = -1;
  private drag: { startX: number; startY: number; endX: number; endY: number } | null = null;
  private unbind: (() => void) | null = null;

  private overlay!: HTMLDivElement;
  private image!: HTMLImageElement;
  private lineList!: HTMLDivElement;
  private status!: HTMLSpanElement;
  private frameLabel!: HTMLSpanElement;
  private conflictPanel!: HTMLDivElement;

  constructor(options: EditorOptions) {
    this.api = options.api;
    this.root = options.root;
    this.confirmUnsaved = options.confirmUnsaved ?? (() => window.confirm("Discard unsaved changes?"));
    this.buildDom();
  }

  private buildDom(): void {
    this.root.innerHTML = `
      <div class="toolbar">
        <button data-action="prev">&#8592; prev</button>
        <span data-role="frame-label"></span>
        <button data-action="next">next &#8594;</button>
        <button data-action="save">save</button>
        <span data-role="status"></span>
      </div>
      <div class="stage">
        <img data-role="image" alt="" draggable="false" />
        <div data-role="overlay" class="overlay"></div>
      </div>
      <div data-role="lines" class="lines"></div>
      <div data-role="conflict" class="conflict" hidden></div>
    `;
    this.overlay = this.root.querySelector('[data-role="overlay"]') as HTMLDivElement;
    this.image = this.root.querySelector('[data-role="image"]') as HTMLImageElement;
    this.lineList = this.root.querySelector('[data-role="lines"]') as HTMLDivElement;
    this.status = this.root.querySelector('[data-role="status"]') as HTMLSpanElement;
    this.frameLabel = this.root.querySelector('[data-role="frame-label"]') as HTMLSpanElement;
    this.conflictPanel = this.root.querySelector('[data-role="conflict"]') as HTMLDivElement;

    (this.root.querySelector('[data-action="prev"]') as HTMLButtonElement).onclick = () => void this.previous();
    (this.root.querySelector('[data-action="next"]') as HTMLButtonElement).onclick = () => void this.next();
    (this.root.querySelector('[data-action="save"]') as HTMLButtonElement).onclick = () => void this.save();

    this.overlay.addEventListener("mousedown", (event) => this.onMouseDown(event));
    this.overlay.addEventListener("mousemove", (event) => this.onMouseMove(event));
    this.overlay.addEventListener("mouseup", (event) => this.onMouseUp(event));

    this.unbind = bindShortcuts(window, {
      "ctrl+s": () => void this.save(),
      "]": () => {
        this.model.cycleSelection(1);
        this.render();
      },
      "[": () => {
        this.model.cycleSelection(-1);
        this.render();
      },
      tab: () => {
        this.model.cycleSelection(1);
        this.render();
      },
      s: () => {
        if (this.model.selected !== null) {
          this.model.toggleScript(this.model.selected);
          this.render();
        }
      },
      delete: () => {
        if (this.model.selected !== null) {
          this.model.deleteLine(this.model.selected);
          this.render();
        }
      },
      n: () => void this.next(),
      p: () => void this.previous(),
      escape: () => {
        this.model.selected = null;
        this.render();
      },
    });
  }

  dispose(): void {
    this.unbind?.();
    this.unbind = null;
  }

  async start(): Promise<void> {
    const listing = await this.api.listFrames({ pageSize: 1000 });
    this.frames = listing.frames;
    if (this.frames.length > 0) await this.jumpTo(0, { force: true });
    else this.setStatus("no frames in the dataset");
  }

  get frameKeys(): string[] {
    return this.frames.map((f) => f.key);
  }

  async jumpTo(index: number, options: { force?: boolean } = {}): Promise<boolean> {
    if (index < 0 || index >= this.frames.length) return false;
    if (!options.force && this.model.dirty && !this.confirmUnsaved()) return false;
    const frame = this.frames[index]!;
    const response = await this.api.getFrame(frame.key);
    this.frameIndex = index;
    this.model.loadFrame(frame.key, response.annotation, response.revision);
    this.image.src = this.api.imageUrl(frame.key);
    this.image.width = response.annotation.width;
    this.image.height = response.annotation.height;
    this.setStatus(`loaded revision ${response.revision}`);
    this.render();
    return true;
  }

  async next(): Promise<boolean> {
    return this.jumpTo(this.frameIndex + 1);
  }

  async previous(): Promise<boolean> {
    return this.jumpTo(this.frameIndex - 1);
  }

  /** Map a mouse event to image-space pixels (identity when unrendered). */
  private toImageCoords(event: MouseEvent): { x: number; y: number } {
    const annotation = this.model.annotation;
    const rect = this.overlay.getBoundingClientRect();
    const scaleX = rect.width > 0 && annotation ? annotation.width / rect.width : 1;
    const scaleY = rect.height > 0 && annotation ? annotation.height / rect.height : 1;
    return { x: (event.clientX - rect.left) * scaleX, y: (event.clientY - rect.top) * scaleY };
  }

  private onMouseDown(event: MouseEvent): void {
    if (!this.model.annotation) return;
    const target = event.target as HTMLElement;
    const boxIndex = target.dataset?.boxIndex;
    if (boxIndex !== undefined) {
      this.model.selected = Number(boxIndex);
      this.render();
      return;
    }
    const { x, y } = this.toImageCoords(event);
    this.drag = { startX: x, startY: y, endX: x, endY: y };
  }

  private onMouseMove(event: MouseEvent): void {
    if (!this.drag) return;
    const { x, y } = this.toImageCoords(event);
    this.drag.endX = x;
    this.drag.endY = y;
  }

  private onMouseUp(event: MouseEvent): void {
    if (!this.drag || !this.model.annotation) return;
    const { x, y } = this.toImageCoords(event);
    this.drag.endX = x;
    this.drag.endY = y;
    const box = normalizeDrag(this.drag, this.model.annotation.width, this.model.annotation.height);
    this.drag = null;
    if (!box) return; // accidental click
    this.model.addBox(box);
    this.render();
  }

  async save(): Promise<void> {
    const { key, annotation } = this.model;
    if (!key || !annotation) return;
    if (!this.model.dirty) {
      this.setStatus("nothing to save");
      return;
    }
    const result = await this.api.putAnnotation(key, annotation, this.model.revision);
    if (result.kind === "saved") {
      this.model.markSaved(result.revision);
      this.setStatus(`saved revision ${result.revision}`);
    } else if (result.kind === "conflict") {
      const server = await this.api.getFrame(key);
      this.model.markConflict(server.annotation, server.revision);
      this.setStatus(`conflict: frame changed to revision ${server.revision}`);
    } else {
      this.setStatus(`rejected: ${result.problems.join("; ")}`);
    }
    this.render();
  }

  async resolveConflictKeepMine(): Promise<void> {
    this.model.resolveKeepMine();
    this.render();
    await this.save();
  }

  resolveConflictTakeServer(): void {
    this.model.resolveTakeServer();
    this.setStatus(`took server revision ${this.model.revision}`);
    this.render();
  }

  private setStatus(text: string): void {
    this.status.textContent = text;
  }

  private renderBoxes(): void {
    const annotation = this.model.annotation;
    this.overlay.querySelectorAll("[data-box-index]").forEach((node) => node.remove());
    if (!annotation) return;
    annotation.lines.forEach((line, index) => {
      const div = document.createElement("div");
      div.dataset.boxIndex = String(index);
      div.className = "box" + (index === this.model.selected ? " selected" : "") + ` script-${line.script}`;
      div.style.left = `${(line.x / annotation.width) * 100}%`;
      div.style.top = `${(line.y / annotation.height) * 100}%`;
      div.style.width = `${(line.width / annotation.width) * 100}%`;
      div.style.height = `${(line.height / annotation.height) * 100}%`;
      this.overlay.appendChild(div);
    });
  }

  private renderLineRow(line: LineDoc, index: number): HTMLDivElement {
    const row = document.createElement("div");
    row.className = "line-row" + (index === this.model.selected ? " selected" : "");
    row.dataset.lineIndex = String(index);

    const select = document.createElement("select");
    for (const script of ["urdu", "english"] as const) {
      const option = document.createElement("option");
      option.value = script;
      option.textContent = script;
      option.selected = line.script === script;
      select.appendChild(option);
    }
    select.onchange = () => {
      this.model.setScript(index, select.value as LineDoc["script"]);
      this.render();
    };

    const input = document.createElement("input");
    input.type = "text";
    input.value = line.transcription;
    input.placeholder = "transcription";
    input.dir = line.script === "urdu" ? "rtl" : "ltr";
    input.oninput = () => this.model.setTranscription(index, input.value);
    input.onfocus = () => {
      this.model.selected = index;
      this.renderBoxes();
    };

    const del = document.createElement("button");
    del.textContent = "delete";
    del.onclick = () => {
      this.model.deleteLine(index);
      this.render();
    };

    row.append(select, input, del);
    return row;
  }

  private renderConflict(): void {
    const conflict = this.model.conflict;
    if (!conflict) {
      this.conflictPanel.hidden = true;
      this.conflictPanel.innerHTML = "";
      return;
    }
    this.conflictPanel.hidden = false;
    this.conflictPanel.innerHTML = `
      <p>Someone else saved revision ${conflict.serverRevision}. Nothing was overwritten.</p>
      <div class="conflict-columns">
        <div><h4>server copy</h4><pre data-role="server-copy"></pre></div>
        <div><h4>your copy</h4><pre data-role="local-copy"></pre></div>
      </div>
      <button data-action="keep-mine">save my version</button>
      <button data-action="take-server">take server version</button>
    `;
    const describe = (doc: AnnotationDoc) =>
      doc.lines.map((l) => `${l.script} (${l.x},${l.y},${l.width},${l.height}) "${l.transcription}"`).join("\n");
    (this.conflictPanel.querySelector('[data-role="server-copy"]') as HTMLPreElement).textContent =
      describe(conflict.server);
    (this.conflictPanel.querySelector('[data-role="local-copy"]') as HTMLPreElement).textContent = describe(
      this.model.annotation!,
    );
    (this.conflictPanel.querySelector('[data-action="keep-mine"]') as HTMLButtonElement).onclick = () =>
      void this.resolveConflictKeepMine();
    (this.conflictPanel.querySelector('[data-action="take-server"]') as HTMLButtonElement).onclick = () =>
      this.resolveConflictTakeServer();
  }

  render(): void {
    const annotation = this.model.annotation;
    const frame = this.frames[this.frameIndex];
    this.frameLabel.textContent = frame
      ? `${frame.key} (${this.frameIndex + 1}/${this.frames.length})${this.model.dirty ? " *" : ""}`
      : "";
    this.renderBoxes();
    this.lineList.innerHTML = "";
    annotation?.lines.forEach((line, index) => this.lineList.appendChild(this.renderLineRow(line, index)));
    this.renderConflict();
  }
}
