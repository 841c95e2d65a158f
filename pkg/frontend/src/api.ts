import type { AnnotationDoc, FrameListing, Progress } from "./types.js";

export interface FrameResponse {
  revision: number;
  annotation: AnnotationDoc;
}

export type SaveResult =
  | { kind: "saved"; revision: number }
  | { kind: "conflict"; revision: number }
  | { kind: "invalid"; problems: string[] };

/** Typed client for the annotation service wire protocol. */
export class ApiClient {
  constructor(readonly base: string = "") {}

  private url(path: string): string {
    return `${this.base}${path}`;
  }

  async listFrames(params: { channel?: string; video?: string; page?: number; pageSize?: number } = {}): Promise<FrameListing> {
    const query = new URLSearchParams();
    if (params.channel) query.set("channel", params.channel);
    if (params.video) query.set("video", params.video);
    if (params.page !== undefined) query.set("page", String(params.page));
    if (params.pageSize !== undefined) query.set("page_size", String(params.pageSize));
    const suffix = query.toString() ? `?${query}` : "";
    const response = await fetch(this.url(`/frames${suffix}`));
    if (!response.ok) throw new Error(`listing failed: ${response.status}`);
    return (await response.json()) as FrameListing;
  }

  async getFrame(key: string): Promise<FrameResponse> {
    const response = await fetch(this.url(`/frames/${encodeURIComponent(key)}`));
    if (!response.ok) throw new Error(`frame ${key} failed: ${response.status}`);
    return (await response.json()) as FrameResponse;
  }

  imageUrl(key: string): string {
    return this.url(`/frames/${encodeURIComponent(key)}/image`);
  }

  async putAnnotation(key: string, doc: AnnotationDoc, expectedRevision: number): Promise<SaveResult> {
    const response = await fetch(this.url(`/frames/${encodeURIComponent(key)}`), {
      method: "PUT",
      headers: {
        "Content-Type": "application/json",
        "X-Expected-Revision": String(expectedRevision),
      },
      body: JSON.stringify(doc),
    });
    if (response.ok) {
      const body = (await response.json()) as { revision: number };
      return { kind: "saved", revision: body.revision };
    }
    if (response.status === 409) {
      const body = (await response.json()) as { revision: number };
      return { kind: "conflict", revision: body.revision };
    }
    if (response.status === 422) {
      const body = (await response.json()) as { problems?: string[]; error?: string };
      return { kind: "invalid", problems: body.problems ?? [body.error ?? "validation failed"] };
    }
    throw new Error(`save failed: ${response.status}`);
  }

  async progress(): Promise<Progress> {
    const response = await fetch(this.url("/progress"));
    if (!response.ok) throw new Error(`progress failed: ${response.status}`);
    return (await response.json()) as Progress;
  }
}
