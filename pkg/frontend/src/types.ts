export type Script = "urdu" | "english";

export interface Box {
  x: number;
  y: number;
  width: number;
  height: number;
}

export interface LineDoc extends Box {
  script: Script;
  transcription: string;
}

export interface AnnotationDoc {
  channel: string;
  video: string;
  number: number;
  width: number;
  height: number;
  lines: LineDoc[];
}

export interface FrameSummary {
  key: string;
  channel: string;
  video: string;
  number: number;
  width: number;
  height: number;
  line_count: number;
  annotated: boolean;
  revision: number;
}

export interface FrameListing {
  frames: FrameSummary[];
  page: number;
  page_size: number;
  total: number;
}

export interface ProgressBucket {
  frames: number;
  annotated: number;
  unannotated: number;
  urdu_lines: number;
  english_lines: number;
}

export interface Progress {
  channels: Record<string, ProgressBucket>;
  total: ProgressBucket;
}
