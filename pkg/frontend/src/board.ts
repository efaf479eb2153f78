/** Client-side session board.
 *
 * The board is the only state the explorer keeps: pinned concepts, the active
 * analogy axis, the inference graph accumulated across steps, the last path
 * result, and the map viewport. Every item carries the index of the recorded
 * request/response pair it came from, and the whole board serializes to a
 * JSON document that imports back to an identical board.
 */

import { InferenceGraphModel, type InferenceGraphView } from "./inference.js";
import type { PathViewModel } from "./pathview.js";
import type { ConceptInfo } from "./types.js";

export interface TraceEntry {
  index: number;
  method: string;
  path: string;
  body?: unknown;
  response: unknown;
}

export interface Pin {
  id: string;
  name: string;
  label: string | null;
  tag: string | null;
  traceIndex: number;
}

export interface Viewport {
  x: number;
  y: number;
  zoom: number;
}

export interface BoardDocument {
  version: 1;
  pins: Pin[];
  axisFrom: string | null;
  axisTo: string | null;
  inference: InferenceGraphView;
  lastPath: PathViewModel | null;
  viewport: Viewport;
  trace: TraceEntry[];
}

export class SessionBoard {
  pins: Pin[] = [];
  axisFrom: Pin | null = null;
  axisTo: Pin | null = null;
  inference = new InferenceGraphModel();
  lastPath: PathViewModel | null = null;
  viewport: Viewport = { x: 0, y: 0, zoom: 1 };
  trace: TraceEntry[] = [];

  recordTrace(method: string, path: string, body: unknown, response: unknown): number {
    const index = this.trace.length;
    const entry: TraceEntry = { index, method, path, response };
    if (body !== undefined) entry.body = body;
    this.trace.push(entry);
    return index;
  }

  /** Pin a search selection; re-pinning the same concept is a no-op. */
  pinConcept(info: ConceptInfo, traceIndex: number): Pin {
    const existing = this.pins.find((p) => p.id === info.id);
    if (existing) return existing;
    const pin: Pin = {
      id: info.id,
      name: info.name,
      label: info.label,
      tag: info.tag,
      traceIndex,
    };
    this.pins.push(pin);
    return pin;
  }

  findPin(id: string): Pin | undefined {
    return this.pins.find((p) => p.id === id);
  }

  setAxis(from: Pin, to: Pin): void {
    if (from.id === to.id) {
      throw new Error("axis endpoints must be two different pinned concepts");
    }
    this.axisFrom = from;
    this.axisTo = to;
  }

  get axisChosen(): boolean {
    return this.axisFrom !== null && this.axisTo !== null;
  }

  exportBoard(): string {
    const doc: BoardDocument = {
      version: 1,
      pins: this.pins.map((p) => ({ ...p })),
      axisFrom: this.axisFrom?.id ?? null,
      axisTo: this.axisTo?.id ?? null,
      inference: this.inference.toView(),
      lastPath: this.lastPath,
      viewport: { ...this.viewport },
      trace: this.trace,
    };
    return JSON.stringify(doc, null, 2);
  }

  static importBoard(json: string): SessionBoard {
    const doc = JSON.parse(json) as BoardDocument;
    if (doc.version !== 1) {
      throw new Error(`unsupported board document version ${String(doc.version)}`);
    }
    const board = new SessionBoard();
    board.pins = doc.pins.map((p) => ({ ...p }));
    board.axisFrom = doc.axisFrom ? board.findPin(doc.axisFrom) ?? null : null;
    board.axisTo = doc.axisTo ? board.findPin(doc.axisTo) ?? null : null;
    board.inference = InferenceGraphModel.fromView(doc.inference);
    board.lastPath = doc.lastPath;
    board.viewport = { ...doc.viewport };
    board.trace = doc.trace.map((t) => ({ ...t }));
    return board;
  }
}
