import { describe, expect, it } from "vitest";

import { ExplorerActions } from "../src/actions.js";
import { ApiClient } from "../src/api.js";
import { SessionBoard } from "../src/board.js";
import type { AnalogyResponse, ConceptInfo, PathResponse } from "../src/types.js";
import { mockFetch, type SeenRequest } from "./helpers.js";

function concept(id: string, name: string, label: string | null = "biology"): ConceptInfo {
  return {
    id,
    name,
    level: 2,
    works_count: 42,
    label,
    tag: label ? "M" : null,
    classifiability: "S+",
    ancestor_roots: label ? [label] : [],
    path_counts: label ? { [label]: 2 } : {},
    embedded: true,
    in_graph: true,
  };
}

function handler(req: SeenRequest): unknown {
  if (req.url.endsWith("/v1/analogy")) {
    const body = req.body as { seed: string; direction: "+" | "-" };
    const resultId = `${body.seed}_${body.direction === "+" ? "next" : "prev"}`;
    const response: AnalogyResponse = {
      seed: body.seed,
      axis: ["x", "y"],
      mode: "chain",
      direction: body.direction,
      steps: 1,
      nodes: [
        { id: body.seed, depth: 0, name: body.seed },
        { id: resultId, depth: 1, name: resultId },
      ],
      edges: [{ from: body.seed, to: resultId, sign: body.direction }],
      result: { id: resultId, similarity: 0.5 },
    };
    return response;
  }
  if (req.url.endsWith("/v1/path")) {
    const body = req.body as { source: string; target: string };
    const response: PathResponse = {
      source: body.source,
      target: body.target,
      nodes: [
        { id: body.source, name: body.source },
        { id: "mid", name: "MID" },
        { id: body.target, name: body.target },
      ],
      edges: [
        { from: body.source, to: "mid", weight: 0.25 },
        { from: "mid", to: body.target, weight: 0.5 },
      ],
      distance: 0.75,
      steps: 2,
    };
    return response;
  }
  return { query: "", results: [] };
}

async function populatedBoard(): Promise<SessionBoard> {
  const { fetchFn } = mockFetch(handler);
  const board = new SessionBoard();
  const actions = new ExplorerActions(new ApiClient("http://svc", fetchFn), board);
  const a = actions.pinSelection(concept("alpha", "Alpha"), { query: "al", results: [] });
  const b = actions.pinSelection(concept("beta", "Beta"));
  const c = actions.pinSelection(concept("gamma", "Gamma", null));
  board.setAxis(b, c);
  await actions.stepAnalogy("alpha", "+");
  await actions.stepAnalogy("alpha_next", "-");
  await actions.requestPath(a, b);
  board.viewport = { x: 12.5, y: -3, zoom: 1.75 };
  return board;
}

describe("session board", () => {
  it("a selection adds exactly one pin; re-pinning is a no-op", () => {
    const board = new SessionBoard();
    const info = concept("alpha", "Alpha");
    board.pinConcept(info, 0);
    expect(board.pins).toHaveLength(1);
    board.pinConcept(info, 0);
    expect(board.pins).toHaveLength(1);
    expect(board.pins[0]?.label).toBe("biology");
    expect(board.pins[0]?.tag).toBe("M");
  });

  it("rejects a degenerate axis of one pin", () => {
    const board = new SessionBoard();
    const pin = board.pinConcept(concept("alpha", "Alpha"), 0);
    expect(() => board.setAxis(pin, pin)).toThrow(/different/);
  });

  it("export -> import reproduces an identical board", async () => {
    const board = await populatedBoard();
    const exported = board.exportBoard();
    const imported = SessionBoard.importBoard(exported);
    expect(JSON.parse(imported.exportBoard())).toEqual(JSON.parse(exported));
    expect(imported.exportBoard()).toBe(exported);
    expect(imported.pins).toEqual(board.pins);
    expect(imported.axisFrom?.id).toBe("beta");
    expect(imported.axisTo?.id).toBe("gamma");
    expect(imported.inference.toView()).toEqual(board.inference.toView());
    expect(imported.lastPath).toEqual(board.lastPath);
    expect(imported.viewport).toEqual(board.viewport);
  });

  it("rejects unknown board document versions", () => {
    expect(() => SessionBoard.importBoard('{"version": 99}')).toThrow(/version/);
  });

  it("every board item traces to a recorded request/response pair", async () => {
    const board = await populatedBoard();
    const valid = (index: number) => index >= 0 && index < board.trace.length;
    for (const pin of board.pins) {
      expect(valid(pin.traceIndex)).toBe(true);
    }
    for (const node of board.inference.toView().nodes) {
      expect(valid(node.traceIndex)).toBe(true);
    }
    expect(board.lastPath).not.toBeNull();
    expect(valid(board.lastPath!.traceIndex)).toBe(true);
    const pathEntry = board.trace[board.lastPath!.traceIndex]!;
    expect(pathEntry.path).toBe("/v1/path");
  });
});
