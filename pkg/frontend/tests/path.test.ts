import { describe, expect, it } from "vitest";

import { ExplorerActions } from "../src/actions.js";
import { ApiClient, ApiError } from "../src/api.js";
import { SessionBoard } from "../src/board.js";
import { buildPathView, displayTolerance, displayedEdgeSum } from "../src/pathview.js";
import type { ConceptInfo, PathResponse } from "../src/types.js";
import { mockFetch } from "./helpers.js";

function concept(id: string, name: string): ConceptInfo {
  return {
    id,
    name,
    level: 1,
    works_count: 10,
    label: null,
    tag: null,
    classifiability: null,
    ancestor_roots: [],
    path_counts: {},
    embedded: true,
    in_graph: true,
  };
}

function pathResponse(ids: string[], weights: number[]): PathResponse {
  return {
    source: ids[0]!,
    target: ids[ids.length - 1]!,
    nodes: ids.map((id) => ({ id, name: id.toUpperCase() })),
    edges: weights.map((w, i) => ({ from: ids[i]!, to: ids[i + 1]!, weight: w })),
    distance: weights.reduce((a, b) => a + b, 0),
    steps: weights.length,
  };
}

function setup(response: PathResponse | { status: number; body: unknown }) {
  const { fetchFn, seen } = mockFetch(() => response);
  const board = new SessionBoard();
  const actions = new ExplorerActions(new ApiClient("http://svc", fetchFn), board);
  const src = actions.pinSelection(concept("a", "A"));
  const dst = actions.pinSelection(concept("c", "C"));
  return { actions, board, seen, src, dst };
}

describe("pathway view", () => {
  it("renders the chain in exact response order with per-edge weights", async () => {
    const response = pathResponse(["a", "b", "c"], [0.41, 0.37]);
    const { actions, src, dst, seen } = setup(response);
    const view = await actions.requestPath(src, dst);
    expect(seen[0]?.body).toEqual({ source: "a", target: "c" });
    expect(view.nodes.map((n) => n.id)).toEqual(["a", "b", "c"]);
    expect(view.edges.map((e) => [e.from, e.to])).toEqual([
      ["a", "b"],
      ["b", "c"],
    ]);
    expect(view.edges.map((e) => e.displayedWeight)).toEqual(["0.4100", "0.3700"]);
    expect(view.steps).toBe(2);
  });

  it("displayed total equals the sum of displayed edge weights", async () => {
    const response = pathResponse(["a", "b", "c", "d"], [0.123456, 0.654321, 0.111111]);
    const { actions, src, dst } = setup(response);
    const view = await actions.requestPath(src, dst);
    expect(Math.abs(displayedEdgeSum(view) - Number(view.displayedTotal))).toBeLessThanOrEqual(
      displayTolerance(view),
    );
  });

  it("display check holds across random weights", () => {
    let state = 12345;
    const rand = () => {
      state = (state * 1103515245 + 12345) % 2 ** 31;
      return state / 2 ** 31;
    };
    for (let trial = 0; trial < 50; trial++) {
      const n = 2 + Math.floor(rand() * 6);
      const ids = Array.from({ length: n }, (_, i) => `n${i}`);
      const weights = Array.from({ length: n - 1 }, () => rand() * 2);
      const view = buildPathView(pathResponse(ids, weights), 0);
      expect(Math.abs(displayedEdgeSum(view) - Number(view.displayedTotal))).toBeLessThanOrEqual(
        displayTolerance(view),
      );
    }
  });

  it("renders source = target as a single node with zero distance", async () => {
    const response: PathResponse = {
      source: "a",
      target: "a",
      nodes: [{ id: "a", name: "A" }],
      edges: [],
      distance: 0,
      steps: 0,
    };
    const { actions, src } = setup(response);
    const view = await actions.requestPath(src, src);
    expect(view.nodes).toHaveLength(1);
    expect(view.edges).toHaveLength(0);
    expect(view.displayedTotal).toBe("0.0000");
    expect(view.steps).toBe(0);
  });

  it("keeps the previous path when the service rejects an endpoint", async () => {
    const good = pathResponse(["a", "c"], [0.5]);
    const { actions, src, dst, board } = setup(good);
    await actions.requestPath(src, dst);
    const kept = board.lastPath;

    const failing = setup({ status: 404, body: { code: "unknown_concept", message: "nope" } });
    failing.board.lastPath = kept;
    const err = await failing.actions
      .requestPath(failing.src, failing.dst)
      .catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).code).toBe("unknown_concept");
    expect(failing.board.lastPath).toBe(kept);
  });

  it("path result cites its request/response trace entry", async () => {
    const response = pathResponse(["a", "b", "c"], [0.2, 0.3]);
    const { actions, src, dst, board } = setup(response);
    const view = await actions.requestPath(src, dst);
    const entry = board.trace[view.traceIndex];
    expect(entry?.path).toBe("/v1/path");
    expect(entry?.body).toEqual({ source: "a", target: "c" });
    expect(entry?.response).toEqual(response);
  });
});
