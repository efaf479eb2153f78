import { describe, expect, it } from "vitest";

import { ExplorerActions } from "../src/actions.js";
import { ApiClient, ApiError } from "../src/api.js";
import { SessionBoard } from "../src/board.js";
import type { AnalogyResponse, ConceptInfo } from "../src/types.js";
import { mockFetch, type SeenRequest } from "./helpers.js";

function concept(id: string, name: string): ConceptInfo {
  return {
    id,
    name,
    level: 2,
    works_count: 100,
    label: "mathematics",
    tag: "S",
    classifiability: "S+",
    ancestor_roots: ["mathematics"],
    path_counts: { mathematics: 3 },
    embedded: true,
    in_graph: true,
  };
}

function analogyResponse(seed: string, resultId: string, resultName: string, sign: "+" | "-"): AnalogyResponse {
  return {
    seed,
    axis: ["mathematics", "computer_science"],
    mode: "chain",
    direction: sign,
    steps: 1,
    nodes: [
      { id: seed, depth: 0, name: seed },
      { id: resultId, depth: 1, name: resultName },
    ],
    edges: [{ from: seed, to: resultId, sign }],
    result: { id: resultId, similarity: 0.87 },
  };
}

const SCRIPT: Record<string, AnalogyResponse> = {
  "statistics|+": analogyResponse("statistics", "chi_squared", "Chi-squared", "+"),
  "chi_squared|+": analogyResponse("chi_squared", "asymptotics", "Asymptotics", "+"),
  "statistics|-": analogyResponse("statistics", "data_quality", "Data quality", "-"),
  "chi_squared|-": analogyResponse("chi_squared", "statistics", "statistics", "-"),
};

function scriptedHandler(req: SeenRequest): unknown {
  const body = req.body as { seed: string; direction: "+" | "-" };
  const key = `${body.seed}|${body.direction}`;
  const canned = SCRIPT[key];
  if (!canned) {
    return { status: 404, body: { code: "unknown_concept", message: `no script for ${key}` } };
  }
  return canned;
}

function boardWithAxis(): { actions: ExplorerActions; seen: SeenRequest[] } {
  const { fetchFn, seen } = mockFetch(scriptedHandler);
  const board = new SessionBoard();
  const actions = new ExplorerActions(new ApiClient("http://svc", fetchFn), board);
  const seedPin = actions.pinSelection(concept("statistics", "statistics"), {
    query: "stat",
    results: [concept("statistics", "statistics")],
  });
  const fromPin = actions.pinSelection(concept("mathematics", "Mathematics"));
  const toPin = actions.pinSelection(concept("computer_science", "Computer science"));
  board.setAxis(fromPin, toPin);
  return { actions, seen };
}

describe("analogy stepping", () => {
  it("issues the exact /v1/analogy request sequence", async () => {
    const { actions, seen } = boardWithAxis();
    const first = await actions.stepAnalogy("statistics", "+");
    await actions.stepAnalogy(first.id, "+");
    expect(seen.map((r) => [r.method, r.url])).toEqual([
      ["POST", "http://svc/v1/analogy"],
      ["POST", "http://svc/v1/analogy"],
    ]);
    expect(seen.map((r) => r.body)).toEqual([
      {
        seed: "statistics",
        axis_from: "mathematics",
        axis_to: "computer_science",
        direction: "+",
        steps: 1,
      },
      {
        seed: "chi_squared",
        axis_from: "mathematics",
        axis_to: "computer_science",
        direction: "+",
        steps: 1,
      },
    ]);
  });

  it("renders the replayed inference graph: 3 nodes, 2 edges after two + steps", async () => {
    const { actions } = boardWithAxis();
    const first = await actions.stepAnalogy("statistics", "+");
    await actions.stepAnalogy(first.id, "+");
    const view = actions.board.inference.toView();
    expect(view.nodes.map((n) => [n.id, n.name, n.depth])).toEqual([
      ["statistics", "statistics", 0],
      ["chi_squared", "Chi-squared", 1],
      ["asymptotics", "Asymptotics", 2],
    ]);
    expect(view.edges).toEqual([
      { from: "statistics", to: "chi_squared", sign: "+" },
      { from: "chi_squared", to: "asymptotics", sign: "+" },
    ]);
  });

  it("merges a revisited concept instead of duplicating it", async () => {
    const { actions } = boardWithAxis();
    const first = await actions.stepAnalogy("statistics", "+");
    await actions.stepAnalogy(first.id, "-"); // scripted to return the seed again
    const view = actions.board.inference.toView();
    expect(view.nodes).toHaveLength(2);
    expect(view.edges).toHaveLength(2);
    expect(view.nodes.map((n) => n.id)).toEqual(["statistics", "chi_squared"]);
  });

  it("does not add a node when the service reports unknown_concept", async () => {
    const { actions } = boardWithAxis();
    await actions.stepAnalogy("statistics", "+");
    const before = actions.board.inference.toView();
    await expect(actions.stepAnalogy("chi_squared", "+").then(() => actions.stepAnalogy("asymptotics", "+"))).rejects.toThrowError(
      ApiError,
    );
    const after = actions.board.inference.toView();
    expect(after.nodes.length).toBe(before.nodes.length + 1); // only the scripted step landed
  });

  it("requires an axis before issuing any request", async () => {
    const { fetchFn, seen } = mockFetch(scriptedHandler);
    const board = new SessionBoard();
    const actions = new ExplorerActions(new ApiClient("http://svc", fetchFn), board);
    actions.pinSelection(concept("statistics", "statistics"));
    await expect(actions.stepAnalogy("statistics", "+")).rejects.toThrow(/axis/);
    expect(seen).toHaveLength(0);
  });

  it("surfaces degenerate_axis errors for the axis selector", async () => {
    const { fetchFn } = mockFetch(() => ({
      status: 400,
      body: { code: "degenerate_axis", message: "identical group means" },
    }));
    const board = new SessionBoard();
    const actions = new ExplorerActions(new ApiClient("http://svc", fetchFn), board);
    const a = actions.pinSelection(concept("statistics", "statistics"));
    const b = actions.pinSelection(concept("mathematics", "Mathematics"));
    const c = actions.pinSelection(concept("computer_science", "Computer science"));
    board.setAxis(b, c);
    void a;
    const failure = await actions.stepAnalogy("statistics", "+").catch((e: unknown) => e);
    expect(failure).toBeInstanceOf(ApiError);
    expect((failure as ApiError).code).toBe("degenerate_axis");
  });

  it("every inference node traces to a recorded request/response pair", async () => {
    const { actions } = boardWithAxis();
    const first = await actions.stepAnalogy("statistics", "+");
    await actions.stepAnalogy(first.id, "+");
    const board = actions.board;
    for (const node of board.inference.toView().nodes) {
      const entry = board.trace[node.traceIndex];
      expect(entry).toBeDefined();
      expect(entry?.response).toBeDefined();
    }
  });
});
