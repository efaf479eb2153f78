/** Board actions: each one issues an API call, records the trace pair, and
 * folds the response into the board. All domain numbers come from responses. */

import { ApiClient } from "./api.js";
import type { Pin, SessionBoard } from "./board.js";
import type { InferenceNodeView } from "./inference.js";
import { buildPathView, type PathViewModel } from "./pathview.js";
import type { ConceptInfo, SearchResponse, Sign } from "./types.js";

export interface SearchOutcome {
  requested: boolean;
  results: ConceptInfo[];
}

export class ExplorerActions {
  constructor(
    readonly api: ApiClient,
    readonly board: SessionBoard,
  ) {}

  /** Empty queries issue no request and render the explicit empty state. */
  async search(query: string): Promise<SearchOutcome> {
    if (!query.trim()) {
      return { requested: false, results: [] };
    }
    const response = await this.api.searchConcepts(query);
    this.board.recordTrace("GET", `/v1/concepts?q=${encodeURIComponent(query)}`, undefined, response);
    return { requested: true, results: response.results };
  }

  /** Pin one search selection, citing the search that produced it. */
  pinSelection(info: ConceptInfo, searchResponse: SearchResponse | null = null): Pin {
    let traceIndex = this.board.trace.length - 1;
    if (searchResponse !== null) {
      traceIndex = this.board.recordTrace("GET", "/v1/concepts", undefined, searchResponse);
    }
    return this.board.pinConcept(info, traceIndex);
  }

  /** One analogy step from a node already on the board; the returned node is
   * immediately steppable. Requires a chosen axis. */
  async stepAnalogy(seedId: string, direction: Sign): Promise<InferenceNodeView> {
    const { axisFrom, axisTo } = this.board;
    if (!axisFrom || !axisTo) {
      throw new Error("choose an analogy axis (two pinned concepts) first");
    }
    if (!this.board.inference.hasNode(seedId)) {
      const pin = this.board.findPin(seedId);
      if (!pin) {
        throw new Error(`seed ${seedId} is neither pinned nor on the inference graph`);
      }
      this.board.inference.addSeed(pin.id, pin.name, pin.traceIndex);
    }
    const response = await this.api.analogyStep(seedId, axisFrom.id, axisTo.id, direction);
    const traceIndex = this.board.recordTrace(
      "POST",
      "/v1/analogy",
      { seed: seedId, axis_from: axisFrom.id, axis_to: axisTo.id, direction, steps: 1 },
      response,
    );
    return this.board.inference.applyStep(seedId, response, traceIndex);
  }

  /** Shortest pathway between two pins; intermediates stay pinnable. */
  async requestPath(source: Pin, target: Pin): Promise<PathViewModel> {
    const response = await this.api.path(source.id, target.id);
    const traceIndex = this.board.recordTrace(
      "POST",
      "/v1/path",
      { source: source.id, target: target.id },
      response,
    );
    const view = buildPathView(response, traceIndex);
    this.board.lastPath = view;
    return view;
  }
}
