/** Browser bootstrap: wires the board actions to the page. */

import { ExplorerActions } from "./actions.js";
import { ApiClient, ApiError } from "./api.js";
import { SessionBoard, type Pin } from "./board.js";
import {
  el,
  renderAxis,
  renderBanner,
  renderInferenceGraph,
  renderMap,
  renderPath,
  renderPins,
  renderSearchResults,
} from "./dom.js";
import { buildMapView } from "./map.js";
import type { CentralityResponse, Map2dResponse } from "./types.js";

const SERVICE_URL =
  new URLSearchParams(window.location.search).get("service") ?? "http://127.0.0.1:8040";

const api = new ApiClient(SERVICE_URL);
let board = new SessionBoard();
let actions = new ExplorerActions(api, board);

const $ = (id: string): HTMLElement => {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
};

let pathSource: Pin | null = null;
let pathTarget: Pin | null = null;
let axisError: string | undefined;

function redraw(): void {
  renderAxis($("axis"), board, axisError);
  renderPins($("pins"), board, {
    onAxisFrom: (pin) => {
      if (board.axisTo && board.axisTo.id !== pin.id) board.setAxis(pin, board.axisTo);
      else board.axisFrom = pin;
      axisError = undefined;
      redraw();
    },
    onAxisTo: (pin) => {
      if (board.axisFrom && board.axisFrom.id !== pin.id) board.setAxis(board.axisFrom, pin);
      else board.axisTo = pin;
      axisError = undefined;
      redraw();
    },
    onPathSource: (pin) => {
      pathSource = pin;
      maybeRequestPath();
    },
    onPathTarget: (pin) => {
      pathTarget = pin;
      maybeRequestPath();
    },
    onStep: (pin, sign) => {
      void step(pin.id, sign);
    },
  });
  renderInferenceGraph($("inference"), board.inference.toView(), (nodeId, sign) => {
    void step(nodeId, sign);
  });
  renderPath($("path"), board.lastPath, (id, name) => {
    board.pinConcept(
      {
        id,
        name,
        level: -1,
        works_count: 0,
        label: null,
        tag: null,
        classifiability: null,
        ancestor_roots: [],
        path_counts: {},
        embedded: true,
        in_graph: true,
      },
      board.lastPath?.traceIndex ?? 0,
    );
    redraw();
  });
}

async function step(nodeId: string, sign: "+" | "-"): Promise<void> {
  try {
    await actions.stepAnalogy(nodeId, sign);
    axisError = undefined;
  } catch (error) {
    if (error instanceof ApiError && error.code === "degenerate_axis") {
      axisError = error.message;
    } else if (error instanceof ApiError && error.code === "unknown_concept") {
      toast(`unknown concept: ${error.message}`);
    } else if (error instanceof Error && error.name !== "AbortError") {
      toast(error.message);
    }
  }
  redraw();
}

function maybeRequestPath(): void {
  if (!pathSource || !pathTarget || pathSource.id === pathTarget.id) {
    redraw();
    return;
  }
  actions
    .requestPath(pathSource, pathTarget)
    .then(() => redraw())
    .catch((error: unknown) => {
      if (error instanceof ApiError && error.code === "unknown_concept") {
        toast(error.message);
      } else if (error instanceof Error && error.name !== "AbortError") {
        renderBanner($("path"), `path request failed: ${error.message}`, maybeRequestPath);
      }
    });
}

function toast(message: string): void {
  const node = el("div", "toast", message);
  document.body.appendChild(node);
  setTimeout(() => node.remove(), 4000);
}

function wireSearch(): void {
  const input = $("search-input") as HTMLInputElement;
  input.addEventListener("input", () => {
    const query = input.value;
    actions
      .search(query)
      .then((outcome) => {
        renderSearchResults($("search-results"), outcome.results, outcome.requested, (info) => {
          actions.pinSelection(info);
          redraw();
        });
      })
      .catch((error: unknown) => {
        if (error instanceof Error && error.name === "AbortError") return;
        renderBanner($("search-results"), "search failed (service unreachable?)", () =>
          input.dispatchEvent(new Event("input")),
        );
      });
  });
}

async function loadMap(): Promise<void> {
  try {
    const map: Map2dResponse = await api.map2d();
    board.recordTrace("GET", "/v1/map2d", undefined, map);
    let centrality: CentralityResponse | null = null;
    try {
      centrality = await api.centrality("closeness", map.points.length);
      board.recordTrace("GET", "/v1/centrality", undefined, centrality);
    } catch {
      centrality = null; // map renders with uniform dots
    }
    renderMap($("map"), buildMapView(map, centrality));
  } catch (error) {
    renderBanner($("map"), "map unavailable (service unreachable?)", () => void loadMap());
  }
}

function wireBoardIO(): void {
  $("export").addEventListener("click", () => {
    const blob = new Blob([board.exportBoard()], { type: "application/json" });
    const link = el("a");
    link.href = URL.createObjectURL(blob);
    link.download = "board.json";
    link.click();
    URL.revokeObjectURL(link.href);
  });
  const fileInput = $("import-file") as HTMLInputElement;
  fileInput.addEventListener("change", () => {
    const file = fileInput.files?.[0];
    if (!file) return;
    void file.text().then((text) => {
      board = SessionBoard.importBoard(text);
      actions = new ExplorerActions(api, board);
      redraw();
    });
  });
}

wireSearch();
wireBoardIO();
redraw();
void loadMap();
