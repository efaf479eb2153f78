/** Browser rendering. Everything here draws view models; no domain math. */

import type { Pin, SessionBoard } from "./board.js";
import type { InferenceGraphView } from "./inference.js";
import type { MapViewModel } from "./map.js";
import type { PathViewModel } from "./pathview.js";
import type { ConceptInfo } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderBanner(host: HTMLElement, message: string, retry?: () => void): void {
  host.replaceChildren();
  const banner = el("div", "banner", message);
  if (retry) {
    const button = el("button", "retry", "retry");
    button.addEventListener("click", retry);
    banner.appendChild(button);
  }
  host.appendChild(banner);
}

export function renderSearchResults(
  host: HTMLElement,
  results: ConceptInfo[],
  requested: boolean,
  onPick: (info: ConceptInfo) => void,
): void {
  host.replaceChildren();
  if (!requested) return;
  if (results.length === 0) {
    host.appendChild(el("div", "empty", "no concepts match"));
    return;
  }
  const list = el("ul", "search-results");
  for (const info of results) {
    const item = el("li", "search-result");
    const button = el("button", "pick", info.name);
    button.addEventListener("click", () => onPick(info));
    item.appendChild(button);
    item.appendChild(el("span", "meta", ` ${info.label ?? "?"} [${info.tag ?? "-"}]`));
    list.appendChild(item);
  }
  host.appendChild(list);
}

export function renderPins(
  host: HTMLElement,
  board: SessionBoard,
  handlers: {
    onAxisFrom: (pin: Pin) => void;
    onAxisTo: (pin: Pin) => void;
    onPathSource: (pin: Pin) => void;
    onPathTarget: (pin: Pin) => void;
    onStep: (pin: Pin, sign: "+" | "-") => void;
  },
): void {
  host.replaceChildren();
  for (const pin of board.pins) {
    const row = el("div", "pin");
    row.appendChild(el("span", "pin-name", pin.name));
    row.appendChild(el("span", "pin-meta", ` ${pin.label ?? "?"} [${pin.tag ?? "-"}]`));
    const controls: Array<[string, () => void]> = [
      ["axis from", () => handlers.onAxisFrom(pin)],
      ["axis to", () => handlers.onAxisTo(pin)],
      ["path from", () => handlers.onPathSource(pin)],
      ["path to", () => handlers.onPathTarget(pin)],
      ["step +", () => handlers.onStep(pin, "+")],
      ["step -", () => handlers.onStep(pin, "-")],
    ];
    for (const [label, handler] of controls) {
      const button = el("button", "pin-action", label);
      button.addEventListener("click", handler);
      row.appendChild(button);
    }
    host.appendChild(row);
  }
}

export function renderAxis(host: HTMLElement, board: SessionBoard, error?: string): void {
  host.replaceChildren();
  const text =
    board.axisFrom && board.axisTo
      ? `axis: ${board.axisFrom.name} → ${board.axisTo.name}`
      : "axis: pick two pinned concepts";
  host.appendChild(el("div", "axis-label", text));
  if (error) host.appendChild(el("div", "axis-error", error));
}

export function renderInferenceGraph(
  host: HTMLElement,
  view: InferenceGraphView,
  onStep: (nodeId: string, sign: "+" | "-") => void,
): void {
  host.replaceChildren();
  if (view.nodes.length === 0) {
    host.appendChild(el("div", "empty", "no inference steps yet"));
    return;
  }
  const byDepth = new Map<number, string[]>();
  for (const node of view.nodes) {
    const bucket = byDepth.get(node.depth) ?? [];
    bucket.push(node.id);
    byDepth.set(node.depth, bucket);
  }
  const positions = new Map<string, { x: number; y: number }>();
  const colWidth = 180;
  const rowHeight = 64;
  for (const [depth, ids] of byDepth) {
    ids.forEach((id, row) => positions.set(id, { x: 40 + depth * colWidth, y: 40 + row * rowHeight }));
  }
  const width = 80 + colWidth * byDepth.size;
  const height = 80 + rowHeight * Math.max(...[...byDepth.values()].map((v) => v.length));
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("class", "inference-svg");
  for (const edge of view.edges) {
    const a = positions.get(edge.from);
    const b = positions.get(edge.to);
    if (!a || !b) continue;
    const line = document.createElementNS(SVG_NS, "line");
    line.setAttribute("x1", String(a.x));
    line.setAttribute("y1", String(a.y));
    line.setAttribute("x2", String(b.x));
    line.setAttribute("y2", String(b.y));
    line.setAttribute("class", edge.sign === "+" ? "edge-pos" : "edge-neg");
    svg.appendChild(line);
    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String((a.x + b.x) / 2));
    label.setAttribute("y", String((a.y + b.y) / 2 - 4));
    label.setAttribute("class", "edge-sign");
    label.textContent = edge.sign;
    svg.appendChild(label);
  }
  for (const node of view.nodes) {
    const pos = positions.get(node.id);
    if (!pos) continue;
    const group = document.createElementNS(SVG_NS, "g");
    group.setAttribute("class", "inference-node");
    group.addEventListener("dblclick", () => onStep(node.id, "+"));
    group.addEventListener("contextmenu", (event) => {
      event.preventDefault();
      onStep(node.id, "-");
    });
    const circle = document.createElementNS(SVG_NS, "circle");
    circle.setAttribute("cx", String(pos.x));
    circle.setAttribute("cy", String(pos.y));
    circle.setAttribute("r", "10");
    group.appendChild(circle);
    const text = document.createElementNS(SVG_NS, "text");
    text.setAttribute("x", String(pos.x + 14));
    text.setAttribute("y", String(pos.y + 4));
    text.textContent = node.name;
    group.appendChild(text);
    svg.appendChild(group);
  }
  host.appendChild(svg);
  host.appendChild(
    el("div", "hint", "double-click a node to step +, right-click to step -"),
  );
}

export function renderPath(
  host: HTMLElement,
  view: PathViewModel | null,
  onPinNode: (id: string, name: string) => void,
): void {
  host.replaceChildren();
  if (!view) {
    host.appendChild(el("div", "empty", "no pathway requested"));
    return;
  }
  const chain = el("div", "path-chain");
  view.nodes.forEach((node, i) => {
    const stop = el("span", "path-node");
    const button = el("button", "pin-node", node.name);
    button.addEventListener("click", () => onPinNode(node.id, node.name));
    stop.appendChild(button);
    chain.appendChild(stop);
    const edge = view.edges[i];
    if (edge) {
      chain.appendChild(el("span", "path-edge", ` —${edge.displayedWeight}→ `));
    }
  });
  host.appendChild(chain);
  host.appendChild(
    el("div", "path-total", `total distance ${view.displayedTotal} over ${view.steps} steps`),
  );
}

export function renderMap(host: HTMLElement, view: MapViewModel): void {
  host.replaceChildren();
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${view.width} ${view.height}`);
  svg.setAttribute("class", "map-svg");
  for (const dot of view.dots) {
    const circle = document.createElementNS(SVG_NS, "circle");
    circle.setAttribute("cx", dot.cx.toFixed(1));
    circle.setAttribute("cy", dot.cy.toFixed(1));
    circle.setAttribute("r", dot.radius.toFixed(1));
    circle.setAttribute("fill", dot.color);
    const tooltip = document.createElementNS(SVG_NS, "title");
    tooltip.textContent = `${dot.name} (${dot.discipline ?? "unclassified"})`;
    circle.appendChild(tooltip);
    svg.appendChild(circle);
  }
  host.appendChild(svg);
}
