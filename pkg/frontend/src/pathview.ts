/** Pathway view model: the ordered chain, per-edge weights, and the total.
 *
 * The displayed total comes from the response's distance field; the only
 * client-side arithmetic is the display-sum used to cross-check it.
 */

import type { PathNode, PathResponse } from "./types.js";

export const WEIGHT_DECIMALS = 4;

export interface PathEdgeView {
  from: string;
  fromName: string;
  to: string;
  toName: string;
  weight: number;
  displayedWeight: string;
}

export interface PathViewModel {
  source: string;
  target: string;
  nodes: PathNode[];
  edges: PathEdgeView[];
  distance: number;
  displayedTotal: string;
  steps: number;
  traceIndex: number;
}

function nameOf(nodes: PathNode[], id: string): string {
  return nodes.find((n) => n.id === id)?.name ?? id;
}

export function buildPathView(response: PathResponse, traceIndex: number): PathViewModel {
  return {
    source: response.source,
    target: response.target,
    nodes: response.nodes.map((n) => ({ ...n })),
    edges: response.edges.map((e) => ({
      from: e.from,
      fromName: nameOf(response.nodes, e.from),
      to: e.to,
      toName: nameOf(response.nodes, e.to),
      weight: e.weight,
      displayedWeight: e.weight.toFixed(WEIGHT_DECIMALS),
    })),
    distance: response.distance,
    displayedTotal: response.distance.toFixed(WEIGHT_DECIMALS),
    steps: response.steps,
    traceIndex,
  };
}

/** Sum of the weights exactly as displayed (the view's self-check). */
export function displayedEdgeSum(view: PathViewModel): number {
  return view.edges.reduce((acc, e) => acc + Number(e.displayedWeight), 0);
}

/** Largest defensible gap between the displayed total and the display sum:
 * each of the steps+1 formatted numbers may round by half an ulp of the
 * last shown decimal. */
export function displayTolerance(view: PathViewModel): number {
  return (view.edges.length + 1) * 0.5 * 10 ** -WEIGHT_DECIMALS + 1e-12;
}
