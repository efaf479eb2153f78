/** Map view model: 2D coordinates from /map2d scaled into a viewBox, colored
 * by discipline, dot size from a centrality response. Display-only. */

import type { CentralityResponse, Map2dResponse } from "./types.js";

export interface MapDot {
  id: string;
  name: string;
  cx: number;
  cy: number;
  radius: number;
  color: string;
  discipline: string | null;
}

export interface MapViewModel {
  width: number;
  height: number;
  dots: MapDot[];
}

const PALETTE = [
  "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948",
  "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac", "#2f4b7c", "#ffa600",
  "#665191", "#a05195", "#d45087", "#f95d6a", "#ff7c43", "#003f5c",
  "#7a5195",
];

export function disciplineColor(discipline: string | null): string {
  if (discipline === null) return "#888888";
  let hash = 0;
  for (let i = 0; i < discipline.length; i++) {
    hash = (hash * 31 + discipline.charCodeAt(i)) >>> 0;
  }
  return PALETTE[hash % PALETTE.length] ?? "#888888";
}

export function buildMapView(
  map: Map2dResponse,
  centrality: CentralityResponse | null = null,
  width = 640,
  height = 480,
): MapViewModel {
  const margin = 20;
  const xs = map.points.map((p) => p.x);
  const ys = map.points.map((p) => p.y);
  const xMin = Math.min(...xs, 0);
  const xMax = Math.max(...xs, 1e-9);
  const yMin = Math.min(...ys, 0);
  const yMax = Math.max(...ys, 1e-9);
  const xSpan = xMax - xMin || 1;
  const ySpan = yMax - yMin || 1;

  const scoreOf = new Map<string, number>();
  let maxScore = 0;
  if (centrality) {
    for (const row of centrality.results) {
      scoreOf.set(row.id, row.score);
      if (row.score > maxScore) maxScore = row.score;
    }
  }

  const dots: MapDot[] = map.points.map((p) => {
    const score = scoreOf.get(p.id);
    const radius =
      score !== undefined && maxScore > 0 ? 2 + 6 * Math.sqrt(score / maxScore) : 3;
    return {
      id: p.id,
      name: p.name,
      cx: margin + ((p.x - xMin) / xSpan) * (width - 2 * margin),
      cy: margin + ((p.y - yMin) / ySpan) * (height - 2 * margin),
      radius,
      color: disciplineColor(p.discipline),
      discipline: p.discipline,
    };
  });
  return { width, height, dots };
}
