/** Response shapes of the /v1 query API. Every number shown in the UI comes
 * from one of these fields; the client adds display formatting only. */

export interface ConceptInfo {
  id: string;
  name: string;
  level: number;
  works_count: number;
  label: string | null;
  tag: string | null;
  classifiability: string | null;
  ancestor_roots: string[];
  path_counts: Record<string, number>;
  embedded: boolean;
  in_graph: boolean;
}

export interface SearchResponse {
  query: string;
  results: ConceptInfo[];
}

export type Sign = "+" | "-";

export interface AnalogyNode {
  id: string;
  depth: number;
  name?: string;
}

export interface AnalogyEdge {
  from: string;
  to: string;
  sign: Sign;
}

export interface AnalogyResponse {
  seed: string;
  axis: [string, string];
  mode: "chain" | "expand";
  direction: Sign | null;
  steps: number;
  nodes: AnalogyNode[];
  edges: AnalogyEdge[];
  result: { id: string; similarity: number } | null;
}

export interface PathNode {
  id: string;
  name: string;
}

export interface PathEdge {
  from: string;
  to: string;
  weight: number;
}

export interface PathResponse {
  source: string;
  target: string;
  nodes: PathNode[];
  edges: PathEdge[];
  distance: number;
  steps: number;
}

export interface NeighborsResponse {
  id: string;
  k: number;
  neighbors: Array<{ id: string; name: string; similarity: number }>;
}

export interface CentralityRow {
  id: string;
  name: string;
  score: number;
  rank: number;
}

export interface CentralityResponse {
  measure: string;
  exactness: string;
  pivots: number | null;
  seed: number | null;
  results: CentralityRow[];
}

export interface MapPoint {
  id: string;
  name: string;
  x: number;
  y: number;
  discipline: string | null;
}

export interface Map2dResponse {
  points: MapPoint[];
}

export interface AxisInfo {
  name: string;
  from_group: string;
  to_group: string;
  from_disciplines: string[];
  to_disciplines: string[];
}

export interface AxesResponse {
  axes: AxisInfo[];
  skipped: Record<string, string>;
}

export interface ApiErrorBody {
  code: string;
  message: string;
}
