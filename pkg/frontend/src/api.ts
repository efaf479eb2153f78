/** Typed client for the /v1 API.
 *
 * Each board action uses a stable key; submitting the same action again
 * cancels the earlier in-flight request. The client records every request it
 * issues so board items can cite the request/response pair they came from.
 */

import type {
  AnalogyResponse,
  ApiErrorBody,
  AxesResponse,
  CentralityResponse,
  ConceptInfo,
  Map2dResponse,
  NeighborsResponse,
  PathResponse,
  SearchResponse,
  Sign,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export interface RequestRecord {
  method: string;
  path: string;
  body?: unknown;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export class ApiClient {
  readonly requests: RequestRecord[] = [];
  private inflight = new Map<string, AbortController>();

  constructor(
    private baseUrl: string,
    private fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(
    actionKey: string,
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const previous = this.inflight.get(actionKey);
    if (previous) previous.abort();
    const controller = new AbortController();
    this.inflight.set(actionKey, controller);
    this.requests.push(body === undefined ? { method, path } : { method, path, body });
    const init: RequestInit = { method, signal: controller.signal };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    try {
      const response = await this.fetchFn(this.baseUrl + path, init);
      if (!response.ok) {
        let parsed: ApiErrorBody = { code: "internal", message: `HTTP ${response.status}` };
        try {
          parsed = (await response.json()) as ApiErrorBody;
        } catch {
          // non-JSON error body: keep the fallback
        }
        throw new ApiError(response.status, parsed.code, parsed.message);
      }
      return (await response.json()) as T;
    } finally {
      if (this.inflight.get(actionKey) === controller) {
        this.inflight.delete(actionKey);
      }
    }
  }

  searchConcepts(query: string): Promise<SearchResponse> {
    return this.request("search", "GET", `/v1/concepts?q=${encodeURIComponent(query)}`);
  }

  getConcept(id: string): Promise<ConceptInfo> {
    return this.request(`concept:${id}`, "GET", `/v1/concepts/${encodeURIComponent(id)}`);
  }

  neighbors(id: string, k: number): Promise<NeighborsResponse> {
    return this.request("neighbors", "GET", `/v1/neighbors/${encodeURIComponent(id)}?k=${k}`);
  }

  analogyStep(seed: string, axisFrom: string, axisTo: string, direction: Sign): Promise<AnalogyResponse> {
    return this.request("analogy", "POST", "/v1/analogy", {
      seed,
      axis_from: axisFrom,
      axis_to: axisTo,
      direction,
      steps: 1,
    });
  }

  path(source: string, target: string): Promise<PathResponse> {
    return this.request("path", "POST", "/v1/path", { source, target });
  }

  centrality(measure: string, k: number): Promise<CentralityResponse> {
    return this.request("centrality", "GET", `/v1/centrality?measure=${measure}&k=${k}`);
  }

  map2d(): Promise<Map2dResponse> {
    return this.request("map2d", "GET", "/v1/map2d");
  }

  axes(): Promise<AxesResponse> {
    return this.request("axes", "GET", "/v1/axes");
  }
}
