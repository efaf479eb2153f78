/** Mocked-service fetch for contract tests. */

import type { FetchLike } from "../src/api.js";

export interface SeenRequest {
  method: string;
  url: string;
  body: unknown;
  signal: AbortSignal | null | undefined;
}

export type Handler = (req: SeenRequest) => { status?: number; body: unknown } | unknown;

export function mockFetch(handler: Handler): { fetchFn: FetchLike; seen: SeenRequest[] } {
  const seen: SeenRequest[] = [];
  const fetchFn: FetchLike = (url, init) => {
    const request: SeenRequest = {
      method: init?.method ?? "GET",
      url: String(url),
      body: typeof init?.body === "string" ? JSON.parse(init.body) : undefined,
      signal: init?.signal,
    };
    seen.push(request);
    if (init?.signal?.aborted) {
      return Promise.reject(new DOMException("aborted", "AbortError"));
    }
    const outcome = handler(request);
    const { status, body } =
      outcome !== null && typeof outcome === "object" && "status" in (outcome as object)
        ? (outcome as { status?: number; body: unknown })
        : { status: 200, body: outcome };
    return Promise.resolve(
      new Response(JSON.stringify(body), {
        status: status ?? 200,
        headers: { "content-type": "application/json" },
      }),
    );
  };
  return { fetchFn, seen };
}

/** A fetch whose responses stay pending until released, for cancellation tests. */
export function hangingFetch(): {
  fetchFn: FetchLike;
  seen: SeenRequest[];
  release: (index: number, body: unknown) => void;
} {
  const seen: SeenRequest[] = [];
  const resolvers: Array<(response: Response) => void> = [];
  const fetchFn: FetchLike = (url, init) => {
    const request: SeenRequest = {
      method: init?.method ?? "GET",
      url: String(url),
      body: typeof init?.body === "string" ? JSON.parse(init.body) : undefined,
      signal: init?.signal,
    };
    seen.push(request);
    return new Promise<Response>((resolve, reject) => {
      resolvers.push(resolve);
      init?.signal?.addEventListener("abort", () =>
        reject(new DOMException("aborted", "AbortError")),
      );
    });
  };
  const release = (index: number, body: unknown) => {
    resolvers[index]?.(
      new Response(JSON.stringify(body), {
        status: 200,
        headers: { "content-type": "application/json" },
      }),
    );
  };
  return { fetchFn, seen, release };
}
