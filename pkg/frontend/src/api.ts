import type { SimilarQuery } from "./types.js";

export const DEBOUNCE_MS = 300;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export function buildSimilarUrl(query: SimilarQuery): string {
  const params = new URLSearchParams();
  params.set("measure", query.measure);
  params.set("k", String(query.k));
  params.set("level", query.level);
  if (query.p !== null) params.set("p", String(query.p));
  return `/api/similar/${encodeURIComponent(query.item)}?${params.toString()}`;
}

export interface ResponseLike {
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
}

export type FetchLike = (
  url: string,
  init?: { signal?: AbortSignal },
) => Promise<ResponseLike>;

function isAbort(err: unknown): boolean {
  return (err as { name?: string } | null)?.name === "AbortError";
}

export async function getJson<T>(
  url: string,
  fetchFn: FetchLike = fetch,
  signal?: AbortSignal,
): Promise<T> {
  let response: ResponseLike;
  try {
    response = await fetchFn(url, { signal });
  } catch (err) {
    if (isAbort(err)) throw err;
    throw new ApiError(0, "service unreachable");
  }
  if (!response.ok) {
    let message = `request failed with status ${response.status}`;
    try {
      const body = (await response.json()) as { message?: unknown };
      if (typeof body?.message === "string") message = body.message;
    } catch {
      // non-JSON error body; the generic message stands
    }
    throw new ApiError(response.status, message);
  }
  return (await response.json()) as T;
}

export const SUPERSEDED: unique symbol = Symbol("superseded");

/** Wrap a request runner so only the newest call can deliver a result.
 *
 * Issuing a new request aborts the previous one's signal; a request that
 * was overtaken resolves to SUPERSEDED instead of data or an error, so the
 * caller never applies a stale response.
 */
export function newestWins<Q, R>(
  run: (query: Q, signal: AbortSignal) => Promise<R>,
): (query: Q) => Promise<R | typeof SUPERSEDED> {
  let current: AbortController | null = null;
  return async (query: Q) => {
    current?.abort();
    const ctrl = new AbortController();
    current = ctrl;
    try {
      const result = await run(query, ctrl.signal);
      return ctrl.signal.aborted ? SUPERSEDED : result;
    } catch (err) {
      if (ctrl.signal.aborted || isAbort(err)) return SUPERSEDED;
      throw err;
    } finally {
      if (current === ctrl) current = null;
    }
  };
}

export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  waitMs: number,
): (...args: A) => void {
  let timer: ReturnType<typeof setTimeout> | undefined;
  return (...args: A) => {
    clearTimeout(timer);
    timer = setTimeout(() => fn(...args), waitMs);
  };
}
