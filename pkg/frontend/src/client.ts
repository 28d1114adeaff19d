// Debounced single-flight client for /api/design.
//
// Slider drags funnel through request(): a 250 ms trailing debounce caps the
// request rate at 4/s, at most one request is in flight, and a response is
// applied only if no newer request has been issued since (stale discard).

import type { ApiError, DesignRequest, DesignResponse } from "./types";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export interface ClientHandlers {
  onResult: (response: DesignResponse) => void;
  onError: (error: ApiError) => void;
}

export const DEBOUNCE_MS = 250;

export class DesignClient {
  private timer: ReturnType<typeof setTimeout> | null = null;
  private pending: DesignRequest | null = null;
  private inflight = false;
  private issued = 0;

  constructor(
    public baseUrl: string,
    private handlers: ClientHandlers,
    private fetchImpl: FetchLike = (url, init) => fetch(url, init),
    private debounceMs: number = DEBOUNCE_MS,
  ) {}

  /** Entry point for every edit; coalesces bursts into one request. */
  request(request: DesignRequest): void {
    this.pending = request;
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = setTimeout(() => {
      this.timer = null;
      void this.flush();
    }, this.debounceMs);
  }

  private async flush(): Promise<void> {
    if (this.inflight || this.pending === null) return;
    const request = this.pending;
    this.pending = null;
    const seq = ++this.issued;
    this.inflight = true;
    try {
      const response = await this.fetchImpl(`${this.baseUrl}/api/design`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(request),
      });
      const body = (await response.json()) as DesignResponse | ApiError;
      if (seq === this.issued) {
        if (response.ok) this.handlers.onResult(body as DesignResponse);
        else this.handlers.onError(body as ApiError);
      }
    } catch (err) {
      if (seq === this.issued) {
        this.handlers.onError({ error: "network", detail: String(err) });
      }
    } finally {
      this.inflight = false;
      if (this.pending !== null) void this.flush();
    }
  }
}
