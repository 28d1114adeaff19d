// Workspace state: everything the structurer is editing, plus the last
// response snapshot. The serialized form IS the /api/design request body and
// equally a valid `payoffdesign design --config` file, so exported sessions
// replay exactly in batch.

import type {
  DesignRequest,
  DesignResponse,
  GridSpec,
  MarketSpec,
  RiskSpec,
  ViewSpec,
} from "./types";

export interface ViewEntry {
  spec: ViewSpec;
  enabled: boolean;
  window?: [number, number];
}

export const DEFAULT_GRID: GridSpec = { lo: 0.2, hi: 5.0, n: 1001, spacing: "log" };
export const DEFAULT_MARKET: MarketSpec = {
  family: "lognormal",
  params: { mu: 0.0, sigma: 0.2 },
};

export class Workspace {
  grid: GridSpec;
  market: MarketSpec;
  views: ViewEntry[];
  risk: RiskSpec;
  snapshot: DesignResponse | null = null;

  constructor(
    grid: GridSpec = { ...DEFAULT_GRID },
    market: MarketSpec = { family: DEFAULT_MARKET.family, params: { ...DEFAULT_MARKET.params } },
    views: ViewEntry[] = [],
    risk: RiskSpec = 1,
  ) {
    this.grid = grid;
    this.market = market;
    this.views = views;
    this.risk = risk;
  }

  addView(spec: ViewSpec): ViewEntry {
    const entry: ViewEntry = { spec, enabled: true };
    this.views.push(entry);
    return entry;
  }

  removeView(index: number): void {
    this.views.splice(index, 1);
  }

  toggleView(index: number): void {
    this.views[index].enabled = !this.views[index].enabled;
  }

  /** Exactly the /api/design request: disabled views omitted, windows applied. */
  toRequest(): DesignRequest {
    const views: ViewSpec[] = [];
    for (const entry of this.views) {
      if (!entry.enabled) continue;
      views.push(
        entry.window
          ? { type: "window", a: entry.window[0], b: entry.window[1], of: entry.spec }
          : entry.spec,
      );
    }
    return { grid: this.grid, market: this.market, views, risk: this.risk };
  }

  /** Workspace JSON download; identical to the CLI config format. */
  exportConfig(): string {
    return JSON.stringify(this.toRequest(), null, 2) + "\n";
  }

  static importConfig(text: string): Workspace {
    const raw = JSON.parse(text) as DesignRequest;
    if (!raw || typeof raw !== "object" || !raw.grid || !raw.market) {
      throw new Error("config must carry grid and market specs");
    }
    const entries: ViewEntry[] = (raw.views ?? []).map((spec) =>
      spec.type === "window"
        ? { spec: spec.of, enabled: true, window: [spec.a, spec.b] }
        : { spec, enabled: true },
    );
    return new Workspace(raw.grid, raw.market, entries, raw.risk ?? 1);
  }

  /** Current payoff as CSV, columns x,f,F, numbers taken verbatim from the API. */
  payoffCsv(): string {
    if (!this.snapshot) throw new Error("no design response to export yet");
    const { x, f, F } = this.snapshot;
    const lines = ["x,f,F"];
    for (let i = 0; i < x.length; i++) {
      lines.push(`${x[i]},${f[i]},${F[i]}`);
    }
    return lines.join("\n") + "\n";
  }
}
