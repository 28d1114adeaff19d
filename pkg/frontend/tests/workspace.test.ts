import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { Workspace, DEFAULT_GRID } from "../src/workspace";
import type { DesignResponse } from "../src/types";

const volFixture = JSON.parse(
  readFileSync(new URL("./fixtures/design_vol15_R1_n101.json", import.meta.url), "utf8"),
) as { request: Record<string, unknown>; response: DesignResponse };

function volWorkspace(): Workspace {
  const ws = new Workspace(
    { lo: 0.2, hi: 5, n: 101, spacing: "log" },
    { family: "lognormal", params: { mu: 0, sigma: 0.2 } },
  );
  ws.addView({ type: "vol", target_sigma: 0.15 });
  ws.risk = 1;
  return ws;
}

describe("workspace serialization", () => {
  it("fresh workspace serializes to a bare request with no views", () => {
    const request = new Workspace().toRequest();
    expect(request.views).toEqual([]);
    expect(request.grid).toEqual(DEFAULT_GRID);
    expect(request.risk).toBe(1);
  });

  it("matches the recorded /api/design request for the vol-view fixture", () => {
    const request = volWorkspace().toRequest();
    expect(request).toEqual({ ...volFixture.request, risk: 1 });
  });

  it("omits disabled views from the request", () => {
    const ws = volWorkspace();
    ws.addView({ type: "ratio", believed: { family: "lognormal", params: { mu: 0.02, sigma: 0.2 } } });
    ws.toggleView(1);
    expect(ws.toRequest().views).toEqual([{ type: "vol", target_sigma: 0.15 }]);
    ws.toggleView(1);
    expect(ws.toRequest().views).toHaveLength(2);
  });

  it("wraps a windowed entry in a window view spec", () => {
    const ws = volWorkspace();
    ws.views[0].window = [0.8, 1.25];
    expect(ws.toRequest().views).toEqual([
      { type: "window", a: 0.8, b: 1.25, of: { type: "vol", target_sigma: 0.15 } },
    ]);
  });

  it("removes views in place", () => {
    const ws = volWorkspace();
    ws.removeView(0);
    expect(ws.toRequest().views).toEqual([]);
  });
});

describe("export and import", () => {
  it("export is exactly the request schema (a valid CLI config)", () => {
    const ws = volWorkspace();
    expect(JSON.parse(ws.exportConfig())).toEqual(ws.toRequest());
  });

  it("import restores a workspace whose request is identical", () => {
    const ws = volWorkspace();
    ws.views[0].window = [0.8, 1.25];
    const restored = Workspace.importConfig(ws.exportConfig());
    expect(restored.toRequest()).toEqual(ws.toRequest());
    expect(restored.views[0].window).toEqual([0.8, 1.25]);
  });

  it("rejects configs without grid or market", () => {
    expect(() => Workspace.importConfig("{}")).toThrow(/grid and market/);
  });

  it("payoff CSV carries the response numbers verbatim", () => {
    const ws = volWorkspace();
    ws.snapshot = volFixture.response;
    const lines = ws.payoffCsv().trimEnd().split("\n");
    expect(lines[0]).toBe("x,f,F");
    expect(lines).toHaveLength(volFixture.response.x.length + 1);
    const [x0, f0, F0] = lines[1].split(",").map(Number);
    expect(x0).toBe(volFixture.response.x[0]);
    expect(f0).toBe(volFixture.response.f[0]);
    expect(F0).toBe(volFixture.response.F[0]);
  });

  it("payoff CSV export requires a snapshot", () => {
    expect(() => volWorkspace().payoffCsv()).toThrow(/no design response/);
  });
});
