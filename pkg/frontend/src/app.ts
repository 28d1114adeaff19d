// DOM wiring: thin layer between the form controls, the Workspace state and
// the debounced client. Every chart redraw uses the response arrays verbatim.

import { DesignClient } from "./client";
import { densitySeries, lineChart, payoffSeries } from "./charts";
import { Workspace } from "./workspace";
import type { ApiError, DesignResponse, ViewSpec } from "./types";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

const workspace = new Workspace();

const apiBase = $<HTMLInputElement>("api-base");
const marketMu = $<HTMLInputElement>("market-mu");
const marketSigma = $<HTMLInputElement>("market-sigma");
const riskSlider = $<HTMLInputElement>("risk-slider");
const riskValue = $<HTMLSpanElement>("risk-value");
const viewList = $<HTMLUListElement>("view-list");
const errorBanner = $<HTMLDivElement>("error-banner");
const diagPanel = $<HTMLDivElement>("diagnostics");
const payoffChart = $<HTMLDivElement>("payoff-chart");
const densityChart = $<HTMLDivElement>("density-chart");

let client = makeClient();

function makeClient(): DesignClient {
  return new DesignClient(apiBase.value.replace(/\/$/, ""), {
    onResult: render,
    onError: showError,
  });
}

function recompute(): void {
  errorBanner.style.display = "none";
  client.request(workspace.toRequest());
}

function render(response: DesignResponse): void {
  workspace.snapshot = response;
  payoffChart.innerHTML = lineChart(payoffSeries(response), {
    title: "payoff per unit invested",
    logX: workspace.grid.spacing === "log",
  });
  densityChart.innerHTML = lineChart(densitySeries(response), {
    title: "believed vs market density",
    logX: workspace.grid.spacing === "log",
  });
  const d = response.diagnostics;
  diagPanel.innerHTML =
    `<dl><dt>budget residual</dt><dd>${d.budget_residual.toExponential(2)}</dd>` +
    `<dt>growth rate</dt><dd>${d.growth_rate.toFixed(6)}</dd>` +
    `<dt>KL(b&#8741;m)</dt><dd>${d.kl_b_m.toFixed(6)}</dd>` +
    `<dt>risk profile</dt><dd>${d.r_profile}</dd></dl>`;
}

function showError(error: ApiError): void {
  errorBanner.textContent = `${error.error}: ${error.detail}`;
  errorBanner.style.display = "block";
}

function describeView(spec: ViewSpec): string {
  switch (spec.type) {
    case "vol":
      return `vol view: sigma → ${spec.target_sigma}`;
    case "ratio":
      return `ratio view: lognormal(${spec.believed.params.mu}, ${spec.believed.params.sigma})`;
    case "table":
      return `table view (${spec.x.length} points)`;
    case "window":
      return `${describeView(spec.of)} on [${spec.a}, ${spec.b}]`;
  }
}

function renderViewList(): void {
  viewList.innerHTML = "";
  workspace.views.forEach((entry, index) => {
    const item = document.createElement("li");
    const toggle = document.createElement("input");
    toggle.type = "checkbox";
    toggle.checked = entry.enabled;
    toggle.addEventListener("change", () => {
      workspace.toggleView(index);
      recompute();
    });
    const label = document.createElement("span");
    label.textContent =
      describeView(entry.spec) +
      (entry.window ? ` on [${entry.window[0]}, ${entry.window[1]}]` : "");
    const remove = document.createElement("button");
    remove.textContent = "×";
    remove.addEventListener("click", () => {
      workspace.removeView(index);
      renderViewList();
      recompute();
    });
    item.append(toggle, label, remove);
    viewList.append(item);
  });
}

function syncMarketInputs(): void {
  marketMu.value = String(workspace.market.params.mu);
  marketSigma.value = String(workspace.market.params.sigma);
  riskSlider.value = String(typeof workspace.risk === "number" ? workspace.risk : 1);
  riskValue.textContent = riskSlider.value;
}

apiBase.addEventListener("change", () => {
  client = makeClient();
  recompute();
});
marketMu.addEventListener("input", () => {
  workspace.market.params.mu = Number(marketMu.value);
  recompute();
});
marketSigma.addEventListener("input", () => {
  workspace.market.params.sigma = Number(marketSigma.value);
  recompute();
});
riskSlider.addEventListener("input", () => {
  workspace.risk = Number(riskSlider.value);
  riskValue.textContent = riskSlider.value;
  recompute();
});

$<HTMLButtonElement>("add-vol-view").addEventListener("click", () => {
  const sigma = Number($<HTMLInputElement>("vol-target").value);
  const entry = workspace.addView({ type: "vol", target_sigma: sigma });
  const lo = $<HTMLInputElement>("window-lo").value;
  const hi = $<HTMLInputElement>("window-hi").value;
  if (lo && hi) entry.window = [Number(lo), Number(hi)];
  renderViewList();
  recompute();
});

$<HTMLButtonElement>("add-ratio-view").addEventListener("click", () => {
  const mu = Number($<HTMLInputElement>("ratio-mu").value);
  const sigma = Number($<HTMLInputElement>("ratio-sigma").value);
  workspace.addView({
    type: "ratio",
    believed: { family: "lognormal", params: { mu, sigma } },
  });
  renderViewList();
  recompute();
});

$<HTMLButtonElement>("export-workspace").addEventListener("click", () => {
  download("workspace.json", workspace.exportConfig(), "application/json");
  if (workspace.snapshot) download("payoff.csv", workspace.payoffCsv(), "text/csv");
});

$<HTMLInputElement>("import-workspace").addEventListener("change", async (event) => {
  const input = event.target as HTMLInputElement;
  const file = input.files?.[0];
  if (!file) return;
  try {
    const imported = Workspace.importConfig(await file.text());
    workspace.grid = imported.grid;
    workspace.market = imported.market;
    workspace.views = imported.views;
    workspace.risk = imported.risk;
    syncMarketInputs();
    renderViewList();
    recompute();
  } catch (err) {
    showError({ error: "import-failed", detail: String(err) });
  } finally {
    input.value = "";
  }
});

function download(name: string, text: string, mime: string): void {
  const url = URL.createObjectURL(new Blob([text], { type: mime }));
  const link = document.createElement("a");
  link.href = url;
  link.download = name;
  link.click();
  URL.revokeObjectURL(url);
}

syncMarketInputs();
renderViewList();
recompute();
