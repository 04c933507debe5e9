// DOM wiring for the control panel; all logic lives in model.ts and the
// pure chart/schematic helpers.

import { HttpApi } from "./api.js";
import { computeChartLayout, renderChart, SERIES_COLORS } from "./chart.js";
import { PanelModel, unitaritySum } from "./model.js";
import { estimateOscillations } from "./oscillations.js";
import { renderSchematic } from "./schematic.js";
import type { Sample } from "./types.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

const api = new HttpApi("");
const model = new PanelModel(api);

const banner = $<HTMLDivElement>("banner");
const thetaDisplay = $<HTMLSpanElement>("theta-display");
const rotationInput = $<HTMLInputElement>("rotation");
const rotationValue = $<HTMLSpanElement>("rotation-value");
const positionInput = $<HTMLInputElement>("position");
const positionValue = $<HTMLSpanElement>("position-value");
const laserSelect = $<HTMLSelectElement>("laser");
const scanStart = $<HTMLButtonElement>("scan-start");
const scanStop = $<HTMLButtonElement>("scan-stop");
const readoutI1 = $<HTMLSpanElement>("readout-i1");
const readoutI2 = $<HTMLSpanElement>("readout-i2");
const readoutSum = $<HTMLSpanElement>("readout-sum");
const readoutDl = $<HTMLSpanElement>("readout-dl");
const plotCaption = $<HTMLSpanElement>("plot-caption");
const chartCanvas = $<HTMLCanvasElement>("chart");
const schematicCanvas = $<HTMLCanvasElement>("schematic");

let dirty = true;
model.onChange = () => {
  dirty = true;
};

// -- controls -----------------------------------------------------------------

rotationInput.addEventListener("input", () => {
  rotationValue.textContent = `${rotationInput.value} deg`;
});
rotationInput.addEventListener("change", () => {
  void model.setRotation(Number(rotationInput.value));
});
positionInput.addEventListener("input", () => {
  positionValue.textContent = `${Number(positionInput.value).toFixed(2)} mm`;
});
positionInput.addEventListener("change", () => {
  void model.setPosition(Number(positionInput.value));
});
laserSelect.addEventListener("change", () => {
  void model.setLaser(laserSelect.value);
});
scanStart.addEventListener("click", () => {
  void model.startScan({
    s_start_mm: 0.0,
    s_end_mm: model.state?.travel_mm ?? 5.5,
    speed_mm_per_s: 0.55,
    sample_rate_hz: 25.0,
  });
});
scanStop.addEventListener("click", () => {
  void model.stopScan();
});

// -- stream with polling fallback ----------------------------------------------

let pollTimer: number | null = null;

function startPolling(): void {
  if (pollTimer !== null) return;
  pollTimer = window.setInterval(() => {
    void model.refreshState();
  }, 1000);
}

function stopPolling(): void {
  if (pollTimer !== null) {
    window.clearInterval(pollTimer);
    pollTimer = null;
  }
}

function openStream(): void {
  const source = new EventSource("/api/stream");
  source.addEventListener("open", () => {
    model.onStreamOpen();
    stopPolling();
    // resync anything missed while disconnected; dedupe handles overlap
    void model.loadTrace();
  });
  source.addEventListener("sample", (event) => {
    model.onStreamSample(JSON.parse((event as MessageEvent<string>).data) as Sample);
  });
  source.addEventListener("error", () => {
    // EventSource reconnects by itself; poll state meanwhile
    model.onStreamError();
    startPolling();
  });
}

// -- rendering -----------------------------------------------------------------

function syncControls(): void {
  const state = model.state;
  const enabled = model.reachable;
  for (const el of [rotationInput, positionInput, laserSelect, scanStart, scanStop]) {
    el.disabled = !enabled;
  }
  if (!state) {
    banner.textContent = "service unreachable";
    banner.classList.add("visible");
    thetaDisplay.textContent = "--";
    return;
  }
  banner.textContent = model.notice ?? "";
  banner.classList.toggle("visible", model.notice !== null);
  thetaDisplay.textContent = `${state.theta_deg.toFixed(1)} deg`;
  if (document.activeElement !== rotationInput) {
    rotationInput.value = String(state.table_rotation_deg);
    rotationValue.textContent = `${state.table_rotation_deg.toFixed(1)} deg`;
  }
  positionInput.disabled = !enabled || state.scan_active;
  if (document.activeElement !== positionInput) {
    positionInput.max = String(state.travel_mm);
    positionInput.value = String(state.position_mm);
    positionValue.textContent = `${state.position_mm.toFixed(2)} mm`;
  }
  if (laserSelect.value !== state.laser) laserSelect.value = state.laser;
  scanStart.disabled = !enabled || state.scan_active;
  scanStop.disabled = !enabled || !state.scan_active;

  const samples = model.buffer.list();
  const last = samples[samples.length - 1];
  const live = state.scan_active && last ? last : state;
  readoutI1.textContent = live.i1.toFixed(4);
  readoutI2.textContent = live.i2.toFixed(4);
  readoutDl.textContent = `${live.delta_L_um.toFixed(2)} um`;
  readoutSum.textContent = last
    ? unitaritySum(last, model.chain).toFixed(3)
    : unitaritySum(state, model.chain).toFixed(3);
}

function renderAll(): void {
  const samples = model.buffer.list();
  const layout = computeChartLayout(samples, chartCanvas.width, chartCanvas.height);
  const ctx = chartCanvas.getContext("2d");
  if (ctx) renderChart(ctx, layout, chartCanvas.width, chartCanvas.height);
  const est = estimateOscillations(
    samples.map((s) => s.delta_L_um),
    samples.map((s) => s.i2),
  );
  plotCaption.textContent = est
    ? `~${est.periods.toFixed(1)} oscillations (period ${est.periodUm.toFixed(2)} um)`
    : "";
  const sctx = schematicCanvas.getContext("2d");
  if (sctx && model.state) {
    renderSchematic(sctx, model.state, schematicCanvas.width, schematicCanvas.height);
  }
  syncControls();
}

function frame(): void {
  if (dirty) {
    dirty = false;
    renderAll();
  }
  window.requestAnimationFrame(frame);
}

// -- boot ------------------------------------------------------------------------

const legend = $<HTMLDivElement>("legend");
legend.innerHTML =
  `<span style="color:${SERIES_COLORS.i1}">● detector 1 (survival)</span> ` +
  `<span style="color:${SERIES_COLORS.i2}">● detector 2 (appearance)</span>`;

void (async () => {
  await model.refreshState();
  await model.loadTrace().catch(() => 0); // no trace yet is fine
  openStream();
  startPolling(); // harmless alongside the stream until it opens
  window.requestAnimationFrame(frame);
})();
