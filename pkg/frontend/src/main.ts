import "./style.css";
import {
  GatewayError,
  getRun,
  listScenarios,
  postInject,
  postPing,
  startRun,
} from "./client";
import { createFlowChart, createRttChart, resizeChart } from "./chart";
import { drawMap } from "./map";
import {
  activePath,
  flowChartData,
  initialState,
  knownPairs,
  reduce,
  rttChartData,
} from "./state";
import type { ViewState } from "./state";
import {
  renderPath,
  renderPingHistory,
  renderReadouts,
  renderStatus,
} from "./panels";
import type { PingHistoryEntry } from "./panels";
import { subscribeEvents } from "./stream";
import type { StreamPhase } from "./stream";
import type { RunStatus, ScenarioSummary } from "./types";

const DEFAULT_GATEWAY = "http://127.0.0.1:8000";

document.querySelector<HTMLDivElement>("#app")!.innerHTML = `
  <header>
    <h1>satsim console</h1>
    <label>gateway
      <input id="gateway-url" type="text" spellcheck="false" />
    </label>
    <span id="stream-phase" class="muted"></span>
  </header>

  <div id="banner" class="banner hidden">
    <span id="banner-text"></span>
    <button id="banner-retry">retry</button>
  </div>

  <section class="launch">
    <h2>scenario</h2>
    <div class="row">
      <select id="scenario-select"></select>
      <label>seed <input id="seed-input" type="number" placeholder="scenario default" /></label>
      <label>pace <input id="pace-input" type="number" step="0.5" min="0" value="1" title="simulated seconds per wall second; 0 = as fast as possible" /></label>
      <button id="launch-button" disabled>launch run</button>
    </div>
    <p id="scenario-description" class="muted"></p>
  </section>

  <section class="run">
    <h2>run</h2>
    <div class="row status-strip">
      <span class="chip">id <b data-run-id>no run</b></span>
      <span class="chip">state <b data-run-state>-</b></span>
      <span class="chip">progress <b data-run-progress>-</b></span>
    </div>
    <div class="readouts">
      <div class="chip">slot <b data-readout-slot>-</b></div>
      <div class="chip">hops <b data-readout-hops>-</b></div>
      <div class="chip">distance <b data-readout-distance>-</b></div>
      <div class="chip">theoretical rtt <b data-readout-theoretical>-</b></div>
      <div class="chip">last rtt <b data-readout-rtt>-</b></div>
      <div class="chip">probes <b data-readout-rtt-count>0</b></div>
      <div class="chip">topology <b data-readout-topology>-</b></div>
    </div>
  </section>

  <section class="panels">
    <div class="panel map-panel">
      <h3>route map <select id="pair-select" title="which pair to draw"></select></h3>
      <canvas id="map-canvas" width="720" height="360"></canvas>
      <ol id="path-list" class="hops"></ol>
    </div>
    <div class="panel">
      <div id="rtt-chart"></div>
      <div id="flow-chart"></div>
    </div>
  </section>

  <section class="console">
    <div class="panel">
      <h3>ping console</h3>
      <div class="row">
        <select id="ping-src"></select>
        <span>to</span>
        <select id="ping-dst"></select>
        <button id="ping-button" disabled>ping</button>
        <span id="ping-note" class="muted">launch a run first</span>
      </div>
      <ul id="ping-history"></ul>
    </div>
    <div class="panel">
      <h3>what-if injection</h3>
      <div class="row">
        <label><input id="inject-fail" type="checkbox" /> fail ISLs</label>
        <label>capacity scale <input id="inject-scale" type="number" step="0.1" value="1" /></label>
        <button id="inject-button" disabled>inject</button>
      </div>
      <p id="inject-note" class="muted"></p>
    </div>
  </section>
`;

function byId<T extends HTMLElement>(id: string): T {
  return document.getElementById(id) as T;
}

const gatewayInput = byId<HTMLInputElement>("gateway-url");
const banner = byId<HTMLDivElement>("banner");
const bannerText = byId<HTMLSpanElement>("banner-text");
const scenarioSelect = byId<HTMLSelectElement>("scenario-select");
const scenarioDescription = byId<HTMLParagraphElement>("scenario-description");
const seedInput = byId<HTMLInputElement>("seed-input");
const paceInput = byId<HTMLInputElement>("pace-input");
const launchButton = byId<HTMLButtonElement>("launch-button");
const pairSelect = byId<HTMLSelectElement>("pair-select");
const mapCanvas = byId<HTMLCanvasElement>("map-canvas");
const pathList = byId<HTMLOListElement>("path-list");
const pingSrc = byId<HTMLSelectElement>("ping-src");
const pingDst = byId<HTMLSelectElement>("ping-dst");
const pingButton = byId<HTMLButtonElement>("ping-button");
const pingNote = byId<HTMLSpanElement>("ping-note");
const pingHistoryEl = byId<HTMLUListElement>("ping-history");
const injectFail = byId<HTMLInputElement>("inject-fail");
const injectScale = byId<HTMLInputElement>("inject-scale");
const injectButton = byId<HTMLButtonElement>("inject-button");
const injectNote = byId<HTMLParagraphElement>("inject-note");
const streamPhaseEl = byId<HTMLSpanElement>("stream-phase");

gatewayInput.value = localStorage.getItem("satsim-gateway") ?? DEFAULT_GATEWAY;
gatewayInput.addEventListener("change", () => {
  localStorage.setItem("satsim-gateway", gatewayInput.value);
  void loadScenarios();
});

const rttChart = createRttChart(byId<HTMLDivElement>("rtt-chart"));
const flowChart = createFlowChart(byId<HTMLDivElement>("flow-chart"));
window.addEventListener("resize", () => {
  resizeChart(rttChart, byId<HTMLDivElement>("rtt-chart"));
  resizeChart(flowChart, byId<HTMLDivElement>("flow-chart"));
});

// Mutable app state. `view` only ever advances through the pure fold; the
// rest is UI bookkeeping (selection, history, the open subscription).
let scenarios: ScenarioSummary[] = [];
let selectedScenario: ScenarioSummary | null = null;
let view: ViewState = initialState();
let runStatus: RunStatus | null = null;
let pingHistory: PingHistoryEntry[] = [];
let selectedPair: string | null = null;
let unsubscribe: (() => void) | null = null;
let statusTimer: ReturnType<typeof setInterval> | null = null;
let renderQueued = false;

function gatewayBase(): string {
  return gatewayInput.value.trim() || DEFAULT_GATEWAY;
}

function showBanner(message: string): void {
  bannerText.textContent = message;
  banner.classList.remove("hidden");
}

function hideBanner(): void {
  banner.classList.add("hidden");
}

/** Single render pass per animation frame, whatever arrived in between. */
function scheduleRender(): void {
  if (renderQueued) return;
  renderQueued = true;
  requestAnimationFrame(() => {
    renderQueued = false;
    render();
  });
}

function render(): void {
  renderStatus(document, runStatus);
  renderReadouts(document, view);

  const pairs = knownPairs(view);
  if (pairSelect.options.length !== pairs.length + 1) {
    pairSelect.innerHTML = "";
    pairSelect.appendChild(new Option("latest", ""));
    for (const pair of pairs) pairSelect.appendChild(new Option(pair, pair));
    pairSelect.value = selectedPair ?? "";
  }

  const path = activePath(view, selectedPair);
  drawMap(mapCanvas, { stations: selectedScenario?.ground_stations ?? [], path });
  renderPath(pathList, path);

  rttChart.setData(rttChartData(view));
  flowChart.setData(flowChartData(view));

  renderPingHistory(pingHistoryEl, pingHistory);

  const running = runStatus?.state === "running";
  pingButton.disabled = !running;
  injectButton.disabled = !running;
  if (runStatus === null) {
    pingNote.textContent = "launch a run first";
  } else if (running) {
    pingNote.textContent = "";
  } else {
    pingNote.textContent = `run is ${runStatus.state}; probes need a running run`;
  }
}

function renderScenarioPicker(): void {
  scenarioSelect.innerHTML = "";
  if (scenarios.length === 0) {
    scenarioSelect.appendChild(new Option("no scenarios available", ""));
    scenarioSelect.disabled = true;
    launchButton.disabled = true;
    scenarioDescription.textContent = "the gateway reports an empty scenario list";
    return;
  }
  scenarioSelect.disabled = false;
  launchButton.disabled = false;
  for (const s of scenarios) {
    scenarioSelect.appendChild(new Option(s.name, s.name));
  }
  onScenarioChosen();
}

function onScenarioChosen(): void {
  selectedScenario = scenarios.find((s) => s.name === scenarioSelect.value) ?? null;
  if (selectedScenario === null) return;
  scenarioDescription.textContent =
    `${selectedScenario.description} (${selectedScenario.relay_mode}, ` +
    `${selectedScenario.algorithm}, slot ${selectedScenario.slot_duration_s} s, ` +
    `${selectedScenario.duration_s} s)`;
  pingSrc.innerHTML = "";
  pingDst.innerHTML = "";
  for (const g of selectedScenario.ground_stations) {
    pingSrc.appendChild(new Option(g.gs_id, g.gs_id));
    pingDst.appendChild(new Option(g.gs_id, g.gs_id));
  }
  const firstPair = selectedScenario.workload[0];
  if (firstPair !== undefined) {
    pingSrc.value = firstPair.src;
    pingDst.value = firstPair.dst;
  } else if (selectedScenario.ground_stations.length > 1) {
    pingDst.selectedIndex = 1;
  }
  scheduleRender();
}

async function loadScenarios(): Promise<void> {
  try {
    scenarios = await listScenarios(gatewayBase());
    hideBanner();
  } catch (error) {
    scenarios = [];
    showBanner(`gateway unreachable at ${gatewayBase()}: ${String(error)}`);
  }
  renderScenarioPicker();
}

function stopRunTracking(): void {
  unsubscribe?.();
  unsubscribe = null;
  if (statusTimer !== null) {
    clearInterval(statusTimer);
    statusTimer = null;
  }
}

async function launch(): Promise<void> {
  if (selectedScenario === null) return;
  launchButton.disabled = true;
  try {
    const request: Parameters<typeof startRun>[1] = {
      scenario_name: selectedScenario.name,
      realtime_factor: Number(paceInput.value) || 0,
    };
    if (seedInput.value.trim() !== "") request.seed = Number(seedInput.value);
    const status = await startRun(gatewayBase(), request);
    hideBanner();
    trackRun(status);
  } catch (error) {
    showBanner(`failed to start run: ${String(error)}`);
  } finally {
    launchButton.disabled = false;
  }
}

function trackRun(status: RunStatus): void {
  stopRunTracking();
  view = initialState();
  pingHistory = [];
  selectedPair = null;
  runStatus = status;

  // One event-stream subscription per run; records fold one at a time.
  unsubscribe = subscribeEvents(
    gatewayBase(),
    status.run_id,
    {
      onRecord: (record) => {
        view = reduce(view, record);
        scheduleRender();
      },
      onPhase: (phase: StreamPhase) => {
        streamPhaseEl.textContent = `stream: ${phase}`;
        scheduleRender();
      },
    },
  );

  statusTimer = setInterval(async () => {
    try {
      runStatus = await getRun(gatewayBase(), status.run_id);
      if (runStatus.state === "done" || runStatus.state === "failed") {
        if (statusTimer !== null) clearInterval(statusTimer);
        statusTimer = null;
        if (runStatus.state === "failed" && runStatus.error !== null) {
          showBanner(`run failed: ${runStatus.error}`);
        }
      }
      scheduleRender();
    } catch {
      // Transient; the stream keeps its own retry loop.
    }
  }, 500);

  scheduleRender();
}

async function sendPing(): Promise<void> {
  if (runStatus === null) return;
  const request = { src: pingSrc.value, dst: pingDst.value };
  pingButton.disabled = true;
  try {
    const sample = await postPing(gatewayBase(), runStatus.run_id, request.src, request.dst);
    pingHistory = [...pingHistory, { request, outcome: { type: "sample", sample } }];
  } catch (error) {
    if (error instanceof GatewayError) {
      pingHistory = [
        ...pingHistory,
        { request, outcome: { type: "rejected", message: error.message, status: error.status } },
      ];
    } else {
      pingHistory = [
        ...pingHistory,
        { request, outcome: { type: "transport", message: String(error) } },
      ];
    }
  } finally {
    pingButton.disabled = false;
    scheduleRender();
  }
}

async function sendInject(): Promise<void> {
  if (runStatus === null) return;
  injectButton.disabled = true;
  try {
    const applied = await postInject(gatewayBase(), runStatus.run_id, {
      fail_isls: injectFail.checked,
      capacity_scale: Number(injectScale.value) || 1,
    });
    injectNote.textContent = `applied from next slot: ${JSON.stringify(applied)}`;
  } catch (error) {
    injectNote.textContent = `inject failed: ${String(error)}`;
  } finally {
    injectButton.disabled = false;
    scheduleRender();
  }
}

byId<HTMLButtonElement>("banner-retry").addEventListener("click", () => void loadScenarios());
scenarioSelect.addEventListener("change", onScenarioChosen);
launchButton.addEventListener("click", () => void launch());
pairSelect.addEventListener("change", () => {
  selectedPair = pairSelect.value === "" ? null : pairSelect.value;
  scheduleRender();
});
pingButton.addEventListener("click", () => void sendPing());
injectButton.addEventListener("click", () => void sendInject());

void loadScenarios();
scheduleRender();
