/**
 * Panel rendering: plain functions from state to DOM text.
 *
 * Numbers are rendered with String(), never reformatted or rounded, so
 * what the operator reads is exactly what the gateway sent.
 */
import type { ViewState } from "./state";
import type { PathRecord, RttSample, RunStatus } from "./types";

export interface PingRequestEcho {
  src: string;
  dst: string;
}

export type PingOutcome =
  | { type: "sample"; sample: RttSample }
  | { type: "rejected"; message: string; status: number }
  | { type: "transport"; message: string };

export interface PingHistoryEntry {
  request: PingRequestEcho;
  outcome: PingOutcome;
}

/** Text and style class for one ping console row. */
export function pingOutcomeText(entry: PingHistoryEntry): { text: string; kind: string } {
  const { request, outcome } = entry;
  const pair = `${request.src} -> ${request.dst}`;
  switch (outcome.type) {
    case "sample": {
      const s = outcome.sample;
      if (s.timed_out) {
        // Distinct from transport failures: the gateway answered, the
        // network under emulation had no route in time.
        return { text: `${pair}: no route (timed out after ${s.rtt_s} s)`, kind: "timeout" };
      }
      return {
        text: `${pair}: rtt ${s.rtt_s} s (theoretical ${s.theoretical_rtt_s} s, ${s.hop_count} hops)`,
        kind: "ok",
      };
    }
    case "rejected":
      return { text: `${pair}: rejected (${outcome.status}): ${outcome.message}`, kind: "error" };
    case "transport":
      return { text: `${pair}: gateway unreachable: ${outcome.message}`, kind: "error" };
  }
}

function setText(root: ParentNode, selector: string, text: string): void {
  const el = root.querySelector<HTMLElement>(selector);
  if (el !== null) el.textContent = text;
}

export function renderStatus(root: ParentNode, status: RunStatus | null): void {
  if (status === null) {
    setText(root, "[data-run-id]", "no run");
    setText(root, "[data-run-state]", "-");
    setText(root, "[data-run-progress]", "-");
    return;
  }
  setText(root, "[data-run-id]", status.run_id);
  setText(root, "[data-run-state]", status.state);
  setText(
    root,
    "[data-run-progress]",
    `${status.progress.completed_slots} / ${status.progress.total_slots} slots`,
  );
}

export function renderReadouts(root: ParentNode, state: ViewState): void {
  const path = state.latestPath;
  const lastRtt = state.rttSamples.length
    ? state.rttSamples[state.rttSamples.length - 1]
    : null;
  setText(root, "[data-readout-slot]", state.latestSlot === null ? "-" : String(state.latestSlot));
  setText(root, "[data-readout-hops]", path === null ? "-" : String(path.hop_count));
  setText(
    root,
    "[data-readout-distance]",
    path === null ? "-" : `${path.total_distance_km} km`,
  );
  setText(
    root,
    "[data-readout-theoretical]",
    path === null ? "-" : `${path.theoretical_rtt_s} s`,
  );
  setText(root, "[data-readout-rtt]", lastRtt === null ? "-" : `${lastRtt.rtt_s} s`);
  setText(root, "[data-readout-rtt-count]", String(state.rttSamples.length));
  const topo = state.topology;
  setText(
    root,
    "[data-readout-topology]",
    topo === null
      ? "-"
      : `${topo.node_count} nodes, ${topo.link_count} links, ${topo.failed_link_count} failed`,
  );
}

/** Hop list for the active path, one element per node in stream order. */
export function renderPath(root: HTMLElement, path: PathRecord | null): void {
  root.textContent = "";
  if (path === null) {
    const empty = document.createElement("li");
    empty.textContent = "no path yet";
    empty.className = "muted";
    root.appendChild(empty);
    return;
  }
  for (const hop of path.hops) {
    const li = document.createElement("li");
    li.textContent = hop;
    root.appendChild(li);
  }
}

export function renderPingHistory(root: HTMLElement, history: PingHistoryEntry[]): void {
  root.textContent = "";
  if (history.length === 0) {
    const empty = document.createElement("li");
    empty.textContent = "no probes sent";
    empty.className = "muted";
    root.appendChild(empty);
    return;
  }
  // Newest first.
  for (let i = history.length - 1; i >= 0; i--) {
    const { text, kind } = pingOutcomeText(history[i]);
    const li = document.createElement("li");
    li.textContent = text;
    li.className = `ping-${kind}`;
    root.appendChild(li);
  }
}
