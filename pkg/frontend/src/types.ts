/**
 * Gateway wire types.
 *
 * These mirror the records the satsim gateway emits; the console never
 * derives values of its own, so everything rendered on screen is one of
 * these shapes or a field read straight out of one.
 */

/** First line of every event stream / metrics file. */
export interface RunHeader {
  kind: "run_header";
  scenario_name: string;
  scenario_hash: string;
  seed: number;
  algorithm: string;
  relay_mode: string;
  slot_duration_s: number;
  duration_s: number;
  slot_count: number;
  engine_version: string;
}

/** Per-slot topology summary: node/link/failure counts. */
export interface TopologyRecord {
  kind: "topology_record";
  slot_index: number;
  t_s: number;
  node_count: number;
  link_count: number;
  failed_link_count: number;
}

/** Route chosen for a workload pair in one slot. `hops` lists every node. */
export interface PathRecord {
  kind: "path_record";
  slot_index: number;
  t_s: number;
  src: string;
  dst: string;
  hops: string[];
  hop_count: number;
  total_distance_km: number;
  theoretical_rtt_s: number;
}

/** One probe result, scheduled or interactive. */
export interface RttSample {
  kind: "rtt_sample";
  launch_t_s: number;
  src: string;
  dst: string;
  rtt_s: number;
  theoretical_rtt_s: number;
  hop_count: number;
  path: string[];
  timed_out: boolean;
}

/** Rate controller state for one flow in one slot. */
export interface FlowRateSample {
  kind: "flow_rate_sample";
  slot_index: number;
  t_s: number;
  src: string;
  dst: string;
  send_rate_bit_s: number;
  cwnd_segments: number;
  bottleneck_bit_s: number;
}

export type EventRecord =
  | RunHeader
  | TopologyRecord
  | PathRecord
  | RttSample
  | FlowRateSample;

export type MetricKind = Exclude<EventRecord["kind"], "run_header">;

export interface GroundStationSummary {
  gs_id: string;
  name: string;
  latitude_deg: number;
  longitude_deg: number;
}

export interface WorkloadEntry {
  kind: "ping" | "flow";
  src: string;
  dst: string;
  [key: string]: unknown;
}

/** One entry of GET /scenarios. */
export interface ScenarioSummary {
  name: string;
  description: string;
  scenario_hash: string;
  relay_mode: string;
  algorithm: string;
  slot_duration_s: number;
  duration_s: number;
  seed: number;
  ground_stations: GroundStationSummary[];
  workload: WorkloadEntry[];
  bundled: boolean;
}

export type RunState = "pending" | "running" | "done" | "failed";

/** Shape of GET /runs/{id} and the POST /runs response. */
export interface RunStatus {
  run_id: string;
  state: RunState;
  progress: { completed_slots: number; total_slots: number };
  scenario_name: string;
  scenario_hash: string;
  seed: number;
  algorithm: string;
  relay_mode: string;
  realtime_factor: number;
  record_counts: Record<MetricKind, number>;
  error: string | null;
}

/** Shape of GET /runs/{id}/metrics/{kind}. */
export interface MetricsPage<T extends EventRecord = EventRecord> {
  run_id: string;
  kind: string;
  from: number;
  count: number;
  total: number;
  records: T[];
}
