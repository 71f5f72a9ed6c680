/**
 * View state as a pure fold over received event records.
 *
 * `reduce` never mutates its input and never invents values: every field
 * is either a record copied off the stream or an append of one. Anything
 * the panels show comes out of this state through the selectors below.
 */
import type {
  EventRecord,
  PathRecord,
  RttSample,
  RunHeader,
  TopologyRecord,
} from "./types";

/** Aligned series of every rtt_sample seen, in stream order. */
export interface RttSeries {
  launchT: number[];
  rtt: number[];
  theoretical: number[];
  timedOut: boolean[];
}

/** Aligned series of every flow_rate_sample seen, in stream order. */
export interface FlowSeries {
  t: number[];
  sendRate: number[];
  bottleneck: number[];
}

export interface ViewState {
  header: RunHeader | null;
  /** Records folded so far, header included. Doubles as the stream cursor. */
  recordCount: number;
  latestSlot: number | null;
  topology: TopologyRecord | null;
  topologyCount: number;
  rtt: RttSeries;
  rttSamples: RttSample[];
  flow: FlowSeries;
  flowCount: number;
  /** Latest path per "src->dst" pair. */
  paths: Record<string, PathRecord>;
  latestPath: PathRecord | null;
  pathCount: number;
}

export function initialState(): ViewState {
  return {
    header: null,
    recordCount: 0,
    latestSlot: null,
    topology: null,
    topologyCount: 0,
    rtt: { launchT: [], rtt: [], theoretical: [], timedOut: [] },
    rttSamples: [],
    flow: { t: [], sendRate: [], bottleneck: [] },
    flowCount: 0,
    paths: {},
    latestPath: null,
    pathCount: 0,
  };
}

export function pairKey(src: string, dst: string): string {
  return `${src}->${dst}`;
}

export function reduce(state: ViewState, record: EventRecord): ViewState {
  switch (record.kind) {
    case "run_header":
      return { ...state, header: record, recordCount: state.recordCount + 1 };
    case "topology_record":
      return {
        ...state,
        recordCount: state.recordCount + 1,
        latestSlot: record.slot_index,
        topology: record,
        topologyCount: state.topologyCount + 1,
      };
    case "path_record":
      return {
        ...state,
        recordCount: state.recordCount + 1,
        latestSlot: record.slot_index,
        paths: { ...state.paths, [pairKey(record.src, record.dst)]: record },
        latestPath: record,
        pathCount: state.pathCount + 1,
      };
    case "rtt_sample":
      return {
        ...state,
        recordCount: state.recordCount + 1,
        rtt: {
          launchT: [...state.rtt.launchT, record.launch_t_s],
          rtt: [...state.rtt.rtt, record.rtt_s],
          theoretical: [...state.rtt.theoretical, record.theoretical_rtt_s],
          timedOut: [...state.rtt.timedOut, record.timed_out],
        },
        rttSamples: [...state.rttSamples, record],
      };
    case "flow_rate_sample":
      return {
        ...state,
        recordCount: state.recordCount + 1,
        latestSlot: record.slot_index,
        flow: {
          t: [...state.flow.t, record.t_s],
          sendRate: [...state.flow.sendRate, record.send_rate_bit_s],
          bottleneck: [...state.flow.bottleneck, record.bottleneck_bit_s],
        },
        flowCount: state.flowCount + 1,
      };
  }
}

export function reduceAll(state: ViewState, records: Iterable<EventRecord>): ViewState {
  let next = state;
  for (const record of records) next = reduce(next, record);
  return next;
}

/** Chart rows for the RTT panel: [launch_t_s, rtt_s, theoretical_rtt_s]. */
export function rttChartData(state: ViewState): [number[], number[], number[]] {
  return [state.rtt.launchT, state.rtt.rtt, state.rtt.theoretical];
}

/** Chart rows for the flow panel: [t_s, send_rate, bottleneck]. */
export function flowChartData(state: ViewState): [number[], number[], number[]] {
  return [state.flow.t, state.flow.sendRate, state.flow.bottleneck];
}

/** Known "src->dst" pairs, in first-seen-stable sorted order. */
export function knownPairs(state: ViewState): string[] {
  return Object.keys(state.paths).sort();
}

/** Path to draw: the selected pair's latest record, else the latest overall. */
export function activePath(state: ViewState, selectedPair: string | null): PathRecord | null {
  if (selectedPair !== null && selectedPair in state.paths) {
    return state.paths[selectedPair];
  }
  return state.latestPath;
}
