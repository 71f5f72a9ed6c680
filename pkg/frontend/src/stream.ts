/**
 * Event stream subscription.
 *
 * The gateway serves `GET /runs/{id}/events?cursor=N` as newline-delimited
 * JSON over a plain streaming response: it replays from `cursor` (an index
 * into the header+records sequence), then follows the run live and closes
 * the stream once the run is finished. A clean close therefore means "run
 * done"; anything else is a transport failure and the subscription
 * reconnects from the records it has already counted, so a drop produces
 * neither duplicates nor gaps.
 */
import type { EventRecord } from "./types";

/** Reassembles complete lines from arbitrarily chunked stream text. */
export class LineSplitter {
  private tail = "";

  push(chunk: string): string[] {
    const parts = (this.tail + chunk).split("\n");
    this.tail = parts.pop() ?? "";
    return parts.filter((line) => line.length > 0);
  }

  /** Remaining partial line at end of stream, if any. */
  flush(): string | null {
    const rest = this.tail;
    this.tail = "";
    return rest.length > 0 ? rest : null;
  }
}

export function parseEventLine(line: string): EventRecord {
  const record = JSON.parse(line) as EventRecord;
  if (typeof record !== "object" || record === null || typeof record.kind !== "string") {
    throw new Error(`event line carries no kind: ${line.slice(0, 120)}`);
  }
  return record;
}

export type StreamPhase = "connecting" | "live" | "retrying" | "closed";

export interface EventStreamHandlers {
  /** Called once per record, in stream order. `index` is the global cursor. */
  onRecord: (record: EventRecord, index: number) => void;
  onPhase?: (phase: StreamPhase) => void;
}

export interface EventStreamOptions {
  cursor?: number;
  retryDelayMs?: number;
  fetchImpl?: typeof fetch;
}

/**
 * Opens the event stream for a run and keeps it open until the run is done.
 * Returns a closure that cancels the subscription.
 */
export function subscribeEvents(
  base: string,
  runId: string,
  handlers: EventStreamHandlers,
  options: EventStreamOptions = {},
): () => void {
  const fetchImpl = options.fetchImpl ?? fetch;
  const retryDelayMs = options.retryDelayMs ?? 1000;
  let cursor = options.cursor ?? 0;
  let stopped = false;
  let retryTimer: ReturnType<typeof setTimeout> | null = null;
  let controller: AbortController | null = null;

  const phase = (p: StreamPhase) => handlers.onPhase?.(p);

  async function readOnce(): Promise<void> {
    controller = new AbortController();
    const url = `${base.replace(/\/+$/, "")}/runs/${encodeURIComponent(runId)}/events?cursor=${cursor}`;
    const response = await fetchImpl(url, { signal: controller.signal });
    if (!response.ok || response.body === null) {
      throw new Error(`event stream failed: ${response.status}`);
    }
    phase("live");

    const reader = response.body.getReader();
    const decoder = new TextDecoder();
    const splitter = new LineSplitter();
    for (;;) {
      const { done, value } = await reader.read();
      if (done) break;
      for (const line of splitter.push(decoder.decode(value, { stream: true }))) {
        handlers.onRecord(parseEventLine(line), cursor);
        cursor += 1;
      }
    }
    const rest = splitter.flush();
    if (rest !== null) {
      handlers.onRecord(parseEventLine(rest), cursor);
      cursor += 1;
    }
  }

  async function loop(): Promise<void> {
    for (;;) {
      if (stopped) return;
      phase("connecting");
      try {
        await readOnce();
        // Clean close: the gateway only ends a healthy stream when the
        // run is finished and fully replayed.
        if (!stopped) phase("closed");
        return;
      } catch (error) {
        if (stopped) return;
        phase("retrying");
        await new Promise<void>((resolve) => {
          retryTimer = setTimeout(resolve, retryDelayMs);
        });
      }
    }
  }

  void loop();

  return () => {
    stopped = true;
    if (retryTimer !== null) clearTimeout(retryTimer);
    controller?.abort();
    phase("closed");
  };
}
