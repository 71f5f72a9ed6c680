/**
 * Chart panels on top of uPlot. The x axis is emulation time in seconds,
 * not wall clock, so both charts run with time scaling off. Data rows
 * come straight from the state selectors; the charts never resample.
 */
import uPlot from "uplot";
import "uplot/dist/uPlot.min.css";

const AXIS_STYLE = {
  stroke: "#8b95ad",
  grid: { stroke: "#1d2438" },
  ticks: { stroke: "#1d2438" },
};

function makeChart(
  el: HTMLElement,
  title: string,
  series: { label: string; stroke: string; dash?: number[] }[],
  height: number,
): uPlot {
  const options: uPlot.Options = {
    title,
    width: Math.max(el.clientWidth, 320),
    height,
    scales: { x: { time: false } },
    axes: [
      { ...AXIS_STYLE, label: "t (s)" },
      { ...AXIS_STYLE },
    ],
    series: [
      { label: "t" },
      ...series.map((s) => ({
        label: s.label,
        stroke: s.stroke,
        width: 1.5,
        dash: s.dash,
        points: { show: true, size: 4 },
      })),
    ],
    legend: { live: false },
  };
  return new uPlot(options, [[], ...series.map(() => [])], el);
}

export function createRttChart(el: HTMLElement): uPlot {
  return makeChart(
    el,
    "round-trip time (s)",
    [
      { label: "measured", stroke: "#e8a33d" },
      { label: "theoretical", stroke: "#5b8dd9", dash: [6, 4] },
    ],
    200,
  );
}

export function createFlowChart(el: HTMLElement): uPlot {
  return makeChart(
    el,
    "flow rate (bit/s)",
    [
      { label: "send rate", stroke: "#6fbf73" },
      { label: "bottleneck", stroke: "#c75d5d", dash: [6, 4] },
    ],
    200,
  );
}

export function resizeChart(chart: uPlot, el: HTMLElement): void {
  chart.setSize({ width: Math.max(el.clientWidth, 320), height: chart.height });
}
