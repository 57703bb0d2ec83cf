import { writeFileSync } from 'fs'
import { Diagnostics, readDiagnostics } from './csv'
import { BLACK, GRAY, Raster, SERIES_COLORS } from './raster'

export type PlotKind = 'probe_series' | 'energy_series' | 'mesh_comparison' | 'mass_series'

export interface PlotSpec {
  kind: PlotKind
  inputs: string[] // diagnostics.csv paths, first is the primary run
  labels: string[] // one legend label per input
  output: string // PNG path
}

export interface Series {
  label: string
  x: number[]
  y: number[]
}

const WIDTH = 800
const HEIGHT = 500
const MARGIN = { left: 70, right: 20, top: 30, bottom: 45 }

function niceTicks(lo: number, hi: number, count = 6): number[] {
  if (!(hi > lo)) {
    // degenerate range: pad around the value
    const pad = Math.abs(lo) > 0 ? Math.abs(lo) * 0.1 : 1.0
    lo -= pad
    hi += pad
  }
  const span = hi - lo
  const step0 = span / count
  const mag = Math.pow(10, Math.floor(Math.log10(step0)))
  let step = mag
  for (const mult of [1, 2, 2.5, 5, 10]) {
    if (mag * mult >= step0) {
      step = mag * mult
      break
    }
  }
  const first = Math.ceil(lo / step) * step
  const ticks: number[] = []
  for (let v = first; v <= hi + 1e-12 * span; v += step) {
    ticks.push(Math.abs(v) < 1e-12 * span ? 0 : v)
  }
  return ticks
}

function formatTick(v: number): string {
  if (v === 0) return '0'
  const a = Math.abs(v)
  if (a >= 1e4 || a < 1e-3) return v.toExponential(1)
  return Number(v.toPrecision(4)).toString()
}

/** Draw axes, ticks and the series; shared by every plot kind. */
export function drawChart(
  series: Series[],
  title: string,
  xLabel: string,
  yLabel: string,
): Raster {
  const img = new Raster(WIDTH, HEIGHT)
  const x0 = MARGIN.left
  const x1 = WIDTH - MARGIN.right
  const y0 = HEIGHT - MARGIN.bottom
  const y1 = MARGIN.top

  let xLo = Infinity
  let xHi = -Infinity
  let yLo = Infinity
  let yHi = -Infinity
  for (const s of series) {
    for (const v of s.x) {
      xLo = Math.min(xLo, v)
      xHi = Math.max(xHi, v)
    }
    for (const v of s.y) {
      yLo = Math.min(yLo, v)
      yHi = Math.max(yHi, v)
    }
  }
  if (!Number.isFinite(xLo)) throw new Error('no data to plot')
  if (xHi - xLo <= 0) {
    const pad = Math.abs(xLo) > 0 ? Math.abs(xLo) * 0.05 : 0.5
    xLo -= pad
    xHi += pad
  }
  if (yHi - yLo <= 0) {
    const pad = Math.abs(yLo) > 0 ? Math.abs(yLo) * 0.05 : 0.5
    yLo -= pad
    yHi += pad
  } else {
    const pad = 0.05 * (yHi - yLo)
    yLo -= pad
    yHi += pad
  }

  const px = (v: number) => x0 + ((v - xLo) / (xHi - xLo)) * (x1 - x0)
  const py = (v: number) => y0 - ((v - yLo) / (yHi - yLo)) * (y0 - y1)

  for (const v of niceTicks(xLo, xHi)) {
    const x = px(v)
    img.line(x, y0, x, y1, GRAY)
    const label = formatTick(v)
    img.text(x - Raster.textWidth(label) / 2, y0 + 8, label, BLACK)
  }
  for (const v of niceTicks(yLo, yHi)) {
    const y = py(v)
    img.line(x0, y, x1, y, GRAY)
    const label = formatTick(v)
    img.text(x0 - Raster.textWidth(label) - 6, y - 3, label, BLACK)
  }
  img.rect(x0, y1, x1, y0, BLACK)

  series.forEach((s, k) => {
    const color = SERIES_COLORS[k % SERIES_COLORS.length]
    if (s.x.length === 1) {
      img.marker(px(s.x[0]), py(s.y[0]), color)
    }
    for (let i = 1; i < s.x.length; i++) {
      img.thickLine(px(s.x[i - 1]), py(s.y[i - 1]), px(s.x[i]), py(s.y[i]), color)
    }
  })

  img.text(x0 + 4, 10, title, BLACK, 2)
  img.text((x0 + x1) / 2 - Raster.textWidth(xLabel) / 2, HEIGHT - 14, xLabel, BLACK)
  img.text(6, y1 - 14, yLabel, BLACK)

  // legend in the upper-right corner of the frame
  series.forEach((s, k) => {
    const color = SERIES_COLORS[k % SERIES_COLORS.length]
    const ly = y1 + 8 + 14 * k
    const lx = x1 - 150
    img.thickLine(lx, ly + 3, lx + 24, ly + 3, color)
    img.text(lx + 30, ly, s.label, BLACK)
  })
  return img
}

function seriesFrom(
  runs: { label: string; data: Diagnostics }[],
  pick: (d: Diagnostics) => number[],
): Series[] {
  return runs.map((r) => ({ label: r.label, x: r.data.t, y: pick(r.data) }))
}

/** Render one figure; reads every input CSV, writes one PNG. */
export function render(spec: PlotSpec): void {
  if (spec.inputs.length === 0) throw new Error('render needs at least one CSV input')
  const runs = spec.inputs.map((path, i) => ({
    label: spec.labels[i] ?? `run ${i + 1}`,
    data: readDiagnostics(path),
  }))
  let img: Raster
  switch (spec.kind) {
    case 'probe_series':
      img = drawChart(
        seriesFrom(runs, (d) => d.probe_ground_level),
        'boundary point level',
        't [s]',
        'ground level at probe [m]',
      )
      break
    case 'energy_series': {
      const first = runs[0]
      img = drawChart(
        [
          { label: 'kinetic', x: first.data.t, y: first.data.kinetic },
          { label: 'potential', x: first.data.t, y: first.data.potential },
        ],
        `energy exchange (${first.label})`,
        't [s]',
        'energy',
      )
      break
    }
    case 'mesh_comparison':
      img = drawChart(
        seriesFrom(runs.slice(0, 3), (d) => d.kinetic),
        'kinetic energy by mesh',
        't [s]',
        'kinetic energy',
      )
      break
    case 'mass_series':
      img = drawChart(
        seriesFrom(runs, (d) => d.mass.map((m) => m / d.mass[0])),
        'mass relative to initial',
        't [s]',
        'M(t)/M(0)',
      )
      break
    default:
      throw new Error(`unknown plot kind '${spec.kind as string}'`)
  }
  writeFileSync(spec.output, img.toPng())
}
