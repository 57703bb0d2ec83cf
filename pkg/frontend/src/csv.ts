import { readFileSync } from 'fs'

export interface Diagnostics {
  t: number[]
  kinetic: number[]
  potential: number[]
  mass: number[]
  probe_radius: number[]
  probe_ground_level: number[]
  fp_iters: number[]
  min_area: number[]
}

export const REQUIRED_COLUMNS = [
  't',
  'kinetic',
  'potential',
  'mass',
  'probe_radius',
  'probe_ground_level',
  'fp_iters',
  'min_area',
] as const

export class CsvError extends Error {}

/** Parse a diagnostics.csv file written by the simulator. */
export function readDiagnostics(path: string): Diagnostics {
  const text = readFileSync(path, 'utf8')
  const lines = text.split(/\r?\n/).filter((ln) => ln.trim().length > 0)
  if (lines.length === 0) {
    throw new CsvError(`${path}: empty CSV`)
  }
  const header = lines[0].split(',').map((h) => h.trim())
  const index = new Map<string, number>()
  header.forEach((name, i) => index.set(name, i))
  for (const col of REQUIRED_COLUMNS) {
    if (!index.has(col)) {
      throw new CsvError(`${path}: missing column '${col}'`)
    }
  }
  if (lines.length === 1) {
    throw new CsvError(`${path}: no data rows`)
  }
  const out: Diagnostics = {
    t: [],
    kinetic: [],
    potential: [],
    mass: [],
    probe_radius: [],
    probe_ground_level: [],
    fp_iters: [],
    min_area: [],
  }
  for (let r = 1; r < lines.length; r++) {
    const parts = lines[r].split(',')
    if (parts.length !== header.length) {
      throw new CsvError(`${path}:${r + 1}: expected ${header.length} fields, got ${parts.length}`)
    }
    for (const col of REQUIRED_COLUMNS) {
      const raw = parts[index.get(col)!]
      const value = Number(raw)
      if (!Number.isFinite(value)) {
        throw new CsvError(`${path}:${r + 1}: bad number '${raw}' in column '${col}'`)
      }
      out[col].push(value)
    }
  }
  return out
}
