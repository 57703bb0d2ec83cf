#!/usr/bin/env node
/**
 * make_figures <run_dir> [run_dir2 run_dir3] --out figures/
 *
 * Reads diagnostics.csv from each run directory and writes the four
 * standard figures. The first run directory drives the energy plot; the
 * comparison plot overlays the kinetic energy of every run given.
 */
import { existsSync, mkdirSync } from 'fs'
import { basename, join, resolve } from 'path'
import { render } from './plots'

export interface CliOptions {
  runDirs: string[]
  outDir: string
}

export function parseArgs(argv: string[]): CliOptions {
  const runDirs: string[] = []
  let outDir = 'figures'
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i]
    if (arg === '--out') {
      const value = argv[++i]
      if (!value) throw new Error('--out needs a directory argument')
      outDir = value
    } else if (arg === '--help' || arg === '-h') {
      throw new Error('usage: make_figures <run_dir> [run_dir2 run_dir3] --out figures/')
    } else if (arg.startsWith('--')) {
      throw new Error(`unknown option '${arg}'`)
    } else {
      runDirs.push(arg)
    }
  }
  if (runDirs.length < 1 || runDirs.length > 3) {
    throw new Error('expected between one and three run directories')
  }
  return { runDirs, outDir }
}

export function makeFigures(options: CliOptions): string[] {
  const csvs = options.runDirs.map((dir) => {
    const path = join(dir, 'diagnostics.csv')
    if (!existsSync(path)) throw new Error(`no diagnostics.csv in '${dir}'`)
    return path
  })
  const labels = options.runDirs.map((dir) => basename(resolve(dir)))
  mkdirSync(options.outDir, { recursive: true })
  const jobs: { kind: 'probe_series' | 'energy_series' | 'mesh_comparison' | 'mass_series'; file: string }[] = [
    { kind: 'probe_series', file: 'probe_series.png' },
    { kind: 'energy_series', file: 'energy_series.png' },
    { kind: 'mesh_comparison', file: 'mesh_comparison.png' },
    { kind: 'mass_series', file: 'mass_series.png' },
  ]
  const written: string[] = []
  for (const job of jobs) {
    const output = join(options.outDir, job.file)
    render({ kind: job.kind, inputs: csvs, labels, output })
    written.push(output)
  }
  return written
}

export function main(argv: string[]): number {
  try {
    const options = parseArgs(argv)
    const written = makeFigures(options)
    for (const path of written) console.log(path)
    return 0
  } catch (err) {
    console.error(`error: ${(err as Error).message}`)
    return 1
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)))
}
