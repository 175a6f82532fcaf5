import { spawn } from 'node:child_process'
import { mkdtemp, readFile, rm, writeFile } from 'node:fs/promises'
import { tmpdir } from 'node:os'
import { join } from 'node:path'

import { configText, type AugOptions } from './config.js'
import { decodeHistogram, encodeHistogram, type Histogram } from './formats.js'

export interface EngineResult {
  code: number
  stdout: string
  stderr: string
}

/** Interpreter used to launch the engine; override with SHAPEAUG_PYTHON. */
export function enginePython(): string {
  return process.env.SHAPEAUG_PYTHON ?? 'python3'
}

export function runEngine(args: string[]): Promise<EngineResult> {
  return new Promise((resolve, reject) => {
    const child = spawn(enginePython(), ['-m', 'shapeaug', ...args], {
      stdio: ['ignore', 'pipe', 'pipe'],
    })
    let stdout = ''
    let stderr = ''
    child.stdout.on('data', (d) => { stdout += d })
    child.stderr.on('data', (d) => { stderr += d })
    child.on('error', reject)
    child.on('close', (code) => resolve({ code: code ?? -1, stdout, stderr }))
  })
}

export interface VersionInfo {
  name: string
  version: string
  eventsFormat: number
  histogramFormat: number
  raw: string
}

export async function versionInfo(): Promise<VersionInfo> {
  const res = await runEngine(['--version'])
  if (res.code !== 0) {
    throw new Error(`engine --version exited ${res.code}: ${res.stderr.trim()}`)
  }
  const raw = res.stdout.trim()
  const m = raw.match(/^(\S+) (\S+) \(formats: events v(\d+), histogram v(\d+)\)$/)
  if (!m) throw new Error(`unrecognized engine version line: ${JSON.stringify(raw)}`)
  return {
    name: m[1],
    version: m[2],
    eventsFormat: Number(m[3]),
    histogramFormat: Number(m[4]),
    raw,
  }
}

/**
 * Run one augmentation on an in-memory histogram.
 *
 * data is T*2*H*W float32, row-major [t][polarity][y][x]. The array's
 * timestep count wins unless opts.timesteps overrides it explicitly.
 * Deterministic in (seed, sampleIndex): sample i of a dataloader epoch
 * gets identical output here and in a directory-batch CLI run where the
 * file sits at position i.
 */
export async function augmentArray(
  data: Float32Array,
  shape: [number, number, number, number],
  opts: AugOptions = {},
  sampleIndex = 0,
): Promise<Histogram> {
  const [timesteps, channels, height, width] = shape
  if (channels !== 2) throw new Error(`expected 2 polarity channels, got ${channels}`)
  const input: Histogram = { timesteps, height, width, data }
  const dir = await mkdtemp(join(tmpdir(), 'shapeaug-'))
  try {
    const inputPath = join(dir, 'sample.evh1')
    const configPath = join(dir, 'config.txt')
    const outDir = join(dir, 'out')
    const merged = { ...opts }
    if (merged.timesteps === undefined) merged.timesteps = timesteps
    await writeFile(inputPath, encodeHistogram(input))
    await writeFile(configPath, configText(merged))
    const res = await runEngine([
      'augment', '--input', inputPath, '--output', outDir,
      '--config', configPath, '--base-index', String(sampleIndex),
    ])
    if (res.code !== 0) {
      throw new Error(`engine augment exited ${res.code}: ${res.stderr.trim()}`)
    }
    return decodeHistogram(await readFile(join(outDir, 'sample.evh1')))
  } finally {
    await rm(dir, { recursive: true, force: true })
  }
}
