// Emits the engine's key=value config dialect.

export type Mode = 'shapeaugpp' | 'shapeaug_legacy' | 'none'

export interface NoiseOptions {
  countJitterLo?: number
  countJitterHi?: number
  pZero?: number
  clipBase?: number
  clipRandLo?: number
  clipRandHi?: number
  eventScale?: number
  enabled?: boolean
}

export interface GeoOptions {
  pad?: number
  cropH?: number
  cropW?: number
  pHflip?: number
  maxRotateDeg?: number
}

export interface AugOptions {
  mode?: Mode
  maxShapes?: number
  sMin?: number
  sMax?: number
  timesteps?: number
  seed?: number | bigint
  controlPointRelative?: boolean
  maskUnion?: boolean
  noise?: NoiseOptions
  geo?: GeoOptions
}

const TOP_KEYS: Array<[keyof AugOptions, string, 'int' | 'float' | 'bool' | 'str']> = [
  ['mode', 'mode', 'str'],
  ['maxShapes', 'max_shapes', 'int'],
  ['sMin', 's_min', 'float'],
  ['sMax', 's_max', 'float'],
  ['timesteps', 'timesteps', 'int'],
  ['seed', 'seed', 'int'],
  ['controlPointRelative', 'control_point_relative', 'bool'],
  ['maskUnion', 'mask_union', 'bool'],
]

const NOISE_KEYS: Array<[keyof NoiseOptions, string, 'float' | 'bool']> = [
  ['countJitterLo', 'noise.count_jitter_lo', 'float'],
  ['countJitterHi', 'noise.count_jitter_hi', 'float'],
  ['pZero', 'noise.p_zero', 'float'],
  ['clipBase', 'noise.clip_base', 'float'],
  ['clipRandLo', 'noise.clip_rand_lo', 'float'],
  ['clipRandHi', 'noise.clip_rand_hi', 'float'],
  ['eventScale', 'noise.event_scale', 'float'],
  ['enabled', 'noise.enabled', 'bool'],
]

const GEO_KEYS: Array<[keyof GeoOptions, string, 'int' | 'float']> = [
  ['pad', 'geo.pad', 'int'],
  ['cropH', 'geo.crop_h', 'int'],
  ['cropW', 'geo.crop_w', 'int'],
  ['pHflip', 'geo.p_hflip', 'float'],
  ['maxRotateDeg', 'geo.max_rotate_deg', 'float'],
]

function formatValue(key: string, v: unknown, kind: 'int' | 'float' | 'bool' | 'str'): string {
  if (kind === 'bool') {
    if (typeof v !== 'boolean') throw new Error(`${key} expects a boolean`)
    return v ? 'true' : 'false'
  }
  if (kind === 'str') {
    if (typeof v !== 'string') throw new Error(`${key} expects a string`)
    return v
  }
  if (typeof v === 'bigint') {
    if (kind === 'float') throw new Error(`${key} expects a number`)
    return v.toString()
  }
  if (typeof v !== 'number' || !Number.isFinite(v)) {
    throw new Error(`${key} expects a finite number`)
  }
  if (kind === 'int' && !Number.isInteger(v)) {
    throw new Error(`${key} expects an integer, got ${v}`)
  }
  return String(v)
}

/** Render options as engine config lines; only provided keys are emitted. */
export function configText(opts: AugOptions): string {
  const lines: string[] = []
  for (const [prop, key, kind] of TOP_KEYS) {
    const v = opts[prop]
    if (v !== undefined) lines.push(`${key}=${formatValue(key, v, kind)}`)
  }
  for (const [prop, key, kind] of NOISE_KEYS) {
    const v = opts.noise?.[prop]
    if (v !== undefined) lines.push(`${key}=${formatValue(key, v, kind)}`)
  }
  for (const [prop, key, kind] of GEO_KEYS) {
    const v = opts.geo?.[prop]
    if (v !== undefined) lines.push(`${key}=${formatValue(key, v, kind)}`)
  }
  return lines.join('\n') + '\n'
}
