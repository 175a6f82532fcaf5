// Codecs for the engine's little-endian binary interchange formats.
// Layouts must stay byte-compatible with the Python reader/writer.

export interface Histogram {
  timesteps: number
  height: number
  width: number
  /** T*2*H*W float32 counts, row-major [t][polarity][y][x]; polarity 0 = negative. */
  data: Float32Array
}

export interface EventStream {
  width: number
  height: number
  tStart: bigint
  tEnd: bigint
  x: Uint16Array
  y: Uint16Array
  t: BigUint64Array
  p: Uint8Array
}

export const HISTOGRAM_MAGIC = 'EVH1'
export const EVENTS_MAGIC = 'EVS1'
export const HISTOGRAM_VERSION = 1
export const EVENTS_VERSION = 1

const HIST_HEADER_BYTES = 22 // magic4 u16 u32*4
const EVENTS_HEADER_BYTES = 34 // magic4 u16 u16 u16 u64*3
const EVENT_RECORD_BYTES = 13 // u16 u16 u64 u8, packed

const HOST_LE = new Uint8Array(new Uint32Array([1]).buffer)[0] === 1

function view(bytes: Uint8Array): DataView {
  // Respects pooled Buffers (nonzero byteOffset).
  return new DataView(bytes.buffer, bytes.byteOffset, bytes.byteLength)
}

function magicOf(dv: DataView): string {
  return String.fromCharCode(dv.getUint8(0), dv.getUint8(1), dv.getUint8(2), dv.getUint8(3))
}

export function decodeHistogram(bytes: Uint8Array): Histogram {
  if (bytes.byteLength < HIST_HEADER_BYTES) {
    throw new Error(`histogram header truncated at byte offset ${bytes.byteLength}`)
  }
  const dv = view(bytes)
  const magic = magicOf(dv)
  if (magic !== HISTOGRAM_MAGIC) {
    throw new Error(`bad histogram magic ${JSON.stringify(magic)} at byte offset 0`)
  }
  const version = dv.getUint16(4, true)
  if (version !== HISTOGRAM_VERSION) {
    throw new Error(`unsupported histogram version ${version} at byte offset 4`)
  }
  const timesteps = dv.getUint32(6, true)
  const channels = dv.getUint32(10, true)
  const height = dv.getUint32(14, true)
  const width = dv.getUint32(18, true)
  if (channels !== 2) {
    throw new Error(`expected 2 polarity channels, got ${channels} at byte offset 10`)
  }
  if (timesteps < 1 || height < 1 || width < 1) {
    throw new Error(`non-positive histogram dimension at byte offset 6`)
  }
  const count = timesteps * 2 * height * width
  const expected = HIST_HEADER_BYTES + 4 * count
  if (bytes.byteLength !== expected) {
    throw new Error(
      `histogram payload size mismatch: expected ${expected} bytes, got ${bytes.byteLength}`)
  }
  let data: Float32Array
  if (HOST_LE) {
    // ArrayBuffer.slice copies, so the view is aligned and private.
    const start = bytes.byteOffset + HIST_HEADER_BYTES
    data = new Float32Array(bytes.buffer.slice(start, start + 4 * count))
  } else {
    data = new Float32Array(count)
    for (let i = 0; i < count; i++) {
      data[i] = dv.getFloat32(HIST_HEADER_BYTES + 4 * i, true)
    }
  }
  return { timesteps, height, width, data }
}

export function encodeHistogram(h: Histogram): Uint8Array {
  const count = h.timesteps * 2 * h.height * h.width
  if (h.data.length !== count) {
    throw new Error(
      `histogram data length ${h.data.length} does not match ${h.timesteps}x2x${h.height}x${h.width}`)
  }
  if (h.timesteps < 1 || h.height < 1 || h.width < 1) {
    throw new Error('non-positive histogram dimension')
  }
  const out = new Uint8Array(HIST_HEADER_BYTES + 4 * count)
  const dv = new DataView(out.buffer)
  for (let i = 0; i < 4; i++) dv.setUint8(i, HISTOGRAM_MAGIC.charCodeAt(i))
  dv.setUint16(4, HISTOGRAM_VERSION, true)
  dv.setUint32(6, h.timesteps, true)
  dv.setUint32(10, 2, true)
  dv.setUint32(14, h.height, true)
  dv.setUint32(18, h.width, true)
  if (HOST_LE) {
    out.set(new Uint8Array(h.data.buffer, h.data.byteOffset, 4 * count), HIST_HEADER_BYTES)
  } else {
    for (let i = 0; i < count; i++) {
      dv.setFloat32(HIST_HEADER_BYTES + 4 * i, h.data[i], true)
    }
  }
  return out
}

export function decodeEvents(bytes: Uint8Array): EventStream {
  if (bytes.byteLength < EVENTS_HEADER_BYTES) {
    throw new Error(`event header truncated at byte offset ${bytes.byteLength}`)
  }
  const dv = view(bytes)
  const magic = magicOf(dv)
  if (magic !== EVENTS_MAGIC) {
    throw new Error(`bad event magic ${JSON.stringify(magic)} at byte offset 0`)
  }
  const version = dv.getUint16(4, true)
  if (version !== EVENTS_VERSION) {
    throw new Error(`unsupported event version ${version} at byte offset 4`)
  }
  const width = dv.getUint16(6, true)
  const height = dv.getUint16(8, true)
  const count = dv.getBigUint64(10, true)
  const tStart = dv.getBigUint64(18, true)
  const tEnd = dv.getBigUint64(26, true)
  if (tStart >= tEnd) {
    throw new Error(`invalid window: t_start=${tStart} >= t_end=${tEnd} at byte offset 18`)
  }
  const n = Number(count)
  const expected = EVENTS_HEADER_BYTES + EVENT_RECORD_BYTES * n
  if (bytes.byteLength !== expected) {
    throw new Error(
      `event payload size mismatch: expected ${expected} bytes, got ${bytes.byteLength}`)
  }
  const x = new Uint16Array(n)
  const y = new Uint16Array(n)
  const t = new BigUint64Array(n)
  const p = new Uint8Array(n)
  let prev = tStart
  for (let i = 0; i < n; i++) {
    const off = EVENTS_HEADER_BYTES + EVENT_RECORD_BYTES * i
    x[i] = dv.getUint16(off, true)
    y[i] = dv.getUint16(off + 2, true)
    t[i] = dv.getBigUint64(off + 4, true)
    p[i] = dv.getUint8(off + 12)
    if (x[i] >= width || y[i] >= height) {
      throw new Error(
        `event ${i} out of sensor bounds (${x[i]}, ${y[i]}) at byte offset ${off}`)
    }
    if (p[i] > 1) {
      throw new Error(`event ${i} has polarity ${p[i]}, expected 0 or 1 at byte offset ${off}`)
    }
    if (t[i] < tStart || t[i] > tEnd) {
      throw new Error(`event ${i} outside window at byte offset ${off}`)
    }
    if (t[i] < prev) {
      throw new Error(`event ${i} breaks time order at byte offset ${off}`)
    }
    prev = t[i]
  }
  return { width, height, tStart, tEnd, x, y, t, p }
}

export function encodeEvents(s: EventStream): Uint8Array {
  const n = s.x.length
  if (s.y.length !== n || s.t.length !== n || s.p.length !== n) {
    throw new Error('event columns have mismatched lengths')
  }
  const out = new Uint8Array(EVENTS_HEADER_BYTES + EVENT_RECORD_BYTES * n)
  const dv = new DataView(out.buffer)
  for (let i = 0; i < 4; i++) dv.setUint8(i, EVENTS_MAGIC.charCodeAt(i))
  dv.setUint16(4, EVENTS_VERSION, true)
  dv.setUint16(6, s.width, true)
  dv.setUint16(8, s.height, true)
  dv.setBigUint64(10, BigInt(n), true)
  dv.setBigUint64(18, s.tStart, true)
  dv.setBigUint64(26, s.tEnd, true)
  for (let i = 0; i < n; i++) {
    const off = EVENTS_HEADER_BYTES + EVENT_RECORD_BYTES * i
    dv.setUint16(off, s.x[i], true)
    dv.setUint16(off + 2, s.y[i], true)
    dv.setBigUint64(off + 4, s.t[i], true)
    dv.setUint8(off + 12, s.p[i])
  }
  return out
}

/** Flat index of cell (t, polarity, y, x) in Histogram.data. */
export function cellIndex(h: Histogram, t: number, polarity: number, y: number, x: number): number {
  return ((t * 2 + polarity) * h.height + y) * h.width + x
}
