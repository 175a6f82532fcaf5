export {
  HISTOGRAM_MAGIC,
  EVENTS_MAGIC,
  HISTOGRAM_VERSION,
  EVENTS_VERSION,
  decodeHistogram,
  encodeHistogram,
  decodeEvents,
  encodeEvents,
  cellIndex,
  type Histogram,
  type EventStream,
} from './formats.js'
export {
  configText,
  type AugOptions,
  type NoiseOptions,
  type GeoOptions,
  type Mode,
} from './config.js'
export {
  enginePython,
  runEngine,
  versionInfo,
  augmentArray,
  type EngineResult,
  type VersionInfo,
} from './engine.js'
