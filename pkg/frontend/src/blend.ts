// Pose composition math: linear blending between two preset poses and
// optional per-sensor Gaussian noise. Pure functions with an injectable RNG
// so the UI stays deterministic under test.

export function clamp01(v: number): number {
  if (v < 0) return 0;
  if (v > 1) return 1;
  return v;
}

// Endpoints reproduce the presets exactly: no float roundtrip at f=0 or f=1.
export function blendPose(a: number[], b: number[], fraction: number): number[] {
  if (a.length !== b.length) {
    throw new Error(`pose lengths differ: ${a.length} vs ${b.length}`);
  }
  const f = clamp01(fraction);
  if (f === 0) return a.slice();
  if (f === 1) return b.slice();
  return a.map((v, i) => clamp01(v + (b[i] - v) * f));
}

export type Rng = () => number; // uniform in [0, 1)

// Small deterministic generator for client-side noise and tests.
export function mulberry32(seed: number): Rng {
  let s = seed >>> 0;
  return () => {
    s = (s + 0x6d2b79f5) >>> 0;
    let z = s;
    z = Math.imul(z ^ (z >>> 15), z | 1);
    z ^= z + Math.imul(z ^ (z >>> 7), z | 61);
    return ((z ^ (z >>> 14)) >>> 0) / 4294967296;
  };
}

export function gaussian(rng: Rng): number {
  // Box-Muller; u1 nudged away from zero so the log stays finite.
  const u1 = Math.max(rng(), 1e-12);
  const u2 = rng();
  return Math.sqrt(-2 * Math.log(u1)) * Math.cos(2 * Math.PI * u2);
}

export function applyNoise(pose: number[], sigma: number, rng: Rng): number[] {
  if (sigma < 0) {
    throw new Error(`sigma must be >= 0, got ${sigma}`);
  }
  if (sigma === 0) return pose.slice();
  return pose.map((v) => clamp01(v + sigma * gaussian(rng)));
}
