/** Least-squares exponential-decay fit on (t, E) samples. */

export interface DecayFit {
  /** decay rate: E ~ M * E(0) * exp(-m t) */
  m: number;
  /** prefactor normalized by E(0) */
  M: number;
  e0: number;
  slope: number;
  intercept: number;
  residualRms: number;
  nPoints: number;
}

/**
 * Fit ln E = intercept + slope * t over the samples with E > 0.
 * Points with nonpositive energy are skipped (they cannot enter a log fit).
 */
export function fitDecay(t: number[], energy: number[]): DecayFit {
  const ts: number[] = [];
  const ys: number[] = [];
  for (let i = 0; i < t.length; i++) {
    if (energy[i] > 0) {
      ts.push(t[i]);
      ys.push(Math.log(energy[i]));
    }
  }
  const n = ts.length;
  if (n < 2) {
    throw new Error(`need at least 2 positive-energy samples to fit (got ${n})`);
  }
  const meanT = ts.reduce((a, b) => a + b, 0) / n;
  const meanY = ys.reduce((a, b) => a + b, 0) / n;
  let sxx = 0;
  let sxy = 0;
  for (let i = 0; i < n; i++) {
    const dt = ts[i] - meanT;
    sxx += dt * dt;
    sxy += dt * (ys[i] - meanY);
  }
  if (sxx === 0) {
    throw new Error('all samples share one time value; cannot fit a slope');
  }
  const slope = sxy / sxx;
  const intercept = meanY - slope * meanT;
  let ss = 0;
  for (let i = 0; i < n; i++) {
    const r = ys[i] - (intercept + slope * ts[i]);
    ss += r * r;
  }
  const e0 = energy[0];
  return {
    m: -slope,
    M: Math.exp(intercept) / e0,
    e0,
    slope,
    intercept,
    residualRms: Math.sqrt(ss / n),
    nPoints: n,
  };
}
