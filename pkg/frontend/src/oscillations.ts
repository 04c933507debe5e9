// Estimate how many oscillation periods a scan covers, for the plot caption.

export interface OscillationEstimate {
  periods: number;
  periodUm: number;
  peakCount: number;
}

/**
 * Count appearance-channel peaks and convert peak spacing into a period
 * estimate.  Returns null when fewer than two clear peaks exist.
 */
export function estimateOscillations(
  x: readonly number[],
  y: readonly number[],
): OscillationEstimate | null {
  const n = Math.min(x.length, y.length);
  if (n < 5) return null;
  let lo = Infinity;
  let hi = -Infinity;
  for (let i = 0; i < n; i++) {
    lo = Math.min(lo, y[i] as number);
    hi = Math.max(hi, y[i] as number);
  }
  if (!(hi > lo)) return null;
  const threshold = lo + 0.6 * (hi - lo);
  const peaks: number[] = [];
  for (let i = 1; i < n - 1; i++) {
    const yi = y[i] as number;
    if (yi < threshold) continue;
    if (yi >= (y[i - 1] as number) && yi >= (y[i + 1] as number)) {
      const xi = x[i] as number;
      const last = peaks[peaks.length - 1];
      // merge plateau/duplicate detections closer than a tenth of the span
      if (last !== undefined && Math.abs(xi - last) < 0.1 * ((x[n - 1] as number) - (x[0] as number))) {
        continue;
      }
      peaks.push(xi);
    }
  }
  if (peaks.length < 2) return null;
  const spacings: number[] = [];
  for (let i = 1; i < peaks.length; i++) {
    spacings.push((peaks[i] as number) - (peaks[i - 1] as number));
  }
  spacings.sort((a, b) => a - b);
  const periodUm = spacings[Math.floor(spacings.length / 2)] as number;
  if (!(periodUm > 0)) return null;
  const span = (x[n - 1] as number) - (x[0] as number);
  return { periods: span / periodUm, periodUm, peakCount: peaks.length };
}
