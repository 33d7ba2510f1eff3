/** Ordinary least squares on one predictor, with the slope's standard error. */

export interface Fit {
  slope: number;
  intercept: number;
  /** standard error of the slope; 0 when only two points were fitted */
  stderr: number;
  /** number of points that entered the fit */
  points: number;
}

export function leastSquares(xs: number[], ys: number[]): Fit {
  if (xs.length !== ys.length) {
    throw new RangeError(`mismatched lengths: ${xs.length} vs ${ys.length}`);
  }
  const n = xs.length;
  if (n < 2) {
    throw new RangeError(`need at least 2 points to fit, got ${n}`);
  }
  const mx = xs.reduce((a, b) => a + b, 0) / n;
  const my = ys.reduce((a, b) => a + b, 0) / n;
  let sxx = 0;
  let sxy = 0;
  for (let i = 0; i < n; i++) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx === 0) {
    throw new RangeError("all x values are equal, slope is undefined");
  }
  const slope = sxy / sxx;
  const intercept = my - slope * mx;
  let ssr = 0;
  for (let i = 0; i < n; i++) {
    const r = ys[i] - (intercept + slope * xs[i]);
    ssr += r * r;
  }
  const stderr = n > 2 ? Math.sqrt(ssr / (n - 2) / sxx) : 0;
  return { slope, intercept, stderr, points: n };
}

/**
 * Least squares in log-log coordinates.  Pairs where either value is
 * not strictly positive are dropped before taking logs; at least two
 * must survive.
 */
export function logLogFit(xs: number[], ys: number[]): Fit {
  const lx: number[] = [];
  const ly: number[] = [];
  for (let i = 0; i < Math.min(xs.length, ys.length); i++) {
    if (xs[i] > 0 && ys[i] > 0) {
      lx.push(Math.log(xs[i]));
      ly.push(Math.log(ys[i]));
    }
  }
  if (lx.length < 2) {
    throw new RangeError(
      `need at least 2 strictly positive pairs for a log-log fit, got ${lx.length}`,
    );
  }
  return leastSquares(lx, ly);
}
