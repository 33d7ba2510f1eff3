/**
 * Figure builders over the artifact files.
 *
 * Every plotted number is taken from a CSV column, a sidecar JSON field,
 * or a least-squares fit of log-transformed columns; nothing is computed
 * beyond that.  Output is deterministic SVG, so reruns on the same
 * inputs are byte-identical.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import {
  CorrelationRow,
  EmptyDataError,
  SchemaError,
  readCorrelations,
  readScan,
  readSidecar,
  readSpectrum,
} from "./csv";
import { Fit, logLogFit } from "./fit";
import {
  AxisSpec,
  Box,
  Scene,
  drawFrame,
  linScale,
  linTicks,
  logScale,
  logTicks,
} from "./svg";

export interface DecaySummary {
  slope: number;
  stderr: number;
  annotation: string;
  points: number;
  /** null when the residual column has fewer than two positive values */
  residualSlope: number | null;
  residualAnnotation: string | null;
}

export interface ParabolaSummary {
  omega: number;
  omegaLabel: string;
  slope: number;
  stderr: number;
  annotation: string;
}

export interface CascadeSummary {
  corrSlope: number;
  corrAnnotation: string;
  residualSlope: number;
  residualAnnotation: string;
}

export interface ScanSummary {
  maxRadius: number;
  argmaxXi: number;
  threshold: number | null;
  annotation: string;
}

const fmtFit = (fit: Fit): string =>
  `${fit.slope.toFixed(3)} ± ${fit.stderr.toFixed(3)}`;

function writeFigure(outPath: string, svg: string): void {
  const dir = path.dirname(outPath);
  if (dir) fs.mkdirSync(dir, { recursive: true });
  fs.writeFileSync(outPath, svg);
}

function requirePositiveN(rows: CorrelationRow[], csvPath: string): void {
  for (const r of rows) {
    if (!(r.n > 0)) {
      throw new SchemaError(`${csvPath}: n must be positive for log axes, got ${r.n}`);
    }
  }
}

/** rows entering the fit: the spectral series when present, else everything */
function fitRows(rows: CorrelationRow[]): CorrelationRow[] {
  const spectral = rows.filter((r) => r.method === "spectral");
  return spectral.length > 0 ? spectral : rows;
}

function logBox(
  box: Box,
  xs: number[],
  ys: number[],
  xlabel: string,
  ylabel: string,
): { xa: AxisSpec; ya: AxisSpec } {
  const x0 = Math.min(...xs);
  const x1 = Math.max(...xs);
  const y0 = Math.min(...ys);
  const y1 = Math.max(...ys);
  return {
    xa: {
      ticks: logTicks(x0, x1),
      scale: logScale(x0, x1, box.x, box.x + box.w),
      label: xlabel,
    },
    ya: {
      // pad a third of a decade so dots stay off the frame
      ticks: logTicks(y0, y1),
      scale: logScale(
        y0 / Math.pow(10, 0.3),
        y1 * Math.pow(10, 0.3),
        box.y + box.h,
        box.y,
      ),
      label: ylabel,
    },
  };
}

/**
 * Log-log decay of |corr| against n with a fitted slope and a slope
 * -1/2 reference line anchored at the first fitted point.  When the
 * residual column carries values, that series is drawn too and gets its
 * own fitted slope.
 */
export function plotDecay(csvPath: string, outPath: string): DecaySummary {
  const rows = readCorrelations(csvPath);
  requirePositiveN(rows, csvPath);
  const series = fitRows(rows);
  const ns = series.map((r) => r.n);
  const mods = series.map((r) => Math.hypot(r.corrRe, r.corrIm));
  const fit = logLogFit(ns, mods);
  const annotation = `fitted slope ${fmtFit(fit)}`;
  const rpts = series
    .filter((r) => r.residual !== null && (r.residual as number) > 0)
    .map((r) => [r.n, r.residual as number] as [number, number]);
  const residualFit =
    rpts.length >= 2
      ? logLogFit(
          rpts.map((p) => p[0]),
          rpts.map((p) => p[1]),
        )
      : null;
  const residualAnnotation =
    residualFit === null ? null : `residual slope ${fmtFit(residualFit)}`;

  const sc = new Scene(560, 400);
  const box: Box = { x: 64, y: 40, w: 460, h: 300 };
  const pts = series
    .map((r, i) => [ns[i], mods[i]] as [number, number])
    .filter(([n, m]) => n > 0 && m > 0);
  const allPts = pts.concat(rpts);
  const { xa, ya } = logBox(
    box,
    allPts.map((p) => p[0]),
    allPts.map((p) => p[1]),
    "n",
    "|corr(n)|",
  );
  // reference: slope -1/2 through the first plotted point
  const [n0, m0] = pts[0];
  sc.polyline(
    pts.map(([n]) => [xa.scale(n), ya.scale(m0 * Math.sqrt(n0 / n))] as [number, number]),
    "#888888",
    1,
    "5,4",
  );
  const fitLine = (n: number): number =>
    Math.exp(fit.intercept + fit.slope * Math.log(n));
  sc.polyline(
    pts.map(([n]) => [xa.scale(n), ya.scale(fitLine(n))] as [number, number]),
    "#c02020",
    1,
  );
  sc.polyline(
    pts.map(([n, m]) => [xa.scale(n), ya.scale(m)] as [number, number]),
    "#1f5fa8",
    1.2,
  );
  for (const [n, m] of pts) {
    sc.dot(xa.scale(n), ya.scale(m), 2.5, "#1f5fa8");
  }
  if (residualFit !== null) {
    sc.polyline(
      rpts.map(([n, e]) => [xa.scale(n), ya.scale(e)] as [number, number]),
      "#2d8a4e",
      1,
    );
    for (const [n, e] of rpts) {
      sc.dot(xa.scale(n), ya.scale(e), 2, "#2d8a4e");
    }
  }
  drawFrame(sc, box, xa, ya);
  sc.text("correlation decay", box.x, 24, { size: 13 });
  sc.text(annotation, box.x + box.w - 6, box.y + 16, { anchor: "end", fill: "#c02020" });
  sc.text("reference slope -1/2", box.x + box.w - 6, box.y + 32, {
    anchor: "end",
    fill: "#888888",
    size: 10,
  });
  if (residualAnnotation !== null) {
    sc.text(residualAnnotation, box.x + box.w - 6, box.y + 48, {
      anchor: "end",
      fill: "#2d8a4e",
    });
  }
  writeFigure(outPath, sc.render());
  return {
    slope: fit.slope,
    stderr: fit.stderr,
    annotation,
    points: fit.points,
    residualSlope: residualFit === null ? null : residualFit.slope,
    residualAnnotation,
  };
}

/**
 * Eigenvalue curve against the parabola 1 - omega xi^2, with a log-log
 * inset of the residual |lam - (1 - omega xi^2)| next to a cubic
 * reference.  omega comes from the sidecar JSON and is annotated
 * verbatim.
 */
export function plotParabola(csvPath: string, outPath: string): ParabolaSummary {
  const rows = readSpectrum(csvPath);
  const sidecar = readSidecar(csvPath);
  const omega = sidecar?.["omega"];
  if (typeof omega !== "number" || !Number.isFinite(omega)) {
    throw new SchemaError(
      `${csvPath}: omega missing from sidecar metadata (expected a JSON file next to the CSV)`,
    );
  }
  const omegaLabel = `omega = ${String(omega)}`;
  const xis = rows.map((r) => r.xi);
  const parabola = xis.map((x) => 1 - omega * x * x);
  const residuals = rows.map((r, i) => Math.hypot(r.lamRe - parabola[i], r.lamIm));
  const fit = logLogFit(xis, residuals);
  const annotation = `residual slope ${fmtFit(fit)}`;

  const sc = new Scene(680, 400);
  const main: Box = { x: 64, y: 40, w: 330, h: 300 };
  const ys = rows.map((r) => r.lamRe).concat(parabola);
  const y0 = Math.min(...ys);
  const y1 = Math.max(...ys);
  const pad = (y1 - y0) * 0.08 || 1e-6;
  const xa: AxisSpec = {
    ticks: linTicks(0, Math.max(...xis)),
    scale: linScale(0, Math.max(...xis), main.x, main.x + main.w),
    label: "xi",
  };
  const ya: AxisSpec = {
    ticks: linTicks(y0 - pad, y1 + pad),
    scale: linScale(y0 - pad, y1 + pad, main.y + main.h, main.y),
    label: "lam_xi",
  };
  sc.polyline(
    xis.map((x, i) => [xa.scale(x), ya.scale(parabola[i])] as [number, number]),
    "#888888",
    1,
    "5,4",
  );
  for (const r of rows) {
    sc.dot(xa.scale(r.xi), ya.scale(r.lamRe), 2.5, "#1f5fa8");
  }
  drawFrame(sc, main, xa, ya);
  sc.text("eigenvalue parabola", main.x, 24, { size: 13 });
  sc.text(omegaLabel, main.x + 6, main.y + 16, { size: 10 });
  sc.text("1 - omega xi^2", main.x + 6, main.y + 32, { size: 10, fill: "#888888" });

  const inset: Box = { x: 470, y: 70, w: 180, h: 200 };
  const ipts = rows
    .map((r, i) => [r.xi, residuals[i]] as [number, number])
    .filter(([x, e]) => x > 0 && e > 0);
  const axes = logBox(
    inset,
    ipts.map((p) => p[0]),
    ipts.map((p) => p[1]),
    "xi",
    "|lam - parabola|",
  );
  const [xr, er] = ipts[ipts.length - 1];
  sc.polyline(
    ipts.map(([x]) => [axes.xa.scale(x), axes.ya.scale(er * Math.pow(x / xr, 3))] as [
      number,
      number,
    ]),
    "#888888",
    1,
    "5,4",
  );
  const fitLine = (x: number): number =>
    Math.exp(fit.intercept + fit.slope * Math.log(x));
  sc.polyline(
    ipts.map(([x]) => [axes.xa.scale(x), axes.ya.scale(fitLine(x))] as [number, number]),
    "#c02020",
    1,
  );
  for (const [x, e] of ipts) {
    sc.dot(axes.xa.scale(x), axes.ya.scale(e), 2, "#1f5fa8");
  }
  drawFrame(sc, inset, axes.xa, axes.ya);
  sc.text(annotation, inset.x, inset.y - 18, { size: 10, fill: "#c02020" });
  sc.text("xi^3 reference", inset.x, inset.y - 6, { size: 10, fill: "#888888" });
  writeFigure(outPath, sc.render());
  return { omega, omegaLabel, slope: fit.slope, stderr: fit.stderr, annotation };
}

/**
 * |corr| and the half-power-expansion residual on one log-log panel,
 * each with its fitted slope.
 */
export function plotResidualCascade(csvPath: string, outPath: string): CascadeSummary {
  const rows = readCorrelations(csvPath);
  requirePositiveN(rows, csvPath);
  const series = fitRows(rows);
  const withResidual = series.filter((r) => r.residual !== null);
  if (withResidual.length === 0) {
    throw new EmptyDataError(`${csvPath}: residual_thmB column is entirely blank`);
  }
  const corrFit = logLogFit(
    series.map((r) => r.n),
    series.map((r) => Math.hypot(r.corrRe, r.corrIm)),
  );
  const residualFit = logLogFit(
    withResidual.map((r) => r.n),
    withResidual.map((r) => r.residual as number),
  );
  const corrAnnotation = `corr slope ${fmtFit(corrFit)}`;
  const residualAnnotation = `residual slope ${fmtFit(residualFit)}`;

  const sc = new Scene(560, 400);
  const box: Box = { x: 64, y: 40, w: 460, h: 300 };
  const cpts = series
    .map((r) => [r.n, Math.hypot(r.corrRe, r.corrIm)] as [number, number])
    .filter(([, m]) => m > 0);
  const rpts = withResidual
    .map((r) => [r.n, r.residual as number] as [number, number])
    .filter(([, e]) => e > 0);
  const all = cpts.concat(rpts);
  const { xa, ya } = logBox(
    box,
    all.map((p) => p[0]),
    all.map((p) => p[1]),
    "n",
    "magnitude",
  );
  sc.polyline(
    cpts.map(([n, m]) => [xa.scale(n), ya.scale(m)] as [number, number]),
    "#1f5fa8",
    1.2,
  );
  for (const [n, m] of cpts) sc.dot(xa.scale(n), ya.scale(m), 2.5, "#1f5fa8");
  sc.polyline(
    rpts.map(([n, e]) => [xa.scale(n), ya.scale(e)] as [number, number]),
    "#2d8a4e",
    1.2,
  );
  for (const [n, e] of rpts) sc.dot(xa.scale(n), ya.scale(e), 2.5, "#2d8a4e");
  drawFrame(sc, box, xa, ya);
  sc.text("residual cascade", box.x, 24, { size: 13 });
  sc.text(corrAnnotation, box.x + box.w - 6, box.y + 16, { anchor: "end", fill: "#1f5fa8" });
  sc.text(residualAnnotation, box.x + box.w - 6, box.y + 32, {
    anchor: "end",
    fill: "#2d8a4e",
  });
  writeFigure(outPath, sc.render());
  return {
    corrSlope: corrFit.slope,
    corrAnnotation,
    residualSlope: residualFit.slope,
    residualAnnotation,
  };
}

/**
 * Spectral radius profile over the frequency window, with the pass/fail
 * threshold from the sidecar when one is present and the maximum of the
 * radius column annotated.
 */
export function plotScan(csvPath: string, outPath: string): ScanSummary {
  const rows = readScan(csvPath);
  const sidecar = readSidecar(csvPath);
  const rawThreshold = sidecar?.["threshold"];
  const threshold = typeof rawThreshold === "number" ? rawThreshold : null;
  let maxRadius = -Infinity;
  let argmaxXi = NaN;
  for (const r of rows) {
    if (r.radius > maxRadius) {
      maxRadius = r.radius;
      argmaxXi = r.xi;
    }
  }
  const annotation = `max radius ${maxRadius.toPrecision(7)} at xi = ${argmaxXi.toPrecision(6)}`;

  const sc = new Scene(560, 360);
  const box: Box = { x: 64, y: 40, w: 460, h: 260 };
  const xs = rows.map((r) => r.xi);
  const ys = rows.map((r) => r.radius);
  const y1 = Math.max(Math.max(...ys), threshold ?? 0, 1);
  const y0 = Math.min(...ys);
  const pad = (y1 - y0) * 0.06 || 1e-6;
  const xa: AxisSpec = {
    ticks: linTicks(Math.min(...xs), Math.max(...xs)),
    scale: linScale(Math.min(...xs), Math.max(...xs), box.x, box.x + box.w),
    label: "xi",
  };
  const ya: AxisSpec = {
    ticks: linTicks(y0 - pad, y1 + pad),
    scale: linScale(y0 - pad, y1 + pad, box.y + box.h, box.y),
    label: "spectral radius",
  };
  if (threshold !== null) {
    sc.line(box.x, ya.scale(threshold), box.x + box.w, ya.scale(threshold), "#c02020", 1, "5,4");
  }
  sc.polyline(
    rows.map((r) => [xa.scale(r.xi), ya.scale(r.radius)] as [number, number]),
    "#1f5fa8",
    1.2,
  );
  drawFrame(sc, box, xa, ya);
  sc.text("radius profile", box.x, 24, { size: 13 });
  sc.text(annotation, box.x + box.w - 6, box.y + 16, { anchor: "end" });
  writeFigure(outPath, sc.render());
  return { maxRadius, argmaxXi, threshold, annotation };
}
