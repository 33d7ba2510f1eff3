import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { afterAll, describe, expect, it } from "vitest";

import { CORRELATION_HEADER, EmptyDataError, SchemaError } from "../src/csv";
import {
  plotDecay,
  plotParabola,
  plotResidualCascade,
  plotScan,
} from "../src/figures";

const FIXTURES = path.join(__dirname, "..", "fixtures");
const tmp = fs.mkdtempSync(path.join(os.tmpdir(), "plots-fig-"));
afterAll(() => fs.rmSync(tmp, { recursive: true, force: true }));

const out = (name: string): string => path.join(tmp, name);

function syntheticDecay(c: number): string {
  const ns = [10, 18, 32, 56, 100, 178, 316, 562, 1000];
  const lines = [CORRELATION_HEADER];
  for (const n of ns) {
    lines.push(`${n},spectral,${c / Math.sqrt(n)},0,0,`);
  }
  const p = out("synthetic.csv");
  fs.writeFileSync(p, lines.join("\n") + "\n");
  return p;
}

function svgOf(p: string): string {
  const text = fs.readFileSync(p, "utf8");
  expect(text.length).toBeGreaterThan(500);
  expect(text.startsWith("<svg")).toBe(true);
  return text;
}

describe("plotDecay", () => {
  it("annotates slope -0.500 on a synthetic half-power series", () => {
    const summary = plotDecay(syntheticDecay(2.5), out("synth.svg"));
    expect(Math.abs(summary.slope - -0.5)).toBeLessThan(0.005);
    expect(summary.annotation).toContain("fitted slope -0.500");
    expect(summary.residualAnnotation).toBeNull();
    expect(svgOf(out("synth.svg"))).toContain(summary.annotation);
  });

  it("fits a slope in [-0.6, -0.4] on the committed pipeline output", () => {
    const summary = plotDecay(
      path.join(FIXTURES, "R1", "correlations.csv"),
      out("r1-decay.svg"),
    );
    expect(summary.slope).toBeGreaterThanOrEqual(-0.6);
    expect(summary.slope).toBeLessThanOrEqual(-0.4);
    svgOf(out("r1-decay.svg"));
  });

  it.each(["R1", "R2"])(
    "annotates the residual slope the %s report prints, to printed precision",
    (fixture) => {
      const report = JSON.parse(
        fs.readFileSync(path.join(FIXTURES, fixture, "report.json"), "utf8"),
      );
      const summary = plotDecay(
        path.join(FIXTURES, fixture, "correlations.csv"),
        out(`${fixture}-decay.svg`),
      );
      const printed = (report.residual_thmB_slope as number).toFixed(3);
      expect(summary.residualAnnotation).toContain(printed);
      expect(summary.residualSlope).toBeCloseTo(report.residual_thmB_slope, 10);
      expect(svgOf(out(`${fixture}-decay.svg`))).toContain(
        summary.residualAnnotation as string,
      );
    },
  );

  it("raises an explicit empty-data error on a header-only CSV", () => {
    const p = out("header-only.csv");
    fs.writeFileSync(p, `${CORRELATION_HEADER}\n`);
    expect(() => plotDecay(p, out("never.svg"))).toThrow(EmptyDataError);
    expect(() => plotDecay(p, out("never.svg"))).toThrow(/no data rows/);
  });

  it("raises a schema error on the wrong table", () => {
    expect(() =>
      plotDecay(path.join(FIXTURES, "R1", "scan.csv"), out("never.svg")),
    ).toThrow(SchemaError);
  });

  it("rejects nonpositive n before the log axis", () => {
    const p = out("zero-n.csv");
    fs.writeFileSync(p, `${CORRELATION_HEADER}\n0,spectral,1,0,0,\n2,spectral,0.5,0,0,\n`);
    expect(() => plotDecay(p, out("never.svg"))).toThrow(/positive/);
  });

  it("renders byte-identically on repeated runs", () => {
    const src = path.join(FIXTURES, "R2", "correlations.csv");
    plotDecay(src, out("a.svg"));
    plotDecay(src, out("b.svg"));
    expect(fs.readFileSync(out("a.svg"))).toEqual(fs.readFileSync(out("b.svg")));
  });
});

describe("plotParabola", () => {
  const spectrumCsv = path.join(FIXTURES, "R1", "spectrum.csv");

  it("shows a residual inset slope of at least 2.7 on the committed spectrum", () => {
    const summary = plotParabola(spectrumCsv, out("parab.svg"));
    expect(summary.slope).toBeGreaterThanOrEqual(2.7);
    expect(svgOf(out("parab.svg"))).toContain(summary.annotation);
  });

  it("annotates omega verbatim from the sidecar metadata", () => {
    const doc = JSON.parse(
      fs.readFileSync(path.join(FIXTURES, "R1", "spectrum.json"), "utf8"),
    );
    const summary = plotParabola(spectrumCsv, out("parab2.svg"));
    expect(summary.omega).toBe(doc.omega);
    expect(summary.omegaLabel).toBe(`omega = ${String(doc.omega)}`);
    expect(svgOf(out("parab2.svg"))).toContain(summary.omegaLabel);
  });

  it("carries the same omega the end-to-end report prints", () => {
    const report = JSON.parse(
      fs.readFileSync(path.join(FIXTURES, "R1", "report.json"), "utf8"),
    );
    const summary = plotParabola(spectrumCsv, out("parab3.svg"));
    expect(summary.omega).toBe(report.omega);
  });

  it("fails clearly when the omega metadata is missing", () => {
    const orphan = out("orphan-spectrum.csv");
    fs.copyFileSync(spectrumCsv, orphan);
    expect(() => plotParabola(orphan, out("never.svg"))).toThrow(/omega missing/);
  });
});

describe("plotResidualCascade", () => {
  it("reproduces the reported residual slope to printed precision", () => {
    const report = JSON.parse(
      fs.readFileSync(path.join(FIXTURES, "R2", "report.json"), "utf8"),
    );
    const summary = plotResidualCascade(
      path.join(FIXTURES, "R2", "correlations.csv"),
      out("cascade.svg"),
    );
    const printed = (report.residual_thmB_slope as number).toFixed(3);
    expect(summary.residualAnnotation).toContain(printed);
    expect(summary.residualSlope).toBeCloseTo(report.residual_thmB_slope, 10);
    const svg = svgOf(out("cascade.svg"));
    expect(svg).toContain(summary.corrAnnotation);
    expect(svg).toContain(summary.residualAnnotation);
  });

  it("needs at least one residual value", () => {
    const p = out("blank-residuals.csv");
    fs.writeFileSync(p, `${CORRELATION_HEADER}\n4,spectral,0.5,0,1,\n9,spectral,0.3,0,1,\n`);
    expect(() => plotResidualCascade(p, out("never.svg"))).toThrow(/entirely blank/);
  });
});

describe("plotScan", () => {
  it("annotates the maximum of the radius column with the sidecar threshold drawn", () => {
    const doc = JSON.parse(
      fs.readFileSync(path.join(FIXTURES, "R1", "scan.json"), "utf8"),
    );
    const summary = plotScan(path.join(FIXTURES, "R1", "scan.csv"), out("scan.svg"));
    expect(summary.maxRadius).toBe(doc.max_radius);
    expect(summary.argmaxXi).toBe(doc.argmax_xi);
    expect(summary.threshold).toBe(doc.threshold);
    expect(svgOf(out("scan.svg"))).toContain("max radius");
  });
});
