/**
 * Strict readers for the artifact files the pipelines emit.
 *
 * The CSV schemas are rigid (fixed header, no quoting, 17-digit floats),
 * so parsing is an exact split with hard errors on any deviation; a
 * permissive parser would only blur the schema-mismatch diagnostics.
 */

import * as fs from "node:fs";

export class SchemaError extends Error {}
export class EmptyDataError extends Error {}

export const CORRELATION_HEADER = "n,method,corr_re,corr_im,scaled_re,residual_thmB";
export const SPECTRUM_HEADER = "xi,lam_re,lam_im";
export const SCAN_HEADER = "xi,radius";

export interface CorrelationRow {
  n: number;
  method: string;
  corrRe: number;
  corrIm: number;
  scaledRe: number;
  /** null when the producer left the column blank */
  residual: number | null;
}

export interface SpectrumRow {
  xi: number;
  lamRe: number;
  lamIm: number;
}

export interface ScanRow {
  xi: number;
  radius: number;
}

function num(field: string, where: string): number {
  if (field.trim() === "") {
    throw new SchemaError(`${where}: empty numeric field`);
  }
  const v = Number(field);
  if (!Number.isFinite(v)) {
    throw new SchemaError(`${where}: not a number: ${JSON.stringify(field)}`);
  }
  return v;
}

function table(filePath: string, header: string): string[][] {
  const lines = fs
    .readFileSync(filePath, "utf8")
    .split(/\r?\n/)
    .filter((ln) => ln.length > 0);
  if (lines.length === 0) {
    throw new SchemaError(`${filePath}: empty file, expected header "${header}"`);
  }
  if (lines[0] !== header) {
    throw new SchemaError(
      `${filePath}: header mismatch, expected "${header}", got "${lines[0]}"`,
    );
  }
  const width = header.split(",").length;
  const rows = lines.slice(1).map((ln, i) => {
    const parts = ln.split(",");
    if (parts.length !== width) {
      throw new SchemaError(
        `${filePath}: row ${i + 2} has ${parts.length} fields, expected ${width}`,
      );
    }
    return parts;
  });
  if (rows.length === 0) {
    throw new EmptyDataError(`${filePath}: no data rows under the header`);
  }
  return rows;
}

export function readCorrelations(filePath: string): CorrelationRow[] {
  return table(filePath, CORRELATION_HEADER).map((p, i) => ({
    n: num(p[0], `${filePath} row ${i + 2} col n`),
    method: p[1],
    corrRe: num(p[2], `${filePath} row ${i + 2} col corr_re`),
    corrIm: num(p[3], `${filePath} row ${i + 2} col corr_im`),
    scaledRe: num(p[4], `${filePath} row ${i + 2} col scaled_re`),
    residual:
      p[5].trim() === "" ? null : num(p[5], `${filePath} row ${i + 2} col residual_thmB`),
  }));
}

export function readSpectrum(filePath: string): SpectrumRow[] {
  return table(filePath, SPECTRUM_HEADER).map((p, i) => ({
    xi: num(p[0], `${filePath} row ${i + 2} col xi`),
    lamRe: num(p[1], `${filePath} row ${i + 2} col lam_re`),
    lamIm: num(p[2], `${filePath} row ${i + 2} col lam_im`),
  }));
}

export function readScan(filePath: string): ScanRow[] {
  return table(filePath, SCAN_HEADER).map((p, i) => ({
    xi: num(p[0], `${filePath} row ${i + 2} col xi`),
    radius: num(p[1], `${filePath} row ${i + 2} col radius`),
  }));
}

/**
 * Metadata sidecar convention: the JSON file sharing the CSV's basename
 * (spectrum.csv -> spectrum.json).  Returns null when absent; schema
 * version must be 1 when present.
 */
export function readSidecar(csvPath: string): Record<string, unknown> | null {
  const jsonPath = csvPath.replace(/\.csv$/, ".json");
  if (jsonPath === csvPath || !fs.existsSync(jsonPath)) {
    return null;
  }
  const doc = JSON.parse(fs.readFileSync(jsonPath, "utf8"));
  if (typeof doc !== "object" || doc === null || Array.isArray(doc)) {
    throw new SchemaError(`${jsonPath}: expected a JSON object`);
  }
  const version = (doc as Record<string, unknown>)["schema_version"];
  if (version !== 1) {
    throw new SchemaError(`${jsonPath}: unsupported schema_version ${version}`);
  }
  return doc as Record<string, unknown>;
}
