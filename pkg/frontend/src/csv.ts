/**
 * Header-indexed access to the two campaign summary schemas.
 *
 * Columns are looked up by name, never by position, so a writer that
 * reorders columns still parses; a missing column fails with the full
 * list of what was expected.
 */

export class CsvError extends Error {}

export interface SummaryRow {
  t: number;
  symmetry: string;
  p05: number;
  p50: number;
  p95: number;
}

export interface RmseRow {
  symmetry: string;
  p20: number;
  p50: number;
  p80: number;
}

// ---------------------------------------------------------------------------

function splitRows(text: string, label: string): { header: string[]; rows: string[][] } {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) throw new CsvError(`${label}: empty file`);
  const header = lines[0].split(",");
  return { header, rows: lines.slice(1).map((l) => l.split(",")) };
}

function columnIndex(header: string[], names: string[], label: string): number[] {
  const missing = names.filter((n) => !header.includes(n));
  if (missing.length > 0) {
    throw new CsvError(
      `${label}: missing column(s) ${missing.join(", ")} (header: ${header.join(",")})`
    );
  }
  return names.map((n) => header.indexOf(n));
}

function num(field: string, name: string, label: string): number {
  const v = Number(field);
  if (!Number.isFinite(v)) throw new CsvError(`${label}: bad number in column ${name}: '${field}'`);
  return v;
}

// ---------------------------------------------------------------------------

export function readSummary(text: string, label = "summary"): SummaryRow[] {
  const { header, rows } = splitRows(text, label);
  const [it, isym, i05, i50, i95] = columnIndex(header, ["t", "symmetry", "p05", "p50", "p95"], label);
  return rows.map((r) => ({
    t: num(r[it], "t", label),
    symmetry: r[isym],
    p05: num(r[i05], "p05", label),
    p50: num(r[i50], "p50", label),
    p95: num(r[i95], "p95", label),
  }));
}

export function readRmse(text: string, label = "rmse"): RmseRow[] {
  const { header, rows } = splitRows(text, label);
  const [isym, i20, i50, i80] = columnIndex(header, ["symmetry", "p20", "p50", "p80"], label);
  return rows.map((r) => ({
    symmetry: r[isym],
    p20: num(r[i20], "p20", label),
    p50: num(r[i50], "p50", label),
    p80: num(r[i80], "p80", label),
  }));
}
