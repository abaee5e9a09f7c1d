/** Parsing for the sweep result CSVs produced by the simulator. */

export const CSV_COLUMNS = [
  "scheme",
  "M",
  "kappa",
  "K",
  "sigma_shadow",
  "mean_sym_se",
  "stderr",
  "n_realizations",
  "mode",
  "avg_mu",
] as const;

export type CsvColumn = (typeof CSV_COLUMNS)[number];

export interface ResultRow {
  scheme: string;
  M: number;
  kappa: number;
  K: number;
  sigma_shadow: number;
  mean_sym_se: number;
  stderr: number;
  n_realizations: number;
  mode: string;
  avg_mu: number | null;
  /** Verbatim source text per column, for labels that must echo the file. */
  raw: Record<CsvColumn, string>;
}

export class SchemaError extends Error {}

/** Numeric columns a curve can be plotted against. */
export const X_FIELDS = ["M", "kappa", "K", "sigma_shadow"] as const;
export type XField = (typeof X_FIELDS)[number];

export function parseResultsCsv(text: string): ResultRow[] {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new SchemaError("empty CSV: no header line");
  }
  const header = lines[0].split(",");
  const expected = CSV_COLUMNS.join(",");
  if (header.join(",") !== expected) {
    const missing = CSV_COLUMNS.filter((c) => !header.includes(c));
    throw new SchemaError(
      missing.length > 0
        ? `missing CSV columns: ${missing.join(", ")}`
        : `unexpected CSV header: ${lines[0]}`,
    );
  }
  return lines.slice(1).map((line, i) => {
    const parts = line.split(",");
    if (parts.length !== CSV_COLUMNS.length) {
      throw new SchemaError(`row ${i + 2}: expected ${CSV_COLUMNS.length} fields, got ${parts.length}`);
    }
    const raw = {} as Record<CsvColumn, string>;
    CSV_COLUMNS.forEach((col, j) => {
      raw[col] = parts[j];
    });
    const num = (col: CsvColumn): number => {
      const value = Number(raw[col]);
      if (!Number.isFinite(value)) {
        throw new SchemaError(`row ${i + 2}: column ${col} is not numeric: ${raw[col]}`);
      }
      return value;
    };
    return {
      scheme: raw.scheme,
      M: num("M"),
      kappa: num("kappa"),
      K: num("K"),
      sigma_shadow: num("sigma_shadow"),
      mean_sym_se: num("mean_sym_se"),
      stderr: num("stderr"),
      n_realizations: num("n_realizations"),
      mode: raw.mode,
      avg_mu: raw.avg_mu === "" ? null : num("avg_mu"),
      raw,
    };
  });
}
