/**
 * Reader for the simulator's results CSV. The column set is a fixed
 * contract with the producer; anything else is rejected up front.
 */
import Papa from "papaparse";

export const REQUIRED_COLUMNS = [
  "scheme",
  "Z",
  "N",
  "M",
  "J",
  "snr_db",
  "csi_beta",
  "csi_alpha",
  "seed",
  "packets",
  "ber",
  "pep_wc_avg",
  "sum_rate_avg",
  "ma_fraction",
  "calibrated_c",
  "additions",
  "multiplications",
  "avg_occupancy",
  "max_occupancy",
] as const;

export interface ResultRow {
  scheme: string;
  Z: number;
  snr_db: number;
  ber: number;
  pep_wc_avg: number;
  sum_rate_avg: number;
}

export class SchemaError extends Error {}
export class EmptyInputError extends Error {}

export function parseResultsCsv(text: string): ResultRow[] {
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    throw new SchemaError(`CSV parse failed: ${parsed.errors[0].message}`);
  }
  const fields = parsed.meta.fields ?? [];
  const missing = REQUIRED_COLUMNS.filter((c) => !fields.includes(c));
  if (missing.length > 0) {
    throw new SchemaError(`CSV is missing required columns: ${missing.join(", ")}`);
  }
  if (parsed.data.length === 0) {
    throw new EmptyInputError("CSV contains a header but no data rows");
  }
  return parsed.data.map((raw, i) => {
    const row: ResultRow = {
      scheme: raw.scheme,
      Z: toNumber(raw.Z, "Z", i),
      snr_db: toNumber(raw.snr_db, "snr_db", i),
      ber: toNumber(raw.ber, "ber", i),
      pep_wc_avg: toNumber(raw.pep_wc_avg, "pep_wc_avg", i),
      sum_rate_avg: toNumber(raw.sum_rate_avg, "sum_rate_avg", i),
    };
    return row;
  });
}

function toNumber(value: string, column: string, rowIndex: number): number {
  const num = Number(value);
  if (!Number.isFinite(num)) {
    throw new SchemaError(`row ${rowIndex + 1}: column ${column} is not numeric: ${value}`);
  }
  return num;
}
