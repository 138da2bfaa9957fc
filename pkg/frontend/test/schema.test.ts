import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { EmptyInputError, parseResultsCsv, REQUIRED_COLUMNS, SchemaError } from "../src/schema.js";

const golden = readFileSync(new URL("./fixtures/golden.csv", import.meta.url), "utf-8");

describe("parseResultsCsv", () => {
  it("reads every row of the golden simulator output", () => {
    const rows = parseResultsCsv(golden);
    expect(rows).toHaveLength(24);
    expect(rows[0].scheme).toBe("mw-max-link");
    expect(rows[0].Z).toBe(5);
    expect(rows[0].snr_db).toBe(0);
    expect(rows[0].ber).toBeGreaterThan(0);
  });

  it("rejects a header with missing columns", () => {
    const broken = golden.replace("pep_wc_avg", "pep_renamed");
    expect(() => parseResultsCsv(broken)).toThrow(SchemaError);
    expect(() => parseResultsCsv(broken)).toThrow(/pep_wc_avg/);
  });

  it("rejects a header-only file", () => {
    const headerOnly = golden.split("\n")[0];
    expect(() => parseResultsCsv(headerOnly)).toThrow(EmptyInputError);
  });

  it("rejects non-numeric metric cells", () => {
    const lines = golden.split("\n");
    const cells = lines[1].split(",");
    cells[10] = "not-a-number";
    lines[1] = cells.join(",");
    expect(() => parseResultsCsv(lines.join("\n"))).toThrow(SchemaError);
  });

  it("pins the full column contract", () => {
    expect(golden.split("\n")[0]).toBe(REQUIRED_COLUMNS.join(","));
  });
});
