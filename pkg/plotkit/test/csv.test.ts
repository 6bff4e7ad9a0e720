import { describe, expect, it } from "vitest";

import { CsvError, parseCsv, parseSweepCsv, requireColumn } from "../src/csv.js";

const GOOD = "time,fidelity,pop_target\n0,0.5,0.25\n0.1,0.625,0.5\n";

describe("parseCsv", () => {
  it("parses the contract format", () => {
    const table = parseCsv(GOOD);
    expect(table.columns).toEqual(["time", "fidelity", "pop_target"]);
    expect(table.rows).toBe(2);
    expect(requireColumn(table, "fidelity")).toEqual([0.5, 0.625]);
  });

  it("round-trips 17-significant-digit floats", () => {
    const x = "0.12345678901234567";
    const table = parseCsv(`time,v\n${x},${x}\n0.2,1\n`);
    expect(requireColumn(table, "v")[0]).toBe(Number(x));
  });

  it("rejects carriage returns", () => {
    expect(() => parseCsv("time,v\r\n0,1\r\n")).toThrow(CsvError);
  });

  it("rejects ragged rows with a row diagnostic", () => {
    try {
      parseCsv("time,v\n0,1\n0.1\n");
      expect.unreachable();
    } catch (err) {
      expect(err).toBeInstanceOf(CsvError);
      expect((err as CsvError).row).toBe(2);
    }
  });

  it("rejects non-numeric cells naming the column", () => {
    try {
      parseCsv("time,v\n0,oops\n");
      expect.unreachable();
    } catch (err) {
      expect((err as CsvError).column).toBe("v");
    }
  });

  it("requireColumn names a missing column", () => {
    const table = parseCsv(GOOD);
    expect(() => requireColumn(table, "nope")).toThrow(/missing column nope/);
  });

  it("rejects duplicate headers", () => {
    expect(() => parseCsv("time,time\n0,1\n")).toThrow(/duplicate/);
  });
});

describe("parseSweepCsv", () => {
  it("keeps the tier column as labels", () => {
    const text = "feedback_angle,omega_r,tier,fidelity\n0.5,1,cavity,0.99\n0.5,1,reduced,0.991\n";
    const { labels, numeric } = parseSweepCsv(text, "tier");
    expect(labels).toEqual(["cavity", "reduced"]);
    expect(numeric.get("fidelity")).toEqual([0.99, 0.991]);
  });

  it("errors when the label column is absent", () => {
    expect(() => parseSweepCsv("a,b\n1,2\n", "tier")).toThrow(CsvError);
  });
});
