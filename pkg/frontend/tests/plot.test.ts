import { mkdtempSync, readFileSync, writeFileSync, existsSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { parseResultsCsv, SchemaError } from "../src/csv.js";
import { EmptySelectionError, renderFigure } from "../src/plot.js";
import { linearScale, logScale, tickLabel } from "../src/scale.js";
import { main, parseArgs } from "../src/cli.js";

const FIXTURE = join(__dirname, "fixtures", "fig5a_desk.csv");

const SMALL_CSV = [
  "scheme,M,kappa,K,sigma_shadow,mean_sym_se,stderr,n_realizations,mode,avg_mu",
  "TIN,128,0.0,15,0.0,1.25,0.02,30,avg-mu,",
  "TIN,256,0.0,15,0.0,1.5,0.02,30,avg-mu,",
  "RS,128,0.0,15,0.0,2.625,0.04,30,avg-mu,0.54",
  "RS,256,0.0,15,0.0,3.75,0.05,30,avg-mu,0.3",
].join("\n") + "\n";

describe("csv parsing", () => {
  it("parses rows with verbatim raw values", () => {
    const rows = parseResultsCsv(SMALL_CSV);
    expect(rows).toHaveLength(4);
    expect(rows[0].scheme).toBe("TIN");
    expect(rows[0].M).toBe(128);
    expect(rows[0].avg_mu).toBeNull();
    expect(rows[2].avg_mu).toBeCloseTo(0.54);
    expect(rows[2].raw.mean_sym_se).toBe("2.625");
  });

  it("rejects a wrong header and names missing columns", () => {
    expect(() => parseResultsCsv("a,b,c\n1,2,3\n")).toThrowError(SchemaError);
    expect(() => parseResultsCsv("a,b,c\n1,2,3\n")).toThrowError(/missing CSV columns: .*mean_sym_se/);
  });

  it("rejects non-numeric cells", () => {
    const bad = SMALL_CSV.replace("1.25", "abc");
    expect(() => parseResultsCsv(bad)).toThrowError(/not numeric/);
  });
});

describe("scales", () => {
  it("linear scale covers the domain with nice ticks", () => {
    const s = linearScale(0, 3.2, 0, 100);
    expect(s.domain[0]).toBeLessThanOrEqual(0);
    expect(s.domain[1]).toBeGreaterThanOrEqual(3.2);
    expect(s(s.domain[0])).toBeCloseTo(0);
    expect(s(s.domain[1])).toBeCloseTo(100);
    expect(s.ticks.length).toBeGreaterThanOrEqual(3);
  });

  it("log scale ticks are powers of ten", () => {
    const s = logScale(32, 1024, 0, 100);
    for (const t of s.ticks) {
      const e = Math.log10(t);
      expect(Math.abs(e - Math.round(e))).toBeLessThan(1e-9);
    }
    expect(() => logScale(0, 10, 0, 1)).toThrowError(/positive/);
  });

  it("tick labels echo values", () => {
    expect(tickLabel(100, true)).toBe("100");
    expect(tickLabel(1e9, true)).toBe("1e9");
    expect(tickLabel(0.4, false)).toBe("0.4");
  });
});

describe("rendering", () => {
  const rows = parseResultsCsv(SMALL_CSV);

  it("renders one curve per scheme with error bars and verbatim values", () => {
    const svg = renderFigure(rows, { xField: "M", logX: true, schemes: null, title: "t" });
    expect(svg).toContain("<svg");
    expect((svg.match(/<path d=/g) ?? []).length).toBe(2); // TIN and RS lines
    expect(svg).toContain("mean_sym_se=2.625");
    expect(svg).toContain("RS: 3.75"); // legend shows the CSV value verbatim
    expect(svg).toContain("TIN: 1.5");
  });

  it("is deterministic byte for byte", () => {
    const spec = { xField: "M" as const, logX: true, schemes: null, title: "t" };
    expect(renderFigure(rows, spec)).toBe(renderFigure(rows, spec));
  });

  it("filters schemes and refuses an empty selection", () => {
    const svg = renderFigure(rows, { xField: "M", logX: true, schemes: ["RS"], title: "t" });
    expect(svg).not.toContain("TIN:");
    expect(() =>
      renderFigure(rows, { xField: "M", logX: true, schemes: ["SND"], title: "t" }),
    ).toThrowError(EmptySelectionError);
  });
});

describe("cli", () => {
  it("parses flags", () => {
    const args = parseArgs(["--csv", "a.csv", "--x", "M", "--logx", "--out", "f.svg", "--schemes", "TIN,RS"]);
    expect(args.logx).toBe(true);
    expect(args.schemes).toEqual(["TIN", "RS"]);
    expect(() => parseArgs(["--csv", "a.csv", "--x", "bogus", "--out", "f.svg"])).toThrowError(/x field/);
    expect(() => parseArgs(["--csv", "a.csv"])).toThrowError(/usage/);
  });

  it("renders the committed sweep fixture deterministically", () => {
    expect(existsSync(FIXTURE)).toBe(true);
    const dir = mkdtempSync(join(tmpdir(), "rsmimo-plots-"));
    const out1 = join(dir, "fig1.svg");
    const out2 = join(dir, "fig2.svg");
    expect(main(["--csv", FIXTURE, "--x", "M", "--logx", "--out", out1])).toBe(0);
    expect(main(["--csv", FIXTURE, "--x", "M", "--logx", "--out", out2])).toBe(0);
    expect(readFileSync(out1)).toEqual(readFileSync(out2));
    const svg = readFileSync(out1, "utf8");
    for (const scheme of ["TIN", "SD", "SND", "RS"]) {
      expect(svg).toContain(`${scheme}:`);
    }
    // every mean value from the file appears verbatim in the markers
    const rows = parseResultsCsv(readFileSync(FIXTURE, "utf8"));
    for (const row of rows) {
      expect(svg).toContain(`mean_sym_se=${row.raw.mean_sym_se}`);
    }
  });

  it("fails with exit 2 on schema problems and writes nothing", () => {
    const dir = mkdtempSync(join(tmpdir(), "rsmimo-plots-"));
    const bad = join(dir, "bad.csv");
    writeFileSync(bad, "a,b\n1,2\n");
    const out = join(dir, "nope.svg");
    expect(main(["--csv", bad, "--x", "M", "--out", out])).toBe(2);
    expect(existsSync(out)).toBe(false);
    // empty-after-filter also refuses to write
    expect(main(["--csv", FIXTURE, "--x", "M", "--out", out, "--schemes", "NOPE"])).toBe(2);
    expect(existsSync(out)).toBe(false);
  });
});
