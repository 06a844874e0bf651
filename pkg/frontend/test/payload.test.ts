import { readFileSync } from "node:fs";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { DebugTable } from "../src/debug.js";
import { expectKeys } from "../src/types.js";

const FIXTURES = join(__dirname, "fixtures");

function fixture(name: string): string {
  return readFileSync(join(FIXTURES, name), "utf-8");
}

// The fixture files are generated by the server code path and checked
// byte-for-byte against it by the Python suite; here we check that the
// debug table preserves the bytes through the UI untouched.
describe("debug table", () => {
  it("stores response bodies verbatim", () => {
    const table = new DebugTable();
    const bodies = {
      "/meta": fixture("band_meta.json"),
      "/hilbert": fixture("band_hilbert.json"),
      "/betti": fixture("band_betti.json"),
      "/signed-barcode": fixture("band_signed.json"),
      "/slice": fixture("band_slice.json"),
    };
    for (const [endpoint, body] of Object.entries(bodies)) {
      table.record(endpoint, body);
    }
    for (const [endpoint, body] of Object.entries(bodies)) {
      expect(table.get(endpoint)).toBe(body);
    }
    const dump = table.dump();
    for (const body of Object.values(bodies)) {
      expect(dump).toContain(body);
    }
  });

  it("overwrites an endpoint with the latest body", () => {
    const table = new DebugTable();
    table.record("/slice", "{}");
    table.record("/slice", '{"bars":[]}');
    expect(table.get("/slice")).toBe('{"bars":[]}');
    expect(table.entries().length).toBe(1);
  });
});

describe("payload schemas", () => {
  it("accepts the served fixtures", () => {
    expect(expectKeys(JSON.parse(fixture("band_meta.json")),
                      ["axes", "dirs", "bounds", "sizes"])).toBeNull();
    expect(expectKeys(JSON.parse(fixture("band_hilbert.json")),
                      ["xs", "ys", "dims"])).toBeNull();
    expect(expectKeys(JSON.parse(fixture("band_betti.json")),
                      ["b0", "b1", "b2"])).toBeNull();
    expect(expectKeys(JSON.parse(fixture("band_signed.json")),
                      ["positive", "negative"])).toBeNull();
  });

  it("flags schema mismatches for the banner", () => {
    expect(expectKeys({ xs: [] }, ["xs", "ys", "dims"])).toContain("ys");
    expect(expectKeys(null, ["xs"])).toContain("not an object");
  });

  it("fixture geometry matches the served module", () => {
    const meta = JSON.parse(fixture("band_meta.json"));
    expect(meta.sizes).toEqual({ gens: 2, rels: 2 });
    expect(meta.bounds.lo).toEqual([0, 0]);
    expect(meta.bounds.hi).toEqual([2, 2]);
    const slice = JSON.parse(fixture("band_slice.json"));
    expect(slice.bars).toEqual([[1, 3]]);
  });
});
