// Draft mechanics: row flagging, request building, rounding, sequencing.

import { describe, expect, it } from "vitest";

import type { MarketDocument } from "../src/schema.js";
import {
  RequestSequencer,
  buildRequest,
  draftFromDocument,
  exportDocument,
  formatProbability,
  formatValue,
  fullPrecision,
  hasUnitCosts,
  isProblem,
  rowIsValid,
  rowIssues,
} from "../src/viewmodel.js";
import marketPair from "./fixtures/market_pair.json";

const market = marketPair as MarketDocument;

describe("row validation", () => {
  it("flags each bad field with a message", () => {
    const issues = rowIssues({ label: "", t: "abc", f: "2", g: "-1", lock: "none" });
    expect(issues.t).toMatch(/finite/);
    expect(issues.f).toMatch(/\[0, 1\]/);
    expect(issues.g).toMatch(/positive/);
  });

  it("accepts a boundary probability of exactly one", () => {
    expect(rowIsValid({ label: "", t: "5", f: "1", g: "1", lock: "none" })).toBe(true);
    expect(rowIsValid({ label: "", t: "5", f: "1.0001", g: "1", lock: "none" })).toBe(false);
  });
});

describe("request building", () => {
  it("excludes invalid rows and remaps lock positions", () => {
    const draft = draftFromDocument(market);
    draft.rows.splice(1, 0, { label: "broken", t: "x", f: "0.5", g: "1", lock: "in" });
    draft.rows[3].lock = "in"; // Cedar, shifts to document position 2
    const built = buildRequest(draft);
    expect(isProblem(built)).toBe(false);
    if (isProblem(built)) return;
    expect(built.skippedRows).toEqual([1]);
    expect(built.market.schools.length).toBe(5);
    expect(built.lockedIn).toEqual([2]);
    expect(built.rowOfSchool).toEqual([0, 2, 3, 4, 5]);
  });

  it("round-trips a document through the draft", () => {
    const draft = draftFromDocument(market);
    const exported = exportDocument(draft);
    expect(exported).toEqual(market);
  });

  it("reports a bad budget as a draft problem", () => {
    const draft = draftFromDocument(market);
    draft.budget = "-3";
    const built = buildRequest(draft);
    expect(isProblem(built)).toBe(true);
  });

  it("detects unit fee structures", () => {
    expect(hasUnitCosts(market)).toBe(false);
    expect(
      hasUnitCosts({ t0: 0, budget: 2, schools: [{ t: 1, f: 0.5, g: 1 }] })
    ).toBe(true);
  });
});

describe("display rounding", () => {
  it("values to one decimal, probabilities to three", () => {
    expect(formatValue(257.6427392)).toBe("257.6");
    expect(formatProbability(0.42)).toBe("0.420");
  });

  it("full precision preserved for hover and export", () => {
    expect(fullPrecision(257.6427392)).toBe("257.6427392");
  });
});

describe("stale-response discarding", () => {
  it("only the latest ticket is current", () => {
    const seq = new RequestSequencer();
    const first = seq.next();
    const second = seq.next();
    expect(seq.isCurrent(first)).toBe(false);
    expect(seq.isCurrent(second)).toBe(true);
  });
});
