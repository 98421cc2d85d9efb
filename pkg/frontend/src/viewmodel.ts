// Pure view logic: the editable draft, its mapping to request documents,
// and the render models the DOM binds.  Everything here is testable without
// a browser, and none of it computes portfolio values.

import type {
  FrontierEntry,
  FrontierResponse,
  SolveResponse,
  WhatIfResponse,
} from "./api.js";
import { F_MAX, F_MIN, MarketDocument, SchoolDocument } from "./schema.js";

export type LockState = "none" | "in" | "out";

export interface DraftRow {
  label: string;
  t: string;
  f: string;
  g: string;
  lock: LockState;
}

export interface MarketDraft {
  t0: string;
  budget: string;
  rows: DraftRow[];
  algorithm: string;
  epsilon: string;
  saSeed: string;
}

export function emptyDraft(): MarketDraft {
  return {
    t0: "0",
    budget: "1",
    rows: [],
    algorithm: "auto",
    epsilon: "0.05",
    saSeed: String((Date.now() % 100000) | 0),
  };
}

export interface RowIssues {
  t: string | null;
  f: string | null;
  g: string | null;
}

function parseNumber(text: string): number | null {
  if (text.trim() === "") return null;
  const x = Number(text);
  return Number.isFinite(x) ? x : null;
}

export function rowIssues(row: DraftRow): RowIssues {
  const t = parseNumber(row.t);
  const f = parseNumber(row.f);
  const g = parseNumber(row.g);
  return {
    t: t === null ? "utility must be a finite number" : null,
    f:
      f === null
        ? "probability must be a finite number"
        : f < F_MIN || f > F_MAX
          ? `probability must lie in [${F_MIN}, ${F_MAX}]`
          : null,
    g: g === null ? "fee must be a finite number" : g <= 0 ? "fee must be positive" : null,
  };
}

export function rowIsValid(row: DraftRow): boolean {
  const issues = rowIssues(row);
  return issues.t === null && issues.f === null && issues.g === null;
}

export interface BuiltRequest {
  market: MarketDocument;
  /** draft row index of each submitted school, by document position */
  rowOfSchool: number[];
  /** locked positions, in document coordinates */
  lockedIn: number[];
  lockedOut: number[];
  /** draft rows excluded for invalid fields */
  skippedRows: number[];
}

export interface DraftProblem {
  message: string;
}

export function buildRequest(draft: MarketDraft): BuiltRequest | DraftProblem {
  const t0 = parseNumber(draft.t0);
  const budget = parseNumber(draft.budget);
  if (t0 === null) return { message: "outside-option utility must be a number" };
  if (budget === null || budget <= 0) {
    return { message: "budget must be a positive number" };
  }
  const schools: SchoolDocument[] = [];
  const rowOfSchool: number[] = [];
  const lockedIn: number[] = [];
  const lockedOut: number[] = [];
  const skippedRows: number[] = [];
  draft.rows.forEach((row, rowIndex) => {
    if (!rowIsValid(row)) {
      skippedRows.push(rowIndex);
      return;
    }
    const position = schools.length;
    schools.push({
      label: row.label.trim() === "" ? null : row.label,
      t: parseNumber(row.t)!,
      f: parseNumber(row.f)!,
      g: parseNumber(row.g)!,
    });
    rowOfSchool.push(rowIndex);
    if (row.lock === "in") lockedIn.push(position);
    if (row.lock === "out") lockedOut.push(position);
  });
  return {
    market: { t0, budget, schools },
    rowOfSchool,
    lockedIn,
    lockedOut,
    skippedRows,
  };
}

export function isProblem<T extends object>(x: T | DraftProblem): x is DraftProblem {
  return (x as DraftProblem).message !== undefined;
}

export function hasUnitCosts(market: MarketDocument): boolean {
  return market.schools.every((s) => s.g === 1);
}

/** Budget left after the locked-in rows; negative means an infeasible lock
 * set, flagged before any request is sent. */
export function residualBudgetOf(request: BuiltRequest): number {
  const spent = request.lockedIn.reduce(
    (acc, pos) => acc + request.market.schools[pos].g,
    0
  );
  return request.market.budget - spent;
}

// --- display formatting (values 1 decimal, probabilities 3; full precision
// --- preserved for hover text and export)

export function formatValue(x: number): string {
  return x.toFixed(1);
}

export function formatProbability(x: number): string {
  return x.toFixed(3);
}

export function fullPrecision(x: number): string {
  return String(x);
}

// --- frontier view

export interface FrontierView {
  entries: FrontierEntry[];
  sliderH: number;
}

export function frontierView(response: FrontierResponse, sliderH = 1): FrontierView {
  const h = Math.min(Math.max(sliderH, 1), Math.max(response.entries.length, 1));
  return { entries: response.entries, sliderH: h };
}

/** The schools highlighted at limit h: always the first h entries, so a
 * slider move never unhighlights an earlier pick. */
export function highlightedPrefix(view: FrontierView, h: number): number[] {
  return view.entries.slice(0, h).map((e) => e.index);
}

export function chartPoints(view: FrontierView): { h: number; value: number }[] {
  return view.entries.map((e) => ({ h: e.h, value: e.value }));
}

// --- solve / what-if render model

export interface ResultView {
  solver: string;
  certificate: string;
  memberLabels: string[];
  value: string;
  valueExact: string;
  residualBudget: string | null;
  attendance: { label: string; probability: string }[];
  /** formatted drop vs. the unconstrained solve; null when not applicable */
  deltaVsUnconstrained: string | null;
}

function labelOf(market: MarketDocument, index: number): string {
  const school = market.schools[index];
  return school?.label ?? `school ${index + 1}`;
}

export function resultView(
  response: SolveResponse | WhatIfResponse,
  market: MarketDocument,
  unconstrained?: SolveResponse
): ResultView {
  const residual =
    "residual_budget" in response ? fullPrecision(response.residual_budget) : null;
  const delta =
    unconstrained === undefined
      ? null
      : formatValue(unconstrained.value - response.value);
  return {
    solver: response.solver,
    certificate: response.certificate,
    memberLabels: response.members.map((j) => labelOf(market, j)),
    value: formatValue(response.value),
    valueExact: fullPrecision(response.value),
    residualBudget: residual,
    attendance: response.attendance.map((row) => ({
      label: row.index === null ? "no school" : labelOf(market, row.index),
      probability: formatProbability(row.probability),
    })),
    deltaVsUnconstrained: delta,
  };
}

// --- stale-response discarding: one in-flight request per view

export class RequestSequencer {
  private counter = 0;

  next(): number {
    this.counter += 1;
    return this.counter;
  }

  isCurrent(ticket: number): boolean {
    return ticket === this.counter;
  }
}

// --- market import/export

export function draftFromDocument(doc: MarketDocument): MarketDraft {
  return {
    t0: fullPrecision(doc.t0),
    budget: fullPrecision(doc.budget),
    rows: doc.schools.map((s) => ({
      label: s.label ?? "",
      t: fullPrecision(s.t),
      f: fullPrecision(s.f),
      g: fullPrecision(s.g),
      lock: "none" as LockState,
    })),
    algorithm: "auto",
    epsilon: "0.05",
    saSeed: "1",
  };
}

export function exportDocument(draft: MarketDraft): MarketDocument | DraftProblem {
  const built = buildRequest(draft);
  if (isProblem(built)) return built;
  return built.market;
}
