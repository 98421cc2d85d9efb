// Thin typed client for the solver service.  The UI computes no portfolio
// values of its own; every number on screen originates here.

import type { MarketDocument } from "./schema.js";

export interface AttendanceRow {
  index: number | null;
  probability: number;
}

export interface SolveResponse {
  solver: string;
  certificate: string;
  members: number[];
  schools: { index: number; label: string | null }[];
  value: number;
  canonical_value: number;
  optimum_upper_bound?: number | null;
  wall_ms: number;
  epsilon?: number;
  nodes?: number;
  iterations?: number;
  attendance: AttendanceRow[];
}

export interface WhatIfResponse extends SolveResponse {
  locked_in: number[];
  locked_out: number[];
  residual_budget: number;
}

export interface FrontierEntry {
  h: number;
  index: number;
  label: string | null;
  value: number;
}

export interface FrontierResponse {
  entries: FrontierEntry[];
  t0: number;
  budget: number;
}

export interface SolveParams {
  algorithm?: string;
  h?: number;
  epsilon?: number;
  sa?: { seed: number; temperature?: number; cooling?: number; iterations?: number };
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly path?: string
  ) {
    super(message);
  }
}

declare global {
  // Optional runtime override, set before the bundle loads.
  var COLLEGEAPP_BASE_URL: string | undefined;
}

const DEFAULT_BASE_URL = "http://127.0.0.1:8000";

export function baseUrl(): string {
  if (typeof globalThis.COLLEGEAPP_BASE_URL === "string") {
    return globalThis.COLLEGEAPP_BASE_URL;
  }
  try {
    const stored = globalThis.localStorage?.getItem("collegeapp.baseUrl");
    if (stored) return stored;
  } catch {
    // storage unavailable (tests, privacy mode)
  }
  return DEFAULT_BASE_URL;
}

async function post<T>(path: string, body: unknown): Promise<T> {
  const response = await fetch(`${baseUrl()}${path}`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(body),
  });
  const payload = await response.json();
  if (!response.ok) {
    const err = (payload as { error?: { code?: string; message?: string; path?: string } }).error;
    throw new ApiError(
      response.status,
      err?.code ?? "unknown",
      err?.message ?? response.statusText,
      err?.path
    );
  }
  return payload as T;
}

export function solve(market: MarketDocument, params: SolveParams = {}): Promise<SolveResponse> {
  return post("/api/solve", { market, ...params });
}

export function frontierOf(market: MarketDocument): Promise<FrontierResponse> {
  return post("/api/frontier", { market });
}

export function whatIf(
  market: MarketDocument,
  lockedIn: number[],
  lockedOut: number[],
  params: SolveParams = {}
): Promise<WhatIfResponse> {
  return post("/api/whatif", {
    market,
    locked_in: lockedIn,
    locked_out: lockedOut,
    ...params,
  });
}

export async function health(): Promise<{ status: string; version: string }> {
  const response = await fetch(`${baseUrl()}/api/health`);
  return (await response.json()) as { status: string; version: string };
}
