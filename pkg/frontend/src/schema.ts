// Client-side market validation mirroring the shared schema file, so the
// grid flags exactly the inputs the service would reject.

import { marketSchema } from "./generated/market-schema.js";

export interface SchemaIssue {
  path: string;
  message: string;
}

export interface MarketDocument {
  t0: number;
  budget: number;
  schools: SchoolDocument[];
}

export interface SchoolDocument {
  label?: string | null;
  t: number;
  f: number;
  g: number;
}

const schoolProps = marketSchema.properties.schools.items.properties;
export const F_MIN = schoolProps.f.minimum; // 0
export const F_MAX = schoolProps.f.maximum; // 1
export const G_MIN_EXCLUSIVE = schoolProps.g.exclusiveMinimum; // 0
export const BUDGET_MIN_EXCLUSIVE = marketSchema.properties.budget.exclusiveMinimum;

const MARKET_KEYS = new Set(Object.keys(marketSchema.properties));
const SCHOOL_KEYS = new Set(Object.keys(schoolProps));

function isFiniteNumber(x: unknown): x is number {
  return typeof x === "number" && Number.isFinite(x);
}

export function validateSchool(school: unknown, path: string): SchemaIssue[] {
  const issues: SchemaIssue[] = [];
  if (typeof school !== "object" || school === null || Array.isArray(school)) {
    return [{ path, message: "school must be an object" }];
  }
  const rec = school as Record<string, unknown>;
  for (const key of Object.keys(rec)) {
    if (!SCHOOL_KEYS.has(key)) {
      issues.push({ path, message: `unknown field ${key}` });
    }
  }
  for (const key of ["t", "f", "g"] as const) {
    if (!(key in rec)) {
      issues.push({ path, message: `missing required field ${key}` });
    } else if (!isFiniteNumber(rec[key])) {
      issues.push({ path: `${path}.${key}`, message: "must be a finite number" });
    }
  }
  if (isFiniteNumber(rec.f) && (rec.f < F_MIN || rec.f > F_MAX)) {
    issues.push({ path: `${path}.f`, message: `must lie in [${F_MIN}, ${F_MAX}]` });
  }
  if (isFiniteNumber(rec.g) && rec.g <= G_MIN_EXCLUSIVE) {
    issues.push({ path: `${path}.g`, message: "must be positive" });
  }
  if ("label" in rec && rec.label !== null && typeof rec.label !== "string") {
    issues.push({ path: `${path}.label`, message: "must be a string or null" });
  }
  return issues;
}

export function validateMarketDocument(doc: unknown): SchemaIssue[] {
  if (typeof doc !== "object" || doc === null || Array.isArray(doc)) {
    return [{ path: "", message: "market must be an object" }];
  }
  const issues: SchemaIssue[] = [];
  const rec = doc as Record<string, unknown>;
  for (const key of Object.keys(rec)) {
    if (!MARKET_KEYS.has(key)) {
      issues.push({ path: "", message: `unknown field ${key}` });
    }
  }
  for (const key of ["t0", "budget", "schools"] as const) {
    if (!(key in rec)) {
      issues.push({ path: key, message: "missing required field" });
    }
  }
  if ("t0" in rec && !isFiniteNumber(rec.t0)) {
    issues.push({ path: "t0", message: "must be a finite number" });
  }
  if ("budget" in rec) {
    if (!isFiniteNumber(rec.budget)) {
      issues.push({ path: "budget", message: "must be a finite number" });
    } else if (rec.budget <= BUDGET_MIN_EXCLUSIVE) {
      issues.push({ path: "budget", message: "must be positive" });
    }
  }
  if ("schools" in rec) {
    if (!Array.isArray(rec.schools)) {
      issues.push({ path: "schools", message: "must be an array" });
    } else {
      rec.schools.forEach((school, i) => {
        issues.push(...validateSchool(school, `schools[${i}]`));
      });
    }
  }
  return issues;
}

export function isValidMarketDocument(doc: unknown): doc is MarketDocument {
  return validateMarketDocument(doc).length === 0;
}
