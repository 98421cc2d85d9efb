// Bundled sample markets, mirroring the files the backend ships.

import type { MarketDocument } from "./schema.js";

/** Eight planet schools with unit fees; the classic worked example. */
export const solarSystemMarket: MarketDocument = {
  t0: 0.0,
  budget: 8.0,
  schools: [
    { label: "Mercury University", t: 200.0, f: 0.39, g: 1.0 },
    { label: "Venus University", t: 250.0, f: 0.33, g: 1.0 },
    { label: "Mars University", t: 300.0, f: 0.24, g: 1.0 },
    { label: "Jupiter University", t: 350.0, f: 0.24, g: 1.0 },
    { label: "Saturn University", t: 400.0, f: 0.05, g: 1.0 },
    { label: "Uranus University", t: 450.0, f: 0.03, g: 1.0 },
    { label: "Neptune University", t: 500.0, f: 0.1, g: 1.0 },
    { label: "Pluto College", t: 550.0, f: 0.12, g: 1.0 },
  ],
};

/** Two cheap twins and one pricey standout: the optimum at budget 3 is not
 * a superset of the optimum at budget 2, so no slider for this one. */
export const nonNestedMarket: MarketDocument = {
  t0: 0.0,
  budget: 3.0,
  schools: [
    { label: "Cheap A", t: 1.0, f: 0.5, g: 1.0 },
    { label: "Cheap B", t: 1.0, f: 0.5, g: 1.0 },
    { label: "Grand Prize", t: 219.0, f: 0.5, g: 3.0 },
  ],
};
