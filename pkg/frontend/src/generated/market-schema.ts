// Generated by scripts/embed-schema.mjs from the shared schema file.
// Do not edit; run `npm run build` to refresh.
export const marketSchema = {
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "$id": "https://collegeapp.invalid/market.schema.json",
  "title": "Admissions market",
  "description": "Interchange format consumed by the CLI, the HTTP service, the generator, and the UI. Schools are listed in the caller's order; indices in requests refer to positions in this array.",
  "type": "object",
  "required": [
    "t0",
    "budget",
    "schools"
  ],
  "additionalProperties": false,
  "properties": {
    "t0": {
      "description": "Utility of attending no school",
      "type": "number"
    },
    "budget": {
      "description": "Total application budget",
      "type": "number",
      "exclusiveMinimum": 0
    },
    "schools": {
      "type": "array",
      "items": {
        "type": "object",
        "required": [
          "t",
          "f",
          "g"
        ],
        "additionalProperties": false,
        "properties": {
          "label": {
            "type": [
              "string",
              "null"
            ]
          },
          "t": {
            "description": "Utility of attending",
            "type": "number"
          },
          "f": {
            "description": "Admission probability",
            "type": "number",
            "minimum": 0,
            "maximum": 1
          },
          "g": {
            "description": "Application fee",
            "type": "number",
            "exclusiveMinimum": 0
          }
        }
      }
    }
  }
} as const;
