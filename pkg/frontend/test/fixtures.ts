// Hand-built documents for unit tests, shaped exactly like server output.

import type {
  ComparisonDoc,
  EvaluationDoc,
  ScoreReportDoc,
  TaxonomyDoc,
} from "../src/types.js";

export function tinyTaxonomy(): TaxonomyDoc {
  return {
    id: "tiny",
    version: "1",
    factors: [
      {
        id: "user",
        label: "User",
        sub_factors: [
          {
            id: "abilities",
            label: "Abilities",
            elements: [
              { id: "myopia", label: "Myopia" },
              { id: "hearing", label: "Hearing" },
            ],
          },
        ],
      },
    ],
    aspects: [
      {
        id: "presentation",
        label: "Presentation",
        sub_aspects: [
          {
            id: "looks",
            label: "Looks",
            elements: [
              { id: "text-size", label: "Text size" },
              { id: "background", label: "Background" },
            ],
          },
        ],
      },
    ],
  };
}

export function tinyReport(overrides: Partial<ScoreReportDoc> = {}): ScoreReportDoc {
  return {
    kind: "score_report",
    taxonomy: { id: "tiny", version: "1" },
    system: "GPS-Nav",
    evaluator: "alice",
    mode: "adaptability",
    degree_suffix: "",
    aspects: [{ id: "presentation", label: "Presentation" }],
    factors: [{ id: "user", label: "User" }],
    micro_degrees: [
      { sub_aspect: "looks", sub_factor: "abilities", na: false, degree: 2 },
    ],
    local: [
      { aspect: "presentation", factor: "user", percent: 66.666666, n: 1, m: 0, degree_sum: 2 },
    ],
    aspect_degrees: [{ aspect: "presentation", percent: 66.666666 }],
    factor_degrees: [{ factor: "user", percent: 66.666666 }],
    global_percent: 66.666666,
    identity_warning: null,
    rounded: {
      decimals: 2,
      local: [{ aspect: "presentation", factor: "user", percent: 66.67 }],
      aspect_degrees: { presentation: 66.67 },
      factor_degrees: { user: 66.67 },
      global_percent: 66.67,
    },
    ...overrides,
  };
}

export function tinyEvaluation(overrides: Partial<EvaluationDoc> = {}): EvaluationDoc {
  return {
    taxonomy: { id: "tiny", version: "1" },
    system: "GPS-Nav",
    evaluator: "alice",
    mode: "adaptability",
    created: "2026-08-10T12:00:00.000000Z",
    updated: "2026-08-10T12:00:00.000000Z",
    micro_grids: [
      {
        sub_aspect: "looks",
        sub_factor: "abilities",
        na: false,
        marks: [
          { aspect_element: "text-size", factor_element: "myopia" },
          { aspect_element: "background", factor_element: "myopia" },
        ],
      },
    ],
    ...overrides,
  };
}

export function zeroComparison(): ComparisonDoc {
  return {
    kind: "comparison_report",
    taxonomy: { id: "tiny", version: "1" },
    mode: "adaptability",
    left: { system: "GPS-Nav", evaluator: "alice" },
    right: { system: "GPS-Nav", evaluator: "alice" },
    aspects: [{ id: "presentation", label: "Presentation" }],
    factors: [{ id: "user", label: "User" }],
    la_delta: [{ aspect: "presentation", factor: "user", delta: 0 }],
    aa_delta: [{ aspect: "presentation", delta: 0 }],
    fa_delta: [{ factor: "user", delta: 0 }],
    ga_delta: 0,
    micro_diffs: [],
    na_disagreements: [],
    identical: true,
    rounded: {
      decimals: 2,
      la_delta: [{ aspect: "presentation", factor: "user", delta: 0 }],
      ga_delta: 0,
    },
  };
}
