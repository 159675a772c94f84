// Shapes of the documents the HTTP API exchanges. These mirror the server's
// JSON schemas; the UI never derives degree numbers itself, it only displays
// what a server-issued report contains.

export type Mode = "adaptability" | "adaptivity";

export interface TaxonomyRef {
  id: string;
  version: string;
}

export interface ElementDoc {
  id: string;
  label: string;
  description?: string;
  example_ref?: string;
}

export interface SubNodeDoc {
  id: string;
  label: string;
  elements: ElementDoc[];
}

export interface FactorDoc {
  id: string;
  label: string;
  sub_factors: SubNodeDoc[];
}

export interface AspectDoc {
  id: string;
  label: string;
  sub_aspects: SubNodeDoc[];
}

export interface TaxonomyDoc {
  id: string;
  version: string;
  factors: FactorDoc[];
  aspects: AspectDoc[];
}

export interface TaxonomySummary {
  id: string;
  version: string;
  factors: number;
  sub_factors: number;
  aspects: number;
  sub_aspects: number;
}

export interface MarkDoc {
  aspect_element: string;
  factor_element: string;
}

export interface MicroGridDoc {
  sub_aspect: string;
  sub_factor: string;
  na: boolean;
  marks: MarkDoc[];
}

export interface EvaluationDoc {
  taxonomy: TaxonomyRef;
  system: string;
  evaluator: string;
  mode: Mode;
  created: string;
  updated: string;
  micro_grids: MicroGridDoc[];
}

export interface IdLabel {
  id: string;
  label: string;
}

export interface MicroDegreeRow {
  sub_aspect: string;
  sub_factor: string;
  na: boolean;
  degree: number | null;
}

export interface LocalRow {
  aspect: string;
  factor: string;
  percent: number | null;
  n: number;
  m: number;
  degree_sum: number;
}

export interface ScoreReportDoc {
  kind: "score_report";
  taxonomy: TaxonomyRef;
  system: string;
  evaluator: string;
  mode: Mode;
  degree_suffix: string;
  aspects: IdLabel[];
  factors: IdLabel[];
  micro_degrees: MicroDegreeRow[];
  local: LocalRow[];
  aspect_degrees: { aspect: string; percent: number | null }[];
  factor_degrees: { factor: string; percent: number | null }[];
  global_percent: number;
  identity_warning: string | null;
  rounded: {
    decimals: number;
    local: { aspect: string; factor: string; percent: number | null }[];
    aspect_degrees: Record<string, number | null>;
    factor_degrees: Record<string, number | null>;
    global_percent: number;
  };
}

export interface LaDeltaRow {
  aspect: string;
  factor: string;
  delta: number | null;
}

export interface MicroDiffRow {
  sub_aspect: string;
  sub_factor: string;
  left: number;
  right: number;
}

export interface NaDisagreementRow {
  sub_aspect: string;
  sub_factor: string;
  left_na: boolean;
  right_na: boolean;
}

export interface ComparisonDoc {
  kind: "comparison_report";
  taxonomy: TaxonomyRef;
  mode: Mode;
  left: { system: string; evaluator: string };
  right: { system: string; evaluator: string };
  aspects: IdLabel[];
  factors: IdLabel[];
  la_delta: LaDeltaRow[];
  aa_delta: { aspect: string; delta: number | null }[];
  fa_delta: { factor: string; delta: number | null }[];
  ga_delta: number;
  micro_diffs: MicroDiffRow[];
  na_disagreements: NaDisagreementRow[];
  identical: boolean;
  rounded: {
    decimals: number;
    la_delta: LaDeltaRow[];
    ga_delta: number;
  };
}

export interface EvaluationPayload {
  id: string;
  revision: number;
  evaluation: EvaluationDoc;
  report: ScoreReportDoc | null;
}

export interface EvaluationSummary {
  id: string;
  system: string;
  evaluator: string;
  mode: Mode;
  taxonomy: TaxonomyRef;
  revision: number;
  updated: string;
}

export type PatchChange =
  | {
      kind: "mark";
      sub_aspect: string;
      sub_factor: string;
      aspect_element: string;
      factor_element: string;
      checked: boolean;
    }
  | {
      kind: "na";
      sub_aspect: string;
      sub_factor: string;
      na: boolean;
    };

export interface ApiErrorBody {
  code: string;
  message: string;
  path: string;
}
