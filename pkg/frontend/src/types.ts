/** Response shapes of the esglens HTTP API, as consumed by the client. */

export interface Company {
  company_id: string;
  name: string;
  index_membership: string[];
  reports: string[];
}

export interface Question {
  question_id: string;
  category: string;
  pillar: string;
  text: string;
  editorial: boolean;
}

export interface ClaimBody {
  question_id: string;
  point: string;
  source_page: number;
  section: string;
  tone: string | null;
  value_magnitude: string | null;
  value_unit: string | null;
}

/** One verified (or failed) claim inside an answer or audit payload. */
export interface ClaimEntry {
  claim: ClaimBody;
  status: string | null;
  error?: string;
  matched_page?: number | null;
  match_score?: number;
  leakage_score?: number;
  matched_span?: [number, number] | null;
}

export interface Answer {
  report_id: string;
  question_id: string;
  question_text: string;
  strategy: string;
  lenient: boolean;
  prompt: string;
  raw_response: string;
  claims: ClaimEntry[];
  counts: Record<string, number>;
}

export interface PageText {
  report_id: string;
  page_number: number;
  text: string;
}

export interface ScoreRecord {
  fiscal_year: number;
  score: number;
  kind: "Predicted" | "Reference";
  model_run_id: string | null;
}

export interface CompanyScores {
  company_id: string;
  scores: ScoreRecord[];
}

export interface Metrics {
  run_id: string;
  provider_id: string;
  model_kind: string;
  pearson_r: number | null;
  r_squared: number | null;
  loss_curve: number[];
}

export interface ApiErrorBody {
  error: { code: string; message: string };
}
