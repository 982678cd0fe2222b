/** Wire types for the annotation-service HTTP API. */

export type SessionStatus =
  | "training"
  | "awaiting_translations"
  | "finished"
  | "failed";

export interface StatusView {
  session_id: string;
  status: SessionStatus;
  round: number;
  translated_total: number;
  pool_size: number;
  pending: number;
  error?: string;
}

export interface BatchItem {
  example_id: string;
  utterance: string;
  lf?: string;
}

export interface BatchView {
  session_id: string;
  round: number;
  status: SessionStatus;
  items: BatchItem[];
}

export interface SubmitResult {
  session_id: string;
  round: number;
  accepted: number;
  remaining: number;
  status: SessionStatus;
}

export interface MetricsRecord {
  round: number;
  cumulative_budget: number;
  source_accuracy: number;
  target_accuracy: number | null;
  compound_coverage: number;
  strategy: string;
  seed: number;
}

export interface MetricsView {
  session_id: string;
  metrics: MetricsRecord[];
}
