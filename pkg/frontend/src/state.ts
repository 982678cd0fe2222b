import type { BatchView, MetricsRecord, SessionStatus, StatusView } from "./types.js";

/** One editable row of the current batch. */
export interface ItemState {
  exampleId: string;
  source: string;
  lf?: string;
  draft: string;
  /** Set once the service has accepted (or already holds) a translation. */
  locked: boolean;
  /** The accepted text when this client submitted it; null when another
   * writer got there first and the service kept its value. */
  lockedText: string | null;
}

/**
 * Everything the page renders.  Every field is filled from a service
 * response — the view never invents rounds, items, or progress.
 */
export interface WorkbenchState {
  sessionId: string | null;
  status: SessionStatus | null;
  round: number;
  /** Round the current rows belong to; lags `round` during training. */
  itemsRound: number;
  items: ItemState[];
  metrics: MetricsRecord[];
  /** Retryable problem banner; null when the last poll succeeded. */
  banner: string | null;
  /** Service-reported failure detail, only for status "failed". */
  error: string | null;
}

export function emptyState(): WorkbenchState {
  return {
    sessionId: null,
    status: null,
    round: 0,
    itemsRound: -1,
    items: [],
    metrics: [],
    banner: null,
    error: null,
  };
}

export function applyStatus(state: WorkbenchState, view: StatusView): void {
  state.sessionId = view.session_id;
  state.status = view.status;
  state.round = view.round;
  state.error = view.error ?? null;
  state.banner = null;
}

/**
 * Replace the rows from a batch response.  Rows for a new round start
 * from their saved drafts; re-applying the same round keeps local edit
 * and lock state for rows the service still lists, and marks rows it
 * no longer lists (someone else submitted them) as locked.
 */
export function applyBatch(
  state: WorkbenchState,
  batch: BatchView,
  loadDraft: (round: number, exampleId: string) => string,
): void {
  const sameRound = batch.round === state.itemsRound && state.items.length > 0;
  const previous = new Map(state.items.map((item) => [item.exampleId, item]));
  const listed = new Set(batch.items.map((item) => item.example_id));

  const items: ItemState[] = batch.items.map((item) => {
    const old = sameRound ? previous.get(item.example_id) : undefined;
    return {
      exampleId: item.example_id,
      source: item.utterance,
      lf: item.lf,
      draft: old ? old.draft : loadDraft(batch.round, item.example_id),
      locked: old ? old.locked : false,
      lockedText: old ? old.lockedText : null,
    };
  });
  if (sameRound) {
    for (const item of state.items) {
      if (!listed.has(item.exampleId)) {
        items.push({ ...item, locked: true });
      }
    }
    items.sort((a, b) => (a.exampleId < b.exampleId ? -1 : a.exampleId > b.exampleId ? 1 : 0));
  }

  state.round = batch.round;
  state.itemsRound = batch.round;
  state.status = batch.status;
  state.items = items;
  state.banner = null;
}

export function applyMetrics(state: WorkbenchState, metrics: MetricsRecord[]): void {
  state.metrics = metrics;
}

export function setDraft(state: WorkbenchState, exampleId: string, text: string): void {
  const item = state.items.find((i) => i.exampleId === exampleId);
  if (item && !item.locked) item.draft = text;
}

/** Mark a row accepted by the service with the exact text it stored. */
export function lockItem(state: WorkbenchState, exampleId: string, text: string): void {
  const item = state.items.find((i) => i.exampleId === exampleId);
  if (item) {
    item.locked = true;
    item.lockedText = text;
    item.draft = "";
  }
}

/** A conflicting submit means the service already holds a value for the
 * row; lock it without pretending we know that text. */
export function lockFromConflict(state: WorkbenchState, exampleId: string): void {
  const item = state.items.find((i) => i.exampleId === exampleId);
  if (item) {
    item.locked = true;
    item.lockedText = null;
  }
}

export function progress(state: WorkbenchState): { submitted: number; total: number } {
  const total = state.items.length;
  const submitted = state.items.filter((item) => item.locked).length;
  return { submitted, total };
}

/** Rows are editable only while the service is waiting on this batch. */
export function isEditable(state: WorkbenchState): boolean {
  return state.status === "awaiting_translations";
}

/** Client-side gate matching the service's empty-utterance rejection. */
export function validateDraft(text: string): string | null {
  if (!text.trim()) return "translation must not be empty";
  return null;
}
