import { ApiError, WorkbenchApi } from "./api.js";
import { DraftStore } from "./drafts.js";
import { Poller } from "./poll.js";
import {
  WorkbenchState,
  applyBatch,
  applyMetrics,
  applyStatus,
  emptyState,
  isEditable,
  lockFromConflict,
  lockItem,
  setDraft,
  validateDraft,
} from "./state.js";

export interface ControllerOptions {
  pollIntervalMs?: number;
  onChange?: (state: WorkbenchState) => void;
}

/**
 * Drives one annotation session: polls status/batch/metrics, routes
 * edits and submissions, and keeps a WorkbenchState the page renders
 * from.  All server interaction goes through the injected api client,
 * so the whole loop is testable without a browser.
 */
export class WorkbenchController {
  readonly state: WorkbenchState = emptyState();
  private readonly poller: Poller;
  private readonly onChange: (state: WorkbenchState) => void;

  constructor(
    private readonly api: WorkbenchApi,
    private readonly drafts: DraftStore,
    options: ControllerOptions = {},
  ) {
    this.onChange = options.onChange ?? (() => {});
    this.poller = new Poller(
      () => this.refresh(),
      (err) => this.showBanner(err),
      options.pollIntervalMs ?? 2000,
    );
  }

  /** Bind to an existing session and start polling it.  A down
   * service surfaces as a banner, not a rejection — the poller keeps
   * retrying until the service answers. */
  async load(sessionId: string): Promise<void> {
    this.state.sessionId = sessionId;
    try {
      await this.refresh();
    } catch (err) {
      this.showBanner(err);
    }
    this.poller.start();
  }

  /** Create a fresh session from a config mapping, then run it. */
  async create(config: Record<string, unknown>): Promise<string> {
    const view = await this.api.createSession(config);
    applyStatus(this.state, view);
    this.onChange(this.state);
    this.poller.start();
    return view.session_id;
  }

  stop(): void {
    this.poller.stop();
  }

  get polling(): boolean {
    return this.poller.running;
  }

  /** One poll: status always; batch while translating; metrics for the
   * curve view.  Ends polling on the terminal states. */
  async refresh(): Promise<void> {
    const sessionId = this.state.sessionId;
    if (!sessionId) return;
    const status = await this.api.getStatus(sessionId);
    applyStatus(this.state, status);
    if (status.status === "awaiting_translations") {
      const batch = await this.api.getBatch(sessionId);
      applyBatch(this.state, batch, (round, exampleId) =>
        this.drafts.load(sessionId, round, exampleId),
      );
    }
    const metrics = await this.api.getMetrics(sessionId);
    applyMetrics(this.state, metrics.metrics);
    if (status.status === "finished" || status.status === "failed") {
      this.poller.stop();
    }
    this.onChange(this.state);
  }

  edit(exampleId: string, text: string): void {
    setDraft(this.state, exampleId, text);
    if (this.state.sessionId) {
      // keyed by the rows' round, the same key applyBatch reloads from
      this.drafts.save(this.state.sessionId, this.state.itemsRound, exampleId, text);
    }
    this.onChange(this.state);
  }

  /**
   * Submit one row.  Returns null on success or a message describing
   * why the row was not accepted; an empty draft never reaches the
   * service.  A conflict (another writer already supplied this row)
   * locks the row and leaves every other edit untouched.
   */
  async submit(exampleId: string, text: string): Promise<string | null> {
    const sessionId = this.state.sessionId;
    if (!sessionId || !isEditable(this.state)) {
      return "session is not awaiting translations";
    }
    const invalid = validateDraft(text);
    if (invalid) return invalid;
    try {
      await this.api.submitTranslation(sessionId, exampleId, text);
    } catch (err) {
      if (err instanceof ApiError && err.code === "duplicate_submission") {
        lockFromConflict(this.state, exampleId);
        this.onChange(this.state);
        return `already submitted on the server: ${err.message}`;
      }
      throw err;
    }
    lockItem(this.state, exampleId, text);
    this.drafts.clear(sessionId, this.state.itemsRound, exampleId);
    // reconcile immediately instead of waiting a full poll interval;
    // on batch completion this is what surfaces "training"
    await this.refresh();
    return null;
  }

  private showBanner(err: unknown): void {
    this.state.banner =
      err instanceof Error ? `${err.message} — retrying` : "service unreachable — retrying";
    this.onChange(this.state);
  }
}
