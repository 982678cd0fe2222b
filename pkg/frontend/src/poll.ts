/**
 * Fixed-interval poller for the session's server state.  The service
 * has no push channel and rounds are minutes-scale, so a 2s interval
 * is plenty.  Ticks never overlap: a slow request simply delays the
 * next one.  Errors go to the handler and polling continues — the
 * page shows a retryable banner instead of dying.
 */
export class Poller {
  private timer: ReturnType<typeof setInterval> | null = null;
  private inFlight = false;

  constructor(
    private readonly tick: () => Promise<void>,
    private readonly onError: (err: unknown) => void,
    private readonly intervalMs: number = 2000,
  ) {}

  start(): void {
    if (this.timer !== null) return;
    const run = async () => {
      if (this.inFlight) return;
      this.inFlight = true;
      try {
        await this.tick();
      } catch (err) {
        this.onError(err);
      } finally {
        this.inFlight = false;
      }
    };
    this.timer = setInterval(run, this.intervalMs);
    void run();
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  get running(): boolean {
    return this.timer !== null;
  }
}
