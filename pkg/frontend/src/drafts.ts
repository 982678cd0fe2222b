/**
 * Unsent editor text, persisted so a page reload loses nothing.
 *
 * Keys are scoped to (session, round, example) — a draft never bleeds
 * into another round's row for the same example.  Storage defaults to
 * window.localStorage but is injectable (tests pass a plain Map-backed
 * shim; environments without storage degrade to no persistence).
 */

export interface DraftStorage {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

function defaultStorage(): DraftStorage | null {
  try {
    const candidate = (globalThis as { localStorage?: DraftStorage }).localStorage;
    if (!candidate) return null;
    // storage can exist but throw on access (privacy modes)
    candidate.getItem("transpick-probe");
    return candidate;
  } catch {
    return null;
  }
}

export class DraftStore {
  private readonly storage: DraftStorage | null;

  constructor(storage?: DraftStorage | null) {
    this.storage = storage === undefined ? defaultStorage() : storage;
  }

  private key(sessionId: string, round: number, exampleId: string): string {
    return `transpick-draft:${sessionId}:${round}:${exampleId}`;
  }

  load(sessionId: string, round: number, exampleId: string): string {
    if (!this.storage) return "";
    try {
      return this.storage.getItem(this.key(sessionId, round, exampleId)) ?? "";
    } catch {
      return "";
    }
  }

  save(sessionId: string, round: number, exampleId: string, text: string): void {
    if (!this.storage) return;
    try {
      if (text) {
        this.storage.setItem(this.key(sessionId, round, exampleId), text);
      } else {
        this.storage.removeItem(this.key(sessionId, round, exampleId));
      }
    } catch {
      // persistence is best-effort
    }
  }

  clear(sessionId: string, round: number, exampleId: string): void {
    this.save(sessionId, round, exampleId, "");
  }
}
