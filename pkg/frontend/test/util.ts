import type { DraftStorage } from "../src/drafts.js";

/** Poll a predicate with real timers until it holds or time runs out. */
export async function waitUntil(
  pred: () => boolean,
  label: string,
  timeoutMs = 3000,
): Promise<void> {
  const started = Date.now();
  while (!pred()) {
    if (Date.now() - started > timeoutMs) {
      throw new Error(`timed out waiting for ${label}`);
    }
    await new Promise((resolve) => setTimeout(resolve, 2));
  }
}

/** Map-backed localStorage stand-in; share one across "reloads". */
export class MemoryStorage implements DraftStorage {
  constructor(private readonly map = new Map<string, string>()) {}

  getItem(key: string): string | null {
    return this.map.has(key) ? this.map.get(key)! : null;
  }

  setItem(key: string, value: string): void {
    this.map.set(key, value);
  }

  removeItem(key: string): void {
    this.map.delete(key);
  }
}

export function utf8Bytes(text: string): number[] {
  return Array.from(new TextEncoder().encode(text));
}
