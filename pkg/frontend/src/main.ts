/**
 * Page wiring: binds the controller to the static skeleton in
 * index.html.  All behavior lives in the controller/state modules;
 * this file only moves values between them and the DOM.
 */

import { WorkbenchApi } from "./api.js";
import { drawCurves } from "./chart.js";
import { WorkbenchController } from "./controller.js";
import { DraftStore } from "./drafts.js";
import { WorkbenchState, isEditable, progress, validateDraft } from "./state.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function setup(): void {
  const baseUrl = el<HTMLInputElement>("base-url");
  const sessionInput = el<HTMLInputElement>("session-id");
  const configInput = el<HTMLTextAreaElement>("session-config");
  const loadButton = el<HTMLButtonElement>("load-session");
  const createButton = el<HTMLButtonElement>("create-session");
  const formError = el<HTMLElement>("form-error");
  const statusLine = el<HTMLElement>("status-line");
  const banner = el<HTMLElement>("banner");
  const itemsBox = el<HTMLElement>("items");
  const chartCanvas = el<HTMLCanvasElement>("curves");

  let controller: WorkbenchController | null = null;
  // textareas are rebuilt only when the row set changes, so polling
  // never steals focus mid-keystroke
  let rowsSignature = "";

  function rowSignatureOf(state: WorkbenchState): string {
    const editable = isEditable(state) ? "e" : "r";
    return (
      `${state.round}:${editable}:` +
      state.items.map((i) => `${i.exampleId}=${i.locked ? 1 : 0}`).join(",")
    );
  }

  function rebuildRows(state: WorkbenchState): void {
    itemsBox.textContent = "";
    for (const item of state.items) {
      const row = document.createElement("div");
      row.className = "item" + (item.locked ? " locked" : "");

      const source = document.createElement("div");
      source.className = "source";
      source.textContent = item.source;
      row.appendChild(source);

      if (item.lf) {
        const lf = document.createElement("code");
        lf.className = "lf";
        lf.textContent = item.lf;
        row.appendChild(lf);
      }

      if (item.locked) {
        const done = document.createElement("div");
        done.className = "accepted";
        done.textContent =
          item.lockedText !== null ? item.lockedText : "(already translated elsewhere)";
        row.appendChild(done);
      } else {
        const editor = document.createElement("textarea");
        editor.value = item.draft;
        editor.rows = 2;
        editor.disabled = !isEditable(state);
        editor.addEventListener("input", () => {
          controller?.edit(item.exampleId, editor.value);
          rowError.textContent = validateDraft(editor.value) ?? "";
        });
        row.appendChild(editor);

        const submit = document.createElement("button");
        submit.textContent = "Submit";
        submit.disabled = !isEditable(state);
        submit.addEventListener("click", () => {
          submit.disabled = true;
          controller
            ?.submit(item.exampleId, editor.value)
            .then((problem) => {
              rowError.textContent = problem ?? "";
              submit.disabled = problem === null;
            })
            .catch((err) => {
              rowError.textContent = err instanceof Error ? err.message : String(err);
              submit.disabled = false;
            });
        });
        row.appendChild(submit);

        const rowError = document.createElement("span");
        rowError.className = "row-error";
        row.appendChild(rowError);
      }
      itemsBox.appendChild(row);
    }
  }

  function render(state: WorkbenchState): void {
    if (state.status === null) {
      statusLine.textContent = "no session loaded";
    } else {
      const p = progress(state);
      const batchNote =
        state.status === "awaiting_translations" ? ` — ${p.submitted}/${p.total} submitted` : "";
      statusLine.textContent =
        `session ${state.sessionId} · round ${state.round} · ${state.status}${batchNote}` +
        (state.error ? ` (${state.error})` : "");
    }

    banner.textContent = state.banner ?? "";
    banner.hidden = state.banner === null;

    const signature = rowSignatureOf(state);
    if (signature !== rowsSignature) {
      rowsSignature = signature;
      rebuildRows(state);
    }

    chartCanvas.hidden = state.metrics.length === 0;
    if (state.metrics.length > 0) {
      drawCurves(chartCanvas, state.metrics);
    }
  }

  function start(run: (c: WorkbenchController) => Promise<unknown>): void {
    controller?.stop();
    rowsSignature = "";
    formError.textContent = "";
    const api = new WorkbenchApi(baseUrl.value.trim() || "http://127.0.0.1:8765");
    const next = new WorkbenchController(api, new DraftStore(), {
      onChange: render,
    });
    controller = next;
    run(next).catch((err) => {
      formError.textContent = err instanceof Error ? err.message : String(err);
    });
  }

  loadButton.addEventListener("click", () => {
    const id = sessionInput.value.trim();
    if (!id) {
      formError.textContent = "enter a session id";
      return;
    }
    start((c) => c.load(id));
  });

  createButton.addEventListener("click", () => {
    let config: Record<string, unknown>;
    try {
      config = JSON.parse(configInput.value) as Record<string, unknown>;
    } catch {
      formError.textContent = "config must be valid JSON";
      return;
    }
    start(async (c) => {
      sessionInput.value = await c.create(config);
    });
  });
}

if (typeof document !== "undefined" && document.getElementById("workbench-root")) {
  setup();
}
