// DOM bootstrap: wires the controller and renderers to the page. All grid
// logic lives in state.ts/render.ts so it stays testable without a browser.

import { ApiClient } from "./api.js";
import {
  renderCompareView,
  renderEditGrid,
  renderEvaluationList,
  renderMainGrid,
  renderMicroGridEditor,
} from "./render.js";
import { GridController } from "./state.js";
import type { PatchChange, SubNodeDoc } from "./types.js";

const api = new ApiClient("");

const $ = (selector: string): HTMLElement => {
  const node = document.querySelector(selector);
  if (!(node instanceof HTMLElement)) {
    throw new Error(`missing element: ${selector}`);
  }
  return node;
};

let controller: GridController | null = null;

function subNode(kind: "aspect" | "factor", id: string): SubNodeDoc {
  const taxonomy = controller?.taxonomy;
  if (!taxonomy) {
    throw new Error("taxonomy not loaded");
  }
  const nodes =
    kind === "aspect"
      ? taxonomy.aspects.flatMap((a) => a.sub_aspects)
      : taxonomy.factors.flatMap((f) => f.sub_factors);
  const node = nodes.find((n) => n.id === id);
  if (!node) {
    throw new Error(`unknown sub-${kind} ${id}`);
  }
  return node;
}

function refreshGrids(): void {
  if (!controller || !controller.taxonomy) {
    return;
  }
  const report = controller.report;
  if (report === null) {
    $("#main-grid").innerHTML = `<p class="empty">Every micro-grid is N/A; no degrees.</p>`;
    $("#edit-grid").innerHTML = "";
    return;
  }
  $("#main-grid").innerHTML = renderMainGrid(report);
  $("#edit-grid").innerHTML = renderEditGrid(controller.taxonomy, report);
}

function refreshEditor(): void {
  const host = $("#micro-editor");
  if (!controller?.buffer) {
    host.innerHTML = "";
    return;
  }
  const buffer = controller.buffer;
  host.innerHTML = renderMicroGridEditor(
    subNode("aspect", buffer.subAspect),
    subNode("factor", buffer.subFactor),
    buffer.view(),
  );
}

async function refreshList(): Promise<void> {
  const { evaluations } = await api.listEvaluations();
  $("#evaluations").innerHTML = renderEvaluationList(evaluations);
}

async function openEvaluation(id: string): Promise<void> {
  controller = new GridController(api, id);
  await controller.load();
  $("#current-evaluation").textContent =
    `${controller.payload?.evaluation.system} / ${controller.payload?.evaluation.evaluator}` +
    ` (${controller.payload?.evaluation.mode})`;
  refreshGrids();
  refreshEditor();
}

async function commitBuffer(): Promise<void> {
  if (!controller) {
    return;
  }
  let result;
  try {
    result = await controller.commit();
  } catch (error) {
    // network failure: the buffer survives so OK can simply be retried
    window.alert(`Could not reach the server (${String(error)}); your edits are kept.`);
    return;
  }
  if (result.status === "conflict") {
    const keep = result.replayable.length;
    const message =
      `Someone else edited this evaluation (stale revision). ` +
      `${result.dropped.length} of your toggles are already in place; ` +
      `re-apply the remaining ${keep}?`;
    if (keep > 0 && window.confirm(message)) {
      await controller.replay(result.replayable);
    } else {
      controller.discard();
    }
  } else if (result.status === "rejected") {
    window.alert(`Change ${result.changeIndex + 1} rejected: ${result.message}`);
    return; // buffer retained so the user can adjust and retry
  }
  refreshGrids();
  refreshEditor();
}

function wireEvents(): void {
  document.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;

    const link = target.closest<HTMLElement>(".open-evaluation");
    if (link?.dataset.id) {
      event.preventDefault();
      void openEvaluation(link.dataset.id);
      return;
    }

    const cell = target.closest<HTMLElement>(".badge, .goto-micro");
    if (cell?.dataset.subAspect && cell.dataset.subFactor && controller) {
      event.preventDefault();
      try {
        controller.open(cell.dataset.subAspect, cell.dataset.subFactor);
      } catch (error) {
        window.alert(String(error));
        return;
      }
      refreshEditor();
      return;
    }

    if (target.closest(".ok-button")) {
      void commitBuffer();
      return;
    }
    if (target.closest(".cancel-button")) {
      controller?.discard();
      refreshEditor();
      return;
    }
  });

  document.addEventListener("change", (event) => {
    const target = event.target as HTMLElement;
    const buffer = controller?.buffer;
    if (!buffer) {
      return;
    }

    if (target.classList.contains("cell-toggle")) {
      const input = target as HTMLInputElement;
      buffer.toggleCell(
        input.dataset.aspectElement ?? "",
        input.dataset.factorElement ?? "",
      );
      return;
    }

    if (target.classList.contains("na-toggle")) {
      if (!buffer.na) {
        const cleared = buffer.marksClearedByNa();
        if (cleared.length > 0) {
          const listing = cleared
            .map((m) => `${m.aspectElement} / ${m.factorElement}`)
            .join("\n");
          if (!window.confirm(`Flagging N/A clears these marks:\n${listing}\nContinue?`)) {
            refreshEditor();
            return;
          }
        }
      }
      buffer.toggleNa();
      refreshEditor();
    }
  });

  $("#create-form").addEventListener("submit", (event) => {
    event.preventDefault();
    const form = event.target as HTMLFormElement;
    const data = new FormData(form);
    void api
      .createEvaluation({
        system: String(data.get("system") ?? ""),
        evaluator: String(data.get("evaluator") ?? ""),
        mode: String(data.get("mode") ?? "adaptability"),
      })
      .then(async (payload) => {
        await refreshList();
        await openEvaluation(payload.id);
      })
      .catch((error) => window.alert(String(error)));
  });

  $("#compare-form").addEventListener("submit", (event) => {
    event.preventDefault();
    const form = event.target as HTMLFormElement;
    const data = new FormData(form);
    const left = String(data.get("left") ?? "");
    const right = String(data.get("right") ?? "");
    void api
      .compare(left, right)
      .then((doc) => {
        $("#compare-view").innerHTML = renderCompareView(doc);
      })
      .catch((error) => window.alert(String(error)));
  });
}

wireEvents();
void refreshList();

// Exposed for exploratory debugging in the browser console.
declare global {
  interface Window {
    anameter: { api: ApiClient; controller: () => GridController | null };
  }
}
window.anameter = { api, controller: () => controller };
