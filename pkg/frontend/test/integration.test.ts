// End-to-end: the UI's controller and renderers driving the real evaluation
// server over HTTP, exactly as the DOM event handlers would.

import { type ChildProcess, execFile, spawn } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { promisify } from "node:util";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { renderCompareView, renderEditGrid, renderMainGrid } from "../src/render.js";
import { GridController } from "../src/state.js";

const execFileAsync = promisify(execFile);

const PORT = 8765 + Math.floor(Math.random() * 1000);
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;
let dataDir: string;
const api = new ApiClient(BASE);

async function waitForServer(): Promise<void> {
  const deadline = Date.now() + 20_000;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${BASE}/api/taxonomies`);
      if (response.ok) {
        return;
      }
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
  throw new Error("evaluation server did not come up in time");
}

beforeAll(async () => {
  dataDir = mkdtempSync(join(tmpdir(), "anameter-ui-"));
  server = spawn(
    "python3",
    ["-m", "anameter.cli", "serve", "--port", String(PORT), "--data-dir", dataDir],
    { stdio: "ignore" },
  );
  await waitForServer();
});

afterAll(() => {
  server?.kill();
});

describe("grid editing against the live server", () => {
  it("two checks on the myopia row: badge reads 2 and GA matches the CLI", async () => {
    const created = await api.createEvaluation({
      system: "GPS-Nav",
      evaluator: "alice",
      mode: "adaptability",
    });

    const controller = new GridController(api, created.id);
    await controller.load();

    // the evaluator opens the perceptual/motor micro-grid and checks two
    // boxes in the myopia row, then presses OK
    const buffer = controller.open("presentation-aspects", "perceptual-motor");
    buffer.toggleCell("text-type-language-colour-size", "myopia");
    buffer.toggleCell("background-type-colour-brightness", "myopia");
    const result = await controller.commit();

    expect(result.status).toBe("ok");
    expect(controller.microDegree("presentation-aspects", "perceptual-motor")).toBe(2);

    // the badge in the freshly rendered edit grid shows the new degree
    const editHtml = renderEditGrid(controller.taxonomy!, controller.report!);
    const badge = new RegExp(
      'data-sub-aspect="presentation-aspects"\\s+data-sub-factor="perceptual-motor">2</',
    );
    expect(editHtml).toMatch(badge);

    // the displayed GA equals scoring the persisted file with the CLI
    const evaluationPath = join(dataDir, `${created.id}.json`);
    const { stdout } = await execFileAsync("python3", [
      "-m", "anameter.cli", "score", evaluationPath, "--format", "json",
    ]);
    const cliReport = JSON.parse(stdout);
    expect(controller.displayedGa()).toBe(cliReport.rounded.global_percent);

    // and the main heatmap carries it in the corner
    const mainHtml = renderMainGrid(controller.report!);
    expect(mainHtml).toContain(
      `GA = ${cliReport.rounded.global_percent.toFixed(2)} %`,
    );
  });

  it("self-compare renders all-zero deltas", async () => {
    const created = await api.createEvaluation({
      system: "GPS-Nav",
      evaluator: "selfcheck",
      mode: "adaptability",
    });
    const doc = await api.compare(created.id, created.id);
    expect(doc.identical).toBe(true);
    const html = renderCompareView(doc);
    expect(html).toContain("No differences.");
    expect(html).toContain("GA delta: <strong>0.00</strong>");
  });

  it("a stale revision yields a conflict with a replayable remainder", async () => {
    const created = await api.createEvaluation({
      system: "GPS-Nav",
      evaluator: "bob",
      mode: "adaptability",
    });

    const controller = new GridController(api, created.id);
    await controller.load();
    const buffer = controller.open("presentation-aspects", "perceptual-motor");
    buffer.toggleCell("text-type-language-colour-size", "myopia");
    buffer.toggleCell("background-type-colour-brightness", "myopia");

    // someone else lands the text-size mark first, bumping the revision
    await api.patchMarks(created.id, 0, [{
      kind: "mark",
      sub_aspect: "presentation-aspects",
      sub_factor: "perceptual-motor",
      aspect_element: "text-type-language-colour-size",
      factor_element: "myopia",
      checked: true,
    }]);

    const result = await controller.commit();
    expect(result.status).toBe("conflict");
    if (result.status !== "conflict") {
      return;
    }
    expect(result.replayable).toHaveLength(1);
    expect(result.replayable[0]).toMatchObject({
      aspect_element: "background-type-colour-brightness",
    });

    // the user confirms; the remainder replays cleanly
    const replayed = await controller.replay(result.replayable);
    expect(replayed.status).toBe("ok");
    expect(controller.microDegree("presentation-aspects", "perceptual-motor")).toBe(2);
  });
});
