import { describe, expect, it } from "vitest";

import { ApiClient, ApiRequestError } from "../src/api.js";
import { GridController, MicroGridBuffer } from "../src/state.js";
import type { EvaluationPayload, PatchChange } from "../src/types.js";
import { tinyEvaluation, tinyReport, tinyTaxonomy } from "./fixtures.js";

function payloadWith(marks: { aspect_element: string; factor_element: string }[],
                     revision = 0): EvaluationPayload {
  return {
    id: "gps-nav--alice--adaptability",
    revision,
    evaluation: tinyEvaluation({
      micro_grids: marks.length
        ? [{ sub_aspect: "looks", sub_factor: "abilities", na: false, marks }]
        : [],
    }),
    report: tinyReport(),
  };
}

interface FakeCall {
  revision: number;
  changes: PatchChange[];
}

class FakeApi {
  calls: FakeCall[] = [];
  payload: EvaluationPayload;
  patchResult: (() => EvaluationPayload) | (() => never);

  constructor(payload: EvaluationPayload) {
    this.payload = payload;
    this.patchResult = () => this.payload;
  }

  async getEvaluation(): Promise<EvaluationPayload> {
    return this.payload;
  }

  async getTaxonomy() {
    return tinyTaxonomy();
  }

  async patchMarks(_id: string, revision: number, changes: PatchChange[]) {
    this.calls.push({ revision, changes });
    return this.patchResult();
  }

  asClient(): ApiClient {
    return this as unknown as ApiClient;
  }
}

describe("MicroGridBuffer", () => {
  it("diffs buffered toggles against the server baseline", () => {
    const buffer = new MicroGridBuffer("looks", "abilities", {
      sub_aspect: "looks",
      sub_factor: "abilities",
      na: false,
      marks: [{ aspect_element: "text-size", factor_element: "myopia" }],
    });
    buffer.toggleCell("background", "myopia"); // new mark
    buffer.toggleCell("text-size", "myopia");  // uncheck existing
    buffer.toggleCell("text-size", "myopia");  // re-check: back to baseline
    expect(buffer.buildChanges()).toEqual([
      {
        kind: "mark",
        sub_aspect: "looks",
        sub_factor: "abilities",
        aspect_element: "background",
        factor_element: "myopia",
        checked: true,
      },
    ]);
  });

  it("collapses an untouched buffer to no changes", () => {
    const buffer = new MicroGridBuffer("looks", "abilities", undefined);
    buffer.toggleCell("text-size", "myopia");
    buffer.toggleCell("text-size", "myopia");
    expect(buffer.buildChanges()).toEqual([]);
    expect(buffer.dirty).toBe(false);
  });

  it("sends a single NA change when flagging N/A", () => {
    const buffer = new MicroGridBuffer("looks", "abilities", {
      sub_aspect: "looks",
      sub_factor: "abilities",
      na: false,
      marks: [{ aspect_element: "text-size", factor_element: "myopia" }],
    });
    expect(buffer.marksClearedByNa()).toEqual([
      { aspectElement: "text-size", factorElement: "myopia" },
    ]);
    buffer.toggleNa();
    expect(buffer.buildChanges()).toEqual([
      { kind: "na", sub_aspect: "looks", sub_factor: "abilities", na: true },
    ]);
  });

  it("clears NA before applying marks on an NA baseline", () => {
    const buffer = new MicroGridBuffer("looks", "abilities", {
      sub_aspect: "looks",
      sub_factor: "abilities",
      na: true,
      marks: [],
    });
    expect(() => buffer.toggleCell("text-size", "myopia")).toThrow(/N\/A/);
    buffer.toggleNa();
    buffer.toggleCell("text-size", "myopia");
    const changes = buffer.buildChanges();
    expect(changes[0]).toEqual({
      kind: "na", sub_aspect: "looks", sub_factor: "abilities", na: false,
    });
    expect(changes[1]).toMatchObject({ kind: "mark", checked: true });
  });

  it("rebase keeps only still-effective toggles", () => {
    const buffer = new MicroGridBuffer("looks", "abilities", undefined);
    buffer.toggleCell("text-size", "myopia");
    buffer.toggleCell("background", "myopia");
    // someone else already checked text-size; only background remains
    const { replayable, dropped } = buffer.rebase({
      sub_aspect: "looks",
      sub_factor: "abilities",
      na: false,
      marks: [{ aspect_element: "text-size", factor_element: "myopia" }],
    });
    expect(replayable).toHaveLength(1);
    expect(replayable[0]).toMatchObject({ aspect_element: "background" });
    expect(dropped).toHaveLength(1);
    expect(dropped[0]).toMatchObject({ aspect_element: "text-size" });
  });
});

describe("GridController", () => {
  it("reports degrees only from the server report", async () => {
    const api = new FakeApi(payloadWith([]));
    const controller = new GridController(api.asClient(), "gps-nav--alice--adaptability");
    await controller.load();
    expect(controller.microDegree("looks", "abilities")).toBe(2);
    expect(controller.displayedGa()).toBe(66.67);
  });

  it("refuses to switch micro-grids with a dirty buffer", async () => {
    const api = new FakeApi(payloadWith([]));
    const controller = new GridController(api.asClient(), "id");
    await controller.load();
    controller.open("looks", "abilities").toggleCell("text-size", "myopia");
    expect(() => controller.open("looks", "abilities")).toThrow(/commit or discard/);
    controller.discard();
    expect(() => controller.open("looks", "abilities")).not.toThrow();
  });

  it("commits the buffer as one patch and adopts the response", async () => {
    const api = new FakeApi(payloadWith([]));
    const controller = new GridController(api.asClient(), "id");
    await controller.load();
    const buffer = controller.open("looks", "abilities");
    buffer.toggleCell("text-size", "myopia");
    buffer.toggleCell("background", "myopia");
    api.payload = payloadWith(
      [
        { aspect_element: "text-size", factor_element: "myopia" },
        { aspect_element: "background", factor_element: "myopia" },
      ],
      1,
    );
    const result = await controller.commit();
    expect(result).toEqual({ status: "ok", degree: 2 });
    expect(api.calls).toHaveLength(1);
    expect(api.calls[0].revision).toBe(0);
    expect(api.calls[0].changes).toHaveLength(2);
    expect(controller.revision).toBe(1);
    expect(controller.buffer).toBeNull();
  });

  it("does not call the server for an empty commit", async () => {
    const api = new FakeApi(payloadWith([]));
    const controller = new GridController(api.asClient(), "id");
    await controller.load();
    controller.open("looks", "abilities");
    const result = await controller.commit();
    expect(result).toEqual({ status: "clean" });
    expect(api.calls).toHaveLength(0);
  });

  it("surfaces conflicts with the replayable remainder", async () => {
    const api = new FakeApi(payloadWith([]));
    const controller = new GridController(api.asClient(), "id");
    await controller.load();
    const buffer = controller.open("looks", "abilities");
    buffer.toggleCell("text-size", "myopia");
    buffer.toggleCell("background", "myopia");

    api.patchResult = () => {
      throw new ApiRequestError(409, {
        code: "stale_revision",
        message: "expected revision 1, got 0",
        path: "/api/evaluations/id/marks",
      });
    };
    // the refetch shows text-size already checked by someone else
    api.payload = payloadWith(
      [{ aspect_element: "text-size", factor_element: "myopia" }],
      1,
    );
    const result = await controller.commit();
    expect(result.status).toBe("conflict");
    if (result.status === "conflict") {
      expect(result.replayable).toHaveLength(1);
      expect(result.replayable[0]).toMatchObject({ aspect_element: "background" });
    }
    expect(controller.revision).toBe(1); // refetched

    api.patchResult = () => api.payload;
    api.payload = payloadWith(
      [
        { aspect_element: "text-size", factor_element: "myopia" },
        { aspect_element: "background", factor_element: "myopia" },
      ],
      2,
    );
    if (result.status === "conflict") {
      const replayed = await controller.replay(result.replayable);
      expect(replayed.status).toBe("ok");
    }
    expect(api.calls.at(-1)?.revision).toBe(1);
  });

  it("maps 422 responses to the offending change index", async () => {
    const api = new FakeApi(payloadWith([]));
    const controller = new GridController(api.asClient(), "id");
    await controller.load();
    const buffer = controller.open("looks", "abilities");
    buffer.toggleCell("text-size", "myopia");
    api.patchResult = () => {
      throw new ApiRequestError(422, {
        code: "invariant_violation",
        message: "micro-grid is flagged N/A",
        path: "/api/evaluations/id/marks/changes/0",
      });
    };
    const result = await controller.commit();
    expect(result).toEqual({
      status: "rejected",
      changeIndex: 0,
      message: "micro-grid is flagged N/A",
    });
    // buffer is retained so the user can adjust and retry
    expect(controller.buffer).not.toBeNull();
  });
});
