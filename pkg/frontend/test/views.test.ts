import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { initApp, type App } from "../src/main";
import { CLASSES, FakeService } from "./fake-service";

let service: FakeService;
let root: HTMLElement;
let app: App;

async function settle(): Promise<void> {
  // drain queued microtasks from optimistic updates and refetches
  for (let i = 0; i < 10; i++) await Promise.resolve();
}

function text(testid: string): string {
  return root.querySelector(`[data-testid="${testid}"]`)?.textContent ?? "";
}

function pressKey(key: string): void {
  document.dispatchEvent(new KeyboardEvent("keydown", { key, bubbles: true }));
}

beforeEach(async () => {
  service = new FakeService(10);
  vi.stubGlobal("fetch", service.fetch);
  document.body.innerHTML = '<div id="app"></div>';
  root = document.getElementById("app")!;
  app = await initApp(root);
});

afterEach(() => vi.unstubAllGlobals());

describe("annotate view", () => {
  it("shows one fragment and the 8 schema-ordered label buttons", () => {
    expect(text("fragment-text")).toBe("fragment number 0");
    const buttons = [...root.querySelectorAll(".label-button")];
    expect(buttons.map((b) => b.getAttribute("data-label"))).toEqual(CLASSES);
    expect(buttons[0].querySelector("kbd")?.textContent).toBe("1");
  });

  it("clicking a label posts it and advances", async () => {
    (root.querySelector('[data-label="QualityChecks"]') as HTMLButtonElement).click();
    await settle();
    expect(service.labels.get("T-0:0:0")).toBe("QualityChecks");
    expect(text("fragment-text")).toBe("fragment number 1");
    expect(text("annotate-status")).toContain("9 unlabeled");
  });

  it("pressing key 5 submits the 5th schema class", async () => {
    pressKey("5");
    await settle();
    expect(service.labels.get("T-0:0:0")).toBe(CLASSES[4]);
    expect(CLASSES[4]).toBe("QualityChecks");
  });

  it("number keys only act on the annotate tab", async () => {
    await app.switchTab("dashboard");
    pressKey("3");
    await settle();
    expect(service.labels.size).toBe(0);
  });

  it("rolls back and shows a banner when the write fails", async () => {
    service.failNextWrite = true;
    pressKey("1");
    await settle();
    expect(service.labels.size).toBe(0);
    expect(text("fragment-text")).toBe("fragment number 0");
    expect(text("annotate-status")).toContain("10 unlabeled");
    expect(root.querySelector(".banner-error")).not.toBeNull();
  });

  it("shows the empty state after the queue drains", async () => {
    for (let i = 0; i < 10; i++) {
      pressKey("1");
      await settle();
    }
    expect(text("annotate-empty")).toContain("Nothing left");
    expect(service.labels.size).toBe(10);
  });
});

describe("review view", () => {
  beforeEach(async () => {
    service.predictions.set("T-1:0:0", { label: "DataTransformation", low_confidence: false });
    service.predictions.set("T-2:0:0", { label: "QualityChecks", low_confidence: true });
    await app.switchTab("review");
  });

  it("shows the prediction and flags low confidence", async () => {
    expect(text("predicted-label")).toContain("DataTransformation");
    (root.querySelector('[data-testid="confirm"]') as HTMLButtonElement).click();
    await settle();
    expect(text("predicted-label")).toContain("low confidence");
  });

  it("confirm adopts the predicted label and decrements the queue", async () => {
    expect(text("review-status")).toContain("2 awaiting");
    (root.querySelector('[data-testid="confirm"]') as HTMLButtonElement).click();
    await settle();
    expect(service.labels.get("T-1:0:0")).toBe("DataTransformation");
    expect(text("review-status")).toContain("1 awaiting");
    expect(text("review-status")).toContain("1 reviewed");
  });

  it("correct offers the schema classes and records the corrected label", async () => {
    (root.querySelector('[data-testid="correct"]') as HTMLButtonElement).click();
    const buttons = [...root.querySelectorAll('[data-testid="correct-buttons"] .label-button')];
    expect(buttons.map((b) => b.getAttribute("data-label"))).toEqual(CLASSES);
    (buttons.find((b) => b.getAttribute("data-label") === "Metadata") as HTMLButtonElement).click();
    await settle();
    expect(service.labels.get("T-1:0:0")).toBe("Metadata");
    expect(service.reviews[0]).toEqual({
      fragment_id: "T-1:0:0",
      decision: "correct",
      label: "Metadata",
    });
  });

  it("rolls back a failed review", async () => {
    service.failNextWrite = true;
    (root.querySelector('[data-testid="confirm"]') as HTMLButtonElement).click();
    await settle();
    expect(text("review-status")).toContain("2 awaiting");
    expect(root.querySelector(".banner-error")).not.toBeNull();
  });
});

describe("dashboard view", () => {
  it("shows the no-model state and the label distribution from the service", async () => {
    service.labels.set("T-0:0:0", "QualityChecks");
    service.labels.set("T-1:0:0", "QualityChecks");
    service.labels.set("T-2:0:0", "Other");
    await app.switchTab("dashboard");
    expect(text("metrics")).toContain("No trained model yet");
    const distribution = text("distribution");
    expect(distribution).toContain("QualityChecks");
    expect(distribution).toContain("2 (66.7%)");
    expect(distribution).toContain("1 (33.3%)");
  });
});
