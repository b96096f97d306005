/** Review queue over model predictions: confirm or correct, one at a time. */

import type { ApiClient } from "../api";
import { showError } from "../banner";
import { clear, el } from "../dom";
import type { FragmentItem } from "../types";

export class ReviewView {
  private queue: FragmentItem[] = [];
  private total = 0;
  private reviewed = 0;
  private correcting = false;
  private container: HTMLElement | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly classes: string[],
    private readonly reviewer = "",
  ) {}

  async render(container: HTMLElement): Promise<void> {
    this.container = container;
    this.correcting = false;
    await this.refill();
    this.paint();
  }

  private async refill(): Promise<void> {
    try {
      const page = await this.api.getFragments("predicted", 0, 20);
      this.queue = page.fragments;
      this.total = page.total;
    } catch (err) {
      showError(`could not load predictions: ${String(err)}`);
      this.queue = [];
      this.total = 0;
    }
  }

  async confirm(): Promise<void> {
    const fragment = this.queue[0];
    if (!fragment) return;
    await this.resolve(fragment, () =>
      this.api.confirmPrediction(fragment.fragment_id, this.reviewer),
    );
  }

  async correct(label: string): Promise<void> {
    const fragment = this.queue[0];
    if (!fragment) return;
    await this.resolve(fragment, () =>
      this.api.correctPrediction(fragment.fragment_id, label, this.reviewer),
    );
  }

  private async resolve(
    fragment: FragmentItem,
    call: () => Promise<unknown>,
  ): Promise<void> {
    this.queue = this.queue.slice(1);
    this.total -= 1;
    this.reviewed += 1;
    this.correcting = false;
    this.paint();
    try {
      await call();
      if (this.queue.length === 0 && this.total > 0) {
        await this.refill();
        this.paint();
      }
    } catch (err) {
      this.queue = [fragment, ...this.queue];
      this.total += 1;
      this.reviewed -= 1;
      this.paint();
      showError(`review not saved: ${String(err)}`);
    }
  }

  private paint(): void {
    if (!this.container) return;
    clear(this.container);
    const fragment = this.queue[0];
    this.container.append(
      el("p", { class: "queue-status", "data-testid": "review-status" }, [
        `${this.total} awaiting review · ${this.reviewed} reviewed this session`,
      ]),
    );
    if (!fragment) {
      this.container.append(
        el("p", { class: "empty", "data-testid": "review-empty" }, [
          "No predictions to review. Train a model first.",
        ]),
      );
      return;
    }
    this.container.append(
      el("blockquote", { class: "fragment-text", "data-testid": "fragment-text" }, [
        fragment.text,
      ]),
      el("p", { class: "prediction", "data-testid": "predicted-label" }, [
        "Predicted: ",
        el("strong", {}, [fragment.predicted_label ?? "?"]),
        fragment.low_confidence ? el("em", { class: "low-conf" }, [" (low confidence)"]) : "",
      ]),
    );
    if (this.correcting) {
      this.container.append(
        el(
          "div",
          { class: "label-buttons", "data-testid": "correct-buttons" },
          this.classes.map((cls) => {
            const button = el("button", { class: "label-button", "data-label": cls }, [cls]);
            button.addEventListener("click", () => void this.correct(cls));
            return button;
          }),
        ),
      );
    } else {
      const confirmButton = el("button", { class: "confirm", "data-testid": "confirm" }, [
        "Confirm",
      ]);
      confirmButton.addEventListener("click", () => void this.confirm());
      const correctButton = el("button", { class: "correct", "data-testid": "correct" }, [
        "Correct…",
      ]);
      correctButton.addEventListener("click", () => {
        this.correcting = true;
        this.paint();
      });
      this.container.append(el("div", { class: "review-actions" }, [confirmButton, correctButton]));
    }
  }
}
