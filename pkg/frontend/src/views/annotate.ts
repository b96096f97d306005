/** One-fragment-at-a-time labeling with keyboard shortcuts 1-8.
 *
 * Label values and their order come from GET /schema; key N maps to the Nth
 * schema class. Submissions are optimistic: the UI advances immediately and
 * re-queues the fragment if the POST fails.
 */

import type { ApiClient } from "../api";
import { showError } from "../banner";
import { clear, el } from "../dom";
import type { FragmentItem } from "../types";

export class AnnotateView {
  private queue: FragmentItem[] = [];
  private total = 0;
  private labeled = 0;
  private container: HTMLElement | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly classes: string[],
    private readonly annotator = "",
  ) {}

  async render(container: HTMLElement): Promise<void> {
    this.container = container;
    await this.refill();
    this.paint();
  }

  private async refill(): Promise<void> {
    try {
      const page = await this.api.getFragments("unlabeled", 0, 20);
      this.queue = page.fragments;
      this.total = page.total;
    } catch (err) {
      showError(`could not load fragments: ${String(err)}`);
      this.queue = [];
      this.total = 0;
    }
  }

  /** Key handler for the app-level keydown listener. */
  handleKey(key: string): void {
    const index = Number.parseInt(key, 10) - 1;
    if (Number.isInteger(index) && index >= 0 && index < this.classes.length) {
      void this.submit(this.classes[index]);
    }
  }

  async submit(label: string): Promise<void> {
    const fragment = this.queue[0];
    if (!fragment) return;
    // optimistic: advance now, roll back on failure
    this.queue = this.queue.slice(1);
    this.total -= 1;
    this.labeled += 1;
    this.paint();
    try {
      await this.api.submitLabel(fragment.fragment_id, label, this.annotator);
      if (this.queue.length === 0 && this.total > 0) {
        await this.refill();
        this.paint();
      }
    } catch (err) {
      this.queue = [fragment, ...this.queue];
      this.total += 1;
      this.labeled -= 1;
      this.paint();
      showError(`label not saved: ${String(err)}`);
    }
  }

  private paint(): void {
    if (!this.container) return;
    clear(this.container);
    const fragment = this.queue[0];
    this.container.append(
      el("p", { class: "queue-status", "data-testid": "annotate-status" }, [
        `${this.total} unlabeled · ${this.labeled} labeled this session`,
      ]),
    );
    if (!fragment) {
      this.container.append(
        el("p", { class: "empty", "data-testid": "annotate-empty" }, [
          "Nothing left to annotate.",
        ]),
      );
      return;
    }
    this.container.append(
      el("blockquote", { class: "fragment-text", "data-testid": "fragment-text" }, [
        fragment.text,
      ]),
      el(
        "div",
        { class: "label-buttons", "data-testid": "label-buttons" },
        this.classes.map((cls, i) => {
          const button = el("button", { class: "label-button", "data-label": cls }, [
            el("kbd", {}, [String(i + 1)]),
            ` ${cls}`,
          ]);
          button.addEventListener("click", () => void this.submit(cls));
          return button;
        }),
      ),
    );
  }
}
