/** Dashboard: latest metrics, label distribution, grouped proportions, and
 * the train-job trigger. Every number shown comes from a service response.
 */

import { ApiClient, ApiError } from "../api";
import { showError } from "../banner";
import { barChart, clear, el } from "../dom";

export class DashboardView {
  private container: HTMLElement | null = null;
  private groupKey: "level" | "archive" | "year" = "level";
  private jobStatus = "";

  constructor(private readonly api: ApiClient) {}

  async render(container: HTMLElement): Promise<void> {
    this.container = container;
    await this.paint();
  }

  async startTraining(model = "cnb"): Promise<void> {
    try {
      this.jobStatus = "training…";
      await this.paint();
      const { job_id } = await this.api.startTraining(model);
      const job = await this.api.waitForJob(job_id);
      this.jobStatus = job.status === "done" ? "training complete" : `failed: ${job.error}`;
    } catch (err) {
      this.jobStatus = "";
      const detail = err instanceof ApiError && err.detail ? ` — ${String(err.detail)}` : "";
      showError(`training not started: ${String(err)}${detail}`);
    }
    await this.paint();
  }

  private async paint(): Promise<void> {
    if (!this.container) return;
    clear(this.container);
    const trainButton = el("button", { class: "train", "data-testid": "train" }, [
      "Train model",
    ]);
    trainButton.addEventListener("click", () => void this.startTraining());
    this.container.append(
      el("div", { class: "train-row" }, [
        trainButton,
        el("span", { class: "job-status", "data-testid": "job-status" }, [this.jobStatus]),
      ]),
    );
    await Promise.all([this.paintMetrics(), this.paintDistribution(), this.paintGrouped()]);
  }

  private async paintMetrics(): Promise<void> {
    const section = el("section", { class: "metrics", "data-testid": "metrics" });
    this.container?.append(section);
    try {
      const m = await this.api.getLatestMetrics();
      section.append(
        el("h2", {}, [`Latest model: ${m.model}`]),
        el("p", { "data-testid": "accuracy" }, [`Accuracy ${m.accuracy.toFixed(3)}`]),
        el("p", {}, [
          `Macro F1 ${m.macro.f1.toFixed(3)} · Weighted F1 ${m.weighted.f1.toFixed(3)}`,
        ]),
        el(
          "table",
          { class: "per-class" },
          [
            el("thead", {}, [
              el("tr", {}, ["class", "precision", "recall", "f1", "support"].map(
                (h) => el("th", {}, [h]),
              )),
            ]),
            el(
              "tbody",
              {},
              Object.entries(m.per_class).map(([cls, cm]) =>
                el("tr", {}, [
                  el("td", {}, [cls]),
                  el("td", {}, [cm.precision.toFixed(3)]),
                  el("td", {}, [cm.recall.toFixed(3)]),
                  el("td", {}, [cm.f1.toFixed(3)]),
                  el("td", {}, [String(cm.support)]),
                ]),
              ),
            ),
          ],
        ),
      );
    } catch (err) {
      if (err instanceof ApiError && err.status === 404) {
        section.append(el("p", { class: "empty" }, ["No trained model yet."]));
      } else {
        showError(`metrics unavailable: ${String(err)}`);
      }
    }
  }

  private async paintDistribution(): Promise<void> {
    const section = el("section", { class: "distribution", "data-testid": "distribution" });
    this.container?.append(section);
    try {
      const { rows } = await this.api.getLabelDistribution();
      section.append(
        el("h2", {}, ["Label distribution"]),
        barChart(
          rows.map((r) => ({
            label: r.action,
            value: r.count,
            display: `${r.count} (${(r.proportion * 100).toFixed(1)}%)`,
          })),
        ),
      );
    } catch (err) {
      showError(`label distribution unavailable: ${String(err)}`);
    }
  }

  private async paintGrouped(): Promise<void> {
    const section = el("section", { class: "grouped", "data-testid": "grouped" });
    this.container?.append(section);
    const select = el("select", { "data-testid": "group-key" }, []);
    for (const key of ["level", "archive", "year"] as const) {
      const option = el("option", { value: key }, [key]);
      if (key === this.groupKey) option.selected = true;
      select.append(option);
    }
    select.addEventListener("change", () => {
      this.groupKey = select.value as "level" | "archive" | "year";
      void this.paint();
    });
    section.append(el("h2", {}, ["Action mix by "]), select);
    try {
      const report = await this.api.getGroupedReport(this.groupKey);
      for (const group of report.groups) {
        section.append(
          el("h3", {}, [group.group]),
          barChart(
            Object.entries(group.proportions).map(([action, p]) => ({
              label: action,
              value: p,
              display: `${(p * 100).toFixed(1)}%`,
            })),
          ),
        );
      }
    } catch (err) {
      if (err instanceof ApiError && (err.status === 404 || err.status === 409)) {
        section.append(el("p", { class: "empty" }, ["Train a model to see this chart."]));
      } else {
        showError(`grouped report unavailable: ${String(err)}`);
      }
    }
  }
}
