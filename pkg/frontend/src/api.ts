/** Thin typed client over the annotation service HTTP API.
 *
 * Every view goes through this module; nothing in the UI computes metrics or
 * invents label values — all of that comes from the service.
 */

import type {
  DistributionRow,
  FragmentPage,
  GroupedReport,
  HoursReport,
  MetricsReport,
  Schema,
  TrainJob,
} from "./types";

export class ApiError extends Error {
  constructor(
    message: string,
    public readonly status: number,
    public readonly detail: unknown = null,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function request<T>(base: string, path: string, init?: RequestInit): Promise<T> {
  let response: Response;
  try {
    response = await fetch(base + path, init);
  } catch (err) {
    throw new ApiError(`service unreachable: ${String(err)}`, 0);
  }
  let body: unknown = null;
  const text = await response.text();
  if (text) {
    try {
      body = JSON.parse(text);
    } catch {
      body = text;
    }
  }
  if (!response.ok) {
    const detail = (body as { detail?: unknown } | null)?.detail ?? body;
    throw new ApiError(`${response.status} on ${path}`, response.status, detail);
  }
  return body as T;
}

export class ApiClient {
  constructor(private readonly base: string = "") {}

  getSchema(): Promise<Schema> {
    return request(this.base, "/schema");
  }

  getFragments(
    status: "unlabeled" | "predicted",
    page = 0,
    pageSize = 20,
  ): Promise<FragmentPage> {
    return request(
      this.base,
      `/fragments?status=${status}&page=${page}&page_size=${pageSize}`,
    );
  }

  submitLabel(fragmentId: string, label: string, annotator = ""): Promise<unknown> {
    return request(this.base, "/labels", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ fragment_id: fragmentId, label, annotator }),
    });
  }

  confirmPrediction(fragmentId: string, reviewer = ""): Promise<{ label: string }> {
    return request(this.base, "/reviews", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ fragment_id: fragmentId, decision: "confirm", reviewer }),
    });
  }

  correctPrediction(
    fragmentId: string,
    correctedLabel: string,
    reviewer = "",
  ): Promise<{ label: string }> {
    return request(this.base, "/reviews", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({
        fragment_id: fragmentId,
        decision: "correct",
        corrected_label: correctedLabel,
        reviewer,
      }),
    });
  }

  startTraining(model = "cnb", seed = 0): Promise<{ job_id: string }> {
    return request(this.base, "/jobs/train", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ model, seed }),
    });
  }

  getJob(jobId: string): Promise<TrainJob> {
    return request(this.base, `/jobs/${jobId}`);
  }

  /** Poll a training job until it leaves the queue. */
  async waitForJob(jobId: string, intervalMs = 250, timeoutMs = 60_000): Promise<TrainJob> {
    const deadline = Date.now() + timeoutMs;
    for (;;) {
      const job = await this.getJob(jobId);
      if (job.status === "done" || job.status === "failed") return job;
      if (Date.now() > deadline) throw new ApiError(`job ${jobId} timed out`, 0);
      await new Promise((resolve) => setTimeout(resolve, intervalMs));
    }
  }

  getLatestMetrics(): Promise<MetricsReport> {
    return request(this.base, "/metrics/latest");
  }

  getLabelDistribution(): Promise<{ rows: DistributionRow[] }> {
    return request(this.base, "/reports/fig2");
  }

  getHoursReport(): Promise<HoursReport> {
    return request(this.base, "/reports/table4");
  }

  getGroupedReport(groupKey: "level" | "archive" | "year"): Promise<GroupedReport> {
    return request(this.base, `/reports/fig4?group_key=${groupKey}`);
  }
}
