/** Shapes of the annotation service's JSON responses (see ../docs/api.md). */

export interface Schema {
  classes: string[];
}

export interface FragmentItem {
  fragment_id: string;
  text: string;
  predicted_label?: string;
  low_confidence?: boolean;
}

export interface FragmentPage {
  total: number;
  page: number;
  fragments: FragmentItem[];
}

export interface ClassMetrics {
  precision: number;
  recall: number;
  f1: number;
  support: number;
}

export interface MetricsReport {
  model: string;
  accuracy: number;
  per_class: Record<string, ClassMetrics>;
  macro: { precision: number; recall: number; f1: number };
  weighted: { precision: number; recall: number; f1: number };
}

export interface TrainJob {
  id: string;
  status: "queued" | "running" | "done" | "failed";
  model: string;
  metrics?: MetricsReport | null;
  error?: string;
}

export interface DistributionRow {
  action: string;
  count: number;
  proportion: number;
}

export interface GroupedReport {
  key: string;
  groups: { group: string; proportions: Record<string, number> }[];
}

export interface HoursRow {
  action: string;
  hours: number;
  hours_percent: number;
}

export interface HoursReport {
  rows: HoursRow[];
  excluded_hours: number;
  excluded_actions: string[];
  total_hours: number;
}
