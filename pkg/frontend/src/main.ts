/** App shell: fetches the label schema, mounts the three views behind a tab
 * bar, and routes number-key presses to the annotate view.
 */

import { ApiClient } from "./api";
import { mountBanner, showError } from "./banner";
import { clear, el } from "./dom";
import { AnnotateView } from "./views/annotate";
import { DashboardView } from "./views/dashboard";
import { ReviewView } from "./views/review";

export type TabName = "annotate" | "review" | "dashboard";

export interface App {
  switchTab(tab: TabName): Promise<void>;
  activeTab(): TabName;
  annotate: AnnotateView;
  review: ReviewView;
  dashboard: DashboardView;
}

export async function initApp(root: HTMLElement, api = new ApiClient()): Promise<App> {
  clear(root);
  mountBanner(root);

  let classes: string[] = [];
  try {
    classes = (await api.getSchema()).classes;
  } catch (err) {
    showError(`cannot reach annotation service: ${String(err)}`);
  }

  const annotate = new AnnotateView(api, classes);
  const review = new ReviewView(api, classes);
  const dashboard = new DashboardView(api);
  const views: Record<TabName, { render(c: HTMLElement): Promise<void> }> = {
    annotate,
    review,
    dashboard,
  };

  const nav = el("nav", { class: "tabs" });
  const content = el("main", { class: "content", "data-testid": "content" });
  let active: TabName = "annotate";

  async function switchTab(tab: TabName): Promise<void> {
    active = tab;
    for (const button of nav.querySelectorAll("button")) {
      button.classList.toggle("active", button.dataset.tab === tab);
    }
    await views[tab].render(content);
  }

  for (const tab of ["annotate", "review", "dashboard"] as const) {
    const button = el("button", { class: "tab", "data-tab": tab, "data-testid": `tab-${tab}` }, [
      tab,
    ]);
    button.addEventListener("click", () => void switchTab(tab));
    nav.append(button);
  }
  root.append(nav, content);

  // re-initializing (e.g. hot reload, tests) must not stack key handlers
  const doc = root.ownerDocument as Document & {
    __keyHandler?: (event: KeyboardEvent) => void;
  };
  if (doc.__keyHandler) doc.removeEventListener("keydown", doc.__keyHandler);
  doc.__keyHandler = (event: KeyboardEvent) => {
    if (active === "annotate" && /^[1-9]$/.test(event.key)) {
      annotate.handleKey(event.key);
    }
  };
  doc.addEventListener("keydown", doc.__keyHandler);

  await switchTab("annotate");
  return { switchTab, activeTab: () => active, annotate, review, dashboard };
}

// Browser entry point; tests call initApp directly instead.
const rootElement = document.getElementById("app");
if (rootElement) {
  void initApp(rootElement);
}
