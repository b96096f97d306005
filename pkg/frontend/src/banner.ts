/** Non-blocking error banner shown at the top of the app. */

import { el } from "./dom";

let container: HTMLElement | null = null;

export function mountBanner(parent: HTMLElement): void {
  container = el("div", { class: "banner-area", "data-testid": "banner-area" });
  parent.append(container);
}

export function showError(message: string): void {
  if (!container) return;
  const banner = el("div", { class: "banner banner-error", role: "alert" }, [
    message,
    el("button", { class: "banner-dismiss", "aria-label": "dismiss" }, ["×"]),
  ]);
  banner.querySelector("button")?.addEventListener("click", () => banner.remove());
  container.append(banner);
  setTimeout(() => banner.remove(), 8000);
}
