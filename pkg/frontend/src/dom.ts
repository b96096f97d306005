/** Tiny DOM helpers; no framework, no innerHTML with user data. */

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  children: (Node | string)[] = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (key === "class") node.className = value;
    else node.setAttribute(key, value);
  }
  for (const child of children) {
    node.append(child);
  }
  return node;
}

export function clear(node: HTMLElement): void {
  while (node.firstChild) node.removeChild(node.firstChild);
}

/** Horizontal bar chart from labeled values; values are rendered verbatim. */
export function barChart(
  rows: { label: string; value: number; display: string }[],
  className = "chart",
): HTMLElement {
  const max = Math.max(...rows.map((r) => r.value), 1e-12);
  return el(
    "div",
    { class: className },
    rows.map((row) =>
      el("div", { class: "chart-row" }, [
        el("span", { class: "chart-label" }, [row.label]),
        el("div", { class: "chart-track" }, [
          el("div", {
            class: "chart-bar",
            style: `width:${((row.value / max) * 100).toFixed(1)}%`,
          }),
        ]),
        el("span", { class: "chart-value" }, [row.display]),
      ]),
    ),
  );
}
