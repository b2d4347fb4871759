import { ApiClient } from "./api";
import { Dashboard } from "./controller";
import { fromQuery, toQuery } from "./filterState";
import { renderAll } from "./panels";
import { TOPIC_LABELS } from "./types";

const API_BASE = import.meta.env?.VITE_API_BASE ?? "http://127.0.0.1:8300";

function syncUrl(query: string): void {
  const url = query ? `?${query}` : location.pathname;
  history.replaceState(null, "", url);
}

export function boot(doc: Document): Dashboard {
  const api = new ApiClient(API_BASE);
  const dashboard = new Dashboard(api, (view) => {
    renderAll(doc, view);
    syncUrl(toQuery(view.state));
    renderActiveFilters(doc, dashboard);
  });

  const topicsBox = doc.querySelector<HTMLElement>("#filter-topics");
  if (topicsBox) {
    topicsBox.innerHTML = TOPIC_LABELS.map(
      (t) => `<label><input type="checkbox" value="${t}"> ${t}</label>`,
    ).join("");
    topicsBox.addEventListener("change", (event) => {
      const input = event.target as HTMLInputElement;
      dashboard.apply({ kind: input.checked ? "add-topic" : "remove-topic", topic: input.value });
    });
  }

  const mediumSelect = doc.querySelector<HTMLSelectElement>("#filter-medium");
  mediumSelect?.addEventListener("change", () => {
    if (mediumSelect.value) {
      dashboard.apply({ kind: "add-medium", handle: mediumSelect.value });
      mediumSelect.value = "";
    }
  });

  const dateApply = doc.querySelector<HTMLButtonElement>("#filter-dates-apply");
  dateApply?.addEventListener("click", () => {
    const start = doc.querySelector<HTMLInputElement>("#filter-date-start")?.value || null;
    const end = doc.querySelector<HTMLInputElement>("#filter-date-end")?.value || null;
    dashboard.apply({ kind: "set-dates", start, end });
  });

  const termsForm = doc.querySelector<HTMLFormElement>("#filter-terms-form");
  termsForm?.addEventListener("submit", (event) => {
    event.preventDefault();
    const raw = doc.querySelector<HTMLInputElement>("#filter-terms")?.value ?? "";
    dashboard.apply({ kind: "set-terms", terms: raw.split(/\s+/).filter(Boolean) });
  });

  const clear = doc.querySelector<HTMLButtonElement>("#filter-clear");
  clear?.addEventListener("click", () => {
    dashboard.apply({ kind: "clear-all" });
    doc.querySelectorAll<HTMLInputElement>("#filter-topics input").forEach((i) => (i.checked = false));
  });

  const news = doc.querySelector<HTMLElement>("#panel-news");
  news?.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    if (target.matches("[data-page-prev]")) void dashboard.setPage(dashboard.view.page - 1);
    if (target.matches("[data-page-next]")) void dashboard.setPage(dashboard.view.page + 1);
  });

  const map = doc.querySelector<HTMLElement>("#panel-map");
  map?.addEventListener("click", (event) => {
    const marker = (event.target as HTMLElement).closest<HTMLElement>(".marker");
    if (marker) {
      dashboard.apply({ kind: "set-locality", geonameId: Number(marker.dataset.geonameId) });
    }
  });

  void dashboard.start(fromQuery(location.search)).then(() => {
    const select = doc.querySelector<HTMLSelectElement>("#filter-medium");
    if (select && dashboard.view.roster.length > 0) {
      select.innerHTML =
        `<option value="">filtrar por medio…</option>` +
        dashboard.view.roster
          .map((p) => `<option value="${p.handle}">${p.name}</option>`)
          .join("");
    }
  });
  return dashboard;
}

function renderActiveFilters(doc: Document, dashboard: Dashboard): void {
  const box = doc.querySelector<HTMLElement>("#active-filters");
  if (!box) return;
  const state = dashboard.view.state;
  const chips: string[] = [];
  for (const handle of state.media) chips.push(chip("medio", handle, `remove-medium:${handle}`));
  for (const topic of state.topics) chips.push(chip("tema", topic, `remove-topic:${topic}`));
  if (state.dateStart || state.dateEnd) {
    chips.push(chip("fechas", `${state.dateStart ?? "…"} → ${state.dateEnd ?? "…"}`, "clear-dates"));
  }
  if (state.terms.length) chips.push(chip("texto", state.terms.join(" "), "clear-terms"));
  if (state.geonameId !== null) chips.push(chip("lugar", String(state.geonameId), "clear-locality"));
  box.innerHTML = chips.join("") || `<span class="placeholder">sin filtros</span>`;
  box.querySelectorAll<HTMLElement>("[data-action]").forEach((el) =>
    el.addEventListener("click", () => {
      const action = el.dataset.action!;
      if (action.startsWith("remove-medium:")) {
        dashboard.apply({ kind: "remove-medium", handle: action.split(":")[1] });
      } else if (action.startsWith("remove-topic:")) {
        dashboard.apply({ kind: "remove-topic", topic: action.split(":")[1] });
      } else if (action === "clear-dates") {
        dashboard.apply({ kind: "set-dates", start: null, end: null });
      } else if (action === "clear-terms") {
        dashboard.apply({ kind: "set-terms", terms: [] });
      } else if (action === "clear-locality") {
        dashboard.apply({ kind: "set-locality", geonameId: null });
      }
    }),
  );
}

function chip(kind: string, label: string, action: string): string {
  return `<span class="chip">${kind}: ${label} <button data-action="${action}">×</button></span>`;
}

if (typeof document !== "undefined" && document.querySelector("#panel-volume")) {
  boot(document);
}
