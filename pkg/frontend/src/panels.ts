// DOM rendering. Every number shown comes straight from an API response held
// in the view model; panels never recompute metrics client-side.

import type { Panel, ViewModel } from "./controller";
import { formatInt, formatPercent } from "./format";
import type { FacetCount, GeoMarker, NewsPage, TopicShares, VolumeSeries } from "./types";
import { TOPIC_LABELS } from "./types";

const NO_DATA = "sin datos";

function shell(el: HTMLElement, panel: Panel<unknown>): boolean {
  if (panel.status === "loading") {
    el.innerHTML = `<p class="placeholder">cargando…</p>`;
    return false;
  }
  if (panel.status === "error") {
    el.innerHTML = `<p class="error-badge" data-error="1">error: ${escapeHtml(panel.error ?? "")}</p>`;
    return false;
  }
  if (panel.status === "empty") {
    el.innerHTML = `<p class="placeholder" data-empty="1">${NO_DATA}</p>`;
    return false;
  }
  return true;
}

function escapeHtml(text: string): string {
  return text.replace(/[&<>"']/g, (c) => `&#${c.charCodeAt(0)};`);
}

export function renderVolume(el: HTMLElement, panel: Panel<VolumeSeries>): void {
  if (!shell(el, panel)) return;
  const series = panel.data!;
  const max = Math.max(...series.buckets.map((b) => b.count), 1);
  const bars = series.buckets
    .map(({ bucket, count }) => {
      const height = Math.round((count / max) * 100);
      return (
        `<div class="bar" data-bucket="${bucket}" data-count="${count}" title="${bucket}: ${formatInt(count)}">` +
        `<div class="fill" style="height:${height}%"></div></div>`
      );
    })
    .join("");
  el.innerHTML =
    `<div class="chart" role="img" aria-label="emisiones por ${series.granularity}">${bars}</div>` +
    `<p class="total">total: <span data-volume-total>${formatInt(series.total)}</span></p>`;
}

export function renderTopics(el: HTMLElement, panel: Panel<TopicShares[]>): void {
  if (!shell(el, panel)) return;
  const groups = panel.data!;
  if (groups.length === 0) {
    el.innerHTML = `<p class="placeholder" data-empty="1">${NO_DATA}</p>`;
    return;
  }
  const shares = groups[0].shares;
  const rows = TOPIC_LABELS.map((label) => {
    const share = shares[label] ?? 0;
    return (
      `<div class="topic-row" data-topic="${label}" data-share="${share}">` +
      `<span class="label">${label}</span>` +
      `<div class="bar-h"><div class="fill" style="width:${share * 100}%"></div></div>` +
      `<span class="pct">${formatPercent(share)}</span></div>`
    );
  }).join("");
  el.innerHTML = `<div class="topics">${rows}</div>` +
    `<p class="total">documentos: <span data-topics-count>${formatInt(groups[0].doc_count)}</span></p>`;
}

export function renderMediaTable(el: HTMLElement, view: ViewModel): void {
  const panel = view.media;
  if (!shell(el, panel)) return;
  const counts = (panel.data as FacetCount).counts;
  const profiles = new Map(view.roster.map((p) => [p.handle, p]));
  const rows = Object.entries(counts)
    .sort((a, b) => b[1] - a[1] || a[0].localeCompare(b[0]))
    .map(([handle, count]) => {
      const profile = profiles.get(handle);
      const badge = profile
        ? `<span class="badge badge-${profile.audience_class}">${profile.audience_class}</span>`
        : "";
      const name = profile ? profile.name : handle;
      const followers = profile ? formatInt(profile.followers) : "–";
      return (
        `<tr data-medium="${handle}" data-count="${count}">` +
        `<td>${escapeHtml(name)}</td><td class="num" data-doc-count>${formatInt(count)}</td>` +
        `<td class="num">${followers}</td><td>${badge}</td></tr>`
      );
    })
    .join("");
  el.innerHTML =
    `<table class="media"><thead><tr><th>medio</th><th>docs</th><th>seguidores</th><th>audiencia</th></tr></thead>` +
    `<tbody>${rows}</tbody></table>`;
}

// Web-Mercator projection into a fixed-size container backed by open tile
// imagery (single world tile at zoom 0 by default; configurable template).
export interface MapOptions {
  width: number;
  height: number;
  tileUrl: string | null;
}

export const DEFAULT_MAP: MapOptions = {
  width: 640,
  height: 400,
  tileUrl: "https://tile.openstreetmap.org/0/0/0.png",
};

export function project(lat: number, lon: number, options: MapOptions): { x: number; y: number } {
  const x = ((lon + 180) / 360) * options.width;
  const clamped = Math.max(-85.0511, Math.min(85.0511, lat));
  const radians = (clamped * Math.PI) / 180;
  const mercator = Math.log(Math.tan(Math.PI / 4 + radians / 2));
  const y = (0.5 - mercator / (2 * Math.PI)) * options.height;
  return { x, y };
}

export function markerRadius(count: number): number {
  return 4 + 3 * Math.log(1 + count);
}

export function renderMap(el: HTMLElement, panel: Panel<GeoMarker[]>, options: MapOptions = DEFAULT_MAP): void {
  if (!shell(el, panel)) return;
  const markers = panel.data!;
  const tile = options.tileUrl
    ? `<img class="tiles" src="${options.tileUrl}" alt="mapa base" width="${options.width}" height="${options.height}">`
    : "";
  const dots = markers
    .map((marker) => {
      const { x, y } = project(marker.lat, marker.lon, options);
      const radius = markerRadius(marker.count);
      return (
        `<div class="marker" data-geoname-id="${marker.geoname_id}" data-count="${marker.count}" ` +
        `title="${escapeHtml(marker.name)}: ${formatInt(marker.count)}" ` +
        `style="left:${x - radius}px;top:${y - radius}px;width:${radius * 2}px;height:${radius * 2}px"></div>`
      );
    })
    .join("");
  el.innerHTML = `<div class="map" style="width:${options.width}px;height:${options.height}px">${tile}${dots}</div>`;
}

export function renderNews(el: HTMLElement, panel: Panel<NewsPage>, page: number): void {
  if (!shell(el, panel)) return;
  const data = panel.data!;
  const items = data.docs
    .map((doc) => {
      const title = doc.title ?? doc.tweet_text;
      const link = doc.canonical_url
        ? `<a href="${escapeHtml(doc.canonical_url)}" rel="noopener">${escapeHtml(title)}</a>`
        : escapeHtml(title);
      const topic = doc.topic ? `<span class="chip" data-topic="${doc.topic}">${doc.topic}</span>` : "";
      return (
        `<li data-doc-id="${doc.doc_id}"><span class="date">${doc.published_at.slice(0, 10)}</span> ` +
        `<span class="medium">${escapeHtml(doc.medium_handle)}</span> ${link} ${topic}</li>`
      );
    })
    .join("");
  const pages = Math.max(1, Math.ceil(data.total / data.limit));
  el.innerHTML =
    `<p class="total">resultados: <span data-news-total>${formatInt(data.total)}</span></p>` +
    `<ol class="news" start="${data.offset + 1}">${items}</ol>` +
    `<nav class="pager"><button data-page-prev ${page === 0 ? "disabled" : ""}>anterior</button>` +
    `<span data-page-label>página ${page + 1} de ${pages}</span>` +
    `<button data-page-next ${page + 1 >= pages ? "disabled" : ""}>siguiente</button></nav>`;
}

export function renderAll(root: Document | HTMLElement, view: ViewModel): void {
  const volume = root.querySelector<HTMLElement>("#panel-volume");
  const topics = root.querySelector<HTMLElement>("#panel-topics");
  const media = root.querySelector<HTMLElement>("#panel-media");
  const map = root.querySelector<HTMLElement>("#panel-map");
  const news = root.querySelector<HTMLElement>("#panel-news");
  if (volume) renderVolume(volume, view.volume);
  if (topics) renderTopics(topics, view.topics);
  if (media) renderMediaTable(media, view);
  if (map) renderMap(map, view.map);
  if (news) renderNews(news, view.news, view.page);
}
