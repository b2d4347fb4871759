// Interaction loop: each filter refinement produces a new immutable state,
// issues exactly one request per panel with that state's parameters, and
// discards responses that arrive after the state has been superseded.

import { ApiClient } from "./api";
import {
  FilterChange,
  FilterState,
  applyChange,
  emptyState,
  statesEqual,
} from "./filterState";
import type {
  FacetCount,
  GeoMarker,
  MediumProfile,
  NewsPage,
  TopicShares,
  VolumeSeries,
} from "./types";

export type PanelStatus = "loading" | "ready" | "error" | "empty";

export interface Panel<T> {
  status: PanelStatus;
  data: T | null;
  error: string | null;
}

export interface ViewModel {
  state: FilterState;
  roster: MediumProfile[];
  volume: Panel<VolumeSeries>;
  topics: Panel<TopicShares[]>;
  media: Panel<FacetCount>;
  map: Panel<GeoMarker[]>;
  news: Panel<NewsPage>;
  page: number;
}

function loading<T>(): Panel<T> {
  return { status: "loading", data: null, error: null };
}

export const PANEL_NAMES = ["volume", "topics", "media", "map", "news"] as const;
export type PanelName = (typeof PANEL_NAMES)[number];

export class Dashboard {
  state: FilterState = emptyState();
  view: ViewModel;
  private seq = 0;
  private page = 0;

  constructor(
    private api: ApiClient,
    private onRender: (view: ViewModel) => void,
    private pageSize = 10,
    private granularity = "day",
  ) {
    this.view = {
      state: this.state,
      roster: [],
      volume: loading(),
      topics: loading(),
      media: loading(),
      map: loading(),
      news: loading(),
      page: 0,
    };
  }

  async start(initial?: FilterState): Promise<void> {
    try {
      this.view.roster = await this.api.media();
    } catch {
      this.view.roster = [];
    }
    if (initial) this.state = initial;
    await this.refresh();
  }

  apply(change: FilterChange): FilterState {
    const next = applyChange(this.state, change);
    if (!statesEqual(next, this.state)) {
      this.state = next;
      this.page = 0;
      void this.refresh();
    }
    return this.state;
  }

  async setPage(page: number): Promise<void> {
    this.page = Math.max(0, page);
    const seq = this.seq;
    await this.loadPanel(seq, "news", () =>
      this.api.news(this.state, this.page * this.pageSize, this.pageSize),
    );
  }

  /** One request per panel, tagged with the current sequence number. */
  async refresh(): Promise<void> {
    const seq = ++this.seq;
    this.view = {
      ...this.view,
      state: this.state,
      page: this.page,
      volume: loading(),
      topics: loading(),
      media: loading(),
      map: loading(),
      news: loading(),
    };
    this.onRender(this.view);
    await Promise.all([
      this.loadPanel(seq, "volume", () => this.api.volume(this.state, this.granularity)),
      this.loadPanel(seq, "topics", () => this.api.topics(this.state)),
      this.loadPanel(seq, "media", () => this.api.mediumFacets(this.state)),
      this.loadPanel(seq, "map", () => this.api.geo(this.state)),
      this.loadPanel(seq, "news", () =>
        this.api.news(this.state, this.page * this.pageSize, this.pageSize),
      ),
    ]);
  }

  private async loadPanel<T>(seq: number, name: PanelName, load: () => Promise<T>): Promise<void> {
    try {
      const data = await load();
      if (seq !== this.seq) return; // superseded: drop silently
      (this.view as Record<PanelName, Panel<unknown>>)[name] = {
        status: isEmpty(data) ? "empty" : "ready",
        data,
        error: null,
      };
    } catch (error) {
      if (seq !== this.seq) return;
      (this.view as Record<PanelName, Panel<unknown>>)[name] = {
        status: "error",
        data: null,
        error: error instanceof Error ? error.message : String(error),
      };
    }
    this.view = { ...this.view, state: this.state, page: this.page };
    this.onRender(this.view);
  }
}

function isEmpty(data: unknown): boolean {
  if (Array.isArray(data)) return data.length === 0;
  if (data && typeof data === "object") {
    const record = data as Record<string, unknown>;
    if (Array.isArray(record.buckets)) return record.buckets.length === 0;
    if (Array.isArray(record.docs)) return record.docs.length === 0;
    if (record.counts && typeof record.counts === "object") {
      return Object.keys(record.counts as object).length === 0;
    }
  }
  return false;
}
