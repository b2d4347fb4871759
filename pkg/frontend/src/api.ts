// Thin typed client over the read-only HTTP API. Every panel request model
// funnels through filterParams, so a state change reaches all endpoints.

import type { FilterState } from "./filterState";
import type {
  FacetCount,
  GeoMarker,
  MediumProfile,
  NewsPage,
  TopicShares,
  VolumeSeries,
} from "./types";

export type FetchLike = (url: string, init?: { signal?: AbortSignal }) => Promise<{
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
}>;

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export function filterParams(state: FilterState): URLSearchParams {
  const params = new URLSearchParams();
  for (const handle of state.media) params.append("medium", handle);
  for (const topic of state.topics) params.append("topic", topic);
  if (state.dateStart) params.set("date_start", state.dateStart);
  if (state.dateEnd) params.set("date_end", state.dateEnd);
  for (const term of state.terms) params.append("terms", term);
  if (state.geonameId !== null) params.set("geoname_id", String(state.geonameId));
  return params;
}

export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  url(path: string, params?: URLSearchParams): string {
    const query = params && [...params.keys()].length > 0 ? `?${params.toString()}` : "";
    return `${this.baseUrl}${path}${query}`;
  }

  private async get<T>(path: string, params?: URLSearchParams, signal?: AbortSignal): Promise<T> {
    const response = await this.fetchFn(this.url(path, params), { signal });
    if (!response.ok) {
      throw new ApiError(response.status, `${path} -> ${response.status}`);
    }
    return (await response.json()) as T;
  }

  news(state: FilterState, offset: number, limit: number, signal?: AbortSignal): Promise<NewsPage> {
    const params = filterParams(state);
    params.set("offset", String(offset));
    params.set("limit", String(limit));
    return this.get<NewsPage>("/news", params, signal);
  }

  volume(state: FilterState, granularity: string, signal?: AbortSignal): Promise<VolumeSeries> {
    const params = filterParams(state);
    params.set("granularity", granularity);
    return this.get<VolumeSeries>("/metrics/volume", params, signal);
  }

  topics(state: FilterState, signal?: AbortSignal): Promise<TopicShares[]> {
    return this.get<TopicShares[]>("/metrics/topics", filterParams(state), signal);
  }

  geo(state: FilterState, signal?: AbortSignal): Promise<GeoMarker[]> {
    return this.get<GeoMarker[]>("/metrics/geo", filterParams(state), signal);
  }

  mediumFacets(state: FilterState, signal?: AbortSignal): Promise<FacetCount> {
    const params = filterParams(state);
    params.set("field", "medium");
    return this.get<FacetCount>("/facets", params, signal);
  }

  media(signal?: AbortSignal): Promise<MediumProfile[]> {
    return this.get<MediumProfile[]>("/media", undefined, signal);
  }
}
