// Response shapes of the HTTP API the dashboard consumes.

export interface NewsDoc {
  doc_id: string;
  medium_handle: string;
  published_at: string;
  tweet_text: string;
  canonical_url: string | null;
  title: string | null;
  topic: string | null;
  keywords: string[];
  emission_count: number;
}

export interface NewsPage {
  total: number;
  offset: number;
  limit: number;
  docs: NewsDoc[];
}

export interface VolumeBucket {
  bucket: string;
  count: number;
}

export interface VolumeSeries {
  granularity: string;
  timezone: string;
  buckets: VolumeBucket[];
  total: number;
}

export interface TopicShares {
  group: string;
  shares: Record<string, number>;
  doc_count: number;
}

export interface MediumProfile {
  handle: string;
  name: string;
  followers: number;
  kind: string;
  audience_class: "high" | "medium" | "low";
}

export interface GeoMarker {
  geoname_id: number;
  name: string;
  lat: number;
  lon: number;
  count: number;
}

export interface FacetCount {
  field: string;
  counts: Record<string, number>;
}

export const TOPIC_LABELS = [
  "accidentes",
  "deportes",
  "ecología",
  "economía",
  "entretenimiento",
  "judicial",
  "política",
  "salud",
  "sociedad",
  "tecnología",
] as const;
