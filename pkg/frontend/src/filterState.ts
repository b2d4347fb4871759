// Exploration state. The whole state round-trips through the URL query
// string losslessly, so any view is shareable as a link.

export interface FilterState {
  media: string[]; // sorted, unique
  topics: string[]; // sorted, unique
  dateStart: string | null; // ISO date
  dateEnd: string | null; // exclusive
  terms: string[]; // free-text terms, order preserved
  geonameId: number | null;
}

export type FilterChange =
  | { kind: "add-medium"; handle: string }
  | { kind: "remove-medium"; handle: string }
  | { kind: "add-topic"; topic: string }
  | { kind: "remove-topic"; topic: string }
  | { kind: "set-dates"; start: string | null; end: string | null }
  | { kind: "set-terms"; terms: string[] }
  | { kind: "set-locality"; geonameId: number | null }
  | { kind: "clear-all" };

export function emptyState(): FilterState {
  return { media: [], topics: [], dateStart: null, dateEnd: null, terms: [], geonameId: null };
}

function sortedUnique(values: string[]): string[] {
  return [...new Set(values)].sort();
}

export function normalize(state: FilterState): FilterState {
  return {
    media: sortedUnique(state.media),
    topics: sortedUnique(state.topics),
    dateStart: state.dateStart || null,
    dateEnd: state.dateEnd || null,
    terms: state.terms.map((t) => t.trim()).filter((t) => t.length > 0),
    geonameId: state.geonameId ?? null,
  };
}

export function applyChange(state: FilterState, change: FilterChange): FilterState {
  const next = { ...state, media: [...state.media], topics: [...state.topics], terms: [...state.terms] };
  switch (change.kind) {
    case "add-medium":
      next.media.push(change.handle);
      break;
    case "remove-medium":
      next.media = next.media.filter((h) => h !== change.handle);
      break;
    case "add-topic":
      next.topics.push(change.topic);
      break;
    case "remove-topic":
      next.topics = next.topics.filter((t) => t !== change.topic);
      break;
    case "set-dates":
      next.dateStart = change.start;
      next.dateEnd = change.end;
      break;
    case "set-terms":
      next.terms = change.terms;
      break;
    case "set-locality":
      next.geonameId = change.geonameId;
      break;
    case "clear-all":
      return emptyState();
  }
  return normalize(next);
}

// URL (de)serialization -----------------------------------------------------

export function toQuery(state: FilterState): string {
  const params = new URLSearchParams();
  for (const handle of state.media) params.append("medium", handle);
  for (const topic of state.topics) params.append("topic", topic);
  if (state.dateStart) params.set("date_start", state.dateStart);
  if (state.dateEnd) params.set("date_end", state.dateEnd);
  for (const term of state.terms) params.append("terms", term);
  if (state.geonameId !== null) params.set("geoname_id", String(state.geonameId));
  return params.toString();
}

export function fromQuery(query: string): FilterState {
  const params = new URLSearchParams(query);
  const geoname = params.get("geoname_id");
  return normalize({
    media: params.getAll("medium"),
    topics: params.getAll("topic"),
    dateStart: params.get("date_start"),
    dateEnd: params.get("date_end"),
    terms: params.getAll("terms"),
    geonameId: geoname === null ? null : Number(geoname),
  });
}

export function statesEqual(a: FilterState, b: FilterState): boolean {
  return toQuery(a) === toQuery(b);
}
