// Shared test plumbing: a fetch mock that serves the recorded API bodies and
// logs every request, with optional per-URL deferred resolution so stale
// response handling can be exercised deterministically.

import fixtures from "./fixtures/api_fixtures.json";
import type { FetchLike } from "../src/api";

const RECORDED = fixtures as Record<string, unknown>;

export function normalizeUrl(url: string): string {
  const u = new URL(url, "http://test");
  const pairs = [...u.searchParams.entries()].sort(
    (a, b) => a[0].localeCompare(b[0]) || a[1].localeCompare(b[1]),
  );
  const params = new URLSearchParams();
  for (const [k, v] of pairs) params.append(k, v);
  const query = params.toString();
  return query ? `${u.pathname}?${query}` : u.pathname;
}

export interface MockNetwork {
  fetch: FetchLike;
  log: string[]; // normalized URLs in issue order
  deferred: Map<string, Array<(body: unknown) => void>>;
  /** Make matching URLs hang until released. */
  defer(pathPrefix: string): void;
  /** Resolve all hung requests for a prefix with their recorded bodies. */
  release(pathPrefix: string): void;
}

export function mockNetwork(overrides: Record<string, unknown> = {}): MockNetwork {
  const log: string[] = [];
  const deferredPrefixes = new Set<string>();
  const pending = new Map<string, Array<() => void>>();

  const lookup = (key: string): unknown => {
    if (key in overrides) return overrides[key];
    if (key in RECORDED) return RECORDED[key];
    throw new Error(`no recorded response for ${key}`);
  };

  const network: MockNetwork = {
    log,
    deferred: new Map(),
    defer(prefix) {
      deferredPrefixes.add(prefix);
    },
    release(prefix) {
      deferredPrefixes.delete(prefix);
      for (const [key, resolvers] of [...pending.entries()]) {
        if (key.startsWith(prefix)) {
          pending.delete(key);
          resolvers.forEach((r) => r());
        }
      }
    },
    fetch: async (url: string) => {
      const key = normalizeUrl(url);
      log.push(key);
      const prefix = [...deferredPrefixes].find((p) => key.startsWith(p));
      if (prefix) {
        await new Promise<void>((resolve) => {
          const queue = pending.get(key) ?? [];
          queue.push(resolve);
          pending.set(key, queue);
        });
      }
      const body = lookup(key);
      return {
        ok: true,
        status: 200,
        json: async () => JSON.parse(JSON.stringify(body)),
      };
    },
  };
  return network;
}

export function recorded<T>(key: string): T {
  if (!(key in RECORDED)) throw new Error(`no recorded response for ${key}`);
  return JSON.parse(JSON.stringify(RECORDED[key])) as T;
}

export function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}
