/** Fixture loading and a fetch stub that serves recorded responses. */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { Fetched } from "../src/api.js";

const FIXTURE_DIR = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

export function fixtureRaw(name: string): string {
  return readFileSync(join(FIXTURE_DIR, name), "utf-8");
}

export function fixture<T>(name: string): Fetched<T> {
  const raw = fixtureRaw(name);
  return { payload: JSON.parse(raw) as T, raw };
}

/** fetch replacement that maps "METHOD pathname?query" to fixture bodies. */
export function fixtureFetch(routes: Record<string, string>) {
  return async (url: string, init?: RequestInit): Promise<Response> => {
    const method = init?.method ?? "GET";
    const parsed = new URL(url, "http://service.test");
    const key = `${method} ${parsed.pathname}${parsed.search}`;
    const short = `${method} ${parsed.pathname}`;
    const name = routes[key] ?? routes[short];
    if (!name) {
      return new Response(JSON.stringify({ detail: `no fixture for ${key}` }), {
        status: 404,
        headers: { "content-type": "application/json" },
      });
    }
    return new Response(fixtureRaw(name), {
      status: 200,
      headers: { "content-type": "application/json" },
    });
  };
}
