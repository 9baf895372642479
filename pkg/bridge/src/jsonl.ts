import { readFileSync, writeFileSync } from "node:fs";

export function readJsonl(path: string): unknown[] {
  const out: unknown[] = [];
  const text = readFileSync(path, "utf-8");
  for (const line of text.split("\n")) {
    const trimmed = line.trim();
    if (!trimmed) continue;
    out.push(JSON.parse(trimmed));
  }
  return out;
}

export function writeJsonl(path: string, records: unknown[]): void {
  const body = records.map((r) => JSON.stringify(r)).join("\n");
  writeFileSync(path, body.length ? body + "\n" : "", "utf-8");
}
