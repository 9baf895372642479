import { execFileSync } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

const CLI = join(__dirname, "..", "dist", "cli.js");

function runCli(args: string[]): string {
  return execFileSync("node", [CLI, ...args], { encoding: "utf-8" });
}

function writeLines(path: string, records: unknown[]): void {
  writeFileSync(path, records.map((r) => JSON.stringify(r)).join("\n") + "\n");
}

function readLines(path: string): any[] {
  return readFileSync(path, "utf-8")
    .split("\n")
    .filter((l) => l.trim().length)
    .map((l) => JSON.parse(l));
}

describe("bridge CLI (built dist)", () => {
  it("embed emits unit-norm vectors with matching ids", () => {
    const dir = mkdtempSync(join(tmpdir(), "bridge-"));
    const input = join(dir, "texts.jsonl");
    const output = join(dir, "vectors.jsonl");
    writeLines(input, [
      { id: "a", text: "uma frase sobre família" },
      { id: "b", text: "outra frase sobre futebol" },
      { id: "c", text: "   " },
    ]);
    runCli(["embed", "--in", input, "--out", output, "--model", "stub"]);
    const rows = readLines(output);
    expect(rows.map((r) => r.id)).toEqual(["a", "b"]);
    for (const row of rows) {
      const norm = Math.sqrt(row.vector.reduce((acc: number, x: number) => acc + x * x, 0));
      expect(norm).toBeCloseTo(1.0, 6);
    }
  });

  it("unmask writes bounded counts and skips empty tasks", () => {
    const dir = mkdtempSync(join(tmpdir(), "bridge-"));
    const input = join(dir, "tasks.jsonl");
    const output = join(dir, "counts.jsonl");
    writeLines(input, [
      {
        task_id: "s0-o0",
        sentence_index: 0,
        offset: 0,
        tokens: ["o", "gato", "subiu"],
        masked_positions: [1],
        gold_tokens: ["gato"],
        help_context: "o gato subiu",
        base_context: ". . .",
      },
      {
        task_id: "vazio",
        sentence_index: 1,
        offset: 0,
        tokens: ["nada"],
        masked_positions: [],
        gold_tokens: [],
        help_context: "x",
        base_context: ".",
      },
    ]);
    runCli(["unmask", "--in", input, "--out", output, "--model", "stub"]);
    const rows = readLines(output);
    expect(rows).toHaveLength(1);
    expect(rows[0]).toEqual({ task_id: "s0-o0", correct_with: 1, correct_without: 0, total: 1 });
  });

  it("rejects unknown commands with usage", () => {
    expect(() => runCli(["frobnicate"])).toThrow();
  });
});
