#!/usr/bin/env node
/**
 * puncteval-bridge: one-shot JSONL converters around model runtimes.
 *
 *   bridge embed  --in texts.jsonl  --out vectors.jsonl --model stub
 *   bridge unmask --in tasks.jsonl  --out counts.jsonl  --model stub
 *
 * embed:  {id, text}  ->  {id, vector}   (unit-normalized, fixed dimension)
 * unmask: masking tasks -> {task_id, correct_with, correct_without, total}
 */

import { readJsonl, writeJsonl } from "./jsonl.js";
import { makeEmbedder, makeUnmasker } from "./models.js";
import {
  ModelLoadError,
  TaskSchemaError,
  validateTask,
  type EmbedRequest,
  type EmbedResponse,
} from "./schemas.js";

function parseArgs(argv: string[]): { command: string; opts: Record<string, string> } {
  const [command, ...rest] = argv;
  const opts: Record<string, string> = {};
  for (let i = 0; i < rest.length; i += 2) {
    const key = rest[i];
    const value = rest[i + 1];
    if (!key?.startsWith("--") || value === undefined) {
      throw new Error(`bad argument pair near "${key}"`);
    }
    opts[key.slice(2)] = value;
  }
  return { command: command ?? "", opts };
}

function usage(): string {
  return [
    "usage:",
    "  puncteval-bridge embed  --in texts.jsonl --out vectors.jsonl [--model stub]",
    "  puncteval-bridge unmask --in tasks.jsonl --out counts.jsonl [--model stub]",
  ].join("\n");
}

async function runEmbed(opts: Record<string, string>): Promise<void> {
  const model = opts.model ?? "stub";
  const rows = readJsonl(opts.in) as EmbedRequest[];
  const embedder = await makeEmbedder(model);
  const kept: EmbedRequest[] = [];
  for (const [i, row] of rows.entries()) {
    if (!row.id || typeof row.text !== "string") {
      throw new TaskSchemaError(`line ${i + 1}: embed request needs "id" and "text"`);
    }
    if (row.text.trim().length === 0) {
      console.error(`warning: skipping empty text for id ${row.id}`);
      continue;
    }
    kept.push(row);
  }
  const vectors = await embedder.embed(kept.map((r) => r.text));
  const responses: EmbedResponse[] = kept.map((r, i) => ({ id: r.id, vector: vectors[i] }));
  writeJsonl(opts.out, responses);
  console.error(`embedded ${responses.length} texts with model ${model}`);
}

async function runUnmask(opts: Record<string, string>): Promise<void> {
  const model = opts.model ?? "stub";
  const raw = readJsonl(opts.in);
  const tasks = raw
    .map((r, i) => validateTask(r, i + 1))
    .filter((t) => {
      if (t.masked_positions.length === 0) {
        console.error(`warning: skipping task ${t.task_id} with no masked positions`);
        return false;
      }
      return true;
    });
  const unmasker = await makeUnmasker(model);
  const results = await unmasker.unmask(tasks);
  for (const r of results) {
    if (r.correct_with < 0 || r.correct_with > r.total || r.correct_without < 0 || r.correct_without > r.total) {
      throw new Error(`task ${r.task_id}: counts out of bounds`);
    }
  }
  writeJsonl(opts.out, results);
  console.error(`unmasked ${results.length} tasks with model ${model}`);
}

async function main(): Promise<number> {
  const { command, opts } = parseArgs(process.argv.slice(2));
  if (command !== "embed" && command !== "unmask") {
    console.error(usage());
    return 2;
  }
  if (!opts.in || !opts.out) {
    console.error(usage());
    return 2;
  }
  try {
    if (command === "embed") await runEmbed(opts);
    else await runUnmask(opts);
    return 0;
  } catch (err) {
    if (err instanceof ModelLoadError || err instanceof TaskSchemaError) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

main().then((code) => {
  process.exitCode = code;
});
