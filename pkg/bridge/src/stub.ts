/**
 * Deterministic stand-in models.
 *
 * The stub embedder feature-hashes word unigrams into a fixed-dimension
 * unit vector, so identical texts embed identically and overlapping texts
 * land near each other — enough to exercise the whole topic pipeline
 * without downloading a real encoder.
 *
 * The stub unmasker predicts a masked token correctly exactly when the
 * gold token is visible verbatim in the prediction context (the unmasked
 * sentence tokens plus the help/base prefix). That makes scores
 * hand-computable while preserving the property BLANC measures: a summary
 * containing the answer helps.
 */

import type { MaskingTask, UnmaskResult } from "./schemas.js";

export const STUB_DIM = 64;

/** FNV-1a, 32 bit; cheap, stable across platforms. */
function fnv1a(s: string): number {
  let h = 0x811c9dc5;
  for (let i = 0; i < s.length; i++) {
    h ^= s.charCodeAt(i);
    h = Math.imul(h, 0x01000193);
  }
  return h >>> 0;
}

export function stubEmbed(text: string, dim: number = STUB_DIM): number[] {
  const vec = new Array<number>(dim).fill(0);
  const tokens = text.toLowerCase().split(/\s+/).filter((t) => t.length > 0);
  for (const tok of tokens) {
    const h = fnv1a(tok);
    const bucket = h % dim;
    const sign = (h >>> 16) % 2 === 0 ? 1 : -1;
    vec[bucket] += sign;
  }
  const norm = Math.sqrt(vec.reduce((acc, x) => acc + x * x, 0));
  if (norm === 0) {
    // degenerate all-zero hash (empty token list): fixed unit vector
    vec[0] = 1;
    return vec;
  }
  return vec.map((x) => x / norm);
}

function predictFromContext(gold: string, visible: Set<string>): string {
  return visible.has(gold) ? gold : "";
}

export function stubUnmask(task: MaskingTask): UnmaskResult {
  const masked = new Set(task.masked_positions);
  const visibleSentence = task.tokens.filter((_, i) => !masked.has(i));
  const helpSet = new Set([...visibleSentence, ...task.help_context.split(/\s+/)]);
  const baseSet = new Set([...visibleSentence, ...task.base_context.split(/\s+/)]);
  let correctWith = 0;
  let correctWithout = 0;
  for (const gold of task.gold_tokens) {
    if (predictFromContext(gold, helpSet) === gold) correctWith++;
    if (predictFromContext(gold, baseSet) === gold) correctWithout++;
  }
  return {
    task_id: task.task_id,
    correct_with: correctWith,
    correct_without: correctWithout,
    total: task.gold_tokens.length,
  };
}
