/**
 * Wire formats shared with the evaluation toolkit.
 *
 * The bridge only ever talks JSONL: embed turns {id, text} requests into
 * {id, vector} responses; unmask turns masking tasks into per-task
 * prediction counts that the toolkit's blanc scorer ingests.
 */

export interface EmbedRequest {
  id: string;
  text: string;
}

export interface EmbedResponse {
  id: string;
  vector: number[];
}

export interface MaskingTask {
  task_id: string;
  sentence_index: number;
  offset: number;
  tokens: string[];
  masked_positions: number[];
  gold_tokens: string[];
  help_context: string;
  base_context: string;
}

export interface UnmaskResult {
  task_id: string;
  correct_with: number;
  correct_without: number;
  total: number;
}

export class TaskSchemaError extends Error {}
export class ModelLoadError extends Error {}

export function validateTask(raw: unknown, lineNo: number): MaskingTask {
  const rec = raw as Record<string, unknown>;
  const fields = [
    "task_id",
    "tokens",
    "masked_positions",
    "gold_tokens",
    "help_context",
    "base_context",
  ];
  for (const f of fields) {
    if (!(f in rec)) {
      throw new TaskSchemaError(`line ${lineNo}: task missing field "${f}"`);
    }
  }
  const task = rec as unknown as MaskingTask;
  if (task.masked_positions.length !== task.gold_tokens.length) {
    throw new TaskSchemaError(
      `line ${lineNo}: masked_positions and gold_tokens disagree in length`,
    );
  }
  for (const p of task.masked_positions) {
    if (p < 0 || p >= task.tokens.length) {
      throw new TaskSchemaError(`line ${lineNo}: masked position ${p} out of range`);
    }
  }
  return task;
}
