/**
 * Runtime model adapters. "stub" resolves to the deterministic built-ins;
 * any other name is loaded through transformers.js, which must be
 * installed separately (the evaluation suite never needs it).
 */

import { ModelLoadError, type MaskingTask, type UnmaskResult } from "./schemas.js";
import { stubEmbed, stubUnmask } from "./stub.js";

export interface Embedder {
  embed(texts: string[]): Promise<number[][]>;
}

export interface Unmasker {
  unmask(tasks: MaskingTask[]): Promise<UnmaskResult[]>;
}

async function loadTransformers(): Promise<any> {
  try {
    // eslint-disable-next-line @typescript-eslint/no-var-requires
    return await import("@xenova/transformers" as string);
  } catch (err) {
    throw new ModelLoadError(
      "model runtime unavailable: install @xenova/transformers or use --model stub",
    );
  }
}

export async function makeEmbedder(model: string): Promise<Embedder> {
  if (model === "stub") {
    return {
      async embed(texts: string[]): Promise<number[][]> {
        return texts.map((t) => stubEmbed(t));
      },
    };
  }
  const tf = await loadTransformers();
  const pipe = await tf.pipeline("feature-extraction", model);
  return {
    async embed(texts: string[]): Promise<number[][]> {
      const out: number[][] = [];
      for (const text of texts) {
        const tensor = await pipe(text, { pooling: "mean", normalize: true });
        out.push(Array.from(tensor.data as Float32Array));
      }
      return out;
    },
  };
}

export async function makeUnmasker(model: string): Promise<Unmasker> {
  if (model === "stub") {
    return {
      async unmask(tasks: MaskingTask[]): Promise<UnmaskResult[]> {
        return tasks.map((t) => stubUnmask(t));
      },
    };
  }
  const tf = await loadTransformers();
  const pipe = await tf.pipeline("fill-mask", model);
  return {
    async unmask(tasks: MaskingTask[]): Promise<UnmaskResult[]> {
      const results: UnmaskResult[] = [];
      for (const task of tasks) {
        let correctWith = 0;
        let correctWithout = 0;
        for (let k = 0; k < task.masked_positions.length; k++) {
          const gold = task.gold_tokens[k];
          for (const [prefix, bump] of [
            [task.help_context, () => correctWith++],
            [task.base_context, () => correctWithout++],
          ] as const) {
            const words = [...task.tokens];
            // predict one position at a time; other masks stay hidden
            for (const p of task.masked_positions) {
              words[p] = p === task.masked_positions[k] ? pipe.tokenizer.mask_token : "";
            }
            const text = `${prefix} ${words.filter((w) => w.length).join(" ")}`;
            const [best] = await pipe(text, { topk: 1 });
            if (best && String(best.token_str).trim() === gold) bump();
          }
        }
        results.push({
          task_id: task.task_id,
          correct_with: correctWith,
          correct_without: correctWithout,
          total: task.masked_positions.length,
        });
      }
      return results;
    },
  };
}
