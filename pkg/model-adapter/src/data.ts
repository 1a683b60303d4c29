/**
 * Dataset loading: the line-delimited sample files written by the corpus
 * pipeline (one JSON object per line with space-joined token streams).
 */

import { readFileSync } from "node:fs";

import { splitTokens } from "./tokenizer.js";

export interface DataPoint {
  sampleId: string;
  inputTokens: string[];
  truthTokens: string[];
}

export class BudgetMismatch extends Error {}

export function loadDataset(path: string): DataPoint[] {
  const out: DataPoint[] = [];
  const text = readFileSync(path, "utf-8");
  let lineNo = 0;
  for (const line of text.split("\n")) {
    lineNo += 1;
    const trimmed = line.trim();
    if (!trimmed) {
      continue;
    }
    let record: any;
    try {
      record = JSON.parse(trimmed);
    } catch (err) {
      throw new Error(`${path}:${lineNo}: invalid JSON: ${err}`);
    }
    for (const field of ["sample_id", "masked_input", "truth_assertion"]) {
      if (!(field in record)) {
        throw new Error(`${path}:${lineNo}: record missing field ${field}`);
      }
    }
    out.push({
      sampleId: record.sample_id,
      inputTokens: splitTokens(record.masked_input),
      truthTokens: splitTokens(record.truth_assertion),
    });
  }
  return out;
}

/** Reject datasets whose streams exceed the configured token budgets. */
export function checkBudgets(
  points: readonly DataPoint[], maxInput: number, maxOutput: number,
): void {
  const offenders: string[] = [];
  for (const point of points) {
    if (point.inputTokens.length > maxInput || point.truthTokens.length + 1 > maxOutput) {
      offenders.push(point.sampleId);
      if (offenders.length >= 3) {
        break;
      }
    }
  }
  if (offenders.length > 0) {
    throw new BudgetMismatch(
      `dataset token budgets exceed config (first offenders: ${offenders.join(", ")})`,
    );
  }
}
