/**
 * Serve a checkpoint over the predictor line protocol.
 *
 * Usage: node dist/src/serve.js --checkpoint <ckpt-dir>
 *
 * One JSON request per stdin line: {id, masked_input, token_form, k}.
 * One JSON response per line, order-preserving:
 * {id, candidates: [{text, score}, ...]} with at most k candidates ranked
 * by model score.  A malformed request yields an error response carrying
 * whatever id could be recovered.
 */

import { readFileSync } from "node:fs";
import { join } from "node:path";
import { createInterface } from "node:readline";

import { Seq2SeqModel } from "./model.js";
import { splitTokens } from "./tokenizer.js";

function parseArgs(argv: string[]): { [key: string]: string } {
  const args: { [key: string]: string } = {};
  for (let i = 0; i < argv.length; i += 1) {
    if (argv[i].startsWith("--")) {
      args[argv[i].slice(2)] = argv[i + 1] ?? "";
      i += 1;
    }
  }
  return args;
}

export function handleRequest(model: Seq2SeqModel, line: string): string {
  let id: unknown = null;
  try {
    const request = JSON.parse(line);
    id = request.id ?? null;
    if (typeof request.masked_input !== "string") {
      throw new Error("request lacks masked_input");
    }
    const k = Number.isInteger(request.k) && request.k > 0 ? request.k : 10;
    const inputIds = model.vocab.encode(splitTokens(request.masked_input));
    const candidates = model.beamSearch(inputIds, k).map((candidate) => ({
      text: candidate.tokens.join(" "),
      score: candidate.score,
    }));
    return JSON.stringify({ id, candidates });
  } catch (err) {
    return JSON.stringify({
      id,
      candidates: [],
      error: err instanceof Error ? err.message : String(err),
    });
  }
}

function main(argv: string[]): void {
  const args = parseArgs(argv);
  if (!args["checkpoint"]) {
    console.error("usage: serve --checkpoint <ckpt-dir>");
    process.exit(2);
  }
  const payload = JSON.parse(
    readFileSync(join(args["checkpoint"], "checkpoint.json"), "utf-8"),
  );
  const model = Seq2SeqModel.fromCheckpoint(payload);
  const reader = createInterface({ input: process.stdin, terminal: false });
  reader.on("line", (line) => {
    if (!line.trim()) {
      return;
    }
    process.stdout.write(handleRequest(model, line) + "\n");
  });
}

if (process.argv[1] && process.argv[1].endsWith("serve.js")) {
  main(process.argv.slice(2));
}
