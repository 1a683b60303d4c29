/**
 * Fine-tune the toy model on an exported dataset file.
 *
 * Usage:
 *   node dist/src/train.js --data train.jsonl --out ckpt/ [--epochs N]
 *     [--lr X] [--batch-size B] [--hidden H] [--embed E] [--seed S]
 *     [--resume ckpt/] [--max-input N] [--max-output N]
 *
 * Writes <out>/checkpoint.json (weights + config echo + vocab) and
 * <out>/training_log.json (per-epoch loss).
 */

import { mkdirSync, readFileSync, writeFileSync } from "node:fs";
import { join } from "node:path";

import { checkBudgets, loadDataset } from "./data.js";
import { DEFAULT_CONFIG, Seq2SeqModel, TrainerConfig, validateConfig } from "./model.js";
import { Vocab } from "./tokenizer.js";

interface Args {
  [key: string]: string;
}

function parseArgs(argv: string[]): Args {
  const args: Args = {};
  for (let i = 0; i < argv.length; i += 1) {
    const arg = argv[i];
    if (arg.startsWith("--")) {
      args[arg.slice(2)] = argv[i + 1] ?? "";
      i += 1;
    }
  }
  return args;
}

export function main(argv: string[]): number {
  const args = parseArgs(argv);
  if (!args["data"] || !args["out"]) {
    console.error("usage: train --data <train.jsonl> --out <ckpt-dir> [options]");
    return 2;
  }
  const config: TrainerConfig = {
    ...DEFAULT_CONFIG,
    learningRate: args["lr"] ? Number(args["lr"]) : DEFAULT_CONFIG.learningRate,
    epochs: args["epochs"] ? Number(args["epochs"]) : DEFAULT_CONFIG.epochs,
    batchSize: args["batch-size"] ? Number(args["batch-size"]) : DEFAULT_CONFIG.batchSize,
    embedDim: args["embed"] ? Number(args["embed"]) : DEFAULT_CONFIG.embedDim,
    hiddenDim: args["hidden"] ? Number(args["hidden"]) : DEFAULT_CONFIG.hiddenDim,
    maxInputTokens: args["max-input"] ? Number(args["max-input"]) : DEFAULT_CONFIG.maxInputTokens,
    maxOutputTokens: args["max-output"] ? Number(args["max-output"]) : DEFAULT_CONFIG.maxOutputTokens,
    seed: args["seed"] ? Number(args["seed"]) : DEFAULT_CONFIG.seed,
    baseCheckpoint: args["resume"] ?? null,
  };
  try {
    validateConfig(config);
    const points = loadDataset(args["data"]);
    if (points.length === 0) {
      throw new Error("dataset is empty");
    }
    checkBudgets(points, config.maxInputTokens, config.maxOutputTokens);

    let model: Seq2SeqModel;
    if (config.baseCheckpoint) {
      const payload = JSON.parse(
        readFileSync(join(config.baseCheckpoint, "checkpoint.json"), "utf-8"),
      );
      const restored = Seq2SeqModel.fromCheckpoint(payload);
      model = new Seq2SeqModel(
        restored.vocab, { ...config, baseCheckpoint: config.baseCheckpoint },
        restored.embed, restored.posEmbed, restored.w1, restored.b1,
        restored.w2, restored.b2,
      );
    } else {
      const vocab = new Vocab();
      for (const point of points) {
        for (const token of point.inputTokens) {
          vocab.add(token);
        }
        for (const token of point.truthTokens) {
          vocab.add(token);
        }
      }
      model = Seq2SeqModel.init(vocab, config);
    }

    const samples = points.map((point) => ({
      inputIds: model.vocab.encode(point.inputTokens),
      targetIds: model.vocab.encode(point.truthTokens),
    }));

    const losses: number[] = [];
    for (let epoch = 1; epoch <= config.epochs; epoch += 1) {
      const loss = model.trainEpoch(samples, config.seed + epoch);
      losses.push(loss);
      console.log(`epoch ${epoch}/${config.epochs} loss ${loss.toFixed(6)}`);
    }

    mkdirSync(args["out"], { recursive: true });
    writeFileSync(
      join(args["out"], "checkpoint.json"),
      JSON.stringify(model.toCheckpoint()),
    );
    writeFileSync(
      join(args["out"], "training_log.json"),
      JSON.stringify({ config, losses, samples: points.length }, null, 2),
    );
    console.log(`checkpoint written to ${args["out"]}`);
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}

if (process.argv[1] && process.argv[1].endsWith("train.js")) {
  process.exit(main(process.argv.slice(2)));
}
