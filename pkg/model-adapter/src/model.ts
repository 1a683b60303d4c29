/**
 * Toy sequence-to-sequence assertion model.
 *
 * Encoder: mean of input-token embeddings.  Decoder: per-step MLP over
 * [context; previous-token embedding; position embedding] with a softmax
 * over the vocabulary, trained by teacher forcing with Adam.  Beam search
 * produces the ranked top-k candidates.  Small enough to overfit a handful
 * of samples on a CPU in seconds, which is all the desk-scale pipeline
 * needs from a stand-in model.
 */

import { BOS, EOS, Vocab } from "./tokenizer.js";

export interface TrainerConfig {
  learningRate: number;
  epochs: number;
  batchSize: number;
  maxInputTokens: number;
  maxOutputTokens: number;
  embedDim: number;
  hiddenDim: number;
  posDim: number;
  seed: number;
  baseCheckpoint: string | null;
}

export const DEFAULT_CONFIG: TrainerConfig = {
  learningRate: 2e-5,
  epochs: 10,
  batchSize: 38,
  maxInputTokens: 386,
  maxOutputTokens: 64,
  embedDim: 32,
  hiddenDim: 64,
  posDim: 8,
  seed: 7,
  baseCheckpoint: null,
};

export function validateConfig(config: TrainerConfig): void {
  const positive: Array<[string, number]> = [
    ["learningRate", config.learningRate],
    ["epochs", config.epochs],
    ["batchSize", config.batchSize],
    ["maxInputTokens", config.maxInputTokens],
    ["maxOutputTokens", config.maxOutputTokens],
    ["embedDim", config.embedDim],
    ["hiddenDim", config.hiddenDim],
    ["posDim", config.posDim],
  ];
  for (const [name, value] of positive) {
    if (!(value > 0)) {
      throw new Error(`config ${name} must be positive, got ${value}`);
    }
  }
}

/** Deterministic PRNG (mulberry32). */
function rng(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

class Tensor {
  data: Float64Array;
  grad: Float64Array;
  m: Float64Array;
  v: Float64Array;

  constructor(readonly rows: number, readonly cols: number, init: () => number) {
    const size = rows * cols;
    this.data = new Float64Array(size);
    this.grad = new Float64Array(size);
    this.m = new Float64Array(size);
    this.v = new Float64Array(size);
    for (let i = 0; i < size; i++) {
      this.data[i] = init();
    }
  }
}

export interface Sample {
  inputIds: number[];
  /** truth token ids without BOS/EOS framing */
  targetIds: number[];
}

export interface Candidate {
  tokens: string[];
  score: number;
}

export class Seq2SeqModel {
  readonly zDim: number;
  private step = 0;

  constructor(
    readonly vocab: Vocab,
    readonly config: TrainerConfig,
    readonly embed: Tensor,
    readonly posEmbed: Tensor,
    readonly w1: Tensor,
    readonly b1: Tensor,
    readonly w2: Tensor,
    readonly b2: Tensor,
  ) {
    this.zDim = 2 * config.embedDim + config.posDim;
  }

  static init(vocab: Vocab, config: TrainerConfig): Seq2SeqModel {
    validateConfig(config);
    const random = rng(config.seed);
    const gauss = (scale: number) => () => (random() * 2 - 1) * scale;
    const e = config.embedDim;
    const h = config.hiddenDim;
    const z = 2 * e + config.posDim;
    return new Seq2SeqModel(
      vocab,
      config,
      new Tensor(vocab.size, e, gauss(0.1)),
      new Tensor(config.maxOutputTokens + 1, config.posDim, gauss(0.1)),
      new Tensor(h, z, gauss(Math.sqrt(1 / z))),
      new Tensor(1, h, () => 0),
      new Tensor(vocab.size, h, gauss(Math.sqrt(1 / h))),
      new Tensor(1, vocab.size, () => 0),
    );
  }

  get parameters(): Tensor[] {
    return [this.embed, this.posEmbed, this.w1, this.b1, this.w2, this.b2];
  }

  /** Mean of input-token embeddings. */
  private context(inputIds: readonly number[]): Float64Array {
    const e = this.config.embedDim;
    const ctx = new Float64Array(e);
    if (inputIds.length === 0) {
      return ctx;
    }
    for (const id of inputIds) {
      const base = id * e;
      for (let j = 0; j < e; j++) {
        ctx[j] += this.embed.data[base + j];
      }
    }
    for (let j = 0; j < e; j++) {
      ctx[j] /= inputIds.length;
    }
    return ctx;
  }

  private forwardStep(
    ctx: Float64Array, prevId: number, position: number,
  ): { z: Float64Array; h: Float64Array; probs: Float64Array } {
    const e = this.config.embedDim;
    const p = this.config.posDim;
    const hDim = this.config.hiddenDim;
    const vSize = this.vocab.size;
    const z = new Float64Array(this.zDim);
    z.set(ctx, 0);
    z.set(this.embed.data.subarray(prevId * e, prevId * e + e), e);
    const posIndex = Math.min(position, this.config.maxOutputTokens);
    z.set(this.posEmbed.data.subarray(posIndex * p, posIndex * p + p), 2 * e);

    const h = new Float64Array(hDim);
    for (let r = 0; r < hDim; r++) {
      let acc = this.b1.data[r];
      const base = r * this.zDim;
      for (let c = 0; c < this.zDim; c++) {
        acc += this.w1.data[base + c] * z[c];
      }
      h[r] = Math.tanh(acc);
    }
    const logits = new Float64Array(vSize);
    let maxLogit = -Infinity;
    for (let r = 0; r < vSize; r++) {
      let acc = this.b2.data[r];
      const base = r * hDim;
      for (let c = 0; c < hDim; c++) {
        acc += this.w2.data[base + c] * h[c];
      }
      logits[r] = acc;
      if (acc > maxLogit) {
        maxLogit = acc;
      }
    }
    let sum = 0;
    for (let r = 0; r < vSize; r++) {
      logits[r] = Math.exp(logits[r] - maxLogit);
      sum += logits[r];
    }
    for (let r = 0; r < vSize; r++) {
      logits[r] /= sum;
    }
    return { z, h, probs: logits };
  }

  /** Teacher-forced loss and gradient accumulation for one sample. */
  private backwardSample(sample: Sample): number {
    const e = this.config.embedDim;
    const p = this.config.posDim;
    const hDim = this.config.hiddenDim;
    const bosId = this.vocab.id(BOS);
    const eosId = this.vocab.id(EOS);
    const ctx = this.context(sample.inputIds);
    const targets = [...sample.targetIds, eosId];
    const dCtx = new Float64Array(e);
    let loss = 0;
    let prevId = bosId;
    for (let t = 0; t < targets.length; t++) {
      const target = targets[t];
      const { z, h, probs } = this.forwardStep(ctx, prevId, t);
      loss += -Math.log(Math.max(probs[target], 1e-12));

      // dlogits = probs - onehot(target)
      const dLogits = probs; // reuse buffer
      dLogits[target] -= 1;
      const dH = new Float64Array(hDim);
      for (let r = 0; r < this.vocab.size; r++) {
        const g = dLogits[r];
        if (g === 0) {
          continue;
        }
        this.b2.grad[r] += g;
        const base = r * hDim;
        for (let c = 0; c < hDim; c++) {
          this.w2.grad[base + c] += g * h[c];
          dH[c] += this.w2.data[base + c] * g;
        }
      }
      const dZ = new Float64Array(this.zDim);
      for (let r = 0; r < hDim; r++) {
        const g = dH[r] * (1 - h[r] * h[r]);
        this.b1.grad[r] += g;
        const base = r * this.zDim;
        for (let c = 0; c < this.zDim; c++) {
          this.w1.grad[base + c] += g * z[c];
          dZ[c] += this.w1.data[base + c] * g;
        }
      }
      for (let j = 0; j < e; j++) {
        dCtx[j] += dZ[j];
      }
      const prevBase = prevId * e;
      for (let j = 0; j < e; j++) {
        this.embed.grad[prevBase + j] += dZ[e + j];
      }
      const posIndex = Math.min(t, this.config.maxOutputTokens);
      const posBase = posIndex * p;
      for (let j = 0; j < p; j++) {
        this.posEmbed.grad[posBase + j] += dZ[2 * e + j];
      }
      prevId = target;
    }
    if (sample.inputIds.length > 0) {
      const share = 1 / sample.inputIds.length;
      for (const id of sample.inputIds) {
        const base = id * e;
        for (let j = 0; j < e; j++) {
          this.embed.grad[base + j] += dCtx[j] * share;
        }
      }
    }
    return loss / targets.length;
  }

  private adamUpdate(lr: number): void {
    this.step += 1;
    const beta1 = 0.9;
    const beta2 = 0.999;
    const eps = 1e-8;
    const c1 = 1 - Math.pow(beta1, this.step);
    const c2 = 1 - Math.pow(beta2, this.step);
    for (const tensor of this.parameters) {
      const { data, grad, m, v } = tensor;
      for (let i = 0; i < data.length; i++) {
        const g = grad[i];
        if (g === 0) {
          continue;
        }
        m[i] = beta1 * m[i] + (1 - beta1) * g;
        v[i] = beta2 * v[i] + (1 - beta2) * g * g;
        data[i] -= (lr * (m[i] / c1)) / (Math.sqrt(v[i] / c2) + eps);
        grad[i] = 0;
      }
    }
  }

  /** One epoch over the samples; returns the mean per-token loss. */
  trainEpoch(samples: readonly Sample[], shuffleSeed: number): number {
    const order = samples.map((_, i) => i);
    const random = rng(shuffleSeed);
    for (let i = order.length - 1; i > 0; i--) {
      const j = Math.floor(random() * (i + 1));
      [order[i], order[j]] = [order[j], order[i]];
    }
    let total = 0;
    let batchCount = 0;
    for (let at = 0; at < order.length; at += this.config.batchSize) {
      const batch = order.slice(at, at + this.config.batchSize);
      for (const index of batch) {
        total += this.backwardSample(samples[index]);
      }
      batchCount += 1;
      this.adamUpdate(this.config.learningRate);
    }
    return total / samples.length;
  }

  /** Beam search over output tokens; candidates sorted by score descending. */
  beamSearch(inputIds: readonly number[], k: number): Candidate[] {
    const bosId = this.vocab.id(BOS);
    const eosId = this.vocab.id(EOS);
    const ctx = this.context(inputIds);
    interface Beam {
      ids: number[];
      logProb: number;
      done: boolean;
    }
    let beams: Beam[] = [{ ids: [], logProb: 0, done: false }];
    const width = Math.max(k, 1);
    for (let t = 0; t < this.config.maxOutputTokens; t++) {
      const next: Beam[] = [];
      for (const beam of beams) {
        if (beam.done) {
          next.push(beam);
          continue;
        }
        const prevId = beam.ids.length === 0 ? bosId : beam.ids[beam.ids.length - 1];
        const { probs } = this.forwardStep(ctx, prevId, t);
        const ranked = Array.from(probs.keys())
          .sort((a, b) => probs[b] - probs[a])
          .slice(0, width + 1);
        for (const id of ranked) {
          const logProb = beam.logProb + Math.log(Math.max(probs[id], 1e-12));
          if (id === eosId) {
            next.push({ ids: beam.ids, logProb, done: true });
          } else {
            next.push({ ids: [...beam.ids, id], logProb, done: false });
          }
        }
      }
      next.sort((a, b) => b.logProb - a.logProb);
      beams = next.slice(0, width);
      if (beams.every((b) => b.done)) {
        break;
      }
    }
    const seen = new Set<string>();
    const out: Candidate[] = [];
    for (const beam of beams) {
      const tokens = this.vocab.decode(beam.ids);
      const key = tokens.join(" ");
      if (seen.has(key)) {
        continue;
      }
      seen.add(key);
      out.push({ tokens, score: beam.logProb });
      if (out.length >= k) {
        break;
      }
    }
    return out;
  }

  toCheckpoint(): object {
    return {
      format: "assertion-model-adapter/1",
      config: this.config,
      vocab: this.vocab.toJSON(),
      dims: {
        embed: [this.embed.rows, this.embed.cols],
        posEmbed: [this.posEmbed.rows, this.posEmbed.cols],
        w1: [this.w1.rows, this.w1.cols],
        b1: [this.b1.rows, this.b1.cols],
        w2: [this.w2.rows, this.w2.cols],
        b2: [this.b2.rows, this.b2.cols],
      },
      weights: {
        embed: Array.from(this.embed.data),
        posEmbed: Array.from(this.posEmbed.data),
        w1: Array.from(this.w1.data),
        b1: Array.from(this.b1.data),
        w2: Array.from(this.w2.data),
        b2: Array.from(this.b2.data),
      },
    };
  }

  static fromCheckpoint(payload: any): Seq2SeqModel {
    if (payload?.format !== "assertion-model-adapter/1") {
      throw new Error(`unsupported checkpoint format: ${payload?.format}`);
    }
    const config: TrainerConfig = { ...DEFAULT_CONFIG, ...payload.config };
    const vocab = Vocab.fromJSON(payload.vocab);
    const load = (name: string): Tensor => {
      const [rows, cols] = payload.dims[name];
      const tensor = new Tensor(rows, cols, () => 0);
      tensor.data.set(payload.weights[name]);
      return tensor;
    };
    return new Seq2SeqModel(
      vocab, config,
      load("embed"), load("posEmbed"), load("w1"), load("b1"), load("w2"), load("b2"),
    );
  }
}
