/**
 * Whitespace model-token vocabulary over the dataset's space-joined streams.
 *
 * String/char literals arrive as single whitespace-free-or-quoted words from
 * the exporter, so a quote-aware split inverts the join exactly.
 */

export const PAD = "<PAD>";
export const BOS = "<BOS>";
export const EOS = "<EOS>";
export const UNK = "<UNK>";

/** Split a space-joined token stream, keeping quoted literals whole. */
export function splitTokens(joined: string): string[] {
  const out: string[] = [];
  let i = 0;
  const n = joined.length;
  while (i < n) {
    const c = joined[i];
    if (c === " " || c === "\t" || c === "\n") {
      i += 1;
      continue;
    }
    const start = i;
    if (c === '"' || c === "'") {
      i += 1;
      while (i < n) {
        const ch = joined[i];
        if (ch === "\\") {
          i += 2;
          continue;
        }
        if (ch === c) {
          i += 1;
          break;
        }
        i += 1;
      }
      while (i < n && joined[i] !== " " && joined[i] !== "\t" && joined[i] !== "\n") {
        i += 1;
      }
    } else {
      while (i < n && joined[i] !== " " && joined[i] !== "\t" && joined[i] !== "\n") {
        i += 1;
      }
    }
    out.push(joined.slice(start, i));
  }
  return out;
}

export class Vocab {
  readonly idByToken = new Map<string, number>();
  readonly tokens: string[] = [];

  constructor(tokens?: readonly string[]) {
    for (const special of [PAD, BOS, EOS, UNK]) {
      this.add(special);
    }
    if (tokens) {
      for (const token of tokens) {
        this.add(token);
      }
    }
  }

  add(token: string): number {
    const existing = this.idByToken.get(token);
    if (existing !== undefined) {
      return existing;
    }
    const id = this.tokens.length;
    this.tokens.push(token);
    this.idByToken.set(token, id);
    return id;
  }

  id(token: string): number {
    return this.idByToken.get(token) ?? this.idByToken.get(UNK)!;
  }

  get size(): number {
    return this.tokens.length;
  }

  encode(tokens: readonly string[]): number[] {
    return tokens.map((t) => this.id(t));
  }

  decode(ids: readonly number[]): string[] {
    return ids.map((id) => this.tokens[id] ?? UNK);
  }

  toJSON(): string[] {
    return [...this.tokens];
  }

  static fromJSON(tokens: readonly string[]): Vocab {
    const vocab = new Vocab();
    for (const token of tokens.slice(4)) {
      vocab.add(token);
    }
    return vocab;
  }
}
