import assert from "node:assert/strict";
import { spawn } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { createInterface } from "node:readline";
import { test } from "node:test";
import { fileURLToPath } from "node:url";

import { main as trainMain } from "../src/train.js";

const here = fileURLToPath(new URL(".", import.meta.url));
const SERVE = join(here, "..", "src", "serve.js");

const SAMPLES: Array<[string, string, string]> = [
  ["s0", "void t0 ( ) { int a = f ( 1 ) ; <ASSERTION> }", "assertEquals ( a , 1 ) ;"],
  ["s1", "void t1 ( ) { int b = g ( 2 ) ; <ASSERTION> }", "assertTrue ( b > 0 ) ;"],
  ["s2", "void t2 ( ) { String s = h ( ) ; <ASSERTION> }", "assertNotNull ( s ) ;"],
  ["s3", "void t3 ( ) { Object o = mk ( ) ; <ASSERTION> }", "assertNull ( o ) ;"],
  ["s4", "void t4 ( ) { boolean z = ok ( ) ; <ASSERTION> }", "assertFalse ( z ) ;"],
];

function writeDataset(dir: string): string {
  const path = join(dir, "train.jsonl");
  const lines = SAMPLES.map(([sid, input, truth]) =>
    JSON.stringify({
      sample_id: sid,
      input_variant: "test_only",
      token_form: "raw",
      masked_input: input,
      truth_assertion: truth,
      assertion_kind: "assertEquals",
      group_key: sid,
      subset: "up_to_ten",
      dictionary: null,
    }),
  );
  writeFileSync(path, lines.join("\n") + "\n");
  return path;
}

function trainCheckpoint(dir: string): string {
  const data = writeDataset(dir);
  const ckpt = join(dir, "ckpt");
  const code = trainMain([
    "--data", data, "--out", ckpt,
    "--epochs", "300", "--lr", "0.03", "--batch-size", "5",
    "--embed", "24", "--hidden", "48",
    "--max-input", "64", "--max-output", "16", "--seed", "11",
  ]);
  assert.equal(code, 0);
  return ckpt;
}

interface Pending {
  resolve: (line: string) => void;
}

function startServer(ckpt: string) {
  const proc = spawn(process.execPath, [SERVE, "--checkpoint", ckpt], {
    stdio: ["pipe", "pipe", "inherit"],
  });
  const reader = createInterface({ input: proc.stdout });
  const queue: string[] = [];
  const waiting: Pending[] = [];
  reader.on("line", (line) => {
    const next = waiting.shift();
    if (next) {
      next.resolve(line);
    } else {
      queue.push(line);
    }
  });
  return {
    proc,
    send(request: unknown): void {
      proc.stdin.write(JSON.stringify(request) + "\n");
    },
    sendRaw(line: string): void {
      proc.stdin.write(line + "\n");
    },
    readLine(): Promise<string> {
      const queued = queue.shift();
      if (queued !== undefined) {
        return Promise.resolve(queued);
      }
      return new Promise((resolve) => waiting.push({ resolve }));
    },
    close(): void {
      proc.stdin.end();
      proc.kill();
    },
  };
}

test("protocol loopback: order-preserving ids and ranked candidates", async () => {
  const dir = mkdtempSync(join(tmpdir(), "adapter-"));
  const ckpt = trainCheckpoint(dir);
  const server = startServer(ckpt);
  try {
    for (const [sid, input] of SAMPLES) {
      server.send({ id: sid, masked_input: input, token_form: "raw", k: 3 });
    }
    for (const [sid, , truth] of SAMPLES) {
      const response = JSON.parse(await server.readLine());
      assert.equal(response.id, sid);
      assert.ok(Array.isArray(response.candidates));
      assert.ok(response.candidates.length <= 3);
      assert.equal(response.candidates[0].text, truth);
      for (let i = 1; i < response.candidates.length; i += 1) {
        assert.ok(response.candidates[i - 1].score >= response.candidates[i].score);
      }
    }
  } finally {
    server.close();
  }
});

test("k=1 yields at most one candidate", async () => {
  const dir = mkdtempSync(join(tmpdir(), "adapter-"));
  const ckpt = trainCheckpoint(dir);
  const server = startServer(ckpt);
  try {
    server.send({ id: "one", masked_input: SAMPLES[0][1], token_form: "raw", k: 1 });
    const response = JSON.parse(await server.readLine());
    assert.equal(response.id, "one");
    assert.ok(response.candidates.length <= 1);
  } finally {
    server.close();
  }
});

test("malformed request line yields an error response with the same id", async () => {
  const dir = mkdtempSync(join(tmpdir(), "adapter-"));
  const ckpt = trainCheckpoint(dir);
  const server = startServer(ckpt);
  try {
    server.send({ id: "bad", token_form: "raw", k: 2 }); // masked_input missing
    const bad = JSON.parse(await server.readLine());
    assert.equal(bad.id, "bad");
    assert.deepEqual(bad.candidates, []);
    assert.ok(bad.error.includes("masked_input"));

    server.sendRaw("this is not json");
    const unparseable = JSON.parse(await server.readLine());
    assert.equal(unparseable.id, null);
    assert.deepEqual(unparseable.candidates, []);
    assert.ok(unparseable.error.length > 0);

    // the process keeps serving afterwards
    server.send({ id: "after", masked_input: SAMPLES[1][1], token_form: "raw", k: 1 });
    const after = JSON.parse(await server.readLine());
    assert.equal(after.id, "after");
  } finally {
    server.close();
  }
});
