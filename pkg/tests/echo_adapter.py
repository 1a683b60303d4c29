"""Loopback adapter used by the predictor tests and the acceptance suite.

Modes (argv[1], default "echo"):
  echo     one candidate equal to the request's truth_hint
  dozen    12 numbered candidates, truth_hint first
  garbage  an unparseable response line
  slow     sleeps 5s before answering (for timeout tests)
"""

import json
import sys
import time


def main() -> None:
    mode = sys.argv[1] if len(sys.argv) > 1 else "echo"
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        request = json.loads(line)
        if mode == "garbage":
            print("not json at all")
            sys.stdout.flush()
            continue
        if mode == "slow":
            time.sleep(5)
        hint = request.get("truth_hint", "assertTrue(true);")
        if mode == "dozen":
            candidates = [{"text": hint, "score": 1.0}] + [
                {"text": f"assertEquals(x{i}, {i});", "score": 1.0 - i / 100.0}
                for i in range(1, 12)
            ]
        else:
            candidates = [{"text": hint, "score": 1.0}]
        print(json.dumps({"id": request["id"], "candidates": candidates}))
        sys.stdout.flush()


if __name__ == "__main__":
    main()
