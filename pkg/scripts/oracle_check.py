"""Sampler against brute-force inference on the small fixtures."""

import sys

from osa.checks import oracle_check

if __name__ == "__main__":
    results = oracle_check(int(sys.argv[1]) if len(sys.argv) > 1 else 0)
    for r in results:
        print(r.line())
    sys.exit(0 if all(r.passed for r in results) else 1)
