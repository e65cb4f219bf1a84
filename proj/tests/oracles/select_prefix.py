#!/usr/bin/env python3
"""Sort-and-prefix oracle for token-budgeted selection.

Generates candidates (id, tokens, fluency, ad) with Python's own RNG, ranks by
0.5*fluency + 0.5*(1 - ad) descending then id ascending, and keeps the longest
prefix whose token total fits the budget (half of all tokens).

Usage: select_prefix.py OUT_CANDIDATES OUT_EXPECTED
"""
import json
import random
import sys


def main():
    rng = random.Random(20240601)
    cands = []
    for i in range(1000):
        fluency = round(rng.random(), 6)
        ad = round(rng.random(), 6)
        if i % 50 == 0 and cands:  # exact score ties exercise the id tie-break
            fluency, ad = cands[-1]["fluency"], cands[-1]["ad"]
        cands.append({"id": "q%04d" % rng.randrange(10000) + "-%d" % i,
                      "tokens": rng.randint(1, 500), "fluency": fluency, "ad": ad})
    budget = sum(c["tokens"] for c in cands) // 2
    ranked = sorted(cands, key=lambda c: (-(0.5 * c["fluency"] + 0.5 * (1 - c["ad"])), c["id"]))
    chosen, used = [], 0
    for c in ranked:
        if used + c["tokens"] > budget:
            break
        used += c["tokens"]
        chosen.append(c["id"])
    with open(sys.argv[1], "w") as f:
        for c in cands:
            f.write(json.dumps(c) + "\n")
    with open(sys.argv[2], "w") as f:
        json.dump({"budget": budget, "selected_tokens": used, "selected": chosen}, f, indent=0)
        f.write("\n")


if __name__ == "__main__":
    main()
