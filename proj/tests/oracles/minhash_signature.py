#!/usr/bin/env python3
"""Reference MinHash signature for the pinned-value test.

Re-implements mt19937_64, the FNV-1a/splitmix64 string hash and the
(a*x + b) mod (2^61 - 1) permutations from scratch, and prints the first
signature entry and a folded digest of all entries.

Usage: minhash_signature.py "TEXT" [NUM_PERM] [SEED]
"""
import sys

M64 = (1 << 64) - 1
P = (1 << 61) - 1


class MT19937_64:
    def __init__(self, seed):
        self.mt = [0] * 312
        self.mt[0] = seed & M64
        for i in range(1, 312):
            prev = self.mt[i - 1]
            self.mt[i] = (6364136223846793005 * (prev ^ (prev >> 62)) + i) & M64
        self.index = 312

    def twist(self):
        upper, lower = 0xFFFFFFFF80000000, 0x7FFFFFFF
        for i in range(312):
            x = (self.mt[i] & upper) | (self.mt[(i + 1) % 312] & lower)
            xa = x >> 1
            if x & 1:
                xa ^= 0xB5026F5AA96619E9
            self.mt[i] = self.mt[(i + 156) % 312] ^ xa
        self.index = 0

    def next(self):
        if self.index >= 312:
            self.twist()
        y = self.mt[self.index]
        self.index += 1
        y ^= (y >> 29) & 0x5555555555555555
        y ^= (y << 17) & 0x71D67FFFEDA60000
        y ^= (y << 37) & 0xFFF7EEE000000000
        y ^= y >> 43
        return y & M64


def mix64(z):
    z = (z + 0x9E3779B97F4A7C15) & M64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & M64
    return z ^ (z >> 31)


def stable_hash64(data):
    h = 0xCBF29CE484222325
    for c in data:
        h ^= c
        h = (h * 0x100000001B3) & M64
    return mix64(h ^ len(data))


def shingles(text, n=5):
    words = text.lower().split()
    if not words:
        return set()
    if len(words) < n:
        return {" ".join(words)}
    return {" ".join(words[i:i + n]) for i in range(len(words) - n + 1)}


def main():
    text = sys.argv[1]
    num_perm = int(sys.argv[2]) if len(sys.argv) > 2 else 128
    seed = int(sys.argv[3]) if len(sys.argv) > 3 else 1
    rng = MT19937_64(seed)
    perms = []
    for _ in range(num_perm):
        a = 1 + rng.next() % (P - 1)
        b = rng.next() % P
        perms.append((a, b))
    sig = [M64] * num_perm
    for s in shingles(text):
        x = stable_hash64(s.encode("utf-8")) % P
        for i, (a, b) in enumerate(perms):
            sig[i] = min(sig[i], (a * x + b) % P)
    folded = 0
    for v in sig:
        folded = mix64(folded ^ v)
    print(sig[0], folded)


if __name__ == "__main__":
    main()
