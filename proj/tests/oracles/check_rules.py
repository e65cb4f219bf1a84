#!/usr/bin/env python3
"""Independent evaluation of the eighteen document drop rules.

Usage: check_rules.py FILE...
Prints the failing rules for each file; exits non-zero if any file fails one.
Written from the rule definitions alone, without reference to the C++ code.
"""
import re
import sys
import unicodedata
from collections import Counter

STOP = {"the", "be", "to", "of", "and", "that", "have", "with"}
IMAGE_EXT = {"png", "jpg", "jpeg", "gif", "webp", "svg"}
TOP_NGRAM = {2: 0.20, 3: 0.18, 4: 0.16}
DUP_NGRAM = {5: 0.15, 6: 0.14, 7: 0.13, 8: 0.12, 9: 0.11, 10: 0.10}


def is_letter(c):
    return unicodedata.category(c).startswith("L")


def is_punct(c):
    return unicodedata.category(c).startswith("P")


def norm(w):
    core = w
    while core and is_punct(core[0]):
        core = core[1:]
    while core and is_punct(core[-1]):
        core = core[:-1]
    return (core or w).lower()


def ngram_fraction(words, n, top):
    total = sum(len(w) for w in words)
    if total == 0 or len(words) < n:
        return 0.0
    keys = [tuple(norm(w) for w in words[i:i + n]) for i in range(len(words) - n + 1)]
    counts = Counter(keys)
    covered = [False] * len(words)
    if top:
        best = max(counts.values())
        if best < 2:
            return 0.0
        best_cov = 0
        for key, c in counts.items():
            if c != best:
                continue
            mark = [False] * len(words)
            for i, k in enumerate(keys):
                if k == key:
                    for j in range(i, i + n):
                        mark[j] = True
            best_cov = max(best_cov, sum(len(w) for w, m in zip(words, mark) if m))
        return best_cov / total
    for i, k in enumerate(keys):
        if counts[k] >= 2:
            for j in range(i, i + n):
                covered[j] = True
    return sum(len(w) for w, m in zip(words, covered) if m) / total


def dup_fraction(segments):
    seen, total, dup = set(), 0, 0
    for s in segments:
        total += len(s)
        if s in seen:
            dup += len(s)
        seen.add(s)
    return dup / total if total else 0.0


def url_token(w):
    w = w.strip("()[]<>{}\"'.,;:!?")
    lw = w.lower()
    return (lw.startswith("http://") and len(w) > 7) or (lw.startswith("https://") and len(w) > 8) or \
        (lw.startswith("www.") and len(w) > 4)


def failing(text):
    words = text.split()
    wc = len(words)
    fails = []
    nonspace = Counter(c for c in text if not c.isspace())
    if nonspace:
        top = max(nonspace.values())
        char = min(c for c, n in nonspace.items() if n == top)
        if not is_letter(char):
            fails.append(1)
    letters = sum(1 for c in text if is_letter(c))
    digits = sum(1 for c in text if unicodedata.category(c) == "Nd")
    if digits and letters / digits < 0.46:
        fails.append(2)
    if wc:
        frac = max(Counter(norm(w) for w in words).values()) / wc
        if frac > (0.30 if wc <= 500 else 0.075):
            fails.append(3)
    if wc < 50 or wc > 100000:
        fails.append(4)
    if wc and sum(1 for w in words if any(is_letter(c) for c in w)) / wc < 0.8:
        fails.append(5)
    if sum(1 for w in words if norm(w) in STOP) < 2:
        fails.append(6)
    mean = sum(len(w) for w in words) / wc if wc else 0.0
    if mean < 3 or mean > 10:
        fails.append(7)
    lines = [l for l in text.split("\n") if l.strip()]
    lens = sorted((len(l) for l in lines), reverse=True)
    if len(lines) < 3 or lens[2] < 20:
        fails.append(8)
    paras = [p.strip("\n") for p in re.split(r"\n{2,}", text)]
    paras = [p for p in paras if p.strip()]
    r9 = dup_fraction(lines) > 0.30 or dup_fraction(paras) > 0.30
    r9 = r9 or any(ngram_fraction(words, n, True) > t for n, t in TOP_NGRAM.items())
    r9 = r9 or any(ngram_fraction(words, n, False) > t for n, t in DUP_NGRAM.items())
    if r9:
        fails.append(9)
    symbols = text.count("#") + text.count("…") + text.count("...")
    if wc and symbols / wc > 1.2:
        fails.append(10)
    if text.strip(" \r\n\t") == "":
        fails.append(11)
    if " " * 500 in text or "\n" * 8 in text:
        fails.append(12)
    if text and text.count("\n") / len(text) > 0.25:
        fails.append(13)
    if "�" in text or any(0x80 <= ord(c) <= 0x9F for c in text):
        fails.append(14)
    if any(len(w) > 45 for w in words):
        fails.append(15)
    sentence, longest = 0, 0
    for w in words:
        sentence += 1
        if w[-1] in ".!?":
            longest, sentence = max(longest, sentence), 0
    if max(longest, sentence) > 56:
        fails.append(16)
    if text.rstrip().endswith(":"):
        fails.append(17)
    image = False
    for w in words:
        if not url_token(w):
            continue
        path = re.split(r"[?#]", w.strip("()[]<>{}\"'.,;:!?"))[0].lower()
        tail = path.rsplit("/", 1)[-1]
        if "." in tail and tail.rsplit(".", 1)[1] in IMAGE_EXT:
            image = True
    if image or (words and all(url_token(w) for w in words)):
        fails.append(18)
    return fails


def main(paths):
    bad = False
    for p in paths:
        with open(p, encoding="utf-8") as f:
            fails = failing(f.read())
        print(p, "OK" if not fails else " ".join(f"R{r}" for r in fails))
        bad = bad or bool(fails)
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
