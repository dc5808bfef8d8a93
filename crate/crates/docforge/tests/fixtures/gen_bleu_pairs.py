#!/usr/bin/env python3
"""Independent corpus-BLEU-4 reference used to freeze bleu_pairs.json.

Implements the original corpus BLEU definition directly: clipped n-gram
counts for n=1..4, uniform 1/4 weights in log space, brevity penalty
exp(1 - r/c) when c <= r.  Tokenization is lowercase + whitespace split,
matching the toolkit's declared tokenizer.  Run from this directory:

    python3 gen_bleu_pairs.py > bleu_pairs.json
"""
import json
import math
from collections import Counter


def ngrams(tokens, n):
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def corpus_bleu4(pairs):
    matched = [0] * 5
    total = [0] * 5
    cand_len = 0
    ref_len = 0
    for cand, ref in pairs:
        c = cand.lower().split()
        r = ref.lower().split()
        cand_len += len(c)
        ref_len += len(r)
        for n in range(1, 5):
            cg = ngrams(c, n)
            rg = ngrams(r, n)
            matched[n] += sum(min(count, rg[g]) for g, count in cg.items())
            total[n] += max(0, len(c) - n + 1)
    log_sum = 0.0
    for n in range(1, 5):
        if matched[n] == 0:
            return 0.0
        log_sum += 0.25 * math.log(matched[n] / total[n])
    bp = 1.0 if cand_len > ref_len else math.exp(1.0 - ref_len / cand_len)
    return bp * math.exp(log_sum)


PAIRS = [
    ("the cat sat on mat", "the cat sat on the mat"),
    ("the quick brown fox jumps over the lazy", "the quick brown fox jumps over the lazy"),
    ("a list of integer values to be sorted in place", "a list of integer values to sort"),
    ("the path to the output file. defaults to cwd.", "the path to the output file used by the writer."),
    ("number of n-grams to build", "int, number of n-grams to be built"),
    ("alpha beta gamma delta epsilon", "one two three four five"),
    ("the input frame", "the input frame to transform in place"),
    ("the cat sat on the mat the cat", "the cat sat on the mat"),
    ("The Quick Brown Fox Jumps High", "the quick brown fox jumps high"),
    ("whether to mutate the frame in place instead of copying",
     "whether to mutate the frame in place rather than returning a copy"),
]


def main():
    out = {
        "pairs": [
            {"candidate": c, "reference": r, "bleu4": corpus_bleu4([(c, r)])}
            for c, r in PAIRS
        ],
        "corpus_bleu4": corpus_bleu4(PAIRS),
    }
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
