#!/usr/bin/env python3
"""Regenerates the synthetic training corpus and its random word vectors.

Sentences are drawn from fixed templates with one slot per entity category,
so every entity category appears in predictable contexts.
"""
import random

SEED = 20240917
DIM = 16

PER = [["John", "Smith"], ["Maria"], ["Ahmed", "Khan"], ["Li", "Wei"], ["Peter"], ["Anna", "Berg"]]
LOC = [["Paris"], ["New", "York"], ["Cairo"], ["Lake", "Tahoe"], ["Berlin"], ["Lima"]]
ORG = [["Acme", "Corp"], ["Reuters"], ["United", "Nations"], ["Globex"], ["Red", "Cross"]]
MISC = [["German"], ["Olympic", "Games"], ["Nobel", "Prize"], ["French"], ["World", "Cup"]]

TEMPLATES = [
    "{PER} visited {LOC} last week .",
    "{ORG} opened an office in {LOC} .",
    "{PER} joined {ORG} in March .",
    "the {MISC} team arrived in {LOC} .",
    "{PER} won the {MISC} .",
    "officials from {ORG} met {PER} .",
    "{LOC} hosted the {MISC} again .",
    "{PER} said {ORG} would grow .",
    "a {MISC} citizen left {LOC} .",
    "shares of {ORG} fell sharply .",
]

POOLS = {"PER": PER, "LOC": LOC, "ORG": ORG, "MISC": MISC}


def sentence(rng, template):
    out = []
    for word in template.split():
        if word.startswith("{"):
            cat = word[1:-1]
            ent = rng.choice(POOLS[cat])
            for i, tok in enumerate(ent):
                out.append((tok, ("B-" if i == 0 else "I-") + cat))
        else:
            out.append((word, "O"))
    return out


def main():
    rng = random.Random(SEED)
    sents = [sentence(rng, TEMPLATES[i % len(TEMPLATES)]) for i in range(50)]
    with open("synthetic_train.conll", "w") as f:
        for s in sents:
            for tok, tag in s:
                f.write(f"{tok} {tag}\n")
            f.write("\n")
    words = []
    for s in sents:
        for tok, _ in s:
            if tok not in words:
                words.append(tok)
    with open("synthetic_vectors.txt", "w") as f:
        f.write(f"{len(words)} {DIM}\n")
        for w in words:
            f.write(w + " " + " ".join(f"{rng.uniform(-1, 1):.6f}" for _ in range(DIM)) + "\n")


if __name__ == "__main__":
    main()
