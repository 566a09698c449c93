import json
import random

FIVE_SENTENCES = ["a b c", "b c", "a d", "d e", "a e"]


def make_records(sentences):
    return [
        {"instruction": s, "response": f"resp {i}"}
        for i, s in enumerate(sentences)
    ]


def random_records(rng: random.Random, n=None, vocab_size=12, max_len=8):
    n = n if n is not None else rng.randint(1, 30)
    words = [f"w{i}" for i in range(vocab_size)]
    records = []
    for _ in range(n):
        instr = " ".join(rng.choice(words) for _ in range(rng.randint(1, max_len)))
        resp = " ".join(rng.choice(words) for _ in range(rng.randint(0, max_len)))
        records.append({"instruction": instr, "response": resp})
    return records


def jsonl(records):
    return "".join(json.dumps(r, sort_keys=True) + "\n" for r in records)
