import json
import random

import pytest

from ngramcover import (
    ContentSide,
    TrainingInstance,
    build_graph,
    parse_records,
)

# Five unigram-only sentences inducing the minimal worked example:
# u1 touches {v1,v2,v3}, u2 {v2,v3}, u3 {v1,v4}, u4 {v4,v5}, u5 {v1,v5};
# 11 edges, optimal full cover {u1, u4}.
FIVE_SENTENCES = ["a b c", "b c", "a d", "d e", "a e"]


def make_instances(instructions, responses=None):
    responses = responses or [""] * len(instructions)
    return [
        TrainingInstance(i, instr, resp)
        for i, (instr, resp) in enumerate(zip(instructions, responses))
    ]


@pytest.fixture
def five_sentence_graph():
    instances = make_instances(FIVE_SENTENCES)
    graph, stats = build_graph(instances, ContentSide.INSTRUCTION, orders={1})
    return instances, graph, stats


def random_corpus(rng: random.Random, n=None, vocab_size=None, max_len=8):
    """Random instruction/response corpus for property sweeps."""
    n = n or rng.randint(1, 30)
    vocab_size = vocab_size or rng.randint(2, 20)
    vocab = [f"w{i}" for i in range(vocab_size)]
    instructions = [
        " ".join(rng.choices(vocab, k=rng.randint(1, max_len))) for _ in range(n)
    ]
    responses = [
        " ".join(rng.choices(vocab, k=rng.randint(0, max_len))) for _ in range(n)
    ]
    return make_instances(instructions, responses)


def jsonl(records):
    return "\n".join(json.dumps(r) for r in records) + "\n"


@pytest.fixture
def write_jsonl(tmp_path):
    def _write(name, records_or_text):
        p = tmp_path / name
        if isinstance(records_or_text, str):
            p.write_text(records_or_text, encoding="utf-8")
        else:
            p.write_text(jsonl(records_or_text), encoding="utf-8")
        return p

    return _write
