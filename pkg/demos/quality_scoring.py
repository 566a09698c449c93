"""Show how perplexity-ratio quality scores are built and consumed.

The score of an instance is ppl(response | instruction) / ppl(response).
Part 1 computes handcrafted examples from explicit perplexity pairs, the way
a sidecar file produced by a real language model would: a response its
instruction makes easier to predict scores below 1.

Part 2 runs the built-in bigram scorer over a tiny corpus. It is a crude
deterministic stand-in (only the first response token's context differs
between the two perplexities), so its scores cluster near 1 -- the point is
the mechanics and the determinism, not the absolute values. Selection
multiplies these scores into its priority, so only their relative order
matters.
"""

from ngramcover import QualityRecord, TrainingInstance, builtin_quality, superfilter_score

SIDECAR_EXAMPLES = [
    # (label, ppl(y|x), ppl(y)) -- numbers a neural scorer might emit.
    ("response the instruction strongly predicts", 4.2, 19.7),
    ("response loosely related to its instruction", 12.8, 15.1),
    ("response the instruction does not help at all", 16.0, 15.9),
    ("instruction that actively misleads the model", 31.5, 14.2),
]

CORPUS = [
    ("repeat after me the quick brown fox", "the quick brown fox"),
    ("say the words good morning sunshine", "good morning sunshine"),
    ("what is the capital of france", "paris is the capital of france"),
    ("what is the capital of france", "mitochondria produce cellular energy"),
]


def main():
    print("scores from explicit perplexity pairs (as a sidecar file carries):")
    print(f"  {'ppl(y|x)':>9}  {'ppl(y)':>7}  {'score':>6}")
    for label, cond, plain in SIDECAR_EXAMPLES:
        record = QualityRecord.from_perplexities(0, cond, plain)
        print(f"  {cond:>9.1f}  {plain:>7.1f}  {record.score:>6.3f}  {label}")
    print("  (score < 1: instruction helps; > 1: instruction hurts)")

    print("\nscale invariance: the ratio ignores any uniform perplexity scale")
    print(f"  score(4.2, 19.7)      = {superfilter_score(4.2, 19.7):.6f}")
    print(f"  score(42.0, 197.0)    = {superfilter_score(42.0, 197.0):.6f}")

    instances = [
        TrainingInstance(i, instr, resp) for i, (instr, resp) in enumerate(CORPUS)
    ]
    records = builtin_quality(instances)
    print("\nbuilt-in bigram stand-in on a toy corpus (deterministic, near-1 scores):")
    print(f"  {'id':>2}  {'ppl(y|x)':>9}  {'ppl(y)':>7}  {'score':>6}  response")
    for i, inst in enumerate(instances):
        r = records[i]
        print(
            f"  {i:>2}  {r.ppl_conditional:>9.3f}  {r.ppl_plain:>7.3f}  "
            f"{r.score:>6.3f}  {inst.response!r}"
        )


if __name__ == "__main__":
    main()
