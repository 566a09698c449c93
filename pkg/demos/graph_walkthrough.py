"""Step through selection on a tiny 5-sentence corpus.

Builds the unigram graph for five short sentences, prints the adjacency,
then runs degree-priority selection with budget 2 and narrates what each
pick covers and removes. The two picks together cover every unigram.
"""

from ngramcover import (
    ContentSide,
    PriorityMode,
    SelectionConfig,
    TrainingInstance,
    build_graph,
    coverage,
    remove_selected,
    select,
)

SENTENCES = ["a b c", "b c", "a d", "d e", "a e"]


def main():
    instances = [
        TrainingInstance(i, s, "") for i, s in enumerate(SENTENCES)
    ]
    graph, stats = build_graph(instances, ContentSide.INSTRUCTION, orders={1})

    print("corpus:")
    for inst in instances:
        print(f"  sentence {inst.id}: {inst.instruction!r}")
    print(f"\n{len(graph.ngrams)} distinct unigrams, {graph.edge_count} edges")
    for u in sorted(graph.live_sentences):
        toks = sorted(graph.ngrams[v].text() for v in graph.neighbors(u))
        print(f"  sentence {u} -> {toks}  (degree {graph.degree(u)})")

    print("\ndegree-priority selection, budget 2:")
    result = select(graph, stats, None, SelectionConfig(2, PriorityMode.UNIFORM))
    g = graph.copy()
    for step in result.steps:
        record = remove_selected(g, step.sentence_id)
        covered = sorted(g.ngrams[v].text() for v in record.covered_ngrams)
        print(
            f"  pick sentence {step.sentence_id} (priority {step.priority:.0f}): "
            f"covers {covered}, {g.edge_count} edges remain"
        )

    print(f"\nselected {result.selected}, coverage {coverage(result.selected, graph):.2f}")
    print("tf-idf note: every unigram here has weight tf*ln(5/df):")
    for v, g_ in enumerate(graph.ngrams):
        print(f"  {g_.text()!r}: tf={stats.tf[v]} df={stats.df[v]} weight={stats.tfidf[v]:.3f}")


if __name__ == "__main__":
    main()
