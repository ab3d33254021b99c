"""
Expander extraction and the colour-splitting process
====================================================

"""

# %%
# Extraction keeps the densest part of a graph relative to log of its size.
# A clique glued to a long path loses the path.
from rainbow_forge import ColoredGraph, complete_one_factorization, extract_expander

K6 = complete_one_factorization(6)
G = ColoredGraph.from_edges(16, list(K6.edges) + [(6 + i, 7 + i, i % 2) for i in range(9)])
H, cert = extract_expander(G)
print("kept", cert.vertices, "ratio", round(cert.ratio, 4), "certified", cert.passed)

# %%
# The nested chain: checkpoint reachable-set sizes shrink as colours drop out.
from rainbow_forge import ProcessConfig, run_splitting_trial, summarize_trials

K = complete_one_factorization(16)
cfg = ProcessConfig.for_graph(K.n)
print(cfg.to_record())
records = [run_splitting_trial(K, 0, cfg, seed) for seed in range(200)]
for rec in records[:5]:
    print(rec.seed, rec.checkpoints, rec.complement_size, rec.cycle)
print(summarize_trials(records, cfg))

# %%
# Keeping each colour of Q10 with probability 1/2 leaves only small pieces.
import statistics

from rainbow_forge import color_split_components, hypercube

Q = hypercube(10)
largest = [color_split_components(Q, seed)[0] / Q.n for seed in range(200)]
print("median largest fraction", statistics.median(largest))

# %%
# Exact conditional probabilities against their lower bounds at T = 10.
from rainbow_forge import chain_probability_exact, lemma_bound

for i, j in [(0, 2), (0, 5), (3, 8)]:
    print("a", i, j, chain_probability_exact(i, j, 10, "a"), ">=", lemma_bound(i, j, 10, "a"))
for i, j in [(0, 1), (2, 5)]:
    print("b", i, j, chain_probability_exact(i, j, 10, "b"), ">=", lemma_bound(i, j, 10, "b"))
