"""
Almost-rainbow cycles and dissociated generating sets
=====================================================

"""

# %%
# Dense graphs: two colour sequences from a common root meet quickly, and the
# union of their walks holds a cycle with every colour at most twice.
from rainbow_forge import proof_degree, random_sub_factorization, search_almost_rainbow_cycle

for n in (256, 1024):
    d = proof_degree(n, 2)
    G = random_sub_factorization(n, 2 * d + 1, seed=0)
    found = search_almost_rainbow_cycle(G, 2)
    print(n, d, found.sequences, len(found.cycle.cycle), max(found.cycle.multiplicity.values()))

# %%
# Sparse side: high girth forces some colour to repeat often on every cycle.
from rainbow_forge import construct_almost_rainbow_lower_bound, girth

G = construct_almost_rainbow_lower_bound(2, 3, 30, seed=1)
print("girth", girth(G), "colours", G.colour_count)

# %%
# Transpositions of S3 are dissociated; their product lift stays dissociated
# and the translation graph has no short rainbow cycle.
from rainbow_forge import (
    Symmetric,
    is_dissociated,
    lift_dissociated_product,
    rainbow_cycle_exact,
    translation_bipartite_graph,
)

S3 = Symmetric(3)
T3 = S3.transpositions()
print(is_dissociated(S3, T3).to_record(S3))
P, lifted = lift_dissociated_product(S3, T3, 2)
B = translation_bipartite_graph(P, lifted)
print(B.n, "vertices, rainbow cycle up to 6:", rainbow_cycle_exact(B, 6))

# %%
# Largest dissociated sets of transpositions for small k.
from rainbow_forge import dim_transpositions

print({k: dim_transpositions(k) for k in range(2, 6)})
