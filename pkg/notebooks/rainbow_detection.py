"""
Rainbow cycles in coloured hypercubes and complete graphs
=========================================================

"""

# %%
# The coordinate colouring of a hypercube has no rainbow cycle at all:
# every cycle crosses each coordinate an even number of times.
from rainbow_forge import complete_one_factorization, hypercube, rainbow_cycle_exact

for m in range(2, 7):
    print(f"Q{m}:", rainbow_cycle_exact(hypercube(m)))

# %%
# A round-robin 1-factorization of K_n is the opposite extreme.
for n in range(4, 15, 2):
    K = complete_one_factorization(n)
    cyc = rainbow_cycle_exact(K)
    print(f"K{n}: cycle {cyc} colours {[K.colour(a, b) for a, b in zip(cyc, cyc[1:] + cyc[:1])]}")

# %%
# The split detector keeps a random half of the palette on one side and the
# rest on the other, then looks for a vertex reached from both sides.
from rainbow_forge.cli import threshold_scan

for row in threshold_scan("k1f-sub", [16], [2, 3, 4, 6, 8, 12, 15], trials=20, base_seed=0):
    print(row["degree"], row["frequency"], "flag" if row["monotone_flag"] else "")

# %%
# Hypercubes stay at zero however large they get.
for row in threshold_scan("hypercube", [16, 64, 256], [], trials=10, base_seed=0):
    print(row["n"], row["frequency"])
