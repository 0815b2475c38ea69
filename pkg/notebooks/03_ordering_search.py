# %% [markdown]
# # Searching for the most stable hierarchy
#
# Branch-and-bound gives the exact minimum of `mu_E` and every ordering that
# attains it; the genetic algorithm is an independent heuristic check.

# %%
import time

from padicgrn import builtin_dataset, build_transition_map
from padicgrn.search import (GAConfig, branch_and_bound_minimize, format_partial_order,
                             ga_minimize, minimizer_symmetry, partial_order_summary)

net = builtin_dataset("athaliana13")
f = build_transition_map(net)

t0 = time.perf_counter()
bb = branch_and_bound_minimize(f)
print(f"bnb: {bb.best_score}, {len(bb.minimizers)} minimizers, certified={bb.certified}, "
      f"{time.perf_counter() - t0:.1f}s")
print("representative:", " ".join(net.gene_names[g] for g in bb.representative))

# %% [markdown]
# Which position swaps map the optimal set onto itself, and which genes are
# interchangeable.

# %%
print("symmetry", minimizer_symmetry(bb.minimizers, f))
print(format_partial_order(partial_order_summary(bb.minimizers, net.gene_names)))

# %%
ga = ga_minimize(f, GAConfig(seed=1))  # population 200, 500 generations
print("ga best", ga.best_score, "matches bnb:", ga.best_score == bb.best_score)
