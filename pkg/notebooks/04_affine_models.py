# %% [markdown]
# # Local affine models on 2-adic balls
#
# On each level-n ball the map is replaced by `g(z) = A (z - m) + beta` with
# `|A| = t * 2**n`. We sample deep 2-adic points in each ball and confirm that
# their images stay inside the predicted image ball.

# %%
from padicgrn import builtin_dataset, build_transition_map
from padicgrn.affine import build_affine_model, verify_level

toy = build_transition_map(builtin_dataset("toy4"))
for mod in build_affine_model(toy, None, 1):
    print(mod.ball, mod.describe(), "t =", mod.t)

# %%
for n in (1, 2, 3):
    reps = verify_level(toy, None, n, samples=200)
    print(n, all(r.ok for r in reps))

# %% [markdown]
# Expanding balls have `|A| > 1`, but `z - m` is divisible by `2**n`, so the
# product is still a 2-adic integer.

# %%
net = builtin_dataset("athaliana13")
f = build_transition_map(net)
pi_star = net.ordering_indices(net.orderings["pi_star"])
for mod in build_affine_model(f, pi_star, 2):
    print(mod.ball, mod.cls.name.lower(), mod.describe())
