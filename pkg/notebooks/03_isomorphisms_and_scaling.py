# %% [markdown]
# # Isomorphisms between schemes, and a timing series

# %%
import time

import numpy as np

from twoclosure import (
    ColorBijection,
    Permutation,
    dihedral,
    iso_colored,
    iso_schemes,
    paley_group,
    scheme_of_group,
    solve_two_closure,
)

# %% [markdown]
# ## Pentagon against a relabeled pentagon
# Uncolored, the pentagon and pentagram may swap, so 20 maps come back;
# holding the colors fixed halves that.

# %%
D5 = dihedral(5)
z = Permutation([3, 0, 4, 1, 2])
D5z = D5.conjugate(z)
S = iso_schemes(D5, D5z, 0)
print(len(S), z in S)

X, Y = scheme_of_group(D5), scheme_of_group(D5z)
psi = ColorBijection.induced(X, Y, z)
C = iso_colored(D5, D5z, psi, 0)
print(len(C), z in C)

# %% [markdown]
# Swapping the two off-diagonal colors is realized by x -> 2x.

# %%
d, e, f = 0, int(X.colors[0, 1]), int(X.colors[0, 2])
swap = ColorBijection.from_pairs([(d, d), (e, f), (f, e)])
print([p.images for p in iso_colored(D5, D5, swap, 0)][:3])

# %% [markdown]
# ## Timing on uniprimitive affine groups
# V ⋊ (squares of GF(q)*), q = 9, 25, 49, 121.

# %%
orders, times = [], []
for p in (3, 5, 7, 11):
    G = paley_group(p, 2)
    t0 = time.perf_counter()
    res = solve_two_closure(G, 0)
    times.append(time.perf_counter() - t0)
    orders.append(G.order())
    print(f"q={p * p:<4} |G|={G.order():<6} |G2|={res.group.order():<7} step {res.step}  {times[-1]:.2f}s")

slope = np.polyfit(np.log(orders), np.log(np.maximum(times, 1e-3)), 1)[0]
print("log-log slope", round(slope, 2))
