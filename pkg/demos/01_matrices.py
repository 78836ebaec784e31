# %% [markdown]
# Standard and optimized parity-check matrices for the short BCH codes.

# %%
from __future__ import annotations

import numpy as np

from shortbch.bch import code_from_nk, standard_pcm
from shortbch.gf2 import weight_profile
from shortbch.pcmopt import build_optimized_pcm, rank_deficiency_report

# %%
# cyclic shifts of h(x) stacked: dense, uniform row weight, many 4-cycles
for n, k in [(63, 36), (63, 45), (127, 64), (127, 78), (127, 99)]:
    h = standard_pcm(code_from_nk(n, k))
    print(f"({n},{k})", weight_profile(h).table_row())

# %%
spec = code_from_nk(63, 45)
pcm = build_optimized_pcm(spec, beta=2)
print(pcm.matrix.shape, pcm.profile.table_row())
print("row weights", np.unique(pcm.matrix.sum(axis=1)))

# %%
# do the lightest rows found span the whole dual code?
for n, k in [(63, 45), (63, 36)]:
    w, r, full = rank_deficiency_report(build_optimized_pcm(code_from_nk(n, k)))
    print(f"({n},{k}) weight {w}: rank {r} of {n - k}, full={full}")
