# %% [markdown]
# Relative decoding cost on the (63,45) code, normalized to mRRD(1).

# %%
from __future__ import annotations

from shortbch.hybrid import TABLE_63_45, complexity_ratio, hybrid_cost

base = TABLE_63_45[0]
for e in TABLE_63_45:
    print(f"{e.name:13s} cost {e.cost:6d}  ratio {complexity_ratio(e, base):.2g}")

# %%
# OSD only runs on NMS failures, so its cost is weighted by the failure rate
nms = TABLE_63_45[-1].cost
for f1 in (0.5, 0.1, 0.01):
    print(f"F1={f1}: expected cost {hybrid_cost(nms, 50_000, f1):.0f}")
