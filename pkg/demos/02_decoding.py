# %% [markdown]
# One SNR point on BCH(63,36): plain NMS, dilated NMS, OSD and the hybrid.

# %%
from __future__ import annotations

from shortbch.bch import code_from_nk
from shortbch.channel import ChannelConfig
from shortbch.pcmopt import build_optimized_pcm
from shortbch.presets import CALIBRATED_ALPHA
from shortbch.sim import StopRule, make_decoder, run_point

spec = code_from_nk(63, 36)
h = build_optimized_pcm(spec, beta=20).matrix
alpha = CALIBRATED_ALPHA[(63, 36)]
ch = ChannelConfig(3.0, spec.rate, seed=0)
stop = StopRule(min_frame_errors=50, max_frames=5000)

# %%
for kind, order in [("nms", 1), ("enhanced-nms", 1), ("osd", 1), ("hybrid", 1)]:
    dec = make_decoder(kind, spec, h, alpha=alpha, max_iters=4, osd_order=order, beta=20)
    r = run_point(dec, spec, ch, stop)
    print(f"{kind:13s} frames {r.frames:5d}  FER {r.fer:.4f}  BER {r.ber:.2e}  "
          f"OSD calls {r.osd_rate:.3f}  iters {r.mean_iterations:.2f}")
