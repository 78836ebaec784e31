from __future__ import annotations

import numpy as np
import pytest

from shortbch.bch import standard_pcm
from shortbch.channel import ChannelConfig, llr_init, make_frames
from shortbch.gf2 import syndrome_ok
from shortbch.hybrid import (TABLE_63_45, ComplexityEntry, HybridConfig, complexity_ratio,
                             hybrid_cost, hybrid_decode, hybrid_decode_batch, mrrd_entry,
                             parse_entry)
from shortbch.nms import NmsConfig, draw_offsets, enhanced_nms_decode, enhanced_nms_decode_batch
from shortbch.osd import OsdConfig


class TestComplexity:
    def test_reference_ratios(self):
        base = TABLE_63_45[0]
        ratios = {e.name: float(f"{complexity_ratio(e, base):.2g}") for e in TABLE_63_45[1:]}
        assert ratios == {"Enhanced NMS": 0.088, "BP-RNN": 0.0067, "MBBP": 0.92, "EPCM": 0.023}

    def test_mrrd_scales_with_branches(self):
        for q in (1, 2, 3, 8):
            assert complexity_ratio(mrrd_entry(q), mrrd_entry(1)) == q

    def test_self_ratio(self):
        for e in TABLE_63_45:
            assert complexity_ratio(e, e) == 1.0

    def test_parse_and_validate(self):
        e = parse_entry("9,4,1,33")
        assert e.cost == 9 * 4 * 33
        with pytest.raises(ValueError):
            parse_entry("1,2,3")
        with pytest.raises(ValueError):
            ComplexityEntry("x", 0, 1, 1, 1)

    def test_hybrid_cost(self):
        assert hybrid_cost(10.0, 100.0, 0.0) == 10.0
        assert hybrid_cost(10.0, 100.0, 1.0) == 110.0
        assert hybrid_cost(10.0, 100.0, 0.05) == pytest.approx(15.0)
        for bad in ((1.0, 1.0, -0.1), (1.0, 1.0, 1.5), (-1.0, 1.0, 0.5)):
            with pytest.raises(ValueError):
                hybrid_cost(*bad)


@pytest.fixture(scope="module")
def setup(pcm_cache):
    pcm = pcm_cache(6, 36, 2)
    nms = NmsConfig(pcm.matrix, alpha=0.8, max_iters=4)
    return pcm.spec, nms, HybridConfig(nms, OsdConfig(1, pcm.spec))


class TestHybridDecode:
    def test_noiseless_stays_in_nms(self, setup, rng):
        spec, nms, cfg = setup
        fb = make_frames(spec, ChannelConfig(3.0, spec.rate, 1), 0, 1)
        y = 1.0 - 2.0 * fb.codewords[0]
        out = hybrid_decode(y, llr_init(y), cfg, rng=rng)
        assert out.stage == "NMS" and out.syndrome_pass
        assert np.array_equal(out.hard_decision, fb.codewords[0])

    def test_needs_rng_or_offsets(self, setup):
        spec, nms, cfg = setup
        with pytest.raises(ValueError):
            hybrid_decode(np.ones(63), np.ones(63), cfg)

    def test_mismatched_lengths(self, setup, code):
        with pytest.raises(ValueError):
            HybridConfig(setup[1], OsdConfig(1, code(4, 7)))

    def test_disabled_osd_matches_enhanced(self, setup):
        spec, nms, cfg = setup
        fb = make_frames(spec, ChannelConfig(2.0, spec.rate, 3), 0, 200)
        llr = llr_init(fb.received)
        off = np.array([draw_offsets(r, nms) for r in fb.rngs])
        a = hybrid_decode_batch(fb.received, llr, HybridConfig(nms, cfg.osd, False), off)
        b = enhanced_nms_decode_batch(llr, nms, off)
        assert np.array_equal(a.hard_decision, b.hard_decision)
        assert not a.osd_invoked.any()

    def test_osd_rate_equals_nms_failure_rate(self, setup):
        spec, nms, cfg = setup
        fb = make_frames(spec, ChannelConfig(2.0, spec.rate, 3), 0, 300)
        llr = llr_init(fb.received)
        off = np.array([draw_offsets(r, nms) for r in fb.rngs])
        first = enhanced_nms_decode_batch(llr, nms, off)
        hyb = hybrid_decode_batch(fb.received, llr, cfg, off)
        assert np.array_equal(hyb.osd_invoked, ~first.syndrome_pass)
        assert hyb.osd_invoked.any()
        keep = first.syndrome_pass
        assert np.array_equal(hyb.hard_decision[keep], first.hard_decision[keep])
        assert syndrome_ok(standard_pcm(spec), hyb.hard_decision[hyb.osd_invoked]).all()

    def test_single_matches_batch(self, setup):
        spec, nms, cfg = setup
        fb = make_frames(spec, ChannelConfig(2.0, spec.rate, 9), 0, 30)
        llr = llr_init(fb.received)
        off = np.array([draw_offsets(r, nms) for r in fb.rngs])
        b = hybrid_decode_batch(fb.received, llr, cfg, off)
        for i in range(30):
            o = hybrid_decode(fb.received[i], llr[i], cfg, offsets=off[i])
            assert np.array_equal(o.hard_decision, b.hard_decision[i])
            assert (o.stage == "OSD") == b.osd_invoked[i]
