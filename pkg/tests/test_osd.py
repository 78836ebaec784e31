from __future__ import annotations

from itertools import product
from math import comb

import numpy as np
import pytest

from shortbch.bch import Permutation, apply_perm, build_code, generator_encode, standard_pcm
from shortbch.channel import ChannelConfig, llr_init, make_frames
from shortbch.gf2 import rank, row_echelon, syndrome_ok
from shortbch.osd import (OsdConfig, correlation, osd_decode, osd_decode_batch, reliability_order,
                          systematize)


def null_space(h):
    r, k = row_echelon(h, reduced=True)
    n = h.shape[1]
    pivots = [int(np.flatnonzero(row)[0]) for row in r[:k]]
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = np.zeros(n, dtype=np.uint8)
        v[f] = 1
        for row, p in zip(r[:k], pivots):
            v[p] = row[f]
        basis.append(v)
    return np.array(basis)


class TestReliabilityOrder:
    def test_examples(self):
        assert reliability_order([0.1, 3.0, 0.5]).source.tolist() == [0, 2, 1]
        assert reliability_order([-1.0, 1.0, 1.0]).source.tolist() == [0, 1, 2]
        assert reliability_order([0.1, 0.2, -0.3]) == Permutation.identity(3)

    def test_last_is_most_reliable(self, rng):
        llr = rng.normal(size=50)
        p = reliability_order(llr)
        assert int(p.source[-1]) == int(np.argmax(np.abs(llr)))


class TestSystematize:
    def test_already_systematic(self):
        h = np.array([[1, 0, 1, 1], [0, 1, 0, 1]], dtype=np.uint8)
        s = systematize(h, Permutation.identity(4))
        assert np.array_equal(s.matrix, h)
        assert s.mrb.tolist() == [2, 3] and s.swaps == ()

    def test_dependent_column_swapped(self):
        h = np.array([[1, 1, 0, 1], [0, 0, 1, 1]], dtype=np.uint8)
        s = systematize(h, Permutation.identity(4))
        assert s.swaps == ((1, 2),)
        assert np.array_equal(s.matrix[:, :2], np.eye(2))
        assert s.columns.tolist() == [0, 2, 1, 3]

    def test_random_matrices(self):
        rng = np.random.default_rng(5)
        done = 0
        while done < 100:
            h = rng.integers(0, 2, (10, 20)).astype(np.uint8)
            if rank(h) < 10:
                continue
            order = Permutation(rng.permutation(20))
            s = systematize(h, order)
            assert np.array_equal(s.matrix[:, :10], np.eye(10, dtype=np.uint8))
            basis = null_space(h)
            words = (rng.integers(0, 2, (100, basis.shape[0])) @ basis) % 2
            assert syndrome_ok(h, words).all()
            assert syndrome_ok(s.matrix, apply_perm(s.perm, words)).all()
            assert sorted(s.columns.tolist()) == list(range(20))
            done += 1

    def test_rank_deficient(self):
        h = np.array([[1, 1, 0], [1, 1, 0]], dtype=np.uint8)
        with pytest.raises(ValueError, match="rank"):
            systematize(h, Permutation.identity(3))


class TestOsd:
    def test_config(self):
        spec = build_code(6, 45)
        assert OsdConfig(2, spec).candidates == 1 + 45 + 990
        with pytest.raises(ValueError):
            OsdConfig(46, spec)
        with pytest.raises(ValueError):
            OsdConfig(-1, spec)
        h = standard_pcm(spec).copy()
        h[1] = h[0]
        with pytest.raises(ValueError, match="rank"):
            OsdConfig(1, spec, h)

    def test_noiseless_order0(self, rng):
        spec = build_code(6, 45)
        c = generator_encode(spec, rng.integers(0, 2, 45))
        y = 1.0 - 2.0 * c
        out = osd_decode(y, llr_init(y), OsdConfig(0, spec))
        assert np.array_equal(out.hard_decision, c) and out.syndrome_pass

    def test_exhaustive_ml_15_7(self):
        spec = build_code(4, 7)
        cfg = OsdConfig(7, spec)
        allw = generator_encode(spec, np.array(list(product([0, 1], repeat=7)), dtype=np.uint8))
        fb = make_frames(spec, ChannelConfig(3.0, spec.rate, 11), 0, 1000)
        for y in fb.received:
            out = osd_decode(y, llr_init(y), cfg)
            ml = allw[np.argmax(y @ (1 - 2.0 * allw.T))]
            assert np.array_equal(out.hard_decision, ml)

    def test_properties(self):
        spec = build_code(6, 45)
        h = standard_pcm(spec)
        fb = make_frames(spec, ChannelConfig(2.0, spec.rate, 4), 0, 150)
        cfgs = [OsdConfig(p, spec) for p in range(3)]
        for y in fb.received:
            llr = llr_init(y)
            corr = [correlation(y, osd_decode(y, llr, c).hard_decision) for c in cfgs]
            assert corr[0] <= corr[1] + 1e-9 <= corr[2] + 2e-9
            assert syndrome_ok(h, osd_decode(y, llr, cfgs[2]).hard_decision)

    def test_batch(self):
        spec = build_code(6, 45)
        fb = make_frames(spec, ChannelConfig(3.0, spec.rate, 4), 0, 20)
        cfg = OsdConfig(1, spec)
        b = osd_decode_batch(fb.received, llr_init(fb.received), cfg)
        assert b.osd_invoked.all() and b.syndrome_pass.all()
        for i in range(20):
            o = osd_decode(fb.received[i], llr_init(fb.received[i]), cfg)
            assert np.array_equal(o.hard_decision, b.hard_decision[i])

    def test_length_check(self):
        with pytest.raises(ValueError):
            osd_decode(np.zeros(10), np.zeros(10), OsdConfig(1, build_code(4, 7)))

    def test_candidate_arithmetic(self):
        assert sum(comb(45, i) for i in range(3)) == 1036
