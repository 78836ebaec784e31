from __future__ import annotations

import numpy as np
import pytest

from shortbch.bch import build_code, generator_encode, standard_pcm
from shortbch.gf2 import canonical_cyclic_form, count_length4_cycles, rank, weight_profile
from shortbch.pcmopt import (AnnealConfig, CandidatePool, OptimizedPcm, _lightest_sums,
                             anneal_layout, base_size, build_optimized_pcm, cyclic_refine,
                             layout_loss, pad_redundancy, rank_deficiency_report,
                             reduce_density, resolve_anneal_config)


def rows(*strs):
    return np.array([[int(c) for c in s] for s in strs], dtype=np.uint8)


def classes(*strs):
    return {tuple(canonical_cyclic_form(r)) for r in rows(*strs)}


def pool_classes(pool):
    return {tuple(r) for r in pool.rows}


def orthogonal_to_code(h, spec, trials=1000, seed=0):
    rng = np.random.default_rng(seed)
    words = generator_encode(spec, rng.integers(0, 2, (trials, spec.k)))
    return not ((words.astype(int) @ np.asarray(h).T.astype(int)) % 2).any()


class TestReduceDensity:
    def test_equal_weight_sum_joins(self):
        r = rows("1100", "0110")
        s_f = _lightest_sums(r[0], r[1:] ^ r[0], (r[1:] ^ r[0]).sum(axis=1))
        assert {tuple(x) for x in s_f} == {(1, 1, 0, 0), (1, 0, 1, 0)}
        assert pool_classes(reduce_density(r)) == classes("1100", "1010")

    def test_lighter_sum_resets(self):
        r = rows("111000", "011100")
        s_f = _lightest_sums(r[0], r[1:] ^ r[0], (r[1:] ^ r[0]).sum(axis=1))
        assert [tuple(x) for x in s_f] == [(1, 0, 0, 1, 0, 0)]
        assert pool_classes(reduce_density(r)) == classes("100100")

    def test_disjoint_supports(self):
        r = rows("110000", "000011", "001100")
        assert pool_classes(reduce_density(r)) == classes("110000")

    def test_pool_sorted_and_deduplicated(self):
        pool = CandidatePool.from_vectors(rows("0110", "0011", "1110", "0111"))
        assert len(pool) == 2
        assert pool.weights.tolist() == [2, 3]


class TestCyclicRefine:
    def test_single_row_fixed(self):
        pool = CandidatePool.from_vectors(rows("1101000"))
        assert cyclic_refine(pool, 4).same_classes(pool)

    def test_fixed_point(self):
        # all weight-2 vectors of length 5 form a closed set under the search
        pool = CandidatePool.from_vectors(rows("11000", "10100"))
        out = cyclic_refine(pool, 3)
        assert out.min_weight == pool.min_weight

    def test_rounds_validated(self):
        with pytest.raises(ValueError):
            cyclic_refine(CandidatePool.from_vectors(rows("11")), 0)

    def test_63_45_weight_16(self, pool_cache):
        spec = build_code(6, 45)
        pool = pool_cache(6, 45)
        assert pool.min_weight == 16
        assert orthogonal_to_code(pool.rows, spec)

    def test_monotone_min_weight(self):
        from shortbch.gf2 import row_echelon
        spec = build_code(6, 36)
        h_r, _ = row_echelon(standard_pcm(spec), reduced=True)
        pool = reduce_density(h_r)
        assert pool.min_weight <= 18
        last = pool.min_weight
        for _ in range(3):
            pool = cyclic_refine(pool, 1)
            assert pool.min_weight <= last
            assert orthogonal_to_code(pool.rows, spec)
            last = pool.min_weight

    def test_dual_enumeration_63_45(self, pool_cache):
        # all 2^18 dual codewords: weight 16 is minimal and forms 189 / 63 = 3 classes
        h = standard_pcm(build_code(6, 45)).astype(np.int64)
        coeffs = ((np.arange(1 << 18)[:, None] >> np.arange(18)) & 1)
        weights = np.zeros(1 << 18, dtype=np.int64)
        for start in range(0, 1 << 18, 1 << 15):
            words = (coeffs[start:start + (1 << 15)] @ h) % 2
            weights[start:start + (1 << 15)] = words.sum(axis=1)
        nonzero = weights[1:]
        assert nonzero.min() == 16
        assert int((nonzero == 16).sum()) == 189
        assert len(pool_cache(6, 45)) == 3


class TestPadding:
    @pytest.mark.parametrize("k,beta,rows_out", [(36, 2, 32), (36, 20, 122), (36, 1, 27),
                                                (45, 2, 33), (45, 1, 18)])
    def test_row_counts(self, pool_cache, k, beta, rows_out):
        spec = build_code(6, k)
        h = pad_redundancy(pool_cache(6, k), spec, beta)
        assert h.shape == (rows_out, 63)
        assert rank(h) == spec.redundancy
        assert orthogonal_to_code(h, spec)

    def test_formula(self, pool_cache):
        spec = build_code(6, 36)
        pool = pool_cache(6, 36)
        m_r1 = base_size(pool, spec)
        assert m_r1 == 22
        for beta in (1, 3, 5, 7):
            h = pad_redundancy(pool, spec, beta)
            assert h.shape[0] == m_r1 + beta * (27 - m_r1)

    def test_ascending_weight(self, pool_cache):
        h = pad_redundancy(pool_cache(6, 36), build_code(6, 36), 20)
        w = h.sum(axis=1)
        assert w.min() == 14

    def test_shortfall_named(self, pool_cache):
        spec = build_code(6, 36)
        light = pool_cache(6, 36)
        only14 = CandidatePool(light.rows[light.weights == 14])
        with pytest.raises(ValueError, match="shortfall"):
            pad_redundancy(only14, spec, 2)

    def test_beta_validated(self, pool_cache):
        with pytest.raises(ValueError):
            pad_redundancy(pool_cache(6, 45), build_code(6, 45), 0)


class TestAnneal:
    def test_optimum_unchanged(self):
        m = np.eye(5, dtype=np.uint8)
        out = anneal_layout(m, AnnealConfig(max_steps=200, t0=1.0, w_var=1.0))
        assert np.array_equal(out, m)

    def test_single_row(self):
        m = rows("1101000")
        out = anneal_layout(m, AnnealConfig(max_steps=50, t0=1.0, w_var=1.0, seed=3))
        assert tuple(canonical_cyclic_form(out[0])) == tuple(canonical_cyclic_form(m[0]))

    def test_loss_never_increases(self, pool_cache):
        spec = build_code(6, 36)
        h = pad_redundancy(pool_cache(6, 36), spec, 2)
        cfg = resolve_anneal_config(h, AnnealConfig(max_steps=2000, seed=1))
        out, loss = anneal_layout(h, cfg, return_loss=True)
        assert loss <= layout_loss(h, cfg.w_cycles, cfg.w_var)
        assert loss == pytest.approx(layout_loss(out, cfg.w_cycles, cfg.w_var))
        assert rank(out) == 27
        assert sorted(out.sum(axis=1)) == sorted(h.sum(axis=1))
        assert orthogonal_to_code(out, spec)

    def test_defaults(self):
        h = standard_pcm(build_code(6, 45))
        cfg = resolve_anneal_config(h, AnnealConfig())
        assert cfg.max_steps == 200 * 18
        assert cfg.w_var == pytest.approx(7251 / 63)
        assert cfg.t0 == pytest.approx(0.05 * layout_loss(h, 1.0, cfg.w_var))

    def test_deterministic(self, pool_cache):
        spec = build_code(6, 45)
        h = pad_redundancy(pool_cache(6, 45), spec, 2)
        a = anneal_layout(h, AnnealConfig(seed=4, max_steps=500))
        b = anneal_layout(h, AnnealConfig(seed=4, max_steps=500))
        assert np.array_equal(a, b)

    @pytest.mark.parametrize("kw", [dict(cooling=1.0), dict(cooling=0.0), dict(w_cycles=0),
                                    dict(max_steps=-1), dict(restarts=0)])
    def test_config_validated(self, kw):
        with pytest.raises(ValueError):
            AnnealConfig(**kw)


class TestPipeline:
    def test_63_45(self, pcm_cache):
        pcm = pcm_cache(6, 45, 2)
        p = pcm.profile
        assert pcm.matrix.shape == (33, 63)
        assert (p.row_min, p.row_max) == (16, 16)
        assert p.rank == 18
        assert p.cycle4_count <= 3500 and p.col_std <= 1.2

    def test_trivial_anneal(self, pool_cache):
        spec = build_code(6, 36)
        pcm = build_optimized_pcm(spec, beta=1, cfg=AnnealConfig(max_steps=0),
                                  pool=pool_cache(6, 36))
        assert pcm.matrix.shape == (27, 63)
        assert pcm.profile.rank == 27
        assert pcm.profile.cycle4_count < 5909

    @pytest.mark.parametrize("beta", [2, 20])
    def test_63_36_valid(self, pcm_cache, beta):
        pcm = pcm_cache(6, 36, beta)
        spec = build_code(6, 36)
        assert pcm.profile.rank == 27
        assert orthogonal_to_code(pcm.matrix, spec)
        assert pcm.base_rows == 22


class TestRankDeficiency:
    def test_identity(self):
        assert rank_deficiency_report(np.eye(6, dtype=np.uint8)) == (1, 6, True)

    def test_63_45(self, pcm_cache):
        assert rank_deficiency_report(pcm_cache(6, 45, 2)) == (16, 18, True)

    def test_63_36(self, pcm_cache):
        w, r, ok = rank_deficiency_report(pcm_cache(6, 36, 2))
        assert (w, ok) == (14, False) and r < 27

    def test_gcd_oracle_63_36(self, pool_cache):
        # span of all shifts of v equals the ideal of gcd(v(x), x^N + 1)
        def pmod(a, b):
            while a and a.bit_length() >= b.bit_length():
                a ^= b << (a.bit_length() - b.bit_length())
            return a

        pool = pool_cache(6, 36)
        g = (1 << 63) | 1
        for r in pool.rows[pool.weights == pool.min_weight]:
            v = int("".join(map(str, r[::-1])), 2)
            while v:
                g, v = v, pmod(g, v)
        assert 63 - (g.bit_length() - 1) == 24
