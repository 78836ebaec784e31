"""Narrow-sense binary BCH codes and their coordinate automorphisms.

Polynomials over GF(2) are Python ints, bit ``k`` holding the coefficient
of ``x**k``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .gf2 import syndrome_ok

# Conventional primitive polynomials; fixed so standard matrices are reproducible.
PRIMITIVE_POLYS = {
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10001001,
    8: 0b100011101,
    9: 0b1000010001,
    10: 0b10000001001,
}

# Cyclic shift period used by the dilation; 3 * d_p covers (almost) every shift.
DEFAULT_SHIFT_PERIOD = {63: 21, 127: 42}


def poly_mul(a: int, b: int) -> int:
    """Carry-less product of two GF(2) polynomials."""
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def poly_divmod(a: int, b: int) -> tuple[int, int]:
    if b == 0:
        raise ZeroDivisionError("division by the zero polynomial")
    q = 0
    db = b.bit_length()
    while a.bit_length() >= db:
        s = a.bit_length() - db
        q |= 1 << s
        a ^= b << s
    return q, a


def poly_to_bits(p: int, length: int) -> np.ndarray:
    """Coefficient vector ``[p_0, p_1, ..., p_{length-1}]``."""
    return np.array([(p >> k) & 1 for k in range(length)], dtype=np.uint8)


def poly_weight(p: int) -> int:
    return bin(p).count("1")


class FieldGF2m:
    """GF(2^m) with log/antilog tables built from a primitive polynomial."""

    def __init__(self, m: int, prim_poly: int | None = None):
        if not 2 <= m <= 16:
            raise ValueError(f"field order m={m} outside [2, 16]")
        if prim_poly is None:
            if m not in PRIMITIVE_POLYS:
                raise ValueError(f"no default primitive polynomial for m={m}")
            prim_poly = PRIMITIVE_POLYS[m]
        if prim_poly.bit_length() - 1 != m:
            raise ValueError("primitive polynomial must have degree m")
        self.m = m
        self.order = (1 << m) - 1
        self.prim_poly = prim_poly
        self.exp = np.zeros(2 * self.order, dtype=np.int64)
        self.log = np.full(self.order + 1, -1, dtype=np.int64)
        x = 1
        for i in range(self.order):
            if self.log[x] != -1:
                raise ValueError(f"{prim_poly:#x} is not primitive")
            self.exp[i] = x
            self.log[x] = i
            x <<= 1
            if x >> m:
                x ^= prim_poly
        self.exp[self.order:] = self.exp[:self.order]

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp[self.log[a] + self.log[b]])

    def alpha_pow(self, i: int) -> int:
        return int(self.exp[i % self.order])

    def cyclotomic_coset(self, i: int) -> list[int]:
        coset, j = [], i % self.order
        while j not in coset:
            coset.append(j)
            j = (2 * j) % self.order
        return coset

    def minimal_polynomial(self, i: int) -> int:
        """Minimal polynomial over GF(2) of ``alpha**i``."""
        poly = [1]  # coefficients in GF(2^m), lowest degree first
        for j in self.cyclotomic_coset(i):
            root = self.alpha_pow(j)
            nxt = [0] * (len(poly) + 1)
            for k, a in enumerate(poly):
                nxt[k + 1] ^= a
                nxt[k] ^= self.mul(a, root)
            poly = nxt
        if any(c not in (0, 1) for c in poly):
            raise ArithmeticError("minimal polynomial has non-binary coefficients")
        return sum(c << k for k, c in enumerate(poly))


@dataclass(frozen=True)
class CodeSpec:
    """A binary cyclic code of length N and dimension K."""

    n: int
    k: int
    g: int
    h: int
    m: int = 0
    designed_t: int = 0

    def __post_init__(self):
        if poly_mul(self.g, self.h) != (1 << self.n) | 1:
            raise ValueError("g(x) h(x) must equal x^N + 1")
        if self.g.bit_length() - 1 != self.n - self.k:
            raise ValueError("deg g must equal N - K")

    @property
    def name(self) -> str:
        return f"({self.n},{self.k})"

    @property
    def rate(self) -> float:
        return self.k / self.n

    @property
    def redundancy(self) -> int:
        return self.n - self.k

    def g_bits(self) -> np.ndarray:
        return poly_to_bits(self.g, self.n - self.k + 1)

    def h_bits(self) -> np.ndarray:
        return poly_to_bits(self.h, self.k + 1)

    def to_text(self) -> str:
        return f"{self.n} {self.k} g={self.g:x} h={self.h:x}"

    @classmethod
    def from_text(cls, text: str) -> "CodeSpec":
        mt = re.fullmatch(r"\s*(\d+)\s+(\d+)\s+g=([0-9a-fA-F]+)\s+h=([0-9a-fA-F]+)\s*", text)
        if not mt:
            raise ValueError(f"cannot parse code description {text!r}")
        n, k = int(mt.group(1)), int(mt.group(2))
        m = n.bit_length() if (n + 1) & n == 0 else 0
        return cls(n, k, int(mt.group(3), 16), int(mt.group(4), 16), m=m)


def _bch_generators(m: int):
    """Yield ``(t, g)`` for narrow-sense BCH codes of length 2^m - 1."""
    field = FieldGF2m(m)
    n = field.order
    g, used = 1, set()
    for t in range(1, n // 2 + 1):
        for i in range(1, 2 * t + 1):
            rep = min(field.cyclotomic_coset(i))
            if rep not in used:
                used.add(rep)
                g = poly_mul(g, field.minimal_polynomial(rep))
        if g.bit_length() - 1 >= n:
            break
        yield t, g


@lru_cache(maxsize=None)
def supported_dimensions(m: int) -> tuple[int, ...]:
    """All K for which a narrow-sense (2^m - 1, K) BCH code exists."""
    n = (1 << m) - 1
    return tuple(sorted({n - (g.bit_length() - 1) for _, g in _bch_generators(m)}, reverse=True))


@lru_cache(maxsize=None)
def build_code(m: int, k: int) -> CodeSpec:
    """Narrow-sense primitive BCH code of length ``2**m - 1`` and dimension ``k``.

    The generator is the lcm of the minimal polynomials of
    ``alpha, ..., alpha**(2t)`` for the largest ``t`` giving degree ``N - K``.
    """
    if m not in PRIMITIVE_POLYS:
        raise ValueError(f"unsupported field order m={m}; choose from {sorted(PRIMITIVE_POLYS)}")
    n = (1 << m) - 1
    best = None
    for t, g in _bch_generators(m):
        deg = g.bit_length() - 1
        if deg == n - k:
            best = (t, g)
        elif deg > n - k:
            break
    if best is None:
        pairs = ", ".join(f"({n},{kk})" for kk in supported_dimensions(m))
        raise ValueError(f"({n},{k}) is not a narrow-sense BCH code; supported: {pairs}")
    t, g = best
    h, rem = poly_divmod((1 << n) | 1, g)
    assert rem == 0
    return CodeSpec(n=n, k=k, g=g, h=h, m=m, designed_t=t)


def code_from_nk(n: int, k: int) -> CodeSpec:
    if (n + 1) & n:
        raise ValueError(f"N={n} is not of the form 2^m - 1")
    return build_code(n.bit_length(), k)


def standard_pcm(spec: CodeSpec) -> np.ndarray:
    """(N-K) x N parity-check matrix whose rows are shifts of reversed h(x).

    Row ``i`` carries the coefficient of ``x**(K-j)`` of h at column
    ``i + j``, without wrap-around.
    """
    n, k = spec.n, spec.k
    rev_h = spec.h_bits()[::-1]
    pcm = np.zeros((n - k, n), dtype=np.uint8)
    for i in range(n - k):
        pcm[i, i:i + k + 1] = rev_h
    return pcm


def generator_matrix(spec: CodeSpec) -> np.ndarray:
    """K x N non-systematic generator; row ``i`` is g(x) shifted by ``i``."""
    n, k = spec.n, spec.k
    g = spec.g_bits()
    gen = np.zeros((k, n), dtype=np.uint8)
    for i in range(k):
        gen[i, i:i + n - k + 1] = g
    return gen


def generator_encode(spec: CodeSpec, msg) -> np.ndarray:
    """Encode one message (length K) or a batch ``(B, K)`` as ``m G``."""
    msg = np.asarray(msg, dtype=np.uint8)
    if msg.shape[-1] != spec.k:
        raise ValueError(f"message length {msg.shape[-1]} != K={spec.k}")
    gen = _cached_generator(spec)
    return ((msg.astype(np.int64) @ gen) & 1).astype(np.uint8)


@lru_cache(maxsize=32)
def _cached_generator(spec: CodeSpec) -> np.ndarray:
    return generator_matrix(spec).astype(np.int64)


@dataclass(frozen=True, eq=False)
class Permutation:
    """Coordinate permutation; source position ``i`` moves to ``dest[i]``."""

    dest: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.dest, dtype=np.int64)
        if d.ndim != 1 or not np.array_equal(np.sort(d), np.arange(d.size)):
            raise ValueError("permutation map must be a bijection on 0..N-1")
        d.setflags(write=False)
        object.__setattr__(self, "dest", d)

    @property
    def n(self) -> int:
        return self.dest.size

    @property
    def source(self) -> np.ndarray:
        """Gather indices: ``apply(x) == x[..., source]``."""
        src = np.empty_like(self.dest)
        src[self.dest] = np.arange(self.n)
        return src

    def then(self, other: "Permutation") -> "Permutation":
        """Apply ``self`` first, then ``other``."""
        return Permutation(other.dest[self.dest])

    def __eq__(self, other):
        return isinstance(other, Permutation) and np.array_equal(self.dest, other.dest)

    def __hash__(self):
        return hash(self.dest.tobytes())

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(np.arange(n))


def apply_perm(p: Permutation, seq) -> np.ndarray:
    """Permute the last axis of ``seq``: ``out[..., p.dest[i]] = seq[..., i]``."""
    seq = np.asarray(seq)
    if seq.shape[-1] != p.n:
        raise ValueError(f"sequence length {seq.shape[-1]} != permutation length {p.n}")
    return seq[..., p.source]


def invert_perm(p: Permutation) -> Permutation:
    return Permutation(p.source)


def _require_odd(n: int) -> None:
    if n < 1 or n % 2 == 0:
        raise ValueError(f"N={n} must be odd for this automorphism")


def perm_interleave(n: int) -> Permutation:
    """Even-indexed bits first, then odd-indexed: ``out[j] = x[2j mod N]``."""
    _require_odd(n)
    src = (2 * np.arange(n)) % n
    dest = np.empty(n, dtype=np.int64)
    dest[src] = np.arange(n)
    return Permutation(dest)


def perm_frobenius(n: int) -> Permutation:
    """Bit ``i`` moves to position ``2i mod N``."""
    _require_odd(n)
    return Permutation((2 * np.arange(n)) % n)


def perm_cyclic(n: int, d_p: int, s: int, d_o: int) -> Permutation:
    """Cyclic shift by ``s * d_p + d_o`` positions, ``s`` in {0, 1, 2}."""
    if s not in (0, 1, 2):
        raise ValueError(f"shift multiplier s={s} not in {{0, 1, 2}}")
    if not 0 <= d_o < d_p:
        raise ValueError(f"offset d_o={d_o} outside [0, {d_p})")
    return perm_shift(n, s * d_p + d_o)


def perm_shift(n: int, q: int) -> Permutation:
    return Permutation((np.arange(n) + q) % n)


def automorphism_verify(p: Permutation, spec: CodeSpec, trials: int = 1000, seed: int = 0,
                        return_counterexample: bool = False):
    """Check that ``p`` maps random codewords of ``spec`` to codewords.

    With ``return_counterexample`` a ``(ok, codeword)`` pair is returned,
    ``codeword`` being the first one whose image fails the parity checks.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    msgs = rng.integers(0, 2, size=(trials, spec.k), dtype=np.uint8)
    words = generator_encode(spec, msgs)
    ok = syndrome_ok(standard_pcm(spec), apply_perm(p, words))
    passed = bool(ok.all())
    if return_counterexample:
        bad = None if passed else words[int(np.argmin(ok))]
        return passed, bad
    return passed
