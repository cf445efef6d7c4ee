"""The pick(k, m) column-selection expander.

A public bit matrix is split into m blocks of 2^k columns. An input of m*k
bits names one column per block (k bits each, little-endian) and the output
is the XOR of the m selected columns: m*k bits in, m*2^(k-1) bits out, an
expansion of 2^(k-1)/k at roughly one column XOR per block.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .gf2 import BitMatrix, BitVec, splitmix_stream

__all__ = [
    "PickParams",
    "PickMatrix",
    "PickChain",
    "pick_matrix_from_seed",
    "pick_expand",
    "pick_chain_expand",
    "multiplication_factor",
]


@dataclass(frozen=True)
class PickParams:
    """Expander shape: k bits select within each of m blocks."""

    k: int  # bits per input segment (block of 2^k columns)
    m: int  # number of blocks

    def __post_init__(self):
        if self.k < 1 or self.m < 1:
            raise ValueError("k and m must be at least 1")

    @property
    def block_cols(self) -> int:
        return 1 << self.k

    @property
    def out_bits(self) -> int:
        """Matrix row count: m * 2^(k-1)."""
        return self.m << (self.k - 1)

    @property
    def ncols(self) -> int:
        return self.m << self.k

    @property
    def input_bits(self) -> int:
        return self.m * self.k

    @property
    def matrix_bytes(self) -> int:
        """Storage for the public matrix, packed: rows * cols / 8."""
        return ((self.out_bits + 7) // 8) * self.ncols


def multiplication_factor(params: PickParams) -> Fraction:
    """Exact output/input length ratio 2^(k-1)/k."""
    return Fraction(1 << (params.k - 1), params.k)


class PickMatrix:
    """A pick expander instance: parameters plus its public column matrix.

    Columns are packed ints for the scalar path; a word-packed numpy view is
    built lazily for the batched path.
    """

    __slots__ = ("params", "mat", "seed", "_words")

    def __init__(self, params: PickParams, mat: BitMatrix, seed: int = 0):
        if mat.nrows != params.out_bits or mat.ncols != params.ncols:
            raise ValueError(
                f"matrix must be {params.out_bits}x{params.ncols}, "
                f"got {mat.nrows}x{mat.ncols}"
            )
        self.params = params
        self.mat = mat
        self.seed = seed
        self._words = None

    @classmethod
    def from_seed(cls, params: PickParams, seed: int) -> "PickMatrix":
        return pick_matrix_from_seed(params, seed)

    def expand(self, x: BitVec) -> BitVec:
        return pick_expand(self, x)

    def _word_view(self) -> np.ndarray:
        if self._words is None:
            nw = (self.params.out_bits + 63) // 64
            buf = b"".join(
                c.to_bytes(nw * 8, "little") for c in self.mat.columns
            )
            words = np.frombuffer(buf, dtype="<u8").reshape(self.params.ncols, nw)
            self._words = words
        return self._words

    def _segment_indices(self, xs: list[BitVec]) -> np.ndarray:
        p = self.params
        in_bytes = (p.input_bits + 7) // 8
        buf = b"".join(x.to_bytes() for x in xs)
        arr = np.frombuffer(buf, dtype=np.uint8).reshape(len(xs), in_bytes)
        bits = np.unpackbits(arr, axis=1, bitorder="little")[:, : p.input_bits]
        weights = (1 << np.arange(p.k, dtype=np.int64))
        segs = bits.reshape(len(xs), p.m, p.k).astype(np.int64) @ weights
        return segs + (np.arange(p.m, dtype=np.int64) << p.k)

    def expand_batch(self, xs: list[BitVec]) -> list[BitVec]:
        """Expand many inputs in one vectorized pass (same results as expand)."""
        if not xs:
            return []
        p = self.params
        for x in xs:
            if x.nbits != p.input_bits:
                raise ValueError(f"input must have {p.input_bits} bits")
        words = self._word_view()
        idx = self._segment_indices(xs)
        gathered = words[idx]  # (batch, m, words)
        out = np.bitwise_xor.reduce(gathered, axis=1)
        nbytes = (p.out_bits + 7) // 8
        return [
            BitVec(p.out_bits, int.from_bytes(row.tobytes()[:nbytes], "little"))
            for row in out
        ]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PickMatrix)
            and self.params == other.params
            and self.mat == other.mat
        )

    def __hash__(self):
        return hash((self.params, self.mat))

    def __repr__(self) -> str:
        return f"PickMatrix(k={self.params.k}, m={self.params.m}, seed={self.seed:#x})"


def pick_matrix_from_seed(params: PickParams, seed: int) -> PickMatrix:
    """Fill the public matrix column by column from the seed stream.

    One packed column per ceil(out_bits/8) stream bytes, LSB-first, columns
    in block order; pad bits beyond out_bits are discarded.
    """
    col_bytes = (params.out_bits + 7) // 8
    data = splitmix_stream(seed, col_bytes * params.ncols)
    mask = (1 << params.out_bits) - 1
    cols = [
        int.from_bytes(data[j * col_bytes : (j + 1) * col_bytes], "little") & mask
        for j in range(params.ncols)
    ]
    return PickMatrix(params, BitMatrix(params.out_bits, params.ncols, cols), seed)


def pick_expand(pm: PickMatrix, x: BitVec) -> BitVec:
    """XOR the column selected by each k-bit input segment (little-endian)."""
    p = pm.params
    if x.nbits != p.input_bits:
        raise ValueError(f"input must have {p.input_bits} bits")
    cols = pm.mat.columns
    v = x.value
    k = p.k
    kmask = (1 << k) - 1
    size = 1 << k
    acc = 0
    base = 0
    for _ in range(p.m):
        acc ^= cols[base + (v & kmask)]
        v >>= k
        base += size
    return BitVec(p.out_bits, acc)


class PickChain:
    """Several expanders applied in sequence; each stage's output width must
    equal the next stage's input width (checked at construction)."""

    def __init__(self, stages: list[PickMatrix]):
        stages = list(stages)
        if not stages:
            raise ValueError("chain needs at least one stage")
        for a, b in zip(stages, stages[1:]):
            if a.params.out_bits != b.params.input_bits:
                raise ValueError(
                    f"stage outputs {a.params.out_bits} bits but next stage "
                    f"expects {b.params.input_bits}"
                )
        self.stages = stages

    @classmethod
    def from_seed(cls, params_list: list[PickParams], seed: int) -> "PickChain":
        """Derive one independent matrix per stage from a master seed."""
        raw = splitmix_stream(seed, 8 * len(params_list))
        stages = [
            pick_matrix_from_seed(p, int.from_bytes(raw[8 * i : 8 * i + 8], "little"))
            for i, p in enumerate(params_list)
        ]
        return cls(stages)

    @property
    def input_bits(self) -> int:
        return self.stages[0].params.input_bits

    @property
    def out_bits(self) -> int:
        return self.stages[-1].params.out_bits

    def expand(self, x: BitVec) -> BitVec:
        return pick_chain_expand(self, x)

    def __len__(self) -> int:
        return len(self.stages)


def pick_chain_expand(chain: PickChain, x: BitVec) -> BitVec:
    """Apply the chain's stages in order."""
    out = x
    for stage in chain.stages:
        out = pick_expand(stage, out)
    return out
