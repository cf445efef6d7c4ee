"""Packed GF(2) primitives: bit vectors, column-major bit matrices, Gaussian
elimination, and a deterministic byte-stream expander for public parameters.

One bit convention holds across the whole package: LSB-first. Bit i of a
vector is ``(value >> i) & 1`` and lands in byte ``i // 8`` of the serialized
form; the first bit of a stream is the low bit of its first byte.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "BitVec",
    "BitMatrix",
    "GaussResult",
    "InconsistentSystemError",
    "splitmix_stream",
    "bitvec_xor",
    "gf2_gauss",
    "rref_rows",
    "transpose_bits",
    "pack_bits_blob",
]

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def splitmix_stream(seed: int, nbytes: int) -> bytes:
    """Expand a 64-bit seed into ``nbytes`` deterministic bytes (SplitMix64).

    Every step advances the state by the golden-ratio increment, mixes it
    with the standard two multiply-xorshift rounds, and emits 8 bytes
    little-endian. The tail of the last step is dropped when ``nbytes`` is
    not a multiple of 8.
    """
    if nbytes < 0:
        raise ValueError("nbytes must be non-negative")
    if not 0 <= seed <= _MASK64:
        raise ValueError("seed must fit in 64 bits")
    nsteps = (nbytes + 7) // 8
    if nsteps == 0:
        return b""
    # Vectorized but bit-identical to the scalar loop: state after step t is
    # seed + t*gamma mod 2^64, and the mix is stateless.
    z = np.uint64(seed) + np.arange(1, nsteps + 1, dtype=np.uint64) * np.uint64(_GAMMA)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    z = z ^ (z >> np.uint64(31))
    return z.astype("<u8").tobytes()[:nbytes]


class BitVec:
    """Immutable GF(2) vector packed into one Python int."""

    __slots__ = ("nbits", "value")

    def __init__(self, nbits: int, value: int = 0):
        if nbits < 0:
            raise ValueError("nbits must be non-negative")
        value = int(value)
        if value < 0 or value >> nbits:
            raise ValueError(f"value does not fit in {nbits} bits")
        self.nbits = nbits
        self.value = value

    @classmethod
    def from_bytes(cls, data: bytes, nbits: int | None = None) -> "BitVec":
        """Unpack little-endian bytes; pad bits beyond ``nbits`` must be zero."""
        if nbits is None:
            nbits = 8 * len(data)
        if 8 * len(data) < nbits:
            raise ValueError(f"need {(nbits + 7) // 8} bytes for {nbits} bits")
        return cls(nbits, int.from_bytes(data, "little"))

    @classmethod
    def from_bits(cls, bits) -> "BitVec":
        value = 0
        n = 0
        for b in bits:
            if b & 1:
                value |= 1 << n
            n += 1
        return cls(n, value)

    def to_bytes(self) -> bytes:
        return self.value.to_bytes((self.nbits + 7) // 8, "little")

    def bit(self, i: int) -> int:
        if not 0 <= i < self.nbits:
            raise IndexError("bit index out of range")
        return (self.value >> i) & 1

    def bits(self) -> list[int]:
        v = self.value
        return [(v >> i) & 1 for i in range(self.nbits)]

    def ones(self) -> int:
        return self.value.bit_count()

    def concat(self, other: "BitVec") -> "BitVec":
        """Append ``other`` after self (self occupies the lower bit indices)."""
        return BitVec(self.nbits + other.nbits, self.value | (other.value << self.nbits))

    def slice(self, start: int, stop: int) -> "BitVec":
        if not 0 <= start <= stop <= self.nbits:
            raise ValueError("bad slice bounds")
        width = stop - start
        return BitVec(width, (self.value >> start) & ((1 << width) - 1))

    def __xor__(self, other: "BitVec") -> "BitVec":
        return bitvec_xor(self, other)

    def __len__(self) -> int:
        return self.nbits

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BitVec)
            and self.nbits == other.nbits
            and self.value == other.value
        )

    def __hash__(self) -> int:
        return hash((self.nbits, self.value))

    def __repr__(self) -> str:
        if self.nbits <= 64:
            body = "".join(str((self.value >> i) & 1) for i in range(self.nbits))
            return f"BitVec('{body}')"
        return f"BitVec(nbits={self.nbits})"


def bitvec_xor(a: BitVec, b: BitVec) -> BitVec:
    """Elementwise XOR of two equal-length vectors."""
    if a.nbits != b.nbits:
        raise ValueError(f"length mismatch: {a.nbits} vs {b.nbits}")
    return BitVec(a.nbits, a.value ^ b.value)


def pack_bits_blob(values, item_bits: int) -> bytes:
    """Pack ints of ``item_bits`` bits each into contiguous byte-padded items."""
    item_bytes = (item_bits + 7) // 8
    return b"".join(int(v).to_bytes(item_bytes, "little") for v in values)


def transpose_bits(blob: bytes, n_items: int, item_bits: int) -> list[int]:
    """Transpose a packed bit block.

    ``blob`` holds ``n_items`` items of ``item_bits`` bits each (LSB-first,
    each item padded to whole bytes). Returns ``item_bits`` ints where output
    t carries bit s = bit t of item s. Pad bits of the input are ignored.
    """
    if n_items == 0 or item_bits == 0:
        return [0] * item_bits
    item_bytes = (item_bits + 7) // 8
    if len(blob) != n_items * item_bytes:
        raise ValueError("blob size does not match item count")
    arr = np.frombuffer(blob, dtype=np.uint8).reshape(n_items, item_bytes)
    bits = np.unpackbits(arr, axis=1, bitorder="little")[:, :item_bits]
    packed = np.packbits(bits.T, axis=1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in packed]


class BitMatrix:
    """Immutable bit matrix stored column-major: one packed int per column,
    so XOR-ing whole columns is a single int operation."""

    __slots__ = ("nrows", "ncols", "_cols")

    def __init__(self, nrows: int, ncols: int, columns):
        columns = tuple(int(c) for c in columns)
        if nrows < 0 or ncols < 0:
            raise ValueError("dimensions must be non-negative")
        if len(columns) != ncols:
            raise ValueError(f"expected {ncols} columns, got {len(columns)}")
        for c in columns:
            if c < 0 or c >> nrows:
                raise ValueError(f"column does not fit in {nrows} bits")
        self.nrows = nrows
        self.ncols = ncols
        self._cols = columns

    @classmethod
    def from_columns(cls, cols: list[BitVec]) -> "BitMatrix":
        if not cols:
            raise ValueError("need at least one column (or use the int constructor)")
        nrows = cols[0].nbits
        return cls(nrows, len(cols), [c.value for c in cols])

    @classmethod
    def from_bytes(cls, nrows: int, ncols: int, data: bytes) -> "BitMatrix":
        """Parse column-major packed bytes, ceil(nrows/8) bytes per column."""
        col_bytes = (nrows + 7) // 8
        if len(data) != col_bytes * ncols:
            raise ValueError("matrix byte blob has wrong size")
        cols = [
            int.from_bytes(data[j * col_bytes : (j + 1) * col_bytes], "little")
            for j in range(ncols)
        ]
        return cls(nrows, ncols, cols)

    def to_bytes(self) -> bytes:
        return pack_bits_blob(self._cols, self.nrows)

    def column(self, j: int) -> BitVec:
        return BitVec(self.nrows, self._cols[j])

    def col_int(self, j: int) -> int:
        return self._cols[j]

    @property
    def columns(self) -> tuple[int, ...]:
        return self._cols

    def entry(self, r: int, c: int) -> int:
        if not (0 <= r < self.nrows and 0 <= c < self.ncols):
            raise IndexError("matrix index out of range")
        return (self._cols[c] >> r) & 1

    def row_ints(self) -> list[int]:
        """All rows as packed ints over ncols bits (bit j = entry (row, j))."""
        return transpose_bits(self.to_bytes(), self.ncols, self.nrows)

    def __xor__(self, other: "BitMatrix") -> "BitMatrix":
        if self.nrows != other.nrows or self.ncols != other.ncols:
            raise ValueError("dimension mismatch")
        return BitMatrix(
            self.nrows, self.ncols, [a ^ b for a, b in zip(self._cols, other._cols)]
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BitMatrix)
            and self.nrows == other.nrows
            and self.ncols == other.ncols
            and self._cols == other._cols
        )

    def __hash__(self) -> int:
        return hash((self.nrows, self.ncols, self._cols))

    def __repr__(self) -> str:
        return f"BitMatrix({self.nrows}x{self.ncols})"


class InconsistentSystemError(ValueError):
    """The linear system has no solution over GF(2)."""


def rref_rows(rows, ncols: int, rhs_bits: int | None = None):
    """Reduced row echelon form of GF(2) rows packed as ints.

    ``rows``: sequence of ints, bit j = coefficient of variable j.
    ``rhs_bits``: optional int, bit i = right-hand side of rows[i].

    Returns ``(reduced_rows, reduced_rhs_bits, pivots, consistent)`` where
    pivot row t has its pivot in column pivots[t] and reduced_rhs bit t is
    that row's right-hand side. ``consistent`` is False only when rhs_bits
    is given and some equation reduces to 0 = 1.
    """
    aug = rhs_bits is not None
    flag = 1 << ncols
    if aug:
        work = [int(r) | (((rhs_bits >> i) & 1) << ncols) for i, r in enumerate(rows)]
    else:
        work = [int(r) for r in rows]
    n = len(work)
    pivots = []
    r = 0
    for col in range(ncols):
        mask = 1 << col
        piv = None
        for i in range(r, n):
            if work[i] & mask:
                piv = i
                break
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        prow = work[r]
        for i in range(n):
            if i != r and (work[i] & mask):
                work[i] ^= prow
        pivots.append(col)
        r += 1
        if r == n:
            break
    consistent = True
    if aug:
        coeff_mask = flag - 1
        for i in range(r, n):
            if (work[i] & flag) and not (work[i] & coeff_mask):
                consistent = False
                break
    reduced = [w & (flag - 1) for w in work[:r]]
    rhs_out = 0
    if aug:
        for t in range(r):
            if work[t] & flag:
                rhs_out |= 1 << t
    return reduced, rhs_out, pivots, consistent


@dataclass
class GaussResult:
    """Outcome of Gaussian elimination on a bit matrix."""

    rank: int
    pivots: tuple[int, ...]
    rows: list[int]
    ncols: int
    solution: BitVec | None
    nullspace: list[BitVec]


def gf2_gauss(mat: BitMatrix, rhs: BitVec | None = None) -> GaussResult:
    """Row-reduce ``mat`` (and ``rhs`` if given) over GF(2).

    With ``rhs`` present, returns a particular solution of mat.x = rhs and a
    nullspace basis; raises InconsistentSystemError when no solution exists.
    """
    if rhs is not None and rhs.nbits != mat.nrows:
        raise ValueError("rhs length must equal the number of matrix rows")
    rows = mat.row_ints()
    rhs_bits = rhs.value if rhs is not None else None
    reduced, rhs_out, pivots, consistent = rref_rows(rows, mat.ncols, rhs_bits)
    if rhs is not None and not consistent:
        raise InconsistentSystemError("system has no solution")
    rank = len(pivots)
    pivot_set = set(pivots)
    free_cols = [c for c in range(mat.ncols) if c not in pivot_set]
    nullspace = []
    for f in free_cols:
        vec = 1 << f
        for t, p in enumerate(pivots):
            if (reduced[t] >> f) & 1:
                vec |= 1 << p
        nullspace.append(BitVec(mat.ncols, vec))
    solution = None
    if rhs is not None:
        sol = 0
        for t, p in enumerate(pivots):
            if (rhs_out >> t) & 1:
                sol |= 1 << p
        solution = BitVec(mat.ncols, sol)
    return GaussResult(
        rank=rank,
        pivots=tuple(pivots),
        rows=reduced,
        ncols=mat.ncols,
        solution=solution,
        nullspace=nullspace,
    )
