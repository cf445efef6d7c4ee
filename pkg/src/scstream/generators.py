"""Iterated-map keystream generators.

Two base generators share one shape: a keyed state is advanced by a hard-to-
invert map and a projection of each new state is emitted as a keystream
chunk. ``QuadSystem`` iterates a random multivariate quadratic map over
GF(2); ``RsaPrgParams`` iterates modular exponentiation and emits low bits.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .gf2 import BitVec, pack_bits_blob, splitmix_stream, transpose_bits

__all__ = [
    "QuadSystem",
    "RsaPrgParams",
    "GeneratorState",
    "QuadGenerator",
    "RsaPrgGenerator",
    "pair_index",
    "quad_eval_naive",
    "quad_eval",
    "quad_step",
    "rsaprg_step",
    "tcs_keystream",
    "SECURE_QUAD_STATE_BITS",
    "SECURE_RSAPRG_MODULUS_BITS",
    "RSAPRG_OUTPUT_CAP_BITS",
]

# Recommended full-strength profiles. Everything smaller is a desk-test
# configuration with no security margin at all.
SECURE_QUAD_STATE_BITS = 160
SECURE_RSAPRG_MODULUS_BITS = 6144
RSAPRG_OUTPUT_CAP_BITS = 2**32


def pair_index(n: int, i: int, j: int) -> int:
    """Rank of the ordered pair (i, j), 0 <= i < j < n, in lexicographic order."""
    if not 0 <= i < j < n:
        raise ValueError("need 0 <= i < j < n")
    return i * n - i * (i + 1) // 2 + (j - i - 1)


class QuadSystem:
    """A random quadratic map from n bits to kq*n bits over GF(2).

    Each output equation is constant + linear + quadratic monomials. The
    coefficients are stored per monomial across all equations (one packed
    int per monomial), so evaluating the whole map XORs the coefficient
    columns of the active monomials.

    The canonical serialized layout is per equation: bit 0 the constant,
    bits 1..n the linear coefficients, then n(n-1)/2 pair coefficients in
    lexicographic (i, j) order, padded to whole bytes.
    """

    __slots__ = ("n", "kq", "const_col", "lin_cols", "quad_cols")

    def __init__(self, n: int, kq: int, const_col: int, lin_cols, quad_cols):
        if n < 1:
            raise ValueError("state width must be at least 1 bit")
        if kq < 2:
            raise ValueError("expansion factor must be at least 2")
        npairs = n * (n - 1) // 2
        lin_cols = tuple(int(c) for c in lin_cols)
        quad_cols = tuple(int(c) for c in quad_cols)
        if len(lin_cols) != n or len(quad_cols) != npairs:
            raise ValueError("coefficient column counts do not match n")
        neq = kq * n
        for c in (const_col, *lin_cols, *quad_cols):
            if c < 0 or c >> neq:
                raise ValueError("coefficient column does not fit the equation count")
        self.n = n
        self.kq = kq
        self.const_col = int(const_col)
        self.lin_cols = lin_cols
        self.quad_cols = quad_cols

    @property
    def neq(self) -> int:
        return self.kq * self.n

    @property
    def nterms(self) -> int:
        return 1 + self.n + self.n * (self.n - 1) // 2

    @property
    def chunk_bits(self) -> int:
        return (self.kq - 1) * self.n

    @classmethod
    def from_equation_blobs(cls, n: int, kq: int, data: bytes) -> "QuadSystem":
        nterms = 1 + n + n * (n - 1) // 2
        cols = transpose_bits(data, kq * n, nterms)
        return cls(n, kq, cols[0], cols[1 : 1 + n], cols[1 + n :])

    @classmethod
    def from_seed(cls, n: int, kq: int, seed: int) -> "QuadSystem":
        nterms = 1 + n + n * (n - 1) // 2
        eq_bytes = (nterms + 7) // 8
        data = splitmix_stream(seed, eq_bytes * kq * n)
        return cls.from_equation_blobs(n, kq, data)

    def equation_blobs(self) -> bytes:
        """Serialize to the canonical per-equation layout (pad bits zero)."""
        cols = [self.const_col, *self.lin_cols, *self.quad_cols]
        eq_ints = transpose_bits(pack_bits_blob(cols, self.neq), self.nterms, self.neq)
        return pack_bits_blob(eq_ints, self.nterms)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, QuadSystem)
            and self.n == other.n
            and self.kq == other.kq
            and self.const_col == other.const_col
            and self.lin_cols == other.lin_cols
            and self.quad_cols == other.quad_cols
        )

    def __hash__(self):
        return hash((self.n, self.kq, self.const_col, self.lin_cols, self.quad_cols))

    def __repr__(self) -> str:
        return f"QuadSystem(n={self.n}, kq={self.kq})"


@dataclass(frozen=True)
class RsaPrgParams:
    """Modular-power generator parameters: x -> x^exponent mod modulus,
    emitting the ``out_bits`` low bits of each new state."""

    modulus: int
    exponent: int
    out_bits: int

    def __post_init__(self):
        if self.modulus < 15 or self.modulus % 2 == 0:
            raise ValueError("modulus must be odd and at least 15")
        if self.exponent < 3:
            raise ValueError("exponent must be at least 3")
        if not 1 <= self.out_bits < self.modulus.bit_length():
            raise ValueError("out_bits must lie in [1, bit length of modulus)")

    @property
    def nbits(self) -> int:
        return self.modulus.bit_length()

    @property
    def chunk_bits(self) -> int:
        return self.out_bits


@dataclass(frozen=True)
class GeneratorState:
    """Current state of a generator: the iterate x and its iteration index."""

    kind: str  # "quad" | "rsaprg"
    x: object  # BitVec for quad, int for rsaprg
    index: int = 0


def quad_eval_naive(system: QuadSystem, x: BitVec) -> BitVec:
    """Reference evaluation: per equation, add each monomial's contribution.

    Slow by design; kept as the independent route against which the packed
    evaluator is checked.
    """
    n = system.n
    if x.nbits != n:
        raise ValueError(f"input must have {n} bits")
    xb = x.bits()
    out = 0
    for h in range(system.neq):
        acc = (system.const_col >> h) & 1
        for i in range(n):
            if xb[i]:
                acc ^= (system.lin_cols[i] >> h) & 1
        for i in range(n):
            if not xb[i]:
                continue
            for j in range(i + 1, n):
                if xb[j]:
                    acc ^= (system.quad_cols[pair_index(n, i, j)] >> h) & 1
        if acc:
            out |= 1 << h
    return BitVec(system.neq, out)


def quad_eval(system: QuadSystem, x: BitVec) -> BitVec:
    """Evaluate all equations at once by XOR-ing active coefficient columns."""
    n = system.n
    if x.nbits != n:
        raise ValueError(f"input must have {n} bits")
    v = x.value
    active = [i for i in range(n) if (v >> i) & 1]
    acc = system.const_col
    lin = system.lin_cols
    quad = system.quad_cols
    for i in active:
        acc ^= lin[i]
    for pos, i in enumerate(active):
        base = i * n - i * (i + 1) // 2 - i - 1
        for j in active[pos + 1 :]:
            acc ^= quad[base + j]
    return BitVec(system.neq, acc)


def quad_step(system: QuadSystem, state: GeneratorState):
    """One iteration: the first n output bits become the next state, the
    remaining (kq-1)*n bits are the emitted chunk."""
    if state.kind != "quad":
        raise ValueError("state is not a quad state")
    y = quad_eval(system, state.x)
    new_x = y.slice(0, system.n)
    chunk = y.slice(system.n, system.neq)
    return GeneratorState("quad", new_x, state.index + 1), chunk


def rsaprg_step(params: RsaPrgParams, state: GeneratorState):
    """One iteration: x -> x^e mod N; the chunk is the low out_bits of the
    new state."""
    if state.kind != "rsaprg":
        raise ValueError("state is not an rsaprg state")
    x = state.x
    if not 0 <= x < params.modulus:
        raise ValueError("state must lie in [0, modulus)")
    new_x = pow(x, params.exponent, params.modulus)
    chunk = BitVec(params.out_bits, new_x & ((1 << params.out_bits) - 1))
    return GeneratorState("rsaprg", new_x, state.index + 1), chunk


def _initial_state(params, x0) -> GeneratorState:
    if isinstance(params, QuadSystem):
        if not isinstance(x0, BitVec) or x0.nbits != params.n:
            raise ValueError(f"quad seed must be a {params.n}-bit vector")
        return GeneratorState("quad", x0, 0)
    if isinstance(params, RsaPrgParams):
        if not isinstance(x0, int):
            raise ValueError("rsaprg seed must be an int")
        if not 0 <= x0 < params.modulus:
            raise ValueError("rsaprg seed must lie in [0, modulus)")
        return GeneratorState("rsaprg", x0, 0)
    raise TypeError(f"unsupported generator parameters: {type(params)!r}")


def _step(params, state: GeneratorState):
    if state.kind == "quad":
        return quad_step(params, state)
    return rsaprg_step(params, state)


def tcs_keystream(params, x0, nbits: int) -> BitVec:
    """Concatenate chunks from successive iterations, truncated to nbits."""
    if nbits < 0:
        raise ValueError("nbits must be non-negative")
    state = _initial_state(params, x0)
    acc = 0
    filled = 0
    while filled < nbits:
        state, chunk = _step(params, state)
        acc |= chunk.value << filled
        filled += chunk.nbits
    return BitVec(nbits, acc & ((1 << nbits) - 1))


class QuadGenerator:
    """Stateful stepper around a QuadSystem, for pipelines and benchmarks."""

    def __init__(self, system: QuadSystem, x0: BitVec):
        self.system = system
        self._state = _initial_state(system, x0)

    @property
    def chunk_bits(self) -> int:
        return self.system.chunk_bits

    @property
    def iterations(self) -> int:
        return self._state.index

    @property
    def state(self) -> GeneratorState:
        return self._state

    def step(self) -> BitVec:
        self._state, chunk = quad_step(self.system, self._state)
        return chunk


class RsaPrgGenerator:
    """Stateful stepper around RsaPrgParams."""

    def __init__(self, params: RsaPrgParams, x0: int):
        self.params = params
        self._state = _initial_state(params, x0)

    @property
    def chunk_bits(self) -> int:
        return self.params.out_bits

    @property
    def iterations(self) -> int:
        return self._state.index

    @property
    def state(self) -> GeneratorState:
        return self._state

    def step(self) -> BitVec:
        self._state, chunk = rsaprg_step(self.params, self._state)
        return chunk


def make_generator(params, x0):
    """Build the stateful stepper matching the parameter object's kind."""
    if isinstance(params, QuadSystem):
        return QuadGenerator(params, x0)
    if isinstance(params, RsaPrgParams):
        return RsaPrgGenerator(params, x0)
    raise TypeError(f"unsupported generator parameters: {type(params)!r}")
