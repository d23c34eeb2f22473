"""Dense linear algebra over GF(2) with rows bit-packed into 64-bit words.

Rank, kernel and row-reduction drive everything else in the package, and
the matrices involved (2n x 2n symplectic data) grow to a couple of
thousand columns in the statistical sweeps, so rows are stored as numpy
``uint64`` words and elimination XORs whole words at a time.

Bit convention: bit ``j`` of a row lives at ``words[j // 64] >> (j % 64) & 1``
(LSB first, matching ``np.unpackbits(..., bitorder="little")`` on a uint8
view).  Padding bits beyond ``ncols`` are always zero.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from ._kernels import forward_eliminate

WORD_BITS = 64


def _nwords(ncols: int) -> int:
    return max(1, (ncols + WORD_BITS - 1) // WORD_BITS)


def _pad_mask(ncols: int) -> int:
    """Mask selecting the valid bits of the last word."""
    rem = ncols % WORD_BITS
    return (1 << rem) - 1 if rem else (1 << WORD_BITS) - 1


def pack_rows(bits: np.ndarray, ncols: int) -> np.ndarray:
    """Pack a (m, ncols) 0/1 array into (m, nwords) uint64 words."""
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.ndim == 1:
        bits = bits.reshape(1, -1) if ncols else bits.reshape(-1, 0)
    if bits.shape[1] != ncols:
        raise ValueError("bit array does not match ncols")
    m = bits.shape[0]
    padded = np.zeros((m, _nwords(ncols) * WORD_BITS), dtype=np.uint8)
    if ncols:
        padded[:, :ncols] = bits & 1
    packed = np.packbits(padded, axis=1, bitorder="little")
    return packed.view(np.uint64).reshape(m, _nwords(ncols))


def unpack_rows(words: np.ndarray, ncols: int) -> np.ndarray:
    """Inverse of :func:`pack_rows`; returns a (m, ncols) uint8 array."""
    words = np.ascontiguousarray(words, dtype=np.uint64)
    m = words.shape[0]
    bits = np.unpackbits(words.view(np.uint8), axis=1, bitorder="little")
    return bits[:, :ncols].copy() if ncols else np.zeros((m, 0), dtype=np.uint8)


def int_to_words(value: int, ncols: int) -> np.ndarray:
    """Encode a Python-int bitmask as a packed word row."""
    if value < 0 or value >> ncols:
        raise ValueError(f"value does not fit in {ncols} bits")
    nw = _nwords(ncols)
    return np.frombuffer(value.to_bytes(nw * 8, "little"), dtype=np.uint64).copy()


def words_to_int(words: np.ndarray) -> int:
    return int.from_bytes(np.ascontiguousarray(words, dtype=np.uint64).tobytes(), "little")


class BitVector:
    """An immutable fixed-length vector over GF(2)."""

    __slots__ = ("words", "length")

    def __init__(self, words: np.ndarray, length: int):
        words = np.ascontiguousarray(words, dtype=np.uint64)
        if words.ndim != 1 or words.shape[0] != _nwords(length):
            raise ValueError("word buffer does not match length")
        words = words.copy()
        if length:
            words[-1] &= np.uint64(_pad_mask(length))
        else:
            words[:] = 0
        words.flags.writeable = False
        self.words = words
        self.length = length

    @classmethod
    def zeros(cls, length: int) -> "BitVector":
        return cls(np.zeros(_nwords(length), dtype=np.uint64), length)

    @classmethod
    def from_int(cls, value: int, length: int) -> "BitVector":
        return cls(int_to_words(value, length), length)

    @classmethod
    def from_bits(cls, bits: Iterable[int], length: int | None = None) -> "BitVector":
        arr = np.fromiter((int(b) & 1 for b in bits), dtype=np.uint8)
        if length is None:
            length = arr.shape[0]
        elif length != arr.shape[0]:
            raise ValueError("length does not match bit count")
        return cls(pack_rows(arr.reshape(1, -1), length)[0], length)

    def to_int(self) -> int:
        return words_to_int(self.words)

    def bits(self) -> np.ndarray:
        return unpack_rows(self.words.reshape(1, -1), self.length)[0]

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, j: int) -> int:
        if not 0 <= j < self.length:
            raise IndexError(f"bit index {j} out of range for length {self.length}")
        return int(self.words[j // WORD_BITS] >> np.uint64(j % WORD_BITS)) & 1

    def __xor__(self, other: "BitVector") -> "BitVector":
        if self.length != other.length:
            raise ValueError("length mismatch")
        return BitVector(self.words ^ other.words, self.length)

    def dot(self, other: "BitVector") -> int:
        """Inner product mod 2."""
        if self.length != other.length:
            raise ValueError("length mismatch")
        return int(np.bitwise_count(self.words & other.words).sum()) & 1

    def popcount(self) -> int:
        return int(np.bitwise_count(self.words).sum())

    def is_zero(self) -> bool:
        return not self.words.any()

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, BitVector)
            and self.length == other.length
            and bool(np.array_equal(self.words, other.words))
        )

    def __hash__(self) -> int:
        return hash((self.length, self.words.tobytes()))

    def __repr__(self) -> str:
        return f"BitVector({''.join(str(b) for b in self.bits())})"


class BitMatrix:
    """An immutable matrix over GF(2), rows bit-packed into uint64 words."""

    __slots__ = ("words", "nrows", "ncols")

    def __init__(self, words: np.ndarray, ncols: int):
        words = np.ascontiguousarray(words, dtype=np.uint64)
        if words.ndim != 2 or words.shape[1] != _nwords(ncols):
            raise ValueError("word buffer does not match column count")
        words = words.copy()
        if ncols:
            words[:, -1] &= np.uint64(_pad_mask(ncols))
        else:
            words[:] = 0
        words.flags.writeable = False
        self.words = words
        self.nrows = words.shape[0]
        self.ncols = ncols

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "BitMatrix":
        return cls(np.zeros((nrows, _nwords(ncols)), dtype=np.uint64), ncols)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls.from_dense(np.eye(n, dtype=np.uint8))

    @classmethod
    def from_dense(cls, bits: np.ndarray) -> "BitMatrix":
        bits = np.asarray(bits, dtype=np.uint8)
        if bits.ndim != 2:
            raise ValueError("expected a 2-d array")
        return cls(pack_rows(bits, bits.shape[1]), bits.shape[1])

    @classmethod
    def from_rows(cls, rows: Sequence[BitVector]) -> "BitMatrix":
        if not rows:
            raise ValueError("from_rows needs at least one row; use zeros() for empty")
        ncols = rows[0].length
        if any(r.length != ncols for r in rows):
            raise ValueError("rows differ in length")
        return cls(np.stack([r.words for r in rows]), ncols)

    @classmethod
    def from_ints(cls, values: Sequence[int], ncols: int) -> "BitMatrix":
        if not values:
            return cls.zeros(0, ncols)
        return cls(np.stack([int_to_words(v, ncols) for v in values]), ncols)

    def to_dense(self) -> np.ndarray:
        return unpack_rows(self.words, self.ncols)

    def row(self, i: int) -> BitVector:
        return BitVector(self.words[i], self.ncols)

    def row_ints(self) -> list[int]:
        return [words_to_int(w) for w in self.words]

    def get(self, i: int, j: int) -> int:
        if not (0 <= i < self.nrows and 0 <= j < self.ncols):
            raise IndexError("matrix index out of range")
        return int(self.words[i, j // WORD_BITS] >> np.uint64(j % WORD_BITS)) & 1

    def transpose(self) -> "BitMatrix":
        return BitMatrix.from_dense(self.to_dense().T)

    def vstack(self, other: "BitMatrix") -> "BitMatrix":
        if self.ncols != other.ncols:
            raise ValueError("column mismatch")
        return BitMatrix(np.concatenate([self.words, other.words]), self.ncols)

    def take_columns(self, cols: Sequence[int]) -> "BitMatrix":
        """Gather the listed columns (in the given order) into a new matrix."""
        cols = list(cols)
        if not cols:
            return BitMatrix.zeros(self.nrows, 0)
        lo, hi = min(cols), max(cols)
        if lo < 0 or hi >= self.ncols:
            raise IndexError("column index out of range")
        # Word-aligned contiguous ranges avoid the unpack round trip; this is
        # the shape the big bipartite sweeps produce.
        if cols == list(range(lo, hi + 1)) and lo % WORD_BITS == 0:
            w0 = lo // WORD_BITS
            w1 = (hi // WORD_BITS) + 1
            sub = self.words[:, w0:w1]
            return BitMatrix(np.ascontiguousarray(sub), hi - lo + 1)
        dense = self.to_dense()
        return BitMatrix.from_dense(dense[:, cols])

    def __xor__(self, other: "BitMatrix") -> "BitMatrix":
        if self.ncols != other.ncols or self.nrows != other.nrows:
            raise ValueError("shape mismatch")
        return BitMatrix(self.words ^ other.words, self.ncols)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, BitMatrix)
            and self.ncols == other.ncols
            and self.nrows == other.nrows
            and bool(np.array_equal(self.words, other.words))
        )

    def __hash__(self) -> int:
        return hash((self.nrows, self.ncols, self.words.tobytes()))

    def __repr__(self) -> str:
        return f"BitMatrix({self.nrows}x{self.ncols})"


# ---------------------------------------------------------------------------
# Elimination core.  Works on raw mutable word arrays; the public wrappers
# keep BitMatrix values immutable.
# ---------------------------------------------------------------------------


def _rref_words(
    words: np.ndarray, ncols: int, col_order: Sequence[int] | None = None
) -> tuple[np.ndarray, list[int]]:
    """In-place reduced row echelon form; returns (words, pivot columns).

    ``col_order`` selects the order in which columns are tried for pivots
    (defaults to 0..ncols-1).  Rows end up sorted by pivot position in that
    order.
    """
    m = words.shape[0]
    pivots: list[int] = []
    r = 0
    order = range(ncols) if col_order is None else col_order
    for col in order:
        if r == m:
            break
        w, b = divmod(col, WORD_BITS)
        shift = np.uint64(b)
        colbits = (words[r:, w] >> shift) & np.uint64(1)
        nz = np.nonzero(colbits)[0]
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            words[[r, p]] = words[[p, r]]
        mask = ((words[:, w] >> shift) & np.uint64(1)).astype(bool)
        mask[r] = False
        if mask.any():
            words[mask] ^= words[r]
        pivots.append(col)
        r += 1
    return words, pivots


def _rank_words(words: np.ndarray, ncols: int) -> int:
    """Rank via compiled forward elimination (mutates ``words``)."""
    if words.shape[0] == 0 or ncols == 0:
        return 0
    return int(forward_eliminate(words, ncols))


def rank(M: BitMatrix) -> int:
    """Dimension of the row space of ``M`` over GF(2)."""
    if M.nrows == 0 or M.ncols == 0:
        return 0
    return _rank_words(M.words.copy(), M.ncols)


def row_reduce(
    M: BitMatrix, col_order: Sequence[int] | None = None
) -> tuple[BitMatrix, tuple[int, ...]]:
    """Reduced row echelon form of ``M`` plus its pivot columns.

    The returned matrix has the same shape as the input (zero rows are kept
    at the bottom) and the same row space.
    """
    if M.nrows == 0:
        return M, ()
    words, pivots = _rref_words(M.words.copy(), M.ncols, col_order)
    return BitMatrix(words, M.ncols), tuple(pivots)


def row_reduce_tracked(
    M: BitMatrix, col_order: Sequence[int] | None = None
) -> tuple[BitMatrix, tuple[int, ...], BitMatrix]:
    """RREF together with the transform ``T`` such that ``T @ M = rref``.

    ``T`` is square (nrows x nrows) and records which original rows were
    XORed into each reduced row; callers use it to recompute sign data after
    a basis change.
    """
    if M.nrows == 0:
        return M, (), BitMatrix.zeros(0, 0)
    # Augment with identity columns; only the original columns take pivots.
    order = list(col_order) if col_order is not None else list(range(M.ncols))
    total_cols = M.ncols + M.nrows
    dense = np.concatenate([M.to_dense(), np.eye(M.nrows, dtype=np.uint8)], axis=1)
    words, pivots = _rref_words(pack_rows(dense, total_cols), total_cols, order)
    full = unpack_rows(words, total_cols)
    red = BitMatrix.from_dense(full[:, : M.ncols]) if M.ncols else BitMatrix.zeros(M.nrows, 0)
    tr = BitMatrix.from_dense(full[:, M.ncols :])
    return red, tuple(pivots), tr


def left_kernel_and_rank(M: BitMatrix) -> tuple[int, BitMatrix]:
    """(rank M, basis of {c : c M = 0}) in one augmented elimination.

    Forward-eliminates [M | I] with pivots restricted to the M columns; the
    identity parts of the rows whose M-block vanished form the left-kernel
    basis.
    """
    m = M.nrows
    if m == 0:
        return 0, BitMatrix.zeros(0, 0)
    if M.ncols == 0:
        return 0, BitMatrix.identity(m)
    ident = BitMatrix.identity(m).words
    if M.ncols % WORD_BITS == 0:
        words = np.concatenate([M.words, ident], axis=1)
        r = int(forward_eliminate(words, M.ncols))
        if r == m:
            return r, BitMatrix.zeros(0, m)
        return r, BitMatrix(np.ascontiguousarray(words[r:, M.words.shape[1] :]), m)
    total = M.ncols + m
    dense = np.concatenate([M.to_dense(), np.eye(m, dtype=np.uint8)], axis=1)
    words = pack_rows(dense, total)
    r = int(forward_eliminate(words, M.ncols))
    if r == m:
        return r, BitMatrix.zeros(0, m)
    tail = unpack_rows(words[r:], total)[:, M.ncols :]
    return r, BitMatrix.from_dense(tail)


def kernel_basis(M: BitMatrix) -> BitMatrix:
    """A basis (as rows) of ``{v : M v = 0}``; nrows = ncols - rank."""
    n = M.ncols
    if M.nrows == 0:
        return BitMatrix.identity(n) if n else BitMatrix.zeros(0, 0)
    words, pivots = _rref_words(M.words.copy(), n)
    r = len(pivots)
    free = [c for c in range(n) if c not in set(pivots)]
    dim = n - r
    if dim == 0:
        return BitMatrix.zeros(0, n)
    dense = unpack_rows(words[:r], n)
    basis = np.zeros((dim, n), dtype=np.uint8)
    for idx, f in enumerate(free):
        basis[idx, f] = 1
        # Pivot coordinates copy the free column of the reduced rows.
        for i, p in enumerate(pivots):
            basis[idx, p] = dense[i, f]
    return BitMatrix.from_dense(basis)


def matmul(A: BitMatrix, B: BitMatrix) -> BitMatrix:
    """Product over GF(2): rows of the result combine rows of ``B``."""
    if A.ncols != B.nrows:
        raise ValueError("inner dimension mismatch")
    out = np.zeros((A.nrows, _nwords(B.ncols)), dtype=np.uint64)
    if A.nrows and B.nrows:
        abits = A.to_dense()
        for j in range(A.ncols):
            mask = abits[:, j].astype(bool)
            if mask.any():
                out[mask] ^= B.words[j]
    return BitMatrix(out, B.ncols)


def matvec(A: BitMatrix, v: BitVector) -> BitVector:
    """``A v`` over GF(2) (v as a column)."""
    if A.ncols != v.length:
        raise ValueError("dimension mismatch")
    if A.nrows == 0:
        return BitVector.zeros(0)
    prods = np.bitwise_count(A.words & v.words[None, :]).sum(axis=1) & 1
    return BitVector.from_bits(prods.astype(np.uint8), A.nrows)


def solve(A: BitMatrix, b: BitVector) -> BitVector | None:
    """One solution of ``A x = b`` over GF(2), or None if inconsistent."""
    if A.nrows != b.length:
        raise ValueError("dimension mismatch")
    n = A.ncols
    dense = np.concatenate([A.to_dense(), b.bits().reshape(-1, 1)], axis=1)
    words, pivots = _rref_words(pack_rows(dense, n + 1), n + 1, range(n))
    dense = unpack_rows(words, n + 1)
    r = len(pivots)
    if np.any(dense[r:, n]):
        return None
    x = np.zeros(n, dtype=np.uint8)
    for i, p in enumerate(pivots):
        x[p] = dense[i, n]
    return BitVector.from_bits(x, n)


def subspace_sum_dim(bases: Sequence[BitMatrix]) -> int:
    """dim(U_1 + ... + U_m) for row-space bases sharing a column count."""
    bases = [b for b in bases]
    if not bases:
        return 0
    ncols = bases[0].ncols
    if any(b.ncols != ncols for b in bases):
        raise ValueError("bases differ in column count")
    stacked = np.concatenate([b.words for b in bases]) if bases else None
    if stacked.shape[0] == 0:
        return 0
    return _rank_words(stacked.copy(), ncols)


def subspace_intersection_dim(U: BitMatrix, V: BitMatrix) -> int:
    """dim(U ∩ V) = dim U + dim V - dim(U + V)."""
    if U.ncols != V.ncols:
        raise ValueError("column mismatch")
    return rank(U) + rank(V) - subspace_sum_dim([U, V])


def in_row_span(M: BitMatrix, v: BitVector) -> bool:
    if M.ncols != v.length:
        raise ValueError("column mismatch")
    if v.is_zero():
        return True
    if M.nrows == 0:
        return False
    stacked = np.concatenate([M.words, v.words.reshape(1, -1)])
    return _rank_words(stacked.copy(), M.ncols) == rank(M)


def inverse(M: BitMatrix) -> BitMatrix:
    """Inverse of a square invertible matrix over GF(2)."""
    if M.nrows != M.ncols:
        raise ValueError("matrix is not square")
    n = M.nrows
    if n == 0:
        return M
    dense = np.concatenate([M.to_dense(), np.eye(n, dtype=np.uint8)], axis=1)
    words, pivots = _rref_words(pack_rows(dense, 2 * n), 2 * n, range(n))
    if len(pivots) < n:
        raise ValueError("matrix is singular")
    return BitMatrix.from_dense(unpack_rows(words, 2 * n)[:, n:])
