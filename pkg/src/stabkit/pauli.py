"""Pauli operators on n qubits in binary symplectic form.

An operator is stored as ``i^phase * X^x Z^z`` with ``x`` and ``z`` length-n
bit vectors and the phase exponent tracked mod 4 (needed because
``XZ = -iY``).  All X factors stand to the left of all Z factors.

Symplectic coordinates used throughout the package interleave the two
blocks: qubit ``q`` owns bits ``2q`` (x) and ``2q + 1`` (z) of a length-2n
vector.  Contiguous qubit ranges therefore occupy contiguous bit ranges,
which keeps party restrictions cheap.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import ParseError, SizeMismatchError
from .gf2 import BitMatrix, BitVector, pack_rows, unpack_rows

_EVEN_BITS = np.uint64(0x5555555555555555)
_PHASE_PREFIX = {0: "+", 1: "i", 2: "-", 3: "-i"}


def _ycount_mod4(x: BitVector, z: BitVector) -> int:
    """Phase exponent of the +-signed operator: each Y = iXZ contributes i."""
    return int(np.bitwise_count(x.words & z.words).sum()) & 3


class PauliOperator:
    """An element of the n-qubit Pauli group, phases tracked mod 4."""

    __slots__ = ("n", "x", "z", "phase_exponent")

    def __init__(self, n: int, x: BitVector, z: BitVector, phase_exponent: int = 0):
        if x.length != n or z.length != n:
            raise SizeMismatchError("x/z length must equal qubit count")
        self.n = n
        self.x = x
        self.z = z
        self.phase_exponent = phase_exponent & 3

    # -- construction -------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "PauliOperator":
        return cls(n, BitVector.zeros(n), BitVector.zeros(n), 0)

    @classmethod
    def from_string(cls, text: str) -> "PauliOperator":
        """Parse ``[+|-]<I|X|Y|Z>*``; ``Y`` means ``i X Z`` on that qubit."""
        return parse_pauli(text)

    @classmethod
    def single(cls, n: int, qubit: int, kind: str, sign: int = 0) -> "PauliOperator":
        """One-qubit ``kind`` in {X, Y, Z} at ``qubit``, identity elsewhere."""
        letters = ["I"] * n
        letters[qubit] = kind
        p = parse_pauli("".join(letters))
        return p.with_sign(sign)

    @classmethod
    def from_symplectic(cls, row: BitVector, sign: int = 0) -> "PauliOperator":
        """Build from an interleaved length-2n vector with the given sign.

        The phase exponent is the Hermitian one for the bit pattern
        (``#Y mod 2``) plus ``2 * sign``.
        """
        if row.length % 2:
            raise ValueError("symplectic vector length must be even")
        n = row.length // 2
        bits = row.bits()
        x = BitVector.from_bits(bits[0::2], n)
        z = BitVector.from_bits(bits[1::2], n)
        return cls(n, x, z, (_ycount_mod4(x, z) + 2 * (sign & 1)) & 3)

    # -- views ----------------------------------------------------------

    def symplectic(self) -> BitVector:
        """Interleaved (x0, z0, x1, z1, ...) vector of length 2n."""
        bits = np.zeros(2 * self.n, dtype=np.uint8)
        bits[0::2] = self.x.bits()
        bits[1::2] = self.z.bits()
        return BitVector.from_bits(bits, 2 * self.n)

    @property
    def sign_bit(self) -> int:
        """0 for +, 1 for -, relative to the +-signed phase of the bits."""
        return (((self.phase_exponent - _ycount_mod4(self.x, self.z)) & 3) >> 1) & 1

    def with_sign(self, sign: int) -> "PauliOperator":
        return PauliOperator(
            self.n, self.x, self.z, (_ycount_mod4(self.x, self.z) + 2 * (sign & 1)) & 3
        )

    def is_hermitian(self) -> bool:
        return (self.phase_exponent & 1) == (self.x.dot(self.z) & 1)

    def is_identity(self) -> bool:
        return self.x.is_zero() and self.z.is_zero()

    # -- algebra ---------------------------------------------------------

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        return multiply(self, other)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, PauliOperator)
            and self.n == other.n
            and self.phase_exponent == other.phase_exponent
            and self.x == other.x
            and self.z == other.z
        )

    def __hash__(self) -> int:
        return hash((self.n, self.phase_exponent, self.x, self.z))

    def __str__(self) -> str:
        body = "".join("IXZY"[xb | (zb << 1)] for xb, zb in zip(self.x.bits(), self.z.bits()))
        h = (self.phase_exponent - _ycount_mod4(self.x, self.z)) & 3
        return _PHASE_PREFIX[h] + body

    def __repr__(self) -> str:
        return f"PauliOperator({self!s})"


def symplectic_product(P: PauliOperator, Q: PauliOperator) -> int:
    """The commutation bit: 0 if P and Q commute, 1 if they anticommute."""
    if P.n != Q.n:
        raise SizeMismatchError("operators act on different qubit counts")
    return (P.x.dot(Q.z) + P.z.dot(Q.x)) & 1


def multiply(P: PauliOperator, Q: PauliOperator) -> PauliOperator:
    """Group product ``P Q`` with exact phase bookkeeping."""
    if P.n != Q.n:
        raise SizeMismatchError("operators act on different qubit counts")
    # Z^{zP} X^{xQ} = (-1)^{zP.xQ} X^{xQ} Z^{zP}
    phase = (P.phase_exponent + Q.phase_exponent + 2 * P.z.dot(Q.x)) & 3
    return PauliOperator(P.n, P.x ^ Q.x, P.z ^ Q.z, phase)


def restrict(P: PauliOperator, qubits: Iterable[int]) -> PauliOperator:
    """Tensor factor of ``P`` on the listed qubits (phase set to 0)."""
    idx = sorted(set(int(q) for q in qubits))
    for q in idx:
        if not 0 <= q < P.n:
            raise IndexError(f"qubit {q} out of range for n={P.n}")
    xb, zb = P.x.bits(), P.z.bits()
    m = len(idx)
    return PauliOperator(
        m,
        BitVector.from_bits((xb[q] for q in idx), m),
        BitVector.from_bits((zb[q] for q in idx), m),
        0,
    )


def is_identity_on(P: PauliOperator, qubits: Iterable[int]) -> bool:
    """True iff both x and z bits vanish on every listed qubit."""
    xb, zb = P.x.bits(), P.z.bits()
    for q in qubits:
        if not 0 <= q < P.n:
            raise IndexError(f"qubit {q} out of range for n={P.n}")
        if xb[q] or zb[q]:
            return False
    return True


def parse_pauli(text: str, line: int | None = None) -> PauliOperator:
    """Parse the text encoding: optional +/- prefix, then I/X/Y/Z letters."""
    s = text.strip()
    col = 1
    sign = 0
    if s.startswith(("+", "-")):
        sign = 1 if s[0] == "-" else 0
        s = s[1:]
        col = 2
    if not s:
        raise ParseError("empty Pauli string", line, col)
    x_bits, z_bits, nys = [], [], 0
    for off, ch in enumerate(s):
        if ch == "I":
            x_bits.append(0)
            z_bits.append(0)
        elif ch == "X":
            x_bits.append(1)
            z_bits.append(0)
        elif ch == "Y":
            x_bits.append(1)
            z_bits.append(1)
            nys += 1
        elif ch == "Z":
            x_bits.append(0)
            z_bits.append(1)
        else:
            raise ParseError(f"invalid Pauli character {ch!r}", line, col + off)
    n = len(s)
    phase = ((nys & 3) + 2 * sign) & 3
    return PauliOperator(n, BitVector.from_bits(x_bits, n), BitVector.from_bits(z_bits, n), phase)


# ---------------------------------------------------------------------------
# Bulk symplectic helpers shared by the group/Clifford machinery.  These act
# on packed uint64 word arrays in the interleaved layout.
# ---------------------------------------------------------------------------


def swap_xz_words(words: np.ndarray) -> np.ndarray:
    """Apply the symplectic form matrix J: swap the (x, z) bits of each qubit."""
    w = np.asarray(words, dtype=np.uint64)
    return ((w & _EVEN_BITS) << np.uint64(1)) | ((w >> np.uint64(1)) & _EVEN_BITS)


def omega_rows(v_words: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """Symplectic product of one packed vector against each packed row."""
    jv = swap_xz_words(v_words)
    return (np.bitwise_count(rows & jv[None, :]).sum(axis=1) & 1).astype(np.uint8)


def omega_matrix(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """All pairwise symplectic products; (len(A), len(B)) 0/1 array."""
    out = np.zeros((A.shape[0], B.shape[0]), dtype=np.uint8)
    jb = swap_xz_words(B)
    for i in range(A.shape[0]):
        out[i] = np.bitwise_count(jb & A[i][None, :]).sum(axis=1) & 1
    return out


def party_columns(qubits: Sequence[int]) -> list[int]:
    """Interleaved symplectic column indices owned by the listed qubits."""
    cols: list[int] = []
    for q in sorted(qubits):
        cols.append(2 * q)
        cols.append(2 * q + 1)
    return cols


def xz_to_interleaved(x_bits: np.ndarray, z_bits: np.ndarray) -> BitMatrix:
    """Stack row-wise (m, n) x and z bit arrays into an (m, 2n) matrix."""
    x_bits = np.asarray(x_bits, dtype=np.uint8)
    z_bits = np.asarray(z_bits, dtype=np.uint8)
    m, n = x_bits.shape
    out = np.zeros((m, 2 * n), dtype=np.uint8)
    out[:, 0::2] = x_bits
    out[:, 1::2] = z_bits
    return BitMatrix(pack_rows(out, 2 * n), 2 * n)


def interleaved_to_xz(M: BitMatrix) -> tuple[np.ndarray, np.ndarray]:
    bits = unpack_rows(M.words, M.ncols)
    return bits[:, 0::2], bits[:, 1::2]
