"""Clifford group elements as symplectic matrices with sign data.

An element is stored by the images of the 2n standard Pauli generators in
interleaved order (row ``2q`` = image of X_q, row ``2q+1`` = image of Z_q)
plus one sign bit per image.  Overall phases are quotiented away, so the
pair (matrix, signs) identifies the element.

The metric between two elements counts, minimized over generating sets of
the Pauli group, how many generators their conjugation actions send to
different Paulis (phases ignored); in symplectic terms this is
``rank(M1 + M2)`` over GF(2).

Text format: an ``n=<int>`` header, then 2n signed Pauli lines giving the
generator images in the interleaved order above.
"""

from __future__ import annotations

import numpy as np

from . import gf2
from .errors import ParseError, SizeMismatchError, ValidityError
from .gf2 import BitMatrix
from .pauli import (
    PauliOperator,
    multiply,
    omega_matrix,
    parse_pauli,
    swap_xz_words,
)
from .stabilizer import StabilizerGroup, _ComplementTracker, _xor_select


class CliffordElement:
    """A Clifford group element modulo phase: symplectic matrix plus signs."""

    __slots__ = ("n", "images", "signs")

    def __init__(self, n: int, images: BitMatrix, signs: np.ndarray, check: bool = True):
        if images.nrows != 2 * n or images.ncols != 2 * n:
            raise SizeMismatchError("image matrix must be 2n x 2n")
        signs = np.asarray(signs, dtype=np.uint8) & 1
        if signs.shape != (2 * n,):
            raise SizeMismatchError("one sign per generator image required")
        signs = signs.copy()
        signs.flags.writeable = False
        self.n = n
        self.images = images
        self.signs = signs
        if check and not self.is_symplectic():
            raise ValidityError("images do not preserve the commutation relations")

    @property
    def matrix(self) -> BitMatrix:
        """Column j = symplectic image of generator j."""
        return self.images.transpose()

    def is_symplectic(self) -> bool:
        om = omega_matrix(self.images.words, self.images.words)
        idx = np.arange(2 * self.n)
        expected = (idx[:, None] ^ 1) == idx[None, :]
        return bool(np.array_equal(om.astype(bool), expected))

    def image_pauli(self, j: int) -> PauliOperator:
        return PauliOperator.from_symplectic(self.images.row(j), int(self.signs[j]))

    def key(self) -> tuple:
        return (self.n, self.images.words.tobytes(), self.signs.tobytes())

    def __eq__(self, other: object) -> bool:
        return isinstance(other, CliffordElement) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"CliffordElement(n={self.n})"


# ---------------------------------------------------------------------------
# Constructors for specific elements
# ---------------------------------------------------------------------------


def identity(n: int) -> CliffordElement:
    return CliffordElement(n, BitMatrix.identity(2 * n), np.zeros(2 * n, np.uint8), check=False)


def _gate_from_images(n: int, image_strings: dict[int, str]) -> CliffordElement:
    rows = BitMatrix.identity(2 * n).to_dense()
    signs = np.zeros(2 * n, dtype=np.uint8)
    for j, text in image_strings.items():
        p = parse_pauli(text)
        rows[j] = p.symplectic().bits()
        signs[j] = p.sign_bit
    return CliffordElement(n, BitMatrix.from_dense(rows), signs)


def hadamard(n: int, q: int) -> CliffordElement:
    xq, zq = ["I"] * n, ["I"] * n
    xq[q], zq[q] = "Z", "X"
    return _gate_from_images(n, {2 * q: "".join(xq), 2 * q + 1: "".join(zq)})


def phase_gate(n: int, q: int) -> CliffordElement:
    yq = ["I"] * n
    yq[q] = "Y"
    return _gate_from_images(n, {2 * q: "".join(yq)})


def cnot(n: int, control: int, target: int) -> CliffordElement:
    if control == target:
        raise ValueError("control and target must differ")
    xc = ["I"] * n
    xc[control], xc[target] = "X", "X"
    zt = ["I"] * n
    zt[control], zt[target] = "Z", "Z"
    return _gate_from_images(n, {2 * control: "".join(xc), 2 * target + 1: "".join(zt)})


# ---------------------------------------------------------------------------
# Group operations
# ---------------------------------------------------------------------------


def apply(c: CliffordElement, P: PauliOperator) -> PauliOperator:
    """Conjugation action c P c† with exact sign bookkeeping."""
    if c.n != P.n:
        raise SizeMismatchError("element and operator qubit counts differ")
    out = PauliOperator.identity(P.n)
    xb, zb = P.x.bits(), P.z.bits()
    for q in np.nonzero(xb)[0]:
        out = multiply(out, c.image_pauli(2 * int(q)))
    for q in np.nonzero(zb)[0]:
        out = multiply(out, c.image_pauli(2 * int(q) + 1))
    return PauliOperator(P.n, out.x, out.z, (out.phase_exponent + P.phase_exponent) & 3)


def compose(c1: CliffordElement, c2: CliffordElement) -> CliffordElement:
    """The element acting as c1 after c2: apply(compose, P) = c1(c2(P))."""
    if c1.n != c2.n:
        raise SizeMismatchError("elements act on different qubit counts")
    rows = gf2.matmul(c2.images, c1.images)
    signs = np.zeros(2 * c1.n, dtype=np.uint8)
    for j in range(2 * c1.n):
        signs[j] = apply(c1, c2.image_pauli(j)).sign_bit
    return CliffordElement(c1.n, rows, signs, check=False)


def inverse(c: CliffordElement) -> CliffordElement:
    """Group inverse; compose(c, inverse(c)) is the all-plus identity."""
    n = c.n
    # For symplectic M, M^-1 = J M^T J; in row form that is J R^T J, i.e.
    # swap row pairs and swap the xz bits of every row of the transpose.
    rt = c.images.transpose().words.copy()
    perm = np.arange(2 * n) ^ 1
    rows_inv = BitMatrix(swap_xz_words(rt[perm]), 2 * n)
    signs = np.zeros(2 * n, dtype=np.uint8)
    out = CliffordElement(n, rows_inv, signs, check=False)
    for j in range(2 * n):
        q = PauliOperator.from_symplectic(rows_inv.row(j), 0)
        signs[j] = apply(c, q).sign_bit
    signs.flags.writeable = False
    return CliffordElement(n, rows_inv, signs, check=False)


def distance(c1: CliffordElement, c2: CliffordElement) -> int:
    """Metric: generators on which the actions disagree, minimized over
    generating sets; equals 2n minus the kernel dimension of the matrix
    difference.  Signs are ignored."""
    if c1.n != c2.n:
        raise SizeMismatchError("elements act on different qubit counts")
    return gf2.rank(c1.images ^ c2.images)


def conjugate_group(c: CliffordElement, S: StabilizerGroup) -> StabilizerGroup:
    """c S c† as a stabilizer group with exact generator signs."""
    if c.n != S.n:
        raise SizeMismatchError("element and group qubit counts differ")
    rows = gf2.matmul(S.sym, c.images)
    phases = np.zeros(S.dim, dtype=np.uint8)
    for i in range(S.dim):
        phases[i] = apply(c, S.generator(i)).phase_exponent
    return StabilizerGroup(S.n, rows, phases, check=False)


def stabilizer_of_zero_state(c: CliffordElement) -> StabilizerGroup:
    """Stabilizer group of the state c|0...0>: the signed Z-generator images."""
    zrows = c.images.words[1::2]
    phases = np.zeros(c.n, dtype=np.uint8)
    for q in range(c.n):
        phases[q] = c.image_pauli(2 * q + 1).phase_exponent
    return StabilizerGroup(c.n, BitMatrix(zrows, 2 * c.n), phases, check=False)


# ---------------------------------------------------------------------------
# Uniform sampling
# ---------------------------------------------------------------------------


def sample_uniform(n: int, rng: np.random.Generator) -> CliffordElement:
    """Exactly uniform over Sp(2n, 2), with uniform independent signs.

    Images of the anticommuting generator pairs (X_q, Z_q) are chosen
    sequentially: the X image is a uniform nonzero vector of the symplectic
    complement of the previous pairs, and the Z image a uniform solution of
    its commutation constraints.  Every partial assignment has the same
    number of completions, so the distribution is exactly uniform.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    nw = gf2._nwords(2 * n)
    tracker = _ComplementTracker(n)
    rows = np.zeros((2 * n, nw), dtype=np.uint64)
    for t in range(n):
        coeff, a = tracker.draw_nonzero(rng)
        u = tracker.split(coeff, a)
        b = u
        if rng.integers(0, 2):
            b = b ^ a
        if tracker.m:
            bc = rng.integers(0, 2, size=tracker.m, dtype=np.uint8)
            b = b ^ _xor_select(tracker.active(), bc, nw)
            # Restore commutation with b: the complement basis is orthogonal
            # to a and u but not to the component of b inside it.
            tracker.orthogonalize(b, a)
        rows[2 * t] = a
        rows[2 * t + 1] = b
    signs = rng.integers(0, 2, size=2 * n, dtype=np.uint8)
    return CliffordElement(n, BitMatrix(rows, 2 * n), signs, check=False)


# ---------------------------------------------------------------------------
# Text I/O
# ---------------------------------------------------------------------------


def dumps(c: CliffordElement) -> str:
    lines = [f"n={c.n}"]
    lines.extend(str(c.image_pauli(j)) for j in range(2 * c.n))
    return "\n".join(lines) + "\n"


def loads(text: str) -> CliffordElement:
    n: int | None = None
    images: list[PauliOperator] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("n="):
            if images or n is not None:
                raise ParseError("n= header must come first", lineno)
            try:
                n = int(line[2:])
            except ValueError as exc:
                raise ParseError(f"bad header {line!r}", lineno) from exc
            continue
        p = parse_pauli(line, line=lineno)
        if not p.is_hermitian():
            raise ParseError("generator images must carry a plain +/- sign", lineno)
        images.append(p)
    if n is None:
        if not images:
            raise ParseError("no generator images and no n= header")
        n = images[0].n
    if len(images) != 2 * n or any(p.n != n for p in images):
        raise ParseError(f"expected {2 * n} images on {n} qubits, got {len(images)}")
    rows = BitMatrix.from_rows([p.symplectic() for p in images])
    signs = np.array([p.sign_bit for p in images], dtype=np.uint8)
    return CliffordElement(n, rows, signs)


def load(path) -> CliffordElement:
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read())


def save(c: CliffordElement, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(c))
