"""Stabilizer groups: validation, subgroup structure, sampling, purification.

A group is held as a packed d x 2n symplectic matrix (interleaved layout)
plus a phase exponent per generator.  ``d = n - k`` generators describe the
maximally mixed state of rank ``2^k`` on the stabilized subspace; ``d = n``
is a pure state and ``d = 0`` (legal everywhere) is the maximally mixed
state.

Text format: one Pauli per line with a sign prefix, optionally preceded by
an ``n=<int>`` header (mandatory for empty groups).  ``#`` starts a comment.
Partition strings assign inclusive qubit ranges to party labels, e.g.
``0-4:A,5-9:B``.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from . import _kernels, gf2
from .errors import ConfigError, ParseError, SizeMismatchError, ValidityError
from .gf2 import BitMatrix
from .pauli import (
    PauliOperator,
    omega_matrix,
    omega_rows,
    parse_pauli,
    party_columns,
    swap_xz_words,
)


def _ycount_mod4(words: np.ndarray) -> np.ndarray:
    """Per-row Y count mod 4: the phase exponent of the +-signed operator."""
    w = np.asarray(words, dtype=np.uint64)
    if w.ndim == 1:
        w = w[None, :]
    ys = w & (w >> np.uint64(1)) & np.uint64(0x5555555555555555)
    return (np.bitwise_count(ys).sum(axis=1) & 3).astype(np.uint8)


class StabilizerGroup:
    """An abelian, -I-free subgroup of the n-qubit Pauli group."""

    __slots__ = ("n", "sym", "phases")

    def __init__(self, n: int, sym: BitMatrix, phases: np.ndarray, check: bool = True):
        if sym.ncols != 2 * n:
            raise SizeMismatchError("symplectic matrix must have 2n columns")
        phases = np.asarray(phases, dtype=np.uint8) & 3
        if phases.shape != (sym.nrows,):
            raise SizeMismatchError("one phase per generator required")
        phases = phases.copy()
        phases.flags.writeable = False
        self.n = n
        self.sym = sym
        self.phases = phases
        if check:
            reason = diagnose(self)
            if reason is not None:
                raise ValidityError(f"invalid stabilizer group: {reason}")

    @classmethod
    def from_generators(
        cls, generators: Sequence[PauliOperator], n: int | None = None, check: bool = True
    ) -> "StabilizerGroup":
        if not generators:
            if n is None:
                raise ValueError("empty generator list needs an explicit qubit count")
            return cls(n, BitMatrix.zeros(0, 2 * n), np.zeros(0, dtype=np.uint8), check=check)
        if n is None:
            n = generators[0].n
        if any(g.n != n for g in generators):
            raise SizeMismatchError("generators act on different qubit counts")
        sym = BitMatrix.from_rows([g.symplectic() for g in generators])
        phases = np.array([g.phase_exponent for g in generators], dtype=np.uint8)
        return cls(n, sym, phases, check=check)

    @classmethod
    def from_strings(cls, texts: Sequence[str], n: int | None = None) -> "StabilizerGroup":
        return cls.from_generators([parse_pauli(t) for t in texts], n=n)

    @property
    def dim(self) -> int:
        """log2 of the group order (= generator count for a valid group)."""
        return self.sym.nrows

    @property
    def k(self) -> int:
        """log2 of the rank of the stabilized state (n - dim)."""
        return self.n - self.dim

    @property
    def generators(self) -> list[PauliOperator]:
        gens = []
        for i in range(self.dim):
            row = self.sym.row(i)
            g = PauliOperator.from_symplectic(row, 0)
            gens.append(PauliOperator(self.n, g.x, g.z, int(self.phases[i])))
        return gens

    def generator(self, i: int) -> PauliOperator:
        row = self.sym.row(i)
        g = PauliOperator.from_symplectic(row, 0)
        return PauliOperator(self.n, g.x, g.z, int(self.phases[i]))

    def key(self) -> tuple:
        """Hashable identity of the generated signed group (canonical form)."""
        c = canonical_form(self)
        return (c.n, c.sym.words.tobytes(), c.phases.tobytes())

    def __eq__(self, other: object) -> bool:
        """Equality of generated groups, not of generator presentations."""
        return (
            isinstance(other, StabilizerGroup)
            and self.n == other.n
            and self.key() == other.key()
        )

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"StabilizerGroup(n={self.n}, dim={self.dim})"


class Partition:
    """Assignment of each qubit to one of m nonempty parties."""

    __slots__ = ("n", "labels", "parties")

    def __init__(self, n: int, labels: Sequence[str]):
        if len(labels) != n:
            raise ConfigError("one party label per qubit required")
        parties: dict[str, list[int]] = {}
        for q, lab in enumerate(labels):
            parties.setdefault(str(lab), []).append(q)
        self.n = n
        self.labels = tuple(str(lab) for lab in labels)
        self.parties = {lab: tuple(qs) for lab, qs in parties.items()}

    @property
    def m(self) -> int:
        return len(self.parties)

    def party(self, label: str) -> tuple[int, ...]:
        return self.parties[label]

    def party_sizes(self) -> dict[str, int]:
        return {lab: len(qs) for lab, qs in self.parties.items()}

    @classmethod
    def from_sizes(cls, sizes: Sequence[tuple[str, int]]) -> "Partition":
        """Contiguous blocks in the given order, e.g. [("A", 2), ("B", 3)]."""
        labels: list[str] = []
        for lab, size in sizes:
            if size <= 0:
                raise ConfigError(f"party {lab!r} must be nonempty")
            labels.extend([lab] * size)
        return cls(len(labels), labels)

    @classmethod
    def parse(cls, text: str, n: int | None = None) -> "Partition":
        """Parse ``0-4:A,5-9:B`` (inclusive ranges; overlaps are errors)."""
        assigned: dict[int, str] = {}
        for item in text.split(","):
            item = item.strip()
            if not item:
                continue
            if ":" not in item:
                raise ParseError(f"partition item {item!r} lacks a ':<label>'")
            rng, label = item.rsplit(":", 1)
            label = label.strip()
            rng = rng.strip()
            if not label:
                raise ParseError(f"partition item {item!r} has an empty label")
            try:
                if "-" in rng:
                    lo_s, hi_s = rng.split("-", 1)
                    lo, hi = int(lo_s), int(hi_s)
                else:
                    lo = hi = int(rng)
            except ValueError as exc:
                raise ParseError(f"bad qubit range {rng!r}") from exc
            if lo > hi or lo < 0:
                raise ParseError(f"bad qubit range {rng!r}")
            for q in range(lo, hi + 1):
                if q in assigned:
                    raise ParseError(f"qubit {q} assigned to both {assigned[q]!r} and {label!r}")
                assigned[q] = label
        if not assigned:
            raise ParseError("empty partition string")
        total = max(assigned) + 1
        if n is not None and total != n:
            missing = sorted(set(range(n)) - set(assigned))
            raise ParseError(
                f"partition covers {total} qubits but the group has {n}"
                + (f"; unassigned: {missing}" if missing else "")
            )
        if set(assigned) != set(range(total)):
            missing = sorted(set(range(total)) - set(assigned))
            raise ParseError(f"partition leaves qubits unassigned: {missing}")
        return cls(total, [assigned[q] for q in range(total)])

    def __repr__(self) -> str:
        items = ",".join(f"{lab}:{len(qs)}" for lab, qs in self.parties.items())
        return f"Partition({items})"


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def diagnose(S: StabilizerGroup) -> str | None:
    """None when valid; otherwise a short reason code.

    Checks each generator squares to +I ("bad-phase"), pairwise commutation
    ("anticommuting"), and independence over GF(2) ("dependent").
    Independence plus valid per-generator phases already rule out -I in the
    generated group.
    """
    d = S.dim
    if d == 0:
        return None
    herm = _ycount_mod4(S.sym.words) & 1
    if np.any((S.phases & 1) != herm):
        return "bad-phase"
    om = omega_matrix(S.sym.words, S.sym.words)
    if om.any():
        return "anticommuting"
    if gf2.rank(S.sym) != d:
        return "dependent"
    return None


def validate(S: StabilizerGroup) -> bool:
    """True iff generators pairwise commute, are independent, and avoid -I."""
    return diagnose(S) is None


# ---------------------------------------------------------------------------
# Subgroup structure
# ---------------------------------------------------------------------------


def subgroup_trivial_on(S: StabilizerGroup, party: Iterable[int]) -> BitMatrix:
    """Basis (rows, full 2n symplectic coords) of the subgroup of S that is
    identity on every qubit in ``party``.

    Solved on generator exponents: coefficient vectors in the left kernel of
    the generator matrix restricted to the party's columns.
    """
    qubits = sorted(set(int(q) for q in party))
    for q in qubits:
        if not 0 <= q < S.n:
            raise IndexError(f"qubit {q} out of range for n={S.n}")
    d = S.dim
    if d == 0:
        return BitMatrix.zeros(0, 2 * S.n)
    if not qubits:
        return self_basis(S)
    R = S.sym.take_columns(party_columns(qubits))
    coeffs = gf2.kernel_basis(R.transpose())
    if coeffs.nrows == 0:
        return BitMatrix.zeros(0, 2 * S.n)
    return gf2.matmul(coeffs, S.sym)


def self_basis(S: StabilizerGroup) -> BitMatrix:
    """The generator rows themselves (basis of the full group)."""
    return S.sym


def subgroup_trivial_on_dim(S: StabilizerGroup, party: Iterable[int]) -> int:
    """dim of :func:`subgroup_trivial_on` without materializing the basis."""
    qubits = sorted(set(int(q) for q in party))
    for q in qubits:
        if not 0 <= q < S.n:
            raise IndexError(f"qubit {q} out of range for n={S.n}")
    if S.dim == 0:
        return 0
    if not qubits:
        return S.dim
    R = S.sym.take_columns(party_columns(qubits))
    return S.dim - gf2.rank(R)


def local_subgroup_dim(S: StabilizerGroup, partition: Partition) -> int:
    """dim of the span of all parties' trivially-acting subgroups."""
    if partition.n != S.n:
        raise SizeMismatchError("partition and group qubit counts differ")
    bases = [subgroup_trivial_on(S, qs) for qs in partition.parties.values()]
    return gf2.subspace_sum_dim(bases)


# ---------------------------------------------------------------------------
# Canonical form
# ---------------------------------------------------------------------------

def _canonical_col_order(n: int) -> list[int]:
    # x-block columns first (qubit-major), then the z-block.
    return [2 * q for q in range(n)] + [2 * q + 1 for q in range(n)]


def canonical_form(S: StabilizerGroup) -> StabilizerGroup:
    """Unique generating set: RREF over the x columns first, then z.

    The generated signed group is unchanged; phases of the new generators
    are recomputed by multiplying out the contributing original generators.
    """
    d = S.dim
    if d == 0:
        return S
    red, _, tracker = gf2.row_reduce_tracked(S.sym, _canonical_col_order(S.n))
    combos = tracker.to_dense()
    gens = S.generators
    phases = np.zeros(d, dtype=np.uint8)
    for i in range(d):
        acc = PauliOperator.identity(S.n)
        for j in np.nonzero(combos[i])[0]:
            acc = acc * gens[int(j)]
        phases[i] = acc.phase_exponent
    return StabilizerGroup(S.n, red, phases, check=False)


# ---------------------------------------------------------------------------
# Uniform sampling
# ---------------------------------------------------------------------------


def _xor_select(rows: np.ndarray, coeff: np.ndarray, nwords: int) -> np.ndarray:
    """XOR of the rows selected by 0/1 coefficient bits."""
    out = np.zeros(nwords, dtype=np.uint64)
    _kernels.xor_select(rows, coeff.shape[0], coeff, out)
    return out


class _ComplementTracker:
    """In-place basis of the symplectic complement of the pairs split so far.

    Starts as the full standard basis of F_2^{2n}; each :meth:`split`
    removes a hyperbolic pair (w, u) and Gram-Schmidt-corrects the rest, so
    the active rows always form a basis of a symplectic subspace on which
    ω is non-degenerate.  Removal swaps rows into the freed slots; no
    reallocation happens after construction.
    """

    __slots__ = ("rows", "m", "nwords")

    def __init__(self, n: int):
        self.nwords = gf2._nwords(2 * n)
        self.rows = gf2.BitMatrix.identity(2 * n).words.copy()
        self.m = 2 * n

    def active(self) -> np.ndarray:
        return self.rows[: self.m]

    def draw_nonzero(self, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
        """Uniform nonzero element of the spanned subspace: (coeffs, vector)."""
        while True:
            coeff = rng.integers(0, 2, size=self.m, dtype=np.uint8)
            if coeff.any():
                out = np.empty(self.nwords, dtype=np.uint64)
                _kernels.xor_select(self.rows, self.m, coeff, out)
                return coeff, out

    def split(self, coeff: np.ndarray, w: np.ndarray) -> np.ndarray:
        """Remove the hyperbolic pair (w, u) from the tracked space.

        ``w`` must be the nonzero combination described by ``coeff``.
        Returns ``u``, an (old) basis row with ω(w, u) = 1.  The remaining
        active rows are corrected to span the symplectic complement of
        <w, u> within the old space.
        """
        u = np.empty(self.nwords, dtype=np.uint64)
        self.m = int(_kernels.split_step(self.rows, self.m, coeff, w, u))
        return u

    def orthogonalize(self, v: np.ndarray, partner: np.ndarray) -> None:
        """Correct active rows to commute with v: row ^= ω(row, v) * partner.

        Requires ω(v, partner) = 1 and all active rows to already commute
        with ``partner``."""
        _kernels.orthogonalize(self.rows, self.m, v, partner)


def sample_uniform(n: int, k: int, rng: np.random.Generator) -> StabilizerGroup:
    """Exactly uniform stabilizer group of dimension n - k with uniform signs.

    Generators are drawn one at a time, each uniform over the Paulis that
    commute with and are independent of those already chosen.  Every
    partial group admits the same number of extensions, so the induced
    distribution over groups is exactly uniform.  The draw itself is a
    uniform solution of the commutation constraints: a random combination of
    the previous generators plus a nonzero element of the maintained
    symplectic complement.
    """
    if not 0 <= k <= n:
        raise ConfigError(f"need 0 <= k <= n, got k={k}, n={n}")
    d = n - k
    nw = gf2._nwords(2 * n)
    tracker = _ComplementTracker(n)
    G = np.zeros((d, nw), dtype=np.uint64)
    for t in range(d):
        coeff, w = tracker.draw_nonzero(rng)
        if t:
            hmask = rng.integers(0, 2, size=t, dtype=np.uint8)
            G[t] = w ^ _xor_select(G[:t], hmask, nw)
        else:
            G[t] = w
        tracker.split(coeff, w)
    signs = rng.integers(0, 2, size=d, dtype=np.uint8) if d else np.zeros(0, dtype=np.uint8)
    sym = BitMatrix(G, 2 * n)
    phases = (_ycount_mod4(G) + 2 * signs).astype(np.uint8) & 3 if d else np.zeros(0, np.uint8)
    return StabilizerGroup(n, sym, phases, check=False)


# ---------------------------------------------------------------------------
# Purification
# ---------------------------------------------------------------------------


def purify(S: StabilizerGroup) -> tuple[StabilizerGroup, int]:
    """Extend S to a pure group on n + k qubits whose reduction is the
    stabilized mixed state.

    The k unconstrained symplectic pairs (logical X/Z partners of the code)
    are each tied to one appended ancilla qubit: the Z-type partner picks up
    a Z on its ancilla and the X-type partner an X.  Elements of the result
    acting trivially on the ancillas are exactly the original group, so the
    reduced state on the first n qubits is the rank-2^k mixed state of S.
    """
    reason = diagnose(S)
    if reason is not None:
        raise ValidityError(f"cannot purify an invalid group: {reason}")
    k = S.k
    if k == 0:
        return S, 0
    S = canonical_form(S)
    n, d = S.n, S.dim
    nw_old = gf2._nwords(2 * n)
    # Centralizer of the group inside the symplectic space.
    if d:
        constraints = BitMatrix(swap_xz_words(S.sym.words), 2 * n)
        cent = gf2.kernel_basis(constraints)
    else:
        cent = gf2.BitMatrix.identity(2 * n)
    # Coset representatives: centralizer vectors independent of the group rows.
    acc = S.sym.words.copy() if d else np.zeros((0, nw_old), dtype=np.uint64)
    reps: list[np.ndarray] = []
    base_rank = d
    for i in range(cent.nrows):
        cand = np.concatenate([acc, cent.words[i][None, :]])
        r = gf2._rank_words(cand.copy(), 2 * n)
        if r > base_rank:
            acc = cand
            base_rank = r
            reps.append(cent.words[i].copy())
        if len(reps) == 2 * k:
            break
    assert len(reps) == 2 * k
    # Symplectic Gram-Schmidt pairs the representatives.
    pairs: list[tuple[np.ndarray, np.ndarray]] = []
    pool = np.stack(reps)
    while pool.shape[0]:
        v = pool[0]
        rest = pool[1:]
        om = omega_rows(v, rest)
        j = int(np.nonzero(om)[0][0])
        u = rest[j].copy()
        others = np.delete(rest, j, axis=0)
        if others.shape[0]:
            om_u = omega_rows(u, others)
            om_v = omega_rows(v, others)
            others = others ^ om_u[:, None] * v[None, :] ^ om_v[:, None] * u[None, :]
        pairs.append((v.copy(), u))
        pool = others
    # Assemble the purified group on n + k qubits.
    n2 = n + k
    dense_old = gf2.unpack_rows(S.sym.words, 2 * n) if d else np.zeros((0, 2 * n), np.uint8)
    rows = np.zeros((n2, 2 * n2), dtype=np.uint8)
    rows[:d, : 2 * n] = dense_old
    phases = np.zeros(n2, dtype=np.uint8)
    phases[:d] = S.phases
    for j, (zbar, xbar) in enumerate(pairs):
        zrow = d + 2 * j
        xrow = d + 2 * j + 1
        rows[zrow, : 2 * n] = gf2.unpack_rows(zbar[None, :], 2 * n)[0]
        rows[zrow, 2 * (n + j) + 1] = 1
        rows[xrow, : 2 * n] = gf2.unpack_rows(xbar[None, :], 2 * n)[0]
        rows[xrow, 2 * (n + j)] = 1
    sym = BitMatrix.from_dense(rows)
    # New generators get the + sign; originals keep their phases.
    phases = _ycount_mod4(sym.words).astype(np.uint8)
    phases[:d] = S.phases
    out = StabilizerGroup(n2, sym, phases, check=False)
    return out, k


# ---------------------------------------------------------------------------
# Text I/O
# ---------------------------------------------------------------------------


def dumps(S: StabilizerGroup) -> str:
    lines = [f"n={S.n}"]
    lines.extend(str(g) for g in S.generators)
    return "\n".join(lines) + "\n"


def loads(text: str, check: bool = True) -> StabilizerGroup:
    n: int | None = None
    gens: list[PauliOperator] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("n="):
            if gens or n is not None:
                raise ParseError("n= header must come first", lineno)
            try:
                n = int(line[2:])
            except ValueError as exc:
                raise ParseError(f"bad header {line!r}", lineno) from exc
            if n <= 0:
                raise ParseError("qubit count must be positive", lineno)
            continue
        p = parse_pauli(line, line=lineno)
        if not p.is_hermitian():
            raise ParseError("generators must carry a plain +/- sign", lineno)
        if n is not None and p.n != n:
            raise ParseError(f"expected {n} qubits, got {p.n}", lineno)
        if n is None and gens and p.n != gens[0].n:
            raise ParseError(f"expected {gens[0].n} qubits, got {p.n}", lineno)
        gens.append(p)
    if n is None:
        if not gens:
            raise ParseError("no generators and no n= header")
        n = gens[0].n
    return StabilizerGroup.from_generators(gens, n=n, check=check)


def load(path) -> StabilizerGroup:
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read())


def save(S: StabilizerGroup, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(S))
