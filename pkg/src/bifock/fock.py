"""Truncated free-product Hilbert space and its left/right concatenation operators.

The space is spanned by alternating words over a family of face spaces: the
empty word is the shared vacuum, and a word of length n pairs an alternating
sequence of face labels with one reduced-space basis index per position
(index b in 1..dim-1 of the face, index 0 being the distinguished vector).
Enumeration is graded by length, then lexicographic in the face word, then
row-major in the slot indices, which makes every block of fixed face word
contiguous and lets slot tensors flatten straight into coordinates.

Operators act by the two-case concatenation rule (prepend for the left
action on words not starting with the face, act on the first slot otherwise;
mirror image on the last slot for the right action).  Components that would
exceed the truncation length are dropped; ``exact_budget`` counts composed
factors so callers can tell when the vacuum column is still truncation-exact.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from functools import reduce
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from .errors import InvalidInputError
from .linalg import as_matrix

__all__ = [
    "FaceSpace",
    "Word",
    "FockBasis",
    "FockOperator",
    "FockVector",
    "FaceAction",
    "build_basis",
    "alternating_words",
    "count_words",
    "left_subspace",
    "right_subspace",
    "left_op",
    "right_op",
    "compose",
    "vacuum_expectation",
    "face_embedding",
]


@dataclass(frozen=True)
class FaceSpace:
    """One face: a Hilbert space of dimension ``dim`` whose basis vector 0 is distinguished."""

    index: int
    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidInputError("face dimension must be at least 1")

    @property
    def vac_index(self) -> int:
        return 0

    @property
    def reduced_dim(self) -> int:
        return self.dim - 1


class Word(NamedTuple):
    """A basis word: alternating face labels and 1-based reduced-space indices."""

    faces: tuple[int, ...]
    slots: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.faces)


def alternating_words(n_faces: int, length: int) -> Iterator[tuple[int, ...]]:
    """All face words of the given length with consecutive labels distinct, in lex order."""
    if length == 0:
        yield ()
        return
    for head in range(n_faces):
        for rest in _alternating_tail(n_faces, head, length - 1):
            yield (head,) + rest


def _alternating_tail(n_faces: int, prev: int, remaining: int) -> Iterator[tuple[int, ...]]:
    if remaining == 0:
        yield ()
        return
    for nxt in range(n_faces):
        if nxt == prev:
            continue
        for rest in _alternating_tail(n_faces, nxt, remaining - 1):
            yield (nxt,) + rest


def count_words(reduced_dims: Sequence[int], trunc_len: int) -> int:
    """Independent count of the basis size: 1 + sum over alternating words of slot products."""
    total = 1
    for n in range(1, trunc_len + 1):
        for fw in alternating_words(len(reduced_dims), n):
            prod = 1
            for f in fw:
                prod *= reduced_dims[f]
            total += prod
    return total


class FockBasis:
    """Deterministic enumeration of all alternating words up to the truncation length."""

    def __init__(self, faces: Sequence[FaceSpace], trunc_len: int, max_size: int | None = 2_000_000):
        if not faces:
            raise InvalidInputError("at least one face is required")
        if trunc_len < 0:
            raise InvalidInputError("truncation length must be non-negative")
        self.faces = tuple(faces)
        self.trunc_len = int(trunc_len)
        dims = [f.reduced_dim for f in self.faces]
        size = count_words(dims, self.trunc_len)
        if max_size is not None and size > max_size:
            raise InvalidInputError(
                f"basis would have {size} elements, above the cap {max_size}"
            )

        elements: list[Word] = [Word((), ())]
        block_start: dict[tuple[int, ...], int] = {(): 0}
        for n in range(1, self.trunc_len + 1):
            for fw in alternating_words(len(self.faces), n):
                ranges = [range(1, self.faces[f].dim) for f in fw]
                if any(len(r) == 0 for r in ranges):
                    continue
                block_start[fw] = len(elements)
                for slots in itertools.product(*ranges):
                    elements.append(Word(fw, slots))
        self.elements: tuple[Word, ...] = tuple(elements)
        self.block_start = block_start
        self.index_of: dict[Word, int] = {w: k for k, w in enumerate(elements)}

    @property
    def size(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return self.size

    def face(self, label: int) -> FaceSpace:
        if not 0 <= label < len(self.faces):
            raise InvalidInputError(f"face label {label} out of range")
        return self.faces[label]

    def vacuum_vector(self) -> np.ndarray:
        v = np.zeros(self.size, dtype=complex)
        v[0] = 1.0
        return v

    def lengths(self) -> np.ndarray:
        return np.array([w.length for w in self.elements])


def build_basis(faces: Sequence[FaceSpace], trunc_len: int) -> FockBasis:
    return FockBasis(faces, trunc_len)


def left_subspace(basis: FockBasis, face: int) -> np.ndarray:
    """Indices of words usable as right tensor factors for the face's left action:
    the vacuum and every word whose first label differs from ``face``."""
    basis.face(face)
    return np.array(
        [k for k, w in enumerate(basis.elements) if w.length == 0 or w.faces[0] != face]
    )


def right_subspace(basis: FockBasis, face: int) -> np.ndarray:
    """Mirror image of :func:`left_subspace`: last label differs from ``face``."""
    basis.face(face)
    return np.array(
        [k for k, w in enumerate(basis.elements) if w.length == 0 or w.faces[-1] != face]
    )


@dataclass(frozen=True)
class FockOperator:
    """A dense matrix on a Fock basis, tagged with its composed-factor count."""

    basis: FockBasis
    matrix: np.ndarray
    exact_budget: int

    def __post_init__(self):
        if self.matrix.shape != (self.basis.size, self.basis.size):
            raise InvalidInputError("operator matrix does not match the basis size")

    @property
    def vacuum_exact(self) -> bool:
        return self.exact_budget <= self.basis.trunc_len

    def __matmul__(self, other: "FockOperator") -> "FockOperator":
        return compose([self, other])


@dataclass(frozen=True)
class FaceAction:
    """The four blocks of a face operator split around the distinguished vector."""

    t00: complex
    row0: np.ndarray  # <T e_b, xi>, b = 1..dim-1
    col0: np.ndarray  # reduced component of T xi
    block: np.ndarray  # reduced-to-reduced block

    @classmethod
    def from_matrix(cls, t: np.ndarray) -> "FaceAction":
        t = as_matrix(t)
        return cls(complex(t[0, 0]), t[0, 1:].copy(), t[1:, 0].copy(), t[1:, 1:].copy())

    @property
    def dim(self) -> int:
        return self.col0.shape[0] + 1


def _check_face_matrix(basis: FockBasis, face: int, t: np.ndarray) -> np.ndarray:
    t = as_matrix(t)
    d = basis.face(face).dim
    if t.shape != (d, d):
        raise InvalidInputError(f"operator for face {face} must be {d}x{d}, got {t.shape}")
    return t


def left_op(basis: FockBasis, face: int, t) -> FockOperator:
    """Left action of a face operator: acts on the first slot, or prepends."""
    t = _check_face_matrix(basis, face, t)
    d = basis.face(face).dim
    n = basis.size
    m = np.zeros((n, n), dtype=complex)
    idx = basis.index_of
    for col, w in enumerate(basis.elements):
        if w.length and w.faces[0] == face:
            b = w.slots[0]
            tail = Word(w.faces[1:], w.slots[1:])
            m[idx[tail], col] += t[0, b]
            for c in range(1, d):
                m[idx[Word(w.faces, (c,) + w.slots[1:])], col] += t[c, b]
        else:
            m[col, col] += t[0, 0]
            if w.length < basis.trunc_len:
                for c in range(1, d):
                    m[idx[Word((face,) + w.faces, (c,) + w.slots)], col] += t[c, 0]
    return FockOperator(basis, m, 1)


def right_op(basis: FockBasis, face: int, t) -> FockOperator:
    """Right action of a face operator: acts on the last slot, or appends."""
    t = _check_face_matrix(basis, face, t)
    d = basis.face(face).dim
    n = basis.size
    m = np.zeros((n, n), dtype=complex)
    idx = basis.index_of
    for col, w in enumerate(basis.elements):
        if w.length and w.faces[-1] == face:
            b = w.slots[-1]
            head = Word(w.faces[:-1], w.slots[:-1])
            m[idx[head], col] += t[0, b]
            for c in range(1, d):
                m[idx[Word(w.faces, w.slots[:-1] + (c,))], col] += t[c, b]
        else:
            m[col, col] += t[0, 0]
            if w.length < basis.trunc_len:
                for c in range(1, d):
                    m[idx[Word(w.faces + (face,), w.slots + (c,))], col] += t[c, 0]
    return FockOperator(basis, m, 1)


def compose(ops: Sequence[FockOperator]) -> FockOperator:
    """Matrix product in the given order, with the factor budgets added."""
    ops = list(ops)
    if not ops:
        raise InvalidInputError("compose requires at least one operator")
    basis = ops[0].basis
    for op in ops[1:]:
        if op.basis is not basis:
            raise InvalidInputError("operators live on different bases")
    matrix = reduce(np.matmul, (op.matrix for op in ops))
    return FockOperator(basis, matrix, sum(op.exact_budget for op in ops))


def vacuum_expectation(op: FockOperator) -> complex:
    """The (vacuum, vacuum) matrix entry."""
    if not op.vacuum_exact:
        warnings.warn(
            f"vacuum expectation of a budget-{op.exact_budget} product at truncation "
            f"{op.basis.trunc_len} is no longer guaranteed exact",
            stacklevel=2,
        )
    return complex(op.matrix[0, 0])


def face_embedding(basis: FockBasis, face: int) -> np.ndarray:
    """Isometry of one face space into the Fock space (vacuum and length-1 words)."""
    d = basis.face(face).dim
    m = np.zeros((basis.size, d), dtype=complex)
    m[0, 0] = 1.0
    for b in range(1, d):
        m[basis.index_of[Word((face,), (b,))], b] = 1.0
    return m


class FockVector:
    """A Fock-space vector as a sum of elementary word tensors.

    Each term is ``(coeff, face_word, slot_vectors)`` with one reduced-space
    coefficient vector per position.  Applying a face operator at most
    doubles the number of terms, so products of k face operators applied to
    the vacuum stay at 2**k terms regardless of the space dimension; this is
    what makes moment evaluation exact and cheap on large faces.
    """

    __slots__ = ("terms", "trunc_len")

    def __init__(self, terms, trunc_len: int):
        self.terms = list(terms)
        self.trunc_len = int(trunc_len)

    @classmethod
    def vacuum(cls, trunc_len: int) -> "FockVector":
        return cls([(1.0 + 0.0j, (), ())], trunc_len)

    def apply_left(self, face: int, act: FaceAction) -> "FockVector":
        out = []
        reduced = act.col0.shape[0]
        for coeff, fw, slots in self.terms:
            if fw and fw[0] == face:
                h = slots[0]
                c_tail = coeff * complex(act.row0 @ h)
                if c_tail != 0:
                    out.append((c_tail, fw[1:], slots[1:]))
                out.append((coeff, fw, (act.block @ h,) + slots[1:]))
            else:
                c_stay = coeff * act.t00
                if c_stay != 0:
                    out.append((c_stay, fw, slots))
                if reduced and len(fw) < self.trunc_len:
                    out.append((coeff, (face,) + fw, (act.col0,) + slots))
        return FockVector(out, self.trunc_len)

    def apply_right(self, face: int, act: FaceAction) -> "FockVector":
        out = []
        reduced = act.col0.shape[0]
        for coeff, fw, slots in self.terms:
            if fw and fw[-1] == face:
                h = slots[-1]
                c_head = coeff * complex(act.row0 @ h)
                if c_head != 0:
                    out.append((c_head, fw[:-1], slots[:-1]))
                out.append((coeff, fw, slots[:-1] + (act.block @ h,)))
            else:
                c_stay = coeff * act.t00
                if c_stay != 0:
                    out.append((c_stay, fw, slots))
                if reduced and len(fw) < self.trunc_len:
                    out.append((coeff, fw + (face,), slots + (act.col0,)))
        return FockVector(out, self.trunc_len)

    def vacuum_amplitude(self) -> complex:
        return complex(sum(coeff for coeff, fw, _ in self.terms if not fw))

    def inner(self, other: "FockVector") -> complex:
        """<self, other>, conjugate-linear in ``other``."""
        by_word: dict[tuple[int, ...], list] = {}
        for coeff, fw, slots in other.terms:
            by_word.setdefault(fw, []).append((coeff, slots))
        total = 0.0 + 0.0j
        for coeff, fw, slots in self.terms:
            for c2, slots2 in by_word.get(fw, ()):
                prod = coeff * np.conj(c2)
                for v, w in zip(slots, slots2):
                    prod *= complex(np.vdot(w, v))
                    if prod == 0:
                        break
                total += prod
        return complex(total)

    def norm(self) -> float:
        return float(np.sqrt(max(self.inner(self).real, 0.0)))

    def coordinates(self, basis: FockBasis) -> np.ndarray:
        """Dense coordinates on an explicitly enumerated basis."""
        out = np.zeros(basis.size, dtype=complex)
        for coeff, fw, slots in self.terms:
            if not fw:
                out[0] += coeff
                continue
            if fw not in basis.block_start:
                raise InvalidInputError(f"word {fw} does not exist in the target basis")
            flat = reduce(np.multiply.outer, slots, np.asarray(coeff)).ravel()
            start = basis.block_start[fw]
            out[start : start + flat.size] += flat
        return out
