"""Reduced bi-free products of pairs of faces, wired through the Fock layer.

A face pair is two unital *-algebras on a common matrix space together with
a state; its GNS space becomes one face of the free-product Hilbert space,
left faces act by left concatenation, right faces by right concatenation,
and the vacuum state of the resulting model is the bi-free product state.

When a pair's state factors as a product over commuting faces, the GNS space
is built as the Kronecker pairing of the two one-sided GNS spaces instead of
by factoring the joint construction; this keeps the boundary-pattern
machinery (the set of splice vectors, the simple-tensor decomposition and
the splice isometries) in explicit coordinates.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import GnsTriple, MatrixStarAlgebra, StateOnMatrices, close_algebra, gns
from .errors import InvalidInputError, PartialMapError, UnsupportedStructureError
from .fock import (
    FaceAction,
    FaceSpace,
    FockBasis,
    FockOperator,
    FockVector,
    Word,
    alternating_words,
    left_op,
    right_op,
)
from .linalg import DEFAULT_TOL, Tolerance, as_matrix, dagger, frobenius_norm, numeric_rank

__all__ = [
    "FacePair",
    "FaceFamily",
    "BiFreeProduct",
    "BoundaryVector",
    "TensorSplit",
    "BiindependenceReport",
    "face_pair",
    "reduced_bifree",
    "bifree_state",
    "biindependence_defect",
    "boundary_patterns",
    "split_simple_tensor",
    "recombine_split",
    "splice_isometry",
    "OneSidedFreeProduct",
]

Letter = tuple[str, int, np.ndarray]  # (side "l"/"r", face index, ambient matrix)


def _product_gns(
    ambient: MatrixStarAlgebra,
    state: StateOnMatrices,
    left_gns: GnsTriple,
    right_gns: GnsTriple,
    tol: Tolerance,
) -> GnsTriple:
    """Joint GNS triple realized on the Kronecker pairing of the one-sided spaces."""
    alg_l = left_gns.algebra
    alg_r = right_gns.algebra
    d = ambient.ambient_dim
    prods = [a @ b for a in alg_l.closure_basis for b in alg_r.closure_basis]
    span = np.array([p.reshape(-1) for p in prods]).T  # d^2 x (kL*kR)
    solver = np.linalg.pinv(span)
    kl, kr = alg_l.dim, alg_r.dim

    def represent(m: np.ndarray) -> np.ndarray:
        vec = as_matrix(m).reshape(-1)
        coeff = solver @ vec
        resid = np.linalg.norm(span @ coeff - vec)
        if resid > 1e3 * tol.eq_tol * max(1.0, np.linalg.norm(vec)):
            raise UnsupportedStructureError(
                "element does not lie in the span of left-right products"
            )
        out = np.zeros(
            (left_gns.gns_dim * right_gns.gns_dim,) * 2, dtype=complex
        )
        for a in range(kl):
            for b in range(kr):
                c = coeff[a * kr + b]
                if c != 0:
                    out += c * np.kron(left_gns.rep_basis[a], right_gns.rep_basis[b])
        return out

    rep_basis = tuple(represent(b) for b in ambient.closure_basis)
    dim = left_gns.gns_dim * right_gns.gns_dim
    cyclic = np.zeros(dim, dtype=complex)
    cyclic[0] = 1.0
    to_coords = np.array([r @ cyclic for r in rep_basis]).T
    for b, r in zip(ambient.closure_basis, rep_basis):
        got = np.vdot(cyclic, r @ cyclic)
        if abs(got - state(b)) > 1e3 * tol.eq_tol:
            raise UnsupportedStructureError(
                "product pairing does not reproduce the state; state is not a product state"
            )
    return GnsTriple(
        algebra=ambient,
        state=state,
        gns_dim=dim,
        rep_basis=rep_basis,
        cyclic=cyclic,
        _to_coords=to_coords,
        _from_coords=np.linalg.pinv(to_coords),
    )


@dataclass
class FacePair:
    """One pair of faces: left and right algebras inside a common matrix space."""

    index: int
    left: MatrixStarAlgebra
    right: MatrixStarAlgebra
    ambient: MatrixStarAlgebra
    state: StateOnMatrices
    gns: GnsTriple
    left_gns: GnsTriple | None = None
    right_gns: GnsTriple | None = None
    tol: Tolerance = DEFAULT_TOL
    _rep_cache: dict = field(default_factory=dict, repr=False)

    @property
    def ambient_dim(self) -> int:
        return self.ambient.ambient_dim

    @property
    def has_product_form(self) -> bool:
        return self.left_gns is not None and self.right_gns is not None

    @property
    def split(self) -> tuple[int, int]:
        if not self.has_product_form:
            raise UnsupportedStructureError(
                f"face pair {self.index} has no product-state factorization"
            )
        return self.left_gns.gns_dim, self.right_gns.gns_dim

    def algebra_of(self, side: str) -> MatrixStarAlgebra:
        if side == "l":
            return self.left
        if side == "r":
            return self.right
        raise InvalidInputError(f"side must be 'l' or 'r', got {side!r}")

    def face_operator(self, side: str, m: np.ndarray) -> np.ndarray:
        """GNS matrix of a face element, cached and membership-checked."""
        m = as_matrix(m)
        key = (side, m.tobytes())
        hit = self._rep_cache.get(key)
        if hit is not None:
            return hit
        if not self.algebra_of(side).contains(m, self.tol):
            raise InvalidInputError(
                f"element is not in the {'left' if side == 'l' else 'right'} "
                f"face algebra of pair {self.index}"
            )
        rep = self.gns.represent(m)
        self._rep_cache[key] = rep
        return rep

    def action(self, side: str, m: np.ndarray) -> FaceAction:
        m = as_matrix(m)
        key = ("act", side, m.tobytes())
        hit = self._rep_cache.get(key)
        if hit is None:
            hit = FaceAction.from_matrix(self.face_operator(side, m))
            self._rep_cache[key] = hit
        return hit


def face_pair(
    left_generators,
    right_generators,
    density,
    index: int = 0,
    tol: Tolerance = DEFAULT_TOL,
    product: str = "auto",
) -> FacePair:
    """Build a face pair from generator matrices and a density matrix.

    ``product`` controls the Kronecker-paired GNS construction: "auto" uses
    it when the faces commute, the state multiplies across them and their
    products are linearly independent; "require" fails loudly when those
    checks fail; "never" always uses the joint GNS.
    """
    state = StateOnMatrices(density, tol=tol)
    d = state.dim
    left = close_algebra(d, left_generators, tol)
    right = close_algebra(d, right_generators, tol)
    ambient = close_algebra(d, list(left.generators) + list(right.generators), tol)

    left_gns = right_gns = None
    joint = None
    if product in ("auto", "require"):
        problem = _product_obstruction(left, right, state, tol)
        if problem is None:
            lg = gns(left, state, tol)
            rg = gns(right, state, tol)
            try:
                joint = _product_gns(ambient, state, lg, rg, tol)
                left_gns, right_gns = lg, rg
            except UnsupportedStructureError as exc:
                problem = str(exc)
        if problem is not None and product == "require":
            raise UnsupportedStructureError(
                f"face pair {index} admits no product form: {problem}"
            )
    elif product != "never":
        raise InvalidInputError(f"unknown product mode {product!r}")
    if joint is None:
        joint = gns(ambient, state, tol)
    return FacePair(
        index=index,
        left=left,
        right=right,
        ambient=ambient,
        state=state,
        gns=joint,
        left_gns=left_gns,
        right_gns=right_gns,
        tol=tol,
    )


def _product_obstruction(
    left: MatrixStarAlgebra,
    right: MatrixStarAlgebra,
    state: StateOnMatrices,
    tol: Tolerance,
) -> str | None:
    """None when the pair supports the product construction, else a reason."""
    for a in left.closure_basis:
        for b in right.closure_basis:
            if frobenius_norm(a @ b - b @ a) > 100 * tol.eq_tol:
                return "faces do not commute"
    for a in left.closure_basis:
        fa = state(a)
        for b in right.closure_basis:
            if abs(state(a @ b) - fa * state(b)) > 100 * tol.eq_tol:
                return "state does not multiply across the faces"
    prods = np.array(
        [(a @ b).reshape(-1) for a in left.closure_basis for b in right.closure_basis]
    )
    if numeric_rank(prods, tol) != left.dim * right.dim:
        return "left-right products are linearly dependent"
    return None


@dataclass(frozen=True)
class FaceFamily:
    """An indexed family of face pairs."""

    pairs: tuple[FacePair, ...]

    @property
    def nontrivial(self) -> bool:
        return len(self.pairs) >= 2 and all(p.ambient.dim > 1 for p in self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)


class BiFreeProduct:
    """The reduced bi-free product of a family, truncated at a word length.

    Moments are evaluated on elementary-tensor vectors, which is exact for
    words of length up to the truncation; dense operator matrices are
    materialized on demand and only when the enumerated basis is affordable.
    """

    def __init__(self, family: FaceFamily, trunc_len: int, dense_cap: int = 3000):
        if len(family) == 0:
            raise InvalidInputError("family has no pairs")
        self.family = family
        self.trunc_len = int(trunc_len)
        self.dense_cap = dense_cap
        self.faces = tuple(
            FaceSpace(i, p.gns.gns_dim) for i, p in enumerate(family.pairs)
        )
        self._basis: FockBasis | None = None

    @property
    def basis(self) -> FockBasis:
        if self._basis is None:
            self._basis = FockBasis(self.faces, self.trunc_len, max_size=self.dense_cap)
        return self._basis

    def pair(self, i: int) -> FacePair:
        if not 0 <= i < len(self.family.pairs):
            raise InvalidInputError(f"face index {i} out of range")
        return self.family.pairs[i]

    def action(self, side: str, i: int, m: np.ndarray) -> FaceAction:
        return self.pair(i).action(side, m)

    def apply_word(self, word: Sequence[Letter]) -> FockVector:
        """The vector (x_1 ... x_k) applied to the vacuum; rightmost letter acts first."""
        vec = FockVector.vacuum(self.trunc_len)
        for side, i, m in reversed(list(word)):
            act = self.action(side, i, m)
            vec = vec.apply_left(i, act) if side == "l" else vec.apply_right(i, act)
        return vec

    def moment(self, word: Sequence[Letter]) -> complex:
        word = list(word)
        if len(word) > self.trunc_len:
            warnings.warn(
                f"word of length {len(word)} at truncation {self.trunc_len}: "
                "moment may be affected by truncation",
                stacklevel=2,
            )
        return self.apply_word(word).vacuum_amplitude()

    def left_operator(self, i: int, m: np.ndarray) -> FockOperator:
        return left_op(self.basis, i, self.pair(i).face_operator("l", m))

    def right_operator(self, i: int, m: np.ndarray) -> FockOperator:
        return right_op(self.basis, i, self.pair(i).face_operator("r", m))

    def operator(self, letter: Letter) -> FockOperator:
        side, i, m = letter
        if side == "l":
            return self.left_operator(i, m)
        if side == "r":
            return self.right_operator(i, m)
        raise InvalidInputError(f"side must be 'l' or 'r', got {side!r}")

    def generator_letters(self) -> list[tuple[tuple, Letter]]:
        """Canonical letter alphabet over the declared generators, with stable keys."""
        letters = []
        for i, pair in enumerate(self.family.pairs):
            for side, alg in (("l", pair.left), ("r", pair.right)):
                for g_idx, g in enumerate(alg.generators):
                    letters.append(((side, i, g_idx), (side, i, g)))
        return letters

    def splits(self) -> list[tuple[int, int]]:
        return [p.split for p in self.family.pairs]


def reduced_bifree(family: FaceFamily, trunc_len: int, tol: Tolerance = DEFAULT_TOL) -> BiFreeProduct:
    """Construct the truncated model and verify it reproduces the face states."""
    prod = BiFreeProduct(family, trunc_len)
    for i, pair in enumerate(family.pairs):
        for side, alg in (("l", pair.left), ("r", pair.right)):
            for g in alg.generators:
                got = prod.moment([(side, i, g)])
                want = pair.state(g)
                if abs(got - want) > 10 * tol.eq_tol:
                    raise InvalidInputError(
                        f"constructed model fails state preservation on pair {i}: "
                        f"{got} vs {want}"
                    )
    return prod


def bifree_state(prod: BiFreeProduct, word: Sequence[Letter]) -> complex:
    """Vacuum expectation of the composed left/right operators of the word."""
    return prod.moment(word)


@dataclass(frozen=True)
class BiindependenceReport:
    max_defect: float
    worst_word: tuple
    words_compared: int
    biindependent: bool


def biindependence_defect(
    face_generators: Sequence[tuple[Sequence, Sequence]],
    density,
    trunc_len: int,
    word_len_max: int,
    tol: Tolerance = DEFAULT_TOL,
    extra_samples: int = 0,
    seed: int = 0,
) -> BiindependenceReport:
    """Compare joint moments in a common matrix algebra against the bi-free model.

    Every mixed word up to ``word_len_max`` over the face elements (declared
    generators plus optional seeded Hermitian samples) is evaluated both as a
    plain matrix product against the density and as a vacuum moment of the
    corresponding left/right concatenation word; the report carries the
    largest absolute difference.
    """
    state = StateOnMatrices(density, tol=tol)
    d = state.dim
    pairs = []
    for i, (lg, rg) in enumerate(face_generators):
        pairs.append(face_pair(lg, rg, state.density, index=i, tol=tol, product="auto"))
    family = FaceFamily(tuple(pairs))
    prod = reduced_bifree(family, trunc_len, tol)

    rng = np.random.default_rng(seed)
    letters: list[tuple[tuple, str, int, np.ndarray]] = []
    for i, pair in enumerate(family.pairs):
        for side, alg in (("l", pair.left), ("r", pair.right)):
            elems = list(alg.generators)
            for s in range(extra_samples):
                coeff = rng.normal(size=alg.dim) + 1j * rng.normal(size=alg.dim)
                x = alg.expand(coeff)
                x = (x + dagger(x)) / 2
                nrm = frobenius_norm(x)
                if nrm > tol.eq_tol:
                    elems.append(x / nrm)
            for g_idx, g in enumerate(elems):
                if g.shape != (d, d):
                    raise InvalidInputError(
                        f"face element of shape {g.shape} does not act on C^{d}"
                    )
                letters.append(((side, i, g_idx), side, i, as_matrix(g)))

    best = {"defect": 0.0, "word": (), "count": 0}

    def rec(word_keys, matrix, vec, depth):
        ambient_moment = complex(np.trace(state.density @ matrix))
        model_moment = vec.vacuum_amplitude()
        defect = abs(ambient_moment - model_moment)
        best["count"] += 1
        if defect > best["defect"]:
            best["defect"] = defect
            best["word"] = word_keys
        if depth == word_len_max:
            return
        for key, side, i, m in letters:
            act = prod.action(side, i, m)
            nxt = vec.apply_left(i, act) if side == "l" else vec.apply_right(i, act)
            rec((key,) + word_keys, m @ matrix, nxt, depth + 1)

    rec((), np.eye(d, dtype=complex), FockVector.vacuum(trunc_len), 0)
    return BiindependenceReport(
        max_defect=best["defect"],
        worst_word=best["word"],
        words_compared=best["count"],
        biindependent=best["defect"] <= tol.eq_tol,
    )


# ---------------------------------------------------------------------------
# Boundary patterns, simple-tensor decomposition and splice isometries.
# These require every pair to carry the product-form factorization.


@dataclass(frozen=True)
class BoundaryVector:
    """A unit vector with trivial left factor first and trivial right factor last.

    ``face_word`` is empty for the vacuum.  Slot vectors are reduced-space
    coordinates of the joint face (Kronecker indexing of the split).
    """

    face_word: tuple[int, ...]
    slot_vectors: tuple[np.ndarray, ...]

    @property
    def factor_count(self) -> int:
        return len(self.face_word)

    def as_fock_vector(self, trunc_len: int) -> FockVector:
        return FockVector([(1.0 + 0.0j, self.face_word, self.slot_vectors)], trunc_len)


def boundary_patterns(
    splits: Sequence[tuple[int, int]], max_len: int
) -> list[BoundaryVector]:
    """Enumerate the boundary-pattern basis vectors up to the length budget.

    The single shortest element is the vacuum; every other element has at
    least two factors: the first of the form (vacuum x reduced-right), the
    last (reduced-left x vacuum), interior factors running over the whole
    reduced joint space.
    """
    out = [BoundaryVector((), ())]
    n_faces = len(splits)

    def unit(dim: int, pos: int) -> np.ndarray:
        v = np.zeros(dim, dtype=complex)
        v[pos] = 1.0
        return v

    for k in range(2, max_len + 1):
        for fw in alternating_words(n_faces, k):
            dl0, dr0 = splits[fw[0]]
            dlk, drk = splits[fw[-1]]
            first_choices = [unit(dl0 * dr0 - 1, q - 1) for q in range(1, dr0)]
            last_choices = [unit(dlk * drk - 1, b * drk - 1) for b in range(1, dlk)]
            interiors = []
            for f in fw[1:-1]:
                dl, dr = splits[f]
                interiors.append([unit(dl * dr - 1, j - 1) for j in range(1, dl * dr)])
            if not first_choices or not last_choices or any(not c for c in interiors):
                continue
            stack = [(first_choices, 0)]

            def emit(prefix, remaining):
                if not remaining:
                    out.append(BoundaryVector(fw, tuple(prefix)))
                    return
                for choice in remaining[0]:
                    emit(prefix + [choice], remaining[1:])

            emit([], [first_choices] + interiors + [last_choices])
    return out


@dataclass(frozen=True)
class TensorSplit:
    """Decomposition of a simple tensor into left part, bridge and right part.

    ``v`` counts the leading slots with trivial right component, ``m + 1 - w``
    the trailing slots with trivial left component (1-based, as reported).
    Parts are slot lists of (face, left_vector, right_vector); split slots
    carry an exact unit placeholder in the missing half, so recombining the
    three parts reproduces the input exactly.
    """

    v: int
    w: int
    kind: str  # "left", "right" or "interior"
    eta_l: tuple
    bridge: tuple  # empty tuple means the vacuum
    eta_r: tuple


def _is_vac_proportional(vec: np.ndarray, tol: Tolerance) -> bool:
    nrm = np.linalg.norm(vec)
    if nrm == 0.0:
        raise InvalidInputError("slot component is the zero vector")
    return abs(vec[0]) >= (1.0 - tol.rank_tol) * nrm


def split_simple_tensor(slots, tol: Tolerance = DEFAULT_TOL) -> TensorSplit:
    """Split a simple tensor of per-slot (face, left, right) pairs.

    Each slot must lie in the reduced joint space (vanishing vacuum-vacuum
    component) and consecutive faces must differ.
    """
    slots = [(int(f), np.asarray(l, dtype=complex), np.asarray(r, dtype=complex)) for f, l, r in slots]
    m = len(slots)
    if m == 0:
        raise InvalidInputError("empty tensor has no decomposition")
    for t in range(m - 1):
        if slots[t][0] == slots[t + 1][0]:
            raise InvalidInputError("consecutive face labels must differ")
    ltriv = []
    rtriv = []
    for f, l, r in slots:
        lt, rt = _is_vac_proportional(l, tol), _is_vac_proportional(r, tol)
        if lt and rt:
            raise InvalidInputError(
                "slot with both components proportional to the distinguished vector "
                "does not lie in the reduced space"
            )
        ltriv.append(lt)
        rtriv.append(rt)

    v = 0
    while v < m and rtriv[v]:
        v += 1
    w0 = m
    while w0 > 0 and ltriv[w0 - 1]:
        w0 -= 1
    # v slots lead with trivial right halves, slots w0..m-1 trail with trivial left halves
    w = w0 + 1
    assert v < w

    def lhalf(t):
        f, l, _ = slots[t]
        e0 = np.zeros(slots[t][2].shape[0], dtype=complex)
        e0[0] = 1.0
        return (f, l, e0)

    def rhalf(t):
        f, _, r = slots[t]
        e0 = np.zeros(slots[t][1].shape[0], dtype=complex)
        e0[0] = 1.0
        return (f, e0, r)

    if v == m:
        return TensorSplit(v, w, "left", tuple(slots), (), ())
    if w == 1:
        return TensorSplit(v, w, "right", (), (), tuple(slots))

    eta_l = tuple(slots[:v]) + (lhalf(v),)
    eta_r = (rhalf(w0 - 1),) + tuple(slots[w0:])
    if w0 - v >= 2:
        bridge = (rhalf(v),) + tuple(slots[v + 1 : w0 - 1]) + (lhalf(w0 - 1),)
    else:
        bridge = ()
    return TensorSplit(v, w, "interior", eta_l, bridge, eta_r)


def _merge_slots(a, b):
    """Combine the left half of one split slot with the right half of the other."""
    fa, la, ra = a
    fb, lb, rb = b
    if fa != fb:
        raise InvalidInputError("cannot merge slots with different faces")
    return (fa, la * complex(lb[0]), rb * complex(ra[0]))


def recombine_split(split: TensorSplit):
    """Concatenate the three parts, merging shared slots; inverse of the split."""
    parts = [list(split.eta_l), list(split.bridge), list(split.eta_r)]
    parts = [p for p in parts if p]
    if not parts:
        return []
    out = parts[0]
    for nxt in parts[1:]:
        if out and nxt and out[-1][0] == nxt[0][0]:
            merged = _merge_slots(out[-1], nxt[0])
            out = out[:-1] + [merged] + nxt[1:]
        else:
            out = out + nxt
    return out


def splice_isometry(
    h: BoundaryVector,
    left_basis: FockBasis,
    right_basis: FockBasis,
    target_basis: FockBasis,
    splits: Sequence[tuple[int, int]],
    allow_partial: bool = False,
) -> np.ndarray:
    """Isometric embedding of (left free product) x (right free product) around ``h``.

    Columns are indexed by pairs of one-sided basis words under the global
    lexicographic pairing.  Each image is the concatenation left-part, ``h``,
    right-part, with ends merged into shared slots whenever the adjacent face
    labels coincide (both merges can happen at once; for the vacuum pattern
    the two sides may merge with each other).  Domain words whose image would
    exceed the target truncation raise a partial-map error listing them,
    unless ``allow_partial`` is set, in which case their columns stay zero.
    """
    n_l, n_r = left_basis.size, right_basis.size
    cols = np.zeros((target_basis.size, n_l * n_r), dtype=complex)
    dropped = []
    h_word = h.face_word
    for il, wl in enumerate(left_basis.elements):
        left_slots = [
            (f, _left_lift(splits[f], b)) for f, b in zip(wl.faces, wl.slots)
        ]
        for ir, wr in enumerate(right_basis.elements):
            right_slots = [
                (f, _right_lift(splits[f], q)) for f, q in zip(wr.faces, wr.slots)
            ]
            faces: list[int] = [f for f, _ in left_slots]
            vecs: list[np.ndarray] = [v for _, v in left_slots]
            if h_word:
                h_faces = list(h_word)
                h_vecs = [v.copy() for v in h.slot_vectors]
                if faces and faces[-1] == h_faces[0]:
                    merged = _merge_left_end(splits[faces[-1]], wl.slots[-1], h_vecs[0])
                    faces = faces[:-1] + h_faces
                    vecs = vecs[:-1] + [merged] + h_vecs[1:]
                else:
                    faces = faces + h_faces
                    vecs = vecs + h_vecs
                if right_slots and faces[-1] == right_slots[0][0]:
                    merged = _merge_right_end(
                        splits[faces[-1]], vecs[-1], wr.slots[0]
                    )
                    faces = faces + [f for f, _ in right_slots[1:]]
                    vecs = vecs[:-1] + [merged] + [v for _, v in right_slots[1:]]
                else:
                    faces = faces + [f for f, _ in right_slots]
                    vecs = vecs + [v for _, v in right_slots]
            else:
                if faces and right_slots and faces[-1] == right_slots[0][0]:
                    dl, dr = splits[faces[-1]]
                    joint = np.zeros(dl * dr - 1, dtype=complex)
                    joint[wl.slots[-1] * dr + wr.slots[0] - 1] = 1.0
                    faces = faces + [f for f, _ in right_slots[1:]]
                    vecs = vecs[:-1] + [joint] + [v for _, v in right_slots[1:]]
                else:
                    faces = faces + [f for f, _ in right_slots]
                    vecs = vecs + [v for _, v in right_slots]
            if len(faces) > target_basis.trunc_len:
                dropped.append((il, ir))
                continue
            col = FockVector(
                [(1.0 + 0.0j, tuple(faces), tuple(vecs))], target_basis.trunc_len
            ).coordinates(target_basis)
            cols[:, il * n_r + ir] = col
    if dropped and not allow_partial:
        raise PartialMapError(
            f"{len(dropped)} domain words exceed the target truncation", dropped
        )
    return cols


def _left_lift(split: tuple[int, int], b: int) -> np.ndarray:
    """Reduced joint coordinates of (left basis vector b) x (right vacuum)."""
    dl, dr = split
    v = np.zeros(dl * dr - 1, dtype=complex)
    v[b * dr - 1] = 1.0
    return v


def _right_lift(split: tuple[int, int], q: int) -> np.ndarray:
    """Reduced joint coordinates of (left vacuum) x (right basis vector q)."""
    dl, dr = split
    v = np.zeros(dl * dr - 1, dtype=complex)
    v[q - 1] = 1.0
    return v


def _merge_left_end(split: tuple[int, int], b: int, h_first: np.ndarray) -> np.ndarray:
    """Replace the vacuous left half of the pattern's first slot by basis vector b."""
    dl, dr = split
    out = np.zeros(dl * dr - 1, dtype=complex)
    for q in range(1, dr):
        out[b * dr + q - 1] = h_first[q - 1]
    return out


def _merge_right_end(split: tuple[int, int], h_last: np.ndarray, q: int) -> np.ndarray:
    """Replace the vacuous right half of the pattern's last slot by basis vector q."""
    dl, dr = split
    out = np.zeros(dl * dr - 1, dtype=complex)
    for b in range(1, dl):
        out[b * dr + q - 1] = h_last[b * dr - 1]
    return out


class OneSidedFreeProduct:
    """Free product of one-sided faces, acting by one-sided concatenation only."""

    def __init__(self, triples: Sequence[GnsTriple], side: str, trunc_len: int):
        if side not in ("l", "r"):
            raise InvalidInputError(f"side must be 'l' or 'r', got {side!r}")
        self.side = side
        self.triples = tuple(triples)
        self.trunc_len = int(trunc_len)
        self.faces = tuple(FaceSpace(i, t.gns_dim) for i, t in enumerate(self.triples))
        self._basis: FockBasis | None = None
        self._cache: dict = {}

    @property
    def basis(self) -> FockBasis:
        if self._basis is None:
            self._basis = FockBasis(self.faces, self.trunc_len)
        return self._basis

    def action(self, i: int, m: np.ndarray) -> FaceAction:
        m = as_matrix(m)
        key = (i, m.tobytes())
        hit = self._cache.get(key)
        if hit is None:
            hit = FaceAction.from_matrix(self.triples[i].represent(m))
            self._cache[key] = hit
        return hit

    def apply_word(self, word: Sequence[tuple[int, np.ndarray]]) -> FockVector:
        vec = FockVector.vacuum(self.trunc_len)
        for i, m in reversed(list(word)):
            act = self.action(i, m)
            vec = vec.apply_left(i, act) if self.side == "l" else vec.apply_right(i, act)
        return vec

    def moment(self, word: Sequence[tuple[int, np.ndarray]]) -> complex:
        return self.apply_word(word).vacuum_amplitude()
