"""Theorem-scale verification checks on concrete families.

Everything here consumes finite families of face pairs and produces defect
numbers or witness reports.  Faithfulness is never certified: a probe either
exhibits a vector in the kernel of the vacuum state or reports that none was
found at the explored scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import StateOnMatrices, close_algebra, is_faithful
from .bifree import (
    BiFreeProduct,
    FaceFamily,
    OneSidedFreeProduct,
    biindependence_defect,
    reduced_bifree,
)
from .errors import InvalidInputError, UnsupportedStructureError
from .fock import FockBasis, FockVector, count_words, face_embedding
from .linalg import DEFAULT_TOL, Tolerance, as_matrix, dagger, numeric_rank, operator_norm

__all__ = [
    "WitnessReport",
    "IsoReport",
    "ProbeReport",
    "TensorInjectivityReport",
    "commutation_defect",
    "nonfaithfulness_witness",
    "pivot_embedding",
    "pivot_compression_defect",
    "tensor_injectivity_dims",
    "tensor_split_report",
    "state_kernel_probe",
    "moment_equivalence_report",
]


@dataclass(frozen=True)
class WitnessReport:
    vacuum_norm: float
    witness_norm_lower: float
    verdict: str  # "non_faithful_witnessed" or "no_witness_found"
    witness_description: str


@dataclass(frozen=True)
class IsoReport:
    max_moment_defect: float
    words_compared: int
    dims: tuple[int, int]
    verdict: bool
    worst_word: tuple = ()


@dataclass(frozen=True)
class TensorInjectivityReport:
    dim_kron: int
    dim_products: int

    @property
    def injective(self) -> bool:
        return self.dim_kron == self.dim_products


@dataclass(frozen=True)
class ProbeReport:
    min_ratio: float
    witness: tuple | None
    words_compared: int
    span_dim: int
    norm_trunc_len: int


def commutation_defect(pair) -> float:
    """Largest operator norm of a commutator between left and right generators."""
    worst = 0.0
    for a in pair.left.generators:
        for b in pair.right.generators:
            worst = max(worst, operator_norm(a @ b - b @ a))
    return worst


def nonfaithfulness_witness(
    family: FaceFamily,
    trunc_len: int,
    face_i: int,
    a_left,
    a_right,
    face_j: int,
    b,
    b_side: str = "l",
    tol: Tolerance = DEFAULT_TOL,
) -> WitnessReport:
    """Contrapositive witness for a pair whose faces fail to commute.

    Builds Y = [left_i(a_l), right_i(a_r)] o op_j(b) with b centered on a
    different face.  Y annihilates the vacuum, while its compression to the
    embedded face-i space applied to the embedded vector b* xi_j has norm
    phi_j(b b*) times the norm of the commutator class, which is nonzero
    exactly when the faces fail to commute.
    """
    if trunc_len < 4:
        raise InvalidInputError("witness construction requires truncation length >= 4")
    if face_i == face_j:
        raise InvalidInputError("the centered element must live on a different face")
    if b_side not in ("l", "r"):
        raise InvalidInputError(f"side must be 'l' or 'r', got {b_side!r}")
    prod = reduced_bifree(family, trunc_len, tol)
    pair_j = prod.pair(face_j)
    b = as_matrix(b)
    if abs(pair_j.state(b)) > tol.eq_tol:
        raise InvalidInputError(
            f"element b is not centered: phi_{face_j}(b) = {pair_j.state(b):.3e}"
        )

    a_l = as_matrix(a_left)
    a_r = as_matrix(a_right)
    op_al = prod.left_operator(face_i, a_l).matrix
    op_ar = prod.right_operator(face_i, a_r).matrix
    op_b = (
        prod.left_operator(face_j, b).matrix
        if b_side == "l"
        else prod.right_operator(face_j, b).matrix
    )
    y = op_al @ op_ar @ op_b - op_ar @ op_al @ op_b

    vacuum_norm = float(np.linalg.norm(y[:, 0]))

    # probe vector: b* xi_j placed at the length-one word of face j
    emb_j = face_embedding(prod.basis, face_j)
    pj_b_star = pair_j.gns.represent(dagger(b))
    probe = emb_j @ (pj_b_star @ pair_j.gns.cyclic)
    emb_i = face_embedding(prod.basis, face_i)
    witness_norm = float(np.linalg.norm(emb_i.conj().T @ (y @ probe)))

    if vacuum_norm <= tol.eq_tol and witness_norm >= 100 * tol.eq_tol:
        verdict = "non_faithful_witnessed"
    else:
        verdict = "no_witness_found"
    side_name = "left" if b_side == "l" else "right"
    description = (
        f"commutator(left[{face_i}](a_l), right[{face_i}](a_r)) o {side_name}[{face_j}](b)"
    )
    return WitnessReport(vacuum_norm, witness_norm, verdict, description)


def pivot_embedding(prod: BiFreeProduct, face_i: int, face_j: int, h: np.ndarray) -> np.ndarray:
    """Isometry of (face i space) x (face i space) into the Fock space around ``h``.

    ``h`` is a unit vector in the reduced space of face j; the image of
    eta_1 (x) eta_2 decomposes over the four sectors spanned by h alone,
    (reduced_i, h), (h, reduced_i) and (reduced_i, h, reduced_i).
    """
    basis = prod.basis
    if face_i == face_j:
        raise InvalidInputError("the pivot vector must sit on a different face")
    if basis.trunc_len < 3:
        raise InvalidInputError("pivot embedding requires truncation length >= 3")
    h = np.asarray(h, dtype=complex)
    d_j = basis.face(face_j).dim
    if h.shape != (d_j - 1,):
        raise InvalidInputError(
            f"pivot vector must have the reduced dimension {d_j - 1} of face {face_j}"
        )
    if abs(np.linalg.norm(h) - 1.0) > 1e-8:
        raise InvalidInputError("pivot vector must have unit norm")
    d_i = basis.face(face_i).dim
    cols = np.zeros((basis.size, d_i * d_i), dtype=complex)

    def unit(pos: int) -> np.ndarray:
        v = np.zeros(d_i - 1, dtype=complex)
        v[pos] = 1.0
        return v

    for p in range(d_i):
        for q in range(d_i):
            if p == 0 and q == 0:
                faces, vecs = (face_j,), (h,)
            elif q == 0:
                faces, vecs = (face_i, face_j), (unit(p - 1), h)
            elif p == 0:
                faces, vecs = (face_j, face_i), (h, unit(q - 1))
            else:
                faces, vecs = (face_i, face_j, face_i), (unit(p - 1), h, unit(q - 1))
            vec = FockVector([(1.0 + 0.0j, faces, vecs)], basis.trunc_len)
            cols[:, p * d_i + q] = vec.coordinates(basis)
    return cols


def pivot_compression_defect(
    family: FaceFamily,
    trunc_len: int,
    face_i: int,
    face_j: int,
    h: np.ndarray | None = None,
    tol: Tolerance = DEFAULT_TOL,
) -> float:
    """Defect of compressing left-times-right words to the doubled face space.

    Compressing left_i(a) right_i(b) through the pivot embedding must equal
    the Kronecker product of the GNS matrices of a and b; the maximum
    operator-norm deviation over the declared generators is returned.
    """
    prod = reduced_bifree(family, trunc_len, tol)
    pair = prod.pair(face_i)
    if commutation_defect(pair) > 100 * tol.eq_tol:
        raise InvalidInputError(
            f"faces of pair {face_i} do not commute; the tensor target is ill-defined"
        )
    if h is None:
        d_j = prod.pair(face_j).gns.gns_dim
        if d_j < 2:
            raise InvalidInputError(f"face {face_j} has no reduced space to pivot on")
        h = np.zeros(d_j - 1, dtype=complex)
        h[0] = 1.0
    v = pivot_embedding(prod, face_i, face_j, h)
    eye = np.eye(pair.ambient_dim, dtype=complex)
    worst = 0.0
    for a in (eye,) + pair.left.generators:
        rep_a = pair.gns.represent(a)
        op_a = prod.left_operator(face_i, a).matrix
        for b in (eye,) + pair.right.generators:
            rep_b = pair.gns.represent(b)
            op_b = prod.right_operator(face_i, b).matrix
            compressed = v.conj().T @ (op_a @ op_b) @ v
            target = np.kron(rep_a, rep_b)
            worst = max(worst, operator_norm(compressed - target))
    return worst


def tensor_injectivity_dims(pair, tol: Tolerance = DEFAULT_TOL) -> TensorInjectivityReport:
    """Dimensions certifying injectivity of the multiplication map on the faces.

    Compares dim(left) * dim(right) with the dimension of the span of all
    products a b; equality means the canonical map from the algebraic tensor
    product onto the generated algebra is injective.
    """
    if commutation_defect(pair) > 100 * tol.eq_tol:
        raise InvalidInputError(
            f"faces of pair {pair.index} do not commute; not a tensor candidate"
        )
    products = np.array(
        [(a @ b).reshape(-1) for a in pair.left.closure_basis for b in pair.right.closure_basis]
    )
    return TensorInjectivityReport(
        dim_kron=pair.left.dim * pair.right.dim,
        dim_products=numeric_rank(products, tol),
    )


def tensor_split_report(
    family: FaceFamily,
    trunc_len: int,
    word_len_max: int,
    tol: Tolerance = DEFAULT_TOL,
    span_len: int | None = None,
    span_cap: int = 1024,
) -> IsoReport:
    """Compare the bi-free model against the tensor product of one-sided free products.

    Both sides are built independently: side A evaluates vacuum moments of
    mixed left/right words on the joint model, side B factors each word
    through (free product of left faces) tensor (free product of right
    faces), where the moment splits as a product of two one-sided moments.
    Every generator word up to ``word_len_max`` is compared; the span
    dimensions are the ranks of the word-vector Gram matrices over words of
    length at most ``span_len`` on each side.
    """
    for i, pair in enumerate(family.pairs):
        if not pair.has_product_form:
            raise UnsupportedStructureError(
                f"face pair {i} does not carry a product state over commuting faces"
            )
    prod = reduced_bifree(family, trunc_len, tol)
    left_model = OneSidedFreeProduct([p.left_gns for p in family.pairs], "l", trunc_len)
    right_model = OneSidedFreeProduct([p.right_gns for p in family.pairs], "r", trunc_len)
    letters = prod.generator_letters()
    if span_len is None:
        span_len = min(3, word_len_max)

    span_a: list[FockVector] = []
    span_b: list[tuple[FockVector, FockVector]] = []
    state = {"count": 0, "max": 0.0, "worst": ()}

    def recurse(word_keys, vec_a, vec_l, vec_r, depth):
        m_a = vec_a.vacuum_amplitude()
        m_b = vec_l.vacuum_amplitude() * vec_r.vacuum_amplitude()
        defect = abs(m_a - m_b)
        state["count"] += 1
        if defect > state["max"]:
            state["max"] = defect
            state["worst"] = word_keys
        if depth <= span_len and len(span_a) < span_cap:
            span_a.append(vec_a)
            span_b.append((vec_l, vec_r))
        if depth == word_len_max:
            return
        for key, (side, i, m) in letters:
            act = prod.action(side, i, m)
            if side == "l":
                n_a = vec_a.apply_left(i, act)
                n_l = vec_l.apply_left(i, left_model.action(i, m))
                n_r = vec_r
            else:
                n_a = vec_a.apply_right(i, act)
                n_l = vec_l
                n_r = vec_r.apply_right(i, right_model.action(i, m))
            recurse((key,) + word_keys, n_a, n_l, n_r, depth + 1)

    recurse(
        (),
        FockVector.vacuum(trunc_len),
        FockVector.vacuum(trunc_len),
        FockVector.vacuum(trunc_len),
        0,
    )

    span_basis = FockBasis(prod.faces, min(span_len, trunc_len), max_size=50_000)
    mat_a = np.array([v.coordinates(span_basis) for v in span_a])
    lb = FockBasis(left_model.faces, min(span_len, trunc_len))
    rb = FockBasis(right_model.faces, min(span_len, trunc_len))
    mat_b = np.array(
        [np.kron(l.coordinates(lb), r.coordinates(rb)) for l, r in span_b]
    )
    dims = (numeric_rank(mat_a, tol), numeric_rank(mat_b, tol))
    verdict = state["max"] <= tol.eq_tol and dims[0] == dims[1]
    return IsoReport(
        max_moment_defect=state["max"],
        words_compared=state["count"],
        dims=dims,
        verdict=verdict,
        worst_word=state["worst"],
    )


def _graded_words(n_letters: int, max_len: int, cap: int) -> list[tuple[int, ...]]:
    words: list[tuple[int, ...]] = [()]
    level: list[tuple[int, ...]] = [()]
    while level and len(level[0]) < max_len and len(words) < cap:
        level = [(l,) + w for l in range(n_letters) for w in level]
        # prepend-major ordering is graded-lexicographic level by level
        level.sort()
        words.extend(level)
    return words[:cap]


def state_kernel_probe(
    prod: BiFreeProduct,
    word_len_max: int,
    tol: Tolerance = DEFAULT_TOL,
    max_words: int = 1024,
    slab_len: int | None = None,
    coords_cap: int = 4000,
) -> ProbeReport:
    """Search the word span for elements annihilating the vacuum.

    Over the span of all generator words up to ``word_len_max`` (graded
    lexicographic, capped at ``max_words``), minimizes the norm of x applied
    to the vacuum subject to a unit Frobenius norm of x compressed to the
    basis columns of length at most ``slab_len``, normalized by the column
    count.  The truncation must leave room for those columns to be computed
    exactly (``word_len_max + slab_len <= trunc_len``), which keeps the
    normalizing form a form on the true operators: combinations that vanish
    identically get norm zero and are quotiented out instead of surfacing as
    spurious witnesses.  A small ratio exhibits a kernel element; a large one
    only says no witness was found at this scale.
    """
    letters = prod.generator_letters()
    if not letters:
        raise InvalidInputError("the family declares no generators to build words from")
    if slab_len is None:
        slab_len = min(max(prod.trunc_len - word_len_max, 0), 1)
    if word_len_max + slab_len > prod.trunc_len:
        raise InvalidInputError(
            f"truncation {prod.trunc_len} is too short to evaluate length-"
            f"{word_len_max} words on length-{slab_len} columns exactly"
        )
    if word_len_max > 0 and slab_len == 0:
        raise InvalidInputError(
            "probe needs at least one non-vacuum column; build the model one "
            "truncation level deeper than word_len_max"
        )
    n_letters = len(letters)
    words = _graded_words(n_letters, word_len_max, max_words)
    n_words = len(words)

    reach_len = min(word_len_max + slab_len, prod.trunc_len)
    reduced_dims = [f.reduced_dim for f in prod.faces]
    coords_affordable = count_words(reduced_dims, reach_len) <= coords_cap
    span_basis = FockBasis(prod.faces, reach_len, max_size=None) if coords_affordable else None
    slab_cols = FockBasis(prod.faces, slab_len, max_size=None).elements
    n_slab = len(slab_cols)
    actions = []
    for _, (side, i, m) in letters:
        actions.append((side, i, prod.action(side, i, m)))

    def word_vectors(start: FockVector) -> dict[tuple[int, ...], FockVector]:
        out = {(): start}
        for w in words:
            if w:
                side, i, act = actions[w[0]]
                base = out[w[1:]]
                out[w] = (
                    base.apply_left(i, act) if side == "l" else base.apply_right(i, act)
                )
        return out

    vac_vecs = word_vectors(FockVector.vacuum(prod.trunc_len))

    gram_a = np.zeros((n_words, n_words), dtype=complex)
    gram_b = np.zeros((n_words, n_words), dtype=complex)
    vac_coords = None
    for col in slab_cols:
        if col.length == 0:
            col_vecs = vac_vecs
        else:
            start = FockVector(
                [(
                    1.0 + 0.0j,
                    col.faces,
                    tuple(_unit(prod.faces[f].reduced_dim, b - 1) for f, b in zip(col.faces, col.slots)),
                )],
                prod.trunc_len,
            )
            col_vecs = word_vectors(start)
        if coords_affordable:
            mat = np.array([col_vecs[w].coordinates(span_basis) for w in words])
            contrib = np.conj(mat @ mat.conj().T)
            if col.length == 0:
                vac_coords = mat
                gram_a = contrib
        else:
            vecs_list = [col_vecs[w] for w in words]
            contrib = np.zeros((n_words, n_words), dtype=complex)
            for p in range(n_words):
                for q in range(p, n_words):
                    val = vecs_list[q].inner(vecs_list[p])
                    contrib[p, q] = np.conj(val)
                    contrib[q, p] = val
            if col.length == 0:
                gram_a = contrib
        gram_b += contrib
    gram_b /= n_slab

    w_b, u_b = np.linalg.eigh((gram_b + gram_b.conj().T) / 2)
    keep = w_b > tol.rank_tol * max(w_b.max(), 0.0)
    span_dim = int(keep.sum())
    if span_dim == 0:
        raise InvalidInputError("word span collapsed to zero on the probe columns")
    whiten = u_b[:, keep] / np.sqrt(w_b[keep])[None, :]
    reduced = whiten.conj().T @ gram_a @ whiten
    w_m, u_m = np.linalg.eigh((reduced + reduced.conj().T) / 2)
    coeffs = whiten @ u_m[:, 0]

    # exact recomputation of the minimizer's vacuum norm
    if vac_coords is not None:
        min_ratio = float(np.linalg.norm(vac_coords.T @ coeffs))
    else:
        terms = []
        for c, w in zip(coeffs, words):
            terms.extend((c * t0, fw, slots) for t0, fw, slots in vac_vecs[w].terms)
        min_ratio = FockVector(terms, prod.trunc_len).norm()

    witness = None
    if min_ratio <= tol.eq_tol:
        scale = np.abs(coeffs).max()
        witness = tuple(
            (tuple(letters[l][0] for l in w), complex(c))
            for w, c in zip(words, coeffs)
            if abs(c) > 1e-9 * scale
        )
    return ProbeReport(
        min_ratio=min_ratio,
        witness=witness,
        words_compared=n_words,
        span_dim=span_dim,
        norm_trunc_len=word_len_max + slab_len,
    )


def _unit(dim: int, pos: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[pos] = 1.0
    return v


def moment_equivalence_report(
    family: FaceFamily,
    trunc_len: int,
    word_len_max: int,
    ambient_density=None,
    tol: Tolerance = DEFAULT_TOL,
    probe_words: int = 256,
) -> IsoReport:
    """Three-way moment equality: ambient state, bi-free model, tensor of free products.

    With an explicit ambient density the family's faces are read inside one
    matrix algebra: bi-free independence, faithfulness of the ambient state
    on the generated algebra, product states and tensor injectivity are all
    checked first, and the ambient-versus-model defect joins the comparison.
    Without it the truncated model itself serves as the ambient realization
    (its state is checked by the kernel probe instead) and the informative
    defect is the one against the tensor factorization.
    """
    for i, pair in enumerate(family.pairs):
        if not pair.has_product_form:
            raise UnsupportedStructureError(
                f"face pair {i} does not carry a product state over commuting faces"
            )
        rep = tensor_injectivity_dims(pair, tol)
        if not rep.injective:
            raise UnsupportedStructureError(
                f"face pair {i} fails tensor injectivity: {rep.dim_products} < {rep.dim_kron}"
            )

    ambient_defect = 0.0
    if ambient_density is not None:
        gens = [
            (list(p.left.generators), list(p.right.generators)) for p in family.pairs
        ]
        indep = biindependence_defect(gens, ambient_density, trunc_len, word_len_max, tol)
        if not indep.biindependent:
            raise InvalidInputError(
                f"family is not bi-freely independent in the ambient algebra "
                f"(defect {indep.max_defect:.3e} at word {indep.worst_word})"
            )
        ambient_defect = indep.max_defect
        all_gens = [g for p in family.pairs for g in p.ambient.generators]
        d = as_matrix(ambient_density).shape[0]
        ambient_alg = close_algebra(d, all_gens, tol)
        ok, _ = is_faithful(StateOnMatrices(ambient_density, tol=tol), ambient_alg, tol)
        if not ok:
            raise InvalidInputError(
                "the ambient state is not faithful on the algebra the faces generate"
            )
    else:
        probe = state_kernel_probe(
            reduced_bifree(family, trunc_len, tol),
            min(word_len_max, 3),
            tol,
            max_words=probe_words,
        )
        if probe.min_ratio <= tol.eq_tol:
            raise InvalidInputError(
                f"the model state has a kernel witness at scale {probe.min_ratio:.3e}; "
                "the ambient realization is not faithful"
            )

    iso = tensor_split_report(family, trunc_len, word_len_max, tol)
    total = max(iso.max_moment_defect, ambient_defect)
    return IsoReport(
        max_moment_defect=total,
        words_compared=iso.words_compared,
        dims=iso.dims,
        verdict=total <= tol.eq_tol and iso.dims[0] == iso.dims[1],
        worst_word=iso.worst_word,
    )
