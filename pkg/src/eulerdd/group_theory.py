"""Finite groups, their unitary (projective) matrix representations, and the
algebraic structure used by decoupling: group-average projector, commutant,
center, and irreducible block decomposition.

All equality tests between represented elements are "equal up to a global
phase"; phases are fixed by the entry of largest modulus so no explicit
factor system is ever stored.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEFAULT_PHASE_TOL = 1e-10


class GroupClosureError(ValueError):
    """Closure of the generator set did not terminate within the cap."""


class InvalidGeneratorError(ValueError):
    """A supplied generator matrix is not unitary."""


class ShapeError(ValueError):
    """Operator dimension does not match the representation."""


class NotNormalSubgroupError(ValueError):
    """The supplied element subset is not a normal subgroup."""


class DegenerateDecompositionError(RuntimeError):
    """Eigenvalue clustering was ambiguous at the requested tolerance."""


def fix_phase(m: np.ndarray) -> np.ndarray:
    """Normalize the global phase of a matrix by its largest-modulus entry.

    The entry of largest modulus (first in row-major order on ties, up to a
    small relative slack) is rotated to be real positive.
    """
    flat = m.ravel()
    mods = np.abs(flat)
    top = mods.max()
    if top == 0.0:
        return m.copy()
    idx = int(np.flatnonzero(mods >= top * (1.0 - 1e-9))[0])
    phase = flat[idx] / abs(flat[idx])
    return m / phase


def equal_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float = DEFAULT_PHASE_TOL) -> bool:
    if a.shape != b.shape:
        return False
    scale = max(np.linalg.norm(a), 1.0)
    return np.linalg.norm(fix_phase(a) - fix_phase(b)) <= tol * scale


def align_phase(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Return b multiplied by the unit phase maximizing |tr(a† b)| overlap."""
    ov = np.trace(a.conj().T @ b)
    if abs(ov) < 1e-300:
        return b
    return b * (ov.conjugate() / abs(ov))


def is_unitary(m: np.ndarray, tol: float = DEFAULT_PHASE_TOL) -> bool:
    d = m.shape[0]
    return m.shape == (d, d) and np.linalg.norm(m.conj().T @ m - np.eye(d)) <= tol * d


@dataclass(frozen=True)
class Group:
    """Abstract finite group: element list, multiplication table, generators.

    Element 0 is the identity.  ``mult_table[i, j]`` is the index of
    g_i * g_j.  ``generators`` are indices into ``elements``.
    """

    elements: tuple
    mult_table: np.ndarray
    generators: tuple

    @property
    def order(self) -> int:
        return len(self.elements)

    def multiply(self, i: int, j: int) -> int:
        return int(self.mult_table[i, j])

    def inverse(self, i: int) -> int:
        row = self.mult_table[i]
        return int(np.flatnonzero(row == 0)[0])

    def validate(self) -> None:
        n = self.order
        t = self.mult_table
        if t.shape != (n, n):
            raise ValueError("mult_table shape does not match element count")
        for i in range(n):
            if t[0, i] != i or t[i, 0] != i:
                raise ValueError("element 0 is not the identity")
            if sorted(t[i]) != list(range(n)) or sorted(t[:, i]) != list(range(n)):
                raise ValueError("mult_table rows/columns are not permutations")
            if 0 not in t[i]:
                raise ValueError(f"element {i} has no inverse")
        # associativity by brute force (desk-scale groups only)
        for i in range(n):
            for j in range(n):
                tij = t[i, j]
                if not np.array_equal(t[tij], t[i][t[j]]):
                    raise ValueError("mult_table is not associative")
        if self.generated_subgroup(self.generators) != set(range(n)):
            raise ValueError("generators do not generate the group")

    def generated_subgroup(self, gens) -> set:
        closure = {0}
        frontier = list(gens)
        while frontier:
            nxt = []
            for g in frontier:
                for h in list(closure):
                    for p in (self.multiply(g, h), self.multiply(h, g)):
                        if p not in closure:
                            closure.add(p)
                            nxt.append(p)
                if g not in closure:
                    closure.add(g)
                    nxt.append(g)
            frontier = nxt
        return closure

    def is_normal(self, subgroup) -> bool:
        sub = set(subgroup)
        for g in range(self.order):
            ginv = self.inverse(g)
            for h in sub:
                if self.multiply(g, self.multiply(h, ginv)) not in sub:
                    return False
        return True

    def coset_transversal(self, normal_subgroup) -> list:
        """One representative per left coset of the subgroup (identity first)."""
        sub = sorted(set(normal_subgroup))
        seen = set()
        reps = []
        for g in range(self.order):
            if g in seen:
                continue
            reps.append(g)
            for h in sub:
                seen.add(self.multiply(g, h))
        return reps


@dataclass
class UnitaryRep:
    """Unitary projective representation: one matrix per group element."""

    group: Group
    matrices: list
    phase_tolerance: float = DEFAULT_PHASE_TOL
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def dimension(self) -> int:
        return self.matrices[0].shape[0]

    def validate(self) -> None:
        d = self.dimension
        tol = self.phase_tolerance
        if len(self.matrices) != self.group.order:
            raise ValueError("one matrix per group element required")
        if not equal_up_to_phase(self.matrices[0], np.eye(d), tol):
            raise ValueError("element 0 must be represented by the identity")
        for k, m in enumerate(self.matrices):
            if not is_unitary(m, tol):
                raise ValueError(f"matrix {k} is not unitary")
        for i, mi in enumerate(self.matrices):
            for j, mj in enumerate(self.matrices):
                k = self.group.multiply(i, j)
                if not equal_up_to_phase(mi @ mj, self.matrices[k], tol):
                    raise ValueError("matrices are not a projective homomorphism")
                if i < j and equal_up_to_phase(mi, mj, tol):
                    raise ValueError("representation is not faithful up to phase")

    def algebra_basis(self) -> list:
        """Orthonormal (Hilbert-Schmidt) basis of span{g_j}."""
        if "algebra" not in self._cache:
            self._cache["algebra"] = _orthonormal_span(self.matrices)
        return self._cache["algebra"]


def _vec(m: np.ndarray) -> np.ndarray:
    return m.ravel()


def _orthonormal_span(mats, tol: float = 1e-10) -> list:
    """Orthonormalize a list of matrices in the Hilbert-Schmidt inner product."""
    d = mats[0].shape[0]
    stack = np.array([_vec(m) for m in mats])
    u, s, vh = np.linalg.svd(stack, full_matrices=False)
    rank = int(np.sum(s > tol * s[0])) if s.size else 0
    return [vh[k].reshape(d, d) for k in range(rank)]


def close_group(generator_matrices, max_order: int = 512,
                phase_tolerance: float = DEFAULT_PHASE_TOL) -> tuple:
    """Build the abstract group generated by unitary matrices, up to phase.

    Returns (Group, UnitaryRep).  Element 0 is the identity's phase class.
    Raises GroupClosureError if the closure exceeds ``max_order`` elements.
    """
    gens = [np.asarray(g, dtype=complex) for g in generator_matrices]
    if not gens:
        raise InvalidGeneratorError("invalid generator: empty generator list")
    d = gens[0].shape[0]
    for g in gens:
        if g.shape != (d, d) or not is_unitary(g, phase_tolerance):
            raise InvalidGeneratorError("invalid generator: non-unitary input")

    elements = [np.eye(d, dtype=complex)]

    def find(m):
        for k, e in enumerate(elements):
            if equal_up_to_phase(e, m, phase_tolerance):
                return k
        return -1

    gen_indices = []
    for g in gens:
        k = find(g)
        if k < 0:
            elements.append(fix_phase(g))
            k = len(elements) - 1
        if k not in gen_indices and k != 0:
            gen_indices.append(k)
        elif k == 0 and len(gens) == 1:
            gen_indices.append(0)

    frontier = list(range(len(elements)))
    while frontier:
        nxt = []
        for i in frontier:
            for g in gens:
                prod = g @ elements[i]
                if find(prod) < 0:
                    if len(elements) >= max_order:
                        raise GroupClosureError("group too large or not closed")
                    elements.append(fix_phase(prod))
                    nxt.append(len(elements) - 1)
        frontier = nxt

    n = len(elements)
    table = np.zeros((n, n), dtype=int)
    for i in range(n):
        for j in range(n):
            k = find(elements[i] @ elements[j])
            if k < 0:
                raise GroupClosureError("group too large or not closed")
            table[i, j] = k

    if not gen_indices:
        gen_indices = [0]
    group = Group(elements=tuple(f"g{k}" for k in range(n)),
                  mult_table=table, generators=tuple(gen_indices))
    rep = UnitaryRep(group=group, matrices=elements, phase_tolerance=phase_tolerance)
    return group, rep


def pi_G(rep: UnitaryRep, X: np.ndarray) -> np.ndarray:
    """Group-average projector onto the commutant:
    (1/|G|) sum_j g_j† X g_j."""
    X = np.asarray(X, dtype=complex)
    d = rep.dimension
    if X.shape != (d, d):
        raise ShapeError("shape error: operator does not match representation dimension")
    acc = np.zeros((d, d), dtype=complex)
    for g in rep.matrices:
        acc += g.conj().T @ X @ g
    return acc / len(rep.matrices)


def commutant_basis(rep: UnitaryRep, tol: float = 1e-10) -> list:
    """Orthonormal basis of {X : X g_j = g_j X for all j}.

    Computed as the joint null space of X -> g_j X - X g_j over all group
    elements, via SVD on the d^2-dimensional operator space.
    """
    d = rep.dimension
    eye = np.eye(d)
    blocks = []
    for g in rep.matrices[1:]:
        # row-major vec: vec(AXB) = (A kron B^T) vec(X)
        blocks.append(np.kron(g, eye) - np.kron(eye, g.T))
    if not blocks:
        return [np.eye(d) / np.sqrt(d)] if d == 1 else _full_matrix_basis(d)
    M = np.vstack(blocks)
    u, s, vh = np.linalg.svd(M)
    null_mask = np.concatenate([s, np.zeros(vh.shape[0] - s.size)]) <= tol
    return [vh[k].reshape(d, d) for k in range(vh.shape[0]) if null_mask[k]]


def _full_matrix_basis(d: int) -> list:
    basis = []
    for i in range(d):
        for j in range(d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = 1.0
            basis.append(e)
    return basis


def center_basis(rep: UnitaryRep, tol: float = 1e-10) -> list:
    """Orthonormal basis of the center: group algebra ∩ commutant."""
    alg = rep.algebra_basis()
    com = commutant_basis(rep, tol)
    A = np.array([_vec(m) for m in alg]).T     # d^2 x ka
    C = np.array([_vec(m) for m in com]).T     # d^2 x kc
    # intersection: null space of [A | -C] gives coefficient pairs (a, c)
    # with A a = C c; the common vectors A a span the intersection.
    M = np.hstack([A, -C])
    u, s, vh = np.linalg.svd(M)
    ncols = M.shape[1]
    null_mask = np.concatenate([s, np.zeros(max(0, ncols - s.size))]) <= tol
    vecs = []
    for k in range(ncols):
        if null_mask[k]:
            coef = vh[k].conj()
            vecs.append(A @ coef[: A.shape[1]])
    if not vecs:
        return []
    d = rep.dimension
    return _orthonormal_span([v.reshape(d, d) for v in vecs], tol)


@dataclass(frozen=True)
class IrrepBlock:
    label: int
    multiplicity: int      # n_J: commutant acts as Mat(n_J) ⊗ I
    dimension: int         # d_J: algebra acts as I ⊗ Mat(d_J)
    columns: np.ndarray    # d x (n_J * d_J) orthonormal columns spanning H_J


@dataclass(frozen=True)
class IrrepDecomposition:
    blocks: tuple
    basis_change: np.ndarray  # d x d unitary; columns ordered block by block

    def block_of(self, X: np.ndarray, block: IrrepBlock) -> np.ndarray:
        cols = block.columns
        return cols.conj().T @ X @ cols


def decompose_irreps(rep: UnitaryRep, cluster_tol: float = 1e-8,
                     seed: int = 0) -> IrrepDecomposition:
    """Numerically block-diagonalize the representation.

    Draws a random Hermitian commutant element, clusters its eigenvalues,
    and stitches eigenspaces into isotypic blocks with a second random
    commutant element so that in the rotated basis the group algebra acts
    as I(n_J) ⊗ Mat(d_J) and the commutant as Mat(n_J) ⊗ I(d_J).
    """
    d = rep.dimension
    rng = np.random.default_rng(seed)
    com = commutant_basis(rep)

    def random_hermitian(basis):
        coefs = rng.standard_normal(len(basis)) + 1j * rng.standard_normal(len(basis))
        m = sum(c * b for c, b in zip(coefs, basis))
        return m + m.conj().T

    H = random_hermitian(com)
    evals, evecs = np.linalg.eigh(H)
    scale = max(np.abs(evals).max(), 1.0)

    # cluster eigenvalues: each cluster is one commutant eigenspace (dim d_J)
    gap_lo = cluster_tol * scale / 100.0
    clusters = []
    start = 0
    for k in range(1, d + 1):
        gap = evals[k] - evals[k - 1] if k < d else np.inf
        if gap_lo < gap <= cluster_tol * scale:
            raise DegenerateDecompositionError(
                "degenerate decomposition; tighten tolerance or reseed")
        if gap > cluster_tol * scale:
            clusters.append(evecs[:, start:k])
            start = k

    # connect eigenspaces belonging to the same isotypic component: a second
    # commutant element maps copies onto each other (block form N ⊗ I).
    C2 = random_hermitian(com)
    m = len(clusters)
    adj = np.zeros((m, m), dtype=bool)
    for i in range(m):
        for j in range(m):
            ov = np.linalg.norm(clusters[i].conj().T @ C2 @ clusters[j])
            adj[i, j] = ov > 1e-8 * max(np.linalg.norm(C2), 1.0)

    # connected components
    comp_of = [-1] * m
    comps = []
    for i in range(m):
        if comp_of[i] >= 0:
            continue
        stack, comp = [i], []
        while stack:
            v = stack.pop()
            if comp_of[v] >= 0:
                continue
            comp_of[v] = len(comps)
            comp.append(v)
            stack.extend(w for w in range(m) if (adj[v, w] or adj[w, v]) and comp_of[w] < 0)
        comps.append(sorted(comp))

    raw_blocks = []
    for comp in comps:
        dims = {clusters[i].shape[1] for i in comp}
        if len(dims) != 1:
            raise DegenerateDecompositionError(
                "degenerate decomposition; tighten tolerance or reseed")
        d_J = dims.pop()
        n_J = len(comp)
        ref = clusters[comp[0]]
        cols = [ref]
        for i in comp[1:]:
            # a commutant element restricted between copies is a scalar times
            # the canonical identification, so images of the reference basis
            # stay orthogonal; normalizing columns keeps the factor alignment
            # (the common phase is absorbed into the multiplicity factor).
            img = clusters[i] @ (clusters[i].conj().T @ C2 @ ref)
            norms = np.linalg.norm(img, axis=0)
            if norms.min() <= 1e-10 * max(norms.max(), 1.0):
                raise DegenerateDecompositionError(
                    "degenerate decomposition; tighten tolerance or reseed")
            cols.append(img / norms)
        raw_blocks.append((n_J, d_J, np.hstack(cols)))

    raw_blocks.sort(key=lambda b: (-b[1], -b[0]))
    blocks = []
    columns = []
    for label, (n_J, d_J, cols) in enumerate(raw_blocks):
        blocks.append(IrrepBlock(label=label, multiplicity=n_J,
                                 dimension=d_J, columns=cols))
        columns.append(cols)
    basis_change = np.hstack(columns)
    return IrrepDecomposition(blocks=tuple(blocks), basis_change=basis_change)


def quotient_check(rep: UnitaryRep, normal_subgroup, X: np.ndarray,
                   tol: float = 1e-9) -> bool:
    """Check pi over G equals pi over a transversal of G/G0 on a
    G0-invariant operator X."""
    X = np.asarray(X, dtype=complex)
    group = rep.group
    sub = sorted(set(normal_subgroup))
    if not group.is_normal(sub):
        raise NotNormalSubgroupError("not a normal subgroup")
    for h in sub:
        g = rep.matrices[h]
        if np.linalg.norm(g @ X - X @ g) > tol * max(np.linalg.norm(X), 1.0):
            raise ValueError("operator is not invariant under the subgroup")
    full = pi_G(rep, X)
    reps_idx = group.coset_transversal(sub)
    partial = np.zeros_like(full)
    for t in reps_idx:
        g = rep.matrices[t]
        partial += g.conj().T @ X @ g
    partial /= len(reps_idx)
    return np.linalg.norm(full - partial) <= tol * max(np.linalg.norm(X), 1.0)
