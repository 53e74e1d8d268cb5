"""Compact matrix groups described by explicit Lie algebra bases.

A group is a :class:`GroupSpec`: ambient matrix size, a basis of the Lie
algebra (as ``n x n`` matrices), and one representative per connected
component, identity first.  Finite groups carry an empty algebra basis and
list every element as a component representative.

The catalog covers SO(2), O(2), SO(3), O(3), k-tori embedded as
block-diagonal rotations, and the finite cyclic/dihedral subgroups of
O(2).  On all of these the bilinear form ``<xi, eta> = -1/2 trace(xi eta)``
is symmetric, positive definite, and exactly Ad-invariant, so it is used
as the inner product on the algebra throughout.

Group elements are plain ``(n, n)`` numpy arrays; algebra elements are
coordinate vectors in ``algebra_basis``, wrapped in :class:`AlgebraVector`.
All operations are pure functions of immutable inputs.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg

from .errors import (
    ClosureViolationError,
    DimensionMismatchError,
    EquivarianceFailureError,
    InvalidInputError,
    InvalidSplittingError,
    MembershipError,
)

J2 = np.array([[0.0, -1.0], [1.0, 0.0]])


def so3_generators():
    """Rotation generators L1, L2, L3 about the coordinate axes."""
    L1 = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]])
    L2 = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [-1.0, 0.0, 0.0]])
    L3 = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
    return np.stack([L1, L2, L3])


def hat(w):
    """3-vector to antisymmetric matrix, ``hat(w) @ q = w x q``."""
    w = np.asarray(w, dtype=float)
    return np.array([[0.0, -w[2], w[1]], [w[2], 0.0, -w[0]], [-w[1], w[0], 0.0]])


def _rodrigues(W):
    w = np.array([W[2, 1], W[0, 2], W[1, 0]])
    theta = float(np.linalg.norm(w))
    W2 = W @ W
    if theta < 1e-8:
        return np.eye(3) + W + 0.5 * W2
    return np.eye(3) + (math.sin(theta) / theta) * W + ((1.0 - math.cos(theta)) / theta**2) * W2


@dataclass
class GroupSpec:
    """A compact matrix group given by algebra basis and component representatives."""

    name: str
    ambient_dim: int
    algebra_basis: np.ndarray      # (k, n, n); k = 0 for finite groups
    component_reps: np.ndarray     # (c, n, n); identity first
    membership_tol: float = 1e-9
    family: str = "orthogonal"     # "orthogonal" | "torus" | "finite"
    unit_det: bool = False         # True restricts to det = +1

    def __post_init__(self):
        n = self.ambient_dim
        self.algebra_basis = np.asarray(self.algebra_basis, dtype=float).reshape(-1, n, n)
        self.component_reps = np.asarray(self.component_reps, dtype=float).reshape(-1, n, n)

    # -- basic structure ---------------------------------------------------

    @property
    def dim(self) -> int:
        return self.algebra_basis.shape[0]

    @property
    def identity(self) -> np.ndarray:
        return np.eye(self.ambient_dim)

    @cached_property
    def gram(self) -> np.ndarray:
        """Gram matrix of the Ad-invariant inner product in ``algebra_basis``."""
        B = self.algebra_basis
        if self.dim == 0:
            return np.zeros((0, 0))
        return -0.5 * np.einsum("iab,jba->ij", B, B)

    @cached_property
    def _basis_flat(self) -> np.ndarray:
        return self.algebra_basis.reshape(self.dim, -1).T  # (n^2, k)

    def algebra_matrix(self, coords) -> np.ndarray:
        coords = np.asarray(coords, dtype=float)
        if coords.shape != (self.dim,):
            raise DimensionMismatchError(
                f"expected {self.dim} algebra coordinates, got shape {coords.shape}")
        if self.dim == 0:
            return np.zeros((self.ambient_dim, self.ambient_dim))
        return np.tensordot(coords, self.algebra_basis, axes=1)

    def algebra_coords(self, mat, *, tol=1e-8) -> np.ndarray:
        """Re-express an ambient matrix in ``algebra_basis`` by least squares.

        Raises :class:`ClosureViolationError` when the residual exceeds
        ``tol`` relative to the matrix size: that signals the matrix does
        not actually lie in the algebra (wrong group data).
        """
        mat = np.asarray(mat, dtype=float)
        scale = max(1.0, float(np.linalg.norm(mat)))
        if self.dim == 0:
            if np.linalg.norm(mat) > tol * scale:
                raise ClosureViolationError(
                    "nonzero matrix cannot be expressed in an empty algebra basis")
            return np.zeros(0)
        coords, *_ = np.linalg.lstsq(self._basis_flat, mat.reshape(-1), rcond=None)
        residual = float(np.linalg.norm(self._basis_flat @ coords - mat.reshape(-1)))
        if residual > tol * scale:
            raise ClosureViolationError(
                f"matrix is not in the span of the algebra basis "
                f"(residual {residual:.2e} > {tol:.1e})")
        return coords

    def inner(self, c1, c2) -> float:
        return float(np.asarray(c1) @ self.gram @ np.asarray(c2))

    def norm(self, coords) -> float:
        return math.sqrt(max(self.inner(coords, coords), 0.0))

    def bracket(self, c1, c2) -> np.ndarray:
        """Coordinates of the commutator [xi, eta] = xi eta - eta xi."""
        a = self.algebra_matrix(c1)
        b = self.algebra_matrix(c2)
        return self.algebra_coords(a @ b - b @ a, tol=1e-8)

    # -- membership --------------------------------------------------------

    def membership_residual(self, g) -> float:
        g = np.asarray(g, dtype=float)
        if g.shape != (self.ambient_dim, self.ambient_dim):
            raise DimensionMismatchError(
                f"group element must be {self.ambient_dim}x{self.ambient_dim}, got {g.shape}")
        if self.family == "finite":
            return float(min(np.max(np.abs(g - e)) for e in self.component_reps))
        ortho = float(np.max(np.abs(g.T @ g - np.eye(self.ambient_dim))))
        det = float(np.linalg.det(g))
        det_res = abs(det - 1.0) if self.unit_det else abs(abs(det) - 1.0)
        res = max(ortho, det_res)
        if self.family == "torus":
            # torus elements are exactly the orthogonal matrices commuting
            # with every block generator
            for B in self.algebra_basis:
                res = max(res, float(np.max(np.abs(g @ B - B @ g))))
        return res

    def is_member(self, g, *, tol=None) -> bool:
        tol = self.membership_tol if tol is None else tol
        return self.membership_residual(g) <= tol

    def require_member(self, g, *, tol=None, what="group element"):
        tol = self.membership_tol if tol is None else tol
        res = self.membership_residual(g)
        if res > tol:
            raise MembershipError(
                f"{what} fails the {self.name} membership test "
                f"(residual {res:.2e} > {tol:.1e})")

    # -- exponential and adjoint -------------------------------------------

    def exp(self, coords, t: float = 1.0) -> np.ndarray:
        """Group exponential of ``t * sum_i coords[i] basis[i]``.

        Uses closed forms where available (planar rotations, Rodrigues for
        ambient dimension 3, blockwise rotations for tori) and Pade
        scaling-and-squaring otherwise.  ``exp(0) = I`` exactly.
        """
        coords = np.asarray(coords, dtype=float)
        if not np.all(np.isfinite(coords)) or not np.isfinite(t):
            raise InvalidInputError("non-finite entries in exponential input")
        if self.dim == 0 or not np.any(coords) or t == 0.0:
            return self.identity
        M = self.algebra_matrix(t * coords)
        n = self.ambient_dim
        if self.family == "torus":
            out = np.eye(n)
            for b in range(n // 2):
                theta = M[2 * b + 1, 2 * b]
                c, s = math.cos(theta), math.sin(theta)
                out[2 * b: 2 * b + 2, 2 * b: 2 * b + 2] = [[c, -s], [s, c]]
            return out
        if n == 2 and abs(M[0, 0]) < 1e-14 and abs(M[1, 1]) < 1e-14:
            theta = M[1, 0]
            c, s = math.cos(theta), math.sin(theta)
            return np.array([[c, -s], [s, c]])
        if n == 3 and np.max(np.abs(M + M.T)) < 1e-12:
            return _rodrigues(M)
        return scipy.linalg.expm(M)

    def adjoint_matrix(self, g) -> np.ndarray:
        """Matrix of Ad(g) on algebra coordinates: columns are coords of g b_i g^-1."""
        g = np.asarray(g, dtype=float)
        if self.dim == 0:
            return np.zeros((0, 0))
        g_inv = np.linalg.inv(g)
        cols = [self.algebra_coords(g @ B @ g_inv) for B in self.algebra_basis]
        return np.column_stack(cols)

    # -- validation ---------------------------------------------------------

    def validate(self):
        """Check the structural invariants; raises on failure."""
        n = self.ambient_dim
        if not np.allclose(self.component_reps[0], np.eye(n), atol=1e-12):
            raise InvalidInputError("first component representative must be the identity")
        if self.family in ("orthogonal", "torus"):
            for B in self.algebra_basis:
                if np.max(np.abs(B + B.T)) > 1e-12:
                    raise InvalidInputError(
                        f"algebra basis element of {self.name} is not antisymmetric")
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                a, b = self.algebra_basis[i], self.algebra_basis[j]
                try:
                    self.algebra_coords(a @ b - b @ a, tol=1e-10)
                except ClosureViolationError as exc:
                    raise ClosureViolationError(
                        f"bracket of basis elements {i},{j} of {self.name} "
                        f"leaves the algebra span: {exc}") from exc
        for c in self.component_reps:
            self.require_member(c, what="component representative")
        if self.dim > 0:
            eigs = np.linalg.eigvalsh(self.gram)
            if eigs.min() <= 0:
                raise InvalidInputError(
                    f"inner product of {self.name} is not positive definite")


@dataclass
class AlgebraVector:
    """An element of the Lie algebra, as coordinates in the group's basis."""

    group: GroupSpec
    coords: np.ndarray

    def __post_init__(self):
        self.coords = np.asarray(self.coords, dtype=float).reshape(-1)
        if self.coords.shape[0] != self.group.dim:
            raise DimensionMismatchError(
                f"expected {self.group.dim} coordinates for {self.group.name}, "
                f"got {self.coords.shape[0]}")

    @property
    def matrix(self) -> np.ndarray:
        return self.group.algebra_matrix(self.coords)

    def norm(self) -> float:
        return self.group.norm(self.coords)

    def __add__(self, other):
        self._check(other)
        return AlgebraVector(self.group, self.coords + other.coords)

    def __sub__(self, other):
        self._check(other)
        return AlgebraVector(self.group, self.coords - other.coords)

    def __neg__(self):
        return AlgebraVector(self.group, -self.coords)

    def __mul__(self, scalar):
        return AlgebraVector(self.group, float(scalar) * self.coords)

    __rmul__ = __mul__

    def _check(self, other):
        if other.group is not self.group and other.group.name != self.group.name:
            raise DimensionMismatchError("algebra vectors belong to different groups")


def exp_map(xi: AlgebraVector, t: float = 1.0) -> np.ndarray:
    """Group exponential ``exp(t xi)`` as an ambient matrix."""
    return xi.group.exp(xi.coords, t)


def adjoint(g, xi: AlgebraVector) -> AlgebraVector:
    """Adjoint action ``Ad(g) xi``, re-expressed in the algebra basis."""
    group = xi.group
    group.require_member(g, tol=max(group.membership_tol, 1e-8))
    g = np.asarray(g, dtype=float)
    if group.dim == 0:
        return AlgebraVector(group, np.zeros(0))
    conj = g @ xi.matrix @ np.linalg.inv(g)
    return AlgebraVector(group, group.algebra_coords(conj))


def invariant_inner_product(xi: AlgebraVector, eta: AlgebraVector) -> float:
    """The Ad-invariant inner product ``-1/2 trace(xi eta)`` on the algebra."""
    xi._check(eta)
    return xi.group.inner(xi.coords, eta.coords)


# -- subspaces of the algebra ------------------------------------------------

def _coords_rows(group, vectors) -> np.ndarray:
    """Normalize a sequence of AlgebraVector (or raw coords) to a rows matrix."""
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        rows = vectors.astype(float)
    else:
        rows = np.array(
            [v.coords if isinstance(v, AlgebraVector) else np.asarray(v, float)
             for v in vectors], dtype=float).reshape(-1, group.dim)
    if rows.shape[1] != group.dim:
        raise DimensionMismatchError(
            f"coordinate rows must have length {group.dim}")
    return rows


def metric_orthonormalize(rows, gram, *, tol=1e-10):
    """Gram-Schmidt rows under the metric ``gram``; raises if dependent."""
    rows = np.asarray(rows, dtype=float)
    out = []
    for row in rows:
        v = row.copy()
        for u in out:
            v = v - (u @ gram @ v) * u
        nrm = math.sqrt(max(float(v @ gram @ v), 0.0))
        if nrm <= tol:
            raise InvalidInputError("vectors are linearly dependent")
        out.append(v / nrm)
    return np.array(out).reshape(-1, rows.shape[1] if rows.size else gram.shape[0])


def subspace_distance(rows1, rows2, gram) -> float:
    """Operator-norm distance between orthogonal projectors onto two spans."""
    if len(rows1) == 0 and len(rows2) == 0:
        return 0.0
    if len(rows1) != len(rows2):
        return 1.0
    W = scipy.linalg.sqrtm(gram).real
    p1 = _projector(W @ np.asarray(rows1).T)
    p2 = _projector(W @ np.asarray(rows2).T)
    return float(np.linalg.norm(p1 - p2, 2))


def _projector(cols):
    q, _ = np.linalg.qr(cols)
    return q @ q.T


@dataclass
class Splitting:
    """An H-equivariant decomposition g = h (+) m of the Lie algebra.

    ``h_coords`` and ``m_coords`` hold basis coordinates as rows.  The
    usual construction takes m as the orthogonal complement of h under
    the invariant inner product; explicitly supplied complements (graphs
    over the orthogonal one) are allowed and flagged ``orthogonal=False``.
    """

    group: GroupSpec
    h_coords: np.ndarray
    m_coords: np.ndarray
    orthogonal: bool = True

    def __post_init__(self):
        k = self.group.dim
        if k:
            self.h_coords = np.asarray(self.h_coords, dtype=float).reshape(-1, k)
            self.m_coords = np.asarray(self.m_coords, dtype=float).reshape(-1, k)
        else:
            self.h_coords = np.zeros((0, 0))
            self.m_coords = np.zeros((0, 0))

    @property
    def h_basis(self):
        return [AlgebraVector(self.group, c) for c in self.h_coords]

    @property
    def m_basis(self):
        return [AlgebraVector(self.group, c) for c in self.m_coords]

    @property
    def dim_h(self) -> int:
        return self.h_coords.shape[0]

    @property
    def dim_m(self) -> int:
        return self.m_coords.shape[0]

    def inner_product(self, xi, eta) -> float:
        return invariant_inner_product(xi, eta)

    def full_rows(self) -> np.ndarray:
        return np.vstack([self.h_coords, self.m_coords])

    def project(self, coords):
        """Decompose algebra coordinates into (h-part, m-part) coefficient vectors."""
        coords = np.asarray(coords, dtype=float)
        full = self.full_rows()
        sol, *_ = np.linalg.lstsq(full.T, coords, rcond=None)
        res = float(np.linalg.norm(full.T @ sol - coords))
        if res > 1e-8 * max(1.0, float(np.linalg.norm(coords))):
            raise InvalidSplittingError(
                f"coordinates do not decompose in h (+) m (residual {res:.2e})")
        return sol[: self.dim_h], sol[self.dim_h:]

    def validate(self, stabilizer_gens=()):
        k = self.group.dim
        full = self.full_rows()
        if full.shape[0] != k:
            raise InvalidSplittingError(
                f"h (+) m has dimension {full.shape[0]}, expected {k}")
        if k and np.linalg.matrix_rank(full, tol=1e-10) != k:
            raise InvalidSplittingError("h and m together do not span the algebra")
        if self.orthogonal and self.dim_h and self.dim_m:
            cross = self.h_coords @ self.group.gram @ self.m_coords.T
            if np.max(np.abs(cross)) > 1e-12:
                raise InvalidSplittingError("h and m are not orthogonal")
        for g in stabilizer_gens:
            ad = self.group.adjoint_matrix(g)
            for rows, label in ((self.h_coords, "h"), (self.m_coords, "m")):
                if rows.shape[0] == 0:
                    continue
                moved = rows @ ad.T
                if subspace_distance(moved, rows, self.group.gram) > 1e-10:
                    raise EquivarianceFailureError(
                        f"Ad of a stabilizer generator does not preserve {label}")


def equivariant_splitting(group: GroupSpec, h_basis, stabilizer_gens=()) -> Splitting:
    """Complete a stabilizer algebra h to g = h (+) m by orthogonal complement.

    ``m`` is the orthogonal complement of ``h`` under the invariant inner
    product, which is automatically Ad(H)-stable; the stability of both
    summands is still verified against ``stabilizer_gens``.
    """
    k = group.dim
    h_rows = _coords_rows(group, h_basis) if len(h_basis) else np.zeros((0, k))
    if h_rows.shape[0]:
        h_on = metric_orthonormalize(h_rows, group.gram)
    else:
        h_on = np.zeros((0, k))
    if h_on.shape[0] == k:
        m_on = np.zeros((0, k))
    elif h_on.shape[0] == 0:
        m_on = metric_orthonormalize(np.eye(k), group.gram) if k else np.zeros((0, 0))
    else:
        # null space of c -> <h_i, c>
        _, s, vt = np.linalg.svd(h_on @ group.gram)
        rank = int(np.sum(s > 1e-12))
        m_on = metric_orthonormalize(vt[rank:], group.gram)
    splitting = Splitting(group, h_on, m_on, orthogonal=True)
    splitting.validate(stabilizer_gens)
    return splitting


def splitting_from_bases(group: GroupSpec, h_basis, m_basis, stabilizer_gens=()) -> Splitting:
    """Build a splitting from an explicit (possibly non-orthogonal) complement."""
    h_rows = _coords_rows(group, h_basis) if len(h_basis) else np.zeros((0, group.dim))
    m_rows = _coords_rows(group, m_basis) if len(m_basis) else np.zeros((0, group.dim))
    splitting = Splitting(group, h_rows, m_rows, orthogonal=False)
    splitting.validate(stabilizer_gens)
    return splitting


# -- catalog -----------------------------------------------------------------

def _rotation2(theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def so2() -> GroupSpec:
    return GroupSpec("SO2", 2, [J2], [np.eye(2)], family="orthogonal", unit_det=True)


def o2() -> GroupSpec:
    return GroupSpec("O2", 2, [J2], [np.eye(2), np.diag([1.0, -1.0])],
                     family="orthogonal")


def so3() -> GroupSpec:
    return GroupSpec("SO3", 3, so3_generators(), [np.eye(3)],
                     family="orthogonal", unit_det=True)


def o3() -> GroupSpec:
    return GroupSpec("O3", 3, so3_generators(), [np.eye(3), -np.eye(3)],
                     family="orthogonal")


def torus(k: int) -> GroupSpec:
    """The k-torus as block-diagonal planar rotations in R^(2k)."""
    if k < 1:
        raise InvalidInputError("torus rank must be >= 1")
    n = 2 * k
    basis = np.zeros((k, n, n))
    for b in range(k):
        basis[b, 2 * b: 2 * b + 2, 2 * b: 2 * b + 2] = J2
    return GroupSpec(f"T{k}", n, basis, [np.eye(n)], family="torus", unit_det=True)


def cyclic(order: int) -> GroupSpec:
    """Z/order as rotations of the plane; all elements listed."""
    if order < 1:
        raise InvalidInputError("cyclic order must be >= 1")
    elems = [_rotation2(2.0 * math.pi * j / order) for j in range(order)]
    return GroupSpec(f"Zn:{order}", 2, np.zeros((0, 2, 2)), elems, family="finite")


def dihedral(order: int) -> GroupSpec:
    """Dihedral group of order 2*order: plane rotations and reflections."""
    if order < 1:
        raise InvalidInputError("dihedral order must be >= 1")
    refl = np.diag([1.0, -1.0])
    elems = [_rotation2(2.0 * math.pi * j / order) for j in range(order)]
    elems += [e @ refl for e in elems]
    return GroupSpec(f"Dn:{order}", 2, np.zeros((0, 2, 2)), elems, family="finite")


_FIXED_CATALOG = {"SO2": so2, "O2": o2, "SO3": so3, "O3": o3}


def group_from_name(name: str) -> GroupSpec:
    """Resolve a catalog name: SO2, O2, SO3, O3, T<k>, Zn:<k>, Dn:<k>."""
    key = name.strip()
    if key in _FIXED_CATALOG:
        return _FIXED_CATALOG[key]()
    m = re.fullmatch(r"T(\d+)", key)
    if m:
        return torus(int(m.group(1)))
    m = re.fullmatch(r"Zn:(\d+)", key)
    if m:
        return cyclic(int(m.group(1)))
    m = re.fullmatch(r"Dn:(\d+)", key)
    if m:
        return dihedral(int(m.group(1)))
    raise InvalidInputError(f"unknown group name {name!r}")


def catalog_names():
    return ["SO2", "O2", "SO3", "O3", "T2", "T3", "Zn:<k>", "Dn:<k>"]


def subgroup_spec(parent: GroupSpec, name: str, algebra_rows, component_gens) -> GroupSpec:
    """A closed subgroup of ``parent`` as its own GroupSpec.

    ``algebra_rows`` are coordinates in the parent's basis; component
    generators are ambient matrices.  Used for stabilizer subgroups.
    """
    algebra_rows = np.asarray(algebra_rows, dtype=float)
    algebra_rows = algebra_rows.reshape(-1, parent.dim) if parent.dim else np.zeros((0, 0))
    mats = np.array([parent.algebra_matrix(c) for c in algebra_rows]).reshape(
        -1, parent.ambient_dim, parent.ambient_dim)
    comps = list(component_gens) if len(component_gens) else [parent.identity]
    if not np.allclose(comps[0], parent.identity, atol=1e-12):
        comps = [parent.identity] + [c for c in comps
                                     if np.max(np.abs(c - parent.identity)) > 1e-12]
    family = "finite" if algebra_rows.shape[0] == 0 else parent.family
    if family == "torus" and algebra_rows.shape[0] != parent.dim:
        family = "orthogonal"  # proper subtorus: block test no longer applies
    return GroupSpec(name, parent.ambient_dim, mats, np.array(comps),
                     membership_tol=parent.membership_tol, family=family,
                     unit_det=False)
