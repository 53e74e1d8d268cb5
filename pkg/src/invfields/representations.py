"""Linear group actions, invariant vector fields, and algebra-valued maps.

A :class:`Representation` bundles a group with a matrix action handle
``rho`` and the algebra representation ``delta_rho`` evaluated on the
algebra basis.  Vector fields and equivariant maps are evaluation handles
with declared symmetry contracts; the contracts are *checked by sampling*
(:func:`check_invariance`, :func:`check_equivariance`), never assumed.

Sign convention for induced fields: with ``xi_V(v) = delta_rho(xi) v``,
the commutator of vector fields satisfies ``[xi_V, eta_V] = -([xi,eta])_V``
(the induced map on fields is an anti-homomorphism for left actions).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg

from .errors import (
    ContractViolationError,
    DimensionMismatchError,
    InvalidInputError,
)
from .groups import AlgebraVector, GroupSpec, hat

Point = np.ndarray


@dataclass
class Representation:
    """A linear action rho: G -> GL(V) with its algebra representation."""

    group: GroupSpec
    dim_V: int
    rho: Callable[[np.ndarray], np.ndarray]
    delta_rho_basis: np.ndarray      # (k, N, N)
    kind: str = "standard"
    # contiguous coordinate blocks of V; pairwise inner products of block
    # components are invariant only when every block carries the same matrix
    blocks: tuple = ()
    shared_blocks: bool = True

    def __post_init__(self):
        self.delta_rho_basis = np.asarray(self.delta_rho_basis, dtype=float).reshape(
            -1, self.dim_V, self.dim_V)
        if self.delta_rho_basis.shape[0] != self.group.dim:
            raise DimensionMismatchError(
                "delta_rho_basis length must match the algebra dimension")
        if not self.blocks:
            self.blocks = ((0, self.dim_V),)

    def act(self, g, v) -> np.ndarray:
        return np.asarray(self.rho(np.asarray(g, dtype=float)), dtype=float) @ np.asarray(v, dtype=float)

    def delta_rho(self, coords) -> np.ndarray:
        coords = np.asarray(coords, dtype=float)
        if coords.shape != (self.group.dim,):
            raise DimensionMismatchError(
                f"expected {self.group.dim} algebra coordinates, got {coords.shape}")
        if self.group.dim == 0:
            return np.zeros((self.dim_V, self.dim_V))
        return np.tensordot(coords, self.delta_rho_basis, axes=1)

    def rho_tangent(self, g, dg) -> np.ndarray:
        """Derivative of rho at g applied to an ambient tangent matrix dg."""
        if self.kind in ("standard",):
            return np.asarray(dg, dtype=float)
        if self.kind == "double":
            return scipy.linalg.block_diag(dg, dg)
        if self.kind == "sign_line":
            return np.array([[float(np.asarray(dg)[0, 0])]])
        # generic fallback: directional finite difference along g + t*dg
        eps = 1e-6
        rp = np.asarray(self.rho(np.asarray(g) + eps * np.asarray(dg)), dtype=float)
        rm = np.asarray(self.rho(np.asarray(g) - eps * np.asarray(dg)), dtype=float)
        return (rp - rm) / (2.0 * eps)

    def compatible(self, other: "Representation") -> bool:
        return (self is other) or (
            self.group.name == other.group.name
            and self.dim_V == other.dim_V
            and self.kind == other.kind)

    def require_compatible(self, other: "Representation"):
        if not self.compatible(other):
            raise DimensionMismatchError(
                f"representations do not match: {self.group.name}/{self.kind}/{self.dim_V} "
                f"vs {other.group.name}/{other.kind}/{other.dim_V}")

    def validate(self, *, seed=0, n_samples=8):
        """Sampled homomorphism / derivative / bracket checks; raises on failure."""
        rng = np.random.default_rng(seed)
        gs = sample_group_elements(self.group, rng, n_samples)
        ident = np.asarray(self.rho(self.group.identity), dtype=float)
        if np.max(np.abs(ident - np.eye(self.dim_V))) > 1e-12:
            raise ContractViolationError("rho(I) != I")
        for i in range(len(gs) - 1):
            a, b = gs[i], gs[i + 1]
            res = np.max(np.abs(np.asarray(self.rho(a @ b)) -
                                np.asarray(self.rho(a)) @ np.asarray(self.rho(b))))
            if res > 1e-10:
                raise ContractViolationError(f"rho is not a homomorphism (residual {res:.2e})")
        t = 1e-5
        for i in range(self.group.dim):
            coords = np.zeros(self.group.dim)
            coords[i] = 1.0
            fd = (np.asarray(self.rho(self.group.exp(coords, t))) -
                  np.asarray(self.rho(self.group.exp(coords, -t)))) / (2.0 * t)
            if np.max(np.abs(fd - self.delta_rho_basis[i])) > 1e-6:
                raise ContractViolationError(
                    f"delta_rho_basis[{i}] does not match d/dt rho(exp(t xi))")
        for i in range(self.group.dim):
            for j in range(i + 1, self.group.dim):
                ci = np.zeros(self.group.dim); ci[i] = 1.0
                cj = np.zeros(self.group.dim); cj[j] = 1.0
                lhs = self.delta_rho(self.group.bracket(ci, cj))
                di, dj = self.delta_rho_basis[i], self.delta_rho_basis[j]
                if np.max(np.abs(lhs - (di @ dj - dj @ di))) > 1e-10:
                    raise ContractViolationError(
                        f"delta_rho does not respect the bracket on basis pair {i},{j}")


# -- built-in representations -------------------------------------------------

def standard_rep(group: GroupSpec) -> Representation:
    """The defining action on R^n (blocks per rotation plane for tori)."""
    if group.family == "torus":
        blocks = tuple((2 * b, 2 * b + 2) for b in range(group.ambient_dim // 2))
        shared = group.dim == 1
    else:
        blocks = ((0, group.ambient_dim),)
        shared = True
    return Representation(group, group.ambient_dim, lambda g: np.asarray(g, dtype=float),
                          group.algebra_basis.copy(), "standard", blocks, shared)


def double_rep(group: GroupSpec) -> Representation:
    """The diagonal action on V (+) V, e.g. positions and velocities."""
    n = group.ambient_dim
    delta = np.array([scipy.linalg.block_diag(B, B) for B in group.algebra_basis]).reshape(
        -1, 2 * n, 2 * n)
    return Representation(group, 2 * n, lambda g: scipy.linalg.block_diag(g, g),
                          delta, "double", ((0, n), (n, 2 * n)), True)


def sign_line_rep(group: GroupSpec) -> Representation:
    """The sign action of {+I, -I} on the real line."""
    if group.dim != 0 or len(group.component_reps) != 2:
        raise InvalidInputError("sign_line requires a two-element group {+I, -I}")
    return Representation(group, 1, lambda g: np.array([[float(np.asarray(g)[0, 0])]]),
                          np.zeros((0, 1, 1)), "sign_line", ((0, 1),), True)


def rep_from_spec(group: GroupSpec, spec) -> Representation:
    if isinstance(spec, str):
        spec = {"kind": spec}
    kind = spec.get("kind", "standard")
    if kind == "standard":
        return standard_rep(group)
    if kind == "double":
        return double_rep(group)
    if kind == "sign_line":
        return sign_line_rep(group)
    raise InvalidInputError(f"unknown representation kind {kind!r}")


def act(rep: Representation, g, v) -> np.ndarray:
    """Apply a group element to a point of V."""
    v = np.asarray(v, dtype=float)
    if v.shape != (rep.dim_V,):
        raise DimensionMismatchError(f"point must have dimension {rep.dim_V}")
    return rep.act(g, v)


# -- fields and maps ----------------------------------------------------------

@dataclass
class VectorField:
    """A vector field on V given by an evaluation handle."""

    rep: Representation
    func: Callable[[Point], Point]
    kind: dict = field(default_factory=dict)

    def __call__(self, v) -> np.ndarray:
        return np.asarray(self.func(np.asarray(v, dtype=float)), dtype=float)

    def __add__(self, other: "VectorField") -> "VectorField":
        self.rep.require_compatible(other.rep)
        return VectorField(self.rep, lambda v: self(v) + other(v),
                           {"kind": "sum", "terms": [self.kind, other.kind]})

    def __sub__(self, other: "VectorField") -> "VectorField":
        return self + (-1.0) * other

    def __mul__(self, scalar):
        s = float(scalar)
        return VectorField(self.rep, lambda v: s * self(v),
                           {"kind": "scaled", "scale": s, "of": self.kind})

    __rmul__ = __mul__


@dataclass
class EquivariantMap:
    """A map V -> g given by an evaluation handle returning algebra coordinates."""

    rep: Representation
    func: Callable[[Point], np.ndarray]
    kind: dict = field(default_factory=dict)

    def __call__(self, v) -> np.ndarray:
        out = np.asarray(self.func(np.asarray(v, dtype=float)), dtype=float).reshape(-1)
        if out.shape[0] != self.rep.group.dim:
            raise DimensionMismatchError(
                f"map must return {self.rep.group.dim} algebra coordinates")
        return out

    def algebra_value(self, v) -> AlgebraVector:
        return AlgebraVector(self.rep.group, self(v))

    def __add__(self, other: "EquivariantMap") -> "EquivariantMap":
        self.rep.require_compatible(other.rep)
        return EquivariantMap(self.rep, lambda v: self(v) + other(v),
                              {"kind": "sum", "terms": [self.kind, other.kind]})

    def __mul__(self, scalar):
        s = float(scalar)
        return EquivariantMap(self.rep, lambda v: s * self(v),
                              {"kind": "scaled", "scale": s, "of": self.kind})

    __rmul__ = __mul__

    def __neg__(self):
        return (-1.0) * self


def linear_field(rep: Representation, matrix) -> VectorField:
    A = np.asarray(matrix, dtype=float)
    if A.shape != (rep.dim_V, rep.dim_V):
        raise DimensionMismatchError(f"matrix must be {rep.dim_V}x{rep.dim_V}")
    return VectorField(rep, lambda v: A @ v, {"kind": "linear", "matrix": A.tolist()})


def polynomial_field(rep: Representation, coeffs: dict) -> VectorField:
    """Dense polynomial field: ``coeffs[d]`` has shape (N,) + (N,)*d.

    Evaluation is coefficient contraction: component i of the degree-d term
    is ``sum coeffs[d][i, j1..jd] v_j1 ... v_jd``.  Degrees up to 4.
    """
    tensors = {}
    for deg, tensor in coeffs.items():
        deg = int(deg)
        if deg < 0 or deg > 4:
            raise InvalidInputError("polynomial fields support degrees 0..4")
        arr = np.asarray(tensor, dtype=float)
        expected = (rep.dim_V,) * (deg + 1)
        if arr.shape != expected:
            raise DimensionMismatchError(
                f"degree-{deg} tensor must have shape {expected}, got {arr.shape}")
        tensors[deg] = arr

    def evaluate(v):
        out = np.zeros(rep.dim_V)
        for deg, arr in tensors.items():
            term = arr
            for _ in range(deg):
                term = term @ v
            out = out + term
        return out

    jsonable = {str(d): t.tolist() for d, t in tensors.items()}
    return VectorField(rep, evaluate, {"kind": "polynomial", "coeffs": jsonable})


def central_force_field(rep: Representation, k=1.0, p=3.0, mass=1.0) -> VectorField:
    """Mechanical field X(q, v) = (v, F(q)/mass) with F = -k q |q|^(-p).

    The force is equivariant, F(Aq) = A F(q), which is exactly what makes
    X an invariant field for the diagonal action on positions+velocities.
    ``p = 3`` is the inverse-square force, ``p = 0`` the harmonic one.
    """
    if rep.kind != "double":
        raise InvalidInputError("central_force requires the double representation")
    n = rep.dim_V // 2
    k, p, mass = float(k), float(p), float(mass)

    def evaluate(w):
        q, v = w[:n], w[n:]
        r = float(np.linalg.norm(q))
        if p != 0.0 and r < 1e-12:
            raise InvalidInputError("central force evaluated at the collision q = 0")
        force = -k * q if p == 0.0 else -k * q * r ** (-p)
        return np.concatenate([v, force / mass])

    return VectorField(rep, evaluate,
                       {"kind": "central_force", "k": k, "p": p, "mass": mass})


def hopf_field(rep: Representation, mu, omega, lam_re, lam_im) -> VectorField:
    """Two-mode field on R^4 = C^2: Hopf normal form on mode 1, linear mode 2.

    X(z1, z2) = ((mu (1 - |z1|^2) + i omega) z1, (lam_re + i lam_im) z2)
    in complex notation; invariant under independent rotations of the modes.
    """
    if rep.dim_V != 4:
        raise InvalidInputError("hopf field requires a 4-dimensional representation")
    mu, omega = float(mu), float(omega)
    lam_re, lam_im = float(lam_re), float(lam_im)
    J = np.array([[0.0, -1.0], [1.0, 0.0]])

    def evaluate(w):
        z1, z2 = w[:2], w[2:]
        r2 = float(z1 @ z1)
        out1 = mu * (1.0 - r2) * z1 + omega * (J @ z1)
        out2 = lam_re * z2 + lam_im * (J @ z2)
        return np.concatenate([out1, out2])

    return VectorField(rep, evaluate, {"kind": "hopf", "mu": mu, "omega": omega,
                                       "lam_re": lam_re, "lam_im": lam_im})


def induced_field(rep: Representation, xi: AlgebraVector) -> VectorField:
    """The field xi_V(v) = delta_rho(xi) v induced by a fixed algebra element."""
    if xi.group.name != rep.group.name:
        raise DimensionMismatchError("algebra vector belongs to a different group")
    D = rep.delta_rho(xi.coords)
    return VectorField(rep, lambda v: D @ v,
                       {"kind": "induced", "xi": xi.coords.tolist()})


def induced_field_from_map(psi: EquivariantMap) -> VectorField:
    """The field psi_V(v) = delta_rho(psi(v)) v induced by an equivariant map."""
    rep = psi.rep
    return VectorField(rep, lambda v: rep.delta_rho(psi(v)) @ v,
                       {"kind": "induced_map", "psi": psi.kind})


def constant_map(rep: Representation, coords) -> EquivariantMap:
    coords = np.asarray(coords, dtype=float).reshape(-1)
    if coords.shape[0] != rep.group.dim:
        raise DimensionMismatchError(
            f"constant map needs {rep.group.dim} coordinates")
    return EquivariantMap(rep, lambda v: coords,
                          {"kind": "constant", "coords": coords.tolist()})


def angular_momentum_map(rep: Representation) -> EquivariantMap:
    """psi(q, v) = hat(q x v) on the double representation of SO(3)/O(3).

    Equivariance follows from A(q x v) = det(A) (Aq x Av) together with
    A hat(w) A^T = hat(det(A) A w) for A in O(3).
    """
    if rep.kind != "double" or rep.dim_V != 6:
        raise InvalidInputError("angular momentum lives on the double rep of O(3)/SO(3)")
    return EquivariantMap(rep, lambda w: np.cross(w[:3], w[3:]),
                          {"kind": "angular_momentum"})


def field_from_spec(rep: Representation, spec, *, fields=None, maps=None) -> VectorField:
    """Build a field from its JSON description; may reference earlier entries."""
    fields = fields or {}
    maps = maps or {}
    if isinstance(spec, str):
        return fields[spec]
    kind = spec["kind"]
    if kind == "linear":
        return linear_field(rep, spec["matrix"])
    if kind == "polynomial":
        return polynomial_field(rep, {int(d): np.asarray(t, dtype=float)
                                      for d, t in spec["coeffs"].items()})
    if kind == "central_force":
        return central_force_field(rep, spec.get("k", 1.0), spec.get("p", 3.0),
                                   spec.get("mass", 1.0))
    if kind == "hopf":
        return hopf_field(rep, spec["mu"], spec["omega"], spec["lam_re"], spec["lam_im"])
    if kind == "induced":
        return induced_field(rep, AlgebraVector(rep.group, spec["xi"]))
    if kind == "sum":
        total = None
        for term in spec["terms"]:
            scale = float(term.get("scale", 1.0))
            if "ref" in term:
                part = fields[term["ref"]]
            elif "map_ref" in term:
                part = induced_field_from_map(maps[term["map_ref"]])
            else:
                part = field_from_spec(rep, term["of"], fields=fields, maps=maps)
            part = scale * part
            total = part if total is None else total + part
        if total is None:
            raise InvalidInputError("sum field needs at least one term")
        total.kind = dict(spec)
        return total
    raise InvalidInputError(f"unknown field kind {kind!r}")


def map_from_spec(rep: Representation, spec, *, maps=None) -> EquivariantMap:
    maps = maps or {}
    if isinstance(spec, str):
        return maps[spec]
    kind = spec["kind"]
    if kind == "constant":
        return constant_map(rep, spec["coords"])
    if kind == "angular_momentum":
        return angular_momentum_map(rep)
    if kind == "sum":
        total = None
        for term in spec["terms"]:
            scale = float(term.get("scale", 1.0))
            part = maps[term["ref"]] if "ref" in term else map_from_spec(
                rep, term["of"], maps=maps)
            part = scale * part
            total = part if total is None else total + part
        if total is None:
            raise InvalidInputError("sum map needs at least one term")
        total.kind = dict(spec)
        return total
    raise InvalidInputError(f"unknown map kind {kind!r}")


# -- sampling and symmetry checkers -------------------------------------------

def sample_group_elements(group: GroupSpec, rng, count: int):
    """Component representatives times exponentials of random algebra vectors."""
    comps = group.component_reps
    out = []
    for i in range(count):
        comp = comps[i % len(comps)]
        if group.dim:
            coords = rng.uniform(-np.pi, np.pi, group.dim)
            out.append(comp @ group.exp(coords))
        else:
            out.append(comps[rng.integers(len(comps))])
    return out


def sample_points(rng, dim: int, count: int, radius: float = 2.0):
    """Uniform samples in the ball of the given radius."""
    direc = rng.normal(size=(count, dim))
    direc /= np.maximum(np.linalg.norm(direc, axis=1, keepdims=True), 1e-300)
    radii = radius * rng.uniform(size=(count, 1)) ** (1.0 / dim)
    return direc * radii


def check_invariance(X: VectorField, group_samples, point_samples) -> float:
    """Max over samples of ||X(g v) - rho(g) X(v)||."""
    if not len(group_samples) or not len(point_samples):
        raise InvalidInputError("invariance check needs nonempty samples")
    worst = 0.0
    for g in group_samples:
        R = np.asarray(X.rep.rho(g), dtype=float)
        for v in point_samples:
            worst = max(worst, float(np.linalg.norm(X(R @ v) - R @ X(v))))
    return worst


def check_equivariance(psi: EquivariantMap, group_samples, point_samples) -> float:
    """Max over samples of ||psi(g v) - Ad(g) psi(v)|| in the invariant norm."""
    if not len(group_samples) or not len(point_samples):
        raise InvalidInputError("equivariance check needs nonempty samples")
    group = psi.rep.group
    worst = 0.0
    for g in group_samples:
        R = np.asarray(psi.rep.rho(g), dtype=float)
        ad = group.adjoint_matrix(g)
        for v in point_samples:
            diff = psi(R @ v) - ad @ psi(v)
            worst = max(worst, group.norm(diff))
    return worst


def sampled_invariance_residual(X: VectorField, *, seed=0, n_group=12, n_points=12,
                                radius=2.0) -> float:
    rng = np.random.default_rng(seed)
    gs = sample_group_elements(X.rep.group, rng, n_group)
    pts = sample_points(rng, X.rep.dim_V, n_points, radius)
    return check_invariance(X, gs, pts)


def sampled_equivariance_residual(psi: EquivariantMap, *, seed=0, n_group=12,
                                  n_points=12, radius=2.0) -> float:
    rng = np.random.default_rng(seed)
    gs = sample_group_elements(psi.rep.group, rng, n_group)
    pts = sample_points(rng, psi.rep.dim_V, n_points, radius)
    return check_equivariance(psi, gs, pts)


def stabilizer_kernel(rep: Representation, x, *, threshold=1e-8):
    """Kernel of xi -> delta_rho(xi) x, plus the singular values of the map.

    Returns coordinate rows spanning the kernel (Euclidean-orthonormal from
    the SVD) and the singular value array used for the rank decision.
    """
    x = np.asarray(x, dtype=float)
    k = rep.group.dim
    if k == 0:
        return np.zeros((0, 0)), np.zeros(0)
    A = np.column_stack([rep.delta_rho_basis[i] @ x for i in range(k)])
    _, s, vt = np.linalg.svd(A)
    s = np.concatenate([s, np.zeros(max(0, k - s.shape[0]))])
    cut = threshold * max(1.0, s[0] if s.size else 1.0)
    rank = int(np.sum(s > cut))
    return vt[rank:], s
