"""Affine slices to group orbits, slice decompositions, and transition maps.

A slice through ``x`` is realized as the affine subspace ``x + N`` where
``N`` is a stabilizer-stable complement of the orbit tangent space
``{delta_rho(xi) x : xi in g}`` inside V.  The default choice is the
orthogonal complement in a G-invariant inner product on V; tilted variants
(still stabilizer-stable and transverse, no longer orthogonal) support
multi-slice experiments.

Every solve here is finite-dimensional linear algebra near the base point:
decomposition of a field value into slice plus orbit directions, a Newton
solve for the transition element ``f(y) in exp(m)`` with ``f(y) . y`` on the
second slice, and implicit differentiation of that solve (exponential
Frechet derivatives) for the transition differential.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg

from .errors import (
    DimensionMismatchError,
    IllConditionedStabilizerWarning,
    InvalidInputError,
    InvalidSplittingError,
    NoInvariantMetricError,
    NoOverlapError,
    SliceBoundaryError,
    UnreliableDerivativeError,
)
from .groups import (
    AlgebraVector,
    GroupSpec,
    Splitting,
    equivariant_splitting,
    metric_orthonormalize,
    subgroup_spec,
)
from .numerics import EPS
from .quadrature import group_rule
from .representations import (
    Representation,
    VectorField,
    sample_group_elements,
    stabilizer_kernel,
)


# -- invariant metric on V ----------------------------------------------------

def invariant_metric(rep: Representation, *, seed: int = 0, samples: int = 16):
    """A G-invariant inner product matrix on V.

    Orthogonal representations get the identity.  Otherwise the identity
    form is averaged over the group with an exact quadrature rule and the
    result is validated by sampling; failure to reach residual 1e-6 raises
    :class:`NoInvariantMetricError`.  Returns ``(M, averaged_flag)``.
    """
    rng = np.random.default_rng(seed)
    gs = sample_group_elements(rep.group, rng, samples)
    worst = max(
        float(np.max(np.abs(np.asarray(rep.rho(g)).T @ np.asarray(rep.rho(g))
                            - np.eye(rep.dim_V)))) for g in gs)
    if worst <= 1e-10:
        return np.eye(rep.dim_V), False
    rule = group_rule(rep.group, 2)
    M = rule.average(lambda g: np.asarray(rep.rho(g)).T @ np.asarray(rep.rho(g)))
    M = 0.5 * (M + M.T)
    residual = max(
        float(np.max(np.abs(np.asarray(rep.rho(g)).T @ M @ np.asarray(rep.rho(g)) - M)))
        for g in gs)
    if residual > 1e-6:
        raise NoInvariantMetricError(
            f"averaged form is not invariant (residual {residual:.2e})")
    warnings.warn("representation is not orthogonal; using an averaged invariant metric",
                  stacklevel=2)
    return M, True


# -- stabilizer data -----------------------------------------------------------

def stabilizer_algebra(rep: Representation, x, *, threshold: float = 1e-8):
    """Orthonormal basis (invariant inner product) of {xi : delta_rho(xi) x = 0}.

    Rank decisions use the singular values of the dim(V) x dim(g) matrix of
    orbit directions; values within a factor 10 of the threshold trigger an
    :class:`IllConditionedStabilizerWarning`.
    """
    rows, svals = stabilizer_kernel(rep, x, threshold=threshold)
    cut = threshold * max(1.0, svals[0] if svals.size else 1.0)
    if np.any((svals > cut) & (svals < 10.0 * cut)):
        warnings.warn("stabilizer rank decision is ill-conditioned",
                      IllConditionedStabilizerWarning, stacklevel=2)
    if rows.shape[0] == 0:
        return np.zeros((0, rep.group.dim))
    return metric_orthonormalize(rows, rep.group.gram)


def _h0_distance(group: GroupSpec, stab_rows, c, *, grid: int = 1024) -> float:
    """Distance from c to the identity component generated by stab_rows."""
    k = stab_rows.shape[0]
    c = np.asarray(c, dtype=float)
    if k == 0:
        return float(np.max(np.abs(c - group.identity)))
    if k == 1:
        def dist(t):
            return float(np.max(np.abs(c - group.exp(stab_rows[0], t))))

        thetas = np.linspace(0.0, 2.0 * math.pi, grid, endpoint=False)
        values = [dist(t) for t in thetas]
        best = int(np.argmin(values))
        lo = thetas[best] - 2.0 * math.pi / grid
        hi = thetas[best] + 2.0 * math.pi / grid
        for _ in range(60):  # ternary refinement of the smooth 1-d distance
            m1 = lo + (hi - lo) / 3.0
            m2 = hi - (hi - lo) / 3.0
            if dist(m1) <= dist(m2):
                hi = m2
            else:
                lo = m1
        return dist(0.5 * (lo + hi))
    if k == 2:
        thetas = np.linspace(0.0, 2.0 * math.pi, 48, endpoint=False)
        best = math.inf
        for t1 in thetas:
            g1 = group.exp(stab_rows[0], t1)
            for t2 in thetas:
                best = min(best, float(np.max(np.abs(c - g1 @ group.exp(stab_rows[1], t2)))))
        return best
    # full rotation-algebra stabilizer: identity component = special part
    if abs(np.linalg.det(c) - 1.0) < 1e-6 and np.max(np.abs(c.T @ c - group.identity)) < 1e-6:
        return 0.0
    return math.inf


def stabilizer_component_gens(rep: Representation, x, stab_rows=None, *,
                              tol: float = 1e-9):
    """Representatives of the stabilizer's component group, identity first.

    Candidates are the catalog's component representatives and their
    products with half-turn exponentials of the algebra basis; candidates
    fixing ``x`` are kept and deduplicated modulo the identity component.
    The search is a finite heuristic that covers the catalog's orbit types.
    """
    group = rep.group
    x = np.asarray(x, dtype=float)
    if stab_rows is None:
        stab_rows = stabilizer_algebra(rep, x)
    candidates = [group.identity]
    for c in group.component_reps:
        candidates.append(np.asarray(c, dtype=float))
        for i in range(group.dim):
            coords = np.zeros(group.dim)
            coords[i] = 1.0
            candidates.append(np.asarray(c, dtype=float) @ group.exp(coords, math.pi))
    scale = max(1.0, float(np.linalg.norm(x)))
    gens = [group.identity]
    for c in candidates:
        if float(np.linalg.norm(rep.act(c, x) - x)) > tol * scale:
            continue
        if any(_h0_distance(group, stab_rows, c @ np.linalg.inv(g)) < 1e-6 for g in gens):
            continue
        gens.append(c)
    return gens


# -- the slice type ------------------------------------------------------------

@dataclass
class Slice:
    """An affine slice ``x + span(basis)`` with its stabilizer data."""

    rep: Representation
    base_point: np.ndarray
    basis: np.ndarray                  # (N, ns), metric-orthonormal columns
    radius: float
    stab_coords: np.ndarray            # (kh, k) rows, ip-orthonormal
    stab_component_gens: list = field(default_factory=list)
    metric: np.ndarray | None = None   # invariant inner product on V; None = identity
    tilted: bool = False

    def __post_init__(self):
        self.base_point = np.asarray(self.base_point, dtype=float)
        self.basis = np.asarray(self.basis, dtype=float)
        k = self.rep.group.dim
        coords = np.asarray(self.stab_coords, dtype=float)
        self.stab_coords = coords.reshape(-1, k) if k else np.zeros((0, 0))

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def metric_matrix(self) -> np.ndarray:
        return np.eye(self.rep.dim_V) if self.metric is None else self.metric

    def coords(self, y) -> np.ndarray:
        """Slice coordinates of a point (its offset projected on the basis)."""
        return self.basis.T @ self.metric_matrix @ (np.asarray(y, dtype=float) - self.base_point)

    def point(self, s) -> np.ndarray:
        return self.base_point + self.basis @ np.asarray(s, dtype=float)

    def offslice_residual(self, y) -> float:
        return float(np.linalg.norm(self.point(self.coords(y)) - np.asarray(y, float)))

    @cached_property
    def normal_basis(self) -> np.ndarray:
        """Metric-orthonormal basis of the complement of the slice subspace."""
        M = self.metric_matrix
        W = scipy.linalg.sqrtm(M).real if self.metric is not None else np.eye(self.rep.dim_V)
        QW = W @ self.basis
        u, s, _ = np.linalg.svd(QW, full_matrices=True)
        comp = u[:, self.dim:]
        Winv = np.linalg.inv(W) if self.metric is not None else W
        return Winv @ comp

    @cached_property
    def stabilizer(self) -> GroupSpec:
        return subgroup_spec(self.rep.group, f"{self.rep.group.name}::stab",
                             self.stab_coords, self.stab_component_gens)

    def slice_matrix(self, h) -> np.ndarray:
        """Matrix of the stabilizer action restricted to slice coordinates."""
        return self.basis.T @ self.metric_matrix @ np.asarray(self.rep.rho(h), float) @ self.basis

    def slice_representation(self) -> Representation:
        """The stabilizer acting on slice coordinates, as a Representation."""
        stab = self.stabilizer
        delta = np.array([
            self.basis.T @ self.metric_matrix @ self.rep.delta_rho(row) @ self.basis
            for row in self.stab_coords]).reshape(-1, self.dim, self.dim)
        return Representation(stab, self.dim, lambda h: self.slice_matrix(h), delta,
                              kind="slice")

    def validate(self, *, strict_orthogonal: bool | None = None):
        rep, x = self.rep, self.base_point
        M = self.metric_matrix
        gram = self.basis.T @ M @ self.basis
        if np.max(np.abs(gram - np.eye(self.dim))) > 1e-10:
            raise InvalidInputError("slice basis is not metric-orthonormal")
        A = np.column_stack([rep.delta_rho_basis[i] @ x for i in range(rep.group.dim)]) \
            if rep.group.dim else np.zeros((rep.dim_V, 0))
        strict = (not self.tilted) if strict_orthogonal is None else strict_orthogonal
        if strict and A.size:
            if np.max(np.abs(self.basis.T @ M @ A)) > 1e-10:
                raise InvalidInputError("slice subspace is not orthogonal to the orbit")
        if A.size:
            full = np.column_stack([self.basis, A])
            if np.linalg.matrix_rank(full, tol=1e-8) < rep.dim_V:
                raise InvalidInputError("slice subspace is not transverse to the orbit")
        for row in self.stab_coords:
            if float(np.linalg.norm(rep.delta_rho(row) @ x)) > 1e-12 * max(1.0, float(np.linalg.norm(x))):
                raise InvalidInputError("stabilizer algebra does not annihilate the base point")
        for h in self.stab_component_gens:
            moved = np.asarray(rep.rho(h), float) @ self.basis
            # subspace distance via projectors in metric coordinates
            W = scipy.linalg.sqrtm(M).real if self.metric is not None else np.eye(rep.dim_V)
            q1, _ = np.linalg.qr(W @ moved)
            q2, _ = np.linalg.qr(W @ self.basis)
            if float(np.linalg.norm(q1 @ q1.T - q2 @ q2.T, 2)) > 1e-10:
                raise InvalidInputError("slice subspace is not stabilizer-stable")


def build_slice(rep: Representation, x, radius: float, *, tilt=None,
                metric=None, seed: int = 0) -> Slice:
    """Construct the (optionally tilted) stabilizer-stable slice through x.

    ``tilt`` perturbs the normal slice by the graph of a stabilizer-averaged
    linear map from the slice subspace into the orbit directions; it may be
    ``{"seed": int, "scale": float}`` or an explicit matrix of shape
    (orbit_dim, slice_dim).  Tilted slices stay transverse and H-stable but
    give up orthogonality to the orbit.
    """
    x = np.asarray(x, dtype=float)
    group = rep.group
    M, _averaged = (np.asarray(metric, dtype=float), False) if metric is not None \
        else invariant_metric(rep, seed=seed)
    use_metric = None if np.allclose(M, np.eye(rep.dim_V), atol=1e-14) else M
    W = scipy.linalg.sqrtm(M).real if use_metric is not None else np.eye(rep.dim_V)
    Winv = np.linalg.inv(W) if use_metric is not None else W

    stab_rows = stabilizer_algebra(rep, x)
    gens = stabilizer_component_gens(rep, x, stab_rows)

    if group.dim:
        A = np.column_stack([rep.delta_rho_basis[i] @ x for i in range(group.dim)])
        u, s, _ = np.linalg.svd(W @ A, full_matrices=True)
        cut = 1e-8 * max(1.0, s[0] if s.size else 1.0)
        orbit_dim = int(np.sum(s > cut))
    else:
        u = np.eye(rep.dim_V)
        orbit_dim = 0
    expected = rep.dim_V - (group.dim - stab_rows.shape[0])
    tangent_w = u[:, :orbit_dim]
    normal_w = u[:, orbit_dim:]
    if normal_w.shape[1] != expected:
        raise InvalidInputError(
            f"slice dimension {normal_w.shape[1]} does not match "
            f"dim V - dim orbit = {expected}")

    tilted = False
    if tilt is not None and orbit_dim and normal_w.shape[1]:
        if isinstance(tilt, dict):
            t_rng = np.random.default_rng(int(tilt.get("seed", 0)))
            scale = float(tilt.get("scale", 0.1))
            ell = scale * t_rng.normal(size=(orbit_dim, normal_w.shape[1]))
        else:
            ell = np.asarray(tilt, dtype=float)
            if ell.shape != (orbit_dim, normal_w.shape[1]):
                raise DimensionMismatchError(
                    f"tilt matrix must have shape {(orbit_dim, normal_w.shape[1])}")
        stab = subgroup_spec(group, f"{group.name}::stab", stab_rows, gens)
        rule = group_rule(stab, 2)

        def averaged(h):
            RW = W @ np.asarray(rep.rho(h), float) @ Winv
            return (tangent_w.T @ RW @ tangent_w) @ ell @ (normal_w.T @ RW.T @ normal_w)

        ell = rule.average(averaged)
        mixed = normal_w + tangent_w @ ell
        q, _ = np.linalg.qr(mixed)
        normal_w = q
        tilted = True

    basis = Winv @ normal_w
    slc = Slice(rep, x, basis, float(radius), stab_rows, gens,
                metric=use_metric, tilted=tilted)
    slc.validate()
    return slc


def default_splitting(slc: Slice) -> Splitting:
    """g = h (+) m with m the invariant-inner-product complement of h."""
    return equivariant_splitting(slc.rep.group, slc.stab_coords,
                                 slc.stab_component_gens)


def slice_from_spec(rep: Representation, spec: dict, named_points=None) -> Slice:
    named_points = named_points or {}
    base = spec["base_point"]
    if isinstance(base, str):
        base = named_points[base]
    kwargs = {}
    if "tilt" in spec:
        kwargs["tilt"] = spec["tilt"]
    slc = build_slice(rep, np.asarray(base, dtype=float),
                      float(spec.get("radius", 1.0)), **kwargs)
    if "basis" in spec:
        q = metric_orthonormalize(np.asarray(spec["basis"], dtype=float),
                                  slc.metric_matrix)
        slc = Slice(rep, slc.base_point, q.T, slc.radius, slc.stab_coords,
                    slc.stab_component_gens, metric=slc.metric, tilted=True)
        slc.validate()
    return slc


# -- slice decomposition --------------------------------------------------------

def slice_decompose(X: VectorField, slc: Slice, splitting: Splitting, y):
    """Split X(y) = XS + delta_rho(psi) y with XS in the slice and psi in m.

    The solve is the linear system on N x m whose columns are the slice
    basis and the orbit directions ``delta_rho(m_j) y``; it is invertible
    near the base point by the slice property.
    """
    y = np.asarray(y, dtype=float)
    rep = slc.rep
    dist = float(np.linalg.norm(y - slc.base_point))
    if dist > slc.radius * (1.0 + 1e-12):
        raise SliceBoundaryError(
            f"point at distance {dist:.3g} exceeds the slice radius {slc.radius:.3g}")
    m_rows = splitting.m_coords
    columns = [slc.basis]
    for row in m_rows:
        columns.append((rep.delta_rho(row) @ y)[:, None])
    A = np.hstack(columns)
    if A.shape[0] != A.shape[1]:
        raise DimensionMismatchError(
            f"slice dim {slc.dim} + dim m {m_rows.shape[0]} != dim V {rep.dim_V}")
    cond = np.linalg.cond(A)
    if cond > 1e8:
        raise SliceBoundaryError(
            f"slice/orbit solve is ill-conditioned (cond {cond:.2e}); "
            "point is too far from the base")
    sol = np.linalg.solve(A, X(y))
    xs = slc.basis @ sol[: slc.dim]
    psi_coeff = sol[slc.dim:]
    psi_coords = m_rows.T @ psi_coeff if m_rows.shape[0] else np.zeros(rep.group.dim)
    return xs, AlgebraVector(rep.group, psi_coords)


class SliceField:
    """The slice component of an invariant field, as a field on slice coords."""

    def __init__(self, X: VectorField, slc: Slice, splitting: Splitting):
        self.X = X
        self.slice = slc
        self.splitting = splitting

    def value(self, y):
        xs, _ = slice_decompose(self.X, self.slice, self.splitting, y)
        return xs

    def psi(self, y) -> AlgebraVector:
        _, psi = slice_decompose(self.X, self.slice, self.splitting, y)
        return psi

    def coords_func(self, s):
        """Slice-coordinate evaluation: s -> coordinates of X^S(x + Q s)."""
        y = self.slice.point(s)
        xs, _ = slice_decompose(self.X, self.slice, self.splitting, y)
        return self.slice.basis.T @ self.slice.metric_matrix @ xs


# -- transition between slices ---------------------------------------------------

@dataclass
class TransitionResult:
    f: np.ndarray              # group element in exp(m), ambient matrix
    phi: np.ndarray            # f . y on the second slice
    xi: AlgebraVector          # log of f inside m
    residual: float
    iterations: int


def _offslice_constraint(slc: Slice):
    """Rows extracting the off-slice component: P(y) = U^T M (y - x)."""
    U = slc.normal_basis
    return (U.T @ slc.metric_matrix, slc.base_point)


def transition_map(slice1: Slice, slice2: Slice, y, *, splitting: Splitting | None = None,
                   tol: float = 1e-12, max_iter: int = 50, initial=None) -> TransitionResult:
    """Solve for f(y) = exp(xi), xi in m, with f(y) . y on the second slice.

    Damped Newton on the off-slice constraint of slice2; the smallest-norm
    solution is the one reached from xi = 0 (multiple intersections are not
    detected).  Both slices must share the base point.
    """
    rep = slice1.rep
    group = rep.group
    y = np.asarray(y, dtype=float)
    if float(np.linalg.norm(slice1.base_point - slice2.base_point)) > 1e-10:
        raise InvalidInputError(
            "transition_map expects slices through the same base point; "
            "push one slice forward by the known group element first")
    if splitting is None:
        splitting = default_splitting(slice1)
    m_rows = splitting.m_coords
    n_m = m_rows.shape[0]
    P, x2 = _offslice_constraint(slice2)
    if n_m == 0:
        residual = float(np.linalg.norm(P @ (y - x2))) if P.size else 0.0
        return TransitionResult(group.identity, y.copy(),
                                AlgebraVector(group, np.zeros(group.dim)),
                                residual, 0)
    m_mats = [group.algebra_matrix(row) for row in m_rows]

    def group_elem(a):
        return group.exp(m_rows.T @ a)

    def constraint(a):
        return P @ (rep.act(group_elem(a), y) - x2)

    def jacobian(a):
        ximat = group.algebra_matrix(m_rows.T @ a)
        cols = []
        for mm in m_mats:
            _, dE = scipy.linalg.expm_frechet(ximat, mm)
            cols.append(P @ (rep.rho_tangent(group_elem(a), dE) @ y))
        return np.column_stack(cols)

    a = np.zeros(n_m) if initial is None else np.asarray(initial, dtype=float).copy()
    scale = max(1.0, float(np.linalg.norm(y)))
    r = constraint(a)
    norm = float(np.linalg.norm(r))
    iterations = 0
    for iterations in range(1, max_iter + 1):
        if norm <= tol * scale:
            break
        try:
            step = np.linalg.solve(jacobian(a), -r)
        except np.linalg.LinAlgError as exc:
            raise NoOverlapError(f"transition Jacobian is singular: {exc}") from exc
        damp = 1.0
        for _ in range(30):
            a_new = a + damp * step
            r_new = constraint(a_new)
            norm_new = float(np.linalg.norm(r_new))
            if norm_new < norm or norm_new <= tol * scale:
                break
            damp *= 0.5
        else:
            raise NoOverlapError(
                f"transition Newton stalled at residual {norm:.2e} "
                f"(point may be outside the overlap region)")
        a, r, norm = a_new, r_new, norm_new
    if norm > max(tol * scale, 1e-11):
        raise NoOverlapError(
            f"transition Newton did not converge (residual {norm:.2e})")
    f = group_elem(a)
    return TransitionResult(f, rep.act(f, y), AlgebraVector(group, m_rows.T @ a),
                            norm, iterations)


def _transition_derivative(slice1: Slice, slice2: Slice, splitting: Splitting,
                           trans: TransitionResult, y, v):
    """Implicit derivative of the transition solve in direction v.

    Returns ``(zeta_coords, Tphi_v)`` where zeta = f^-1 Df_y(v) in algebra
    coordinates and ``Tphi_v = rho(f) (delta_rho(zeta) y + v)``.
    """
    rep = slice1.rep
    group = rep.group
    y = np.asarray(y, dtype=float)
    v = np.asarray(v, dtype=float)
    m_rows = splitting.m_coords
    n_m = m_rows.shape[0]
    if n_m == 0:
        return np.zeros(group.dim), v.copy()
    P, _ = _offslice_constraint(slice2)
    ximat = group.algebra_matrix(trans.xi.coords)
    f = trans.f
    m_mats = [group.algebra_matrix(row) for row in m_rows]
    cols = []
    frechets = []
    for mm in m_mats:
        _, dE = scipy.linalg.expm_frechet(ximat, mm)
        frechets.append(dE)
        cols.append(P @ (rep.rho_tangent(f, dE) @ y))
    J_a = np.column_stack(cols)
    rhs = -(P @ rep.act(f, v))
    da = np.linalg.solve(J_a, rhs)
    Df = sum(d * dE for d, dE in zip(da, frechets))
    zeta = group.algebra_coords(np.linalg.solve(f, Df))
    tphi = rep.act(f, rep.delta_rho(zeta) @ y + v)
    return zeta, tphi


@dataclass
class TransitionDifferential:
    value: np.ndarray        # Tphi_y(v) from the implicit/structure formula
    fd_value: np.ndarray     # direct Richardson finite difference of phi
    agreement: float         # max-abs difference of the two
    fd_spread: float         # internal Richardson disagreement of the FD value
    zeta: np.ndarray         # f(y)^-1 Df_y(v) in algebra coordinates


def transition_differential(slice1: Slice, slice2: Slice, y, v, *,
                            splitting: Splitting | None = None,
                            fd_check: bool = True,
                            fd_step: float | None = None) -> TransitionDifferential:
    """Differential of the slice transition phi(y) = f(y) . y at y along v.

    The returned value is ``rho(f(y)) [delta_rho(zeta) y + v]`` with
    ``zeta = f(y)^-1 Df_y(v)`` obtained by differentiating the transition
    solve implicitly; it must agree with the direct finite difference of
    phi, which is computed alongside and reported.
    """
    if splitting is None:
        splitting = default_splitting(slice1)
    y = np.asarray(y, dtype=float)
    v = np.asarray(v, dtype=float)
    trans = transition_map(slice1, slice2, y, splitting=splitting)
    zeta, value = _transition_derivative(slice1, slice2, splitting, trans, y, v)
    if not fd_check:
        return TransitionDifferential(value, value.copy(), 0.0, 0.0, zeta)
    vnorm = float(np.linalg.norm(v))
    if vnorm < 1e-300:
        raise InvalidInputError("direction vector is zero")
    if fd_step is None:
        fd_step = 1e-3 * max(1.0, float(np.linalg.norm(y))) / vnorm

    if splitting.m_coords.size:
        warm, *_ = np.linalg.lstsq(splitting.m_coords.T, trans.xi.coords, rcond=None)
    else:
        warm = None

    def phi(point):
        res = transition_map(slice1, slice2, point, splitting=splitting, initial=warm)
        return res.phi

    def central(eps):
        return (phi(y + eps * v) - phi(y - eps * v)) / (2.0 * eps)

    coarse = central(fd_step)
    fine = central(fd_step / 2.0)
    fd = (4.0 * fine - coarse) / 3.0
    spread = float(np.max(np.abs(fine - coarse)))
    if spread > 1e-4 * max(1.0, float(np.linalg.norm(fd))):
        raise UnreliableDerivativeError(
            f"finite-difference transition derivative is unreliable "
            f"(Richardson disagreement {spread:.2e})")
    agreement = float(np.max(np.abs(fd - value)))
    return TransitionDifferential(value, fd, agreement, spread, zeta)


def transition_frame_map(slice1: Slice, slice2: Slice, *,
                         splitting: Splitting | None = None) -> np.ndarray:
    """Matrix of Tphi at the base point, from slice1 coords to slice2 coords."""
    if splitting is None:
        splitting = default_splitting(slice1)
    x = slice1.base_point
    cols = []
    for j in range(slice1.dim):
        v = slice1.basis[:, j]
        td = transition_differential(slice1, slice2, x, v, splitting=splitting,
                                     fd_check=False)
        cols.append(slice2.basis.T @ slice2.metric_matrix @ td.value)
    return np.column_stack(cols)


# -- change of splitting ----------------------------------------------------------

@dataclass
class SplittingChange:
    B: np.ndarray          # (dim_h, dim_m1): graph map m1 -> h in the two bases
    phi: object            # callable y -> AlgebraVector in h, or None
    residual: float


def splitting_change_witness(splitting1: Splitting, splitting2: Splitting,
                             psi1=None, psi2=None, sample_points=None) -> SplittingChange:
    """The graph map B with m2 = {v + B(v)} and the induced witness B o psi1.

    Both splittings must share h.  When psi2 is supplied the identity
    ``psi2 = psi1 + B o psi1`` is verified at the sample points and the
    maximum residual reported.
    """
    group = splitting1.group
    h1, h2 = splitting1.h_coords, splitting2.h_coords
    if h1.shape != h2.shape or (h1.size and
                                np.linalg.matrix_rank(np.vstack([h1, h2]), tol=1e-10) > h1.shape[0]):
        raise InvalidSplittingError("splittings do not share the stabilizer algebra")
    m1 = splitting1.m_coords
    B_cols = []
    for row in m1:
        try:
            alpha, _ = splitting2.project(row)
        except InvalidSplittingError as exc:
            raise InvalidSplittingError(
                "second complement is not complementary to h") from exc
        B_cols.append(-alpha)
    B = np.column_stack(B_cols) if B_cols else np.zeros((h1.shape[0], 0))

    phi = None
    if psi1 is not None:
        from .representations import EquivariantMap

        def phi_func(v, _B=B, _m1=m1, _h1=h1):
            m_coeff, _ = _coeff_in_rows(group, psi1(v), _m1)
            return _h1.T @ (_B @ m_coeff)

        phi = EquivariantMap(psi1.rep, phi_func, {"kind": "splitting_change"})

    residual = 0.0
    if psi2 is not None and psi1 is not None and sample_points is not None:
        for v in sample_points:
            m_coeff, _ = _coeff_in_rows(group, psi1(v), m1)
            predicted = psi1(v) + h1.T @ (B @ m_coeff)
            residual = max(residual, group.norm(psi2(v) - predicted))
    return SplittingChange(B, phi, residual)


def _coeff_in_rows(group, coords, rows):
    if rows.shape[0] == 0:
        return np.zeros(0), float(group.norm(coords))
    sol, *_ = np.linalg.lstsq(rows.T, coords, rcond=None)
    res = float(group.norm(rows.T @ sol - coords))
    return sol, res


# -- change of slice ----------------------------------------------------------------

@dataclass
class SliceChangeReport:
    points: np.ndarray               # sampled points on slice1
    nu_coords: np.ndarray            # (n, k) algebra coordinates of nu at phi(y)
    membership_residual: float       # max distance of nu from the stabilizer algebra
    identity_residual: float         # max error in X^S' - Tphi(X^S) = delta_rho(nu) y'


def slice_change_witness(X: VectorField, slice1: Slice, slice2: Slice,
                         splitting: Splitting | None = None, points=None, *,
                         seed: int = 0, n_points: int = 20,
                         fraction: float = 0.3) -> SliceChangeReport:
    """The h-valued witness nu comparing slice fields across two slices.

    At y' = phi(y) = f(y) . y the two slice decompositions and the
    left-logarithmic derivative zeta = f^-1 Df_y(X^S(y)) combine into

        nu(y') = Ad(f(y)) (psi^S(y) - zeta) - psi^S'(y'),

    which must take values in the stabilizer algebra and satisfy
    ``X^S'(y') - Tphi_y(X^S(y)) = delta_rho(nu(y')) y'``.
    """
    if splitting is None:
        splitting = default_splitting(slice1)
    rep = slice1.rep
    group = rep.group
    if points is None:
        rng = np.random.default_rng(seed)
        direc = rng.normal(size=(n_points, slice1.dim))
        direc /= np.maximum(np.linalg.norm(direc, axis=1, keepdims=True), 1e-300)
        radii = fraction * slice1.radius * rng.uniform(0.1, 1.0, size=(n_points, 1))
        points = slice1.base_point + (direc * radii) @ slice1.basis.T
    points = np.asarray(points, dtype=float).reshape(-1, rep.dim_V)

    h_rows = slice1.stab_coords
    nu_list = []
    membership = 0.0
    identity = 0.0
    for y in points:
        xs1, psi1 = slice_decompose(X, slice1, splitting, y)
        trans = transition_map(slice1, slice2, y, splitting=splitting)
        zeta, tphi_xs = _transition_derivative(slice1, slice2, splitting, trans, y, xs1)
        y2 = trans.phi
        xs2, psi2 = slice_decompose(X, slice2, splitting, y2)
        ad_f = group.adjoint_matrix(trans.f)
        nu = ad_f @ (psi1.coords - zeta) - psi2.coords
        nu_list.append(nu)
        _, off_h = _coeff_in_rows(group, nu, h_rows)
        membership = max(membership, off_h)
        lhs = xs2 - tphi_xs
        rhs = rep.delta_rho(nu) @ y2
        identity = max(identity, float(np.linalg.norm(lhs - rhs)))
    return SliceChangeReport(points, np.array(nu_list).reshape(len(points), group.dim),
                             membership, identity)
