"""Truncated complexes of equivariant polynomial maps and their homotopy data.

For a slice S with stabilizer H and a splitting g = h (+) m, the two-term
complex on the slice is

    C1 = {polynomial maps S -> h, H-equivariant, degree <= d}
    C0 = {polynomial vector fields on S, H-invariant, degree <= d+1}

with boundary ``(d psi)(y) = delta_rho(psi(y)) y``, which raises degree by
exactly one (the affine term vanishes because h annihilates the base
point).  The tube-side spaces, written in slice coordinates, are the direct
sums C1 (+) C^inf(S,m) and C0 (+) C^inf(S,m); a field on the tube splits
into a slice-tangent part plus ``delta_rho(chi(y)) y`` with chi m-valued,
and for h-valued psi the induced field is itself slice-tangent, so the
tube boundary is exactly (psi_h, psi_m) -> (d psi_h, psi_m).  The block
inclusions K, projections p, and the degree-preserving homotopy h below
realize the equivalence; every identity is checked on explicit matrices.

Equivariant bases come from a Reynolds (group-averaging) operator assembled
with exact quadrature, so idempotency and the chain identities are
machine-precision statements.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import (
    AssemblyError,
    BudgetError,
    InsufficientQuadratureError,
    InvalidInputError,
)
from .groups import GroupSpec, Splitting
from .polynomials import MonomialBasis
from .quadrature import GroupQuadrature, group_rule, integer_weights
from .representations import Representation, sample_group_elements, sample_points
from .slices import Slice


@dataclass
class PolyAction:
    """A group acting on polynomial maps: source substitution + target matrices."""

    group: GroupSpec
    n_vars: int
    target_dim: int
    quad: GroupQuadrature
    source_mats: list          # per node, (n_vars, n_vars)
    target_mats: list          # per node, (target_dim, target_dim)
    source_of: object = None   # callable g -> source matrix
    target_of: object = None   # callable g -> target matrix
    label: str = ""


def _max_weight(mats) -> int:
    w = 0
    for m in mats:
        if np.asarray(m).size:
            w = max(w, integer_weights(m))
    return w


def _restricted_ad(group: GroupSpec, g, rows) -> np.ndarray:
    """Matrix of Ad(g) on the subspace spanned by coordinate rows."""
    rows = np.asarray(rows, dtype=float)
    if rows.shape[0] == 0:
        return np.zeros((0, 0))
    ad = group.adjoint_matrix(g)
    moved = rows @ ad.T                      # Ad(g) applied to each basis row
    sol, res, *_ = np.linalg.lstsq(rows.T, moved.T, rcond=None)
    recon = rows.T @ sol
    if np.max(np.abs(recon - moved.T)) > 1e-8:
        raise AssemblyError("subspace is not stable under the adjoint action")
    return sol                               # column j = coefficients of Ad(g) row_j


def _target_data(rep: Representation, target: str, splitting: Splitting | None,
                 slc: Slice | None):
    """(target_dim, rows_or_None, weight) for the requested target tag."""
    group = rep.group
    if target == "fields":
        return (slc.dim if slc is not None else rep.dim_V), None, None
    if splitting is None:
        raise InvalidInputError(f"target {target!r} needs a splitting")
    if target == "h":
        return splitting.dim_h, splitting.h_coords, None
    if target == "m":
        return splitting.dim_m, splitting.m_coords, None
    if target == "g":
        rows = np.eye(group.dim)
        return group.dim, rows, None
    raise InvalidInputError(f"unknown target {target!r}")


def _restricted_ad_generator(parent: GroupSpec, eta_coords, rows) -> np.ndarray:
    """Matrix of ad(eta) restricted to the subspace spanned by coordinate rows."""
    rows = np.asarray(rows, dtype=float)
    if rows.shape[0] == 0:
        return np.zeros((0, 0))
    cols = []
    for row in rows:
        bracket = parent.bracket(eta_coords, row)
        sol, *_ = np.linalg.lstsq(rows.T, bracket, rcond=None)
        cols.append(sol)
    return np.column_stack(cols)


def build_action(rep: Representation, target: str, degree: int, *,
                 slc: Slice | None = None,
                 splitting: Splitting | None = None) -> PolyAction:
    """Assemble the node matrices of the action on degree<=d polynomial maps."""
    parent = rep.group
    if slc is not None:
        group = slc.stabilizer
        n_vars = slc.dim
        src_of = slc.slice_matrix
        src_gen = [slc.basis.T @ slc.metric_matrix @ rep.delta_rho(row) @ slc.basis
                   for row in slc.stab_coords]
        circle_dirs = list(slc.stab_coords)
    else:
        group = rep.group
        n_vars = rep.dim_V
        src_of = lambda g: np.asarray(rep.rho(g), dtype=float)
        src_gen = list(rep.delta_rho_basis)
        circle_dirs = [row for row in np.eye(parent.dim)]

    target_dim, rows, _ = _target_data(rep, target, splitting, slc)
    if target == "fields":
        target_of = src_of
    else:
        target_of = lambda g: _restricted_ad(parent, g, rows)

    # trig degree of the averaged integrand: source substitution contributes
    # degree * weight(source), the target action one more weight factor
    if group.dim and group.family != "finite":
        w_src = _max_weight(src_gen)
        if target == "fields":
            w_tgt = w_src
        else:
            ads = [_restricted_ad_generator(parent, eta, rows) for eta in circle_dirs]
            w_tgt = _max_weight(ads)
        trig_degree = max(1, degree * max(w_src, 1) + max(w_tgt, 0))
    else:
        trig_degree = 1
    rule = group_rule(group, trig_degree)

    source_mats = [src_of(g) for g in rule.elements]
    target_mats = [target_of(g) for g in rule.elements]
    return PolyAction(group, n_vars, target_dim, rule, source_mats, target_mats,
                      source_of=src_of, target_of=target_of,
                      label=f"{target}<=deg{degree}")


@dataclass
class EquivariantPolyBasis:
    """Orthonormal coefficient basis of an equivariant polynomial space."""

    target: str
    target_dim: int
    mono: MonomialBasis
    coeffs: np.ndarray          # (target_dim * n_mono, r)
    action: PolyAction

    @property
    def dim(self) -> int:
        return self.coeffs.shape[1]

    def column_matrix(self, j) -> np.ndarray:
        return self.coeffs[:, j].reshape(self.target_dim, len(self.mono))

    def evaluate_column(self, j, points) -> np.ndarray:
        """(n_points, target_dim) values of basis map j."""
        vals = self.mono.evaluate(points)            # (n_mono, n_points)
        return (self.column_matrix(j) @ vals).T

    def gram_residual(self) -> float:
        g = self.coeffs.T @ self.coeffs
        return float(np.max(np.abs(g - np.eye(self.dim)))) if self.dim else 0.0

    def equivariance_residual(self, *, seed=0, n_samples=30, radius=1.0) -> float:
        """Sampled check that every column is exactly equivariant."""
        if self.dim == 0 or self.target_dim == 0:
            return 0.0
        rng = np.random.default_rng(seed)
        pts = sample_points(rng, self.mono.n_vars, n_samples, radius)
        gs = sample_group_elements(self.action.group, rng, n_samples)
        worst = 0.0
        for j in range(self.dim):
            C = self.column_matrix(j)
            for g, v in zip(gs, pts):
                A = np.asarray(self.action.source_of(g), dtype=float)
                Tm = np.asarray(self.action.target_of(g), dtype=float)
                lhs = Tm @ (C @ self.mono.evaluate((np.linalg.inv(A) @ v)[None, :])[:, 0])
                rhs = C @ self.mono.evaluate(v[None, :])[:, 0]
                worst = max(worst, float(np.max(np.abs(lhs - rhs))))
        return worst


def reynolds_basis(rep: Representation, target: str, degree: int, *,
                   slc: Slice | None = None,
                   splitting: Splitting | None = None,
                   idempotency_tol: float = 1e-10,
                   rank_threshold: float = 1e-8) -> EquivariantPolyBasis:
    """Orthonormal basis of the equivariant polynomial maps of degree <= d.

    Averages the coefficient-space action of the group with an exact rule
    (the Reynolds operator), verifies idempotency, and returns the
    orthonormalized column space at the stated rank threshold.
    """
    action = build_action(rep, target, degree, slc=slc, splitting=splitting)
    mono = MonomialBasis(action.n_vars, degree)
    n_full = action.target_dim * len(mono)
    if n_full == 0:
        return EquivariantPolyBasis(target, action.target_dim, mono,
                                    np.zeros((0, 0)), action)
    R = np.zeros((n_full, n_full))
    for w, A, Tm in zip(action.quad.weights, action.source_mats, action.target_mats):
        S = mono.substitution_matrix(np.linalg.inv(A))
        R += w * np.kron(Tm, S.T)
    idem = float(np.max(np.abs(R @ R - R)))
    if idem > idempotency_tol:
        raise InsufficientQuadratureError(
            f"averaging operator is not idempotent (residual {idem:.2e}); "
            f"the quadrature rule with {len(action.quad)} nodes is not exact "
            f"for target {target!r} at degree {degree}")
    u, s, _ = np.linalg.svd(R)
    rank = int(np.sum(s > rank_threshold))
    basis = u[:, :rank]
    # columns must individually be fixed by the averaging operator
    fix = float(np.max(np.abs(R @ basis - basis))) if rank else 0.0
    if fix > 1e-8:
        raise AssemblyError(
            f"range extraction failed; R Q - Q residual {fix:.2e}")
    return EquivariantPolyBasis(target, action.target_dim, mono, basis, action)


@dataclass
class TruncatedComplex:
    """A 2-term complex of equivariant polynomial spaces with its boundary."""

    C1_basis: EquivariantPolyBasis
    C0_basis: EquivariantPolyBasis
    boundary: np.ndarray        # (dim C0, dim C1)


def boundary_matrix(source: EquivariantPolyBasis, fields: EquivariantPolyBasis,
                    generator_actions, *, tol: float = 1e-9):
    """Matrix of psi -> delta_rho(psi(.)) . in the two equivariant bases.

    ``generator_actions[k]`` is the linear action of the k-th target basis
    generator on slice coordinates.  The product is exact coefficient
    convolution (each monomial times each coordinate function); the result
    must land in the field basis, and the projection residual is checked.
    """
    if source.mono.max_degree + 1 > fields.mono.max_degree:
        raise BudgetError(
            f"degree budget: sources of degree {source.mono.max_degree} need "
            f"field degree >= {source.mono.max_degree + 1}, have {fields.mono.max_degree}")
    generator_actions = [np.asarray(a, dtype=float) for a in generator_actions]
    if len(generator_actions) != source.target_dim:
        raise AssemblyError("one generator action per target basis element required")
    n_field_full = fields.target_dim * len(fields.mono)
    cols = []
    images = []
    worst = 0.0
    for j in range(source.dim):
        C = source.column_matrix(j)
        out = np.zeros((fields.target_dim, len(fields.mono)))
        for k, A in enumerate(generator_actions):
            row = fields.mono.embed(C[k], source.mono)
            for i in range(fields.target_dim):
                if np.any(A[i]):
                    out[i] += fields.mono.multiply_linear(row, A[i])
        vec = out.reshape(-1)
        images.append(vec)
        proj = fields.coeffs.T @ vec
        residual = float(np.linalg.norm(fields.coeffs @ proj - vec))
        worst = max(worst, residual)
        if residual > tol * max(1.0, float(np.linalg.norm(vec))):
            raise AssemblyError(
                f"boundary image of basis column {j} leaves the equivariant "
                f"field space (residual {residual:.2e})")
        cols.append(proj)
    matrix = np.column_stack(cols) if cols else np.zeros((fields.dim, 0))
    return matrix, np.array(images).reshape(len(cols), n_field_full) if cols else np.zeros((0, n_field_full))


@dataclass
class TubeComplexPair:
    """Slice and tube complexes in slice coordinates, with K, p, and h."""

    slc: Slice
    splitting: Splitting
    degree: int
    basis_h: EquivariantPolyBasis
    basis_m: EquivariantPolyBasis
    basis_f: EquivariantPolyBasis
    slice_complex: TruncatedComplex
    boundary_tube: np.ndarray
    K1: np.ndarray
    K0: np.ndarray
    p1: np.ndarray
    p0: np.ndarray
    homotopy: np.ndarray
    chain_residual: float
    boundary_images: np.ndarray

    @property
    def dims(self):
        rh, rm, rf = self.basis_h.dim, self.basis_m.dim, self.basis_f.dim
        return {"C1_slice": rh, "C0_slice": rf,
                "C1_tube": rh + rm, "C0_tube": rf + rm, "m_block": rm}


def build_K(slc: Slice, splitting: Splitting, degree: int,
            rep: Representation | None = None) -> TubeComplexPair:
    """Assemble the slice and tube complexes at the given degree budget.

    Sources are truncated at ``degree``, field targets at ``degree + 1``;
    the m-valued block appears with the source budget on both sides, since
    the tube boundary is the identity there.
    """
    rep = rep or slc.rep
    basis_h = reynolds_basis(rep, "h", degree, slc=slc, splitting=splitting)
    basis_m = reynolds_basis(rep, "m", degree, slc=slc, splitting=splitting)
    basis_f = reynolds_basis(rep, "fields", degree + 1, slc=slc, splitting=splitting)

    gen_actions = []
    x = slc.base_point
    for row in splitting.h_coords:
        affine = slc.basis.T @ slc.metric_matrix @ (rep.delta_rho(row) @ x)
        if float(np.linalg.norm(affine)) > 1e-10 * max(1.0, float(np.linalg.norm(x))):
            raise AssemblyError(
                "stabilizer generator does not annihilate the base point; "
                "boundary would not raise degree by one")
        gen_actions.append(slc.basis.T @ slc.metric_matrix @ rep.delta_rho(row) @ slc.basis)

    d_slice, images = boundary_matrix(basis_h, basis_f, gen_actions)
    rh, rm, rf = basis_h.dim, basis_m.dim, basis_f.dim

    boundary_tube = np.zeros((rf + rm, rh + rm))
    boundary_tube[:rf, :rh] = d_slice
    boundary_tube[rf:, rh:] = np.eye(rm)
    K1 = np.vstack([np.eye(rh), np.zeros((rm, rh))])
    K0 = np.vstack([np.eye(rf), np.zeros((rm, rf))])
    p1 = np.hstack([np.eye(rh), np.zeros((rh, rm))])
    p0 = np.hstack([np.eye(rf), np.zeros((rf, rm))])
    homotopy = np.zeros((rh + rm, rf + rm))
    homotopy[rh:, rf:] = np.eye(rm)

    chain_diff = K0 @ d_slice - boundary_tube @ K1
    chain_residual = float(np.max(np.abs(chain_diff))) if chain_diff.size else 0.0
    return TubeComplexPair(slc, splitting, degree, basis_h, basis_m, basis_f,
                           TruncatedComplex(basis_h, basis_f, d_slice),
                           boundary_tube, K1, K0, p1, p0, homotopy,
                           chain_residual, images)


def _rank(mat, threshold=1e-8):
    if mat.size == 0:
        return 0
    s = np.linalg.svd(mat, compute_uv=False)
    return int(np.sum(s > threshold * max(1.0, s[0])))


def _cokernel_basis(mat, ambient_dim, threshold=1e-8):
    """Orthonormal basis of the orthogonal complement of the column space."""
    if ambient_dim == 0:
        return np.zeros((0, 0))
    if mat.size == 0:
        return np.eye(ambient_dim)
    u, s, _ = np.linalg.svd(mat, full_matrices=True)
    rank = int(np.sum(s > threshold * max(1.0, s[0] if s.size else 1.0)))
    return u[:, rank:]


def verify_homotopy_equivalence(pair: TubeComplexPair, *, tol: float = 1e-12,
                                rank_threshold: float = 1e-8) -> dict:
    """Check the chain-map, section, homotopy, and cokernel statements.

    Returns a report dict with every residual, the ranks and cokernel
    dimensions on the two sides, and the smallest singular value of the
    induced map between cokernels (invertibility certificate).
    """
    d_s = pair.slice_complex.boundary
    d_t = pair.boundary_tube
    K1, K0, p1, p0, h = pair.K1, pair.K0, pair.p1, pair.p0, pair.homotopy
    rh, rm, rf = pair.basis_h.dim, pair.basis_m.dim, pair.basis_f.dim

    def mx(a):
        return float(np.max(np.abs(a))) if a.size else 0.0

    residuals = {
        "chain_map": mx(K0 @ d_s - d_t @ K1),
        "p1K1": mx(p1 @ K1 - np.eye(rh)),
        "p0K0": mx(p0 @ K0 - np.eye(rf)),
        "homotopy_C1": mx(np.eye(rh + rm) - K1 @ p1 - h @ d_t),
        "homotopy_C0": mx(np.eye(rf + rm) - K0 @ p0 - d_t @ h),
    }
    rank_slice = _rank(d_s, rank_threshold)
    rank_tube = _rank(d_t, rank_threshold)
    coker_slice = rf - rank_slice
    coker_tube = (rf + rm) - rank_tube

    W_s = _cokernel_basis(d_s, rf, rank_threshold)
    W_t = _cokernel_basis(d_t, rf + rm, rank_threshold)
    induced = W_t.T @ K0 @ W_s
    if induced.size:
        svals = np.linalg.svd(induced, compute_uv=False)
        smallest = float(svals.min()) if induced.shape[0] == induced.shape[1] else 0.0
    else:
        smallest = 1.0 if coker_slice == coker_tube == 0 else 0.0
    bijective = (coker_slice == coker_tube) and smallest > rank_threshold

    # structural degree bookkeeping: images live within degree <= d+1
    degrees = pair.basis_f.mono.degrees
    overflow = 0.0
    for image in pair.boundary_images:
        C = image.reshape(pair.basis_f.target_dim, len(pair.basis_f.mono))
        mask = degrees > pair.degree + 1
        if mask.any():
            overflow = max(overflow, float(np.max(np.abs(C[:, mask]))))

    report = {
        "degree": pair.degree,
        "dims": pair.dims,
        "residuals": residuals,
        "max_residual": max(residuals.values()),
        "rank_slice": rank_slice,
        "rank_tube": rank_tube,
        "coker_slice": coker_slice,
        "coker_tube": coker_tube,
        "induced_min_sv": smallest,
        "cokernel_bijective": bool(bijective),
        "degree_overflow": overflow,
        "pass": bool(max(residuals.values()) <= tol and bijective
                     and overflow <= tol),
    }
    return report
