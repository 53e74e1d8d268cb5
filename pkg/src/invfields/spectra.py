"""Linearization at equilibria of slice fields and spectra comparison.

The linearization of a slice field at a relative equilibrium depends on the
slice and on the splitting, but only up to an additive ``delta_rho(xi)``
with xi in the part of the stabilizer algebra fixed by the whole stabilizer
(h^H).  Since the stabilizer is compact those shifts are purely imaginary
rotations, so real parts of eigenvalues are slice-independent; when h^H is
zero the full spectrum is.  :func:`compare_slice_spectra` measures all of
this on explicit matrices.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import (
    NotEquilibriumError,
    PairingAmbiguityWarning,
    TheoremViolationError,
)
from .groups import AlgebraVector, GroupSpec, Splitting
from .numerics import EPS, fd_jacobian
from .representations import EquivariantMap, VectorField
from .slices import Slice, SliceField, default_splitting, transition_frame_map


@dataclass
class LinearizationReport:
    point: np.ndarray
    matrix: np.ndarray
    eigenvalues: np.ndarray       # sorted by (Re desc, Im desc)
    eigenvectors: np.ndarray      # columns matching eigenvalues
    fd_step: float
    richardson_error: float


def _sorted_eig(D):
    vals, vecs = scipy.linalg.eig(D)
    order = np.lexsort((-vals.imag, -vals.real))
    return vals[order], vecs[:, order]


def linearize(X, x, basis=None, *, equilibrium_tol: float = 1e-8,
              fd_step: float | None = None) -> LinearizationReport:
    """Jacobian of a field at an equilibrium, in the given coordinate frame.

    ``X`` may be a VectorField on V or any callable on frame coordinates;
    ``basis`` (columns) restricts to a subspace, defaulting to the identity
    frame.  Central differences at steps h and h/2 are Richardson-combined;
    the reported error estimate is ``max|D(h) - D(h/2)| / 15``.
    """
    x = np.asarray(x, dtype=float)
    if basis is None:
        dim = x.shape[0]
        basis = np.eye(dim)
    basis = np.asarray(basis, dtype=float)

    if isinstance(X, VectorField):
        def func(s):
            return basis.T @ X(x + basis @ s)
    else:
        def func(s):
            return np.asarray(X(s), dtype=float)

    zero = np.zeros(basis.shape[1])
    f0 = func(zero)
    if float(np.linalg.norm(f0)) > equilibrium_tol:
        raise NotEquilibriumError(
            f"not an equilibrium: |X(x)| = {float(np.linalg.norm(f0)):.2e} > "
            f"{equilibrium_tol:.1e}")
    if fd_step is None:
        fd_step = EPS ** (1.0 / 3.0) * max(1.0, float(np.linalg.norm(x)))
    coarse = fd_jacobian(func, zero, fd_step)
    fine = fd_jacobian(func, zero, fd_step / 2.0)
    D = (4.0 * fine - coarse) / 3.0
    err = float(np.max(np.abs(fine - coarse))) / 15.0 if D.size else 0.0
    vals, vecs = _sorted_eig(D)
    return LinearizationReport(x, D, vals, vecs, fd_step, err)


@dataclass
class FixedSubalgebra:
    """Basis of the stabilizer-algebra vectors fixed by the whole stabilizer."""

    group: GroupSpec
    rows: np.ndarray     # (d, k) algebra coordinates

    @property
    def dim(self) -> int:
        return self.rows.shape[0]

    @property
    def basis(self):
        return [AlgebraVector(self.group, r) for r in self.rows]


def fixed_subalgebra(group: GroupSpec, h_rows, component_gens) -> FixedSubalgebra:
    """{xi in h : Ad(h) xi = xi for all h} via a simultaneous kernel.

    Component generators contribute (Ad(c) - I) conditions; the connected
    part contributes the brackets with every basis element of h.
    """
    h_rows = np.asarray(h_rows, dtype=float).reshape(-1, group.dim)
    kh = h_rows.shape[0]
    if kh == 0:
        return FixedSubalgebra(group, np.zeros((0, group.dim)))
    conditions = []
    for c in component_gens:
        ad = group.adjoint_matrix(c)
        conditions.append((ad - np.eye(group.dim)) @ h_rows.T)
    for row in h_rows:
        mat = group.algebra_matrix(row)
        cols = []
        for other in h_rows:
            m2 = group.algebra_matrix(other)
            cols.append(group.algebra_coords(mat @ m2 - m2 @ mat))
        conditions.append(np.column_stack(cols))
    stacked = np.vstack(conditions) if conditions else np.zeros((0, kh))
    if stacked.size == 0:
        coeff_rows = np.eye(kh)
    else:
        _, s, vt = np.linalg.svd(stacked)
        s = np.concatenate([s, np.zeros(max(0, kh - s.shape[0]))])
        rank = int(np.sum(s > 1e-10 * max(1.0, s[0] if s.size else 1.0)))
        coeff_rows = vt[rank:]
    return FixedSubalgebra(group, coeff_rows @ h_rows)


def shift_check(X: VectorField, Y: VectorField, psi: EquivariantMap, *,
                zero_tol: float = 1e-8) -> float:
    """Residual of DX(0) = DY(0) + delta_rho(psi(0)) in Frobenius norm.

    Requires X(0) = 0; then Y(0) = 0 is implied and verified, not assumed.
    """
    X.rep.require_compatible(Y.rep)
    zero = np.zeros(X.rep.dim_V)
    if float(np.linalg.norm(X(zero))) > zero_tol:
        raise NotEquilibriumError("X(0) != 0; the shift identity needs an equilibrium")
    if float(np.linalg.norm(Y(zero))) > zero_tol:
        raise TheoremViolationError(
            "Y(0) != 0 although X(0) = 0; the witness is broken")
    DX = linearize(X, zero).matrix
    DY = linearize(Y, zero).matrix
    shift = X.rep.delta_rho(psi(zero))
    return float(np.linalg.norm(DX - DY - shift, "fro"))


@dataclass
class SpectraComparison:
    D1: np.ndarray
    D2: np.ndarray
    frame_map: np.ndarray
    delta: np.ndarray
    fixed_dim: int
    membership_residual: float
    xi_star: np.ndarray                 # algebra coordinates of the h^H projection
    commutation_residual: float
    shift_real_bound: float             # max |Re lambda| over delta_rho(h^H) basis
    pairs: list = field(default_factory=list)   # (lambda1, lambda2) matched
    max_re_diff: float = 0.0
    im_diffs: np.ndarray | None = None
    transport_defect: float = 0.0
    defective: bool = False
    pairing_ambiguous: bool = False


def _cluster_by_real(vals, tol=1e-6):
    order = np.lexsort((-vals.imag, -vals.real))
    vals = vals[order]
    clusters = []
    for i, v in enumerate(vals):
        if clusters and abs(v.real - clusters[-1][-1][1].real) <= tol:
            clusters[-1].append((order[i], v))
        else:
            clusters.append([(order[i], v)])
    return clusters


def compare_slice_spectra(X: VectorField, slice1: Slice, slice2: Slice,
                          splitting1: Splitting | None = None,
                          splitting2: Splitting | None = None,
                          *, equilibrium_tol: float = 1e-8,
                          cluster_tol: float = 1e-6) -> SpectraComparison:
    """Compare slice-field linearizations across two slice/splitting choices.

    Reports (a) the Frobenius distance of Delta = D2 - T D1 T^-1 from the
    span of ``delta_rho(xi)`` over the fixed subalgebra h^H, (b) eigenvalue
    pairing by real part, and (c) the commutation of the transported D1
    with the projected shift.
    """
    if splitting1 is None:
        splitting1 = default_splitting(slice1)
    if splitting2 is None:
        splitting2 = splitting1
    rep = X.rep
    group = rep.group
    x = slice1.base_point

    sf1 = SliceField(X, slice1, splitting1)
    sf2 = SliceField(X, slice2, splitting2)
    for sf, slc in ((sf1, slice1), (sf2, slice2)):
        res = float(np.linalg.norm(sf.value(slc.base_point)))
        if res > equilibrium_tol:
            raise NotEquilibriumError(
                f"slice field is not at an equilibrium (|X^S(x)| = {res:.2e})")

    rep1 = linearize(sf1.coords_func, np.zeros(slice1.dim))
    rep2 = linearize(sf2.coords_func, np.zeros(slice2.dim))
    D1, D2 = rep1.matrix, rep2.matrix

    same_frame = (slice1 is slice2) or (
        np.allclose(slice1.basis, slice2.basis, atol=1e-13)
        and np.allclose(slice1.base_point, slice2.base_point, atol=1e-13))
    T = np.eye(slice1.dim) if same_frame else transition_frame_map(
        slice1, slice2, splitting=splitting1)
    D1_t = T @ D1 @ np.linalg.inv(T)
    delta = D2 - D1_t

    fixed = fixed_subalgebra(group, slice2.stab_coords, slice2.stab_component_gens)
    gen_frames = [slice2.basis.T @ slice2.metric_matrix @ rep.delta_rho(row) @ slice2.basis
                  for row in fixed.rows]
    if gen_frames:
        G = np.column_stack([g.reshape(-1) for g in gen_frames])
        coeff, *_ = np.linalg.lstsq(G, delta.reshape(-1), rcond=None)
        membership = float(np.linalg.norm(G @ coeff - delta.reshape(-1)))
        xi_star = fixed.rows.T @ coeff
        shift_frame = sum(c * g for c, g in zip(coeff, gen_frames))
        commutation = float(np.linalg.norm(D1_t @ shift_frame - shift_frame @ D1_t, "fro"))
        shift_real = max(
            float(np.max(np.abs(np.linalg.eigvals(g).real))) for g in gen_frames)
    else:
        membership = float(np.linalg.norm(delta, "fro"))
        xi_star = np.zeros(group.dim)
        commutation = 0.0
        shift_real = 0.0

    # pair eigenvalues by clusters of equal real part
    c1 = _cluster_by_real(rep1.eigenvalues, cluster_tol)
    c2 = _cluster_by_real(rep2.eigenvalues, cluster_tol)
    ambiguous = len(c1) != len(c2) or any(
        len(a) != len(b) for a, b in zip(c1, c2))
    if ambiguous:
        warnings.warn("eigenvalue clusters have mismatched multiplicities; "
                      "pairing by sorted order instead",
                      PairingAmbiguityWarning, stacklevel=2)
        paired = list(zip(rep1.eigenvalues, rep2.eigenvalues))
    else:
        paired = []
        for a, b in zip(c1, c2):
            for (_, va), (_, vb) in zip(a, b):
                paired.append((va, vb))
    max_re = max(abs(a.real - b.real) for a, b in paired) if paired else 0.0
    im_diffs = np.array([abs(a.imag - b.imag) for a, b in paired])

    # eigenvector transport: T v must land in the invariant subspace of D2
    # associated with the paired real-part cluster
    vals2, vecs2 = rep2.eigenvalues, rep2.eigenvectors
    cond2 = np.linalg.cond(vecs2) if vecs2.size else 1.0
    defective = bool(cond2 > 1e8)
    transport = 0.0
    if not defective and not ambiguous:
        for cluster1, cluster2 in zip(c1, c2):
            idx2 = [pos for pos, _ in cluster2]
            Wb = np.linalg.qr(vecs2[:, idx2])[0]
            for pos, _ in cluster1:
                tv = T @ rep1.eigenvectors[:, pos]
                tv = tv / np.linalg.norm(tv)
                transport = max(transport, float(np.linalg.norm(
                    tv - Wb @ (Wb.conj().T @ tv))))
    return SpectraComparison(D1, D2, T, delta, fixed.dim, membership, xi_star,
                             commutation, shift_real, paired, float(max_re),
                             im_diffs, transport, defective, ambiguous)
