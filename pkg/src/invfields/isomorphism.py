"""The isomorphism relation on invariant vector fields.

Two invariant fields X, Y are isomorphic when X = Y + psi_V for an
equivariant map psi into the algebra; psi is the *witness*.  This module
verifies candidate witnesses by sampling, recovers witnesses pointwise on
the locally free locus by least squares, and checks the observable
consequence: isomorphic fields induce the same flow on invariant functions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ContractViolationError,
    InvalidInputError,
    SingularPointError,
    TrajectoryEscapeError,
)
from .flows import integrate_flow
from .representations import (
    EquivariantMap,
    Representation,
    VectorField,
    check_equivariance,
    sample_group_elements,
    sample_points,
)

# construction identities are exact algebra; recovery certification and
# flow-based checks sit above them by the integrator error
TOL_CONSTRUCTION = 1e-12
TOL_RECOVERY = 1e-8
TOL_FLOW = 1e-6


@dataclass
class IsoWitness:
    X: VectorField
    Y: VectorField
    psi: EquivariantMap
    verified_residual: float
    tolerance: float
    sample_descriptor: dict

    @property
    def valid(self) -> bool:
        return self.verified_residual <= self.tolerance

    def reversed(self) -> "IsoWitness":
        """The witness -psi for Y = X + (-psi)_V; same residual by symmetry."""
        return IsoWitness(self.Y, self.X, -self.psi, self.verified_residual,
                          self.tolerance, self.sample_descriptor)


def witness_residual(X: VectorField, Y: VectorField, psi: EquivariantMap,
                     points) -> float:
    """Max over points of ||X(v) - Y(v) - delta_rho(psi(v)) v||."""
    rep = X.rep
    worst = 0.0
    for v in points:
        v = np.asarray(v, dtype=float)
        worst = max(worst, float(np.linalg.norm(
            X(v) - Y(v) - rep.delta_rho(psi(v)) @ v)))
    return worst


def verify_isomorphism(X: VectorField, Y: VectorField, psi: EquivariantMap,
                       points=None, *, seed: int = 0, n_points: int = 24,
                       radius: float = 2.0, tolerance: float = TOL_CONSTRUCTION,
                       equivariance_tol: float = 1e-8,
                       n_group: int = 10) -> IsoWitness:
    """Check X = Y + psi_V on sampled points and return the witness record.

    psi must itself pass the equivariance check; a failing psi is a
    contract violation, not merely a large residual.
    """
    X.rep.require_compatible(Y.rep)
    X.rep.require_compatible(psi.rep)
    rng = np.random.default_rng(seed)
    if points is None:
        points = sample_points(rng, X.rep.dim_V, n_points, radius)
    points = np.asarray(points, dtype=float).reshape(-1, X.rep.dim_V)
    gs = sample_group_elements(X.rep.group, rng, n_group)
    eq_res = check_equivariance(psi, gs, points)
    if eq_res > equivariance_tol:
        raise ContractViolationError(
            f"psi is not equivariant (sampled residual {eq_res:.2e} > "
            f"{equivariance_tol:.1e})")
    residual = witness_residual(X, Y, psi, points)
    descriptor = {"seed": seed, "n_points": int(points.shape[0]),
                  "n_group": n_group, "radius": radius}
    return IsoWitness(X, Y, psi, residual, tolerance, descriptor)


def recover_witness(X: VectorField, Y: VectorField, points, *,
                    rank_threshold: float = 1e-10):
    """Pointwise least-squares witness on the locally free locus.

    At each point the candidate psi(v) minimizes ||delta_rho(xi) v - (X-Y)(v)||
    over the algebra; rank deficiency of xi -> delta_rho(xi) v means the
    action is not locally free there and raises :class:`SingularPointError`.
    Returns ``(psi, max_residual, table)`` where psi is an EquivariantMap
    evaluating the same least-squares solve at any point and ``table`` maps
    the requested points to their algebra coordinates.
    """
    X.rep.require_compatible(Y.rep)
    rep = X.rep
    k = rep.group.dim

    def solve(v):
        v = np.asarray(v, dtype=float)
        A = np.column_stack([rep.delta_rho_basis[i] @ v for i in range(k)]) \
            if k else np.zeros((rep.dim_V, 0))
        if k:
            svals = np.linalg.svd(A, compute_uv=False)
            if svals.size < k or svals[-1] <= rank_threshold * max(1.0, svals[0]):
                raise SingularPointError(
                    f"action is not locally free at {np.round(v, 6).tolist()}",
                    point=v)
        rhs = X(v) - Y(v)
        coords, *_ = np.linalg.lstsq(A, rhs, rcond=None) if k else (np.zeros(0),)
        residual = float(np.linalg.norm(A @ coords - rhs)) if k else float(np.linalg.norm(rhs))
        return coords, residual

    table = []
    worst = 0.0
    for v in points:
        coords, residual = solve(v)
        table.append((np.asarray(v, dtype=float), coords))
        worst = max(worst, residual)

    psi = EquivariantMap(rep, lambda v: solve(v)[0],
                         {"kind": "recovered", "points": len(table)})
    return psi, worst, table


def default_invariant_functions(rep: Representation):
    """Named generators of invariant scalars: block norms and shared-block dots."""
    funcs = {}
    for (a, b) in rep.blocks:
        funcs[f"|v[{a}:{b}]|^2"] = (lambda v, a=a, b=b: float(v[a:b] @ v[a:b]))
    if rep.shared_blocks and len(rep.blocks) > 1:
        for i, (a, b) in enumerate(rep.blocks):
            for j, (c, d) in enumerate(rep.blocks):
                if j <= i:
                    continue
                funcs[f"v[{a}:{b}].v[{c}:{d}]"] = (
                    lambda v, a=a, b=b, c=c, d=d: float(v[a:b] @ v[c:d]))
    return funcs


def orbit_flow_check(X: VectorField, Y: VectorField, invariant_functions=None,
                     points=None, t_grid=None, *, h: float | None = None,
                     t_end: float = 1.0, seed: int = 0, n_points: int = 8,
                     radius: float = 1.5, domain_radius: float = 50.0) -> float:
    """Max over points, times, invariant functions of |f(Phi^X_t) - f(Phi^Y_t)|.

    Isomorphic fields must agree to integrator accuracy; a genuinely
    different pair shows an O(1) discrepancy.
    """
    X.rep.require_compatible(Y.rep)
    if invariant_functions is None:
        invariant_functions = default_invariant_functions(X.rep)
    if isinstance(invariant_functions, dict):
        invariant_functions = list(invariant_functions.values())
    if not invariant_functions:
        raise InvalidInputError("no invariant functions to compare")
    if points is None:
        rng = np.random.default_rng(seed)
        points = sample_points(rng, X.rep.dim_V, n_points, radius)
    if t_grid is not None:
        t_grid = np.asarray(t_grid, dtype=float)
        t_end = float(t_grid[-1])
        h = float(t_grid[1] - t_grid[0])
    if h is None:
        h = 1e-3
    worst = 0.0
    for v0 in points:
        tx = integrate_flow(X, v0, t_end, h)
        ty = integrate_flow(Y, v0, t_end, h)
        for traj in (tx, ty):
            norms = np.linalg.norm(traj.points, axis=1)
            if norms.max() > domain_radius:
                idx = int(np.argmax(norms > domain_radius))
                raise TrajectoryEscapeError(
                    f"trajectory left |v| <= {domain_radius} at t = {traj.t[idx]:.6g}",
                    escape_time=float(traj.t[idx]))
        for f in invariant_functions:
            fx = np.array([f(p) for p in tx.points])
            fy = np.array([f(p) for p in ty.points])
            worst = max(worst, float(np.max(np.abs(fx - fy))))
    return worst
