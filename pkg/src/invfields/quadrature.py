"""Exact averaging rules over the catalog's compact groups.

A rule is a weighted list of group elements that integrates the relevant
class of functions *exactly*: finite sums for finite groups, equispaced
circle nodes for one-parameter subgroups and tori (exact for trigonometric
polynomials up to the requested degree), and an Euler-angle rule for the
rotation group in three dimensions (equispaced nodes in the two axial
angles, Gauss-Legendre in the cosine of the middle angle).  Component
representatives multiply into every rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientQuadratureError
from .groups import GroupSpec


@dataclass
class GroupQuadrature:
    elements: list
    weights: np.ndarray

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        if len(self.elements) != self.weights.shape[0]:
            raise ValueError("elements and weights must have equal length")

    def __len__(self):
        return len(self.elements)

    def average(self, func):
        total = None
        for w, g in zip(self.weights, self.elements):
            term = w * np.asarray(func(g), dtype=float)
            total = term if total is None else total + term
        return total


def finite_closure(mats, *, cap=4096, tol=1e-9):
    """Close a list of matrices under multiplication (small groups only)."""
    elems = []

    def key(m):
        return np.round(m / tol).astype(np.int64).tobytes()

    seen = set()
    frontier = [np.asarray(m, dtype=float) for m in mats]
    for m in frontier:
        k = key(m)
        if k not in seen:
            seen.add(k)
            elems.append(m)
    while frontier:
        nxt = []
        for a in frontier:
            for b in elems[:]:
                for prod in (a @ b, b @ a):
                    k = key(prod)
                    if k not in seen:
                        seen.add(k)
                        elems.append(prod)
                        nxt.append(prod)
                        if len(elems) > cap:
                            raise InsufficientQuadratureError(
                                f"finite closure exceeded {cap} elements")
        frontier = nxt
    return elems


def integer_weights(mat, *, tol=1e-6) -> int:
    """Largest integer rotation weight of a periodic one-parameter generator.

    The eigenvalues of the generator must be (approximately) integer
    multiples of i; returns the maximum absolute weight (>= 1).
    """
    eigs = np.linalg.eigvals(np.asarray(mat, dtype=float))
    if np.max(np.abs(eigs.real)) > tol:
        raise InsufficientQuadratureError(
            "generator has non-imaginary eigenvalues; no periodic quadrature")
    weights = np.abs(eigs.imag)
    weights = weights[weights > tol]
    if weights.size == 0:
        return 0
    rounded = np.round(weights)
    if np.max(np.abs(weights - rounded)) > tol:
        raise InsufficientQuadratureError(
            f"generator weights {sorted(set(np.round(weights, 6)))} are not integers; "
            "one-parameter subgroup is not 2*pi-periodic")
    return int(rounded.max())


def _circle_elements(group: GroupSpec, coords, n_nodes):
    return [group.exp(coords, 2.0 * math.pi * i / n_nodes) for i in range(n_nodes)]


def _with_components(group: GroupSpec, elements, weights):
    comps = group.component_reps
    all_elems, all_w = [], []
    for c in comps:
        for g, w in zip(elements, weights):
            all_elems.append(c @ g)
            all_w.append(w / len(comps))
    return GroupQuadrature(all_elems, np.array(all_w))


def _is_so3_basis(group: GroupSpec, tol=1e-8) -> bool:
    if group.dim != 3:
        return False
    try:
        c12 = group.bracket([1.0, 0.0, 0.0], [0.0, 1.0, 0.0])
        c23 = group.bracket([0.0, 1.0, 0.0], [0.0, 0.0, 1.0])
        c31 = group.bracket([0.0, 0.0, 1.0], [1.0, 0.0, 0.0])
    except Exception:
        return False
    target = np.eye(3)
    got = np.array([c12, c23, c31])[:, [2, 0, 1]]
    return bool(np.max(np.abs(got - target)) < tol)


def group_rule(group: GroupSpec, trig_degree: int) -> GroupQuadrature:
    """Averaging rule exact for matrix-entry polynomials of the given degree.

    ``trig_degree`` bounds the trigonometric degree (per circle factor, or
    the representation index for the rotation group) of the integrand.
    """
    if group.family == "finite" or group.dim == 0:
        elems = finite_closure(group.component_reps)
        return GroupQuadrature(elems, np.full(len(elems), 1.0 / len(elems)))
    deg = max(int(trig_degree), 1)
    if group.dim == 1:
        w = integer_weights(group.algebra_basis[0])
        if w == 0:
            raise InsufficientQuadratureError("circle generator acts trivially")
        n = 2 * deg * w + 1
        coords = np.array([1.0])
        elems = _circle_elements(group, coords, n)
        return _with_components(group, elems, np.full(n, 1.0 / n))
    brackets_vanish = all(
        np.max(np.abs(group.algebra_basis[i] @ group.algebra_basis[j]
                      - group.algebra_basis[j] @ group.algebra_basis[i])) < 1e-12
        for i in range(group.dim) for j in range(group.dim))
    if brackets_vanish:
        # torus: product of circle rules over the basis
        elems = [group.identity]
        weights = [1.0]
        for i in range(group.dim):
            w = integer_weights(group.algebra_basis[i])
            if w == 0:
                raise InsufficientQuadratureError("torus generator acts trivially")
            n = 2 * deg * w + 1
            coords = np.zeros(group.dim)
            coords[i] = 1.0
            circle = _circle_elements(group, coords, n)
            elems = [e @ c for e in elems for c in circle]
            weights = [we / n for we in weights for _ in range(n)]
        return _with_components(group, elems, np.array(weights))
    if _is_so3_basis(group):
        # z-y-z Euler angles: equispaced alpha and gamma, Gauss-Legendre in
        # cos(beta) with Haar weight sin(beta) d beta / 2
        n_axial = 2 * deg + 1
        n_beta = deg + 1
        nodes_u, w_u = np.polynomial.legendre.leggauss(n_beta)
        ez = np.array([0.0, 0.0, 1.0])
        ey = np.array([0.0, 1.0, 0.0])
        elems, weights = [], []
        for iu, u in enumerate(nodes_u):
            beta = math.acos(float(np.clip(u, -1.0, 1.0)))
            g_beta = group.exp(ey, beta)
            for ia in range(n_axial):
                alpha = 2.0 * math.pi * ia / n_axial
                g_alpha = group.exp(ez, alpha)
                for ig in range(n_axial):
                    gamma = 2.0 * math.pi * ig / n_axial
                    elems.append(g_alpha @ g_beta @ group.exp(ez, gamma))
                    weights.append(w_u[iu] / (2.0 * n_axial * n_axial))
        return _with_components(group, elems, np.array(weights))
    raise InsufficientQuadratureError(
        f"no exact averaging rule for group {group.name} "
        f"(dim {group.dim}, family {group.family}); supported: finite groups, "
        f"tori/circles with integer weights, and the rotation group basis")
