"""Monomial bookkeeping for dense polynomial maps R^n -> R^T.

Monomials are indexed in graded order (total degree, then a fixed
lexicographic order within each degree), so the basis of degree <= d is a
prefix of the basis of degree <= d+1.  Coefficient matrices have shape
(target_dim, n_monomials); multiplication by a linear form and substitution
of a linear map are exact index operations, no sampling involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np


def monomial_count(n_vars: int, max_degree: int) -> int:
    return math.comb(n_vars + max_degree, max_degree)


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@dataclass
class MonomialBasis:
    n_vars: int
    max_degree: int

    def __post_init__(self):
        exps = []
        for total in range(self.max_degree + 1):
            exps.extend(_compositions(total, self.n_vars))
        self.exponents = np.array(exps, dtype=int).reshape(-1, self.n_vars)
        self.index = {tuple(e): i for i, e in enumerate(exps)}

    def __len__(self):
        return self.exponents.shape[0]

    @cached_property
    def degrees(self) -> np.ndarray:
        return self.exponents.sum(axis=1)

    @cached_property
    def shift_tables(self):
        """shift_tables[j][i] = index of exponent_i + e_j, or -1 past max degree."""
        tables = []
        for j in range(self.n_vars):
            table = np.full(len(self), -1, dtype=int)
            for i, e in enumerate(self.exponents):
                if self.degrees[i] < self.max_degree:
                    shifted = list(e)
                    shifted[j] += 1
                    table[i] = self.index[tuple(shifted)]
            tables.append(table)
        return tables

    def evaluate(self, points) -> np.ndarray:
        """Monomial values, shape (n_monomials, n_points)."""
        pts = np.asarray(points, dtype=float).reshape(-1, self.n_vars)
        return np.prod(pts[None, :, :] ** self.exponents[:, None, :], axis=2)

    def multiply_linear(self, row, a) -> np.ndarray:
        """Coefficients of (sum_j a_j x_j) * p for p with coefficients ``row``.

        ``row`` must be supported on degrees < max_degree.
        """
        row = np.asarray(row, dtype=float)
        out = np.zeros(len(self))
        nz = np.nonzero(row)[0]
        if nz.size and self.degrees[nz].max() >= self.max_degree:
            raise ValueError("input polynomial degree too high for this basis")
        for j in range(self.n_vars):
            if a[j] == 0.0 or nz.size == 0:
                continue
            idx = self.shift_tables[j][nz]
            out[idx] += a[j] * row[nz]
        return out

    def substitution_matrix(self, A) -> np.ndarray:
        """Matrix S with m(A v) = S @ m(v), rows indexed like the monomials."""
        A = np.asarray(A, dtype=float)
        S = np.zeros((len(self), len(self)))
        S[0, 0] = 1.0
        for i in range(1, len(self)):
            e = self.exponents[i]
            j = int(np.nonzero(e)[0][0])
            prev = list(e)
            prev[j] -= 1
            S[i] = self.multiply_linear(S[self.index[tuple(prev)]], A[j])
        return S

    def embed(self, row, smaller: "MonomialBasis") -> np.ndarray:
        """Pad coefficients from a lower-degree basis (same variables)."""
        if smaller.n_vars != self.n_vars or smaller.max_degree > self.max_degree:
            raise ValueError("incompatible monomial bases")
        out = np.zeros(len(self))
        out[: len(smaller)] = row
        return out
