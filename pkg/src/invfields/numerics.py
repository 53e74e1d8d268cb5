"""Small shared numerical helpers: finite differences and damped Newton."""

from __future__ import annotations

import numpy as np

from .errors import DegeneratePointError, NoConvergenceError

EPS = np.finfo(float).eps


def fd_jacobian(func, x, step):
    """Central-difference Jacobian of ``func`` at ``x`` with uniform step."""
    x = np.asarray(x, dtype=float)
    f0 = np.asarray(func(x), dtype=float)
    jac = np.zeros((f0.size, x.size))
    for j in range(x.size):
        dx = np.zeros_like(x)
        dx[j] = step
        jac[:, j] = (np.asarray(func(x + dx)) - np.asarray(func(x - dx))) / (2.0 * step)
    return jac


def richardson_jacobian(func, x, step=None):
    """Jacobian by central differences with one Richardson extrapolation.

    Returns ``(jac, err_est)`` where the estimate is the standard
    ``|J(h) - J(h/2)| / 15`` bound for the extrapolated (order-4) value.
    """
    x = np.asarray(x, dtype=float)
    if step is None:
        step = EPS ** (1.0 / 3.0) * max(1.0, float(np.linalg.norm(x)))
    coarse = fd_jacobian(func, x, step)
    fine = fd_jacobian(func, x, step / 2.0)
    jac = (4.0 * fine - coarse) / 3.0
    err = float(np.max(np.abs(fine - coarse))) / 15.0 if coarse.size else 0.0
    return jac, err


def damped_newton(residual, x0, *, jacobian=None, tol=1e-12, max_iter=50,
                  fd_step=1e-7, max_damping=30, lstsq=False):
    """Damped Newton iteration for ``residual(x) = 0``.

    ``jacobian`` defaults to central finite differences.  Steps are halved
    while the residual norm fails to decrease.  With ``lstsq=True`` the
    linear solve uses least squares, which tolerates rank-deficient
    Jacobians (solution families).  Returns ``(x, norm, n_iter)``.
    """
    x = np.array(x0, dtype=float)
    r = np.asarray(residual(x), dtype=float)
    norm = float(np.linalg.norm(r))
    for iteration in range(max_iter):
        if norm <= tol:
            return x, norm, iteration
        jac = jacobian(x) if jacobian is not None else fd_jacobian(residual, x, fd_step)
        if lstsq:
            step = np.linalg.lstsq(jac, -r, rcond=None)[0]
        else:
            try:
                step = np.linalg.solve(jac, -r)
            except np.linalg.LinAlgError as exc:
                raise DegeneratePointError(f"singular Jacobian in Newton step: {exc}") from exc
        scale = 1.0
        for _ in range(max_damping):
            x_new = x + scale * step
            r_new = np.asarray(residual(x_new), dtype=float)
            norm_new = float(np.linalg.norm(r_new))
            if norm_new < norm or norm_new <= tol:
                break
            scale *= 0.5
        else:
            raise NoConvergenceError(
                f"Newton stalled at residual {norm:.3e}", residual=norm)
        x, r, norm = x_new, r_new, norm_new
    if norm <= tol:
        return x, norm, max_iter
    raise NoConvergenceError(
        f"Newton did not reach tol={tol:.1e} in {max_iter} iterations "
        f"(final residual {norm:.3e})", residual=norm)
