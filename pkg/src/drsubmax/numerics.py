"""Dense linear-algebra helpers and finite-difference oracles."""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve

from .exceptions import DrSubmaxError, NotSPDError

SYM_RTOL = 1e-12


def check_symmetric(M, rtol=SYM_RTOL, name="matrix"):
    """Return ``M`` as a float array, raising if it is not square symmetric."""
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be square, got shape {M.shape}")
    scale = max(1.0, float(np.max(np.abs(M)))) if M.size else 1.0
    if M.size and np.max(np.abs(M - M.T)) > rtol * scale:
        raise ValueError(f"{name} is not symmetric")
    return M


@dataclass(frozen=True)
class CholeskyFactor:
    """Lower-triangular Cholesky factor ``L`` with ``M = L L^T``."""

    L: np.ndarray

    @property
    def n(self):
        return self.L.shape[0]


def factor_logdet(M):
    """Cholesky-factor an SPD matrix.

    Returns
    -------
    logdet : float
        ``log det(M)``.
    factor : CholeskyFactor
        Reusable with :func:`solve_with_factor`.
    """
    M = check_symmetric(M)
    try:
        L = np.linalg.cholesky(M)
    except np.linalg.LinAlgError as exc:
        raise NotSPDError("matrix is not positive definite (non-positive pivot)") from exc
    logdet = 2.0 * float(np.sum(np.log(np.diag(L))))
    return logdet, CholeskyFactor(L)


def solve_with_factor(factor, B):
    """Solve ``M X = B`` given the Cholesky factor of ``M``."""
    B = np.asarray(B, dtype=np.float64)
    if B.shape[0] != factor.n:
        raise ValueError(f"dimension mismatch: factor is {factor.n}x{factor.n}, rhs has {B.shape[0]} rows")
    return cho_solve((factor.L, True), B)


def random_orthogonal(n, seed):
    """Haar-distributed orthogonal matrix.

    QR of a standard Gaussian matrix, with the columns of Q rescaled by the
    signs of diag(R) so the distribution is uniform on O(n).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    G = rng.standard_normal((n, n))
    Q, R = np.linalg.qr(G)
    signs = np.sign(np.diag(R))
    signs[signs == 0] = 1.0
    return Q * signs


def _default_step(x):
    return 1e-5 * (1.0 + np.abs(x))


def finite_diff_gradient(f, x, step=None, lower=None, upper=None):
    """Central-difference gradient of scalar ``f`` at ``x``.

    ``step`` may be a scalar or per-coordinate array; the default is
    ``1e-5 * (1 + |x_i|)``. When ``lower``/``upper`` are given the perturbed
    points must stay inside them.
    """
    x = np.asarray(x, dtype=np.float64)
    h = _default_step(x) if step is None else np.broadcast_to(np.asarray(step, dtype=np.float64), x.shape)
    if lower is not None and np.any(x - h < np.asarray(lower) - 1e-15):
        raise DrSubmaxError("finite-difference stencil leaves the domain (below lower bound)")
    if upper is not None and np.any(x + h > np.asarray(upper) + 1e-15):
        raise DrSubmaxError("finite-difference stencil leaves the domain (above upper bound)")
    g = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h[i]
        g[i] = (f(x + e) - f(x - e)) / (2.0 * h[i])
    return g


def finite_diff_hessian(grad, x, step=1e-5):
    """Central differences of an analytic gradient, symmetrized.

    Differencing the gradient instead of the value keeps rounding error at
    eps*|grad|/h rather than eps*|f|/h^2.
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    H = np.empty((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = step
        H[:, j] = (grad(x + e) - grad(x - e)) / (2.0 * step)
    return 0.5 * (H + H.T)
