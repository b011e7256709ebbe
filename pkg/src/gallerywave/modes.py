"""Gallery-mode eigenbasis of the model operator on the half-line.

After a Fourier transform in the tangential variables, the model operator
becomes -d^2/dx^2 + |eta|^2 + x q(eta) on x > 0 with a Dirichlet condition,
where q is the positive quadratic form of the metric tilt.  Its normalized
eigenfunctions are shifted, rescaled Airy functions

    e_k(x, eta) = f_k (q^{1/6} / k^{1/6}) Ai(q^{1/3} x - omega_k),

with eigenvalues lambda_k(eta) = |eta|^2 + omega_k q(eta)^{2/3} and
normalization f_k = k^{1/6} / sqrt(integral_0^inf Ai^2(x - omega_k) dx).
The normalization integral is evaluated in closed form (ai_square_tail);
direct quadrature serves as a test oracle only.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .airy import ai_real, ai_square_tail, airy_zero

__all__ = [
    "ModelMetric",
    "GalleryMode",
    "q_eval",
    "eigenvalue",
    "mode_eval",
    "dirac_partial_sum",
]


@dataclass(frozen=True)
class ModelMetric:
    """Positive quadratic form q(eta) = sum r_jk eta_j eta_k of the metric tilt."""

    dimension: int
    coefficients: np.ndarray = field(default=None)  # (d-1, d-1) symmetric

    def __post_init__(self):
        if self.dimension not in (2, 3):
            raise ValueError(f"dimension must be 2 or 3, got {self.dimension}")
        n = self.dimension - 1
        coeffs = self.coefficients
        if coeffs is None:
            coeffs = np.eye(n)
        coeffs = np.asarray(coeffs, dtype=float).reshape(n, n)
        if not np.allclose(coeffs, coeffs.T, rtol=0.0, atol=1e-12):
            raise ValueError("coefficient matrix must be symmetric")
        # positive definiteness via leading principal minors
        for m in range(1, n + 1):
            if np.linalg.det(coeffs[:m, :m]) <= 0.0:
                raise ValueError("coefficient matrix must be positive definite")
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def isotropic(cls, dimension: int, scale: float = 1.0) -> "ModelMetric":
        """q(eta) = scale * |eta|^2; scale=1 is the classical isotropic model."""
        return cls(dimension, scale * np.eye(dimension - 1))

    @property
    def is_isotropic(self) -> bool:
        n = self.dimension - 1
        return bool(np.allclose(self.coefficients, self.coefficients[0, 0] * np.eye(n)))

    def header_value(self) -> str:
        return ",".join(f"{v:.12g}" for v in self.coefficients.ravel())


def q_eval(metric: ModelMetric, eta) -> float | np.ndarray:
    """Quadratic form value q(eta); eta has length d-1 (or a stack of them)."""
    eta = np.asarray(eta, dtype=float)
    n = metric.dimension - 1
    if eta.shape[-1] != n:
        raise ValueError(f"eta must have length {n}, got shape {eta.shape}")
    r = metric.coefficients
    return np.einsum("...i,ij,...j->...", eta, r, eta)


@dataclass(frozen=True)
class GalleryMode:
    """Mode index k with its Airy zero and L^2 normalization constant."""

    k: int
    omega_k: float
    f_k: float

    @classmethod
    def from_index(cls, k: int) -> "GalleryMode":
        if k < 1:
            raise ValueError(f"mode index must be >= 1, got {k}")
        omega = airy_zero(k)
        # integral Ai^2(x - omega_k) dx over (0, inf) equals Ai'(-omega_k)^2
        f_k = k ** (1.0 / 6.0) / np.sqrt(ai_square_tail(omega))
        return cls(k=k, omega_k=omega, f_k=float(f_k))


def _require_nonzero_eta(q_val) -> None:
    if np.any(np.asarray(q_val) <= 0.0):
        raise ValueError("eta must be nonzero")


def eigenvalue(mode: GalleryMode, eta, metric: ModelMetric) -> float | np.ndarray:
    """lambda_k(eta) = |eta|^2 + omega_k q(eta)^{2/3}, strictly positive."""
    eta = np.asarray(eta, dtype=float)
    q = q_eval(metric, eta)
    _require_nonzero_eta(q)
    return np.sum(eta * eta, axis=-1) + mode.omega_k * q ** (2.0 / 3.0)


def mode_eval(mode: GalleryMode, x, eta, metric: ModelMetric) -> float | np.ndarray:
    """Eigenfunction e_k(x, eta) for x >= 0; vanishes at x = 0 (Dirichlet)."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0):
        raise ValueError("x must be >= 0 (half-line)")
    q = q_eval(metric, eta)
    _require_nonzero_eta(q)
    amp = mode.f_k * q ** (1.0 / 6.0) / mode.k ** (1.0 / 6.0)
    return amp * ai_real(q ** (1.0 / 3.0) * x - mode.omega_k)


def dirac_partial_sum(a: float, x, eta, K: int, metric: ModelMetric) -> float | np.ndarray:
    """Partial sum sum_{k<=K} e_k(x, eta) e_k(a, eta) of the point-source expansion.

    Converges weakly (pairing against smooth test functions) to the Dirac mass
    at x = a as K grows.  Sources on or outside the boundary are rejected.
    """
    if a <= 0.0:
        raise ValueError("source height a must be > 0 (interior source)")
    if K < 1:
        raise ValueError("K must be >= 1")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0):
        raise ValueError("x must be >= 0 (half-line)")
    q = q_eval(metric, eta)
    _require_nonzero_eta(q)
    q13 = q ** (1.0 / 3.0)

    scalar = x.ndim == 0
    xs = np.atleast_1d(x)
    omegas = np.array([airy_zero(k) for k in range(1, K + 1)])
    # f_k^2 q^{1/3} / k^{1/3} = q^{1/3} / integral Ai^2
    weights = q13 / ai_square_tail(omegas)
    ai_a = ai_real(q13 * a - omegas)
    ai_x = ai_real(q13 * xs[None, :] - omegas[:, None])
    total = (weights * ai_a) @ ai_x
    return float(total[0]) if scalar else total
