"""Even damping coefficients represented by truncated Fourier cosine series."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class FourierDamping:
    """A damping coefficient alpha(x) = sum_m a_m cos(2(m-1) pi x) on [0, 1].

    ``coeffs[0]`` is the mean value; ``coeffs[m-1]`` multiplies
    ``cos(2(m-1) pi x)``.  The representation is automatically even about
    x = 1/2.
    """

    coeffs: np.ndarray = field()

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=float))
        if c.ndim != 1 or c.size < 1:
            raise ValueError("coeffs must be a nonempty 1-D real vector")
        object.__setattr__(self, "coeffs", c)

    @property
    def n_modes(self) -> int:
        return self.coeffs.size

    @property
    def mean(self) -> float:
        """Mean value of the damping over [0, 1] (the first coefficient)."""
        return float(self.coeffs[0])

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        m = np.arange(self.n_modes)
        # cos(2(m-1) pi x) with 1-based m; the m=1 term is the constant 1.
        vals = np.cos(TWO_PI * x[..., None] * m) @ self.coeffs
        return float(vals) if vals.ndim == 0 else vals

    def __call__(self, x):
        return self.evaluate(x)

    def padded(self, n_modes: int) -> "FourierDamping":
        """Zero-pad (or truncate) to exactly ``n_modes`` coefficients."""
        c = np.zeros(n_modes)
        k = min(n_modes, self.n_modes)
        c[:k] = self.coeffs[:k]
        return FourierDamping(c)

    def __add__(self, other: "FourierDamping") -> "FourierDamping":
        n = max(self.n_modes, other.n_modes)
        return FourierDamping(self.padded(n).coeffs + other.padded(n).coeffs)

    def __sub__(self, other: "FourierDamping") -> "FourierDamping":
        n = max(self.n_modes, other.n_modes)
        return FourierDamping(self.padded(n).coeffs - other.padded(n).coeffs)


def clenshaw_curtis(n: int):
    """Clenshaw-Curtis nodes and weights on [0, 1], ``n + 1`` points, n even."""
    if n < 2 or n % 2:
        raise ValueError("n must be even and >= 2")
    k = np.arange(n + 1)
    nodes = 0.5 * (1.0 - np.cos(np.pi * k / n))
    j = np.arange(1, n // 2 + 1)
    b = np.where(j == n // 2, 1.0, 2.0)
    # w_k = (c_k/n) (1 - sum_j b_j cos(2 j k pi / n) / (4 j^2 - 1)) on [-1, 1]
    cosmat = np.cos(2.0 * np.pi * np.outer(k, j) / n)
    w = (1.0 - cosmat @ (b / (4.0 * j**2 - 1.0))) / n
    w[1:-1] *= 2.0  # c_k = 2 at interior nodes
    return nodes, 0.5 * w


def cosine_coefficients(f, n_modes: int, n_quad: int = 2048) -> FourierDamping:
    """Project a function on [0, 1] onto the even cosine basis.

    a_1 = int f, a_m = 2 int f(x) cos(2(m-1) pi x) dx for m >= 2.
    """
    x, w = clenshaw_curtis(n_quad)
    try:
        fx = np.asarray(f(x), dtype=float)
        if fx.shape != x.shape:
            raise ValueError
    except (ValueError, TypeError):
        # f may only accept scalars (e.g. piecewise definitions)
        fx = np.asarray([f(xi) for xi in x], dtype=float)
    m = np.arange(n_modes)
    basis = np.cos(TWO_PI * np.outer(x, m))
    coeffs = basis.T @ (w * fx)
    coeffs[1:] *= 2.0
    return FourierDamping(coeffs)
