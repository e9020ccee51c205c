"""Fourier-modal matrices, trace recursions and stabilized spectral sums.

Two routes to the same numbers live here.  On the coefficient side,
truncated modal matrices of the multiplication-by-cosine operator composed
with the inverse Dirichlet Laplacian are propagated through two-term and
three-term matrix recursions whose traces equal spectral sums.  On the
data side, the same sums are accumulated directly from (measured or
surrogate) eigenvalues in conjugate pairs.
"""

from __future__ import annotations

import functools
import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import mpmath
import numpy as np

from spectrace.damping import FourierDamping
from spectrace.forward import Spectrum

PI2 = np.pi**2


@dataclass(frozen=True)
class ModalMatrixSet:
    """Truncated J x J modal matrices for a cosine-series damping."""

    j_trunc: int
    basis_mats: tuple  # M1(e_m), m = 1..M
    m1_a: np.ndarray  # M1(a) = sum_m a_m M1(e_m)
    m1_one: np.ndarray  # M1(e_1), the diagonal -1/(pi^2 j^2)
    coeffs: np.ndarray = field(default=None)


@dataclass
class TraceVector:
    """Spectral sums t_1..t_N; ``kind`` records which polynomial family."""

    values: np.ndarray
    kind: str  # "raw_power" | "stabilized"
    alpha0: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.kind not in ("raw_power", "stabilized"):
            raise ValueError(f"unknown trace kind {self.kind!r}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("trace values must be finite")

    def __len__(self):
        return self.values.size

    def write_json(self, path) -> None:
        path = Path(path)
        tmp = path.with_suffix(path.suffix + ".tmp")
        payload = {
            "kind": self.kind,
            "alpha0": float(format(self.alpha0, ".15g")),
            "values": [float(format(v, ".15g")) for v in self.values],
        }
        tmp.write_text(json.dumps(payload, indent=1))
        tmp.replace(path)

    @classmethod
    def read_json(cls, path) -> "TraceVector":
        payload = json.loads(Path(path).read_text())
        return cls(np.array(payload["values"]), payload["kind"], payload["alpha0"])


@functools.lru_cache(maxsize=256)
def _m1_basis_cached(m: int, j_trunc: int) -> np.ndarray:
    mat = np.zeros((j_trunc, j_trunc))
    for j in range(1, j_trunc + 1):
        f = 1.0 / (2.0 * PI2 * j * j)
        for i in range(1, j_trunc + 1):
            if i + j + 2 * m - 2 == 0:  # unsatisfiable for positive indices
                mat[i - 1, j - 1] = f
            elif i + j - 2 * m + 2 == 0:
                mat[i - 1, j - 1] = f
            elif i - j + 2 * m - 2 == 0 and m != 1:
                mat[i - 1, j - 1] = -f
            elif i - j - 2 * m + 2 == 0 and m != 1:
                mat[i - 1, j - 1] = -f
            elif i == j and m == 1:
                mat[i - 1, j - 1] = -2.0 * f
    mat.setflags(write=False)
    return mat


def build_m1_basis(m: int, j_trunc: int) -> np.ndarray:
    """Modal matrix of cos(2(m-1) pi x) composed with the inverse Laplacian.

    Entries follow the closed-form overlap integrals of the sine basis; no
    quadrature is involved (quadrature appears only in tests as an oracle).
    """
    if m < 1 or j_trunc < 1:
        raise ValueError("m and j_trunc must be >= 1")
    return _m1_basis_cached(m, j_trunc)


def build_modal_set(a: FourierDamping, j_trunc: int) -> ModalMatrixSet:
    """Assemble all basis matrices and their a-weighted combination."""
    if j_trunc < a.n_modes:
        warnings.warn(
            f"j_trunc={j_trunc} < number of modes {a.n_modes}; truncation is severe",
            RuntimeWarning,
        )
    basis = tuple(build_m1_basis(m, j_trunc) for m in range(1, a.n_modes + 1))
    m1_a = np.zeros((j_trunc, j_trunc))
    for am, mat in zip(a.coeffs, basis):
        m1_a += am * mat
    return ModalMatrixSet(
        j_trunc=j_trunc,
        basis_mats=basis,
        m1_a=m1_a,
        m1_one=build_m1_basis(1, j_trunc),
        coeffs=a.coeffs.copy(),
    )


def mn_traces(ms: ModalMatrixSet, n_max: int) -> TraceVector:
    """Traces of the raw power recursion M_n = M_{n-1} M_1(a) + M_{n-2} M_1(e_1)."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    m1, m1_one = ms.m1_a, ms.m1_one
    values = np.empty(n_max)
    prev2 = m1  # M_1
    values[0] = np.trace(prev2)
    if n_max >= 2:
        prev1 = 2.0 * m1_one + m1 @ m1  # M_2
        values[1] = np.trace(prev1)
        for n in range(3, n_max + 1):
            cur = prev1 @ m1 + prev2 @ m1_one
            values[n - 1] = np.trace(cur)
            prev2, prev1 = prev1, cur
    return TraceVector(values, "raw_power")


def tn_scalar(z: complex, n: int, alpha0: float) -> complex:
    """Stabilizing polynomial T_n(z) = z (alpha0 z + 1)^{n-1}, by recursion.

    The three-term recurrence T_{n+1} = 2 T_n - T_{n-1} + alpha0^2 z^2 T_{n-1}
    has the parasitic solution (1 - alpha0 z)^n, which dominates the wanted
    branch whenever Re(z) < 0; the loop therefore runs in extended precision
    (roughly n/2 guard digits) and rounds only the final value to a complex
    double.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return complex(z)
    with mpmath.workdps(max(40, n // 2 + 40)):
        zz = mpmath.mpc(z)
        a0 = mpmath.mpf(alpha0)
        t_prev = zz  # T_1
        t_cur = zz * (a0 * zz + 1)  # T_2
        a0z2 = a0 * a0 * zz * zz
        for _ in range(n - 2):
            t_prev, t_cur = t_cur, 2 * t_cur - t_prev + a0z2 * t_prev
        return complex(t_cur)


def _tn_matrix_recursion(ms: ModalMatrixSet, alpha0: float, n_max: int, jacobian: bool):
    """Shared three-term recursion for T_n(a) and, optionally, its a-derivatives.

    Returns (trace values, jacobian or None) with two history levels only.
    """
    m1, m1_one = ms.m1_a, ms.m1_one
    n_modes = len(ms.basis_mats)
    values = np.empty(n_max)
    jac = np.empty((n_max, n_modes)) if jacobian else None

    t_prev = m1  # T_1
    values[0] = np.trace(t_prev)
    if jacobian:
        d_prev = np.stack(ms.basis_mats)  # dT_1/da_m = M_1(e_m)
        jac[0] = np.trace(d_prev, axis1=1, axis2=2)
    if n_max == 1:
        return values, jac

    t_cur = alpha0 * (2.0 * m1_one + m1 @ m1) + m1  # T_2
    values[1] = np.trace(t_cur)
    if jacobian:
        d_cur = d_prev + alpha0 * (m1 @ d_prev + d_prev @ m1)
        jac[1] = np.trace(d_cur, axis1=1, axis2=2)

    a0sq = alpha0 * alpha0
    for n in range(3, n_max + 1):
        diff = t_cur - t_prev
        t_next = 2.0 * t_cur - t_prev + a0sq * (t_prev @ m1_one) + alpha0 * (diff @ m1)
        if jacobian:
            d_diff = d_cur - d_prev
            d_next = (
                2.0 * d_cur
                - d_prev
                + a0sq * (d_prev @ m1_one)
                + alpha0 * (d_diff @ m1)
                + alpha0 * (np.stack([diff @ b for b in ms.basis_mats]))
            )
            jac[n - 1] = np.trace(d_next, axis1=1, axis2=2)
            d_prev, d_cur = d_cur, d_next
        values[n - 1] = np.trace(t_next)
        t_prev, t_cur = t_cur, t_next
    return values, jac


def tn_matrix_traces(ms: ModalMatrixSet, alpha0: float, n_max: int) -> TraceVector:
    """Traces of the stabilized matrix recursion T_n(a)."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    values, _ = _tn_matrix_recursion(ms, alpha0, n_max, jacobian=False)
    return TraceVector(values, "stabilized", alpha0)


def _paired_reciprocals(s: Spectrum, alpha0: float, k_meas: int, k_tail: int) -> np.ndarray:
    """Reciprocal eigenvalues grouped (pair, 2), ordered by descending |label|.

    Measured pairs up to k_meas; asymptotic surrogates -alpha0/2 + j pi i for
    k_meas < j <= k_tail.  Descending order makes the small tail terms
    accumulate first and lets conjugate pairs cancel imaginary parts early.
    """
    if s.n_pairs < k_meas:
        raise ValueError(f"spectrum has {s.n_pairs} pairs, need {k_meas}")
    if k_tail < k_meas:
        raise ValueError("k_tail must be >= k_meas")
    rows = []
    for j in range(k_tail, k_meas, -1):
        lam = complex(-alpha0 / 2.0, j * np.pi)
        rows.append((1.0 / lam, 1.0 / lam.conjugate()))
    pos, neg = s.positive(), s.negative()
    for j in range(k_meas, 0, -1):
        rows.append((1.0 / pos[j - 1], 1.0 / neg[j - 1]))
    return np.array(rows, dtype=complex)


def _accumulate_traces(z: np.ndarray, alpha0: float, n_max: int, stabilized: bool) -> np.ndarray:
    """Sum T_n (or z^n) over paired reciprocals, checking imaginary cancellation."""
    values = np.empty(n_max)
    power = z.copy()  # T_1(z) = z, and z^1
    w = alpha0 * z + 1.0
    for n in range(1, n_max + 1):
        total = complex(np.sum(power[:, 0] + power[:, 1]))
        if abs(total.imag) > 1e-10 * (1.0 + abs(total.real)):
            raise ValueError(
                f"imaginary residue {total.imag:.3e} in paired trace sum at n={n}"
            )
        values[n - 1] = total.real
        power = power * (w if stabilized else z)
    return values


def spectral_traces(
    s: Spectrum, alpha0: float, n_max: int, k_meas: int, k_tail: int
) -> TraceVector:
    """Stabilized sums sum_j T_n(lambda_j^{-1}) with asymptotic tail completion."""
    z = _paired_reciprocals(s, alpha0, k_meas, k_tail)
    return TraceVector(_accumulate_traces(z, alpha0, n_max, True), "stabilized", alpha0)


def raw_power_traces(
    s: Spectrum, n_max: int, k_meas: int, k_tail: int, alpha0: float
) -> TraceVector:
    """Monomial sums sum_j lambda_j^{-n}; n = 1 relies on the symmetric pairing."""
    z = _paired_reciprocals(s, alpha0, k_meas, k_tail)
    return TraceVector(_accumulate_traces(z, alpha0, n_max, False), "raw_power", alpha0)
