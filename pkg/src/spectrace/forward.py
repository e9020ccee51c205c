"""Forward spectral solver for the Dirichlet damped wave operator on [0, 1].

Discretizes d^2/dx^2 with Chebyshev pseudo-spectral collocation, assembles
the first-order block (companion) form of the damped operator, and computes
its complex spectrum.  Also provides the closed-form constant-damping
oracle and the multiplicative noise model used for synthetic data.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg

#: imaginary parts below this (relative to pi) are treated as real eigenvalues
_REAL_IM_TOL = 1e-8


@dataclass(frozen=True)
class GridOperator:
    """Chebyshev second-derivative collocation block with Dirichlet rows removed.

    ``n_cheb`` is the polynomial degree: the full grid has n_cheb + 1 points,
    of which the n_cheb - 1 interior ones are kept.
    """

    n_cheb: int
    d2_interior: np.ndarray  # (n-1, n-1)
    grid_x: np.ndarray  # interior nodes, strictly increasing in (0, 1)


@dataclass(frozen=True)
class NoiseModel:
    delta: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.delta < 0:
            raise ValueError("noise level delta must be >= 0")


@dataclass
class Spectrum:
    """Conjugate-paired eigenvalues with signed labels.

    ``labels[i]`` is the signed index of ``eigs[i]``; labels run over
    +-1, ..., +-k ordered so that Im(lambda_j) increases with j and
    Im(lambda_{-j}) = -Im(lambda_j).
    """

    eigs: np.ndarray
    labels: np.ndarray
    alpha0_hint: float | None = None

    def __post_init__(self):
        self.eigs = np.asarray(self.eigs, dtype=complex)
        self.labels = np.asarray(self.labels, dtype=int)
        if self.eigs.shape != self.labels.shape:
            raise ValueError("eigs and labels must have matching shapes")

    @property
    def n_pairs(self) -> int:
        return int(np.max(self.labels)) if self.labels.size else 0

    def pair(self, j: int) -> tuple[complex, complex]:
        """Return (lambda_j, lambda_{-j}) for j >= 1."""
        lam_p = self.eigs[self.labels == j]
        lam_m = self.eigs[self.labels == -j]
        if lam_p.size != 1 or lam_m.size != 1:
            raise KeyError(f"pair {j} not present in spectrum")
        return complex(lam_p[0]), complex(lam_m[0])

    def positive(self) -> np.ndarray:
        """Eigenvalues lambda_1, ..., lambda_k in label order."""
        order = np.argsort(self.labels[self.labels > 0])
        return self.eigs[self.labels > 0][order]

    def negative(self) -> np.ndarray:
        """Eigenvalues lambda_{-1}, ..., lambda_{-k} in label order."""
        order = np.argsort(-self.labels[self.labels < 0])
        return self.eigs[self.labels < 0][order]

    def write_csv(self, path) -> None:
        path = Path(path)
        tmp = path.with_suffix(path.suffix + ".tmp")
        with open(tmp, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["label", "re", "im"])
            for lab, lam in zip(self.labels, self.eigs):
                writer.writerow([int(lab), format(lam.real, ".15g"), format(lam.imag, ".15g")])
        tmp.replace(path)

    @classmethod
    def read_csv(cls, path) -> "Spectrum":
        labels, eigs = [], []
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                labels.append(int(row["label"]))
                eigs.append(complex(float(row["re"]), float(row["im"])))
        return cls(np.array(eigs), np.array(labels))


def _cheb(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Chebyshev differentiation matrix on [-1, 1] (Trefethen's construction)."""
    k = np.arange(n + 1)
    x = np.cos(np.pi * k / n)
    c = np.ones(n + 1)
    c[0] = c[-1] = 2.0
    c *= (-1.0) ** k
    dx = x[:, None] - x[None, :] + np.eye(n + 1)
    d = np.outer(c, 1.0 / c) / dx
    d -= np.diag(d.sum(axis=1))
    return x, d


def build_grid_operator(n_cheb: int) -> GridOperator:
    """Second-derivative collocation on [0, 1] with Dirichlet rows/columns removed."""
    if n_cheb < 8:
        raise ValueError("n_cheb must be >= 8")
    xi, d = _cheb(n_cheb)
    d2 = 4.0 * (d @ d)  # chain rule for the [-1, 1] -> [0, 1] map
    # x = (1 - xi)/2 is strictly increasing in the node index
    x = 0.5 * (1.0 - xi)
    return GridOperator(
        n_cheb=n_cheb,
        d2_interior=d2[1:-1, 1:-1],
        grid_x=x[1:-1],
    )


def assemble_companion(g: GridOperator, alpha_vals: np.ndarray) -> np.ndarray:
    """Block matrix [[0, I], [D2, -diag(alpha)]] realizing the damped operator."""
    alpha_vals = np.asarray(alpha_vals, dtype=float)
    m = g.d2_interior.shape[0]
    if alpha_vals.shape != (m,):
        raise ValueError(f"alpha_vals must have shape ({m},), got {alpha_vals.shape}")
    if np.any(alpha_vals < 0):
        raise ValueError("alpha_vals must be nonnegative")
    top = np.hstack([np.zeros((m, m)), np.eye(m)])
    bot = np.hstack([g.d2_interior, -np.diag(alpha_vals)])
    return np.vstack([top, bot])


def _strip_bounds(alpha_vals: np.ndarray) -> tuple[float, float]:
    """Admissible real-part interval for eigenvalues, including the real segment."""
    a = float(np.min(alpha_vals)) / 2.0
    b = float(np.max(alpha_vals)) / 2.0
    s = np.sqrt(max(b * b - np.pi**2, 0.0))
    margin = 0.1 * max(b - a + s, 1.0)
    return -b - s - margin, -a + s + margin


def compute_spectrum(companion: np.ndarray, k: int) -> Spectrum:
    """Solve the dense eigenproblem, filter collocation outliers, label k pairs.

    Spurious eigenvalues are removed by keeping only |Im| <= pi * n_cheb / 4
    and real parts inside the admissible strip (inflated by 10%); the
    Chebyshev discretization is only trustworthy for the low end of the
    spectrum.
    """
    n2 = companion.shape[0]
    if companion.shape != (n2, n2) or n2 % 2:
        raise ValueError("companion must be square with even dimension")
    m = n2 // 2
    n_cheb = m + 1
    if not 1 <= k <= m:
        raise ValueError(f"k must be in [1, {m}]")
    alpha_vals = -np.diag(companion[m:, m:])

    eigs = scipy.linalg.eigvals(companion)
    im_cut = np.pi * n_cheb / 4.0
    re_lo, re_hi = _strip_bounds(alpha_vals)
    keep = (np.abs(eigs.imag) <= im_cut) & (eigs.real >= re_lo) & (eigs.real <= re_hi)
    eigs = eigs[keep]

    scale = np.maximum(np.abs(eigs), 1.0)
    real_mask = np.abs(eigs.imag) <= _REAL_IM_TOL * scale
    reals = np.sort(eigs[real_mask].real)
    pos = eigs[~real_mask & (eigs.imag > 0)]
    neg = eigs[~real_mask & (eigs.imag < 0)]
    pos = pos[np.lexsort((pos.real, pos.imag))]

    pairs: list[tuple[complex, complex]] = []
    if reals.size:
        warnings.warn(
            "spectrum contains real eigenvalues; pair labeling by Re is heuristic",
            RuntimeWarning,
        )
        if reals.size % 2:
            reals = reals[:-1]  # drop an unpaired real eigenvalue
        for i in range(0, reals.size, 2):
            pairs.append((complex(reals[i + 1]), complex(reals[i])))
    for lam in pos:
        # conjugate partner (exact for real companion matrices)
        idx = np.argmin(np.abs(neg - lam.conjugate()))
        lam_m = neg[idx]
        if abs(lam_m - lam.conjugate()) > 1e-8 * max(abs(lam), 1.0):
            continue
        pairs.append((complex(lam), complex(lam_m)))
        neg = np.delete(neg, idx)

    if len(pairs) < k:
        raise ValueError(f"only {len(pairs)} trustworthy pairs after filtering, need {k}")
    pairs = pairs[:k]

    eig_list, lab_list = [], []
    for j, (lam_p, lam_m) in enumerate(pairs, start=1):
        eig_list += [lam_p, lam_m]
        lab_list += [j, -j]
    return Spectrum(np.array(eig_list), np.array(lab_list))


def constant_damping_spectrum(c: float, k: int) -> Spectrum:
    """Exact spectrum for constant damping: roots of lambda^2 + c lambda + j^2 pi^2."""
    if c < 0:
        raise ValueError("constant damping must be >= 0")
    if k < 1:
        raise ValueError("k must be >= 1")
    eig_list, lab_list = [], []
    for j in range(1, k + 1):
        disc = c * c - 4.0 * j * j * np.pi**2
        if disc < 0:
            lam_p = complex(-c / 2.0, np.sqrt(-disc) / 2.0)
            lam_m = lam_p.conjugate()
        else:
            root = np.sqrt(disc)
            lam_p = complex((-c + root) / 2.0)
            lam_m = complex((-c - root) / 2.0)
        eig_list += [lam_p, lam_m]
        lab_list += [j, -j]
    return Spectrum(np.array(eig_list), np.array(lab_list), alpha0_hint=c)


def check_weak_damping(alpha_upper_half: float) -> bool:
    """True iff b < pi, ruling out real eigenvalues in the Dirichlet case."""
    if alpha_upper_half < 0:
        raise ValueError("b must be >= 0")
    return alpha_upper_half < np.pi


def add_noise(s: Spectrum, nm: NoiseModel) -> Spectrum:
    """Perturb lambda_j by delta * u_j * (1 + i), u_j ~ U(0, 1), per positive label.

    The negative-label partner receives the conjugate perturbation, so
    conjugate symmetry of the data (and hence reality of paired trace sums)
    is preserved.
    """
    if nm.delta == 0.0:
        return Spectrum(s.eigs.copy(), s.labels.copy(), s.alpha0_hint)
    rng = np.random.default_rng(nm.seed)
    eigs = s.eigs.copy()
    for j in range(1, s.n_pairs + 1):
        u = rng.uniform()
        bump = nm.delta * u * complex(1.0, 1.0)
        eigs[s.labels == j] += bump
        eigs[s.labels == -j] += bump.conjugate()
    return Spectrum(eigs, s.labels.copy(), s.alpha0_hint)
