"""Gauss-Newton recovery of cosine coefficients from stabilized trace data."""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from spectrace.damping import FourierDamping, clenshaw_curtis
from spectrace.forward import Spectrum
from spectrace.traces import (
    TraceVector,
    _tn_matrix_recursion,
    build_modal_set,
)


@dataclass(frozen=True)
class GNConfig:
    """Parameters of one Gauss-Newton inversion.

    k_meas: number of measured eigenvalue pairs (2K eigenvalues).
    m_modes: number of cosine basis functions M.
    j_trunc: modal matrix truncation J.
    n_polys: highest polynomial degree N.
    k_tail: total pairs entering trace sums (K1 >= K), the excess
        filled with asymptotic surrogates.
    """

    k_meas: int
    m_modes: int
    j_trunc: int
    n_polys: int
    k_tail: int
    max_iter: int = 50
    tol: float | None = None  # defaults to 1e-5 * n_polys
    initial_guess: FourierDamping | None = None
    step_control: str = "damped"  # "full_step" | "damped"
    step_factor: float = 0.5
    div_limit: int = 5

    def __post_init__(self):
        if self.k_tail < self.k_meas:
            raise ValueError("k_tail must be >= k_meas")
        if self.step_control not in ("full_step", "damped"):
            raise ValueError(f"unknown step control {self.step_control!r}")
        if self.tol is not None and self.tol <= 0:
            raise ValueError("tol must be positive")

    @property
    def residual_tol(self) -> float:
        return self.tol if self.tol is not None else 1e-5 * self.n_polys

    def to_dict(self) -> dict:
        d = {
            "k_meas": self.k_meas,
            "m_modes": self.m_modes,
            "j_trunc": self.j_trunc,
            "n_polys": self.n_polys,
            "k_tail": self.k_tail,
            "max_iter": self.max_iter,
            "tol": self.residual_tol,
            "step_control": self.step_control,
        }
        if self.initial_guess is not None:
            d["initial_guess"] = list(self.initial_guess.coeffs)
        return d


@dataclass
class InversionRun:
    config: GNConfig
    target_traces: TraceVector
    iterates: list
    residual_norms: np.ndarray
    converged: bool
    final: FourierDamping
    jacobian_rank: int | None = None
    diagnostics: list = field(default_factory=list)

    def write_json(self, path, l2_error_vs_truth: float | None = None) -> None:
        path = Path(path)
        tmp = path.with_suffix(path.suffix + ".tmp")
        payload = {
            "config": self.config.to_dict(),
            "alpha0": float(format(self.target_traces.alpha0, ".15g")),
            "iterations": [
                {
                    "coeffs": [float(format(c, ".15g")) for c in a.coeffs],
                    "residual_norm": float(format(r, ".15g")),
                }
                for a, r in zip(self.iterates, self.residual_norms)
            ],
            "converged": self.converged,
        }
        if l2_error_vs_truth is not None:
            payload["l2_error_vs_truth"] = float(format(l2_error_vs_truth, ".15g"))
        tmp.write_text(json.dumps(payload, indent=1))
        tmp.replace(path)


def estimate_alpha0(s: Spectrum, k_use: int) -> float:
    """Mean-damping estimate -2 mean(Re lambda_j) over the high-frequency half.

    The asymptotics Re lambda_j -> -alpha0/2 hold with O(1/j) bias, so only
    the half of the measured pairs with largest |Im| is averaged.
    """
    if k_use < 2:
        raise ValueError("k_use must be >= 2")
    if s.n_pairs < k_use:
        raise ValueError(f"spectrum has {s.n_pairs} pairs, need {k_use}")
    lams = s.positive()[:k_use]
    order = np.argsort(np.abs(lams.imag))
    top = lams[order[k_use // 2 :]]
    return float(-2.0 * np.mean(top.real))


def trace_jacobian(ms, alpha0: float, n_max: int) -> np.ndarray:
    """N x M matrix of trace(dT_n(a)/da_m), via the recursive derivatives."""
    _, jac = _tn_matrix_recursion(ms, alpha0, n_max, jacobian=True)
    return jac


def _model_traces(a: FourierDamping, cfg: GNConfig, alpha0: float, jacobian: bool):
    ms = build_modal_set(a, cfg.j_trunc)
    values, jac = _tn_matrix_recursion(ms, alpha0, cfg.n_polys, jacobian=jacobian)
    return values, jac


def gauss_newton(target: TraceVector, cfg: GNConfig) -> InversionRun:
    """Iterate a -> a + da with J da = r_true - r until the misfit is small.

    The linear step is a minimum-norm least-squares solve (SVD with rank
    guard); rank deficiency is reported and iteration continues.  The
    damped mode halves the step until the residual decreases, giving up
    after div_limit consecutive failures.
    """
    if len(target) < cfg.n_polys:
        raise ValueError("target traces shorter than n_polys")
    alpha0 = target.alpha0
    r_true = target.values[: cfg.n_polys]

    if cfg.initial_guess is not None:
        a = cfg.initial_guess.padded(cfg.m_modes)
    else:
        a = FourierDamping(np.zeros(cfg.m_modes))
    iterates = [a]
    r, _ = _model_traces(a, cfg, alpha0, jacobian=False)
    res_norm = float(np.linalg.norm(r_true - r))
    residual_norms = [res_norm]
    converged = res_norm <= cfg.residual_tol
    rank = None
    diagnostics: list[str] = []
    fails = 0

    for _ in range(cfg.max_iter):
        if converged:
            break
        ms = build_modal_set(a, cfg.j_trunc)
        r, jac = _tn_matrix_recursion(ms, alpha0, cfg.n_polys, jacobian=True)
        resid = r_true - r
        delta, _, rank, _ = np.linalg.lstsq(jac, resid, rcond=None)
        if rank < cfg.m_modes:
            diagnostics.append(f"rank-deficient Jacobian (rank {rank} < {cfg.m_modes})")

        if cfg.step_control == "full_step":
            a = FourierDamping(a.coeffs + delta)
            r_new, _ = _model_traces(a, cfg, alpha0, jacobian=False)
            res_norm = float(np.linalg.norm(r_true - r_new))
        else:
            step = 1.0
            accepted = False
            for _ in range(9):  # full step plus up to 8 halvings
                cand = FourierDamping(a.coeffs + step * delta)
                r_new, _ = _model_traces(cand, cfg, alpha0, jacobian=False)
                cand_norm = float(np.linalg.norm(r_true - r_new))
                if cand_norm < residual_norms[-1]:
                    a, res_norm, accepted = cand, cand_norm, True
                    break
                step *= cfg.step_factor
            if not accepted:
                fails += 1
                diagnostics.append("damped step failed to decrease residual")
                if fails >= cfg.div_limit:
                    diagnostics.append(
                        f"aborted after {fails} consecutive failed damped steps"
                    )
                    break
                continue  # iterate unchanged; keep history monotone
            fails = 0

        iterates.append(a)
        residual_norms.append(res_norm)
        converged = res_norm <= cfg.residual_tol

    return InversionRun(
        config=cfg,
        target_traces=target,
        iterates=iterates,
        residual_norms=np.array(residual_norms),
        converged=converged,
        final=iterates[-1],
        jacobian_rank=rank if rank is None else int(rank),
        diagnostics=diagnostics,
    )


def l2_error(a: FourierDamping, alpha_true, n_quad: int = 512) -> float:
    """Squared-L2 misfit int_0^1 |alpha_true(x) - alpha_M(x)|^2 dx.

    The squared integral itself is reported (not its square root), matching
    the convention used for the reference error tables.  ``alpha_true`` may
    be a callable or dense samples on a uniform grid including endpoints.
    """
    n = max(int(n_quad), 400)
    x, w = clenshaw_curtis(n + n % 2)
    if callable(alpha_true):
        try:
            truth = np.asarray(alpha_true(x), dtype=float)
            if truth.shape != x.shape:
                raise ValueError
        except (ValueError, TypeError):
            truth = np.asarray([alpha_true(xi) for xi in x], dtype=float)
    else:
        samples = np.asarray(alpha_true, dtype=float)
        truth = np.interp(x, np.linspace(0.0, 1.0, samples.size), samples)
    diff = truth - a.evaluate(x)
    return float(np.dot(w, diff * diff))


def multistep_schedule(
    target: TraceVector, cfg: GNConfig, m_schedule: list[int]
) -> InversionRun:
    """Chain runs with increasing mode counts, warm-starting each stage.

    The reconstructed coefficients of each stage, zero-padded, seed the
    next; useful for large dampings where the plain iteration is sensitive
    to the initial guess.
    """
    if list(m_schedule) != sorted(m_schedule):
        raise ValueError("m_schedule must be increasing")
    run = None
    iterates: list[FourierDamping] = []
    norms: list[float] = []
    diagnostics: list[str] = []
    guess = cfg.initial_guess
    for m in m_schedule:
        if m > cfg.k_meas:
            warnings.warn(
                f"m={m} exceeds measured pairs k={cfg.k_meas}; "
                "modes beyond the k-th are weakly informed",
                RuntimeWarning,
            )
        stage_cfg = replace(cfg, m_modes=m, initial_guess=guess)
        run = gauss_newton(target, stage_cfg)
        iterates.extend(run.iterates)
        norms.extend(run.residual_norms.tolist())
        diagnostics.extend(run.diagnostics)
        guess = run.final
    run.iterates = iterates
    run.residual_norms = np.array(norms)
    run.diagnostics = diagnostics
    return run
