"""Explicit separability certificates from a separable-terminating trace.

A separable verdict at step ``N`` means ``delta_N = A_N - ||C_N||_op I``
is itself a valid CM.  That fact propagates backwards through the
iterates: knowing ``gamma_{k+1} >= delta_{k+1} oplus delta_{k+1}`` yields

    ``gamma_B^(k) = A_k - C_k^T (A_k - delta_{k+1})^+ C_k``,
    ``delta_k     = (delta_{k+1} + gamma_B^(k)) / 2``,

both valid CMs, with ``gamma_k >= delta_k oplus delta_k``.  At ``k = 0``
the asymmetric form against the original blocks gives

    ``gamma_A = delta_1``,
    ``gamma_B = B_0 - C_0^T (A_0 - delta_1)^+ C_0``,

and ``P = gamma_0 - gamma_A oplus gamma_B`` is PSD.  The triple
``(gamma_A, gamma_B, P)`` is the certificate: two single-party CMs plus
PSD noise whose sum reproduces the input exactly, which any third party
can verify with three eigensolves and no knowledge of the iteration.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.linalg import block_diag

from .engine import REASON_NORM_GAP_SEPARABLE, IterationTrace
from .gaussian import BipartiteCM, symplectic_form
from .matlin import DEFAULT_TOL, ToleranceConfig, operator_norm, psd_check

__all__ = [
    "CertificateError",
    "CertificateReport",
    "SeparabilityCertificate",
    "reconstruct",
    "verify_certificate",
]


class CertificateError(RuntimeError):
    """Reconstruction failed; the message carries the offending step."""


@dataclass(frozen=True)
class SeparabilityCertificate:
    """Explicit separable decomposition ``gamma_0 = gamma_A oplus gamma_B + P``."""

    gamma_A: np.ndarray
    gamma_B: np.ndarray
    P: np.ndarray


class CertificateReport(NamedTuple):
    valid: bool
    margins: tuple[float, float, float]


def _cm_margin(mat: np.ndarray, tol: ToleranceConfig, what: str, step: int) -> np.ndarray:
    """Check ``mat - iJ >= 0`` within tolerance; return the symmetrized matrix."""
    sym = (mat + mat.T) / 2.0
    report = psd_check(sym - 1j * symplectic_form(sym.shape[0] // 2), tol)
    if not report.is_psd:
        raise CertificateError(
            f"{what} at step {step} fails the CM test "
            f"(margin {report.lambda_min:.3e}); margins too tight to certify"
        )
    return sym


def _shur_against(a_block: np.ndarray, c_block: np.ndarray, delta: np.ndarray,
                  b_block: np.ndarray, tol: ToleranceConfig, step: int) -> np.ndarray:
    """Compute ``B - C^T (A - delta)^+ C`` with kernel-condition checks."""
    gap = (a_block - delta)
    gap = (gap + gap.T) / 2.0
    eigs, vecs = np.linalg.eigh(gap)
    scale = max(1.0, float(np.abs(eigs).max()))
    if float(eigs[0]) < -tol.psd_tol * scale:
        raise CertificateError(
            f"A - delta at step {step} is not PSD (margin {eigs[0]:.3e}); "
            "backward recursion cannot continue"
        )
    kernel = eigs <= tol.pinv_rcond * max(float(eigs[-1]), 0.0)
    if kernel.any():
        residuals = np.linalg.norm(c_block.T @ vecs[:, kernel], axis=0)
        allowance = tol.psd_tol * max(1.0, operator_norm(c_block))
        if not np.all(residuals <= allowance):
            raise CertificateError(
                f"kernel condition fails at step {step}: ker(A - delta) is not "
                f"contained in ker(C^T) (residual {residuals.max():.3e})"
            )
    inv = np.zeros_like(eigs)
    np.divide(1.0, eigs, out=inv, where=~kernel & (eigs > 0))
    gap_pinv = (vecs * inv) @ vecs.T
    out = b_block - c_block.T @ gap_pinv @ c_block
    return (out + out.T) / 2.0


def reconstruct(trace: IterationTrace, tol: ToleranceConfig = DEFAULT_TOL) -> SeparabilityCertificate:
    """Reconstruct an explicit separable decomposition from a trace.

    The trace must come from a run that terminated Separable; anything
    else raises ``ValueError``.  Every intermediate matrix is re-checked
    against the CM test, so a certificate that comes back at all is
    already internally consistent; callers should still confirm it
    against the original input with :func:`verify_certificate`.
    """
    if trace.reason != REASON_NORM_GAP_SEPARABLE or not trace.steps:
        raise ValueError(
            "certificates exist only for separable-terminating traces "
            f"(trace ended with: {trace.reason!r})"
        )
    final = trace.steps[-1]
    delta = final.A - final.c_opnorm * np.eye(final.A.shape[0])
    delta = _cm_margin(delta, tol, "norm-shifted final block", final.index)

    # walk gamma_{k+1} -> gamma_k knowledge down to the first iterate
    for step in reversed(trace.steps[:-1]):
        gamma_b_k = _shur_against(step.A, step.C, delta, step.A, tol, step.index)
        gamma_b_k = _cm_margin(gamma_b_k, tol, "reduced B-block", step.index)
        delta = _cm_margin((delta + gamma_b_k) / 2.0, tol, "averaged block", step.index)

    gamma0 = trace.gamma0
    gamma_a = delta
    gamma_b = _shur_against(gamma0.A, gamma0.C, delta, gamma0.B, tol, 0)
    gamma_b = _cm_margin(gamma_b, tol, "reduced B-block", 0)
    noise = gamma0.gamma - block_diag(gamma_a, gamma_b)
    noise = (noise + noise.T) / 2.0
    return SeparabilityCertificate(gamma_A=gamma_a, gamma_B=gamma_b, P=noise)


def verify_certificate(cm: BipartiteCM, certificate: SeparabilityCertificate,
                       tol: ToleranceConfig = DEFAULT_TOL) -> CertificateReport:
    """Independently verify a certificate against the original state.

    Three eigensolves: ``gamma_A`` and ``gamma_B`` must be valid CMs of
    the two subsystems and ``P = gamma - gamma_A oplus gamma_B`` must be
    PSD.  Returns the three margins; ``valid`` is their conjunction
    under the usual relative tolerance.
    """
    gamma_a = np.asarray(certificate.gamma_A, dtype=float)
    gamma_b = np.asarray(certificate.gamma_B, dtype=float)
    if gamma_a.shape != (2 * cm.n,) * 2 or gamma_b.shape != (2 * cm.m,) * 2:
        raise ValueError(
            f"certificate blocks {gamma_a.shape}/{gamma_b.shape} do not match "
            f"a {cm.n}+{cm.m} mode state"
        )
    rep_a = psd_check(gamma_a - 1j * symplectic_form(cm.n), tol)
    rep_b = psd_check(gamma_b - 1j * symplectic_form(cm.m), tol)
    rep_p = psd_check(cm.gamma - block_diag(gamma_a, gamma_b), tol)
    valid = rep_a.is_psd and rep_b.is_psd and rep_p.is_psd
    return CertificateReport(valid, (rep_a.lambda_min, rep_b.lambda_min, rep_p.lambda_min))
