"""Tolerance-aware matrix primitives shared by the whole library.

Everything operates on plain numpy arrays.  Hermitian inputs are
symmetrized on ingest, so callers may hand in matrices carrying
roundoff-level asymmetry without tripping spurious failures.  Positivity
is always judged relative to the matrix scale: the PSD test passes when
the smallest eigenvalue stays above ``-psd_tol * max(1, largest
|eigenvalue|)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "DEFAULT_TOL",
    "MatrixInputError",
    "PsdReport",
    "SchurReport",
    "ToleranceConfig",
    "hermitian_part",
    "hermitian_reduce_psd",
    "operator_norm",
    "pseudoinverse",
    "psd_check",
    "schur_psd",
    "trace_norm",
]


class MatrixInputError(ValueError):
    """Raised when an input matrix violates a structural precondition."""


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical tolerances used by every positivity decision.

    Attributes:
        psd_tol: Relative eigenvalue tolerance for PSD tests.  A matrix
            counts as PSD when ``lambda_min >= -psd_tol * scale`` with
            ``scale = max(1, |lambda|_max)``.
        pinv_rcond: Relative cutoff below which eigenvalues are treated
            as exact zeros when pseudoinverting.
        decision_margin: Absolute no-decision band around zero used by
            the termination tests of the decision iteration.
    """

    psd_tol: float = 1e-9
    pinv_rcond: float = 1e-12
    decision_margin: float = 1e-10

    def __post_init__(self):
        for name in ("psd_tol", "pinv_rcond", "decision_margin"):
            value = getattr(self, name)
            if not 0.0 < value < 1e-2:
                raise ValueError(
                    f"{name} must lie in (0, 1e-2), got {value!r}"
                )


DEFAULT_TOL = ToleranceConfig()


class PsdReport(NamedTuple):
    is_psd: bool
    lambda_min: float


class SchurReport(NamedTuple):
    is_psd: bool
    kernel_ok: bool


def _as_matrix(mat, name: str = "matrix") -> np.ndarray:
    arr = np.asarray(mat)
    if arr.ndim != 2:
        raise MatrixInputError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise MatrixInputError(f"{name} must be non-empty")
    if not np.all(np.isfinite(arr)):
        raise MatrixInputError(f"{name} contains non-finite entries")
    dtype = np.complex128 if np.iscomplexobj(arr) else np.float64
    return arr.astype(dtype, copy=False)


def _as_square(mat, name: str = "matrix") -> np.ndarray:
    arr = _as_matrix(mat, name)
    if arr.shape[0] != arr.shape[1]:
        raise MatrixInputError(f"{name} must be square, got shape {arr.shape}")
    return arr


def hermitian_part(mat) -> np.ndarray:
    """Return ``(M + M^dagger) / 2``, the Hermitian part of a square matrix."""
    arr = _as_square(mat)
    return (arr + arr.conj().T) / 2.0


def psd_check(mat, tol: ToleranceConfig = DEFAULT_TOL) -> PsdReport:
    """Test a Hermitian matrix for positive semidefiniteness.

    The input is symmetrized before the eigensolve, so tiny asymmetry is
    harmless.  The verdict is relative to the spectral scale: the test
    passes when ``lambda_min >= -psd_tol * max(1, |lambda|_max)``.

    Returns:
        PsdReport with the boolean verdict and the smallest eigenvalue.
    """
    eigs = np.linalg.eigvalsh(hermitian_part(mat))
    lambda_min = float(eigs[0])
    scale = max(1.0, float(np.abs(eigs).max()))
    return PsdReport(lambda_min >= -tol.psd_tol * scale, lambda_min)


def operator_norm(mat) -> float:
    """Largest singular value.  Accepts rectangular input."""
    return float(np.linalg.norm(_as_matrix(mat), 2))


def trace_norm(mat) -> float:
    """Sum of singular values.  Accepts rectangular input."""
    return float(np.linalg.norm(_as_matrix(mat), "nuc"))


def pseudoinverse(mat, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Moore-Penrose pseudoinverse of a Hermitian PSD matrix.

    Built from an eigendecomposition of the Hermitian part.  Eigenvalues
    at or below ``pinv_rcond * lambda_max`` count as kernel and are
    zeroed; this includes the tolerance-level *negative* eigenvalues a
    matrix may carry after passing ``psd_check``, which must land in the
    kernel rather than be inverted into huge negative contributions.

    The result is Hermitian and PSD by construction.  Inputs far from
    PSD are outside the contract; use a general-purpose pseudoinverse
    for those.
    """
    herm = hermitian_part(mat)
    eigs, vecs = np.linalg.eigh(herm)
    cutoff = tol.pinv_rcond * max(float(eigs[-1]), 0.0)
    keep = eigs > cutoff
    inv = np.zeros_like(eigs)
    np.divide(1.0, eigs, out=inv, where=keep)
    pinv = (vecs * inv) @ vecs.conj().T
    return hermitian_part(pinv)


def schur_psd(block_a, block_b, block_c, tol: ToleranceConfig = DEFAULT_TOL) -> SchurReport:
    """Block-positivity test for ``[[A, C], [C^T, B]]`` via Schur complement.

    Decides PSD-ness of the symmetric block matrix without assembling
    it: the matrix is PSD exactly when B is PSD, the range condition
    ``ker(B) subset ker(C)`` holds (equivalently ``C (I - B B^+) = 0``),
    and the complement ``A - C B^+ C^T`` is PSD.

    Args:
        block_a: Real symmetric, shape (p, p).
        block_b: Real symmetric, shape (q, q).
        block_c: Real coupling block, shape (p, q).
        tol: Tolerances for the kernel residual and the PSD tests.

    Returns:
        SchurReport with the overall verdict and whether the kernel
        condition held.
    """
    a = hermitian_part(_as_square(block_a, "block_a"))
    b = hermitian_part(_as_square(block_b, "block_b"))
    c = _as_matrix(block_c, "block_c")
    if np.iscomplexobj(a) or np.iscomplexobj(b) or np.iscomplexobj(c):
        raise MatrixInputError("schur_psd expects real blocks")
    if c.shape != (a.shape[0], b.shape[0]):
        raise MatrixInputError(
            f"block_c shape {c.shape} incompatible with blocks "
            f"{a.shape} and {b.shape}"
        )

    eigs, vecs = np.linalg.eigh(b)
    scale_b = max(1.0, float(np.abs(eigs).max()))
    kernel = np.abs(eigs) <= tol.pinv_rcond * scale_b

    kernel_ok = True
    if kernel.any():
        residuals = np.linalg.norm(c @ vecs[:, kernel], axis=0)
        allowance = tol.psd_tol * max(1.0, operator_norm(c))
        kernel_ok = bool(np.all(residuals <= allowance))

    # B may be indefinite here (its PSD-ness is judged separately), so
    # invert the signed eigenvalues outside the kernel band.
    inv = np.zeros_like(eigs)
    np.divide(1.0, eigs, out=inv, where=~kernel)
    b_pinv = (vecs * inv) @ vecs.T

    b_psd = float(eigs[0]) >= -tol.psd_tol * scale_b
    complement_psd = psd_check(a - c @ b_pinv @ c.T, tol).is_psd
    return SchurReport(bool(b_psd and kernel_ok and complement_psd), bool(kernel_ok))


def hermitian_reduce_psd(sym, antisym, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """PSD test for ``[[A, C], [C^T, A]]`` with A symmetric, C antisymmetric.

    For real A = A^T and C = -C^T the doubled block matrix is PSD exactly
    when the Hermitian matrix ``A + iC`` is PSD, so a single eigensolve
    at half the dimension decides it.

    Raises:
        MatrixInputError: if the symmetry residual of ``sym`` or the
            antisymmetry residual of ``antisym`` exceeds tolerance, or
            the blocks are complex or of mismatched shape.
    """
    a = _as_square(sym, "sym")
    c = _as_square(antisym, "antisym")
    if np.iscomplexobj(a) or np.iscomplexobj(c):
        raise MatrixInputError("hermitian_reduce_psd expects real blocks")
    if a.shape != c.shape:
        raise MatrixInputError(f"shape mismatch: {a.shape} vs {c.shape}")

    allowance = tol.psd_tol * max(1.0, float(np.abs(a).max()), float(np.abs(c).max()))
    if float(np.abs(a - a.T).max()) > allowance:
        raise MatrixInputError("sym block has symmetry residual above tolerance")
    if float(np.abs(c + c.T).max()) > allowance:
        raise MatrixInputError("antisym block has antisymmetry residual above tolerance")

    a = (a + a.T) / 2.0
    c = (c - c.T) / 2.0
    return psd_check(a + 1j * c, tol).is_psd
