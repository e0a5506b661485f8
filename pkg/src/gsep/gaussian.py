"""Correlation matrices of Gaussian states and their bipartite block form.

Conventions used across the library: quadratures are interleaved per mode
as ``(x1, p1, x2, p2, ...)``, the vacuum correlation matrix is the
identity, and a real symmetric matrix ``gamma`` is a valid correlation
matrix exactly when ``gamma - iJ >= 0`` with ``J`` the symplectic form
returned by :func:`symplectic_form`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import block_diag, expm

from .matlin import DEFAULT_TOL, PsdReport, ToleranceConfig, psd_check

__all__ = [
    "BipartiteCM",
    "CMError",
    "CovarianceMatrix",
    "InvalidCMError",
    "assemble",
    "momentum_flip",
    "partial_transpose",
    "random_cm",
    "random_covariance",
    "random_separable_cm",
    "random_symplectic",
    "split",
    "symplectic_form",
    "tmss",
    "validate_cm",
]

# Asymmetry beyond this (relative to the entry scale) is a structural
# error, not roundoff, and gets rejected instead of symmetrized away.
_SYMMETRY_RTOL = 1e-8


class CMError(ValueError):
    """Structural problem with a correlation matrix or its blocks."""


class InvalidCMError(CMError):
    """A structurally fine matrix that fails the ``gamma - iJ >= 0`` test."""


def symplectic_form(n_modes: int) -> np.ndarray:
    """Symplectic form for ``n_modes`` modes in interleaved ordering.

    Block-diagonal direct sum of ``n_modes`` copies of
    ``[[0, -1], [1, 0]]``.
    """
    if n_modes < 1:
        raise ValueError(f"n_modes must be >= 1, got {n_modes}")
    j1 = np.array([[0.0, -1.0], [1.0, 0.0]])
    return np.kron(np.eye(n_modes), j1)


def _ingest_symmetric(mat, name: str) -> np.ndarray:
    arr = np.asarray(mat, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise CMError(f"{name} must be square, got shape {arr.shape}")
    if arr.shape[0] % 2 != 0 or arr.shape[0] == 0:
        raise CMError(f"{name} must have even positive dimension, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise CMError(f"{name} contains non-finite entries")
    residual = float(np.abs(arr - arr.T).max())
    if residual > _SYMMETRY_RTOL * max(1.0, float(np.abs(arr).max())):
        raise CMError(f"{name} is not symmetric (residual {residual:.3e})")
    sym = (arr + arr.T) / 2.0
    sym.flags.writeable = False
    return sym


@dataclass(frozen=True)
class CovarianceMatrix:
    """A correlation matrix together with its mode count.

    Construct via :meth:`from_array`, which symmetrizes roundoff-level
    asymmetry and rejects anything structurally wrong.  Validity of the
    state (``gamma - iJ >= 0``) is a separate question answered by
    :func:`validate_cm`.
    """

    n_modes: int
    gamma: np.ndarray

    @classmethod
    def from_array(cls, gamma) -> "CovarianceMatrix":
        sym = _ingest_symmetric(gamma, "gamma")
        return cls(n_modes=sym.shape[0] // 2, gamma=sym)


@dataclass(frozen=True)
class BipartiteCM:
    """Correlation matrix of an ``n x m``-mode bipartite state, in blocks.

    The assembled matrix is ``[[A, C], [C^T, B]]`` with ``A`` the
    ``2n x 2n`` block of the first subsystem, ``B`` the ``2m x 2m`` block
    of the second, and ``C`` their ``2n x 2m`` coupling.
    """

    n: int
    m: int
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    @classmethod
    def from_blocks(cls, block_a, block_b, block_c) -> "BipartiteCM":
        a = _ingest_symmetric(block_a, "A")
        b = _ingest_symmetric(block_b, "B")
        c = np.asarray(block_c, dtype=float)
        if not np.all(np.isfinite(c)):
            raise CMError("C contains non-finite entries")
        if c.shape != (a.shape[0], b.shape[0]):
            raise CMError(
                f"C shape {c.shape} incompatible with A {a.shape} and B {b.shape}"
            )
        c = c.copy()
        c.flags.writeable = False
        return cls(n=a.shape[0] // 2, m=b.shape[0] // 2, A=a, B=b, C=c)

    @classmethod
    def from_gamma(cls, gamma, n: int, m: int | None = None) -> "BipartiteCM":
        sym = _ingest_symmetric(gamma, "gamma")
        total = sym.shape[0] // 2
        if m is None:
            m = total - n
        if n < 1 or m < 1 or n + m != total:
            raise CMError(
                f"mode split {n}+{m} incompatible with a {sym.shape[0]}-row gamma"
            )
        k = 2 * n
        return cls.from_blocks(sym[:k, :k], sym[k:, k:], sym[:k, k:])

    @property
    def gamma(self) -> np.ndarray:
        return assemble(self)

    def block_validity(self, tol: ToleranceConfig = DEFAULT_TOL) -> tuple[bool, bool]:
        """Whether A and B are themselves valid single-party CMs."""
        a_ok = psd_check(self.A - 1j * symplectic_form(self.n), tol).is_psd
        b_ok = psd_check(self.B - 1j * symplectic_form(self.m), tol).is_psd
        return a_ok, b_ok


def assemble(cm: BipartiteCM) -> np.ndarray:
    """Assemble ``[[A, C], [C^T, B]]`` into one symmetric matrix."""
    top = np.hstack([cm.A, cm.C])
    bottom = np.hstack([cm.C.T, cm.B])
    return np.vstack([top, bottom])


def split(gamma, n: int, m: int | None = None) -> BipartiteCM:
    """Split an assembled correlation matrix into its bipartite blocks."""
    return BipartiteCM.from_gamma(gamma, n, m)


def validate_cm(gamma, tol: ToleranceConfig = DEFAULT_TOL) -> PsdReport:
    """Test whether ``gamma`` is a valid correlation matrix.

    Accepts a plain array, a :class:`CovarianceMatrix`, or a
    :class:`BipartiteCM`.  Structural problems (odd dimension, asymmetry
    beyond tolerance, non-finite entries) raise :class:`CMError`; the
    returned report answers only the ``gamma - iJ >= 0`` question, with
    ``lambda_min`` as the margin.
    """
    if isinstance(gamma, BipartiteCM):
        arr = gamma.gamma
    elif isinstance(gamma, CovarianceMatrix):
        arr = gamma.gamma
    else:
        arr = CovarianceMatrix.from_array(gamma).gamma
    j = symplectic_form(arr.shape[0] // 2)
    return psd_check(arr - 1j * j, tol)


def tmss(r: float) -> BipartiteCM:
    """Two-mode squeezed state with squeezing parameter ``r >= 0``.

    Blocks: ``A = B = cosh(2r) I``, ``C = sinh(2r) diag(1, -1)``.
    At ``r = 0`` this is the two-mode vacuum.
    """
    if r < 0:
        raise ValueError(f"squeezing parameter must be >= 0, got {r}")
    ch, sh = np.cosh(2.0 * r), np.sinh(2.0 * r)
    return BipartiteCM.from_blocks(
        ch * np.eye(2), ch * np.eye(2), sh * np.diag([1.0, -1.0])
    )


def momentum_flip(n_modes: int) -> np.ndarray:
    """Diagonal sign matrix flipping every momentum quadrature."""
    return np.kron(np.eye(n_modes), np.diag([1.0, -1.0]))


def partial_transpose(cm: BipartiteCM) -> BipartiteCM:
    """Partial transposition on the second subsystem.

    Acts on the correlation matrix by conjugation with
    ``I oplus momentum_flip(m)``: A is untouched, C picks up the sign
    flips from the right, B is conjugated.
    """
    flip = momentum_flip(cm.m)
    return BipartiteCM.from_blocks(cm.A, flip @ cm.B @ flip, cm.C @ flip)


def random_symplectic(n_modes: int, rng: np.random.Generator, n_factors: int = 3) -> np.ndarray:
    """Random symplectic matrix, a product of ``expm(J H)`` factors.

    Each factor exponentiates ``J H`` with ``H`` a symmetrized standard
    normal matrix; such exponentials are symplectic, and a short product
    of them mixes well enough for test fixtures.
    """
    if n_modes < 1:
        raise ValueError(f"n_modes must be >= 1, got {n_modes}")
    j = symplectic_form(n_modes)
    s = np.eye(2 * n_modes)
    for _ in range(n_factors):
        g = rng.standard_normal((2 * n_modes, 2 * n_modes))
        s = s @ expm(j @ ((g + g.T) / 2.0))
    return s


def _resolve_rng(seed, rng):
    if rng is not None:
        return rng
    return np.random.default_rng(seed)


def random_covariance(
    n_modes: int,
    purity: str = "mixed",
    seed: int | None = None,
    rng: np.random.Generator | None = None,
) -> CovarianceMatrix:
    """Random valid correlation matrix on ``n_modes`` modes.

    ``purity="pure"`` returns ``S S^T`` for a random symplectic ``S``
    (determinant one, saturating the validity bound).  ``purity="mixed"``
    adds PSD noise ``R R^T``, pushing the state strictly inside the
    valid cone.  Identical seeds give bit-identical output.
    """
    if purity not in ("pure", "mixed"):
        raise ValueError(f"purity must be 'pure' or 'mixed', got {purity!r}")
    gen = _resolve_rng(seed, rng)
    s = random_symplectic(n_modes, gen)
    gamma = s @ s.T
    if purity == "mixed":
        r = gen.standard_normal((2 * n_modes, 2 * n_modes)) / np.sqrt(2 * n_modes)
        gamma = gamma + r @ r.T
    return CovarianceMatrix.from_array(gamma)


def random_cm(
    n: int,
    m: int,
    purity: str = "mixed",
    seed: int | None = None,
    rng: np.random.Generator | None = None,
) -> BipartiteCM:
    """Random valid bipartite correlation matrix on ``n + m`` modes."""
    cov = random_covariance(n + m, purity=purity, seed=seed, rng=rng)
    return BipartiteCM.from_gamma(cov.gamma, n, m)


def random_separable_cm(
    n: int,
    m: int,
    seed: int | None = None,
    rng: np.random.Generator | None = None,
) -> tuple[BipartiteCM, np.ndarray, np.ndarray]:
    """Random separable bipartite CM, built as ``gamma_A oplus gamma_B + P``.

    The blocks are independent mixed-state CMs and ``P = R R^T`` is PSD
    noise across the full system, so separability holds by construction.
    Returns the assembled state together with the planted ``gamma_A``
    and ``gamma_B`` for use as ground truth in tests.
    """
    gen = _resolve_rng(seed, rng)
    gamma_a = random_covariance(n, "mixed", rng=gen).gamma
    gamma_b = random_covariance(m, "mixed", rng=gen).gamma
    d = 2 * (n + m)
    r = gen.standard_normal((d, d)) / np.sqrt(d)
    gamma = block_diag(gamma_a, gamma_b) + r @ r.T
    return BipartiteCM.from_gamma(gamma, n, m), gamma_a, gamma_b
