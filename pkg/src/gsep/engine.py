"""Separability decision engine for bipartite Gaussian states.

The engine iterates a nonlinear map on the block form ``[[A, C], [C^T, B]]``
of a correlation matrix.  One application computes the Hermitian Schur
complement ``X = C (B - iJ)^+ C^T`` and replaces the state by

    ``A' = B' = A - Re(X)``,   ``C' = -Im(X)``,

a square bipartite CM on ``n + n`` modes.  Two one-sided tests are applied
to every iterate ``N >= 1``:

* if ``A_N - iJ`` fails the PSD test decisively, the input was entangled;
* if ``A_N - ||C_N||_op I - iJ`` passes it, the input was separable, and
  the trace retains everything needed to reconstruct an explicit
  separable decomposition (see :mod:`gsep.certify`).

If an iterate stops being a valid CM before either test fires, the input
was entangled as well, and the iteration terminates with that verdict.
Verdicts are only issued outside a small absolute decision band around
zero; inputs that keep every margin inside the band come back
``UNDECIDED``, and :func:`decide_robust` is the documented way to resolve
them by perturbing with ``+/- eps`` times the identity.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

from .gaussian import BipartiteCM, InvalidCMError, symplectic_form, validate_cm
from .matlin import (
    DEFAULT_TOL,
    ToleranceConfig,
    operator_norm,
    pseudoinverse,
    psd_check,
    trace_norm,
)

__all__ = [
    "BracketError",
    "EngineError",
    "IterationStep",
    "IterationTrace",
    "MapPreconditionError",
    "NumericalError",
    "SweepPoint",
    "TheoremReport",
    "Verdict",
    "VerdictKind",
    "decide",
    "decide_robust",
    "find_threshold",
    "map_step",
    "sweep",
    "theorem_checks",
]


class EngineError(RuntimeError):
    """Base class for failures inside the decision iteration."""


class MapPreconditionError(EngineError):
    """The map was applied to a matrix that is not a valid CM."""


class NumericalError(EngineError):
    """An iterate became non-finite."""


class BracketError(EngineError):
    """No separable upper bracket was found during threshold search."""


class VerdictKind(str, Enum):
    SEPARABLE = "separable"
    ENTANGLED = "entangled"
    UNDECIDED = "undecided"


# Termination reasons recorded on the trace.
REASON_BLOCK_ENTANGLED = "A-block fails the CM test"
REASON_CONE_ENTANGLED = "iterate left the CM cone"
REASON_NORM_GAP_SEPARABLE = "norm-shifted A-block passes the CM test"
REASON_MAX_ITER = "iteration limit reached"


@dataclass(frozen=True)
class IterationStep:
    """One iterate ``gamma_N`` together with its decision margins.

    ``margin_A`` is ``lambda_min(A_N - iJ)``, ``margin_L`` the same for
    the shifted block ``A_N - ||C_N||_op I``, and ``margin_full`` for the
    assembled iterate ``gamma_N - iJ``.  The ``scale_*`` companions are
    the ``max(1, |lambda|_max)`` factors the relative PSD tests use.
    """

    index: int
    A: np.ndarray
    C: np.ndarray
    margin_A: float
    margin_L: float
    margin_full: float
    c_opnorm: float
    a_trnorm: float
    scale_A: float
    scale_L: float
    scale_full: float

    @property
    def B(self) -> np.ndarray:
        # iterates always have B_N = A_N
        return self.A

    def as_cm(self) -> BipartiteCM:
        return BipartiteCM.from_blocks(self.A, self.A, self.C)


@dataclass(frozen=True)
class IterationTrace:
    """The input state, every computed iterate, and why iteration stopped."""

    gamma0: BipartiteCM
    steps: tuple[IterationStep, ...]
    reason: str

    @property
    def c_opnorm_history(self) -> tuple[float, ...]:
        return tuple(step.c_opnorm for step in self.steps)

    @property
    def a_trnorm_history(self) -> tuple[float, ...]:
        return tuple(step.a_trnorm for step in self.steps)


@dataclass(frozen=True)
class Verdict:
    """Outcome of :func:`decide`.

    ``margin`` is the eigenvalue margin of whichever test fired; for an
    UNDECIDED verdict it is the final ``margin_L``, the distance still
    missing for a separability verdict.
    """

    kind: VerdictKind
    step: int
    margin: float
    reason: str
    trace: IterationTrace


class TheoremReport(NamedTuple):
    entangled_fired: bool
    separable_fired: bool
    margin_A: float
    margin_L: float


class SweepPoint(NamedTuple):
    eps: float
    kind: VerdictKind
    steps: int


def map_step(cm: BipartiteCM, tol: ToleranceConfig = DEFAULT_TOL, validate: bool = True) -> BipartiteCM:
    """Apply one step of the iteration map to a bipartite CM.

    Args:
        cm: The current state in block form.
        tol: Tolerances for validation and the pseudoinverse cutoff.
        validate: When true (the default), reject inputs that fail the
            CM test; the map's contract only covers valid states.

    Returns:
        The next iterate, a square bipartite CM on ``n + n`` modes with
        symmetric ``A' = B'`` and antisymmetric ``C'``.
    """
    if validate:
        report = validate_cm(cm, tol)
        if not report.is_psd:
            raise MapPreconditionError(
                f"input is not a valid CM (margin {report.lambda_min:.3e})"
            )
    j_m = symplectic_form(cm.m)
    x = cm.C @ pseudoinverse(cm.B - 1j * j_m, tol) @ cm.C.T
    if not np.all(np.isfinite(x)):
        raise NumericalError("map produced a non-finite Schur complement")
    a_next = cm.A - x.real
    a_next = (a_next + a_next.T) / 2.0
    c_next = -x.imag
    c_next = (c_next - c_next.T) / 2.0
    return BipartiteCM.from_blocks(a_next, a_next, c_next)


def _make_step(index: int, cm: BipartiteCM, tol: ToleranceConfig) -> IterationStep:
    """Assemble an IterationStep with all margins for iterate ``cm``."""
    if not (np.all(np.isfinite(cm.A)) and np.all(np.isfinite(cm.C))):
        raise NumericalError(f"non-finite iterate at step {index}")
    j_n = symplectic_form(cm.n)
    eigs_a = np.linalg.eigvalsh(cm.A - 1j * j_n)
    margin_a = float(eigs_a[0])
    scale_a = max(1.0, float(np.abs(eigs_a).max()))
    c_op = operator_norm(cm.C)
    # L - iJ = (A - iJ) - c_op I shifts every eigenvalue by exactly -c_op,
    # so no second eigensolve is needed.
    margin_l = margin_a - c_op
    scale_l = max(1.0, float(np.abs(eigs_a - c_op).max()))
    eigs_full = np.linalg.eigvalsh(cm.gamma - 1j * symplectic_form(cm.n + cm.m))
    return IterationStep(
        index=index,
        A=cm.A,
        C=cm.C,
        margin_A=margin_a,
        margin_L=margin_l,
        margin_full=float(eigs_full[0]),
        c_opnorm=c_op,
        a_trnorm=trace_norm(cm.A),
        scale_A=scale_a,
        scale_L=scale_l,
        scale_full=max(1.0, float(np.abs(eigs_full).max())),
    )


def theorem_checks(step: IterationStep, tol: ToleranceConfig = DEFAULT_TOL) -> TheoremReport:
    """Apply the two one-sided termination tests to an iterate.

    Only defined for ``N >= 1``; the tests say nothing about the input
    ``gamma_0`` itself.  The entangled test fires when ``margin_A`` falls
    decisively below zero (beyond the absolute decision band); the
    separable test fires when the norm-shifted block passes the relative
    PSD test.
    """
    if step.index < 1:
        raise ValueError(f"termination tests apply to iterates N >= 1, got {step.index}")
    entangled = step.margin_A < -tol.decision_margin
    separable = step.margin_L >= -tol.psd_tol * step.scale_L
    return TheoremReport(entangled, separable, step.margin_A, step.margin_L)


def decide(cm: BipartiteCM, tol: ToleranceConfig = DEFAULT_TOL, max_iter: int = 200) -> Verdict:
    """Decide separability of a bipartite Gaussian state.

    The input must be a valid CM; anything else is rejected as
    not-a-state rather than classified.  Iterates are tested in order
    (entangled test, separable test, then validity of the full iterate);
    the first decisive test terminates the run.

    Returns:
        A Verdict whose trace retains the input and every iterate, which
        is what certificate reconstruction consumes.
    """
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")
    report = validate_cm(cm, tol)
    if not report.is_psd:
        raise InvalidCMError(
            f"input fails the CM test (margin {report.lambda_min:.3e}); "
            "not a state, refusing to classify"
        )

    steps: list[IterationStep] = []
    current = cm
    for index in range(1, max_iter + 1):
        current = map_step(current, tol, validate=False)
        step = _make_step(index, current, tol)
        steps.append(step)
        checks = theorem_checks(step, tol)
        if checks.entangled_fired:
            trace = IterationTrace(cm, tuple(steps), REASON_BLOCK_ENTANGLED)
            return Verdict(VerdictKind.ENTANGLED, index, step.margin_A,
                           REASON_BLOCK_ENTANGLED, trace)
        if checks.separable_fired:
            trace = IterationTrace(cm, tuple(steps), REASON_NORM_GAP_SEPARABLE)
            return Verdict(VerdictKind.SEPARABLE, index, step.margin_L,
                           REASON_NORM_GAP_SEPARABLE, trace)
        if step.margin_full < -tol.psd_tol * step.scale_full \
                and step.margin_full < -tol.decision_margin:
            # the iterate itself stopped being a CM: entangled input
            trace = IterationTrace(cm, tuple(steps), REASON_CONE_ENTANGLED)
            return Verdict(VerdictKind.ENTANGLED, index, step.margin_full,
                           REASON_CONE_ENTANGLED, trace)
    trace = IterationTrace(cm, tuple(steps), REASON_MAX_ITER)
    return Verdict(VerdictKind.UNDECIDED, max_iter, steps[-1].margin_L,
                   REASON_MAX_ITER, trace)


def _shifted(cm: BipartiteCM, eps: float, perturbation: np.ndarray | None = None) -> BipartiteCM:
    d = 2 * (cm.n + cm.m)
    pert = np.eye(d) if perturbation is None else perturbation
    return BipartiteCM.from_gamma(cm.gamma + eps * pert, cm.n, cm.m)


def decide_robust(cm: BipartiteCM, eps: float, tol: ToleranceConfig = DEFAULT_TOL,
                  max_iter: int = 200) -> Verdict:
    """Decide separability up to an ``eps``-sized identity perturbation.

    Runs :func:`decide` on ``gamma + eps I`` and, if needed, on
    ``gamma - eps I``.  Only two inferences are drawn: entangled for the
    enlarged state implies entangled for the state, and separable for
    the shrunk state implies separable.  Everything else comes back
    UNDECIDED ("undecided within eps").  When ``gamma - eps I`` is not a
    valid CM the negative side is skipped and the plain verdict on
    ``gamma`` itself is returned instead.
    """
    if eps <= 0:
        raise ValueError(f"eps must be > 0, got {eps}")
    plus = decide(_shifted(cm, +eps), tol, max_iter)
    if plus.kind is VerdictKind.ENTANGLED:
        return Verdict(plus.kind, plus.step, plus.margin,
                       f"entangled even with +eps={eps:g} of identity noise",
                       plus.trace)
    minus_gamma = cm.gamma - eps * np.eye(2 * (cm.n + cm.m))
    if not validate_cm(minus_gamma, tol).is_psd:
        return decide(cm, tol, max_iter)
    minus = decide(_shifted(cm, -eps), tol, max_iter)
    if minus.kind is VerdictKind.SEPARABLE:
        return Verdict(minus.kind, minus.step, minus.margin,
                       f"separable even after removing eps={eps:g} of identity",
                       minus.trace)
    return Verdict(VerdictKind.UNDECIDED, minus.step, minus.margin,
                   f"undecided within eps={eps:g}", minus.trace)


def sweep(cm: BipartiteCM, perturbation: np.ndarray, eps_grid,
          tol: ToleranceConfig = DEFAULT_TOL, max_iter: int = 200,
          stop_after_separable: bool = False) -> list[SweepPoint]:
    """Run :func:`decide` on ``gamma + eps P`` for every ``eps`` in a grid.

    The grid is sorted ascending before the runs.  ``perturbation`` must
    be PSD so that larger ``eps`` can only make the state more separable
    along the ray.  With ``stop_after_separable`` the sweep stops at the
    first separable verdict; by default every grid point is evaluated.
    """
    grid = np.asarray(eps_grid, dtype=float).ravel()
    if grid.size == 0:
        raise ValueError("eps grid is empty")
    if not np.all(np.isfinite(grid)) or np.any(grid < 0):
        raise ValueError("eps grid must be finite and non-negative")
    pert = np.asarray(perturbation, dtype=float)
    if pert.shape != (2 * (cm.n + cm.m),) * 2:
        raise ValueError(f"perturbation has wrong shape {pert.shape}")
    if not psd_check(pert, tol).is_psd:
        raise ValueError("perturbation must be PSD")

    points = []
    for eps in np.sort(grid):
        verdict = decide(_shifted(cm, float(eps), pert), tol, max_iter)
        points.append(SweepPoint(float(eps), verdict.kind, verdict.step))
        if stop_after_separable and verdict.kind is VerdictKind.SEPARABLE:
            break
    return points


def find_threshold(cm: BipartiteCM, perturbation: np.ndarray | None = None,
                   tol: ToleranceConfig = DEFAULT_TOL, max_iter: int = 200,
                   eps_max: float = 1e6, width: float = 1e-12) -> float:
    """Smallest ``eps`` such that ``gamma + eps P`` is separable, by bisection.

    ``perturbation`` defaults to the identity.  An already-separable
    input returns ``0.0``.  The upper bracket is found by doubling from
    ``eps = 1``; failing to find one below ``eps_max`` raises
    :class:`BracketError`.  Bisection narrows the bracket to ``width``
    and returns its midpoint.  UNDECIDED verdicts count as
    not-yet-separable, so the returned value errs on the large side.
    """
    pert = np.eye(2 * (cm.n + cm.m)) if perturbation is None else np.asarray(perturbation, dtype=float)
    if pert.shape != (2 * (cm.n + cm.m),) * 2:
        raise ValueError(f"perturbation has wrong shape {pert.shape}")
    if not psd_check(pert, tol).is_psd:
        raise ValueError("perturbation must be PSD")

    base = decide(cm, tol, max_iter)
    if base.kind is VerdictKind.SEPARABLE:
        return 0.0
    if base.kind is VerdictKind.UNDECIDED:
        raise BracketError(
            "verdict on the unperturbed state is undecided; no bracket exists"
        )

    def separable_at(eps: float) -> bool:
        verdict = decide(_shifted(cm, eps, pert), tol, max_iter)
        return verdict.kind is VerdictKind.SEPARABLE

    lo, hi = 0.0, 1.0
    while not separable_at(hi):
        lo = hi
        hi *= 2.0
        if hi > eps_max:
            raise BracketError(
                f"no separable bracket found below eps_max={eps_max:g}"
            )
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if separable_at(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
