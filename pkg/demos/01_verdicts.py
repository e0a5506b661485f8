"""
Deciding separability from a correlation matrix
================================================

A bipartite Gaussian state is fixed (up to displacements) by its
correlation matrix.  The decision procedure iterates a nonlinear map on
the matrix blocks until one of two certificates appears: a block that
fails the state condition (entangled) or a norm gap that guarantees a
separable decomposition exists (separable).

Run with: python3 demos/01_verdicts.py
"""

import numpy as np

from gsep import BipartiteCM, decide, tmss, validate_cm

# The vacuum of one mode per side: gamma is the identity, C = 0, and no
# correlations means separable at the first step.
vacuum = BipartiteCM.from_blocks(np.eye(2), np.eye(2), np.zeros((2, 2)))
verdict = decide(vacuum)
print("vacuum:", verdict.kind.value, "at step", verdict.step)
print("  reason:", verdict.reason)

# A two-mode squeezed state is the standard entangled example.  The map
# sends its A block to zero in one step, which fails the state condition
# with margin -1 regardless of the squeezing strength.
for r in (0.1, 0.5, 1.0):
    verdict = decide(tmss(r))
    print(f"tmss(r={r}):", verdict.kind.value,
          f"at step {verdict.step}, margin {verdict.margin:+.3f}")

# The full iteration history travels with the verdict.  Each step keeps
# the blocks plus the margins the termination tests looked at.
state = tmss(1.0)
trace = decide(state).trace
step = trace.steps[-1]
print("final A block:\n", np.round(step.A, 12))
print("final C block:\n", np.round(step.C, 12))

# Inputs are checked before any iteration: a matrix that is not a valid
# correlation matrix (here: too small to satisfy the uncertainty
# relation) is refused rather than classified.
report = validate_cm(0.5 * np.eye(4))
print("0.5 * identity is a state:", report.is_psd,
      f"(margin {report.lambda_min:+.3f})")
try:
    decide(BipartiteCM.from_gamma(0.5 * np.eye(4), 1, 1))
except ValueError as exc:
    print("decide refused:", exc)
