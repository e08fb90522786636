"""
Bob guesses Alice's outcome
===========================

After Alice measures, Bob holds one of two conditional states.  The best
guessing rule comes from the sign structure of a 2x2 Hermitian matrix T.
"""

import numpy as np

from qcomplement import DiscriminationProblem, PovmParams, apply_measurement, build_povm, solve
from qcomplement.states import PureState

a, params = 0.3, PovmParams(0.8, 0.1, 1.2)
ens = apply_measurement(PureState.canonical(a), build_povm(params))
problem = DiscriminationProblem.from_ensemble(ens)
sol = solve(problem)

print("outcome probabilities", ens.probs)
print("T =\n", np.round(sol.t_matrix, 4))
print("eigenvalues", sol.eigenvalues)
print(f"P(error | 0) = {sol.err_given0:.4f}, P(error | 1) = {sol.err_given1:.4f}")
print(f"average gain {sol.avg_gain:.4f} = trace norm of T {np.abs(sol.eigenvalues).sum():.4f}")

# A thousand random projective rules never beat it.
rng = np.random.default_rng(1)
t = problem.weighted(1) - problem.weighted(0)
v = rng.normal(size=(1000, 2)) + 1j * rng.normal(size=(1000, 2))
v /= np.linalg.norm(v, axis=1, keepdims=True)
errs = problem.prior0 + np.einsum("ni,ij,nj->n", v.conj(), t, v).real
print(f"best random rule error {errs.min():.5f} vs optimum {sol.avg_error:.5f}")
