"""The contracting homotopy of prolong(k, A) onto A and its chain operator.

For every form eta on the prolongation,
    h(d eta) + d(h eta) = eta - (g0 o pi)^* eta
holds exactly. We check it on a few random forms and print h of each.
"""
from algebroidkit import chain_operator, poincare_homotopy, verify_chain
from algebroidkit.catalog import so3
from algebroidkit.sampling import random_tensor_form, trial_rng

pi, g0, H = poincare_homotopy(2, so3())
B = H.target
print(f"homotopy on {B.label}, rank {B.rank}")

for i in range(5):
    rng = trial_rng(2024, i)
    eta = random_tensor_form(rng, B, rng.randint(1, 3), max_degree=2, max_terms=2)
    h = chain_operator(H, eta)
    res = verify_chain(H, eta)
    print(f"\neta = {eta}\n  h(eta) = {h}\n  residual zero: {res.is_zero()}")
