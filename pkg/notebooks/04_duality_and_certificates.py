# %% [markdown]
# Primal, dual, and what the certificate covers
#
# A random rational instance in the plane: the superhedging triple matches
# the primal value exactly, and gluing componentwise triples only covers
# pairs inside a component.

# %%
import random
from fractions import Fraction as F

from motpaver.decomposition import componentwise_dual, glue
from motpaver.measures import DiscreteMeasure
from motpaver.paving import compute_paving
from motpaver.transport import solve_mot, verify_certificate

rng = random.Random(7)
ys = [(-2, 0), (2, 0), (0, 2), (0, -2), (3, 3), (4, 1)]
mu = DiscreteMeasure([(0, 0), (F(7, 2), 2)], [F(2, 3), F(1, 3)])
nu = DiscreteMeasure(ys, [F(1, 6), F(1, 6), F(1, 6), F(1, 6), F(1, 6), F(1, 6)])
cost = [[F(rng.randint(-3, 3)) for _ in ys] for _ in range(2)]

res = solve_mot(mu, nu, cost)
print("S =", res.value, " dual =", res.certificate.value, " violations:", verify_certificate(res.certificate))

# %%
paving = compute_paving(mu, nu)
print(len(paving), "components")
duals = componentwise_dual(mu, nu, cost, paving)
glued = glue(duals, mu, nu, cost)
print("on-scope violations:", glued.violations(paving.arith, on_scope=True))
print("off-scope violations:", glued.violations(paving.arith, on_scope=False))
