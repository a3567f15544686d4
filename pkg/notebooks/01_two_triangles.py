# %% [markdown]
# Two triangles sharing an edge
#
# Three atoms in the plane spread onto five targets.  The set of martingale
# couplings is a segment, and the atoms split into two irreducible
# components that touch along the vertical edge through the origin.

# %%
from pathlib import Path

from motpaver import golden
from motpaver.decomposition import check_decomposition, disintegrate, sub_paving
from motpaver.monotonicity import certify_support
from motpaver.paving import compute_paving, nu_invariance
from motpaver.plot import plot_paving
from motpaver.transport import solve_mot

inst = golden.example_4_2()
print(inst.mu, inst.nu)

# %%
paving = compute_paving(inst.mu, inst.nu)
for comp in paving.components:
    members = [inst.mu_labels[i] for i in comp.members]
    verts = [tuple(str(v) for v in p) for p in comp.vertices()]
    print(comp.id, members, "eta =", comp.eta, "vertices", verts)

# y0 = (0, 0) is on both closures; which component feeds it depends on the coupling
print("nu-invariant:", nu_invariance(paving))

# %%
out = Path(__file__).with_name("out")
out.mkdir(exist_ok=True)
plot_paving(paving, out / "two_triangles.svg", title="two components")

# %% [markdown]
# Reward the cell (x0, y1).  The optimizer is the vertex that puts 1/12 there,
# and the value splits over components as 1/3 * 1/4 + 2/3 * 0.

# %%
res = solve_mot(inst.mu, inst.nu, inst.cost)
print("value", res.value, "dual", res.certificate.value)
rep = check_decomposition(inst.mu, inst.nu, inst.cost, paving)
print(" + ".join(f"{r['eta']}*{r['value']}" for r in rep.components), "=", rep.weighted_sum)

# %%
good = certify_support(res.coupling.support(), inst.mu, inst.nu, inst.cost)
bad = certify_support(inst.couplings["P1"].support(), inst.mu, inst.nu, inst.cost)
print("optimizer support:", good.verdict, f"({good.trials} plans tried)")
print("other vertex:", bad.verdict, "gain", bad.witness.gap)

# %% [markdown]
# Within the right-hand component the optimizer is itself reducible: the
# two atoms each stay in their own half of the triangle.

# %%
right = disintegrate(paving, inst.couplings["P2"])[1]
for c in sub_paving(right).components:
    print([tuple(str(v) for v in p) for p in c.vertices()])
