# %% [markdown]
# Three atoms and the uniform law on the square
#
# On every grid the martingale coupling is unique: the min and max of each
# cell mass coincide.  The three components are quadrilaterals that share
# edges along the axes.

# %%
import time
from pathlib import Path

from motpaver import golden
from motpaver.paving import cell_mass_range, compute_paving
from motpaver.plot import plot_paving

out = Path(__file__).with_name("out")
out.mkdir(exist_ok=True)

for n, exact in ((4, True), (8, True), (8, False), (12, False)):
    inst = golden.example_4_1(n, exact=exact)
    t0 = time.perf_counter()
    paving = compute_paving(inst.mu, inst.nu)
    lo, hi = cell_mass_range(inst.mu, inst.nu, paving.region)
    gap = max((hi - lo).ravel())
    print(f"n={n:2d} {'exact' if exact else 'float'}: {len(paving)} components, "
          f"max cell spread {float(gap):.1e}, {time.perf_counter() - t0:.2f}s")

plot_paving(paving, out / "square.svg", title=f"grid {n}")
