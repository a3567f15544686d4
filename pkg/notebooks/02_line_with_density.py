# %% [markdown]
# Two atoms on the line against a measure with a flat part
#
# The flat part of nu is replaced by cell midpoints.  Zero is always a cell
# boundary, so the atom there stays on the edge of both components.

# %%
from motpaver import golden
from motpaver.measures import convex_order_check, oracle_convex_order_1d
from motpaver.monotonicity import weakly_convex_check_1d
from motpaver.paving import compute_paving, nu_invariance

for n in (8, 16, 32, 64):
    inst = golden.example_2_1(n)
    assert convex_order_check(inst.mu, inst.nu).ordered == oracle_convex_order_1d(inst.mu, inst.nu)
    paving = compute_paving(inst.mu, inst.nu)
    ivs = [(str(min(c.vertices()[:, 0])), str(max(c.vertices()[:, 0]))) for c in paving.components]
    ends = [sorted(str(inst.nu.atoms[j][0]) for j in c.boundary_atoms(inst.nu)) for c in paving.components]
    print(f"n={n:3d}  components {ivs}  boundary atoms {ends}  invariant {nu_invariance(paving)}")

# %% [markdown]
# A function that is convex on each closed component but not globally:
# |y + 1| on the left, a jump at 0, then |y - 1| - 5 on the right.

# %%
ys = [y[0] for y in inst.nu.atoms]
f = [abs(y + 1) if y < 0 else (1 if y == 0 else abs(y - 1) - 5) for y in ys]
print("convex on each component:", weakly_convex_check_1d(f, paving))
print("y^2:", weakly_convex_check_1d([y * y for y in ys], paving))
print("-y^2:", weakly_convex_check_1d([-y * y for y in ys], paving))
