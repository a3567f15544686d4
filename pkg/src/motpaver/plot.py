"""SVG pictures of a planar paving."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.patches import Polygon  # noqa: E402


def _ordered(vertices: np.ndarray) -> np.ndarray:
    if len(vertices) < 3:
        return vertices
    c = vertices.mean(axis=0)
    ang = np.arctan2(vertices[:, 1] - c[1], vertices[:, 0] - c[0])
    return vertices[np.argsort(ang)]


def plot_paving(paving, path, title: str | None = None) -> None:
    """nu-atoms as dots scaled by weight, mu-atoms as crosses, component hulls
    as translucent polygons, attached atoms ringed in the component colour."""
    if paving.mu.d != 2:
        raise ValueError("plots are only drawn for d == 2")
    nu = paving.nu.atoms.astype(float)
    mu = paving.mu.atoms.astype(float)
    fig, ax = plt.subplots(figsize=(6, 6))
    colours = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    wmax = float(max(paving.nu.weights))
    for k, comp in enumerate(paving.components):
        col = colours[k % len(colours)]
        verts = _ordered(comp.vertices().astype(float))
        if len(verts) >= 3:
            ax.add_patch(Polygon(verts, closed=True, alpha=0.25, facecolor=col, edgecolor=col))
        else:
            ax.plot(verts[:, 0], verts[:, 1], color=col, alpha=0.5, lw=4)
        ring = nu[comp.j_atoms]
        ax.scatter(ring[:, 0], ring[:, 1], s=220 - 40 * (k % 3), facecolors="none",
                   edgecolors=col, linewidths=1.2)
        ax.scatter(mu[comp.members, 0], mu[comp.members, 1], marker="x", s=80, color=col)
    sizes = [20 + 160 * float(w) / wmax for w in paving.nu.weights]
    ax.scatter(nu[:, 0], nu[:, 1], s=sizes, color="black", zorder=3)
    ax.set_aspect("equal")
    ax.autoscale_view()
    if title:
        ax.set_title(title)
    fig.savefig(path, format="svg", bbox_inches="tight")
    plt.close(fig)
