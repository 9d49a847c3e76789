"""Figures written next to the text reports.

Uses the object-oriented matplotlib API only, so no display or pyplot state
is involved and figures can be produced from worker processes.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from matplotlib.figure import Figure
from mpl_toolkits.mplot3d import Axes3D  # noqa: F401  registers the 3d projection

from .covering import geodesic_mesh

__all__ = ["plot_embedding", "plot_covering", "plot_batch_summary"]

# preview mesh for covering maps; the certification mesh is far too dense to draw
PREVIEW_STEP = 0.05


def _save(fig, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    return path


def _sphere_wireframe(ax):
    u = np.linspace(0, 2 * np.pi, 36)
    v = np.linspace(0, np.pi, 18)
    ax.plot_wireframe(
        np.outer(np.cos(u), np.sin(v)),
        np.outer(np.sin(u), np.sin(v)),
        np.outer(np.ones_like(u), np.cos(v)),
        color="0.85",
        linewidth=0.4,
    )


def plot_embedding(emb, graph=None, path="embedding.png", title=None):
    """Embedded points with the ``Gamma_alpha`` edges.

    Dimension 2 is drawn in the plane; higher dimensions show the first three
    coordinates.
    """
    pts = np.asarray(emb.points)
    fig = Figure(figsize=(5, 5))
    edges = graph.edges() if graph is not None else []
    if pts.shape[1] == 1:
        pts = np.column_stack([pts, np.zeros(len(pts))])
    if pts.shape[1] == 2:
        ax = fig.add_subplot()
        ax.add_patch(_circle())
        for x, y in edges:
            ax.plot(*pts[[x, y]].T, color="tab:blue", linewidth=1)
        ax.scatter(pts[:, 0], pts[:, 1], color="tab:red", zorder=3)
        ax.set_aspect("equal")
        ax.set_xlim(-1.1, 1.1)
        ax.set_ylim(-1.1, 1.1)
    else:
        ax = fig.add_subplot(projection="3d")
        _sphere_wireframe(ax)
        for x, y in edges:
            ax.plot(*pts[[x, y], :3].T, color="tab:blue", linewidth=1)
        ax.scatter(pts[:, 0], pts[:, 1], pts[:, 2], color="tab:red", depthshade=False)
        ax.set_box_aspect((1, 1, 1))
    ax.set_title(title or f"E_{emb.j}: n={emb.n}, m={emb.m}, alpha={emb.alpha:.6g}")
    return _save(fig, path)


def _circle():
    from matplotlib.patches import Circle

    return Circle((0, 0), 1, fill=False, color="0.7", linewidth=0.8)


def plot_covering(spec, report, path="covering.png"):
    """``max_x <p, x>`` over the sphere in longitude/latitude, with ``alpha`` marked."""
    mesh = geodesic_mesh(PREVIEW_STEP).points
    f = (mesh @ spec.vertices.T).max(axis=1)
    lon = np.degrees(np.arctan2(mesh[:, 1], mesh[:, 0]))
    lat = np.degrees(np.arcsin(np.clip(mesh[:, 2], -1, 1)))
    fig = Figure(figsize=(8, 4))
    ax = fig.add_subplot()
    sc = ax.scatter(lon, lat, c=f, s=2, cmap="viridis", vmin=report.alpha, vmax=1)
    fig.colorbar(sc, ax=ax, label="max inner product with a vertex")
    v = spec.vertices
    ax.scatter(np.degrees(np.arctan2(v[:, 1], v[:, 0])), np.degrees(np.arcsin(v[:, 2])),
               marker="x", color="red", label="vertices")
    hole = np.asarray(report.argmin)
    ax.scatter([np.degrees(np.arctan2(hole[1], hole[0]))], [np.degrees(np.arcsin(hole[2]))],
               marker="o", facecolors="none", edgecolors="white", s=80, label="deepest hole")
    ax.set_xlabel("longitude (deg)")
    ax.set_ylabel("latitude (deg)")
    ax.set_title(f"{spec.label.slug}: alpha={report.alpha:.6g}, certified margin={report.margin:.4g}")
    ax.legend(loc="lower left", fontsize="small")
    return _save(fig, path)


def plot_batch_summary(manifest, path="summary.png"):
    """Per-input runtime bars coloured by outcome."""
    results = manifest.results
    fig = Figure(figsize=(7, 0.35 * max(len(results), 1) + 1))
    ax = fig.add_subplot()
    colors = []
    for r in results:
        if r.result is None:
            colors.append("tab:gray")
        elif r.result.rejected:
            colors.append("tab:red")
        else:
            colors.append("tab:green")
    y = np.arange(len(results))
    ax.barh(y, [r.elapsed_ms for r in results], color=colors)
    ax.set_yticks(y, [f"{r.id}  {r.result.label if r.result else 'ERROR'}" for r in results])
    ax.invert_yaxis()
    ax.set_xlabel("elapsed (ms)")
    return _save(fig, path)
