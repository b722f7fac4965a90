"""Grid-sampled fields on log-polar rectangles and their calculus.

All derivatives are taken in (s, theta) with s = ln r, where every polar
operator has constant coefficients; r-space formulas are recovered through
the factors e^{-s} and e^{-2s}.  Stencils are second-order central in the
interior and second-order one-sided at edges, so derived fields exist up
to (but not including) the corners; corner nodes are excluded from all
max-norms.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .domain import LogPolarGrid
from .errors import NotDivergenceFree
from .exact import HomogeneousSolution

#: default ceiling for the relative discrete-divergence precheck
DIVERGENCE_TOL = 1e-6


@dataclass(frozen=True)
class ScalarField:
    """Node-indexed scalar samples, s-major: vals[i, j] at (s_i, theta_j)."""

    grid: LogPolarGrid
    vals: np.ndarray

    def __post_init__(self):
        if self.vals.shape != self.grid.shape:
            raise ValueError(
                f"values shape {self.vals.shape} != grid shape {self.grid.shape}"
            )


@dataclass(frozen=True)
class VectorField:
    """Polar velocity samples (u_r, u_theta) on grid nodes, s-major."""

    grid: LogPolarGrid
    ur_vals: np.ndarray
    utheta_vals: np.ndarray

    def __post_init__(self):
        if (
            self.ur_vals.shape != self.grid.shape
            or self.utheta_vals.shape != self.grid.shape
        ):
            raise ValueError("component arrays must match the grid shape")

    def magnitude(self) -> np.ndarray:
        return np.hypot(self.ur_vals, self.utheta_vals)


@dataclass(frozen=True)
class Alpha1Frame:
    """Working frame Psi = psi(e^s, theta) - c*s."""

    c: float


@dataclass(frozen=True)
class GeneralFrame:
    """Working frame Psi = psi(e^s, theta) * e^{s(alpha-1)}."""

    alpha: float


@dataclass(frozen=True)
class RawFrame:
    """Identity frame Psi = psi(e^s, theta)."""


FrameTag = Alpha1Frame | GeneralFrame | RawFrame


def _mask_corners(a: np.ndarray) -> np.ndarray:
    out = a.copy()
    out[0, 0] = out[0, -1] = out[-1, 0] = out[-1, -1] = np.nan
    return out


def interior_max(vals: np.ndarray) -> float:
    """Max-norm ignoring NaN-flagged (boundary/corner) nodes."""
    finite = vals[np.isfinite(vals)]
    return float(np.max(np.abs(finite))) if finite.size else 0.0


def _d_s(vals: np.ndarray, h: float) -> np.ndarray:
    return np.gradient(vals, h, axis=0, edge_order=2)


def _d_theta(vals: np.ndarray, h: float) -> np.ndarray:
    return np.gradient(vals, h, axis=1, edge_order=2)


def velocity_from_stream(psi: ScalarField) -> VectorField:
    """u_theta = psi_r, u_r = -(1/r) psi_theta via differences in (s, theta)."""
    g = psi.grid
    inv_r = np.exp(-g.s_nodes)[:, None]
    ut = inv_r * _d_s(psi.vals, g.h_s)
    ur = -inv_r * _d_theta(psi.vals, g.h_theta)
    return VectorField(g, ur, ut)


def divergence_defect(u: VectorField) -> np.ndarray:
    """Discrete r-scaled divergence d_r(r u_r) + d_theta(u_theta)."""
    g = u.grid
    e_s = np.exp(g.s_nodes)[:, None]
    return (1.0 / e_s) * _d_s(e_s * u.ur_vals, g.h_s) + _d_theta(
        u.utheta_vals, g.h_theta
    )


def stream_from_velocity(u: VectorField, tol: float = DIVERGENCE_TOL) -> ScalarField:
    """Reconstruct psi by trapezoid line integration, psi(s_min, 0) = 0.

    Integrates u_theta dr along theta = 0 first, then -r u_r dtheta along
    rays.  The relative divergence defect must be below ``tol``; the
    alternate integration order (theta-edge first) gives the reported
    path-independence defect, available as ``.path_defect`` metadata via
    :func:`stream_path_defect`.
    """
    g = u.grid
    div = divergence_defect(u)
    scale = float(np.max(u.magnitude())) + 1e-300
    worst = np.unravel_index(np.nanargmax(np.abs(div)), div.shape)
    if abs(div[worst]) / scale > tol:
        raise NotDivergenceFree(
            f"relative divergence defect {abs(div[worst]) / scale:.3e} "
            f"exceeds {tol:.1e}",
            defect=float(abs(div[worst]) / scale),
            node=tuple(int(k) for k in worst),
        )
    r = g.r_nodes
    # psi along theta = 0: integral of u_theta dr = u_theta e^s ds
    base = np.concatenate(
        [
            [0.0],
            np.cumsum(
                (u.utheta_vals[1:, 0] * r[1:] + u.utheta_vals[:-1, 0] * r[:-1])
                * (g.h_s / 2.0)
            ),
        ]
    )
    # along each ray: psi_theta = -r u_r
    ray = np.concatenate(
        [
            np.zeros((g.n_s + 1, 1)),
            np.cumsum(
                (u.ur_vals[:, 1:] + u.ur_vals[:, :-1]) * (g.h_theta / 2.0), axis=1
            ),
        ],
        axis=1,
    )
    vals = base[:, None] - r[:, None] * ray
    return ScalarField(g, vals)


def stream_path_defect(u: VectorField, psi: ScalarField) -> float:
    """Max gap against the theta-first integration order (path independence)."""
    g = u.grid
    r = g.r_nodes
    edge = -r[0] * np.concatenate(
        [
            [0.0],
            np.cumsum((u.ur_vals[0, 1:] + u.ur_vals[0, :-1]) * (g.h_theta / 2.0)),
        ]
    )
    col = np.concatenate(
        [
            np.zeros((1, g.n_theta + 1)),
            np.cumsum(
                (u.utheta_vals[1:, :] * r[1:, None] + u.utheta_vals[:-1, :] * r[:-1, None])
                * (g.h_s / 2.0),
                axis=0,
            ),
        ],
        axis=0,
    )
    alt = edge[None, :] + col
    return float(np.max(np.abs(alt - psi.vals)))


def laplacian_polar(psi: ScalarField) -> ScalarField:
    """Delta psi = e^{-2s} (psi_ss + psi_thth), interior nodes only (NaN edges)."""
    g = psi.grid
    out = np.full(g.shape, np.nan)
    v = psi.vals
    core = (v[2:, 1:-1] - 2.0 * v[1:-1, 1:-1] + v[:-2, 1:-1]) / g.h_s**2 + (
        v[1:-1, 2:] - 2.0 * v[1:-1, 1:-1] + v[1:-1, :-2]
    ) / g.h_theta**2
    out[1:-1, 1:-1] = np.exp(-2.0 * g.s_nodes[1:-1])[:, None] * core
    return ScalarField(g, out)


def euler_residual(
    u: VectorField, P: ScalarField
) -> tuple[ScalarField, ScalarField, ScalarField]:
    """Residual fields of the polar momentum and continuity equations.

    mom_r = u_r u_r,r + (u_t/r) u_r,th - u_t^2/r + P_r
    mom_t = u_r u_t,r + (u_t/r) u_t,th + u_t u_r / r + P_th / r
    div   = d_r(r u_r) + d_theta(u_t)

    Central differences inside, one-sided at edges, NaN at corners.
    """
    g = u.grid
    inv_r = np.exp(-g.s_nodes)[:, None]
    ur, ut = u.ur_vals, u.utheta_vals
    dr = lambda a: inv_r * _d_s(a, g.h_s)
    dth = lambda a: _d_theta(a, g.h_theta)
    mom_r = ur * dr(ur) + inv_r * ut * dth(ur) - inv_r * ut**2 + dr(P.vals)
    mom_t = ur * dr(ut) + inv_r * ut * dth(ut) + inv_r * ut * ur + inv_r * dth(P.vals)
    div = divergence_defect(u)
    return (
        ScalarField(g, _mask_corners(mom_r)),
        ScalarField(g, _mask_corners(mom_t)),
        ScalarField(g, _mask_corners(div)),
    )


def to_working_frame(psi: ScalarField, tag: FrameTag) -> ScalarField:
    """Apply the frame transform; exactly inverted by from_working_frame."""
    g = psi.grid
    s = g.s_nodes[:, None]
    if isinstance(tag, Alpha1Frame):
        return ScalarField(g, psi.vals - tag.c * s)
    if isinstance(tag, GeneralFrame):
        return ScalarField(g, psi.vals * np.exp(s * (tag.alpha - 1.0)))
    return ScalarField(g, psi.vals.copy())


def from_working_frame(Psi: ScalarField, tag: FrameTag) -> ScalarField:
    g = Psi.grid
    s = g.s_nodes[:, None]
    if isinstance(tag, Alpha1Frame):
        return ScalarField(g, Psi.vals + tag.c * s)
    if isinstance(tag, GeneralFrame):
        return ScalarField(g, Psi.vals * np.exp(-s * (tag.alpha - 1.0)))
    return ScalarField(g, Psi.vals.copy())


def sample_stream(sol: HomogeneousSolution, grid: LogPolarGrid) -> ScalarField:
    """Closed-form stream function sampled at the grid nodes."""
    S, TH = grid.mesh()
    return ScalarField(grid, np.asarray(sol.stream(np.exp(S), TH), dtype=float))


def sample_velocity(
    sol: HomogeneousSolution, grid: LogPolarGrid
) -> tuple[VectorField, ScalarField]:
    """Closed-form (velocity, pressure) sampled at the grid nodes."""
    S, TH = grid.mesh()
    ur, ut, P = sol.velocity_pressure(np.exp(S), TH)
    return VectorField(grid, ur, ut), ScalarField(grid, P)


def field_to_csv(field: ScalarField) -> str:
    """(s, theta, value) rows with repr floats for byte-stable output."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["s", "theta", "value"])
    s_nodes, th_nodes = field.grid.s_nodes, field.grid.theta_nodes
    for i, s in enumerate(s_nodes):
        for j, th in enumerate(th_nodes):
            w.writerow([repr(float(s)), repr(float(th)), repr(float(field.vals[i, j]))])
    return buf.getvalue()


def field_from_csv(text: str, grid: LogPolarGrid) -> ScalarField:
    rows = list(csv.reader(io.StringIO(text)))
    vals = np.full(grid.shape, np.nan)
    for s, th, v in rows[1:]:
        i = round((float(s) - grid.s_min) / grid.h_s)
        j = round(float(th) / grid.h_theta)
        vals[i, j] = float(v)
    return ScalarField(grid, vals)


#: node count beyond which exports switch to binary + JSON sidecar
BINARY_EXPORT_NODES = 512 * 512


def write_field(field: ScalarField, path: str | Path) -> Path:
    """Write CSV for small grids, row-major binary + sidecar for large ones.

    Returns the path actually written (binary dumps get a .npy suffix and
    a .json sidecar with the grid metadata).
    """
    path = Path(path)
    n_nodes = field.grid.shape[0] * field.grid.shape[1]
    if n_nodes < BINARY_EXPORT_NODES:
        path.write_text(field_to_csv(field))
        return path
    bin_path = path.with_suffix(".npy")
    np.save(bin_path, np.ascontiguousarray(field.vals))
    sidecar = path.with_suffix(".json")
    sidecar.write_text(json.dumps(field.grid.metadata(), sort_keys=True))
    return bin_path
