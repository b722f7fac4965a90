"""Sector-type domains and log-polar computational grids.

The region is {(r, theta): a < r < b, 0 < theta < theta0} with
0 <= a < b <= inf and theta0 in (0, 2*pi].  All discretization happens in
s = ln r, so infinite domains are truncated in s and every transformed
operator has constant coefficients.  theta0 = 2*pi is treated as a slit
annulus: theta = 0 and theta = 2*pi remain distinct boundary edges.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import GridError, InvalidAngle, InvalidRadii

TWO_PI = 2.0 * math.pi

#: default half-width (in s) of the truncation window for infinite domains
DEFAULT_CLIP_HALFWIDTH = 4.0

#: minimum cell count per direction required by the solver stencils
MIN_CELLS = 8


@dataclass(frozen=True)
class SectorDomain:
    """Validated sector-type region with its boundary taxonomy.

    Edges: T (theta = theta0) and B (theta = 0) always exist; L (r = a)
    exists iff a > 0; R (r = b) exists iff b < inf.  Vertices TL/BL exist
    with L, TR/BR with R.
    """

    a: float
    b: float
    theta0: float

    @property
    def edges(self) -> tuple[str, ...]:
        names = ["T", "B"]
        if self.a > 0:
            names.append("L")
        if math.isfinite(self.b):
            names.append("R")
        return tuple(names)

    @property
    def vertices(self) -> tuple[str, ...]:
        names = []
        if self.a > 0:
            names += ["TL", "BL"]
        if math.isfinite(self.b):
            names += ["TR", "BR"]
        return tuple(names)

    @property
    def is_truncated_sector(self) -> bool:
        return self.a > 0

    @property
    def is_finite(self) -> bool:
        return self.a > 0 and math.isfinite(self.b)


def make_sector(a: float, b: float, theta0: float) -> SectorDomain:
    """Validate (a, b, theta0) and build the domain.

    Raises InvalidRadii unless 0 <= a < b <= inf, and InvalidAngle unless
    0 < theta0 <= 2*pi.
    """
    if math.isnan(a) or math.isnan(b) or a < 0 or a >= b:
        raise InvalidRadii(f"need 0 <= a < b <= inf, got a={a}, b={b}")
    if not (0.0 < theta0 <= TWO_PI + 1e-15):
        raise InvalidAngle(f"opening angle must lie in (0, 2*pi], got {theta0}")
    return SectorDomain(float(a), float(b), min(float(theta0), TWO_PI))


@dataclass(frozen=True)
class LogPolarGrid:
    """Uniform rectangle in (s, theta) = (ln r, theta) coordinates.

    Node (i, j) sits at (s_min + i*h_s, j*h_theta) for i in 0..n_s,
    j in 0..n_theta.  For a = 0 or b = inf the bounds record the
    truncation levels actually used.
    """

    s_min: float
    s_max: float
    n_s: int
    n_theta: int
    theta0: float

    def __post_init__(self):
        if not (self.s_min < self.s_max):
            raise GridError(f"need s_min < s_max, got [{self.s_min}, {self.s_max}]")
        if self.n_s < MIN_CELLS or self.n_theta < MIN_CELLS:
            raise GridError(
                f"stencils need at least {MIN_CELLS} cells per direction, "
                f"got n_s={self.n_s}, n_theta={self.n_theta}"
            )

    @property
    def h_s(self) -> float:
        return (self.s_max - self.s_min) / self.n_s

    @property
    def h_theta(self) -> float:
        return self.theta0 / self.n_theta

    @property
    def shape(self) -> tuple[int, int]:
        """Node-array shape (s-major)."""
        return (self.n_s + 1, self.n_theta + 1)

    @cached_property
    def s_nodes(self) -> np.ndarray:
        return self.s_min + self.h_s * np.arange(self.n_s + 1)

    @cached_property
    def theta_nodes(self) -> np.ndarray:
        return self.h_theta * np.arange(self.n_theta + 1)

    @cached_property
    def r_nodes(self) -> np.ndarray:
        return np.exp(self.s_nodes)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """(S, TH) node coordinate arrays of shape ``self.shape``."""
        return np.meshgrid(self.s_nodes, self.theta_nodes, indexing="ij")

    def metadata(self, dom: SectorDomain | None = None) -> dict:
        meta = {
            "s_min": self.s_min,
            "s_max": self.s_max,
            "n_s": self.n_s,
            "n_theta": self.n_theta,
            "theta0": self.theta0,
        }
        if dom is not None:
            meta["a"] = dom.a
            meta["b"] = dom.b if math.isfinite(dom.b) else "inf"
        return meta

    def to_json(self, dom: SectorDomain | None = None) -> str:
        return json.dumps(self.metadata(dom), sort_keys=True)


def build_grid(
    dom: SectorDomain,
    n_s: int,
    n_theta: int,
    clip: tuple[float, float] | None = None,
) -> LogPolarGrid:
    """Grid covering [s_min, s_max] x [0, theta0] for the given domain.

    For a finite domain the clip, if given, must equal (ln a, ln b).  For
    a = 0 or b = inf the clip supplies the truncation; omitted ends default
    to the finite edge offset by DEFAULT_CLIP_HALFWIDTH.
    """
    ln_a = math.log(dom.a) if dom.a > 0 else -math.inf
    ln_b = math.log(dom.b) if math.isfinite(dom.b) else math.inf

    if dom.is_finite:
        if clip is not None and not (
            math.isclose(clip[0], ln_a, abs_tol=1e-12)
            and math.isclose(clip[1], ln_b, abs_tol=1e-12)
        ):
            raise GridError(
                f"clip {clip} inconsistent with finite bounds (ln a, ln b)="
                f"({ln_a}, {ln_b})"
            )
        s_min, s_max = ln_a, ln_b
    else:
        if clip is None:
            lo = ln_a if dom.a > 0 else ln_b - DEFAULT_CLIP_HALFWIDTH
            hi = ln_b if math.isfinite(dom.b) else ln_a + DEFAULT_CLIP_HALFWIDTH
            if dom.a == 0 and not math.isfinite(dom.b):
                lo, hi = -DEFAULT_CLIP_HALFWIDTH, DEFAULT_CLIP_HALFWIDTH
            s_min, s_max = lo, hi
        else:
            s_min, s_max = float(clip[0]), float(clip[1])
            if s_min < ln_a - 1e-12 or s_max > ln_b + 1e-12:
                raise GridError(f"clip {clip} exceeds domain bounds ({ln_a}, {ln_b})")
            if dom.a > 0 and not math.isclose(s_min, ln_a, abs_tol=1e-12):
                raise GridError("clip must start at ln(a) when a > 0")
            if math.isfinite(dom.b) and not math.isclose(s_max, ln_b, abs_tol=1e-12):
                raise GridError("clip must end at ln(b) when b < inf")
    return LogPolarGrid(s_min, s_max, int(n_s), int(n_theta), dom.theta0)


def grid_from_metadata(meta: dict) -> tuple[LogPolarGrid, SectorDomain | None]:
    """Inverse of ``LogPolarGrid.metadata``; round-trips node coordinates."""
    grid = LogPolarGrid(
        float(meta["s_min"]),
        float(meta["s_max"]),
        int(meta["n_s"]),
        int(meta["n_theta"]),
        float(meta["theta0"]),
    )
    dom = None
    if "a" in meta and "b" in meta:
        b = math.inf if meta["b"] == "inf" else float(meta["b"])
        dom = make_sector(float(meta["a"]), b, float(meta["theta0"]))
    return grid, dom
