"""Damped-Newton solver for semilinear problems L Psi = F(s) g(arg) on
log-polar rectangles.

The operator L = a11 d_ss + 2 a12 d_stheta + a22 d_thth + b1 d_s
+ b2 d_theta + c0 has constant coefficients.  The working frame fixes the
nonlinearity argument (Psi + c s, e^{(1-alpha)s} Psi, or Psi itself) and
the canonical forcing profile F.  Dirichlet data Psi = h(theta) is imposed
on the theta-edges and, depending on the side condition, on the s-edges;
the remaining s-edge options are periodic identification and a zero
s-derivative (ghost reflection) at one truncated end.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.linalg import splu

from .domain import LogPolarGrid
from .errors import (
    InconsistentScenario,
    NoConvergence,
    ParameterDomain,
    SingularJacobian,
)
from .fields import Alpha1Frame, FrameTag, GeneralFrame, RawFrame, ScalarField

#: Newton damping floor: step fraction never drops below 2**-10
DAMPING_FLOOR = 2.0**-10


@dataclass(frozen=True)
class EllipticOperator:
    """Constant-coefficient operator a.D2 + b.D + c0."""

    a11: float
    a12: float
    a22: float
    b1: float = 0.0
    b2: float = 0.0
    c0: float = 0.0

    def __post_init__(self):
        if not (self.a11 > 0 and self.a11 * self.a22 - self.a12**2 > 0):
            raise ParameterDomain(
                "operator must be uniformly elliptic: a11 > 0 and "
                "a11*a22 - a12^2 > 0"
            )


def laplace_operator() -> EllipticOperator:
    return EllipticOperator(1.0, 0.0, 1.0)


def general_frame_operator(alpha: float) -> EllipticOperator:
    """d_ss + d_thth + 2(1-alpha) d_s + (1-alpha)^2, conjugate to the
    polar Laplacian under Psi = psi e^{s(alpha-1)}."""
    return EllipticOperator(
        1.0, 0.0, 1.0, b1=2.0 * (1.0 - alpha), c0=(1.0 - alpha) ** 2
    )


# --------------------------------------------------------------------------
# nonlinearity specifications


@dataclass(frozen=True)
class ZeroG:
    """g identically zero (linear problem)."""

    def g(self, z):
        return np.zeros_like(np.asarray(z, dtype=float))

    def g_prime(self, z):
        return np.zeros_like(np.asarray(z, dtype=float))


@dataclass(frozen=True)
class ExpForm:
    """g(z) = K * exp(-2 z / c)."""

    K: float
    c: float

    def __post_init__(self):
        if self.c == 0.0:
            raise ParameterDomain("ExpForm needs c != 0")

    def g(self, z):
        return self.K * np.exp(-2.0 * np.asarray(z, dtype=float) / self.c)

    def g_prime(self, z):
        return (-2.0 / self.c) * self.g(z)


@dataclass(frozen=True)
class PowerForm:
    """g(z) = Cplus |z|^q on z >= 0, Cminus |z|^q on z < 0.

    For q > 1 the derivative at z = 0 is the analytic limit 0.  For
    q < 1 a z-range bounded away from 0 must be declared so z = 0 is
    never evaluated.
    """

    Cplus: float
    Cminus: float
    q: float
    z_range: tuple[float, float] | None = None

    def __post_init__(self):
        if self.q < 1.0:
            zr = self.z_range
            if zr is None or (zr[0] <= 0.0 <= zr[1]):
                raise ParameterDomain(
                    "PowerForm with q < 1 needs a declared z-range "
                    "bounded away from 0"
                )

    def _coef(self, z):
        return np.where(z >= 0.0, self.Cplus, self.Cminus)

    def g(self, z):
        z = np.asarray(z, dtype=float)
        return self._coef(z) * np.abs(z) ** self.q

    def g_prime(self, z):
        z = np.asarray(z, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            d = self._coef(z) * self.q * np.abs(z) ** (self.q - 1.0) * np.sign(z)
        if self.q > 1.0:
            d = np.where(z == 0.0, 0.0, d)
        return d


@dataclass(frozen=True)
class Tabulated:
    """Piecewise-linear g from sorted (z, value) samples; clamped outside."""

    z_grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if len(self.z_grid) != len(self.values) or len(self.z_grid) < 2:
            raise ParameterDomain("tabulated g needs >= 2 congruent samples")
        if np.any(np.diff(self.z_grid) <= 0):
            raise ParameterDomain("z_grid must be strictly increasing")

    def g(self, z):
        return np.interp(np.asarray(z, dtype=float), self.z_grid, self.values)

    def g_prime(self, z):
        slopes = np.gradient(self.values, self.z_grid)
        return np.interp(np.asarray(z, dtype=float), self.z_grid, slopes)


GSpec = ZeroG | ExpForm | PowerForm | Tabulated


def make_g_spec(theorem_case: str, constants: dict) -> GSpec:
    """Scenario-tagged nonlinearity satisfying the matching functional
    equation exactly.

    Cases: 'Thm1i' (swirl-free, g = 0); 'Thm1ii'/'Thm4_B3'/'Thm4_B4'
    (exponential, anchored at theta = 0 or theta = theta0);
    'Thm2'/'Thm2_A1'..'A4'/'Thm5ii' (power law with exponent
    (alpha+1)/(alpha-1), coefficient from the edge relation
    (1-alpha)^2 C1 - c3 = C |C1|^q).
    """
    if theorem_case == "Thm1i":
        if constants.get("c", 0.0) != 0.0:
            raise InconsistentScenario("swirl-free case needs c = 0")
        return ZeroG()
    if theorem_case in ("Thm1ii", "Thm4_B3", "Thm4_B4"):
        c = float(constants["c"])
        if c == 0.0:
            raise InconsistentScenario("exponential case needs c != 0")
        A = float(constants["A"])
        if constants.get("anchor", "start") == "end":
            B = float(constants["B"])
            K = -A * math.exp(2.0 * B / c)
        else:
            K = -A
        return ExpForm(K=K, c=c)
    if theorem_case in ("Thm2", "Thm2_A1", "Thm2_A2", "Thm2_A3", "Thm2_A4", "Thm5ii"):
        alpha = float(constants["alpha"])
        if alpha == 1.0:
            raise InconsistentScenario("power-law case needs alpha != 1")
        C1 = float(constants["C1"])
        c3 = float(constants["c3"])
        if C1 == 0.0:
            raise InconsistentScenario("edge value C1 must be nonzero")
        q = (alpha + 1.0) / (alpha - 1.0)
        coef = ((1.0 - alpha) ** 2 * C1 - c3) / abs(C1) ** q
        return PowerForm(Cplus=coef, Cminus=coef, q=q)
    raise InconsistentScenario(f"no nonlinearity rule for case {theorem_case!r}")


# --------------------------------------------------------------------------
# side conditions


@dataclass(frozen=True)
class PeriodicInS:
    """Identify s = s_min with s = s_max (one period of the grid)."""

    period: float


@dataclass(frozen=True)
class NeumannLeft:
    """Zero s-derivative at s = s_min; Dirichlet trace at s = s_max."""


@dataclass(frozen=True)
class NeumannRight:
    """Zero s-derivative at s = s_max; Dirichlet trace at s = s_min."""


@dataclass(frozen=True)
class DirichletBoth:
    """Dirichlet trace Psi = h(theta) on both s-edges."""


SideCondition = PeriodicInS | NeumannLeft | NeumannRight | DirichletBoth


@dataclass
class SolveReport:
    iterations: int
    final_residual: float
    s_variance: float
    converged: bool
    residual_history: list = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(
            {
                "iterations": self.iterations,
                "final_residual": self.final_residual,
                "s_variance": self.s_variance,
                "converged": self.converged,
                "residual_history": self.residual_history,
            },
            sort_keys=True,
        )


def _frame_pieces(frame: FrameTag, s_nodes: np.ndarray):
    """(canonical F, arg(s, Psi), d arg / d Psi) for the working frame."""
    if isinstance(frame, Alpha1Frame):
        c = frame.c
        return (
            np.exp(2.0 * s_nodes),
            lambda s, P: P + c * s,
            lambda s: np.ones_like(s),
        )
    if isinstance(frame, GeneralFrame):
        a = frame.alpha
        scale = lambda s: np.exp((1.0 - a) * s)
        return np.exp((1.0 + a) * s_nodes), lambda s, P: scale(s) * P, scale
    return np.ones_like(s_nodes), lambda s, P: P, lambda s: np.ones_like(s)


def default_initial_guess(
    grid: LogPolarGrid,
    boundary_h,
    amplitude: float = 0.0,
    seed: int = 0,
) -> ScalarField:
    """h(theta) replicated over s plus a seeded interior perturbation.

    The perturbation vanishes on the boundary so Dirichlet data stays
    exact; a nonzero amplitude gives the rigidity demos a genuinely
    s-dependent start.
    """
    th = grid.theta_nodes
    vals = np.tile(np.asarray(boundary_h(th), dtype=float), (grid.n_s + 1, 1))
    if amplitude != 0.0:
        rng = np.random.default_rng(seed)
        bump = rng.standard_normal(grid.shape)
        win_s = np.sin(
            np.pi * (grid.s_nodes - grid.s_min) / (grid.s_max - grid.s_min)
        )[:, None]
        win_t = np.sin(np.pi * th / grid.theta0)[None, :]
        vals = vals + amplitude * bump * win_s * win_t
    return ScalarField(grid, vals)


def _row_maps(side: SideCondition, n_s: int):
    """Unknown s-rows and their minus/plus neighbor rows in the full array."""
    if isinstance(side, DirichletBoth):
        U = np.arange(1, n_s)
        return U, U - 1, U + 1
    if isinstance(side, PeriodicInS):
        U = np.arange(0, n_s)
        return U, (U - 1) % n_s, (U + 1) % n_s
    if isinstance(side, NeumannLeft):
        U = np.arange(0, n_s)
        im = U - 1
        im[0] = 1
        return U, im, U + 1
    U = np.arange(1, n_s + 1)
    ip = U + 1
    ip[-1] = n_s - 1
    return U, U - 1, ip


def solve_semilinear(
    grid: LogPolarGrid,
    op: EllipticOperator,
    F,
    gspec: GSpec,
    frame: FrameTag,
    boundary_h,
    side: SideCondition,
    init: ScalarField | None = None,
    tol: float = 1e-10,
    max_iter: int = 50,
) -> tuple[ScalarField, SolveReport]:
    """Damped Newton on the 5-point (+ centered cross/first-order)
    discretization of L Psi = F(s) g(arg(s, Psi)).

    ``F`` may be None (canonical frame profile), a callable of s, or an
    array over the s-nodes.  ``boundary_h`` is a callable of theta giving
    the Dirichlet trace Psi = h(theta).  Newton steps are halved until the
    residual decreases, down to the 2^-10 floor; exhaustion raises
    NoConvergence with the best iterate attached.
    """
    if isinstance(side, (NeumannLeft, NeumannRight)) and (
        op.b1 != 0.0 or op.b2 != 0.0
    ):
        raise ParameterDomain("reflection side conditions need b1 = b2 = 0")
    if isinstance(side, PeriodicInS) and not math.isclose(
        side.period, grid.s_max - grid.s_min, rel_tol=1e-12
    ):
        raise ParameterDomain("grid must span exactly one period in s")

    n_s, n_t = grid.n_s, grid.n_theta
    hs, ht = grid.h_s, grid.h_theta
    s = grid.s_nodes
    th = grid.theta_nodes
    h_vals = np.asarray(boundary_h(th), dtype=float)

    F_canon, arg_fn, darg_fn = _frame_pieces(frame, s)
    if F is None:
        F_vals = F_canon
    elif callable(F):
        F_vals = np.asarray(F(s), dtype=float)
    else:
        F_vals = np.asarray(F, dtype=float)

    Psi = (
        init.vals.copy()
        if init is not None
        else default_initial_guess(grid, boundary_h).vals.copy()
    )
    # impose the Dirichlet trace exactly
    Psi[:, 0] = h_vals[0]
    Psi[:, -1] = h_vals[-1]
    if isinstance(side, (DirichletBoth, NeumannRight)):
        Psi[0, :] = h_vals
    if isinstance(side, (DirichletBoth, NeumannLeft)):
        Psi[-1, :] = h_vals
    if isinstance(side, PeriodicInS):
        Psi[-1, :] = Psi[0, :]

    U, im, ip = _row_maps(side, n_s)
    J = np.arange(1, n_t)
    s_col = s[U][:, None]
    F_col = F_vals[U][:, None]
    nU, nJ = len(U), len(J)

    def residual(P):
        if isinstance(side, PeriodicInS):
            P = P.copy()
            P[-1, :] = P[0, :]
        ctr = P[np.ix_(U, J)]
        lap = (
            op.a11 * (P[np.ix_(ip, J)] - 2.0 * ctr + P[np.ix_(im, J)]) / hs**2
            + op.a22 * (P[np.ix_(U, J + 1)] - 2.0 * ctr + P[np.ix_(U, J - 1)]) / ht**2
        )
        if op.a12 != 0.0:
            lap += (
                2.0
                * op.a12
                * (
                    P[np.ix_(ip, J + 1)]
                    - P[np.ix_(ip, J - 1)]
                    - P[np.ix_(im, J + 1)]
                    + P[np.ix_(im, J - 1)]
                )
                / (4.0 * hs * ht)
            )
        if op.b1 != 0.0:
            lap += op.b1 * (P[np.ix_(ip, J)] - P[np.ix_(im, J)]) / (2.0 * hs)
        if op.b2 != 0.0:
            lap += op.b2 * (P[np.ix_(U, J + 1)] - P[np.ix_(U, J - 1)]) / (2.0 * ht)
        lap += op.c0 * ctr
        return lap - F_col * gspec.g(arg_fn(s_col, ctr))

    unk_id = np.full(n_s + 1, -1, dtype=int)
    unk_id[U] = np.arange(nU)
    if isinstance(side, PeriodicInS):
        unk_id[n_s] = unk_id[0]

    def jacobian(P):
        rows, cols, data = [], [], []
        kk = (np.arange(nU)[:, None] * nJ + np.arange(nJ)[None, :]).ravel()

        def add(target_rows, dj, coef):
            tgt = unk_id[target_rows]
            ok = np.broadcast_to((tgt >= 0)[:, None], (nU, nJ)).copy()
            jj = J + dj
            ok &= (jj >= 1) & (jj <= n_t - 1)
            kk2 = tgt[:, None] * nJ + (jj - 1)[None, :]
            sel = ok.ravel()
            rows.append(kk[sel])
            cols.append(kk2.ravel()[sel])
            c = np.broadcast_to(coef, (nU, nJ)).ravel()[sel]
            data.append(c)

        ctr = P[np.ix_(U, J)]
        diag = (
            -2.0 * op.a11 / hs**2
            - 2.0 * op.a22 / ht**2
            + op.c0
            - F_col * gspec.g_prime(arg_fn(s_col, ctr)) * darg_fn(s_col)
        )
        add(U, 0, diag)
        add(ip, 0, op.a11 / hs**2 + op.b1 / (2.0 * hs))
        add(im, 0, op.a11 / hs**2 - op.b1 / (2.0 * hs))
        add(U, 1, op.a22 / ht**2 + op.b2 / (2.0 * ht))
        add(U, -1, op.a22 / ht**2 - op.b2 / (2.0 * ht))
        if op.a12 != 0.0:
            cross = op.a12 / (2.0 * hs * ht)
            add(ip, 1, cross)
            add(im, -1, cross)
            add(ip, -1, -cross)
            add(im, 1, -cross)
        n = nU * nJ
        return coo_matrix(
            (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
            shape=(n, n),
        ).tocsc()

    history = []
    R = residual(Psi)
    res_norm = float(np.max(np.abs(R)))
    history.append(res_norm)
    iters = 0
    while res_norm > tol and iters < max_iter:
        try:
            lu = splu(jacobian(Psi))
        except RuntimeError as exc:
            raise SingularJacobian(f"Newton linearization is singular: {exc}")
        delta = lu.solve(-R.ravel()).reshape(nU, nJ)
        if not np.all(np.isfinite(delta)):
            raise SingularJacobian("Newton step is not finite")
        lam = 1.0
        while True:
            trial = Psi.copy()
            trial[np.ix_(U, J)] += lam * delta
            if isinstance(side, PeriodicInS):
                trial[-1, :] = trial[0, :]
            R_trial = residual(trial)
            trial_norm = float(np.max(np.abs(R_trial)))
            if trial_norm < res_norm or trial_norm <= tol:
                Psi, R, res_norm = trial, R_trial, trial_norm
                break
            lam *= 0.5
            if lam < DAMPING_FLOOR:
                report = SolveReport(
                    iters, res_norm, _s_var(Psi), False, history
                )
                raise NoConvergence(
                    "damping floor reached without residual decrease",
                    field=ScalarField(grid, Psi),
                    report=report,
                )
        iters += 1
        history.append(res_norm)

    converged = res_norm <= tol
    report = SolveReport(iters, res_norm, _s_var(Psi), converged, history)
    out = ScalarField(grid, Psi)
    if not converged:
        raise NoConvergence(
            f"residual {res_norm:.3e} above tolerance after {iters} iterations",
            field=out,
            report=report,
        )
    return out, report


def _s_var(vals: np.ndarray) -> float:
    return float(np.max(vals.max(axis=0) - vals.min(axis=0)))
