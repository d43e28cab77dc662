"""Independent ground truth: time-domain integration and lock-in demodulation.

The mean-field equations are integrated with a fixed-step classical
Runge-Kutta scheme; no adaptivity, so trajectories are bit-reproducible.  The
settled tail of a driven trajectory is projected onto the three-tone basis
{1, e^{-i delta t}, e^{+i delta t}} with a Gram-corrected discrete inner
product, which removes finite-window leakage and recovers pure tones to
machine precision.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BoundViolation, InvalidGrid, NonFinite, NotSettled, ZeroDelta
from .model import Params
from .steady import SteadyBranch

__all__ = [
    "Trajectory",
    "DemodResult",
    "mean_field_rhs",
    "steady_state_vector",
    "max_step",
    "integrate_mean_field",
    "demodulate_sidebands",
    "perturbation_outcome",
    "dump_trajectory",
]

#: Tolerance on the two-level bound |w| <= 1 during integration.
BOUND_EPS = 1e-6
#: DC drift between the last two analysis windows that counts as settled.
SETTLE_DRIFT = 1e-6


@dataclass(frozen=True)
class Trajectory:
    """Sampled mean-field trajectory (state order w, sigma, a, q, qdot)."""

    t: np.ndarray
    w: np.ndarray
    sigma: np.ndarray
    a: np.ndarray
    q: np.ndarray
    qdot: np.ndarray
    dt: float

    def state(self, k: int) -> tuple:
        return (float(self.w[k]), complex(self.sigma[k]), complex(self.a[k]),
                float(self.q[k]), float(self.qdot[k]))


@dataclass(frozen=True)
class DemodResult:
    """Three-tone projections of the settled trajectory tail."""

    a0: complex
    a_plus: complex
    a_minus: complex
    sigma0: complex
    sigma_plus: complex
    sigma_minus: complex
    w0: float
    w_plus: complex
    q0: float
    q_plus: complex
    drift: float
    energy_fraction: float


def mean_field_rhs(p: Params, state, t: float = 0.0, es0: float | None = None):
    """Right-hand side of the 7-dim real system.

    State ordering (w, Re sigma, Im sigma, Re a, Im a, q, qdot).  The phonon
    equation is the damped-oscillator form whose fixed point matches the
    steady module's displacement convention.
    """
    if es0 is None:
        es0 = p.es0
    w, sx, sy, au, av, q, pq = state
    g0 = p.g0
    shift = p.delta_p0 + q
    return (
        -p.gamma1_ratio * (w + 1.0) + 2.0 * g0 * (av * sx - au * sy),
        -sx + shift * sy - 2.0 * g0 * av * w,
        -sy - shift * sx + 2.0 * g0 * au * w,
        -p.kappa_c0 * au + p.delta_c0 * av + g0 * sy + p.ep0
        + es0 * math.cos(p.delta0 * t),
        -p.kappa_c0 * av - p.delta_c0 * au - g0 * sx
        - es0 * math.sin(p.delta0 * t),
        pq,
        -p.gamma_q0 * pq - p.omega_k0 ** 2 * q
        - 2.0 * p.eta * p.omega_k0 ** 3 * w,
    )


def steady_state_vector(branch: SteadyBranch) -> tuple:
    """Initial condition sitting exactly on a steady branch."""
    return (branch.w0, branch.sigma0.real, branch.sigma0.imag,
            branch.a0.real, branch.a0.imag, branch.q0, 0.0)


def max_step(p: Params) -> float:
    """Largest step that resolves the fastest scale of the system."""
    tau = min(1.0, 2.0 * math.pi / p.omega_k0,
              2.0 * math.pi / max(1.0, abs(p.delta0)))
    return 0.02 * tau


def integrate_mean_field(p: Params, init, t_end: float, dt: float,
                         es0: float | None = None) -> Trajectory:
    """Fixed-step RK4 integration of the mean-field equations.

    ``init`` is the 7-component real state; ``es0`` overrides the signal
    amplitude (defaults to ``p.es0``).  Raises ``BoundViolation`` when the
    inversion leaves [-1, 1] by more than ``BOUND_EPS`` and ``NonFinite`` on
    numerical blow-up.
    """
    if dt <= 0.0 or t_end <= 0.0:
        raise InvalidGrid(f"t_end and dt must be positive, got {t_end}, {dt}")
    if dt > max_step(p) * (1.0 + 1e-12):
        raise InvalidGrid(
            f"dt={dt} exceeds the resolution bound {max_step(p):.6g} "
            "for these parameters")
    es = p.es0 if es0 is None else es0
    n = int(round(t_end / dt))
    y = tuple(float(v) for v in init)
    if len(y) != 7:
        raise InvalidGrid("initial state must have 7 components")
    out = np.empty((n + 1, 7))
    out[0] = y
    rhs = mean_field_rhs
    h2 = 0.5 * dt
    h6 = dt / 6.0
    lo, hi = -1.0 - BOUND_EPS, 1.0 + BOUND_EPS
    if not lo <= y[0] <= hi:
        raise BoundViolation(f"initial inversion {y[0]} outside [-1, 1]")
    t = 0.0
    for k in range(n):
        k1 = rhs(p, y, t, es)
        y2 = (y[0] + h2 * k1[0], y[1] + h2 * k1[1], y[2] + h2 * k1[2],
              y[3] + h2 * k1[3], y[4] + h2 * k1[4], y[5] + h2 * k1[5],
              y[6] + h2 * k1[6])
        k2 = rhs(p, y2, t + h2, es)
        y3 = (y[0] + h2 * k2[0], y[1] + h2 * k2[1], y[2] + h2 * k2[2],
              y[3] + h2 * k2[3], y[4] + h2 * k2[4], y[5] + h2 * k2[5],
              y[6] + h2 * k2[6])
        k3 = rhs(p, y3, t + h2, es)
        y4 = (y[0] + dt * k3[0], y[1] + dt * k3[1], y[2] + dt * k3[2],
              y[3] + dt * k3[3], y[4] + dt * k3[4], y[5] + dt * k3[5],
              y[6] + dt * k3[6])
        k4 = rhs(p, y4, t + dt, es)
        y = (y[0] + h6 * (k1[0] + 2.0 * (k2[0] + k3[0]) + k4[0]),
             y[1] + h6 * (k1[1] + 2.0 * (k2[1] + k3[1]) + k4[1]),
             y[2] + h6 * (k1[2] + 2.0 * (k2[2] + k3[2]) + k4[2]),
             y[3] + h6 * (k1[3] + 2.0 * (k2[3] + k3[3]) + k4[3]),
             y[4] + h6 * (k1[4] + 2.0 * (k2[4] + k3[4]) + k4[4]),
             y[5] + h6 * (k1[5] + 2.0 * (k2[5] + k3[5]) + k4[5]),
             y[6] + h6 * (k1[6] + 2.0 * (k2[6] + k3[6]) + k4[6]))
        t += dt
        w = y[0]
        if not lo <= w <= hi:
            if w != w:
                raise NonFinite(f"state became NaN at t={t:.6g}")
            raise BoundViolation(
                f"inversion w={w:.6g} left [-1, 1] at t={t:.6g}")
        total = y[1] + y[2] + y[3] + y[4] + y[5] + y[6]
        if not -1e12 < total < 1e12:
            raise NonFinite(f"state diverged at t={t:.6g}")
        out[k + 1] = y
    ts = np.arange(n + 1) * dt
    return Trajectory(t=ts, w=out[:, 0], sigma=out[:, 1] + 1j * out[:, 2],
                      a=out[:, 3] + 1j * out[:, 4], q=out[:, 5],
                      qdot=out[:, 6], dt=dt)


def _project(tw: np.ndarray, signal: np.ndarray, delta0: float):
    basis = np.empty((tw.size, 3), dtype=complex)
    basis[:, 0] = 1.0
    basis[:, 1] = np.exp(-1j * delta0 * tw)
    basis[:, 2] = np.conj(basis[:, 1])
    gram = basis.conj().T @ basis
    coef = np.linalg.solve(gram, basis.conj().T @ signal)
    resid = signal - basis @ coef
    denom = float(np.sum(np.abs(signal) ** 2))
    frac = 1.0 - float(np.sum(np.abs(resid) ** 2)) / denom if denom > 0 else 1.0
    return coef, frac


def demodulate_sidebands(traj: Trajectory, delta0: float,
                         n_periods: int = 20) -> DemodResult:
    """Project the settled tail onto DC and the two first-order tones.

    The window spans ``n_periods`` signal periods (snapped to whole samples);
    the DC values of the preceding window must agree within ``SETTLE_DRIFT``
    or ``NotSettled`` is raised.
    """
    if delta0 == 0.0:
        raise ZeroDelta("demodulation needs a nonzero signal-pump detuning")
    if n_periods < 20:
        raise InvalidGrid(f"n_periods must be >= 20, got {n_periods}")
    period = 2.0 * math.pi / abs(delta0)
    nw = int(round(n_periods * period / traj.dt))
    if nw < 8 or 2 * nw > traj.t.size:
        raise NotSettled(
            f"trajectory too short: need {2 * nw} samples for two analysis "
            f"windows, have {traj.t.size}")
    tail = slice(traj.t.size - nw, traj.t.size)
    prev = slice(traj.t.size - 2 * nw, traj.t.size - nw)
    drift = max(
        abs(np.mean(traj.a[tail]) - np.mean(traj.a[prev])),
        abs(np.mean(traj.sigma[tail]) - np.mean(traj.sigma[prev])),
        abs(float(np.mean(traj.w[tail]) - np.mean(traj.w[prev]))),
        abs(float(np.mean(traj.q[tail]) - np.mean(traj.q[prev]))),
    )
    if drift >= SETTLE_DRIFT:
        raise NotSettled(f"DC drift {drift:.3e} >= {SETTLE_DRIFT}")
    tw = traj.t[tail]
    ca, frac_a = _project(tw, traj.a[tail], delta0)
    cs, _ = _project(tw, traj.sigma[tail], delta0)
    cw, _ = _project(tw, traj.w[tail].astype(complex), delta0)
    cq, _ = _project(tw, traj.q[tail].astype(complex), delta0)
    return DemodResult(
        a0=complex(ca[0]), a_plus=complex(ca[1]), a_minus=complex(ca[2]),
        sigma0=complex(cs[0]), sigma_plus=complex(cs[1]),
        sigma_minus=complex(cs[2]),
        w0=float(cw[0].real), w_plus=complex(cw[1]),
        q0=float(cq[0].real), q_plus=complex(cq[1]),
        drift=float(drift), energy_fraction=frac_a,
    )


def perturbation_outcome(p: Params, branch: SteadyBranch, eps: float = 1e-6,
                         departure: float = 1e-3, horizon: float = 400.0,
                         dt: float | None = None, chunk: float = 5.0) -> str:
    """Integrate a perturbed branch with the pump only and classify the outcome.

    Returns "decayed" once the state comes back within ``0.02 * eps`` of the
    branch, "departed" once any component moves beyond ``departure`` (or the
    integration blows up), otherwise "inconclusive" at the horizon.  The
    displacement velocity is weighted by 1/omega_k0 so that the metric is the
    oscillator phase-space norm; an inversion kick transiently rings the
    displacement velocity by ~2 eta omega_k0^2 times its size, which would
    otherwise masquerade as departure.
    """
    p0 = p.replace(es0=0.0, delta0=0.0)
    ref = np.array(steady_state_vector(branch))
    weights = np.array([1.0] * 6 + [1.0 / max(1.0, p.omega_k0)])
    state = tuple(v + (eps if i == 0 else 0.0) for i, v in enumerate(ref))
    if dt is None:
        dt = min(max_step(p0), chunk / 10.0)
    elapsed = 0.0
    while elapsed < horizon:
        span = min(chunk, horizon - elapsed)
        try:
            traj = integrate_mean_field(p0, state, span, dt)
        except (BoundViolation, NonFinite):
            return "departed"
        state = (float(traj.w[-1]), float(traj.sigma[-1].real),
                 float(traj.sigma[-1].imag), float(traj.a[-1].real),
                 float(traj.a[-1].imag), float(traj.q[-1]),
                 float(traj.qdot[-1]))
        dist = float(np.max(np.abs(np.array(state) - ref) * weights))
        if dist > departure:
            return "departed"
        if dist < 0.02 * eps:
            return "decayed"
        elapsed += span
    return "inconclusive"


def dump_trajectory(traj: Trajectory, fh) -> None:
    """Write the trajectory as CSV (t,w,re_sigma,im_sigma,re_a,im_a,q,qdot)."""
    fh.write("t,w,re_sigma,im_sigma,re_a,im_a,q,qdot\n")
    for k in range(traj.t.size):
        row = (traj.t[k], traj.w[k], traj.sigma[k].real, traj.sigma[k].imag,
               traj.a[k].real, traj.a[k].imag, traj.q[k], traj.qdot[k])
        fh.write(",".join(repr(float(v)) for v in row) + "\n")
