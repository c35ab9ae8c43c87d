"""Continuous parameter fitting: Adam over finite-difference gradients.

Optimization coordinates are the natural logarithm for log-scale
parameters and the raw value otherwise. The Adam step for each coordinate
is scaled by the declared optimization-space range, so one unit of learning
rate moves a parameter the same fraction of its feasible interval no matter
how the bounds are expressed.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from ..dsl.typecheck import TypedLaw
from ..mpm.solver import SimulationFailure
from .metrics import FAILURE_SENTINEL
from .observation import SceneObservation, simulate_candidate, total_loss
from .validity import ValidityReport, probe_validity

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8
DEFAULT_LR = 1e-3
DEFAULT_REL_STEP = 1e-3
CURVE_POINTS = 20


class ParamTransform:
    """Maps between linear parameter values and optimization coordinates."""

    def __init__(self, specs):
        self.specs = list(specs)
        self.log_mask = np.array([p.log_scale for p in self.specs], dtype=bool)
        self.lo = np.array([p.lo for p in self.specs], dtype=float)
        self.hi = np.array([p.hi for p in self.specs], dtype=float)
        self.u_lo = self.to_opt(self.lo)
        self.u_hi = self.to_opt(self.hi)
        self.ranges = self.u_hi - self.u_lo

    @property
    def dim(self) -> int:
        return len(self.specs)

    def to_opt(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        u = theta.copy()
        u[self.log_mask] = np.log(theta[self.log_mask])
        return u

    def from_opt(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        theta = u.copy()
        theta[self.log_mask] = np.exp(u[self.log_mask])
        return theta

    def clip(self, u) -> np.ndarray:
        return np.clip(u, self.u_lo, self.u_hi)

    def inits(self) -> np.ndarray:
        return np.array([p.init for p in self.specs], dtype=float)


def finite_diff_grad(objective, theta, rel_step: float = DEFAULT_REL_STEP):
    """Central differences per coordinate in optimization space.

    objective maps a coordinate vector to a float; non-finite probes fall
    back to a one-sided difference, and a coordinate with both sides bad
    gets gradient zero plus a flag. Returns (grad, bad_flags).
    """
    theta = np.asarray(theta, dtype=float)
    dim = theta.size
    grad = np.zeros(dim)
    bad = np.zeros(dim, dtype=bool)
    f0 = None
    for i in range(dim):
        h = max(rel_step * abs(theta[i]), rel_step * 0.01)
        up = theta.copy()
        up[i] += h
        dn = theta.copy()
        dn[i] -= h
        f_up = objective(up)
        f_dn = objective(dn)
        up_ok = np.isfinite(f_up)
        dn_ok = np.isfinite(f_dn)
        if up_ok and dn_ok:
            grad[i] = (f_up - f_dn) / (2.0 * h)
        elif up_ok or dn_ok:
            if f0 is None:
                f0 = objective(theta)
            if not np.isfinite(f0):
                bad[i] = True
                continue
            grad[i] = (f_up - f0) / h if up_ok else (f0 - f_dn) / h
        else:
            bad[i] = True
    return grad, bad


@dataclass
class Feedback:
    """What the proposal operator gets to see about one inner fit."""

    loss_curve: list[tuple[int, float]] = field(default_factory=list)
    theta_init: list[float] = field(default_factory=list)
    theta_final: list[float] = field(default_factory=list)
    theta_trajectory: list[tuple[int, list[float]]] = field(default_factory=list)
    failure: str | None = None
    wall_time: float = 0.0

    def to_dict(self) -> dict:
        return {
            "loss_curve": [[int(i), float(v)] for i, v in self.loss_curve],
            "theta_init": [float(v) for v in self.theta_init],
            "theta_final": [float(v) for v in self.theta_final],
            "theta_trajectory": [[int(i), [float(x) for x in th]] for i, th in self.theta_trajectory],
            "failure": self.failure,
            "wall_time": self.wall_time,
        }


@dataclass
class Fitted:
    theta_star: np.ndarray
    fitness: float
    feedback: Feedback
    validity: ValidityReport | None = None

    @property
    def failed(self) -> bool:
        return self.fitness >= FAILURE_SENTINEL

    def to_dict(self) -> dict:
        return {
            "theta_star": [float(v) for v in np.asarray(self.theta_star, dtype=float)],
            "fitness": float(self.fitness),
            "feedback": self.feedback.to_dict(),
        }


def _downsample(seq, limit=CURVE_POINTS, keep=()):
    """Thin a sequence to <= limit entries, always keeping first, last, and
    any index in `keep`."""
    n = len(seq)
    if n <= limit:
        return list(seq)
    idx = set(np.linspace(0, n - 1, limit - len(keep)).astype(int).tolist())
    idx.update(k for k in keep if 0 <= k < n)
    idx.update((0, n - 1))
    return [seq[i] for i in sorted(idx)]


def optimize_params(
    law: TypedLaw,
    scene: SceneObservation,
    budget: int,
    lr: float = DEFAULT_LR,
    rel_step: float = DEFAULT_REL_STEP,
    skip_probe: bool = False,
) -> Fitted:
    """Fit a law's continuous parameters against a scene observation.

    Runs probe_validity first and short-circuits to a sentinel Fitted when
    the law is not simulatable. Fitness is the minimum loss seen on the
    center trajectory; a mid-run SimulationFailure records the failure and
    returns best-so-far.
    """
    t_start = time.perf_counter()
    transform = ParamTransform(law.ast.params)
    theta0 = transform.inits()

    validity = None
    if not skip_probe:
        validity = probe_validity(law, theta0, scene)
        if not validity.passed:
            fb = Feedback(
                theta_init=theta0.tolist(),
                theta_final=theta0.tolist(),
                failure=validity.first_failure,
                wall_time=time.perf_counter() - t_start,
            )
            return Fitted(theta_star=theta0, fitness=FAILURE_SENTINEL, feedback=fb,
                          validity=validity)

    cache: dict[bytes, float] = {}

    def loss_at(u: np.ndarray) -> float:
        """Loss at optimization coordinates; sentinel NaN for failed sims."""
        key = u.tobytes()
        if key in cache:
            return cache[key]
        theta = transform.from_opt(u)
        try:
            traj = simulate_candidate(law, theta, scene)
            val = float(total_loss(traj, scene))
        except SimulationFailure:
            val = float("nan")
        cache[key] = val
        return val

    u = transform.clip(transform.to_opt(theta0))
    curve: list[tuple[int, float]] = []
    thetas: list[tuple[int, list[float]]] = []
    best_loss = float("inf")
    best_u = u.copy()
    failure: str | None = None

    m = np.zeros(transform.dim)
    v = np.zeros(transform.dim)

    for it in range(budget + 1):
        theta_lin = transform.from_opt(u)
        try:
            traj = simulate_candidate(law, theta_lin, scene)
            loss = float(total_loss(traj, scene))
        except SimulationFailure as e:
            failure = f"iteration {it}: {e}"
            break
        cache[u.tobytes()] = loss
        curve.append((it, loss))
        thetas.append((it, theta_lin.tolist()))
        if loss < best_loss:
            best_loss = loss
            best_u = u.copy()
        if it == budget or transform.dim == 0:
            break

        grad, _bad = finite_diff_grad(loss_at, u, rel_step)
        t = it + 1
        m = ADAM_BETA1 * m + (1.0 - ADAM_BETA1) * grad
        v = ADAM_BETA2 * v + (1.0 - ADAM_BETA2) * grad * grad
        m_hat = m / (1.0 - ADAM_BETA1 ** t)
        v_hat = v / (1.0 - ADAM_BETA2 ** t)
        u = transform.clip(u - lr * transform.ranges * m_hat / (np.sqrt(v_hat) + ADAM_EPS))

    wall = time.perf_counter() - t_start
    if not curve:
        fb = Feedback(
            theta_init=theta0.tolist(), theta_final=theta0.tolist(),
            failure=failure or "no iterations completed", wall_time=wall,
        )
        return Fitted(theta_star=theta0, fitness=FAILURE_SENTINEL, feedback=fb,
                      validity=validity)

    best_idx = int(np.argmin([val for _, val in curve]))
    fb = Feedback(
        loss_curve=_downsample(curve, keep=(best_idx,)),
        theta_init=theta0.tolist(),
        theta_final=thetas[-1][1],
        theta_trajectory=_downsample(thetas, keep=(best_idx,)),
        failure=failure,
        wall_time=wall,
    )
    return Fitted(
        theta_star=transform.from_opt(best_u),
        fitness=best_loss,
        feedback=fb,
        validity=validity,
    )
