"""Simulatability probing: cheap static checks before any full-budget fit."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..dsl.errors import LawError
from ..dsl.interp import eval_elastic, eval_plastic
from ..dsl.typecheck import TypedLaw
from ..mpm.config import DET_F_MIN
from ..mpm.solver import Grid, SimulationFailure, step
from .observation import SceneObservation

PROBATION_SUBSTEPS = 50
TAU_REF_TOL = 1e-3  # soft bound on |tau(I)| relative to the modulus scale


def _probe_battery() -> list[tuple[str, np.ndarray]]:
    """Twelve deformation gradients covering stretch, shear, compression,
    and a random rotated state with positive determinant."""
    mats = [("identity", np.eye(3))]
    for ax in range(3):
        m = np.eye(3)
        m[ax, ax] = 1.1
        mats.append((f"stretch+10%:{'xyz'[ax]}", m))
    for ax in range(3):
        m = np.eye(3)
        m[ax, ax] = 0.9
        mats.append((f"stretch-10%:{'xyz'[ax]}", m))
    for (i, j), name in (((0, 1), "xy"), ((0, 2), "xz"), ((1, 2), "yz")):
        m = np.eye(3)
        m[i, j] = 0.1
        mats.append((f"shear:{name}", m))
    mats.append(("compression20%", 0.8 ** (1.0 / 3.0) * np.eye(3)))
    # fixed seed: the battery is a constant
    rng = np.random.default_rng(1234)
    A = rng.standard_normal((3, 3))
    Q, R = np.linalg.qr(A)
    Q = Q * np.sign(np.diag(R))
    if np.linalg.det(Q) < 0:
        Q[:, 0] *= -1.0
    S = np.diag(rng.uniform(0.85, 1.2, size=3))
    mats.append(("rotated-random", Q @ S))
    assert len(mats) == 12
    return mats


BATTERY = _probe_battery()


@dataclass
class ValidityReport:
    passed: bool
    first_failure: str | None = None
    warnings: list[str] = field(default_factory=list)
    checks_run: list[str] = field(default_factory=list)


def probe_validity(law: TypedLaw, theta, scene: SceneObservation) -> ValidityReport:
    """Run, in order: (a) finite law output on the probe battery, (b) a soft
    stress-free-reference check at the declared inits, (c) a short probation
    simulation. The report never raises; failures are encoded."""
    report = ValidityReport(passed=True)
    theta = np.asarray(theta, dtype=float)

    report.checks_run.append("probe_battery")
    for name, F in BATTERY:
        try:
            tau = eval_elastic(law, F, theta)
            Fc = eval_plastic(law, F, theta)
        except LawError as e:
            report.passed = False
            report.first_failure = f"probe '{name}': {e}"
            return report
        if not (np.isfinite(tau).all() and np.isfinite(Fc).all()):
            report.passed = False
            report.first_failure = f"probe '{name}': non-finite output"
            return report
        if np.linalg.det(Fc) <= DET_F_MIN:
            report.passed = False
            report.first_failure = f"probe '{name}': corrected F is degenerate"
            return report

    report.checks_run.append("stress_free_reference")
    inits = np.array([p.init for p in law.ast.params], dtype=float)
    scale = max(1.0, float(np.abs(inits).max(initial=0.0)))
    try:
        tau0 = eval_elastic(law, np.eye(3), inits)
        resid = float(np.linalg.norm(tau0))
        if resid > TAU_REF_TOL * scale:
            report.warnings.append(
                f"non-zero stress at rest: |tau(I)| = {resid:.3g} "
                f"(soft bound {TAU_REF_TOL * scale:.3g})"
            )
    except LawError as e:
        report.passed = False
        report.first_failure = f"stress at identity failed: {e}"
        return report

    report.checks_run.append("probation_sim")
    state = scene.particles0.copy()
    grid = Grid(scene.sim_config.resolution)
    try:
        for k in range(PROBATION_SUBSTEPS):
            step(state, law, theta, scene.sim_config, step_index=k, grid=grid)
    except SimulationFailure as e:
        report.passed = False
        report.first_failure = f"probation simulation: {e}"
        return report

    return report
