"""Fluid limit of the paired-stub process.

State is (p, v1, v2, s1, s2, s3): path length, isolated and paired vertices,
and 1-, 2-, 3-stubs, each as a fraction of n, against scaled time tau = t/n.
Integration is classical fixed-step RK4 from the all-isolated start.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence


class FluidState(NamedTuple):
    tau: float
    p: float
    v1: float
    v2: float
    s1: float
    s2: float
    s3: float


class FluidExhausted(ArithmeticError):
    """The non-path fraction fell below the floor where the drift is defined."""


class IntegrationError(ArithmeticError):
    pass


@dataclass(frozen=True)
class IntegrationConfig:
    step: float = 1e-4
    delta: float = 1e-3
    tau_max: float = 3.0
    v_floor: float = 1e-9

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("step must be positive")
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        if not self.tau_max > 0:
            raise ValueError("tau_max must be positive")


INITIAL = FluidState(0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0)


def derivatives(fs, cap: int = 3, v_floor: float = 1e-9) -> tuple:
    """Rates (p', v1', v2', s1', s2', s3') at fs.

    With cap=2 there are no 3-stubs: presenting a 2-stub does nothing, so the
    2 -> 3 transition and every s3 flow drop out.
    """
    _, p, v1, v2, s1, s2, s3 = fs
    v = v1 + v2
    if v < v_floor:
        raise FluidExhausted(f"v={v:g} below floor {v_floor:g}")
    if cap == 2:
        s3 = 0.0
    s = s1 + s2 + s3
    used = 2.0 * s * (v1 + 2.0 * v2) / v
    # expected stubedge deletions per edge, per unit time
    kill = used / v + 2.0 * v2 / v

    dp = 2.0 * v2 + used
    dv1 = -2.0 * v1 - 2.0 * s * v1 / v
    dv2 = -2.0 * v2 + 2.0 * v1 - 4.0 * s * v2 / v
    ds1 = p - 5.0 * s - 3.0 * s1 + 2.0 * s2 + kill * (2.0 * s2 - s1)
    if cap == 3:
        ds2 = s1 - 3.0 * s2 + 2.0 * s3 + kill * (3.0 * s3 - 2.0 * s2)
        ds3 = s2 - 2.0 * s3 - kill * 3.0 * s3
    elif cap == 2:
        ds2 = s1 - 2.0 * s2 - kill * 2.0 * s2
        ds3 = 0.0
    else:
        raise ValueError(f"cap must be 2 or 3, got {cap!r}")
    return (dp, dv1, dv2, ds1, ds2, ds3)


def integrate(cap: int = 3, cfg: IntegrationConfig | None = None) -> list[FluidState]:
    """Every RK4 step from the initial condition until p >= 1 - delta, v <= delta or tau_max."""
    cfg = cfg or IntegrationConfig()
    h = cfg.step
    half = h / 2.0
    sixth = h / 6.0
    y = INITIAL[1:]
    traj = [INITIAL]
    k = 0

    def rate(y):
        return derivatives((0.0,) + tuple(y), cap, cfg.v_floor)

    while True:
        _, p, v1, v2 = traj[-1][:4]
        if p >= 1.0 - cfg.delta or v1 + v2 <= cfg.delta or traj[-1].tau >= cfg.tau_max:
            return traj
        k1 = rate(y)
        k2 = rate([a + half * b for a, b in zip(y, k1)])
        k3 = rate([a + half * b for a, b in zip(y, k2)])
        k4 = rate([a + h * b for a, b in zip(y, k3)])
        y = tuple(a + sixth * (b1 + 2.0 * b2 + 2.0 * b3 + b4) for a, b1, b2, b3, b4 in zip(y, k1, k2, k3, k4))
        if not all(math.isfinite(c) for c in y):
            raise IntegrationError(f"non-finite state at step {k + 1}: {y}")
        k += 1
        traj.append(FluidState(k * h, *y))


def tau_star(trajectory: Sequence[FluidState], delta: float = 1e-3) -> float:
    """Scaled time where p first reaches 1 - delta, interpolated linearly between steps."""
    target = 1.0 - delta
    prev = trajectory[0]
    if prev.p >= target:
        return prev.tau
    for fs in trajectory[1:]:
        if fs.p >= target:
            frac = (target - prev.p) / (fs.p - prev.p)
            return prev.tau + frac * (fs.tau - prev.tau)
        prev = fs
    raise IntegrationError(f"did not complete: p reached only {trajectory[-1].p:.6g} < {target:.6g}")


def completion_time(cap: int = 3, delta: float = 1e-3, step: float = 1e-4) -> float:
    return tau_star(integrate(cap, IntegrationConfig(step=step, delta=delta)), delta)


def interpolate(trajectory: Sequence[FluidState], tau: float) -> FluidState:
    """Linear interpolation on the uniform step grid; clamps past either end."""
    if tau <= trajectory[0].tau:
        return trajectory[0]
    if tau >= trajectory[-1].tau:
        return trajectory[-1]
    h = trajectory[1].tau - trajectory[0].tau
    i = min(int(tau / h), len(trajectory) - 2)
    a, b = trajectory[i], trajectory[i + 1]
    f = (tau - a.tau) / (b.tau - a.tau)
    return FluidState(tau, *(x + f * (y - x) for x, y in zip(a[1:], b[1:])))
