"""Collective moments and the radiated-power decomposition.

Total power P = 2*gamma*omega*<J+J-> splits exactly into the independent
part 2*gamma*omega*(J + <Jz>) and the correlation part
2*gamma*omega*(J^2 - <Jz^2>), since (J+M)(J-M+1) = (J+M) + (J^2 - M^2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cascade import DickeDistribution, SystemParams, _mu_values

__all__ = ["PowerBreakdown", "jz_moments", "power_breakdown"]


@dataclass(frozen=True)
class PowerBreakdown:
    p_total: float
    p_ind: float
    p_corr: float

    def __post_init__(self):
        scale = max(abs(self.p_total), 1.0)
        if abs(self.p_total - self.p_ind - self.p_corr) > 1e-12 * scale:
            raise ValueError("power decomposition identity violated")
        if self.p_ind < -1e-12 * scale or self.p_corr < -1e-12 * scale:
            raise ValueError("negative power component")


def jz_moments(dist: DickeDistribution) -> tuple[float, float]:
    """(<Jz>, <Jz^2>) for a diagonal Dicke-basis state."""
    m = dist.m_values
    p = dist.populations
    return float(p @ m), float(p @ (m * m))


def power_breakdown(params: SystemParams, dist: DickeDistribution) -> PowerBreakdown:
    """Radiated power and its independent/correlation split, in raw units."""
    if dist.two_j != params.two_j:
        raise ValueError("distribution dimension does not match params")
    jj = params.j()
    pref = 2.0 * params.gamma * params.omega
    mean, second = jz_moments(dist)
    p_total = pref * float(dist.populations @ _mu_values(params.two_j))
    p_ind = pref * (jj + mean)
    p_corr = pref * (jj * jj - second)
    return PowerBreakdown(p_total=p_total, p_ind=p_ind, p_corr=p_corr)
