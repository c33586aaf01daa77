"""Piecewise-uniform Shishkin mesh refined at both endpoints."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

DEFAULT_TAU0 = 0.8
DEFAULT_TAU_CAP = 0.25


@dataclass(frozen=True)
class MeshConfig:
    n: int
    epsilon: float
    tau0: float = DEFAULT_TAU0
    domain_left: float = 0.0
    domain_right: float = 1.0
    # None -> min(0.25, length/4)
    tau_cap: Optional[float] = None
    # forces the transition parameter, e.g. for nested double-mesh refinement
    tau: Optional[float] = None

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 8 or self.n % 4:
            raise ValueError(f"n must be divisible by 4 and >= 8, got {self.n}")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if not self.tau0 > 0:
            raise ValueError(f"tau0 must be positive, got {self.tau0}")
        if not self.domain_left < self.domain_right:
            raise ValueError("domain_left must be < domain_right")
        length = self.domain_right - self.domain_left
        if self.tau_cap is not None and not 0 < self.tau_cap <= length / 4:
            raise ValueError("tau_cap must lie in (0, length/4]")
        if self.tau is not None and not 0 < self.tau <= length / 4:
            raise ValueError("tau must lie in (0, length/4]")

    @property
    def length(self) -> float:
        return self.domain_right - self.domain_left

    def transition_parameter(self) -> float:
        if self.tau is not None:
            return float(self.tau)
        cap = self.tau_cap if self.tau_cap is not None else min(DEFAULT_TAU_CAP, self.length / 4)
        return min(cap, self.tau0 * self.epsilon * math.log(self.n))


@dataclass(frozen=True, eq=False)
class ShishkinMesh:
    nodes: np.ndarray
    tau: float
    n: int
    fine_width: float
    coarse_width: float
    config: MeshConfig

    @property
    def widths(self) -> np.ndarray:
        """``h_i = x_i - x_{i-1}`` for i = 1..n (index 0 of the array is h_1)."""
        return np.diff(self.nodes)

    @property
    def domain(self) -> tuple[float, float]:
        return float(self.nodes[0]), float(self.nodes[-1])

    def is_nested_in(self, fine: "ShishkinMesh", tol: float = 1e-12) -> bool:
        if fine.n != 2 * self.n:
            return False
        return bool(np.max(np.abs(fine.nodes[::2] - self.nodes)) <= tol)


def build_mesh(config: MeshConfig) -> ShishkinMesh:
    """Build the N/4 - N/2 - N/4 piecewise-uniform mesh.

    The breakpoints ``x_l + tau``, the midpoint and ``x_r - tau`` are assigned
    exactly; the right half is the mirror image of the left half.
    """
    n = int(config.n)
    xl, xr = float(config.domain_left), float(config.domain_right)
    tau = config.transition_parameter()
    q = n // 4
    mid = 0.5 * (xl + xr)
    left_break = xl + tau
    x = np.empty(n + 1)
    x[: q + 1] = xl + tau * (np.arange(q + 1) / q)
    x[q: 2 * q + 1] = left_break + (mid - left_break) * (np.arange(q + 1) / q)
    x[q] = left_break
    x[2 * q] = mid
    x[2 * q + 1:] = (xl + xr) - x[2 * q - 1:: -1]
    x[3 * q] = xr - tau
    x[n] = xr
    return ShishkinMesh(nodes=x, tau=tau, n=n, fine_width=4.0 * tau / n,
                        coarse_width=2.0 * (config.length - 2.0 * tau) / n, config=config)
