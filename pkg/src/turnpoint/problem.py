"""Two-point turning-point problems ``eps*u'' + a*u' - b*u = f``.

A problem is a bundle of coefficient callables plus the constants ``alpha``
(lower bound on ``|a|`` at the endpoints) and ``beta`` (lower bound on ``b``).
Callables must accept numpy arrays and be pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from numpy.polynomial import Polynomial

Coefficient = Callable[[np.ndarray], np.ndarray]
ExactSolution = Callable[[np.ndarray, float], np.ndarray]

_ERF_SATURATION = 6.0


def evaluate(fn: Callable, x) -> np.ndarray:
    """Evaluate a coefficient on ``x``, broadcasting scalar-valued callables."""
    x = np.asarray(x, dtype=float)
    return np.broadcast_to(np.asarray(fn(x), dtype=float), x.shape).copy()


def _erf_scalar(z: float) -> float:
    if math.isnan(z):
        return z
    s = abs(z)
    if s > _ERF_SATURATION:
        v = 1.0
    else:
        v = math.erf(s)
    return v if z >= 0 else -v


_erf_vec = np.vectorize(_erf_scalar, otypes=[float])


def erf(z):
    """Error function, odd by construction and saturated to +-1 for |z| > 6.

    Scalars in, float out; arrays in, arrays out.
    """
    if np.ndim(z) == 0:
        return _erf_scalar(float(z))
    return _erf_vec(np.asarray(z, dtype=float))


@dataclass(frozen=True)
class ProblemSpec:
    """Singularly perturbed turning-point problem on ``[domain_left, domain_right]``.

    ``alpha`` defaults to ``min(|a(x_l)|, |a(x_r)|)`` and ``beta`` to the sampled
    minimum of ``b``; both must end up strictly positive.
    """

    a: Coefficient
    b: Coefficient
    f: Coefficient
    domain_left: float = 0.0
    domain_right: float = 1.0
    bc_left: float = 0.0
    bc_right: float = 0.0
    alpha: Optional[float] = None
    beta: Optional[float] = None
    exact: Optional[ExactSolution] = None
    name: str = "user"
    default_samples: int = field(default=1001, repr=False)

    def __post_init__(self):
        if not self.domain_left < self.domain_right:
            raise ValueError("domain_left must be < domain_right")
        if self.alpha is None:
            ends = evaluate(self.a, [self.domain_left, self.domain_right])
            object.__setattr__(self, "alpha", float(np.min(np.abs(ends))))
        if self.beta is None:
            object.__setattr__(self, "beta", float(np.min(evaluate(self.b, self.sample(self.default_samples)))))
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")

    @property
    def length(self) -> float:
        return self.domain_right - self.domain_left

    def sample(self, samples: int) -> np.ndarray:
        return np.linspace(self.domain_left, self.domain_right, samples)

    def sup_norms(self, samples: int | None = None, extra=None) -> tuple[float, float, float]:
        """Sampled sup-norms of ``a``, ``b`` and ``f``."""
        x = self.sample(samples or self.default_samples)
        if extra is not None:
            x = np.concatenate([x, np.asarray(extra, dtype=float)])
        return tuple(float(np.max(np.abs(evaluate(g, x)))) for g in (self.a, self.b, self.f))


@dataclass(frozen=True)
class Violation:
    condition: str
    x: Optional[float]
    detail: str


def validate(problem: ProblemSpec, samples: int = 101) -> list[Violation]:
    """Check the admissibility conditions on a uniform sample of the closed domain.

    Returns an empty list for an admissible problem. Failures are reported as
    ``Violation`` records, never raised.
    """
    if samples < 3:
        raise ValueError("samples must be >= 3")
    x = problem.sample(samples)
    a = evaluate(problem.a, x)
    b = evaluate(problem.b, x)
    out: list[Violation] = []

    for xi, bi in zip(x, b):
        if not bi >= problem.beta:
            out.append(Violation("reaction bound", float(xi), f"b={bi:.6g} < beta={problem.beta:.6g}"))

    # zeros of a carry no sign; compare consecutive nonzero samples
    nz = np.flatnonzero(a != 0.0)
    signs = np.sign(a[nz])
    flips = np.flatnonzero(signs[1:] != signs[:-1])
    if len(flips) != 1:
        where = float(x[nz[flips[0]]]) if len(flips) else None
        out.append(Violation("sign pattern", where, f"a changes sign {len(flips)} times, expected exactly once"))
    else:
        k = flips[0]
        if not (signs[k] > 0 > signs[k + 1]):
            out.append(Violation("sign pattern", float(x[nz[k]]),
                                 "a changes sign from - to +, expected + to -"))

    for xe, ae in ((x[0], a[0]), (x[-1], a[-1])):
        if not abs(ae) >= problem.alpha:
            out.append(Violation("endpoint convection bound", float(xe),
                                 f"|a|={abs(ae):.6g} < alpha={problem.alpha:.6g}"))
    return out


def _ex_a(x):
    return -2.0 * (2.0 * x - 1.0)


def _ex_b(x):
    return 4.0 + 0.0 * x


def _layer(x, eps):
    return np.exp(-2.0 * x * (1.0 - x) / eps)


def example1() -> ProblemSpec:
    """``eps*u'' - 2(2x-1)u' - 4u = 0`` on (0, 1), ``u(0) = u(1) = 1``."""

    def exact(x, eps):
        return _layer(np.asarray(x, dtype=float), eps)

    return ProblemSpec(a=_ex_a, b=_ex_b, f=lambda x: 0.0 * x,
                       domain_left=0.0, domain_right=1.0, bc_left=1.0, bc_right=1.0,
                       alpha=2.0, beta=4.0, exact=exact, name="example1")


def example2() -> ProblemSpec:
    """``eps*u'' - 2(2x-1)u' - 4u = 4(4x-1)`` on (0, 1), ``u(0) = u(1) = 1``."""

    def exact(x, eps):
        x = np.asarray(x, dtype=float)
        e = _layer(x, eps)
        s = math.sqrt(2.0 * eps)
        return -2.0 * x + 2.0 * e + e * erf((2.0 * x - 1.0) / s) / erf(1.0 / s)

    return ProblemSpec(a=_ex_a, b=_ex_b, f=lambda x: 4.0 * (4.0 * x - 1.0),
                       domain_left=0.0, domain_right=1.0, bc_left=1.0, bc_right=1.0,
                       alpha=2.0, beta=4.0, exact=exact, name="example2")


BUILTIN_PROBLEMS = {"example1": example1, "example2": example2}


def polynomial_problem(a_coeffs, b_coeffs, f_coeffs, domain=(0.0, 1.0), bc=(0.0, 0.0),
                       alpha: float | None = None, beta: float | None = None,
                       name: str = "user") -> ProblemSpec:
    """Problem with polynomial coefficients, given in ascending powers of x."""
    pa, pb, pf = (Polynomial([float(c) for c in cs]) for cs in (a_coeffs, b_coeffs, f_coeffs))
    return ProblemSpec(a=pa, b=pb, f=pf, domain_left=float(domain[0]), domain_right=float(domain[1]),
                       bc_left=float(bc[0]), bc_right=float(bc[1]), alpha=alpha, beta=beta, name=name)
