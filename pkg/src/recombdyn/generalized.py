"""Cyclically twisted recombinators and their closed-form flow.

An order-n relabeling g of the first block's alphabet turns a recombinator R
into the nonlinear operator  C = sigma . R  (sigma pushes the block-0
coordinate forward through g).  Powers wrap around:  C^n = R  and
C^{n+1} = C  on positive measures.  The flow of  d/dt x = rho (C - 1)(x)
then has the closed form

    phi_t = e^{-tau} ( 1 + (F_0(tau) - 1) C^n + sum_{k=1}^{n-1} F_{n-k}(tau) C^k ),

with tau = rho t, where F_k is the k-th roots-of-unity filtered slice of the
exponential series,

    F_k(t) = (1/n) sum_{m=0}^{n-1} xi^{mk} exp(xi^m t),    xi = exp(2 pi i / n)
           = delta_{k,0} + sum_{m>=1} t^{mn-k} / (mn-k)! .

Evaluation pairs each complex term with its conjugate so the imaginary part
cancels exactly; the scaled variants e^{-t} F_k(t) are built from
exp((xi^m - 1) t) and stay accurate for large t where the plain product
e^{-t} * F_k(t) would lose everything to rounding.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .lattice import LinkSet, _cached_blocks
from .measure import Measure, ProductSpace
from .recombinator import recombine, require_positive

# Evaluations must come out real; anything above this imaginary residue
# signals a broken root table rather than rounding.
_IMAG_RESIDUE_TOL = 1e-10


class GFunTable:
    """Roots-of-unity filtered exponential slices of a fixed order n >= 2."""

    def __init__(self, n: int):
        n = int(n)
        if n < 2:
            raise ValueError(f"order must be at least 2, got {n}")
        self.n = n
        self.method = "roots-of-unity"
        roots = [complex(1.0, 0.0)] * n
        for m in range(1, n // 2 + 1):
            z = cmath.exp(2j * math.pi * m / n)
            roots[m] = z
            roots[n - m] = z.conjugate()
        if n % 2 == 0:
            roots[n // 2] = complex(-1.0, 0.0)
        self._roots = tuple(roots)

    def _filtered_sum(self, k: int, t: float, shift: float, include_m0: bool) -> float:
        n = self.n
        roots = self._roots
        total = complex(0.0, 0.0)
        if include_m0:
            total += math.exp((1.0 - shift) * t)
        for m in range(1, (n - 1) // 2 + 1):
            term = roots[m * k % n] * cmath.exp((roots[m] - shift) * t)
            total += term + term.conjugate()
        if n % 2 == 0:
            coeff = roots[n // 2 * k % n]
            total += coeff.real * math.exp((-1.0 - shift) * t)
        if abs(total.imag) > _IMAG_RESIDUE_TOL:
            raise ArithmeticError(
                f"imaginary residue {total.imag:.3e} exceeds {_IMAG_RESIDUE_TOL}"
            )
        return total.real / n

    def eval(self, k: int, t: float) -> float:
        """F_k(t); the index wraps modulo n."""
        return self._filtered_sum(k % self.n, float(t), 0.0, include_m0=True)

    def eval_scaled(self, k: int, t: float) -> float:
        """e^{-t} F_k(t), overflow-free for large t."""
        return self._filtered_sum(k % self.n, float(t), 1.0, include_m0=True)

    def asymptotic_residual(self, k: int, t: float) -> float:
        """|e^{-t} F_k(t) - 1/n| formed from the decaying modes alone.

        The m = 0 mode contributes exactly 1/n, so dropping it gives the
        deviation directly, with full relative accuracy even when it sits far
        below the rounding floor of e^{-t} * F_k(t) - 1/n.
        """
        return abs(self._filtered_sum(k % self.n, float(t), 1.0, include_m0=False))


@lru_cache(maxsize=64)
def _table(n: int) -> GFunTable:
    return GFunTable(n)


def gfun(n: int, k: int, t: float) -> float:
    """Order-n filtered exponential slice F_k evaluated at t."""
    return _table(int(n)).eval(k, t)


def gfun_scaled(n: int, k: int, t: float) -> float:
    """e^{-t} F_k(t)."""
    return _table(int(n)).eval_scaled(k, t)


def gfun_asymptotic_check(n: int, k: int, t_large: float) -> float:
    """|e^{-t} F_k(t) - 1/n| at a (large) time; converges to 0 like the
    slowest nontrivial mode, i.e. within 2 * exp((cos(2 pi / n) - 1) t)."""
    return _table(int(n)).asymptotic_residual(k, t_large)


def roots_of_unity_mean(n: int, exponent: int) -> complex:
    """(1/n) sum_m xi^{m * exponent}: one when n divides the exponent, else zero."""
    table = _table(int(n))
    total = complex(0.0, 0.0)
    for m in range(table.n):
        total += table._roots[m * exponent % table.n]
    return total / table.n


def flow_coefficients(n: int, tau: float) -> np.ndarray:
    """Coefficients of (identity, C^1, ..., C^n) in the order-n flow at tau.

    The entries are e^{-tau}, e^{-tau} F_{n-1}(tau), ..., e^{-tau} F_1(tau),
    and e^{-tau} (F_0(tau) - 1); they sum to one for every tau.
    """
    table = _table(int(n))
    decay = math.exp(-tau)
    out = np.empty(table.n + 1)
    out[0] = decay
    for k in range(1, table.n):
        out[k] = table.eval_scaled(table.n - k, tau)
    out[table.n] = table.eval_scaled(0, tau) - decay
    return out


# ---------------------------------------------------------------------------
# The cyclic operator C = sigma . R
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CyclicOperator:
    """Recombinator composed with an order-n relabeling of the first block.

    ``perm`` permutes the flat states of the first partition block; composing
    it ``order`` times must give the identity.  The relabeling commutes with
    the recombinator on recombined (product) measures, which is exactly what
    the closed-form flow needs.
    """

    space: ProductSpace
    cuts: LinkSet
    perm: tuple[int, ...]
    order: int

    def __post_init__(self) -> None:
        if self.order < 2:
            raise ValueError(f"order must be at least 2, got {self.order}")
        if self.cuts.n_links != self.space.n_links:
            raise ValueError("cut set does not match the space's link count")
        perm = tuple(int(p) for p in self.perm)
        object.__setattr__(self, "perm", perm)
        block0 = _cached_blocks(self.cuts.bits, self.space.n_nodes)[0]
        block0_states = math.prod(self.space.sizes[ax] for ax in block0)
        if sorted(perm) != list(range(block0_states)):
            raise ValueError(
                f"perm must permute the {block0_states} states of the first block"
            )
        composed = perm
        for _ in range(self.order - 1):
            composed = tuple(perm[p] for p in composed)
        if composed != tuple(range(block0_states)):
            raise ValueError(f"perm composed {self.order} times is not the identity")

    @property
    def block0_states(self) -> int:
        return len(self.perm)

    def perm_power(self, k: int) -> tuple[int, ...]:
        k %= self.order
        result = tuple(range(self.block0_states))
        for _ in range(k):
            result = tuple(self.perm[p] for p in result)
        return result


def _relabel_block0(w: np.ndarray, perm: Sequence[int], block0_states: int) -> np.ndarray:
    matrix = w.reshape(block0_states, -1)
    out = np.empty_like(matrix)
    out[np.asarray(perm)] = matrix
    return out.reshape(w.shape).ravel()


def cyclic_apply(omega: Measure, op: CyclicOperator, power: int) -> Measure:
    """k-th power of the cyclic operator:  C^k = sigma^k . R  for k >= 1."""
    power = int(power)
    if power < 0:
        raise ValueError("power must be nonnegative")
    if omega.space.sizes != op.space.sizes:
        raise ValueError("measure does not live on the operator's space")
    require_positive(omega, "cyclic_apply")
    if power == 0:
        return omega
    base = recombine(omega, op.cuts)
    k = power % op.order
    if k == 0:
        return base
    w = _relabel_block0(base.weights, op.perm_power(k), op.block0_states)
    return Measure(omega.space, w, omega.nodes)


def generalized_flow_apply(
    omega0: Measure, op: CyclicOperator, rho: float, t: float
) -> Measure:
    """Closed-form flow of  d/dt x = rho (C - 1)(x)  from a positive state.

    The rate enters through the time scaling tau = rho t.  Coefficients sum
    to one, so mass is conserved; they are nonnegative for all t >= 0, so
    positivity is preserved as well.
    """
    if not rho > 0.0:
        raise ValueError(f"rate must be positive, got {rho}")
    if t < 0.0:
        raise ValueError(f"time must be nonnegative, got {t}")
    require_positive(omega0, "generalized_flow_apply")
    return _flow_state(omega0, op, rho, t)


def _flow_state(omega0: Measure, op: CyclicOperator, rho: float, t: float) -> Measure:
    # Internal: no sign restriction on t (the ODE check differentiates
    # through t = 0), exact passthrough at t == 0.
    if t == 0.0:
        return omega0
    if omega0.space.sizes != op.space.sizes:
        raise ValueError("measure does not live on the operator's space")
    coeffs = flow_coefficients(op.order, rho * t)
    base = recombine(omega0, op.cuts)
    acc = coeffs[0] * omega0.weights
    power = base.weights
    for k in range(1, op.order + 1):
        power = _relabel_block0(power, op.perm, op.block0_states)
        acc = acc + coeffs[k] * power
    return Measure(omega0.space, acc, omega0.nodes)


def check_flow_commutation(
    omega0: Measure, op: CyclicOperator, rho: float, t: float
) -> float:
    """Total variation of  C(phi_t(x)) - phi_t(C(x)); zero for this construction."""
    require_positive(omega0, "check_flow_commutation")
    forward = cyclic_apply(generalized_flow_apply(omega0, op, rho, t), op, 1)
    swapped = generalized_flow_apply(cyclic_apply(omega0, op, 1), op, rho, t)
    return float(np.abs(forward.weights - swapped.weights).sum())


def check_generalized_ode(
    omega0: Measure,
    op: CyclicOperator,
    rho: float,
    t_grid: Sequence[float],
    h_fd: float,
) -> float:
    """Max defect of the flow against its generator, by central differences.

    Returns max_t | (phi_{t+h} - phi_{t-h}) / 2h - rho (C - 1)(phi_t) | in
    total variation; second order in h, so halving h divides it by about 4.
    """
    if h_fd <= 0.0:
        raise ValueError("finite-difference step must be positive")
    require_positive(omega0, "check_generalized_ode")
    worst = 0.0
    for t in t_grid:
        t = float(t)
        if t < 0.0:
            raise ValueError("grid times must be nonnegative")
        ahead = _flow_state(omega0, op, rho, t + h_fd)
        behind = _flow_state(omega0, op, rho, t - h_fd)
        middle = _flow_state(omega0, op, rho, t)
        derivative = (ahead.weights - behind.weights) / (2.0 * h_fd)
        generator = rho * (cyclic_apply(middle, op, 1).weights - middle.weights)
        worst = max(worst, float(np.abs(derivative - generator).sum()))
    return worst
