"""Negative entropy, its conjugate, and the entropic composite prox.

The negative entropy H(d) = sum_z d(z) log d(z) is 1-strongly convex on the
simplex with respect to the l1 norm.  Its Fenchel conjugate is log-sum-exp,
whose gradient is the softmax map; the Bregman divergence it induces is the
KL divergence.  ``composite_prox`` minimizes

    A <g, d> + B H(d) + C KL(d, anchor)

over the simplex in closed form: the minimizer is proportional to
exp((-A g_i - B + C log anchor_i) / (B + C)).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import SimplexVector, as_values, new_simplex, _freeze
from .errors import AnchorHasZero, ValidationError

# floor applied to prox outputs so later entropy/KL evaluations stay finite
PROX_FLOOR = 1e-300


def neg_entropy(d) -> float:
    """sum d(z) log d(z), with the 0 log 0 = 0 convention.  In [-log k, 0]."""
    v = as_values(d)
    pos = v > 0.0
    return float(np.sum(v[pos] * np.log(v[pos])))


def log_sum_exp(y) -> float:
    """log sum_j exp(y_j), computed stably by max subtraction."""
    v = np.asarray(y, dtype=float)
    if v.size == 0:
        raise ValidationError("log_sum_exp of an empty array")
    top = float(v.max())
    if not np.isfinite(top):
        return top
    return top + float(np.log(np.sum(np.exp(v - top))))


def softmax(y) -> SimplexVector:
    """exp(y_j) / sum_i exp(y_i); invariant under adding a constant to y."""
    v = np.asarray(y, dtype=float)
    if v.size == 0:
        raise ValidationError("softmax of an empty array")
    e = np.exp(v - v.max())
    return SimplexVector(_freeze(e / e.sum()))


def kl_divergence(d, anchor) -> float:
    """KL(d || anchor) = sum d(z) log(d(z)/anchor(z)); nonnegative."""
    dv = as_values(d)
    av = as_values(anchor)
    if dv.shape != av.shape:
        raise ValidationError(f"shape mismatch {dv.shape} vs {av.shape}")
    pos = dv > 0.0
    if np.any(av[pos] == 0.0):
        raise AnchorHasZero("anchor has zero mass where d does not")
    return float(np.sum(dv[pos] * (np.log(dv[pos]) - np.log(av[pos]))))


@dataclass(frozen=True)
class ProxProblem:
    """Data of one entropic composite prox step.

    B may be zero (pure KL step) as long as B + C > 0; the anchor must be
    strictly positive so its logarithm is finite.
    """

    A: float
    B: float
    C: float
    g: np.ndarray
    anchor: SimplexVector

    def __post_init__(self):
        if not (self.B >= 0.0 and self.C >= 0.0 and self.B + self.C > 0.0):
            raise ValidationError(
                f"need B >= 0, C >= 0, B + C > 0; got B={self.B}, C={self.C}"
            )
        g = np.asarray(self.g, dtype=float)
        if g.shape != self.anchor.values.shape:
            raise ValidationError(f"g has shape {g.shape}, anchor {self.anchor.values.shape}")
        if np.any(self.anchor.values <= 0.0):
            raise AnchorHasZero("prox anchor must be strictly positive")
        object.__setattr__(self, "g", _freeze(g.copy()))


def composite_prox(p: ProxProblem) -> SimplexVector:
    """Unique simplex minimizer of A <g, d> + B H(d) + C KL(d, anchor).

    Evaluated in log space: the exponent can be large when B + C is small, so
    the normalization goes through the stable softmax.  Every output entry is
    strictly positive (floored at 1e-300 against exp underflow).
    """
    denom = p.B + p.C
    exponent = (-p.A * p.g - p.B + p.C * np.log(p.anchor.values)) / denom
    out = softmax(exponent).values
    out = np.maximum(out, PROX_FLOOR)
    return new_simplex(out)
