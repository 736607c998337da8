"""DPAM: private accelerated mirror descent on the smoothed primal.

The nonsmooth worst-query objective is smoothed by Gaussian convolution,
whose stochastic gradient is (a sign flip of) the workload row maximizing
the noisy score <q, emp - d + xi>.  Each iteration blends an aggregate and a
current iterate into a midpoint, queries the oracle there, and takes an
entropic composite prox step

    d_{t+1} = argmin over the simplex of
              eta_t <g_t, d> + alpha [eta_t H(d) + (sum of past eta) KL(d, d_t)]

followed by the matching aggregate update.  The Gaussian noise in the oracle
is what makes the run private; its scale is calibrated through the Renyi
accounting in ``mechanisms``.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass

import numpy as np

from .core import (
    Dataset,
    PrivacyBudget,
    QueryWorkload,
    SimplexVector,
    as_alpha,
    empirical,
    new_simplex,
    uniform,
)
from .entropy import ProxProblem, composite_prox
from .errors import InvalidParams, ValidationError
from .mechanisms import AMSchedule, NoiseStream, dpam_schedule
from .objective import WidthEstimate, gaussian_width, max_query_error, smoothed_gradient_oracle
from .report import RunReport

WIDTH_SAMPLES = 1000


@dataclass(frozen=True)
class AMTrace:
    """Per-iteration step weights, their running sums, and oracle picks."""

    etas: np.ndarray
    eta_cumsums: np.ndarray
    row_indices: np.ndarray
    schedule: AMSchedule
    seed: int

    @property
    def T(self) -> int:
        return self.etas.shape[0]


def run_dpam(
    data: Dataset,
    workload: QueryWorkload,
    budget: PrivacyBudget,
    alpha,
    rng: NoiseStream,
    schedule: AMSchedule | None = None,
    zero_noise: bool = False,
    entropy_weighting: str = "alpha",
    quiet: bool = False,
) -> tuple[SimplexVector, AMTrace]:
    """Run the private mirror-descent solver; returns (distribution, trace).

    When no schedule is given, one is calibrated from a Monte Carlo width
    estimate drawn on the "width" substream.  ``entropy_weighting`` controls
    how the prox step absorbs the regularization strength: "alpha" (the
    default) runs the step rule on the alpha-normalized objective, scaling
    both the entropy and divergence weights by alpha so the effective step
    on the gradient is of order 2/(alpha t), the right scale for an
    alpha-strongly-convex composite; "unit" applies the step weights with no
    alpha anywhere in the prox.  The two coincide at alpha = 1.
    ``zero_noise`` routes the oracle through its exact-subgradient debug
    hook; such a run is not private.
    """
    a = as_alpha(alpha, positive=True)
    if entropy_weighting not in ("alpha", "unit"):
        raise ValidationError(f"unknown entropy weighting {entropy_weighting!r}")
    if not workload.symmetric and not quiet:
        warnings.warn("workload is not closed under negation; max error is signed", stacklevel=2)
    emp = empirical(data, workload.k)
    if schedule is None:
        west = gaussian_width(workload, WIDTH_SAMPLES, rng.substream("width"))
        schedule = dpam_schedule(budget, a, west.mean, workload.k, data.n)
    oracle = rng.substream("oracle")
    composite_scale = a if entropy_weighting == "alpha" else 1.0

    t_total = schedule.T
    current = uniform(workload.k)
    aggregate = current.values.copy()
    eta_cum = 0.0
    etas = np.empty(t_total)
    cums = np.empty(t_total)
    picked = np.empty(t_total, dtype=np.int64)

    for t in range(1, t_total + 1):
        eta_t = schedule.eta(t)
        denom = eta_cum + eta_t
        midpoint = (eta_cum / denom) * aggregate + (eta_t / denom) * current.values
        draw = smoothed_gradient_oracle(
            midpoint, emp, workload, schedule.sigma, oracle, zero_noise=zero_noise
        )
        nxt = composite_prox(
            ProxProblem(
                A=eta_t,
                B=eta_t * composite_scale,
                C=eta_cum * composite_scale,
                g=draw.gradient,
                anchor=current,
            )
        )
        aggregate = (eta_cum / denom) * aggregate + (eta_t / denom) * nxt.values
        current = nxt
        eta_cum = denom
        etas[t - 1] = eta_t
        cums[t - 1] = eta_cum
        picked[t - 1] = draw.row

    trace = AMTrace(
        etas=etas, eta_cumsums=cums, row_indices=picked, schedule=schedule, seed=rng.seed
    )
    return new_simplex(aggregate), trace


def optimal_alpha(budget: PrivacyBudget, width: float, k: int, n: int) -> float:
    """Regularization strength minimizing the DPAM error bound.

        alpha* = sqrt(log(1/delta)) sqrt(width) / (log^{3/4}(k) sqrt(n eps))
    """
    if k < 2:
        raise InvalidParams(f"need k >= 2, got {k}")
    if width <= 0.0 or n < 1:
        raise InvalidParams(f"need width > 0 and n >= 1, got {width}, {n}")
    log_delta = math.log(1.0 / budget.delta)
    return math.sqrt(log_delta * width) / (math.log(k) ** 0.75 * math.sqrt(n * budget.epsilon))


def regime_ok(width: float, budget: PrivacyBudget, k: int, n: int) -> bool:
    """Whether n is large enough for the smoothing term to be dominated.

    True iff n >= width^3 log(1/delta) / (eps log^{3/2} k).  Reports carry a
    warning when this fails; the run itself proceeds either way.
    """
    if k < 2:
        raise InvalidParams(f"need k >= 2, got {k}")
    if width <= 0.0:
        raise InvalidParams(f"need width > 0, got {width}")
    threshold = width ** 3 * math.log(1.0 / budget.delta) / (
        budget.epsilon * math.log(k) ** 1.5
    )
    return n >= threshold


def release_dpam(
    data: Dataset,
    workload: QueryWorkload,
    budget: PrivacyBudget,
    rng: NoiseStream,
    alpha=None,
    schedule: AMSchedule | None = None,
    no_noise: bool = False,
    true_dist=None,
) -> RunReport:
    """Full DPAM pipeline: estimate the width, calibrate, solve, report.

    The Monte Carlo width estimate (not the unknown true width) feeds the
    iteration count, noise scale, and default regularization strength, and
    is recorded in the report together with the regime flag.
    """
    t0 = time.perf_counter()
    west: WidthEstimate = gaussian_width(workload, WIDTH_SAMPLES, rng.substream("width"))
    a = as_alpha(
        alpha if alpha is not None else optimal_alpha(budget, west.mean, workload.k, data.n),
        positive=True,
    )
    notes: list[str] = []
    if not workload.symmetric:
        notes.append("workload not closed under negation; errors are signed")
    if schedule is None:
        schedule = dpam_schedule(budget, a, west.mean, workload.k, data.n)
    if schedule.capped:
        notes.append(f"iteration count capped at {schedule.T}")
    regime = regime_ok(west.mean, budget, workload.k, data.n)
    if not regime:
        notes.append("sample size below the smoothing-dominance threshold")
    if no_noise:
        notes.append("NON-PRIVATE DEBUG RUN: oracle noise disabled, budget not honored")

    p_priv, trace = run_dpam(
        data, workload, budget, a, rng, schedule=schedule, zero_noise=no_noise, quiet=True
    )
    t_solve = time.perf_counter() - t0
    emp = empirical(data, workload.k)
    pop_err = None
    if true_dist is not None:
        pop_err = max_query_error(true_dist, p_priv, workload)

    return RunReport(
        algorithm="dpam",
        k=workload.k,
        m=workload.m,
        n=data.n,
        epsilon=budget.epsilon,
        delta=budget.delta,
        alpha=a,
        seed=rng.seed,
        schedule={
            "T": schedule.T,
            "sigma": schedule.sigma,
            "eta_offset": schedule.eta_offset,
            "capped": schedule.capped,
        },
        p_priv=[float(x) for x in p_priv.values],
        empirical_max_error=max_query_error(emp, p_priv, workload),
        per_query_answers=[float(x) for x in workload.queries @ p_priv.values],
        no_noise=no_noise,
        width={"mean": west.mean, "stderr": west.stderr, "samples": west.samples},
        regime_ok=regime,
        population_max_error=pop_err,
        warnings=notes,
        timings={"total_s": time.perf_counter() - t0, "solve_s": t_solve},
    )
