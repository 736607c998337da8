"""Run reports: everything needed to audit or replay one private release."""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import new_simplex
from .errors import ValidationError


@dataclass
class RunReport:
    """Inputs digest, schedule, output distribution, and diagnostics of a run.

    ``p_priv`` always validates as a distribution; ``population_max_error``
    is present only when the caller supplied the true generating
    distribution (synthetic benchmarks).  ``timings`` holds wall-clock
    seconds and is the one volatile field: file writers drop it by default
    so serialized reports stay byte-reproducible.
    """

    algorithm: str
    k: int
    m: int
    n: int
    epsilon: float
    delta: float
    alpha: float
    seed: int
    schedule: dict
    p_priv: list[float]
    empirical_max_error: float
    per_query_answers: list[float]
    no_noise: bool = False
    width: dict | None = None
    regime_ok: bool | None = None
    population_max_error: float | None = None
    diagnostics: dict | None = None
    warnings: list[str] = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    def to_dict(self, include_timings: bool = True) -> dict:
        out = {
            "algorithm": self.algorithm,
            "k": self.k,
            "m": self.m,
            "n": self.n,
            "epsilon": self.epsilon,
            "delta": self.delta,
            "alpha": self.alpha,
            "seed": self.seed,
            "schedule": dict(self.schedule),
            "p_priv": list(self.p_priv),
            "empirical_max_error": self.empirical_max_error,
            "per_query_answers": list(self.per_query_answers),
            "no_noise": self.no_noise,
            "width": dict(self.width) if self.width is not None else None,
            "regime_ok": self.regime_ok,
            "population_max_error": self.population_max_error,
            "diagnostics": dict(self.diagnostics) if self.diagnostics is not None else None,
            "warnings": list(self.warnings),
        }
        if include_timings:
            out["timings"] = dict(self.timings)
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "RunReport":
        try:
            report = cls(
                algorithm=d["algorithm"],
                k=int(d["k"]),
                m=int(d["m"]),
                n=int(d["n"]),
                epsilon=float(d["epsilon"]),
                delta=float(d["delta"]),
                alpha=float(d["alpha"]),
                seed=int(d["seed"]),
                schedule=dict(d["schedule"]),
                p_priv=[float(x) for x in d["p_priv"]],
                empirical_max_error=float(d["empirical_max_error"]),
                per_query_answers=[float(x) for x in d["per_query_answers"]],
                no_noise=bool(d.get("no_noise", False)),
                width=dict(d["width"]) if d.get("width") is not None else None,
                regime_ok=d.get("regime_ok"),
                population_max_error=(
                    float(d["population_max_error"])
                    if d.get("population_max_error") is not None
                    else None
                ),
                diagnostics=(
                    dict(d["diagnostics"]) if d.get("diagnostics") is not None else None
                ),
                warnings=list(d.get("warnings", [])),
                timings=dict(d.get("timings", {})),
            )
        except KeyError as exc:
            raise ValidationError(f"report missing field {exc}") from exc
        new_simplex(report.p_priv)  # a report must carry a valid distribution
        return report
