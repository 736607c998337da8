# Error-scaling sweep: how the population max error shrinks with the
# sample size at a fixed budget, and what a log-log slope fit reports.
#
# Takes about half a minute.
import time

from dpqr import ExperimentPlan, run_experiment

plan = ExperimentPlan(
    algorithms=("dpfw", "dpam"),
    n_grid=tuple(2**p for p in range(8, 15)),
    eps_grid=(1.0,),
    delta=1e-6,
    repetitions=20,
    k=16,
    dist_kind="dirichlet(0.5)",
    workload_kind="random_sign",
    workload_m=16,
    seed=20240801,
)

t0 = time.time()
result = run_experiment(plan, workers=4)
print(f"ran {len(result.cells)} cells x {plan.repetitions} repetitions "
      f"in {time.time() - t0:.1f}s\n")

print("algorithm      n    population error (mean +- std)")
for cell in result.cells:
    print(f"{cell['algorithm']:>9} {cell['n']:>6}    "
          f"{cell['population_mean']:.4f} +- {cell['population_std']:.4f}")

print("\nfitted log-log slopes of mean population error vs n:")
for s in result.slopes:
    print(f"  {s['algorithm']}: {s['slope']:+.3f} +- {s['stderr']:.3f} "
          f"over {s['points']} points")

print("""
Reading the fit: DPAM tracks its n^(-1/2) rate at this scale.  DPFW's curve
is flat here by design of its calibration, not by accident: the Laplace
scale on the selection scores is 4*D1*sqrt(2T log(1/delta))/(eps n) with
D1 = 2k for sign workloads closed under negation, which stays above the
largest possible score spread (2) for every n in this sweep, so selections
are noise-dominated until n is in the hundreds of thousands.  Rerun any
cell with no_noise=True (or --no-noise) to see the underlying optimizer's
rate without the privacy noise.""")
