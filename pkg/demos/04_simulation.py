"""Cross-check the analysis against Monte Carlo simulation.

Three views of the same object, the covariance norm at post-burst
reception instants:

  1. exact enumeration of the first peak's expectation,
  2. a seeded Monte Carlo ensemble (reproducible bit for bit),
  3. a growth-trend statistic separating bounded from divergent runs.

    python3 demos/04_simulation.py
"""

from pathlib import Path

from peakcov import (
    enumerate_first_peak,
    growth_trend,
    load_problem,
    mc_estimate,
)

PROBLEMS = Path(__file__).resolve().parent / "problems"


def main():
    sysm, loss, label = load_problem(str(PROBLEMS / "stable_burst2.json"))
    print(f"stable instance: {label}")

    enu = enumerate_first_peak(sysm, loss)
    print(f"  exact first-peak mean norm: {enu.mean_norm:.6f} "
          f"(mass covered {enu.covered_mass:.15f}, "
          f"tail {enu.tail_mass:.1e})")

    est = mc_estimate(sysm, loss, runs=2000, horizon=96, base_seed=1)
    z = (est.means[0] - enu.mean_norm) / est.stderrs[0]
    print(f"  Monte Carlo ({est.runs} runs): {est.means[0]:.6f} "
          f"+/- {est.stderrs[0]:.6f}  (z = {z:+.2f} vs exact)")

    est = mc_estimate(sysm, loss, runs=24, horizon=5000, base_seed=2)
    trend = growth_trend(est.peak_norms_by_run, burn=50, boots=300, seed=0)
    print(f"  long-horizon trend: slope {trend.slope:+.2e} per peak, "
          f"z = {trend.z:+.2f} over {trend.n_indices} peak indices")
    print("  (|z| < 3: no growth detected, consistent with the verdict)")

    sysm, loss, label = load_problem(str(PROBLEMS / "resonant_rotation.json"))
    print(f"\ndivergent instance: {label}")
    est = mc_estimate(sysm, loss, runs=48, horizon=64, base_seed=3)
    trend = growth_trend(est.peak_norms_by_run, burn=2, max_index=22,
                         boots=300, seed=0)
    print(f"  mean peak norm, index 1 vs 20: {est.means[0]:.1f} vs "
          f"{est.means[19]:.3e}")
    print(f"  growth trend: slope {trend.slope:+.3f} per peak "
          f"(about {2.718281828 ** trend.slope:.2f}x each), "
          f"z = {trend.z:+.1f}")
    print("  (z >> 3: geometric growth; no finite horizon can prove")
    print("  stability, but divergence like this refutes it loudly)")


if __name__ == "__main__":
    main()
