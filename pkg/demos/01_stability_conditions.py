"""Walk the two stability conditions across the shipped problem files.

Both conditions answer the same question -- is the expected covariance
norm at post-burst reception instants bounded -- but they disagree on
some instances: the norm-based test depends on the chosen state
coordinates, the gain-based test searches over filter gains and does
not. Run from anywhere:

    python3 demos/01_stability_conditions.py
"""

from pathlib import Path

from peakcov import (
    closed_form_gains,
    gain_condition_matrix,
    load_problem,
    norm_condition_matrix,
    observability_index,
    validate,
)

PROBLEMS = Path(__file__).resolve().parent / "problems"

FILES = [
    "stable_burst2.json",
    "identical_rows.json",
    "single_loss.json",
    "single_loss_sticky.json",
    "resonant_rotation.json",
]


def main():
    print("condition comparison over the shipped problems")
    print("=" * 72)
    for name in FILES:
        sysm, loss, label = load_problem(str(PROBLEMS / name))
        report = validate(sysm)
        d, gains = closed_form_gains(sysm)
        phi = norm_condition_matrix(sysm, loss, d)
        h = gain_condition_matrix(sysm, loss, gains)
        print(f"\n{name}")
        print(f"  {label}")
        print(f"  observability index {observability_index(sysm)}, "
              f"chain states 0..{loss.s}, "
              f"minimum gain norms {[round(v, 4) for v in d]}")
        print(f"  norm condition: rho(Phi) = {phi.rho:.4f} "
              f"-> {'stable' if phi.rho < 1 else 'inconclusive'}")
        print(f"  gain condition: rho(H)   = {h.rho:.4f} "
              f"-> {'stable' if h.rho < 1 else 'inconclusive'}")
        if report.warnings:
            print(f"  warnings: {'; '.join(report.warnings)}")

    print("\nReading the table:")
    print("  - identical_rows: the norm test fails (rho > 1) although the")
    print("    gain test proves stability; the norm test is conservative.")
    print("  - single_loss vs single_loss_sticky: stickier loss flips the")
    print("    norm verdict while the gain verdict survives.")
    print("  - resonant_rotation: both exceed 1; simulation (demo 04)")
    print("    shows the peak covariance really does diverge there.")


if __name__ == "__main__":
    main()
