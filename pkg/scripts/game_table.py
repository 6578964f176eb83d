"""Rock-paper-scissors scores with and without foreknowledge, under each constraint."""

import argparse
from fractions import Fraction

from risklab.game import GameSpec, Mix, best_annealed_score, expected_score_quenched

CASES = [
    ("no constraint", "none", 1, None),
    ("equal counts per 3 rounds", "equal_counts", 1, 3),
    ("equal counts per set", "equal_counts", 1, 300),
    ("one hand per set, 5 sets", "same_hand_each_set", 5, None),
    ("same hand across 5 sets", "same_hand_across_sets", 5, None),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=20_000)
    ap.add_argument("--seed", type=int, default=3)
    args = ap.parse_args()

    bobs = {"uniform": Mix.uniform(), "(2/3,1/6,1/6)": Mix(Fraction(2, 3), Fraction(1, 6), Fraction(1, 6))}
    print(f"{'Bob':15s} {'case':28s} {'annealed':>9s} {'quenched':>10s} {'stderr':>7s}")
    for bname, bob in bobs.items():
        for label, constraint, sets, block in CASES:
            spec = GameSpec(bob, 300, "quenched", constraint, sets=sets, block=block)
            mean, se = expected_score_quenched(spec, args.trials, args.seed)
            print(f"{bname:15s} {label:28s} {best_annealed_score(spec):9.2f} {mean:10.3f} {se:7.3f}")


if __name__ == "__main__":
    main()
