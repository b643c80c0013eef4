"""Best backhaul per (wired capacity, OTA channels) cell."""

from _common import run_from_args

from femtorelay.config import Scheme


def main():
    plan, summaries = run_from_args("backhaul_grid.yaml", __doc__)
    for label, _ in plan.points():
        s = summaries[label]
        u = ", ".join(f"{x.value} {s.schemes[x].mean_utility:.2f}" for x in Scheme)
        print(f"{label}: best {s.best_scheme().value} ({u})")


if __name__ == "__main__":
    main()
