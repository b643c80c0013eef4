"""Mean equilibrium utility against femtocell density, with gains over the classical scheme."""

from _common import run_from_args

from femtorelay.config import Scheme


def main():
    plan, summaries = run_from_args("density.yaml", __doc__)
    print(f"{'point':>14} " + " ".join(f"{s.value:>10}" for s in Scheme) + "   WRD/CLA   OTA/CLA")
    for label, _ in plan.points():
        s = summaries[label]
        u = " ".join(f"{s.schemes[x].mean_utility:10.2f}" for x in Scheme)
        print(f"{label:>14} {u}   {s.ratios[Scheme.WRD]['utility']:.5f}   {s.ratios[Scheme.OTA]['utility']:.5f}")


if __name__ == "__main__":
    main()
