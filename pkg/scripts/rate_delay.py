"""Pooled rate and delay statistics; CDF files are written next to the summaries."""

from _common import run_from_args

from femtorelay.config import Scheme


def main():
    _, summaries = run_from_args("rate_delay.yaml", __doc__)
    pooled = summaries["pooled"]
    for s in Scheme:
        x = pooled.schemes[s]
        print(f"{s.value}: mean rate {x.mean_rate:.4f} b/s/Hz, mean delay {x.mean_delay:.3e} s "
              f"(stable samples), unstable {x.unstable}/{x.samples}")
    for s in (Scheme.WRD, Scheme.OTA):
        r = pooled.ratios[s]
        print(f"{s.value} vs CLA: rate x{r['rate']:.4f}, delay reduction x{r['delay']:.4f}")


if __name__ == "__main__":
    main()
