"""How the maximum chain length changes relationship counts on synthetic programs."""

import argparse
import statistics

from cito.cli import analyze
from cito.synth import SynthSpec, generate_synthetic


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--models", type=int, default=20)
    ap.add_argument("--classes", type=int, default=15)
    ap.add_argument("--density", type=float, default=0.1)
    args = ap.parse_args()

    rows = {n: [] for n in (3, 4, 5)}
    for seed in range(args.models):
        model = generate_synthetic(SynthSpec(classes=args.classes, edge_density=args.density, seed=seed))
        for n in rows:
            report, _ = analyze(model, max_len=n)
            rows[n].append(report)

    print(f"{args.models} models, {args.classes} classes, density {args.density}")
    print(f"{'len':<5}{'chains':>9}{'T edges':>9}{'C edges':>9}{'T frac':>9}{'t=1':>7}{'t>0.5':>7}")
    for n, reports in rows.items():
        mean = lambda key: statistics.fmean(r[key] for r in reports)
        certain = statistics.fmean(r["chain_probability_histogram"]["1"] for r in reports)
        likely = statistics.fmean(r["chain_probability_histogram"]["0.5-1"] for r in reports) + certain
        print(f"{n:<5}{mean('chains'):>9.1f}{mean('transitive'):>9.1f}{mean('combination'):>9.1f}"
              f"{mean('transitive_fraction'):>9.3f}{certain:>7.1f}{likely:>7.1f}")


if __name__ == "__main__":
    main()
