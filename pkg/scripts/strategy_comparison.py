"""Compare the three ordering strategies on synthetic programs, with and without transitive edges."""

import argparse
from types import SimpleNamespace

from cito.cli import compare
from cito.synth import SynthSpec, generate_synthetic


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--classes", type=int, default=40)
    ap.add_argument("--density", type=float, default=0.05)
    ap.add_argument("--seeds", type=int, default=3)
    ap.add_argument("--repeats", type=int, default=10)
    ap.add_argument("--iterations", type=int, default=1000)
    args = ap.parse_args()

    for seed in range(args.seeds):
        model = generate_synthetic(SynthSpec(classes=args.classes, edge_density=args.density, seed=seed))
        for transitive in (False, True):
            opts = SimpleNamespace(
                input=[model.name], max_chain_len=3, weights=None, no_transitive=not transitive,
                break_any=False, cycle_cap=1_000_000, seed=seed, iterations=args.iterations, sa_temp=None,
                repeats=args.repeats, rt_base="feedback", serial=True, no_timestamp=False,
            )
            report = compare(model, ["graph", "feedback", "ria"], opts)
            print(f"== {model.name} ({'extended' if transitive else 'direct'} diagram)")
            print(report.table())


if __name__ == "__main__":
    main()
