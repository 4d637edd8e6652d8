"""Time each method on the vesicle and report ratios to projection.

    python scripts/benchmark.py --Ms 25,50,75,100,150,200 --repeats 10 --out results
"""

import argparse
from pathlib import Path

from stokes_flow.bench import REFERENCE_M200, report_json, run_benchmark, samples_to_csv, timing_ratios
from stokes_flow.scenarios import vesicle_scenario


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--Ms", default="25,50,75,100,150,200")
    ap.add_argument("--repeats", type=int, default=10)
    ap.add_argument("--out", default="results")
    args = ap.parse_args()

    Ms = [int(m) for m in args.Ms.split(",")]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    samples = run_benchmark(vesicle_scenario(), Ms, args.repeats)
    ratios = timing_ratios(samples)
    (out / "timings.csv").write_text(samples_to_csv(samples))
    (out / "timings.json").write_text(report_json(samples, ratios))

    for s in samples:
        print(f"{s.method_tag:<14}M={s.M:<5}mean {s.mean_seconds:9.4f} s  min {s.min_seconds:9.4f} s")
    print(f"{'M':>5}{'saddle/proj':>14}{'decoup/proj':>14}")
    for M, a, b in zip(ratios.Ms, ratios.saddle_over_projection, ratios.decoupling_over_projection):
        print(f"{M:>5}{a:>14.3f}{b:>14.3f}")
    ref = REFERENCE_M200
    print(f"reference M=200: {ref['saddle-point'] / ref['projection']:.2f}, "
          f"{ref['decoupling'] / ref['projection']:.3f}")


if __name__ == "__main__":
    main()
