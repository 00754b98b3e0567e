#!/usr/bin/env python3
"""Run the full certification campaign and write its reports.

Usage: python scripts/run_campaign.py [--seed N] [--n-models N] [--out DIR]

Defaults reproduce the acceptance-scale run: 200 random GKSL models at
d in {2, 3, 4} against the 13-function suite, plus the constructed
detailed-balance, degenerate and strict-separation families.
"""

import argparse
import sys
from pathlib import Path

from qmsgap.harness import acceptance_config, run_campaign


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--n-models", type=int, default=None)
    parser.add_argument("--out", type=Path, default=Path("campaign_out"))
    args = parser.parse_args()

    cfg = acceptance_config(seed=args.seed)
    if args.n_models is not None:
        from dataclasses import replace

        cfg = replace(cfg, n_models=args.n_models)

    report = run_campaign(cfg)
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "report.txt").write_text(report.render_text())
    (args.out / "report.csv").write_text(report.to_csv())
    print(report.render_text())
    print(f"reports written to {args.out}/")
    return 0 if report.all_passed else 1


if __name__ == "__main__":
    sys.exit(main())
