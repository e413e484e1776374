#!/usr/bin/env python3
"""Regenerate the bundled example lake and its ground-truth file."""

import argparse
from pathlib import Path

from contextjoin.synth import write_example_ground_truth, write_example_lake


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--out",
        type=Path,
        default=Path(__file__).resolve().parents[1] / "data",
        help="data directory to write into",
    )
    args = parser.parse_args()
    lake = write_example_lake(args.out / "example_lake")
    gt = write_example_ground_truth(args.out / "example_lake_gt.csv")
    print(f"wrote {lake} and {gt}")


if __name__ == "__main__":
    main()
