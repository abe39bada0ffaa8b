#!/usr/bin/env python3
"""Quick-look plots for evapsim output. No acceptance weight; the CSVs are
the product, this just renders them.

  plot_radius.py out/radius.csv [more radius.csv ...] [-o plot.png]
"""
import argparse
import csv
import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def load(path):
    t, r2 = [], []
    with open(path) as f:
        for row in csv.DictReader(f):
            t.append(float(row["t_s"]))
            r2.append(float(row["R2_norm"]))
    return t, r2


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("csv", nargs="+", help="radius.csv files to overlay")
    ap.add_argument("-o", "--out", default="radius.png")
    args = ap.parse_args()

    fig, ax = plt.subplots(figsize=(6, 4))
    for path in args.csv:
        t, r2 = load(path)
        ax.plot(t, r2, label=pathlib.Path(path).parent.name or path)
    ax.set_xlabel("t [s]")
    ax.set_ylabel(r"$R^2 / R_0^2$")
    ax.set_ylim(0, 1.05)
    ax.grid(alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
