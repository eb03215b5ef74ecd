"""Scatter plot of a finite-section eigenvalue table written by ``complex-jacobi spectrum``.

    complex-jacobi spectrum --jacobi spec.json --out eig.csv
    python3 scripts/plot_spectrum.py eig.csv --out eig.png

Needs matplotlib (``pip install artifact[plot]``).
"""

import argparse
import csv

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def read_table(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [float(r["re"]) for r in rows], [float(r["im"]) for r in rows]


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("tables", nargs="+", help="CSV files with re,im columns")
    p.add_argument("--out", default="spectrum.png")
    p.add_argument("--title", default="finite-section eigenvalues")
    args = p.parse_args(argv)

    fig, ax = plt.subplots(figsize=(5, 5))
    for path in args.tables:
        re, im = read_table(path)
        ax.scatter(re, im, s=12, label=path)
    ax.axhline(0, color="0.8", lw=0.5)
    ax.axvline(0, color="0.8", lw=0.5)
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    ax.set_aspect("equal", adjustable="datalim")
    ax.set_title(args.title)
    if len(args.tables) > 1:
        ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)


if __name__ == "__main__":
    main()
