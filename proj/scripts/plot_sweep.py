"""Plot any mirrorsim CSV: first column on x, the rest (or --columns) on y.

    mirrorsim mirror 2m --analysis temp-sweep -o temp.csv
    python scripts/plot_sweep.py temp.csv --x "temp (degC)" --columns "i_out (A)" -o temp.png
"""

import argparse
import csv

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("csv")
    ap.add_argument("--x", help="x column (default: first)")
    ap.add_argument("--columns", nargs="*", help="y columns (default: all numeric)")
    ap.add_argument("-o", "--output", default="plot.png")
    args = ap.parse_args()

    with open(args.csv, newline="") as f:
        rows = list(csv.DictReader(f))
    header = list(rows[0].keys())
    x = args.x or header[0]

    def numeric(col):
        try:
            float(rows[0][col])
            return True
        except ValueError:
            return False

    ys = args.columns or [c for c in header if c != x and numeric(c)]
    fig, ax = plt.subplots()
    for col in ys:
        ax.plot([float(r[x]) for r in rows], [float(r[col]) for r in rows], marker=".", label=col)
    ax.set_xlabel(x)
    ax.grid(True)
    ax.legend()
    fig.savefig(args.output, dpi=120)


if __name__ == "__main__":
    main()
