"""Plot sts-sim CSV output.

    python scripts/plot.py miss.csv [-o miss.png]

Miss-detection files get empirical and analytic miss curves; multi-user
files get erasure and error curves. One line per antenna count.
"""

import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def plot_miss(df, ax):
    for n_rx, g in df.groupby("n_rx"):
        err = [g.p_miss_emp - g.p_miss_emp_ci_low, g.p_miss_emp_ci_high - g.p_miss_emp]
        line = ax.errorbar(g.sir_db, g.p_miss_emp, yerr=err, marker="o", ls="", label=f"N_r={n_rx}")
        ax.plot(g.sir_db, g.p_miss_analytic, color=line[0].get_color(), ls="--")
    ax.set_ylabel("miss probability")


def plot_decode(df, ax):
    for n_rx, g in df.groupby("n_rx"):
        (line,) = ax.plot(g.sir_db, g.p_erasure, marker="o", label=f"erasure N_r={n_rx}")
        ax.plot(g.sir_db, g.p_error, marker="x", ls=":", color=line.get_color(), label=f"error N_r={n_rx}")
    ax.set_ylabel("rate per user")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("csv")
    ap.add_argument("-o", "--out", help="image path (default: <csv>.png)")
    args = ap.parse_args()

    df = pd.read_csv(args.csv)
    fig, ax = plt.subplots(figsize=(6, 4.5))
    if "p_miss_emp" in df.columns:
        plot_miss(df, ax)
    else:
        plot_decode(df, ax)
    ax.set_yscale("log")
    ax.set_xlabel("SIR (dB)")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(args.out or args.csv + ".png", dpi=120)


if __name__ == "__main__":
    main()
