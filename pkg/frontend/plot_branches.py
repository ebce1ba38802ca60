#!/usr/bin/env python3
"""Render the two-branch energy diagram over the sweep parameter.

Usage: plot_branches.py <sweep.csv> <extremal.json> <out.png>

Plots the minimal energies of the gain branch (E1) and the loss branch (E2)
against the parameter, with vertical lines at lambda_e and lambda_n; the
sign change of E2 at lambda_e is visible where the curve crosses zero.
Styling is fixed in-code so identical inputs render identical files.
"""

import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from chartio import crossings, read_extremal_json, read_sweep_csv


def render(sweep_csv: str, extremal_json: str, out_image: str) -> None:
    table = read_sweep_csv(sweep_csv)
    ext = read_extremal_json(extremal_json)
    lam = table.column("lambda")
    e1 = table.column("E1")
    e2 = table.column("E2")

    fig, ax = plt.subplots(figsize=(6.4, 4.2), dpi=120)
    ax.plot(lam, e1, color="#1f77b4", lw=1.8, marker=".", ms=4,
            label="$E$ on the gain branch")
    ax.plot(lam, e2, color="#d62728", lw=1.8, marker=".", ms=4,
            label="$E$ on the loss branch")
    ax.axvline(ext["lambda_e"], color="#2ca02c", lw=1.0, ls="--")
    ax.axvline(ext["lambda_n"], color="#9467bd", lw=1.0, ls="--")
    ymin = ax.get_ylim()[0]
    ax.annotate("$\\lambda_e$", (ext["lambda_e"], ymin), xytext=(3, 6),
                textcoords="offset points", fontsize=9, color="#2ca02c")
    ax.annotate("$\\lambda_n$", (ext["lambda_n"], ymin), xytext=(3, 6),
                textcoords="offset points", fontsize=9, color="#9467bd")
    for x in crossings(lam, e2):
        ax.plot([x], [0.0], marker="x", ms=7, color="#d62728")
    ax.axhline(0.0, color="black", lw=0.6)
    ax.set_xlabel("$\\lambda$")
    ax.set_ylabel("minimal branch energy")
    ax.legend(loc="lower left", fontsize=9)
    ax.set_title("branch energies across the parameter range")
    fig.tight_layout()
    fig.savefig(out_image, metadata={"Software": "choquard-plots"})
    plt.close(fig)


def main(argv) -> int:
    if len(argv) != 4:
        print(__doc__.strip().splitlines()[2], file=sys.stderr)
        return 1
    render(argv[1], argv[2], argv[3])
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
