#!/usr/bin/env python3
"""Render the fibering curves Q_n(t), Q_e(t) of one ray.

Usage: plot_fibering.py <fiber.csv> <out.png> [lam]

Draws both curves with the crossing at t_e, vertical markers at t_n and
t_e and the maximal quotient levels; an optional horizontal line at ``lam``
marks its intersections with the two curves.  Styling is fixed in-code so
identical inputs render identical files.
"""

import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from chartio import crossings, read_fiber_csv

STYLE = {
    "qn": dict(color="#1f77b4", lw=1.8, label="$Q_n$"),
    "qe": dict(color="#d62728", lw=1.8, label="$Q_e$"),
    "tn": dict(color="#1f77b4", lw=0.9, ls=":"),
    "te": dict(color="#d62728", lw=0.9, ls=":"),
    "lam": dict(color="#2ca02c", lw=1.1, ls="--"),
}


def render(fiber_csv: str, out_image: str, lam: float | None = None) -> None:
    table = read_fiber_csv(fiber_csv)
    t = table.column("t")
    qn = table.column("Qn")
    qe = table.column("Qe")
    m = table.markers

    fig, ax = plt.subplots(figsize=(6.4, 4.2), dpi=120)
    ax.plot(t, qn, **STYLE["qn"])
    ax.plot(t, qe, **STYLE["qe"])
    ax.axvline(m["t_n"], **STYLE["tn"])
    ax.axvline(m["t_e"], **STYLE["te"])
    ax.annotate("$t_n$", (m["t_n"], ax.get_ylim()[0]), xytext=(2, 4),
                textcoords="offset points", fontsize=9)
    ax.annotate("$t_e$", (m["t_e"], ax.get_ylim()[0]), xytext=(2, 4),
                textcoords="offset points", fontsize=9)
    ax.axhline(m["lambda_n_u"], color="#1f77b4", lw=0.7, ls="-.", alpha=0.6)
    ax.axhline(m["lambda_e_u"], color="#d62728", lw=0.7, ls="-.", alpha=0.6)
    if lam is not None:
        ax.axhline(lam, **STYLE["lam"], label=f"$\\lambda$ = {lam:g}")
        for ys, color in ((qn, STYLE["qn"]["color"]), (qe, STYLE["qe"]["color"])):
            for x in crossings(t, [y - lam for y in ys]):
                ax.plot([x], [lam], marker="o", ms=5, color=color)
    ax.axhline(0.0, color="black", lw=0.6)
    ax.set_xlabel("$t$")
    ax.set_ylabel("quotient value")
    ax.legend(loc="upper right", fontsize=9)
    ax.set_title("fibering quotients along one ray")
    fig.tight_layout()
    fig.savefig(out_image, metadata={"Software": "choquard-plots"})
    plt.close(fig)


def main(argv) -> int:
    if len(argv) not in (3, 4):
        print(__doc__.strip().splitlines()[2], file=sys.stderr)
        return 1
    lam = float(argv[3]) if len(argv) == 4 else None
    render(argv[1], argv[2], lam)
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
