"""Testing sample-size curves m(n) for several p at eps = 0.1, delta = 1/3.

Writes curves.csv and curves.png (log-log) into --outdir.
"""
import argparse
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from lpdist.bounds import curve_points
from lpdist.harness import emit_csv

P_VALUES = [1.0, 1.2, 4 / 3, 1.5, 2.0]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eps", type=float, default=0.1)
    ap.add_argument("--delta", type=float, default=1 / 3)
    ap.add_argument("--n-max", type=int, default=10**6)
    ap.add_argument("--num", type=int, default=400)
    ap.add_argument("--outdir", default="results")
    args = ap.parse_args()

    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    n_values = np.unique(np.round(np.geomspace(2, args.n_max, args.num)).astype(int)).tolist()
    rows = [pt for p in P_VALUES for pt in curve_points(p, args.eps, n_values, args.delta)]
    emit_csv(rows, out / "curves.csv")

    fig, ax = plt.subplots(figsize=(6, 4.5))
    for p in P_VALUES:
        pts = [pt for pt in rows if pt.p == p]
        ax.loglog([pt.n for pt in pts], [pt.m_sufficient for pt in pts], label=f"p = {p:.4g}")
    ax.set_xlabel("support size n")
    ax.set_ylabel("sufficient samples m (pre-ceiling)")
    ax.set_title(f"uniformity testing, eps = {args.eps:g}, delta = {args.delta:.3g}")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out / "curves.png", dpi=150)
    print(f"wrote {out / 'curves.csv'} and {out / 'curves.png'}")


if __name__ == "__main__":
    main()
