"""Plot the CSV tables written by `semrd figure all --out DIR`.

Usage: python3 docs/plot_figures.py DIR
"""

import csv
import json
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def read(path):
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    return rows


def num(v):
    return float(v) if v not in ("", None) else float("nan")


def unit(root, fig):
    m = json.loads((root / f"{fig}_manifest.json").read_text())
    return m.get("base", "bits")


def surface(ax, rows, x, y, z):
    xs = sorted({num(r[x]) for r in rows})
    ys = sorted({num(r[y]) for r in rows})
    grid = {(num(r[x]), num(r[y])): num(r[z]) for r in rows}
    zz = [[grid.get((a, b), float("nan")) for a in xs] for b in ys]
    cs = ax.contourf(xs, ys, zz, levels=20)
    ax.figure.colorbar(cs, ax=ax)
    ax.set_xlabel(x)
    ax.set_ylabel(y)


def main(root):
    root = Path(root)
    out = root / "plots"
    out.mkdir(exist_ok=True)

    if (root / "fig4.csv").exists():
        rows = read(root / "fig4.csv")
        fig, ax = plt.subplots()
        d = [num(r["d"]) for r in rows]
        ax.plot(d, [num(r["rate_semantic"]) for r in rows], label="semantic")
        ax.plot(d, [num(r["rate_plain"]) for r in rows], label="plain")
        ax.set_xlabel("D")
        ax.set_ylabel(f"rate ({unit(root, 'fig4')})")
        ax.legend()
        fig.savefig(out / "fig4.png", dpi=150)

    for name in ("fig6a", "fig6b"):
        if (root / f"{name}.csv").exists():
            rows = read(root / f"{name}.csv")
            fig, ax = plt.subplots()
            ds = [num(r["ds"]) for r in rows]
            ax.plot(ds, [num(r["rate"]) for r in rows], label="rate")
            ax.plot(ds, [num(r["naive_formula"]) for r in rows], "--", label="naive formula")
            ax.set_xlabel("Ds")
            ax.set_ylabel(f"rate ({unit(root, name)})")
            ax.legend()
            fig.savefig(out / f"{name}.png", dpi=150)

    for name, table in (("fig5", "fig5"), ("fig7", "fig7"), ("fig8", "fig8"), ("fig9", "fig9_surface")):
        if (root / f"{table}.csv").exists():
            rows = read(root / f"{table}.csv")
            fig, ax = plt.subplots()
            surface(ax, rows, "d1", "ds", "rate")
            if name == "fig9" and (root / "fig9_locus.csv").exists():
                locus = read(root / "fig9_locus.csv")
                ax.plot([num(r["d1"]) for r in locus], [num(r["ds"]) for r in locus], "w--")
            ax.set_title(f"{name} rate ({unit(root, name)})")
            fig.savefig(out / f"{name}.png", dpi=150)

    print(f"wrote plots to {out}")


if __name__ == "__main__":
    if len(sys.argv) != 2:
        sys.exit(__doc__)
    main(sys.argv[1])
