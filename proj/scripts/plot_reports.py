#!/usr/bin/env python3
# Copyright 2026 The bsdp Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Render bsdp experiment reports (JSON) as PNG figures."""

import argparse
import json
import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def cell_title(params, keys=("M", "N", "d")):
    return ", ".join(f"{k}={int(params[k])}" for k in keys if k in params)


def plot_seed_scan(report, ax):
    for cell in report["cells"]:
        ax.step(range(len(cell["series"]["label"])), cell["series"]["label"], where="post",
                label=cell_title(cell["params"], ("d",)))
    ax.set_xlabel("seed index")
    ax.set_ylabel("most probable bin")
    ax.legend()


def plot_bin_fraction(report, ax):
    for cell in report["cells"]:
        s = cell["series"]
        ax.errorbar(range(len(s["mean_fraction"])), s["mean_fraction"], yerr=s["std_fraction"],
                    marker="o", capsize=3, label=cell_title(cell["params"]))
    ax.set_xlabel("bin label")
    ax.set_ylabel("fraction of seeds")
    ax.legend(fontsize="small", ncol=2)


def plot_pmax_histogram(report, ax):
    for cell in report["cells"]:
        s = cell["series"]
        ax.plot(s["p_lower"], s["mean_fraction"], drawstyle="steps-post",
                label=cell_title(cell["params"]))
    ax.set_xlabel("largest bin probability")
    ax.set_ylabel("fraction of seeds")
    ax.legend(fontsize="small")


def plot_gap(report, ax):
    for cell in report["cells"]:
        s = cell["series"]
        ax.errorbar(s["epsilon"], s["mean_fraction"], yerr=s["std_fraction"], marker="o",
                    capsize=3, label=cell_title(cell["params"]))
    ax.set_xlabel("epsilon")
    ax.set_ylabel("fraction of seeds with gap <= epsilon")
    ax.legend(fontsize="small")


def plot_collision(report, ax):
    names = {1: "fermion", 2: "distinguishable"}
    series = {}
    for cell in report["cells"]:
        p = cell["params"]
        if "space_size" not in p:
            continue
        key = (int(p["statistics"]), int(p["d"]))
        series.setdefault(key, []).append((p["space_size"], cell["values"]["p_col_mean"],
                                           cell["values"]["p_col_std"]))
    for (stats, d), points in sorted(series.items()):
        points.sort()
        ax.errorbar([x for x, _, _ in points], [y for _, y, _ in points],
                    yerr=[e for _, _, e in points], marker="o", capsize=3,
                    label=f"{names.get(stats, stats)}, d={d}")
    ax.set_xscale("log")
    ax.set_xlabel("|S|")
    ax.set_ylabel("p_col")
    ax.legend(fontsize="small", ncol=2)


def plot_maxprob(report, ax):
    cells = [c for c in report["cells"] if "space_size" in c["params"]]
    xs = [c["params"]["space_size"] for c in cells]
    ys = [c["values"]["max_probability_mean"] for c in cells]
    es = [c["values"]["max_probability_std_over_seeds"] for c in cells]
    ax.errorbar(xs, ys, yerr=es, fmt="o", capsize=3)
    fit = next((c["values"] for c in report["cells"] if "exponent" in c["values"]), None)
    if fit:
        grid = sorted(xs)
        ax.plot(grid, [fit["prefactor"] * x ** fit["exponent"] for x in grid],
                label=f"{fit['prefactor']:.2f} |S|^{fit['exponent']:.2f}")
        ax.legend()
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("|S|")
    ax.set_ylabel("largest outcome probability")


def plot_ryser(report, ax):
    cells = [c for c in report["cells"] if "n" in c["params"]]
    ax.semilogy([c["params"]["n"] for c in cells], [c["values"]["median_seconds"] for c in cells],
                marker="o")
    ax.set_xlabel("matrix size n")
    ax.set_ylabel("seconds per permanent")


PLOTTERS = {
    "seed_scan": plot_seed_scan,
    "bin_fraction": plot_bin_fraction,
    "pmax_histogram": plot_pmax_histogram,
    "gap": plot_gap,
    "collision": plot_collision,
    "maxprob": plot_maxprob,
    "ryser": plot_ryser,
}


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("reports", nargs="+", type=pathlib.Path, help="report JSON files")
    parser.add_argument("--out-dir", type=pathlib.Path, default=None,
                        help="directory for PNG files (default: next to each report)")
    args = parser.parse_args()
    for path in args.reports:
        report = json.loads(path.read_text())
        plotter = PLOTTERS.get(report["id"])
        if plotter is None:
            print(f"skipping {path}: unknown experiment {report['id']!r}")
            continue
        fig, ax = plt.subplots(figsize=(7, 4.5))
        plotter(report, ax)
        ax.set_title(f"{report['id']} (master seed {report['config']['master_seed']})")
        fig.tight_layout()
        out_dir = args.out_dir or path.parent
        out_dir.mkdir(parents=True, exist_ok=True)
        out = out_dir / f"{path.stem}.png"
        fig.savefig(out, dpi=120)
        plt.close(fig)
        print(f"wrote {out}")


if __name__ == "__main__":
    main()
