"""Report output: canonical JSON, CSV tables, plot data files, PNG figures.

JSON is canonicalized (sorted keys, fixed separators, trailing newline) so
identical configurations produce byte-identical reports.  Figures use the
Agg backend; every run writes its figures next to the delimited output so a
report directory is self-contained: ``report.json``, ``tables/*.csv``,
``plotdata/*.dat``, ``figures/*.png``.
"""

import csv
import json
import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402


def _coerce(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, np.bool_):
        return bool(obj)
    raise TypeError(f"not JSON-serializable: {type(obj).__name__}")


def canonical_json(payload):
    return json.dumps(payload, sort_keys=True, indent=2,
                      separators=(",", ": "), default=_coerce) + "\n"


def write_json(path, payload):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_json(payload))


class Reporter:
    """Collects one CLI run's results and writes the output tree."""

    def __init__(self, outdir, command, version, config_hash, seed,
                 overrides=None, figures=True):
        self.outdir = outdir
        self.figures_enabled = figures
        self.payload = {
            "command": command,
            "version": version,
            "config_hash": config_hash,
            "seed": seed,
            "overrides": overrides or {},
            "results": {},
            "checks": [],
            "files": [],
        }
        os.makedirs(outdir, exist_ok=True)

    def result(self, key, value):
        self.payload["results"][key] = value

    def check(self, name, value, bound, detail=None):
        """Record an assertion `value <= bound`; returns whether it held."""
        passed = bool(value <= bound)
        entry = {"name": name, "value": float(value), "bound": float(bound),
                 "pass": passed}
        if detail:
            entry["detail"] = detail
        self.payload["checks"].append(entry)
        return passed

    def check_that(self, name, passed, detail=None):
        entry = {"name": name, "pass": bool(passed)}
        if detail:
            entry["detail"] = detail
        self.payload["checks"].append(entry)
        return bool(passed)

    def _register(self, path):
        rel = os.path.relpath(path, self.outdir)
        self.payload["files"].append(rel)
        return path

    def _subpath(self, sub, name):
        d = os.path.join(self.outdir, sub)
        os.makedirs(d, exist_ok=True)
        return os.path.join(d, name)

    def table(self, name, header, rows):
        path = self._subpath("tables", f"{name}.csv")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for row in rows:
                w.writerow(row)
        return self._register(path)

    def plotdata(self, name, header, columns):
        """Gnuplot-style whitespace columns with a '#' header line."""
        path = self._subpath("plotdata", f"{name}.dat")
        cols = [np.asarray(c) for c in columns]
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("# " + " ".join(header) + "\n")
            for vals in zip(*cols):
                fh.write(" ".join(f"{v:.12e}" for v in vals) + "\n")
        return self._register(path)

    def figure(self, name, fig):
        if not self.figures_enabled:
            plt.close(fig)
            return None
        path = self._subpath("figures", f"{name}.png")
        fig.savefig(path, dpi=120, bbox_inches="tight")
        plt.close(fig)
        return self._register(path)

    def finish(self):
        """Write report.json; exit code 0 iff every recorded check passed."""
        ok = all(c["pass"] for c in self.payload["checks"])
        self.payload["pass"] = ok
        self.payload["files"].sort()
        write_json(os.path.join(self.outdir, "report.json"), self.payload)
        return 0 if ok else 1


# -- figure builders --------------------------------------------------------

def residual_bars(named_values, title, floor=1e-17):
    """Log-scale bar chart of labelled residuals."""
    names = list(named_values)
    vals = [max(float(named_values[k]), floor) for k in names]
    fig, ax = plt.subplots(figsize=(1.2 + 0.65 * len(names), 3.4))
    ax.bar(range(len(names)), vals, color="#4878cf")
    ax.set_yscale("log")
    ax.set_xticks(range(len(names)))
    ax.set_xticklabels(names, rotation=40, ha="right", fontsize=8)
    ax.set_ylabel("residual")
    ax.set_title(title, fontsize=10)
    ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    return fig


def ladder_plot(ks, residuals_by_K, fitted_p, title):
    """Log-log remainder ladder with fitted decay exponents."""
    fig, ax = plt.subplots(figsize=(4.6, 3.6))
    for K in sorted(residuals_by_K):
        r = np.maximum(np.asarray(residuals_by_K[K], dtype=float), 1e-300)
        p = fitted_p.get(K)
        label = f"K={K}" + (f" (p={p:.2f})" if p is not None else "")
        ax.loglog(ks, r, "o-", label=label)
    ax.set_xlabel("|k|")
    ax.set_ylabel("max |N - sum q|")
    ax.set_title(title, fontsize=10)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


def matrix_heatmaps(named_matrices, title):
    """Magnitude heatmaps of a few small matrices side by side."""
    names = list(named_matrices)
    fig, axes = plt.subplots(1, len(names),
                             figsize=(2.6 * len(names), 2.9), squeeze=False)
    for ax, name in zip(axes[0], names):
        mat = np.abs(np.asarray(named_matrices[name]))
        im = ax.imshow(mat, cmap="viridis")
        ax.set_title(name, fontsize=9)
        ax.set_xticks(range(mat.shape[1]))
        ax.set_yticks(range(mat.shape[0]))
        fig.colorbar(im, ax=ax, fraction=0.046)
    fig.suptitle(title, fontsize=10)
    fig.tight_layout()
    return fig
