"""Result persistence: CSV, run manifest, and a standalone plot script."""
import csv
import dataclasses
import io
import json
import os

from .. import __version__
from .config import config_from_dict
from .engine import BerRecord, run_ber_sweep

CSV_COLUMNS = ("scheme", "K", "M", "placement", "radius_m", "trials", "bit_errors", "ber",
               "wilson_lo", "wilson_hi", "seed", "bits_per_slot_per_user")

CSV_NAME = "ber.csv"
MANIFEST_NAME = "manifest.json"
PLOT_NAME = "plot_ber.py"

PLOT_SCRIPT = '''\
"""Plot BER versus antenna count from {csv_name} (log-scale BER axis)."""
import csv
import os
import sys
from collections import defaultdict

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
src = sys.argv[1] if len(sys.argv) > 1 else os.path.join(here, "{csv_name}")
curves = defaultdict(list)
with open(src, newline="") as fh:
    for row in csv.DictReader(fh):
        key = "{{scheme}} K={{K}} {{placement}} {{radius_m}} m".format(**row)
        curves[key].append((int(row["M"]), float(row["ber"]),
                            float(row["wilson_lo"]), float(row["wilson_hi"])))

fig, ax = plt.subplots(figsize=(6, 4))
for label, pts in sorted(curves.items()):
    pts.sort()
    M = [p[0] for p in pts]
    ber = [p[1] for p in pts]
    err = [[p[1] - p[2] for p in pts], [p[3] - p[1] for p in pts]]
    ax.errorbar(M, ber, yerr=err, marker="o", capsize=3, label=label)
ax.set_yscale("log")
ax.set_xlabel("BS antennas M")
ax.set_ylabel("average BER")
ax.grid(True, which="both", alpha=0.3)
ax.legend(fontsize=8)
fig.tight_layout()
out = os.path.splitext(src)[0] + ".png"
fig.savefig(out, dpi=150)
print("wrote", out)
'''


def record_row(rec):
    lo, hi = rec.wilson_ci_95
    return [rec.scheme, rec.K, rec.M, rec.placement, repr(rec.radius_m), rec.trials, rec.bit_errors,
            repr(rec.ber), repr(lo), repr(hi), rec.seed, repr(rec.bits_per_slot_per_user)]


def records_to_csv(records):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for rec in records:
        w.writerow(record_row(rec))
    return buf.getvalue()


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def build_manifest(records, configs):
    """Resolved configs plus the seed and stream layout needed for replay."""
    return {
        "package_version": __version__,
        "stream_key": ["seed", "role", "M", "batch_index"],
        "runs": [cfg.to_dict() for cfg in configs],
        "records": [dataclasses.asdict(r) for r in records],
    }


def emit_outputs(records, path, configs=()):
    """Write the CSV, manifest and plot script into directory ``path``.

    Returns the three file paths.
    """
    records = list(records)
    if not records:
        raise ValueError("refusing to write outputs for an empty record list")
    os.makedirs(path, exist_ok=True)
    csv_path = os.path.join(path, CSV_NAME)
    manifest_path = os.path.join(path, MANIFEST_NAME)
    plot_path = os.path.join(path, PLOT_NAME)
    with open(csv_path, "w", newline="") as fh:
        fh.write(records_to_csv(records))
    with open(manifest_path, "w") as fh:
        json.dump(build_manifest(records, configs), fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(plot_path, "w") as fh:
        fh.write(PLOT_SCRIPT.format(csv_name=CSV_NAME))
    return csv_path, manifest_path, plot_path


def load_manifest_configs(manifest_path):
    with open(manifest_path) as fh:
        manifest = json.load(fh)
    return [config_from_dict(run) for run in manifest["runs"]]


def replay(manifest_path, workers=1):
    """Re-run every configuration recorded in a manifest."""
    records = []
    for cfg in load_manifest_configs(manifest_path):
        records.extend(run_ber_sweep(cfg, workers=workers))
    return records


def records_from_manifest(manifest_path):
    with open(manifest_path) as fh:
        manifest = json.load(fh)
    out = []
    for r in manifest["records"]:
        r = dict(r)
        r["wilson_ci_95"] = tuple(r["wilson_ci_95"])
        out.append(BerRecord(**r))
    return out
