"""End-to-end checks of the tiltpump command line.

usage: smoke_test.py <tiltpump binary> <summary schema>
"""

import csv
import json
import os
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema

BIN = sys.argv[1]
SCHEMA = json.loads(Path(sys.argv[2]).read_text())

SCAN = """
[scenario]
name = "smoke"
kind = "drift_scan"

[model]
ratio = "10/3"

[run]
k_points = 8
points_per_cycle = 512
"""


def run(*args, env=None, check=True):
    p = subprocess.run([BIN, *args], capture_output=True, text=True, env=env)
    if check and p.returncode != 0:
        raise SystemExit(f"{args} exited {p.returncode}\n{p.stdout}\n{p.stderr}")
    return p


def validate_run(directory):
    summary = json.loads((directory / "summary.json").read_text())
    jsonschema.validate(summary, SCHEMA)
    for variant in summary["variants"]:
        for f in variant["files"]:
            with open(directory / f["path"], newline="") as fh:
                rows = list(csv.reader(fh))
            assert rows[0] == f["columns"], (f["path"], rows[0])
            assert len(rows) - 1 == f["rows"], f["path"]
        for key, s in variant["scalars"].items():
            assert (directory / s["source"]).exists(), key
    return summary


def csv_bytes(directory):
    return {p.name: p.read_bytes() for p in sorted(directory.glob("*.csv"))}


def main():
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        config = tmp / "scan.toml"
        config.write_text(SCAN)

        run("run", str(config), "--out", str(tmp / "a"))
        summary = validate_run(tmp / "a")
        dev = summary["variants"][0]["scalars"]["max_deviation_from_chern"]["value"]
        assert abs(dev) < 1e-3, dev

        run("run", str(config), "--out", str(tmp / "b"), "--threads", "2")
        assert csv_bytes(tmp / "a") == csv_bytes(tmp / "b"), "runs differ"

        env = dict(os.environ, TILTPUMP_OUTPUT_ROOT=str(tmp / "root"))
        run("run", str(config), "--set", "run.k_points=4", env=env)
        validate_run(tmp / "root" / "smoke")

        names = run("list-presets").stdout.split()
        for preset in ("fig2c", "fig3", "fig4", "figS2", "figS4", "figS5", "figS7", "figS8", "appE"):
            assert preset in names, preset
            dumped = tmp / f"{preset}.toml"
            dumped.write_text(run("preset", preset, "--dump").stdout)
            again = run("preset", preset, "--dump").stdout
            assert dumped.read_text() == again

        run("preset", "figS4", "--set", "run.cycles=5", "--out", str(tmp / "s4"))
        validate_run(tmp / "s4")

        empty = tmp / "empty.toml"
        empty.write_text("")
        p = run("run", str(empty), "--out", str(tmp / "empty"), check=False)
        assert p.returncode == 2, p.returncode
        assert not (tmp / "empty").exists()

        p = run("run", str(config), "--set", "model.omega=0", "--out", str(tmp / "bad"), check=False)
        assert p.returncode == 2 and "omega" in p.stderr, p.stderr
        assert not (tmp / "bad").exists()

        p = run("preset", "nope", check=False)
        assert p.returncode == 2


if __name__ == "__main__":
    main()
    print("cli smoke test passed")
