"""Small helpers shared by the experiment scripts."""
from __future__ import annotations

import argparse
import csv
import json
from dataclasses import asdict, fields
from pathlib import Path


def config_from_args(cls, description: str):
    """Build a dataclass config from --field value flags (defaults from the class)."""
    p = argparse.ArgumentParser(description=description)
    for f in fields(cls):
        default = f.default if not callable(getattr(f, "default_factory", None)) else f.default_factory()
        kind = type(default)
        if kind in (list, tuple):
            p.add_argument(f"--{f.name.replace('_', '-')}", type=lambda s: [float(x) for x in s.split(",")],
                           default=default)
        else:
            p.add_argument(f"--{f.name.replace('_', '-')}", type=kind, default=default)
    return cls(**vars(p.parse_args()))


def write_csv(path: Path, header, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def dump_config(cfg, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "config.json").write_text(json.dumps(asdict(cfg), indent=1))
