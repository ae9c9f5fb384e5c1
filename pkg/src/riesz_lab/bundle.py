"""Output bundles: ``spec.json``, ``coeffs_depth_k.csv``, ``certificates.json`` and extras."""
from __future__ import annotations

import json
import os
import re
import shutil
from pathlib import Path

from .certificates import Certificate
from .core_fourier import TrigPoly

SPEC_FILE = "spec.json"
CERT_FILE = "certificates.json"
COEFF_RE = re.compile(r"coeffs_depth_(\d+)\.csv$")


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_bundle(out_dir: str | Path, spec: dict, polys: list[TrigPoly],
                 certs: list[Certificate], extras: dict[str, str] | None = None) -> Path:
    """Write into a sibling temporary directory, then move it into place."""
    out = Path(out_dir)
    tmp = out.with_name(out.name + f".tmp-{os.getpid()}")
    if tmp.exists():
        shutil.rmtree(tmp)
    tmp.mkdir(parents=True)
    (tmp / SPEC_FILE).write_text(dumps(spec), encoding="utf-8")
    for k, p in enumerate(polys, start=1):
        (tmp / f"coeffs_depth_{k}.csv").write_text(p.to_csv(), encoding="utf-8")
    (tmp / CERT_FILE).write_text(dumps([c.to_dict() for c in certs]), encoding="utf-8")
    for name, text in (extras or {}).items():
        (tmp / name).write_text(text, encoding="utf-8")
    if out.exists():
        shutil.rmtree(out)
    os.replace(tmp, out)
    return out


def read_bundle(path: str | Path) -> tuple[dict, list[TrigPoly], list[Certificate]]:
    root = Path(path)
    spec = json.loads((root / SPEC_FILE).read_text(encoding="utf-8"))
    files = sorted((int(m.group(1)), f) for f in root.iterdir() if (m := COEFF_RE.match(f.name)))
    if [k for k, _ in files] != list(range(1, len(files) + 1)):
        raise ValueError("coefficient files must be numbered 1..n without gaps")
    polys = [TrigPoly.from_csv(f.read_text(encoding="utf-8")) for _, f in files]
    certs = [Certificate.from_dict(d) for d in json.loads((root / CERT_FILE).read_text(encoding="utf-8"))]
    return spec, polys, certs
