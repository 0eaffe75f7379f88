"""Optional on-disk memo of simple-module constructions.

Controlled by the KLR_CACHE_DIR environment variable; content-addressed by
a hash of the Cartan datum, the Q parameters, and the construction label.
Safe to delete at any time.
"""

from __future__ import annotations

import hashlib
import json
import os

from .modules import GradedModule


def _config_key(ctx, label):
    doc = {
        "A": [list(r) for r in ctx.cartan.A],
        "norms": list(ctx.cartan.norms),
        "Q": sorted(
            (f"{i},{j}", sorted((f"{p},{q}", str(c)) for (p, q), c in poly.items()))
            for (i, j), poly in ctx.q.table.items()
        ),
        "label": label,
    }
    return hashlib.sha256(json.dumps(doc, sort_keys=True).encode()).hexdigest()


def cache_dir():
    return os.environ.get("KLR_CACHE_DIR")


def load_module(ctx, label):
    root = cache_dir()
    if not root:
        return None
    path = os.path.join(root, _config_key(ctx, label) + ".json")
    if not os.path.exists(path):
        return None
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return GradedModule.from_json(ctx, json.load(fh))
    except (ValueError, KeyError, OSError):
        return None


def store_module(ctx, label, module: GradedModule):
    root = cache_dir()
    if not root:
        return
    os.makedirs(root, exist_ok=True)
    path = os.path.join(root, _config_key(ctx, label) + ".json")
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(module.to_json(), fh)
    os.replace(tmp, path)
