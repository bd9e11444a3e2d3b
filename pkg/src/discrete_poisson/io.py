"""JSON serialization of tessellations and contact elements.

Floats are written with Python's shortest round-trip ``repr``, so a
write/read cycle reproduces every coordinate bit for bit.
"""
from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .geometry.contacts import Contacts, extract_contacts
from .geometry.domain import DomainBox
from .geometry.tessellation import Kind, Tessellation

FORMAT_VERSION = 1
_REQUIRED = {"version", "dim", "domain", "seed", "kind", "nodes", "vertices", "bodies"}
_OPTIONAL = {"l_min", "meta", "contacts"}


class FormatError(ValueError):
    pass


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def contacts_to_list(contacts: Contacts) -> list[dict]:
    return [{"a": int(contacts.a[i]), "b": int(contacts.b[i]), "A": float(contacts.A[i]),
             "l": float(contacts.l[i]), "n": contacts.n[i].tolist(), "t": contacts.t[i].tolist(),
             "c": contacts.c[i].tolist(), "chi": float(contacts.chi[i])} for i in range(len(contacts))]


def tessellation_to_dict(t: Tessellation, contacts: Contacts | None = None) -> dict:
    bodies = []
    for i, polys in enumerate(t.bodies):
        if t.kind in (Kind.VORONOI, Kind.RANDOMIZED_VORONOI):
            if len(polys) != 1:
                raise FormatError(f"body {i} of a Voronoi tessellation must be a single polygon")
            bodies.append({"node_id": i, "polygon": polys[0].tolist()})
        else:
            bodies.append({"node_id": i, "triangles": [p.tolist() for p in polys]})
    out = {
        "version": FORMAT_VERSION,
        "dim": 2,
        "domain": {"min": list(t.domain.min_corner), "max": list(t.domain.max_corner)},
        "seed": t.seed,
        "kind": t.kind.value,
        "l_min": t.l_min,
        "meta": _plain(t.meta),
        "nodes": t.nodes.tolist(),
        "vertices": t.vertices.tolist(),
        "bodies": bodies,
    }
    if contacts is not None:
        out["contacts"] = contacts_to_list(contacts)
    return out


def dumps(obj) -> str:
    return json.dumps(_plain(obj), separators=(",", ":"), allow_nan=False) + "\n"


def atomic_write(path: str | os.PathLike, text: str) -> None:
    """Write ``text`` to ``path`` via a temporary file so no partial file is ever left behind."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_tessellation(path, t: Tessellation, contacts: Contacts | None = None) -> None:
    atomic_write(path, dumps(tessellation_to_dict(t, contacts)))


def _array(value, name: str, width: int) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.size == 0:
        arr = arr.reshape(0, width)
    if arr.ndim != 2 or arr.shape[1] != width or not np.all(np.isfinite(arr)):
        raise FormatError(f"'{name}' must be a list of finite {width}-vectors")
    return arr


def tessellation_from_dict(data: dict) -> tuple[Tessellation, Contacts | None]:
    """Rebuild a tessellation; stored contacts are returned when present."""
    if not isinstance(data, dict):
        raise FormatError("tessellation file must hold a JSON object")
    missing = _REQUIRED - data.keys()
    if missing:
        raise FormatError(f"missing keys: {sorted(missing)}")
    unknown = data.keys() - _REQUIRED - _OPTIONAL
    if unknown:
        raise FormatError(f"unknown keys: {sorted(unknown)}")
    if data["version"] != FORMAT_VERSION:
        raise FormatError(f"unsupported version {data['version']}")
    if data["dim"] != 2:
        raise FormatError("only two-dimensional tessellations are supported")
    try:
        domain = DomainBox(tuple(data["domain"]["min"]), tuple(data["domain"]["max"]))
        domain.validate()
        kind = Kind(data["kind"])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"invalid domain or kind: {exc}") from exc
    nodes = _array(data["nodes"], "nodes", 2)
    vertices = _array(data["vertices"], "vertices", 2)
    bodies: list[list[np.ndarray]] = [[] for _ in range(len(nodes))]
    for entry in data["bodies"]:
        i = entry.get("node_id")
        if not isinstance(i, int) or not 0 <= i < len(nodes) or bodies[i]:
            raise FormatError(f"invalid or duplicate body node_id {i!r}")
        loops = [entry["polygon"]] if "polygon" in entry else entry.get("triangles")
        if not loops:
            raise FormatError(f"body {i} has neither 'polygon' nor 'triangles'")
        for loop in loops:
            ids = np.asarray(loop, dtype=np.int64)
            if ids.ndim != 1 or len(ids) < 3 or ids.min() < 0 or ids.max() >= len(vertices):
                raise FormatError(f"body {i} references invalid vertices")
            bodies[i].append(ids)
    if any(not b for b in bodies):
        raise FormatError("every node needs a body")
    seed = data["seed"]
    t = Tessellation(domain, nodes, vertices, bodies, kind, seed, float(data.get("l_min", 1.0)),
                     dict(data.get("meta", {})))
    contacts = None
    if "contacts" in data:
        contacts = _contacts_from_list(data["contacts"], t)
    return t, contacts


def _contacts_from_list(items: list[dict], t: Tessellation) -> Contacts:
    # boundary faces and face ids are not stored; recover them from the geometry
    ref = extract_contacts(t)
    if len(items) != len(ref):
        raise FormatError("stored contacts do not match the tessellation")
    try:
        a = np.array([e["a"] for e in items], dtype=np.int64)
        b = np.array([e["b"] for e in items], dtype=np.int64)
        fields = {k: np.array([e[k] for e in items], dtype=float) for k in ("A", "l", "chi")}
        vecs = {k: _array([e[k] for e in items], k, 2) for k in ("n", "t", "c")}
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed contact entry: {exc}") from exc
    if not (np.array_equal(a, ref.a) and np.array_equal(b, ref.b)):
        raise FormatError("stored contacts do not match the tessellation")
    return Contacts(a, b, fields["A"], fields["l"], vecs["n"], vecs["t"], vecs["c"], fields["chi"],
                    ref.face, ref.boundary_owner, ref.boundary_A, ref.boundary_n, ref.boundary_c)


def read_tessellation(path) -> tuple[Tessellation, Contacts | None]:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: not valid JSON ({exc})") from exc
    return tessellation_from_dict(data)
