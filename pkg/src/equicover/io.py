"""JSON files for covers and verification reports.

Spiral covers are stored as {"apex", "p", "q", "rays", "pieces"} with each
piece given by its start and sweep. Multi-apex covers add an "apex" to every
piece, plus the two winding families they were built from.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .errors import EquicoverError
from .geometry import Line, Wedge, as_point
from .nonspiral import Family, GeneralCover
from .spiral import CoverParams, FanConstruction, Orbit, SpiralCover


class CoverFormatError(EquicoverError, ValueError):
    pass


def _line(line: Line) -> dict:
    return {"point": list(line.point), "angle": line.angle}


def cover_to_dict(cover) -> dict:
    if isinstance(cover, SpiralCover):
        rays = cover.fan.ray_angles if cover.fan is not None else cover.rays
        return {
            "kind": "spiral",
            "apex": list(cover.apex),
            "p": cover.params.p,
            "q": cover.params.q,
            "orbit": cover.orbit_tag.value,
            "rays": [float(r) for r in rays],
            "pieces": [{"start": w.start, "sweep": w.sweep} for w in cover.pieces],
        }
    if isinstance(cover, GeneralCover):
        owner = {}
        for f in cover.families:
            for w in f.pieces:
                owner[id(w)] = f.name
        return {
            "kind": "general",
            "p": cover.target_multiplicity,
            "q": len(cover.pieces),
            "target_multiplicity": cover.target_multiplicity,
            "target_measure": str(cover.target_measure),
            "hline": _line(cover.hline) if cover.hline is not None else None,
            "hline_angle": cover.hline_angle,
            "families": [
                {"name": f.name, "center": list(f.center), "cross": _line(f.cross), "rays": list(f.rays)}
                for f in cover.families
            ],
            "pieces": [
                {"apex": list(w.apex), "start": w.start, "sweep": w.sweep, "family": owner.get(id(w))}
                for w in cover.pieces
            ],
        }
    raise TypeError(f"not a cover: {type(cover).__name__}")


def _spiral_from_dict(d: dict) -> SpiralCover:
    params = CoverParams(int(d["p"]), int(d["q"]))
    apex = as_point(d["apex"])
    pieces = tuple(Wedge(apex, float(pc["start"]), float(pc["sweep"])) for pc in d["pieces"])
    rays = tuple(float(r) for r in d.get("rays", ()))
    fan = FanConstruction(apex, rays, 1.0 / len(rays)) if rays else None
    return SpiralCover(params, apex, pieces, Orbit(d.get("orbit", Orbit.SINGLE.value)), fan)


def _general_from_dict(d: dict) -> GeneralCover:
    pieces = tuple(Wedge(as_point(pc["apex"]), float(pc["start"]), float(pc["sweep"])) for pc in d["pieces"])
    families = []
    for f in d.get("families", []):
        members = tuple(w for w, pc in zip(pieces, d["pieces"]) if pc.get("family") == f["name"])
        cross = Line(as_point(f["cross"]["point"]), float(f["cross"]["angle"]))
        families.append(Family(f["name"], as_point(f["center"]), cross, tuple(f["rays"]), members))
    hline = d.get("hline")
    return GeneralCover(
        pieces,
        int(d["target_multiplicity"]),
        Fraction(d["target_measure"]),
        Line(as_point(hline["point"]), float(hline["angle"])) if hline else None,
        float(d.get("hline_angle", 0.0)),
        tuple(families),
    )


def cover_from_dict(d: dict):
    try:
        kind = d.get("kind") or ("general" if "apex" in d["pieces"][0] else "spiral")
        if kind == "spiral":
            return _spiral_from_dict(d)
        if kind == "general":
            return _general_from_dict(d)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise CoverFormatError(f"malformed cover document: {exc}") from exc
    raise CoverFormatError(f"unknown cover kind {kind!r}")


def save_cover(cover, path) -> None:
    Path(path).write_text(json.dumps(cover_to_dict(cover), indent=2) + "\n")


def load_cover(path):
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise CoverFormatError(f"{path}: {exc}") from exc
    return cover_from_dict(data)


def dump_json(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True, default=str)
