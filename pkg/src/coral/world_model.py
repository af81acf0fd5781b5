"""Belief state over object physical parameters, and its refinement.

The controller plans against *believed* masses and frictions while the
evaluation world runs the ground truth; the gap between the two is what
the outer adaptation loop closes.  Beliefs are immutable values: every
update returns a new ``WorldBelief``.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field, replace

logger = logging.getLogger(__name__)

MASS_CLAMP = (0.01, 50.0)
FRICTION_CLAMP = (0.01, 2.0)

PRIOR = "prior"


class BeliefError(ValueError):
    """Structural or domain error in belief construction."""


def wrap_angle(a: float) -> float:
    """Normalize an angle to (-pi, pi]."""
    a = math.fmod(a, 2.0 * math.pi)
    if a <= -math.pi:
        a += 2.0 * math.pi
    elif a > math.pi:
        a -= 2.0 * math.pi
    return a


@dataclass(frozen=True)
class ObjectBelief:
    """Believed physical state of one rigid object.

    ``pose`` is planar (x, z, rotation) with z up; ``provenance`` is
    ``"prior"`` or ``"refined:<cycle>"``.
    """

    label: str
    pose: tuple[float, float, float]
    mass: float
    friction: float
    half_extents: tuple[float, float]
    provenance: str = PRIOR

    def __post_init__(self) -> None:
        if self.mass <= 0.0:
            raise BeliefError(f"{self.label}: mass must be > 0, got {self.mass}")
        if self.friction < 0.0:
            raise BeliefError(f"{self.label}: friction must be >= 0, got {self.friction}")
        if self.half_extents[0] <= 0.0 or self.half_extents[1] <= 0.0:
            raise BeliefError(f"{self.label}: half_extents must be > 0, got {self.half_extents}")
        object.__setattr__(
            self,
            "pose",
            (float(self.pose[0]), float(self.pose[1]), wrap_angle(float(self.pose[2]))),
        )


@dataclass(frozen=True)
class Fixtures:
    """Static scene geometry shared by both worlds."""

    table_edge_x: float = math.inf
    wall_x: float | None = None
    gravity: float = 9.81


@dataclass(frozen=True)
class WorldBelief:
    objects: dict[str, ObjectBelief] = field(default_factory=dict)
    fixtures: Fixtures = field(default_factory=Fixtures)

    def __post_init__(self) -> None:
        for label, obj in self.objects.items():
            if label != obj.label:
                raise BeliefError(f"object keyed {label!r} carries label {obj.label!r}")

    def require(self, label: str) -> ObjectBelief:
        try:
            return self.objects[label]
        except KeyError:
            raise BeliefError(f"unknown object label {label!r}") from None

    def with_poses(self, poses: dict[str, tuple[float, float, float]]) -> WorldBelief:
        """New belief with the given poses swapped in (params untouched)."""
        objects = dict(self.objects)
        for label, pose in poses.items():
            objects[label] = replace(self.require(label), pose=tuple(pose))
        return WorldBelief(objects=objects, fixtures=self.fixtures)


def init_belief(prior: WorldBelief, bias: dict[str, dict[str, float]] | None = None) -> WorldBelief:
    """Scale a ground-truth prior into an (intentionally wrong) belief.

    ``bias`` maps label -> {"mass": factor, "friction": factor}; missing
    entries default to 1.0.  Models an erroneous semantic prior.
    """
    bias = bias or {}
    for label, factors in bias.items():
        for name, f in factors.items():
            if name not in ("mass", "friction"):
                raise BeliefError(f"unknown bias field {name!r} for {label!r}")
            if f <= 0.0:
                raise BeliefError(f"bias factor for {label}.{name} must be > 0, got {f}")
    objects = {}
    for label, obj in prior.objects.items():
        factors = bias.get(label, {})
        objects[label] = replace(
            obj,
            mass=obj.mass * factors.get("mass", 1.0),
            friction=obj.friction * factors.get("friction", 1.0),
            provenance=PRIOR,
        )
    return WorldBelief(objects=objects, fixtures=prior.fixtures)


def _clamped(label: str, name: str, value: float, lo: float, hi: float) -> float:
    if value < lo or value > hi:
        clamped = min(max(value, lo), hi)
        logger.warning("refinement for %s.%s=%.4g outside [%g, %g]; clamped to %.4g",
                       label, name, value, lo, hi, clamped)
        return clamped
    return float(value)


def apply_refinement(belief: WorldBelief, update: dict[str, dict[str, float]],
                     cycle: int = 0) -> WorldBelief:
    """Apply a per-object {mass?, friction?} update, clamping out-of-range values.

    Unknown labels are skipped with a warning; strategist output must never
    crash the loop.  Untouched fields are preserved and provenance becomes
    ``refined:<cycle>``.
    """
    objects = dict(belief.objects)
    for label, fields_update in update.items():
        if label not in objects:
            logger.warning("refinement references unknown label %r; ignored", label)
            continue
        obj = objects[label]
        mass = obj.mass
        friction = obj.friction
        if "mass" in fields_update and fields_update["mass"] is not None:
            mass = _clamped(label, "mass", float(fields_update["mass"]), *MASS_CLAMP)
        if "friction" in fields_update and fields_update["friction"] is not None:
            friction = _clamped(label, "friction", float(fields_update["friction"]), *FRICTION_CLAMP)
        objects[label] = replace(obj, mass=mass, friction=friction, provenance=f"refined:{cycle}")
    return WorldBelief(objects=objects, fixtures=belief.fixtures)


def belief_divergence(belief: WorldBelief, truth: WorldBelief) -> dict[str, dict[str, object]]:
    """Signed per-object differences (belief minus truth)."""
    if set(belief.objects) != set(truth.objects):
        raise BeliefError(
            f"label sets differ: {sorted(belief.objects)} vs {sorted(truth.objects)}")
    out: dict[str, dict[str, object]] = {}
    for label, b in belief.objects.items():
        t = truth.objects[label]
        out[label] = {
            "mass": b.mass - t.mass,
            "friction": b.friction - t.friction,
            "pose": (
                b.pose[0] - t.pose[0],
                b.pose[1] - t.pose[1],
                wrap_angle(b.pose[2] - t.pose[2]),
            ),
        }
    return out


# --- serialization ------------------------------------------------------
# Per-object wire shape used verbatim inside strategist prompts:
#   {"<label>": {"pose_estimated": [...], "mass_kg": n, "friction_coeff": n, ...}}

def objects_to_json(belief: WorldBelief) -> dict[str, dict[str, object]]:
    return {
        label: {
            "pose_estimated": list(obj.pose),
            "mass_kg": obj.mass,
            "friction_coeff": obj.friction,
            "half_extents": list(obj.half_extents),
            "provenance": obj.provenance,
        }
        for label, obj in belief.objects.items()
    }


def belief_to_json(belief: WorldBelief) -> dict[str, object]:
    wall = belief.fixtures.wall_x
    edge = belief.fixtures.table_edge_x
    return {
        "objects": objects_to_json(belief),
        "fixtures": {
            "table_edge_x": None if math.isinf(edge) else edge,
            "wall_x": wall,
            "gravity": belief.fixtures.gravity,
        },
    }


def belief_from_json(doc: dict[str, object]) -> WorldBelief:
    fx = doc.get("fixtures", {})
    edge = fx.get("table_edge_x")
    fixtures = Fixtures(
        table_edge_x=math.inf if edge is None else float(edge),
        wall_x=None if fx.get("wall_x") is None else float(fx["wall_x"]),
        gravity=float(fx.get("gravity", 9.81)),
    )
    objects = {}
    for label, o in doc.get("objects", {}).items():
        objects[label] = ObjectBelief(
            label=label,
            pose=tuple(o["pose_estimated"]),
            mass=float(o["mass_kg"]),
            friction=float(o["friction_coeff"]),
            half_extents=tuple(o["half_extents"]),
            provenance=str(o.get("provenance", PRIOR)),
        )
    return WorldBelief(objects=objects, fixtures=fixtures)


def belief_dumps(belief: WorldBelief) -> str:
    return json.dumps(belief_to_json(belief), sort_keys=True)
