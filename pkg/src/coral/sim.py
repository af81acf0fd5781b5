"""Deterministic 2D vertical-plane rigid-body simulator.

One simulator plays two roles: parameterized by a belief it is the
planning world the optimizer rolls out in; parameterized by ground truth
it is the evaluation world actions execute in.

Everything is batched: every state array has a leading batch axis, and a
"single" world is just batch size 1.  The contact kernel loops over the
fixed corner/object axes (never the batch axis), so stepping a batch of
forks is bit-identical to stepping each fork alone.

Model: rectangles in the x-z plane (z up) under gravity, penalty
(spring-damper) contacts with Coulomb friction between finger-object,
object-ground and object-wall.  The ground is supported only for
x <= table_edge_x, so objects pushed past the edge tip and fall.  The
finger is a kinematic disk tracking commanded displacement through a
first-order lag; it pushes objects but is never pushed back.  Friction
and contact damping are clamped to the exact per-contact stopping impulse
(effective-mass form), which keeps the explicit integrator stable at
desk-scale stiffness and guarantees |F_t| <= mu * F_n at every contact.

Controls are finger displacement commands (dx, dz) in meters per
*control period* (``control_substeps`` physics steps); ``step`` advances
one physics step of ``dt`` and moves the commanded target by
u / control_substeps.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field, replace

import numpy as np

from .world_model import WorldBelief

CORNER_SIGNS = np.array(
    [[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]], dtype=np.float64
)


@dataclass(frozen=True)
class GraspRule:
    """When the finger may rigidly attach to an object's handle point."""

    object: str
    handle_local: tuple[float, float]
    attach_distance: float = 0.015
    require_overhang: bool = False
    tau_grasp: float = 0.06
    eps_v: float = 0.01


@dataclass(frozen=True)
class SimConfig:
    dt: float = 0.01
    stiffness: float = 5e3
    damping: float = 50.0
    control_substeps: int = 10
    finger_radius: float = 0.01
    finger_tau: float = 0.02
    u_max: float = 0.05
    noise_std: tuple[float, ...] = (0.0,) * 6  # per object: x z rot vx vz w
    seed: int = 0
    grasp: GraspRule | None = None

    def __post_init__(self) -> None:
        if self.dt <= 0.0:
            raise ValueError("dt must be > 0")
        if self.stiffness <= 0.0:
            raise ValueError("stiffness must be > 0")


@dataclass
class SimState:
    """Batched world state.  All arrays share leading batch dim B."""

    labels: tuple[str, ...]
    finger_pos: np.ndarray          # (B, 2)
    finger_tgt: np.ndarray          # (B, 2)
    finger_vel: np.ndarray          # (B, 2)
    poses: np.ndarray               # (B, N, 3)  x, z, rot
    vels: np.ndarray                # (B, N, 2)
    angvels: np.ndarray             # (B, N)
    attached: np.ndarray            # (B,) int8, object index or -1
    attach_offset: np.ndarray       # (B, 2)
    attach_rot: np.ndarray          # (B,)
    finger_force: np.ndarray        # (B, N, 2)  reaction force on finger
    ground_fn: np.ndarray           # (B, N, 4)
    ground_ft: np.ndarray           # (B, N, 4)
    wall_fn: np.ndarray             # (B, N, 4)
    wall_ft: np.ndarray             # (B, N, 4)
    finger_fn: np.ndarray           # (B, N)
    finger_ft: np.ndarray           # (B, N)
    t: float = 0.0
    rng: np.random.Generator | None = None

    @property
    def batch(self) -> int:
        return self.finger_pos.shape[0]

    @property
    def n_objects(self) -> int:
        return len(self.labels)

    def index_of(self, label: str) -> int:
        return self.labels.index(label)

    def finger_force_mag(self) -> np.ndarray:
        """Total contact-force magnitude on the finger, (B,)."""
        total = self.finger_force.sum(axis=1)
        return np.hypot(total[:, 0], total[:, 1])


def make_state(labels: tuple[str, ...], finger_start: tuple[float, float],
               poses: np.ndarray, batch: int = 1,
               rng: np.random.Generator | None = None) -> SimState:
    n = len(labels)
    poses = np.asarray(poses, dtype=np.float64).reshape(1, n, 3)
    f0 = np.asarray(finger_start, dtype=np.float64).reshape(1, 2)
    return SimState(
        labels=tuple(labels),
        finger_pos=np.repeat(f0, batch, axis=0),
        finger_tgt=np.repeat(f0, batch, axis=0),
        finger_vel=np.zeros((batch, 2)),
        poses=np.repeat(poses, batch, axis=0),
        vels=np.zeros((batch, n, 2)),
        angvels=np.zeros((batch, n)),
        attached=np.full(batch, -1, dtype=np.int8),
        attach_offset=np.zeros((batch, 2)),
        attach_rot=np.zeros(batch),
        finger_force=np.zeros((batch, n, 2)),
        ground_fn=np.zeros((batch, n, 4)),
        ground_ft=np.zeros((batch, n, 4)),
        wall_fn=np.zeros((batch, n, 4)),
        wall_ft=np.zeros((batch, n, 4)),
        finger_fn=np.zeros((batch, n)),
        finger_ft=np.zeros((batch, n)),
        t=0.0,
        rng=rng,
    )


def fork(state: SimState) -> SimState:
    """Deep, independent copy; stepping the fork never touches the source."""
    return SimState(
        labels=state.labels,
        finger_pos=state.finger_pos.copy(),
        finger_tgt=state.finger_tgt.copy(),
        finger_vel=state.finger_vel.copy(),
        poses=state.poses.copy(),
        vels=state.vels.copy(),
        angvels=state.angvels.copy(),
        attached=state.attached.copy(),
        attach_offset=state.attach_offset.copy(),
        attach_rot=state.attach_rot.copy(),
        finger_force=state.finger_force.copy(),
        ground_fn=state.ground_fn.copy(),
        ground_ft=state.ground_ft.copy(),
        wall_fn=state.wall_fn.copy(),
        wall_ft=state.wall_ft.copy(),
        t=state.t,
        rng=copy.deepcopy(state.rng),
    )


def fork_many(state: SimState, batch: int) -> SimState:
    """Tile a single world into an independent batch (planning rollouts).

    Rollout worlds are noise-free: the fork drops the RNG so planning
    dynamics stay deterministic regardless of evaluation-world noise.
    """
    if state.batch != 1:
        raise ValueError("fork_many expects a single-world state")
    rep = lambda a: np.repeat(a, batch, axis=0)
    return SimState(
        labels=state.labels,
        finger_pos=rep(state.finger_pos),
        finger_tgt=rep(state.finger_tgt),
        finger_vel=rep(state.finger_vel),
        poses=rep(state.poses),
        vels=rep(state.vels),
        angvels=rep(state.angvels),
        attached=rep(state.attached),
        attach_offset=rep(state.attach_offset),
        attach_rot=rep(state.attach_rot),
        finger_force=rep(state.finger_force),
        ground_fn=rep(state.ground_fn),
        ground_ft=rep(state.ground_ft),
        wall_fn=rep(state.wall_fn),
        wall_ft=rep(state.wall_ft),
        t=state.t,
        rng=None,
    )


@dataclass(frozen=True)
class SimParams:
    """Belief compiled to arrays for the step kernel."""

    labels: tuple[str, ...]
    mass: np.ndarray          # (N,)
    friction: np.ndarray      # (N,)
    half_extents: np.ndarray  # (N, 2)
    inertia: np.ndarray       # (N,)
    table_edge: float
    wall_x: float
    gravity: float


def compile_params(belief: WorldBelief, labels: tuple[str, ...]) -> SimParams:
    mass = np.array([belief.require(l).mass for l in labels])
    friction = np.array([belief.require(l).friction for l in labels])
    he = np.array([belief.require(l).half_extents for l in labels])
    # rectangle about its center: I = m * ((2hx)^2 + (2hz)^2) / 12
    inertia = mass * ((2 * he[:, 0]) ** 2 + (2 * he[:, 1]) ** 2) / 12.0
    fx = belief.fixtures
    return SimParams(
        labels=tuple(labels),
        mass=mass,
        friction=friction,
        half_extents=he,
        inertia=inertia,
        table_edge=fx.table_edge_x,
        wall_x=np.inf if fx.wall_x is None else fx.wall_x,
        gravity=fx.gravity,
    )


def _as_params(params: WorldBelief | SimParams, labels: tuple[str, ...]) -> SimParams:
    if isinstance(params, SimParams):
        return params
    return compile_params(params, labels)


def wrap_angles(a: np.ndarray) -> np.ndarray:
    """Vectorized normalization to (-pi, pi]."""
    return np.mod(a - np.pi, -2.0 * np.pi) + np.pi


def _perp(v: np.ndarray) -> np.ndarray:
    """90-degree CCW rotation of the last axis (x, z) -> (-z, x)."""
    return np.stack([-v[..., 1], v[..., 0]], axis=-1)


def step_inplace(state: SimState, u: np.ndarray,
                 params: WorldBelief | SimParams, cfg: SimConfig) -> SimState:
    """Advance the batch by one physics step of cfg.dt.  Mutates state."""
    p = _as_params(params, state.labels)
    B, N = state.batch, state.n_objects
    dt = cfg.dt
    k = cfg.stiffness
    cd = cfg.damping
    g = p.gravity

    u = np.clip(np.asarray(u, dtype=np.float64), -cfg.u_max, cfg.u_max)
    u = np.broadcast_to(u.reshape(-1, 2), (B, 2))

    # kinematic finger: target advances by the per-substep share of u,
    # position tracks the target through a first-order lag
    state.finger_tgt += u / cfg.control_substeps
    alpha = min(1.0, dt / cfg.finger_tau)
    new_pos = state.finger_pos + alpha * (state.finger_tgt - state.finger_pos)
    state.finger_vel = (new_pos - state.finger_pos) / dt
    state.finger_pos = new_pos

    alive = np.arange(N, dtype=np.int8)[None, :] != state.attached[:, None]  # (B, N)

    rot = state.poses[:, :, 2]
    c, s = np.cos(rot), np.sin(rot)
    centers = state.poses[:, :, :2]

    # corner geometry: local (N, 4, 2) -> world (B, N, 4, 2)
    local = CORNER_SIGNS[None, :, :] * p.half_extents[:, None, :]       # (N, 4, 2)
    lx, lz = local[..., 0], local[..., 1]
    rx = c[:, :, None] * lx[None] - s[:, :, None] * lz[None]            # (B, N, 4)
    rz = s[:, :, None] * lx[None] + c[:, :, None] * lz[None]
    cw_x = centers[:, :, None, 0] + rx
    cw_z = centers[:, :, None, 1] + rz
    # corner velocity = v + w x r
    vel_x = state.vels[:, :, None, 0] - state.angvels[:, :, None] * rz
    vel_z = state.vels[:, :, None, 1] + state.angvels[:, :, None] * rx

    fx = np.zeros((B, N))
    fz = np.zeros((B, N))
    tq = np.zeros((B, N))

    inv_m = 1.0 / p.mass[None, :]            # (1, N)
    inv_i = 1.0 / p.inertia[None, :]
    mu = p.friction[None, :, None]           # (1, N, 1)

    # ---- object-ground contacts (per corner; support ends at table edge)
    pen = -cw_z
    active = (pen > 0.0) & (cw_x <= p.table_edge) & alive[:, :, None]
    n_act = np.maximum(active.sum(axis=2), 1)[:, :, None]               # (B, N, 1)
    approach = np.maximum(0.0, -vel_z)
    m_kn = 1.0 / (inv_m[:, :, None] + rx * rx * inv_i[:, :, None])
    damp = np.minimum(cd * approach, m_kn * approach / (dt * n_act))
    fn = np.where(active, k * pen + damp, 0.0)
    m_kt = 1.0 / (inv_m[:, :, None] + rz * rz * inv_i[:, :, None])
    cap = m_kt * np.abs(vel_x) / (dt * n_act)
    ft = -np.sign(vel_x) * np.minimum(mu * fn, cap)
    ft = np.where(active, ft, 0.0)
    state.ground_fn = fn
    state.ground_ft = ft
    for j in range(4):
        fx[:, :] += ft[:, :, j]
        fz[:, :] += fn[:, :, j]
        tq[:, :] += rx[:, :, j] * fn[:, :, j] - rz[:, :, j] * ft[:, :, j]

    # ---- object-wall contacts (vertical face at x = wall_x, normal -x)
    if np.isfinite(p.wall_x):
        pen_w = cw_x - p.wall_x
        active_w = (pen_w > 0.0) & alive[:, :, None]
        n_w = np.maximum(active_w.sum(axis=2), 1)[:, :, None]
        approach_w = np.maximum(0.0, vel_x)
        m_kn = 1.0 / (inv_m[:, :, None] + rz * rz * inv_i[:, :, None])
        damp_w = np.minimum(cd * approach_w, m_kn * approach_w / (dt * n_w))
        fn_w = np.where(active_w, k * pen_w + damp_w, 0.0)
        m_kt = 1.0 / (inv_m[:, :, None] + rx * rx * inv_i[:, :, None])
        cap_w = m_kt * np.abs(vel_z) / (dt * n_w)
        ft_w = -np.sign(vel_z) * np.minimum(mu * fn_w, cap_w)
        ft_w = np.where(active_w, ft_w, 0.0)
        state.wall_fn = fn_w
        state.wall_ft = ft_w
        for j in range(4):
            fx[:, :] += -fn_w[:, :, j]
            fz[:, :] += ft_w[:, :, j]
            tq[:, :] += rx[:, :, j] * ft_w[:, :, j] + rz[:, :, j] * fn_w[:, :, j]
    else:
        state.wall_fn.fill(0.0)
        state.wall_ft.fill(0.0)

    # ---- finger-object contacts (disk vs rectangle)
    rel = state.finger_pos[:, None, :] - centers                        # (B, N, 2)
    flx = c * rel[:, :, 0] + s * rel[:, :, 1]
    flz = -s * rel[:, :, 0] + c * rel[:, :, 1]
    he_x = p.half_extents[None, :, 0]
    he_z = p.half_extents[None, :, 1]
    qx = np.clip(flx, -he_x, he_x)
    qz = np.clip(flz, -he_z, he_z)
    dx, dz = flx - qx, flz - qz
    dist = np.hypot(dx, dz)
    outside = dist > 1e-12
    safe = np.where(outside, dist, 1.0)
    # center inside the box: push out along the closest face
    pen_x = he_x - np.abs(flx)
    pen_z = he_z - np.abs(flz)
    use_x = pen_x <= pen_z
    sgn_x = np.where(flx >= 0.0, 1.0, -1.0)
    sgn_z = np.where(flz >= 0.0, 1.0, -1.0)
    nlx = np.where(outside, dx / safe, np.where(use_x, sgn_x, 0.0))
    nlz = np.where(outside, dz / safe, np.where(use_x, 0.0, sgn_z))
    depth = np.where(outside, cfg.finger_radius - dist,
                     cfg.finger_radius + np.minimum(pen_x, pen_z))
    plx = np.where(outside, qx, np.where(use_x, sgn_x * he_x, flx))
    plz = np.where(outside, qz, np.where(use_x, flz, sgn_z * he_z))
    contact = (depth > 0.0) & alive
    nwx = c * nlx - s * nlz
    nwz = s * nlx + c * nlz
    prx = c * plx - s * plz
    prz = s * plx + c * plz
    vpx = state.vels[:, :, 0] - state.angvels * prz
    vpz = state.vels[:, :, 1] + state.angvels * prx
    vrel_x = state.finger_vel[:, 0:1] - vpx
    vrel_z = state.finger_vel[:, 1:2] - vpz
    appr = np.maximum(0.0, -(vrel_x * nwx + vrel_z * nwz))
    cross_n = prx * nwz - prz * nwx
    m_kn = 1.0 / (inv_m + cross_n * cross_n * inv_i)
    fn_f = np.where(contact, k * depth + np.minimum(cd * appr, m_kn * appr / dt), 0.0)
    tx, tz = -nwz, nwx
    vt = vrel_x * tx + vrel_z * tz
    cross_t = prx * tz - prz * tx
    m_kt = 1.0 / (inv_m + cross_t * cross_t * inv_i)
    ft_f = np.sign(vt) * np.minimum(p.friction[None, :] * fn_f, m_kt * np.abs(vt) / dt)
    ft_f = np.where(contact, ft_f, 0.0)
    state.finger_fn = fn_f
    state.finger_ft = ft_f
    fbx = -nwx * fn_f + tx * ft_f
    fbz = -nwz * fn_f + tz * ft_f
    fx += fbx
    fz += fbz
    tq += prx * fbz - prz * fbx
    state.finger_force[:, :, 0] = -fbx
    state.finger_force[:, :, 1] = -fbz

    # ---- semi-implicit Euler for free objects
    dvx = (fx * inv_m - 0.0) * dt
    dvz = (fz * inv_m - g) * dt
    state.vels[:, :, 0] += np.where(alive, dvx, 0.0)
    state.vels[:, :, 1] += np.where(alive, dvz, 0.0)
    state.angvels += np.where(alive, tq * inv_i * dt, 0.0)
    state.poses[:, :, 0] += np.where(alive, state.vels[:, :, 0] * dt, 0.0)
    state.poses[:, :, 1] += np.where(alive, state.vels[:, :, 1] * dt, 0.0)
    state.poses[:, :, 2] = wrap_angles(state.poses[:, :, 2]
                                       + np.where(alive, state.angvels * dt, 0.0))

    # ---- optional per-step process noise on free objects
    if state.rng is not None and any(v > 0.0 for v in cfg.noise_std):
        std = np.asarray(cfg.noise_std, dtype=np.float64)
        noise = state.rng.normal(0.0, 1.0, size=(B, N, 6)) * std[None, None, :]
        live = alive.astype(np.float64)
        state.poses[:, :, 0] += noise[:, :, 0] * live
        state.poses[:, :, 1] += noise[:, :, 1] * live
        state.poses[:, :, 2] = wrap_angles(state.poses[:, :, 2] + noise[:, :, 2] * live)
        state.vels[:, :, 0] += noise[:, :, 3] * live
        state.vels[:, :, 1] += noise[:, :, 4] * live
        state.angvels += noise[:, :, 5] * live

    # ---- carried (attached) objects follow the finger rigidly
    att = state.attached
    held = att >= 0
    if held.any():
        idx = np.where(held)[0]
        oi = att[idx].astype(np.intp)
        state.poses[idx, oi, 0] = state.finger_pos[idx, 0] + state.attach_offset[idx, 0]
        state.poses[idx, oi, 1] = state.finger_pos[idx, 1] + state.attach_offset[idx, 1]
        state.poses[idx, oi, 2] = state.attach_rot[idx]
        state.vels[idx, oi, :] = state.finger_vel[idx, :]
        state.angvels[idx, oi] = 0.0
        # holding force stands in for the grasp wrench
        state.finger_force[idx, oi, 0] = 0.0
        state.finger_force[idx, oi, 1] = p.mass[oi] * g
        state.finger_fn[idx, oi] = p.mass[oi] * g
        state.finger_ft[idx, oi] = 0.0

    # ---- automatic grasp attach
    rule = cfg.grasp
    if rule is not None and rule.object in state.labels:
        free = state.attached < 0
        if free.any():
            i = state.index_of(rule.object)
            rot_i = state.poses[:, i, 2]
            ci, si = np.cos(rot_i), np.sin(rot_i)
            hx = rule.handle_local[0]
            hz = rule.handle_local[1]
            hwx = state.poses[:, i, 0] + ci * hx - si * hz
            hwz = state.poses[:, i, 1] + si * hx + ci * hz
            d = np.hypot(state.finger_pos[:, 0] - hwx, state.finger_pos[:, 1] - hwz)
            speed = (np.hypot(state.vels[:, i, 0], state.vels[:, i, 1])
                     + 0.5 * np.abs(state.angvels[:, i]))
            ok = free & (d <= rule.attach_distance) & (speed < rule.eps_v)
            if rule.require_overhang:
                ok &= (hwx - p.table_edge) > rule.tau_grasp
            if ok.any():
                idx = np.where(ok)[0]
                state.attached[idx] = np.int8(i)
                state.attach_offset[idx, 0] = state.poses[idx, i, 0] - state.finger_pos[idx, 0]
                state.attach_offset[idx, 1] = state.poses[idx, i, 1] - state.finger_pos[idx, 1]
                state.attach_rot[idx] = state.poses[idx, i, 2]

    state.t += dt
    return state


def step(state: SimState, u: np.ndarray,
         params: WorldBelief | SimParams, cfg: SimConfig) -> SimState:
    """Pure variant of :func:`step_inplace`: returns a stepped copy."""
    return step_inplace(fork(state), u, params, cfg)


def run_control(state: SimState, u: np.ndarray,
                params: WorldBelief | SimParams, cfg: SimConfig) -> SimState:
    """Apply one control for a full control period (in place)."""
    p = _as_params(params, state.labels)
    for _ in range(cfg.control_substeps):
        step_inplace(state, u, p, cfg)
    return state


def observe(state: SimState, noise_std: float | tuple[float, float, float] = 0.0,
            rng: np.random.Generator | None = None) -> SimState:
    """Sensor model: ground truth with seeded Gaussian pose noise.

    Perturbs object poses and the finger position estimate; velocities and
    forces pass through.  ``noise_std`` is (x, z, rot) or a scalar applied
    to all three channels.
    """
    out = fork(state)
    if np.isscalar(noise_std):
        std = np.array([noise_std, noise_std, noise_std], dtype=np.float64)
    else:
        std = np.asarray(noise_std, dtype=np.float64)
    if not np.any(std > 0.0):
        return out
    if rng is None:
        raise ValueError("noisy observation requires an explicit rng")
    B, N = state.batch, state.n_objects
    noise = rng.normal(0.0, 1.0, size=(B, N, 3)) * std[None, None, :]
    out.poses[:, :, 0] += noise[:, :, 0]
    out.poses[:, :, 1] += noise[:, :, 1]
    out.poses[:, :, 2] = wrap_angles(out.poses[:, :, 2] + noise[:, :, 2])
    out.finger_pos = out.finger_pos + rng.normal(0.0, 1.0, size=(B, 2)) * std[None, :2]
    return out


def contact_records(state: SimState, params: WorldBelief | SimParams,
                    batch_index: int = 0) -> list[dict]:
    """Per-contact audit rows {pair, normal, tangential, point} for one world."""
    p = _as_params(params, state.labels)
    b = batch_index
    rows: list[dict] = []
    rot = state.poses[b, :, 2]
    c, s = np.cos(rot), np.sin(rot)
    for i, label in enumerate(state.labels):
        local = CORNER_SIGNS * p.half_extents[i]
        wx = state.poses[b, i, 0] + c[i] * local[:, 0] - s[i] * local[:, 1]
        wz = state.poses[b, i, 1] + s[i] * local[:, 0] + c[i] * local[:, 1]
        for j in range(4):
            if state.ground_fn[b, i, j] > 0.0:
                rows.append({"pair": ("ground", label), "normal": float(state.ground_fn[b, i, j]),
                             "tangential": float(state.ground_ft[b, i, j]),
                             "point": (float(wx[j]), float(wz[j])), "friction": float(p.friction[i])})
            if state.wall_fn[b, i, j] > 0.0:
                rows.append({"pair": ("wall", label), "normal": float(state.wall_fn[b, i, j]),
                             "tangential": float(state.wall_ft[b, i, j]),
                             "point": (float(wx[j]), float(wz[j])), "friction": float(p.friction[i])})
        if state.finger_fn[b, i] > 0.0 and state.attached[b] != i:
            rows.append({"pair": ("finger", label), "normal": float(state.finger_fn[b, i]),
                         "tangential": float(state.finger_ft[b, i]),
                         "point": (float(state.finger_pos[b, 0]), float(state.finger_pos[b, 1])),
                         "friction": float(p.friction[i])})
    return rows


def mechanical_energy(state: SimState, params: WorldBelief | SimParams,
                      cfg: SimConfig) -> np.ndarray:
    """Kinetic + gravitational + contact-spring energy per batch element.

    Used by conservation audits; the finger is kinematic so its springs are
    excluded (it can inject energy when commanded).
    """
    p = _as_params(params, state.labels)
    alive = (np.arange(state.n_objects, dtype=np.int8)[None, :]
             != state.attached[:, None]).astype(np.float64)
    ke = 0.5 * p.mass[None, :] * (state.vels[:, :, 0] ** 2 + state.vels[:, :, 1] ** 2)
    ke += 0.5 * p.inertia[None, :] * state.angvels ** 2
    pe = p.mass[None, :] * p.gravity * state.poses[:, :, 1]

    rot = state.poses[:, :, 2]
    c, s = np.cos(rot), np.sin(rot)
    local = CORNER_SIGNS[None, :, :] * p.half_extents[:, None, :]
    rx = c[:, :, None] * local[None, ..., 0] - s[:, :, None] * local[None, ..., 1]
    rz = s[:, :, None] * local[None, ..., 0] + c[:, :, None] * local[None, ..., 1]
    cw_x = state.poses[:, :, None, 0] + rx
    cw_z = state.poses[:, :, None, 1] + rz
    pen_g = np.where((cw_z < 0.0) & (cw_x <= p.table_edge), -cw_z, 0.0)
    spring = 0.5 * cfg.stiffness * (pen_g ** 2).sum(axis=2)
    if np.isfinite(p.wall_x):
        pen_w = np.where(cw_x > p.wall_x, cw_x - p.wall_x, 0.0)
        spring += 0.5 * cfg.stiffness * (pen_w ** 2).sum(axis=2)
    return ((ke + pe) * alive).sum(axis=1) + (spring * alive).sum(axis=1)


def mirror_state(state: SimState) -> SimState:
    """Reflect the world about the z axis (x -> -x)."""
    out = fork(state)
    out.finger_pos[:, 0] *= -1.0
    out.finger_tgt[:, 0] *= -1.0
    out.finger_vel[:, 0] *= -1.0
    out.poses[:, :, 0] *= -1.0
    out.poses[:, :, 2] = wrap_angles(-out.poses[:, :, 2])
    out.vels[:, :, 0] *= -1.0
    out.angvels *= -1.0
    out.attach_offset[:, 0] *= -1.0
    out.attach_rot = wrap_angles(-out.attach_rot)
    return out
