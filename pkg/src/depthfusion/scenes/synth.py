# Synthetic Multi-View Scene Generator
# Gerador de Cenas Sintéticas Multivista

"""
Procedural driving-like scenes rendered by closed-form ray casting.

A scene is a ground plane, a back wall and 1-5 primitives (axis-aligned
boxes and spheres) with value-noise texture and Lambertian shading under a
fixed directional light. Cameras move laterally by ``baseline`` per frame
with a small yaw; the reference camera (middle frame) sits at the world
origin looking down +z with y pointing down. Depth is camera z-depth, so
ground truth is exact.

Cenas procedurais renderizadas por ray casting em forma fechada, com
profundidade exata. Toda aleatoriedade vem da semente.
"""

from __future__ import annotations

import itertools
import logging
import zlib
from dataclasses import dataclass, fields, replace
from typing import Any

import numpy as np
from scipy.spatial.transform import Rotation

from depthfusion.exceptions import ConfigurationError, SceneGenerationError
from depthfusion.geometry import Intrinsics, Pose
from depthfusion.head import DepthMap

logger = logging.getLogger(__name__)

MAX_ATTEMPTS = 10
NOISE_LATTICE = 32
TEXTURE_AMPLITUDE = 0.6
LIGHT_DIRECTION = np.array([0.3, -1.0, -0.5]) / np.linalg.norm([0.3, -1.0, -0.5])
HIT_EPSILON = 1e-9
NO_HIT = -1


# Configuration / Configuração


@dataclass(frozen=True)
class SceneConfig:
    """
    Scene generator parameters / Parâmetros do gerador de cenas.
    """

    height: int = 32
    width: int = 32
    n_frames: int = 3
    channels: int = 1
    d_min: float = 2.0
    d_max: float = 20.0
    baseline: float = 0.5
    yaw_step_deg: float = 0.5
    focal_scale: float = 1.0
    camera_height: float = 1.5
    min_objects: int = 1
    max_objects: int = 5
    texture_level: float = 0.5
    texture_frequency: float = 1.5
    ambient: float = 0.35
    dynamic_probability: float = 0.0
    velocity_min: float = 0.3
    velocity_max: float = 0.8
    fronto_parallel_depth: float | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        problems = self.problems()
        if problems:
            raise ConfigurationError(problems)

    def problems(self) -> dict[str, list[str]]:
        found: dict[str, list[str]] = {}

        def add(key: str, message: str) -> None:
            found.setdefault(key, []).append(message)

        for name in ("height", "width"):
            size = getattr(self, name)
            if size < 4 or size % 4:
                add(name, f"must be a positive multiple of 4, got {size}")
        if self.n_frames < 2:
            add("n_frames", f"need at least 2 frames, got {self.n_frames}")
        if self.channels not in (1, 3):
            add("channels", f"must be 1 or 3, got {self.channels}")
        if not 0 < self.d_min < self.d_max:
            add("d_min", f"need 0 < d_min < d_max, got {self.d_min}, {self.d_max}")
        if self.baseline < 0:
            add("baseline", "must be non-negative")
        if self.focal_scale <= 0:
            add("focal_scale", "must be positive")
        if self.camera_height <= 0:
            add("camera_height", "must be positive")
        if not 0 <= self.min_objects <= self.max_objects <= 5:
            add("min_objects", "need 0 <= min_objects <= max_objects <= 5")
        if not 0.0 <= self.texture_level <= 1.0:
            add("texture_level", "must lie in [0, 1]")
        if self.texture_frequency <= 0:
            add("texture_frequency", "must be positive")
        if not 0.0 <= self.ambient <= 1.0:
            add("ambient", "must lie in [0, 1]")
        if not 0.0 <= self.dynamic_probability <= 1.0:
            add("dynamic_probability", "must lie in [0, 1]")
        if not 0 <= self.velocity_min <= self.velocity_max:
            add("velocity_min", "need 0 <= velocity_min <= velocity_max")
        if self.fronto_parallel_depth is not None and not (
            self.d_min <= self.fronto_parallel_depth <= self.d_max
        ):
            add("fronto_parallel_depth", "must lie in [d_min, d_max]")
        return found

    @property
    def reference_index(self) -> int:
        return self.n_frames // 2

    @property
    def wall_depth(self) -> float:
        if self.fronto_parallel_depth is not None:
            return self.fronto_parallel_depth
        return 0.9 * self.d_max

    def to_dict(self) -> dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def derive_seed(master: int, *keys: int | str) -> int:
    """
    Split a master seed into an independent sub-seed.
    Deriva uma sub-semente independente a partir da semente mestre.

    Keys become the spawn key of a numpy SeedSequence; strings are hashed
    with CRC32 so the mapping is stable across processes.
    """
    spawn_key = tuple(
        zlib.crc32(key.encode()) if isinstance(key, str) else int(key) for key in keys
    )
    sequence = np.random.SeedSequence(entropy=int(master), spawn_key=spawn_key)
    return int(sequence.generate_state(1, np.uint64)[0] >> np.uint64(1))


# Scene description / Descrição da cena


@dataclass(frozen=True, eq=False)
class Primitive:
    """One surface: ``plane``, ``box`` or ``sphere``."""

    kind: str
    center: np.ndarray
    size: float
    albedo: np.ndarray
    texture_offset: np.ndarray
    normal: np.ndarray | None = None
    velocity: np.ndarray | None = None

    def center_at(self, frame_offset: int) -> np.ndarray:
        if self.velocity is None:
            return self.center
        return self.center + frame_offset * self.velocity


@dataclass(frozen=True, eq=False)
class SceneLayout:
    config: SceneConfig
    seed: int
    primitives: tuple[Primitive, ...]
    noise_table: np.ndarray
    dynamic_index: int | None = None

    @property
    def object_indices(self) -> list[int]:
        return [i for i, p in enumerate(self.primitives) if p.kind in ("box", "sphere")]


@dataclass(frozen=True, eq=False)
class RenderedView:
    image: np.ndarray
    depth: np.ndarray
    primitive_ids: np.ndarray


@dataclass(frozen=True)
class SceneFlags:
    texture_level: float
    has_dynamic_object: bool


@dataclass(frozen=True, eq=False)
class SceneSample:
    """
    Frames, cameras and reference ground truth of one scene.
    Quadros, câmeras e profundidade de referência de uma cena.
    """

    frames: tuple[np.ndarray, ...]
    intrinsics: tuple[Intrinsics, ...]
    poses: tuple[Pose, ...]
    gt_depth: DepthMap
    flags: SceneFlags
    seed: int

    def __post_init__(self) -> None:
        count = len(self.frames)
        if count < 2:
            raise SceneGenerationError(f"a sample needs at least 2 frames, got {count}")
        if len(self.intrinsics) != count or len(self.poses) != count:
            raise SceneGenerationError(
                f"{count} frames but {len(self.intrinsics)} intrinsics and "
                f"{len(self.poses)} poses"
            )
        shapes = {frame.shape for frame in self.frames}
        if len(shapes) != 1:
            raise SceneGenerationError(f"frames differ in shape: {shapes}")

    @property
    def n_frames(self) -> int:
        return len(self.frames)

    @property
    def reference_index(self) -> int:
        return self.n_frames // 2

    @property
    def source_indices(self) -> list[int]:
        return [i for i in range(self.n_frames) if i != self.reference_index]

    def with_poses(self, poses: tuple[Pose, ...]) -> SceneSample:
        return replace(self, poses=tuple(poses))

    def identical_to(self, other: SceneSample) -> bool:
        """Bit-exact equality of every array and field."""
        return (
            self.seed == other.seed
            and self.flags == other.flags
            and self.n_frames == other.n_frames
            and all(
                np.array_equal(a, b) for a, b in zip(self.frames, other.frames, strict=True)
            )
            and all(a == b for a, b in zip(self.intrinsics, other.intrinsics, strict=True))
            and all(
                np.array_equal(a.matrix, b.matrix)
                for a, b in zip(self.poses, other.poses, strict=True)
            )
            and np.array_equal(self.gt_depth.array, other.gt_depth.array)
            and np.array_equal(self.gt_depth.valid, other.gt_depth.valid)
        )


# Cameras / Câmeras


def default_intrinsics(config: SceneConfig) -> Intrinsics:
    focal = config.focal_scale * config.width
    return Intrinsics(
        fx=focal,
        fy=focal,
        cx=(config.width - 1) / 2.0,
        cy=(config.height - 1) / 2.0,
    )


def camera_pose(config: SceneConfig, frame_index: int) -> Pose:
    """World-to-camera pose of frame ``frame_index`` on the lateral path."""
    offset = frame_index - config.reference_index
    if offset == 0:
        return Pose.identity()
    camera_to_world = Rotation.from_euler(
        "y", offset * config.yaw_step_deg, degrees=True
    ).as_matrix()
    rotation = camera_to_world.T
    center = np.array([offset * config.baseline, 0.0, 0.0])
    return Pose(rotation, -rotation @ center)


# Layout / Layout


def build_layout(config: SceneConfig, seed: int) -> SceneLayout:
    """
    Draw primitives, materials and texture from ``seed``.
    Sorteia primitivas, materiais e textura a partir de ``seed``.
    """
    rng = np.random.default_rng(seed)
    channels = config.channels
    noise_table = rng.random((NOISE_LATTICE,) * 3)

    def material() -> tuple[np.ndarray, np.ndarray]:
        return rng.uniform(0.25, 0.85, size=channels), rng.uniform(0, NOISE_LATTICE, 3)

    primitives: list[Primitive] = []
    albedo, offset = material()
    primitives.append(
        Primitive(
            kind="plane",
            center=np.array([0.0, 0.0, config.wall_depth]),
            size=0.0,
            albedo=albedo,
            texture_offset=offset,
            normal=np.array([0.0, 0.0, -1.0]),
        )
    )
    if config.fronto_parallel_depth is not None:
        return SceneLayout(config, seed, tuple(primitives), noise_table)

    albedo, offset = material()
    primitives.append(
        Primitive(
            kind="plane",
            center=np.array([0.0, config.camera_height, 0.0]),
            size=0.0,
            albedo=albedo,
            texture_offset=offset,
            normal=np.array([0.0, -1.0, 0.0]),
        )
    )

    intrinsics = default_intrinsics(config)
    half_fov = (config.width / 2.0) / intrinsics.fx
    z_near = config.d_min + 1.5
    z_far = max(z_near + 0.5, 0.5 * (config.d_min + config.wall_depth))
    count = int(rng.integers(config.min_objects, config.max_objects + 1))
    for _ in range(count):
        kind = "box" if rng.random() < 0.5 else "sphere"
        size = float(rng.uniform(0.3, 1.0))
        depth = float(rng.uniform(z_near, z_far))
        lateral = float(rng.uniform(-0.7, 0.7)) * depth * half_fov
        center = np.array([lateral, config.camera_height - size, depth])
        albedo, offset = material()
        primitives.append(
            Primitive(
                kind=kind,
                center=center,
                size=size,
                albedo=albedo,
                texture_offset=offset,
            )
        )

    # always draw, so the stream does not depend on dynamic_probability
    dynamic_draw = rng.random()
    speed = rng.uniform(config.velocity_min, config.velocity_max)
    heading = rng.uniform(0.0, 2.0 * np.pi)
    mover = int(rng.integers(0, max(count, 1)))
    dynamic_index = None
    if count and dynamic_draw < config.dynamic_probability:
        dynamic_index = 2 + mover
        velocity = speed * np.array([np.cos(heading), 0.0, np.sin(heading)])
        primitives[dynamic_index] = replace(primitives[dynamic_index], velocity=velocity)
    return SceneLayout(config, seed, tuple(primitives), noise_table, dynamic_index)


# Ray casting / Ray casting


def _intersect_plane(
    origin: np.ndarray, directions: np.ndarray, primitive: Primitive
) -> tuple[np.ndarray, np.ndarray]:
    normal = primitive.normal
    assert normal is not None
    denom = directions @ normal
    with np.errstate(divide="ignore", invalid="ignore"):
        s = (primitive.center @ normal - origin @ normal) / denom
    s = np.where(np.abs(denom) > 1e-12, s, np.inf)
    normals = np.broadcast_to(normal, directions.shape)
    return s, normals


def _intersect_sphere(
    origin: np.ndarray, directions: np.ndarray, center: np.ndarray, radius: float
) -> tuple[np.ndarray, np.ndarray]:
    offset = origin - center
    a = np.einsum("ij,ij->i", directions, directions)
    b = 2.0 * directions @ offset
    c = offset @ offset - radius * radius
    disc = b * b - 4.0 * a * c
    root = np.sqrt(np.maximum(disc, 0.0))
    near = (-b - root) / (2.0 * a)
    far = (-b + root) / (2.0 * a)
    s = np.where(near > HIT_EPSILON, near, far)
    s = np.where((disc >= 0) & (s > HIT_EPSILON), s, np.inf)
    with np.errstate(invalid="ignore"):
        points = origin + s[:, None] * directions
        normals = (points - center) / radius
    return s, normals


def _intersect_box(
    origin: np.ndarray, directions: np.ndarray, center: np.ndarray, half: float
) -> tuple[np.ndarray, np.ndarray]:
    low, high = center - half, center + half
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = (low - origin) / directions
        t2 = (high - origin) / directions
    t_near = np.minimum(t1, t2)
    t_far = np.maximum(t1, t2)
    # rays parallel to a slab: inside -> unbounded, outside -> miss
    parallel = directions == 0
    inside = (origin >= low) & (origin <= high)
    t_near = np.where(parallel, np.where(inside, -np.inf, np.inf), t_near)
    t_far = np.where(parallel, np.where(inside, np.inf, -np.inf), t_far)
    entry = t_near.max(axis=1)
    exit_ = t_far.min(axis=1)
    s = np.where(entry > HIT_EPSILON, entry, exit_)
    s = np.where((exit_ >= entry) & (s > HIT_EPSILON), s, np.inf)
    axis = t_near.argmax(axis=1)
    normals = np.zeros_like(directions)
    rows = np.arange(directions.shape[0])
    normals[rows, axis] = -np.sign(directions[rows, axis])
    return s, normals


def value_noise(table: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Smooth trilinear value noise in [0, 1] on a periodic lattice."""
    size = table.shape[0]
    base = np.floor(points)
    frac = points - base
    weight = frac * frac * (3.0 - 2.0 * frac)
    i0 = base.astype(np.int64) % size
    i1 = (i0 + 1) % size
    out = np.zeros(points.shape[0])
    for corner in itertools.product((0, 1), repeat=3):
        index = tuple(np.where(c, i1[:, k], i0[:, k]) for k, c in enumerate(corner))
        w = np.prod(
            [weight[:, k] if c else 1.0 - weight[:, k] for k, c in enumerate(corner)],
            axis=0,
        )
        out += w * table[index]
    return out


def render_view(
    layout: SceneLayout, intrinsics: Intrinsics, pose: Pose, frame_offset: int = 0
) -> RenderedView:
    """
    Ray-cast one view: float64 image [C, H, W], exact z-depth and primitive ids.
    Renderiza uma vista: imagem float64, profundidade z exata e ids.

    ``frame_offset`` (frame index minus reference index) positions moving
    primitives.
    """
    config = layout.config
    height, width = config.height, config.width
    v, u = np.mgrid[0:height, 0:width].astype(np.float64)
    rays_cam = intrinsics.inverse_matrix @ np.stack([u, v, np.ones_like(u)]).reshape(3, -1)
    directions = (pose.rotation.T @ rays_cam).T
    origin = pose.center

    best = np.full(directions.shape[0], np.inf)
    ids = np.full(directions.shape[0], NO_HIT, dtype=np.int64)
    normals = np.zeros_like(directions)
    for index, primitive in enumerate(layout.primitives):
        center = primitive.center_at(frame_offset)
        if primitive.kind == "plane":
            s, n = _intersect_plane(origin, directions, primitive)
        elif primitive.kind == "sphere":
            s, n = _intersect_sphere(origin, directions, center, primitive.size)
        else:
            s, n = _intersect_box(origin, directions, center, primitive.size)
        closer = (s > HIT_EPSILON) & (s < best)
        best = np.where(closer, s, best)
        ids = np.where(closer, index, ids)
        normals[closer] = n[closer]

    hit = ids != NO_HIT
    points = origin + np.where(hit, best, 0.0)[:, None] * directions
    shading = config.ambient + (1.0 - config.ambient) * np.maximum(normals @ LIGHT_DIRECTION, 0.0)
    image = np.zeros((config.channels, directions.shape[0]))
    for index, primitive in enumerate(layout.primitives):
        mask = ids == index
        if not mask.any():
            continue
        local = points[mask] - primitive.center_at(frame_offset)
        noise = value_noise(
            layout.noise_table, local * config.texture_frequency + primitive.texture_offset
        )
        albedo = primitive.albedo[:, None] + config.texture_level * TEXTURE_AMPLITUDE * (
            noise[None, :] - 0.5
        )
        image[:, mask] = np.clip(albedo, 0.02, 1.0) * shading[mask]

    # rays carry unit z in camera space, so the ray parameter is the z-depth
    depth = np.where(hit, best, 0.0)
    return RenderedView(
        image=np.clip(image, 0.0, 1.0).reshape(config.channels, height, width),
        depth=depth.reshape(height, width),
        primitive_ids=ids.reshape(height, width),
    )


# Scene generation / Geração de cenas


def _to_float32_grid(array: np.ndarray) -> np.ndarray:
    return array.astype(np.float32).astype(np.float64)


def _degenerate_reason(layout: SceneLayout, view: RenderedView) -> str | None:
    config = layout.config
    valid = (view.depth >= config.d_min) & (view.depth <= config.d_max)
    if valid.mean() < 0.5:
        return f"only {valid.mean():.0%} of reference pixels hold a depth in range"
    objects = layout.object_indices
    if objects and not np.isin(view.primitive_ids, objects).any():
        return "no object is visible from the reference camera"
    return None


def render_sample(layout: SceneLayout) -> SceneSample:
    """Render every frame of ``layout`` into a SceneSample."""
    config = layout.config
    intrinsics = default_intrinsics(config)
    poses = tuple(camera_pose(config, i) for i in range(config.n_frames))
    views = [
        render_view(layout, intrinsics, pose, i - config.reference_index)
        for i, pose in enumerate(poses)
    ]
    reference = views[config.reference_index]
    depth = _to_float32_grid(reference.depth)
    valid = (depth >= config.d_min) & (depth <= config.d_max)
    # out-of-range pixels are stored as 0 so the mask survives a PFM round-trip
    depth = np.where(valid, depth, 0.0)
    return SceneSample(
        frames=tuple(_to_float32_grid(view.image) for view in views),
        intrinsics=(intrinsics,) * config.n_frames,
        poses=poses,
        gt_depth=DepthMap.from_array(depth, valid),
        flags=SceneFlags(
            texture_level=config.texture_level,
            has_dynamic_object=layout.dynamic_index is not None,
        ),
        seed=layout.seed,
    )


def generate_scene(config: SceneConfig, seed: int) -> SceneSample:
    """
    Generate one scene; degenerate layouts are redrawn from derived sub-seeds.
    Gera uma cena; layouts degenerados são sorteados novamente.
    """
    reasons = []
    for attempt in range(MAX_ATTEMPTS):
        attempt_seed = seed if attempt == 0 else derive_seed(seed, "attempt", attempt)
        layout = build_layout(config, attempt_seed)
        reference = render_view(layout, default_intrinsics(config), Pose.identity())
        reason = _degenerate_reason(layout, reference)
        if reason is None:
            return render_sample(layout)
        logger.debug(f"Scene seed {attempt_seed} rejected: {reason}")
        reasons.append(reason)
    raise SceneGenerationError(
        f"no usable scene for seed {seed} after {MAX_ATTEMPTS} attempts: {reasons[-1]}"
    )


__all__ = [
    "SceneConfig",
    "SceneFlags",
    "SceneLayout",
    "SceneSample",
    "build_layout",
    "camera_pose",
    "default_intrinsics",
    "derive_seed",
    "generate_scene",
    "render_sample",
    "render_view",
    "value_noise",
]
