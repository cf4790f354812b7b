# Camera Geometry - Pinhole Model, Plane Sweep and Pose Noise
# Geometria de Câmera - Modelo Pinhole, Varredura de Planos e Ruído de Pose

"""
Pinhole intrinsics, world-to-camera poses (x_cam = R @ x_world + t),
inverse-depth hypothesis planes, plane-induced homographies and the
differentiable warp that samples source features onto reference pixels.

Intrínsecos pinhole, poses mundo-para-câmera, planos de hipótese em
profundidade inversa, homografias induzidas por planos e o warp
diferenciável das features de origem para os pixels de referência.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.transform import Rotation

from depthfusion.autodiff import Tensor, bilinear_sample
from depthfusion.exceptions import GeometryError, ShapeError

logger = logging.getLogger(__name__)

POSE_TOLERANCE = 1e-10
FRONTO_PARALLEL_NORMAL = np.array([0.0, 0.0, 1.0])


# Camera model / Modelo de câmera


@dataclass(frozen=True)
class Intrinsics:
    """Pinhole intrinsics in pixels / Intrínsecos pinhole em pixels."""

    fx: float
    fy: float
    cx: float
    cy: float

    def __post_init__(self) -> None:
        values = (self.fx, self.fy, self.cx, self.cy)
        if not all(np.isfinite(v) for v in values):
            raise GeometryError(f"intrinsics must be finite, got {values}")
        if self.fx <= 0 or self.fy <= 0:
            raise GeometryError(f"focal lengths must be positive, got {self.fx}, {self.fy}")

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> Intrinsics:
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.shape != (3, 3):
            raise GeometryError(f"intrinsic matrix must be 3x3, got {matrix.shape}")
        return cls(
            fx=float(matrix[0, 0]),
            fy=float(matrix[1, 1]),
            cx=float(matrix[0, 2]),
            cy=float(matrix[1, 2]),
        )

    @property
    def matrix(self) -> np.ndarray:
        return np.array(
            [[self.fx, 0.0, self.cx], [0.0, self.fy, self.cy], [0.0, 0.0, 1.0]]
        )

    @property
    def inverse_matrix(self) -> np.ndarray:
        return np.array(
            [
                [1.0 / self.fx, 0.0, -self.cx / self.fx],
                [0.0, 1.0 / self.fy, -self.cy / self.fy],
                [0.0, 0.0, 1.0],
            ]
        )

    def scaled(self, factor: float) -> Intrinsics:
        return scale_intrinsics(self, factor)


@dataclass(frozen=True, eq=False)
class Pose:
    """
    World-to-camera rigid transform: x_cam = rotation @ x_world + translation.
    Transformação rígida mundo-para-câmera.
    """

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self) -> None:
        rotation = np.array(self.rotation, dtype=np.float64)
        translation = np.array(self.translation, dtype=np.float64).reshape(-1)
        if rotation.shape != (3, 3) or translation.shape != (3,):
            raise GeometryError(
                f"pose needs a 3x3 rotation and 3-vector, got {rotation.shape}, "
                f"{translation.shape}"
            )
        if not (np.isfinite(rotation).all() and np.isfinite(translation).all()):
            raise GeometryError("pose contains non-finite values")
        if np.abs(rotation.T @ rotation - np.eye(3)).max() > POSE_TOLERANCE:
            raise GeometryError("rotation is not orthonormal")
        if abs(np.linalg.det(rotation) - 1.0) > POSE_TOLERANCE:
            raise GeometryError("rotation determinant is not 1")
        rotation.setflags(write=False)
        translation.setflags(write=False)
        object.__setattr__(self, "rotation", rotation)
        object.__setattr__(self, "translation", translation)

    @classmethod
    def identity(cls) -> Pose:
        return cls(np.eye(3), np.zeros(3))

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> Pose:
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.shape != (4, 4):
            raise GeometryError(f"extrinsic matrix must be 4x4, got {matrix.shape}")
        if not np.allclose(matrix[3], [0.0, 0.0, 0.0, 1.0]):
            raise GeometryError("last row of extrinsic matrix must be [0 0 0 1]")
        return cls(matrix[:3, :3], matrix[:3, 3])

    @property
    def matrix(self) -> np.ndarray:
        out = np.eye(4)
        out[:3, :3] = self.rotation
        out[:3, 3] = self.translation
        return out

    @property
    def center(self) -> np.ndarray:
        """Camera centre in world coordinates."""
        return -self.rotation.T @ self.translation

    def relative_to(self, reference: Pose) -> tuple[np.ndarray, np.ndarray]:
        """(R_rel, t_rel) mapping reference-camera points into this camera."""
        r_rel = self.rotation @ reference.rotation.T
        return r_rel, self.translation - r_rel @ reference.translation

    def allclose(self, other: Pose, atol: float = 0.0) -> bool:
        return bool(
            np.allclose(self.rotation, other.rotation, rtol=0.0, atol=atol)
            and np.allclose(self.translation, other.translation, rtol=0.0, atol=atol)
        )


def scale_intrinsics(intrinsics: Intrinsics, factor: float) -> Intrinsics:
    """
    Intrinsics for a feature map sampled every 1/factor pixels.
    Intrínsecos para um mapa de features amostrado a cada 1/factor pixels.

    Stride-2 convolutions keep pixel 2i of their input at output i, so pixel
    coordinates scale linearly with no half-pixel offset.
    """
    if not factor > 0:
        raise GeometryError(f"scale factor must be positive, got {factor}")
    return Intrinsics(
        fx=intrinsics.fx * factor,
        fy=intrinsics.fy * factor,
        cx=intrinsics.cx * factor,
        cy=intrinsics.cy * factor,
    )


def rotation_angle(rotation: np.ndarray) -> float:
    """Geodesic angle (radians) of a rotation matrix."""
    return float(np.linalg.norm(Rotation.from_matrix(rotation).as_rotvec()))


def inter_frame_baseline(poses: Sequence[Pose]) -> float:
    """Mean distance between consecutive camera centres."""
    if len(poses) < 2:
        raise GeometryError("baseline needs at least two poses")
    centers = np.stack([p.center for p in poses])
    return float(np.linalg.norm(np.diff(centers, axis=0), axis=1).mean())


# Depth hypotheses / Hipóteses de profundidade


@dataclass(frozen=True, eq=False)
class DepthHypothesisSet:
    """
    Depth planes uniform in inverse depth between d_min and d_max.
    Planos de profundidade uniformes em profundidade inversa.
    """

    d_min: float
    d_max: float
    values: np.ndarray = field(repr=False)
    spacing: str = "uniform-inverse-depth"

    @property
    def count(self) -> int:
        return int(self.values.shape[0])

    def __len__(self) -> int:
        return self.count


def build_hypotheses(d_min: float, d_max: float, count: int) -> DepthHypothesisSet:
    """
    Build ``count`` planes whose inverse depths are evenly spaced.
    Constrói ``count`` planos com profundidades inversas igualmente espaçadas.
    """
    if not (np.isfinite(d_min) and np.isfinite(d_max)) or not 0 < d_min < d_max:
        raise GeometryError(f"need 0 < d_min < d_max, got d_min={d_min}, d_max={d_max}")
    if count < 2:
        raise GeometryError(f"need at least 2 hypotheses, got {count}")
    values = 1.0 / np.linspace(1.0 / d_min, 1.0 / d_max, count)
    # pin the endpoints against rounding in the double reciprocal
    values[0], values[-1] = d_min, d_max
    values.setflags(write=False)
    return DepthHypothesisSet(d_min=float(d_min), d_max=float(d_max), values=values)


# Homographies / Homografias


def plane_homography(
    k_ref: Intrinsics,
    k_src: Intrinsics,
    pose_ref: Pose,
    pose_src: Pose,
    depth: float,
    normal: np.ndarray = FRONTO_PARALLEL_NORMAL,
) -> np.ndarray:
    """
    Homography taking reference pixels to source pixels for the plane
    n . x = depth in the reference camera frame.

    Homografia de pixels de referência para pixels de origem induzida pelo
    plano n . x = depth no referencial da câmera de referência.
    """
    if not depth > 0:
        raise GeometryError(f"plane depth must be positive, got {depth}")
    r_rel, t_rel = pose_src.relative_to(pose_ref)
    induced = r_rel + np.outer(t_rel, normal) / depth
    return k_src.matrix @ induced @ k_ref.inverse_matrix


def plane_homographies(
    k_ref: Intrinsics,
    k_src: Intrinsics,
    pose_ref: Pose,
    pose_src: Pose,
    hypotheses: DepthHypothesisSet,
) -> np.ndarray:
    """Stack of homographies [D, 3, 3], one per hypothesis plane."""
    return np.stack(
        [plane_homography(k_ref, k_src, pose_ref, pose_src, d) for d in hypotheses.values]
    )


def _project_grid(
    homographies: np.ndarray, height: int, width: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    v, u = np.mgrid[0:height, 0:width].astype(np.float64)
    pixels = np.stack([u, v, np.ones_like(u)]).reshape(3, -1)
    mapped = homographies @ pixels
    z = mapped[:, 2]
    in_front = z > 1e-12
    safe = np.where(in_front, z, 1.0)
    shape = (homographies.shape[0], height, width)
    u_src = np.where(in_front, mapped[:, 0] / safe, np.nan).reshape(shape)
    v_src = np.where(in_front, mapped[:, 1] / safe, np.nan).reshape(shape)
    return u_src, v_src, in_front.reshape(shape)


# Warping / Warping


def warp_features(src_feat: Tensor, homography: np.ndarray) -> tuple[Tensor, np.ndarray]:
    """
    Sample ``src_feat`` [C, H, W] at H @ (u, v, 1) for every reference pixel.
    Amostra ``src_feat`` em H @ (u, v, 1) para cada pixel de referência.
    """
    homography = np.asarray(homography, dtype=np.float64)
    if homography.shape != (3, 3):
        raise ShapeError(f"homography must be 3x3, got {homography.shape}")
    warped, valid = warp_volume(src_feat, homography[None])
    return warped[0], valid[0]


def warp_volume(
    src_feat: Tensor, homographies: np.ndarray
) -> tuple[Tensor, np.ndarray]:
    """
    Warp source features through D homographies at once.
    Faz o warp das features por D homografias de uma vez.

    Returns features [D, C, H, W] and validity [D, H, W]; samples outside the
    source image are zero and invalid.
    """
    if src_feat.ndim != 3:
        raise ShapeError(f"source features must be [C, H, W], got {src_feat.shape}")
    _, height, width = src_feat.shape
    u_src, v_src, _ = _project_grid(homographies, height, width)
    sampled, valid = bilinear_sample(src_feat, u_src, v_src)
    return sampled.transpose(1, 0, 2, 3), valid


def reproject(
    depth: np.ndarray,
    k_ref: Intrinsics,
    pose_ref: Pose,
    k_src: Intrinsics,
    pose_src: Pose,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Project every reference pixel with known depth into the source view.
    Projeta cada pixel de referência com profundidade conhecida na origem.

    Returns source pixel coordinates (u, v) and the source-frame depth.
    """
    height, width = depth.shape
    v, u = np.mgrid[0:height, 0:width].astype(np.float64)
    rays = k_ref.inverse_matrix @ np.stack([u, v, np.ones_like(u)]).reshape(3, -1)
    points_ref = rays * depth.reshape(1, -1)
    r_rel, t_rel = pose_src.relative_to(pose_ref)
    points_src = r_rel @ points_ref + t_rel[:, None]
    pixels = k_src.matrix @ points_src
    z = points_src[2]
    with np.errstate(divide="ignore", invalid="ignore"):
        u_src = (pixels[0] / pixels[2]).reshape(height, width)
        v_src = (pixels[1] / pixels[2]).reshape(height, width)
    return u_src, v_src, z.reshape(height, width)


# Pose noise / Ruído de pose


def inject_pose_noise(
    pose: Pose,
    sigma_rot_deg: float,
    sigma_trans: float,
    baseline: float,
    rng: np.random.Generator,
) -> Pose:
    """
    Perturb a pose with Gaussian axis-angle rotation and translation noise.
    Perturba uma pose com ruído gaussiano de rotação e translação.

    R <- R @ exp([w]x) with w ~ N(0, (sigma_rot in radians)^2 I) and
    t <- t + e with e ~ N(0, (sigma_trans * baseline)^2 I). Both draws always
    consume the generator so noise streams stay aligned across settings; a
    zero sigma returns that component unchanged.
    """
    if sigma_rot_deg < 0 or sigma_trans < 0:
        raise GeometryError(
            f"noise sigmas must be non-negative, got {sigma_rot_deg}, {sigma_trans}"
        )
    if baseline < 0:
        raise GeometryError(f"baseline must be non-negative, got {baseline}")
    omega = rng.standard_normal(3) * np.deg2rad(sigma_rot_deg)
    epsilon = rng.standard_normal(3) * (sigma_trans * baseline)
    rotation = pose.rotation
    translation = pose.translation
    if sigma_rot_deg > 0:
        rotation = rotation @ Rotation.from_rotvec(omega).as_matrix()
    if sigma_trans > 0 and baseline > 0:
        translation = translation + epsilon
    if rotation is pose.rotation and translation is pose.translation:
        return pose
    return Pose(rotation, translation)
