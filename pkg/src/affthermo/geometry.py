"""Attractor clouds for the full, nonzero-product and invertible systems,
the canonical projection, the inhomogeneous (condensation) decomposition,
directional projections, and box-counting dimension estimation."""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

from .errors import (
    BudgetExceeded,
    NotNonInvertible,
    PreconditionError,
    ScaleBelowResolution,
)
from .ifs import AffineIFS, node_budget
from .mat2 import Direction, Mat2, rank_one_factor
from .pressure import affinity_dimension
from .errors import InconclusiveBracket
from .stacks import operator_norms
from .symbolic import SubshiftKind, Word, ZERO_PRODUCT_TOL

CLOUD_MAGIC = b"AFPC1"


@dataclass(frozen=True)
class PointCloud:
    """Finite planar (or projected 1-d) approximation of an attractor.

    ``resolution`` is the guaranteed covering radius: the target set and the
    cloud are within resolution of each other in Hausdorff distance."""

    points: np.ndarray
    resolution: float
    source_set: str

    def __post_init__(self):
        object.__setattr__(self, "points", np.atleast_1d(np.asarray(self.points, float)))

    def __len__(self) -> int:
        return len(self.points)

    @property
    def dimensionality(self) -> int:
        return 1 if self.points.ndim == 1 else self.points.shape[1]


@dataclass(frozen=True)
class BoxDimEstimate:
    scales: np.ndarray
    counts: np.ndarray
    slope: float
    stderr: float


def containing_radius(ifs: AffineIFS) -> float:
    """A-priori radius of a ball at the origin containing the attractor."""
    ifs.check_contractive()
    vmax = max(float(np.hypot(*v)) for v in ifs.translations)
    return max(vmax, 1e-9) / (1.0 - ifs.max_norm())


def canonical_point(ifs: AffineIFS, word: Word) -> np.ndarray:
    """f_word(0); the empty word is the identity map.

    Once a prefix product is the zero matrix the value freezes: every
    extension returns the same point."""
    ifs.check_contractive()
    M = np.eye(2)
    t = np.zeros(2)
    for letter in word:
        A, v = ifs.maps[letter]
        t = t + M @ v
        M = M @ A.to_array()
    return t


def attractor_cloud(
    ifs: AffineIFS,
    kind: SubshiftKind = SubshiftKind.FULL,
    epsilon: float = 1.0 / 128,
    budget: Optional[int] = None,
) -> PointCloud:
    """Deterministic covering generation: expand the word tree, pruning per
    subshift kind, until each piece has diameter below epsilon, then emit
    the image of the ball center per leaf."""
    if epsilon <= 0:
        raise PreconditionError("attractor_cloud requires epsilon > 0")
    ifs.check_contractive()
    ifs.check_no_common_fixed_point()
    budget = node_budget(budget)
    R = containing_radius(ifs)

    letters = (
        ifs.invertible_index if kind is SubshiftKind.INVERTIBLE else range(len(ifs))
    )
    letters = list(letters)
    if not letters:
        raise NotNonInvertible("no admissible letters for this subshift kind")
    A = np.stack([ifs.matrices[i].to_array() for i in letters])
    V = np.stack([ifs.translations[i] for i in letters])
    max_norm = ifs.max_norm()

    M = np.eye(2)[None, :, :]
    T = np.zeros((1, 2))
    emitted: List[np.ndarray] = []
    total = 0
    depth = 0
    while len(M):
        depth += 1
        norms = operator_norms(M)
        done = norms * 2.0 * R <= epsilon
        if np.any(done):
            emitted.append(T[done])
        M, T = M[~done], T[~done]
        if not len(M):
            break
        if kind is SubshiftKind.SIGMA:
            keep = operator_norms(M) > ZERO_PRODUCT_TOL * max(max_norm, 1e-300) ** depth
            M, T = M[keep], T[keep]
            if not len(M):
                break
        # append each letter: map composition multiplies on the right
        T = (np.einsum("mij,lj->mli", M, V) + T[:, None, :]).reshape(-1, 2)
        M = np.einsum("mij,ljk->mlik", M, A).reshape(-1, 2, 2)
        total += len(M)
        if total > budget:
            raise BudgetExceeded("attractor tree exceeded node budget", total, budget)
        if depth > 400:
            raise BudgetExceeded("attractor tree failed to contract", total, budget)
    points = np.concatenate(emitted) if emitted else np.zeros((0, 2))
    return PointCloud(points, epsilon, f"attractor-{kind.value}")


def condensation_decomposition(
    ifs: AffineIFS, epsilon: float = 1.0 / 128, budget: Optional[int] = None
) -> Tuple[PointCloud, PointCloud, PointCloud]:
    """Split the full attractor as the invertible attractor plus the orbit of
    the condensation set C (rank-deficient images of the full attractor).

    Returns (X cloud, C cloud, reconstructed X' cloud)."""
    inv = ifs.invertible_index
    non_inv = ifs.noninvertible_index
    if not inv or not non_inv:
        raise NotNonInvertible(
            "condensation decomposition needs both invertible and "
            "non-invertible letters"
        )
    xprime = attractor_cloud(ifs, SubshiftKind.FULL, epsilon, budget)
    x_cloud = attractor_cloud(ifs.restrict(inv), SubshiftKind.FULL, epsilon, budget)

    c_points = np.concatenate(
        [
            xprime.points @ ifs.matrices[i].to_array().T + ifs.translations[i]
            for i in non_inv
        ]
    )
    # an epsilon/4 net of C keeps the orbit below memory limits without
    # spending the 2-epsilon reconstruction slack
    c_net = _decimate(c_points, epsilon / 4.0)
    c_cloud = PointCloud(c_points, epsilon, "condensation")

    # orbit of C under invertible words until pieces shrink below epsilon
    R = containing_radius(ifs)
    A = np.stack([ifs.matrices[i].to_array() for i in inv])
    V = np.stack([ifs.translations[i] for i in inv])
    pieces = [c_net]
    M = np.eye(2)[None, :, :]
    T = np.zeros((1, 2))
    total = 0
    budget_n = node_budget(budget)
    while len(M):
        T = (np.einsum("mij,lj->mli", M, V) + T[:, None, :]).reshape(-1, 2)
        M = np.einsum("mij,ljk->mlik", M, A).reshape(-1, 2, 2)
        for Mi, Ti in zip(M, T):
            pieces.append(c_net @ Mi.T + Ti)
        # pieces below epsilon lie within the slack of the X cloud already
        keep = operator_norms(M) * 2.0 * R > epsilon
        M, T = M[keep], T[keep]
        total += len(M)
        if total > budget_n:
            raise BudgetExceeded("condensation orbit exceeded budget", total, budget_n)
    reconstructed = _decimate(np.concatenate([x_cloud.points] + pieces), epsilon / 4.0)
    return x_cloud, c_cloud, PointCloud(reconstructed, epsilon, "reconstructed")


def _decimate(points: np.ndarray, cell: float) -> np.ndarray:
    """Thin a point set to one representative per grid cell of the given size."""
    if len(points) == 0 or cell <= 0:
        return points
    keys = np.floor(points / cell).astype(np.int64)
    _, idx = np.unique(keys, axis=0, return_index=True)
    return points[np.sort(idx)]


def project_cloud(cloud: PointCloud, direction: Direction) -> PointCloud:
    """Orthogonal projection onto the line with the given angle, as scalar
    coordinates along that line."""
    u = direction.unit_vector()
    scalars = np.asarray(cloud.points).reshape(-1, 2) @ u
    return PointCloud(scalars, cloud.resolution, f"projection({direction.angle:.6g})")


def hausdorff_distance(a, b) -> float:
    """Symmetric Hausdorff distance between two point sets (arrays or clouds)."""
    if isinstance(a, PointCloud):
        a = a.points
    if isinstance(b, PointCloud):
        b = b.points
    a = np.asarray(a, float).reshape(len(a), -1)
    b = np.asarray(b, float).reshape(len(b), -1)
    d_ab = np.max(cKDTree(b).query(a)[0])
    d_ba = np.max(cKDTree(a).query(b)[0])
    return float(max(d_ab, d_ba))


def box_dimension(
    cloud: PointCloud,
    scales: Sequence[float],
    offsets: int = 4,
    seed: int = 0,
) -> BoxDimEstimate:
    """Occupied-box counts on an anchored grid plus random grid offsets,
    with an ordinary least-squares fit of log count against log(1/scale)."""
    scales = np.sort(np.asarray(scales, dtype=float))
    if len(scales) < 2:
        raise PreconditionError("box_dimension needs at least two scales")
    if cloud.resolution > scales[0] / 4.0:
        raise ScaleBelowResolution(
            f"smallest scale {scales[0]:g} is below 4x the cloud resolution "
            f"{cloud.resolution:g}"
        )
    pts = np.asarray(cloud.points, float)
    pts = pts.reshape(len(pts), -1)
    dim = pts.shape[1]
    rng = np.random.default_rng(seed)
    shifts = np.concatenate(
        [np.zeros((1, dim)), rng.random((offsets, dim))], axis=0
    )
    counts = np.empty(len(scales))
    for k, h in enumerate(scales):
        per_offset = []
        for off in shifts:
            cells = np.floor((pts - off * h) / h).astype(np.int64)
            if dim == 1:
                keys = cells[:, 0]
            else:
                # pack the pair into one integer so the dedup runs on a
                # flat array instead of row comparisons
                lo = cells.min(axis=0)
                span = int((cells[:, 1] - lo[1]).max()) + 1
                keys = (cells[:, 0] - lo[0]) * span + (cells[:, 1] - lo[1])
            per_offset.append(len(np.unique(keys)))
        # the box count is an infimum over grid placements, so keep the
        # best placement rather than averaging in the wasteful ones
        counts[k] = float(np.min(per_offset))
    x = np.log(1.0 / scales)
    y = np.log(counts)
    n = len(x)
    coeffs, residuals, *_ = np.polyfit(x, y, 1, full=True)
    slope = float(coeffs[0])
    if n > 2 and len(residuals):
        sigma2 = float(residuals[0]) / (n - 2)
        stderr = math.sqrt(sigma2 / float(np.sum((x - x.mean()) ** 2)))
    else:
        stderr = 0.0
    slope = min(max(slope, 0.0), 2.0)
    return BoxDimEstimate(scales, counts, slope, stderr)


def default_scales(cloud: PointCloud, levels: int = 5) -> np.ndarray:
    """Dyadic scale grid spanning from the cloud extent down toward (but
    safely above) the cloud resolution."""
    pts = np.asarray(cloud.points, float).reshape(len(cloud.points), -1)
    extent = float(np.max(np.ptp(pts, axis=0))) if len(pts) else 1.0
    top = extent / 4.0
    bottom = max(cloud.resolution * 4.0, top / 2 ** (levels - 1))
    k = max(int(math.floor(math.log2(top / bottom))) + 1, 2)
    return top / 2.0 ** np.arange(k)


# ---------------------------------------------------------------------------
# desk-scale dimension experiments

@dataclass
class ExperimentReport:
    scenario: str
    seed: int
    hypotheses: Dict[str, str]
    results: Dict[str, object]

    def to_report(self) -> str:
        lines = [f"scenario: {self.scenario}", f"seed: {self.seed}"]
        for key, value in self.hypotheses.items():
            lines.append(f"hypothesis.{key}: {value}")
        for key, value in self.results.items():
            lines.append(f"result.{key}: {value}")
        return "\n".join(lines)


def _boxdim(cloud: PointCloud, scales=None, seed: int = 0) -> float:
    scales = default_scales(cloud) if scales is None else scales
    return box_dimension(cloud, scales, seed=seed).slope


def _affdim_bracket(ifs: AffineIFS, kind: SubshiftKind, tol: float = 0.02):
    try:
        return affinity_dimension(ifs, kind, tol=tol)
    except InconclusiveBracket as exc:
        return exc.bracket


def theorem_experiment(
    ifs: AffineIFS,
    scenario: str,
    seed: int = 0,
    epsilon: float = 1.0 / 128,
    budget: Optional[int] = None,
) -> ExperimentReport:
    """Empirical checks of the three dimension predictions.

    part1: box dimensions of the full and invertible attractors plus an
    angle sweep of projections.  part2: seeded random translations, box
    dimensions against affinity-dimension brackets of the full and
    invertible systems.  part3: box dimension of the full attractor against
    its projection onto the kernel-perpendicular of each rank-one letter."""
    if scenario not in ("part1", "part2", "part3"):
        raise PreconditionError(f"unknown scenario {scenario!r}")
    hypotheses = {
        "contractive": str(ifs.is_contractive()),
        "max_norm": f"{ifs.max_norm():.6g}",
        "strong_open_set_condition": "unknown (not checkable)",
    }
    results: Dict[str, object] = {}

    if scenario == "part2":
        hypotheses["max_norm_below_half"] = str(ifs.max_norm() < 0.5)
        rng = np.random.default_rng(seed)
        translations = rng.uniform(-1.0, 1.0, size=(len(ifs), 2))
        ifs = ifs.with_translations(translations)
        results["translations"] = translations.tolist()

    xprime = attractor_cloud(ifs, SubshiftKind.FULL, epsilon, budget)
    results["xprime_points"] = len(xprime)
    dim_xprime = _boxdim(xprime, seed=seed)
    results["boxdim_xprime"] = dim_xprime

    if scenario in ("part1", "part2"):
        inv = ifs.invertible_index
        if not inv:
            raise NotNonInvertible("experiment needs an invertible sub-system")
        x_cloud = attractor_cloud(ifs.restrict(inv), SubshiftKind.FULL, epsilon, budget)
        dim_x = _boxdim(x_cloud, seed=seed)
        results["boxdim_x"] = dim_x
        results["boxdim_difference"] = dim_xprime - dim_x

    if scenario == "part1":
        sweep = []
        for angle in np.linspace(0.0, math.pi, 32, endpoint=False):
            proj = project_cloud(xprime, Direction(float(angle)))
            sweep.append(_boxdim(proj, seed=seed))
        results["projection_dims"] = sweep
        results["projection_dim_min"] = min(sweep)
        results["projection_dim_max"] = max(sweep)

    if scenario == "part2":
        bracket_full = _affdim_bracket(ifs, SubshiftKind.FULL)
        bracket_inv = _affdim_bracket(ifs, SubshiftKind.INVERTIBLE)
        results["affdim_full_bracket"] = bracket_full
        results["affdim_invertible_bracket"] = bracket_inv
        results["midpoint_full"] = 0.5 * (bracket_full[0] + bracket_full[1])
        results["midpoint_invertible"] = 0.5 * (bracket_inv[0] + bracket_inv[1])

    if scenario == "part3":
        comparisons = []
        for i, m in enumerate(ifs.matrices):
            if m.rank(ifs.rank_tol) != 1:
                continue
            form = rank_one_factor(m, ifs.rank_tol)
            axis = form.kernel_line.perpendicular()
            proj = project_cloud(xprime, axis)
            comparisons.append(
                {
                    "letter": i,
                    "axis_angle": axis.angle,
                    "boxdim_projection": _boxdim(proj, seed=seed),
                }
            )
        if not comparisons:
            raise PreconditionError("part3 needs a rank-one letter")
        results["kernel_projections"] = comparisons
    return ExperimentReport(scenario, seed, hypotheses, results)


# ---------------------------------------------------------------------------
# cloud serialization

def write_cloud_csv(cloud: PointCloud, path: str) -> None:
    pts = np.asarray(cloud.points, float).reshape(len(cloud.points), -1)
    header = "x,y" if pts.shape[1] == 2 else "x"
    np.savetxt(path, pts, delimiter=",", header=header, comments="", fmt="%.12g")


def write_cloud_binary(cloud: PointCloud, path: str) -> None:
    """Little-endian float64 pairs behind an AFPC1 magic header."""
    pts = np.asarray(cloud.points, float).reshape(len(cloud.points), -1)
    if pts.shape[1] == 1:
        pts = np.concatenate([pts, np.zeros_like(pts)], axis=1)
    with open(path, "wb") as fh:
        fh.write(CLOUD_MAGIC)
        fh.write(struct.pack("<q", len(pts)))
        fh.write(pts.astype("<f8").tobytes())


def read_cloud_binary(path: str) -> np.ndarray:
    with open(path, "rb") as fh:
        magic = fh.read(len(CLOUD_MAGIC))
        if magic != CLOUD_MAGIC:
            raise PreconditionError("not an AFPC1 point cloud file")
        (count,) = struct.unpack("<q", fh.read(8))
        data = np.frombuffer(fh.read(count * 16), dtype="<f8")
    return data.reshape(count, 2)
