"""Structural classification of a matrix tuple: irreducibility, domination
certificates with the cone constant, strict affineness, joint spectral
radius bounds, and continuity predictions for the pressure."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    BudgetExceeded,
    NoInvertibleLetters,
    PreconditionError,
    RankZeroLetter,
)
from .ifs import AffineIFS, node_budget
from .mat2 import Direction, Mat2, rank_one_factor
from .stacks import expand_level, iter_product_levels, operator_norms, spectral_radii
from .symbolic import Word, has_infinite_nonzero_word, semigroup_has_rank_zero_product

PI = math.pi

#: Margin (in radians on the projective circle) by which cone images must
#: clear the cone boundary for a certificate to be issued.
STRICT_MARGIN = 1e-9

#: Safety factor applied to the observed cone constant.
KAPPA_SAFETY = 0.99


# ---------------------------------------------------------------------------
# projective intervals

def _norm_angle(theta: float) -> float:
    return theta % PI


def interval_contains(lo: float, hi: float, theta: float, margin: float = 0.0) -> bool:
    """Membership in the projective interval from lo to hi (hi > lo, arc
    length hi - lo < pi), with an optional interior margin."""
    rel = lo + ((theta - lo) % PI)
    return lo + margin <= rel <= hi - margin


def _projective_angle(A: Mat2, theta: float) -> float:
    x, y = math.cos(theta), math.sin(theta)
    u = A.a * x + A.b * y
    v = A.c * x + A.d * y
    return math.atan2(v, u) % PI


def _image_interval(A: Mat2, lo: float, hi: float) -> Tuple[float, float]:
    """Image of a projective interval under an invertible matrix.

    The projective action is a circle homeomorphism, orientation given by
    the determinant sign, so images of endpoints bound the image arc."""
    fa = _projective_angle(A, lo)
    fb = _projective_angle(A, hi)
    if A.det() > 0:
        start, end = fa, fb
    else:
        start, end = fb, fa
    length = (end - start) % PI
    return start, start + length


@dataclass(frozen=True)
class DominationCertificate:
    """A strongly invariant multicone with a verified cone constant.

    intervals are (lo, hi) pairs on the projective circle of circumference
    pi; kappa lower-bounds the ratio of the restricted norm to the full
    norm over the cone for all words up to verified_depth."""

    intervals: Tuple[Tuple[float, float], ...]
    kappa: float
    verified_depth: int

    def contains(self, theta: float, margin: float = 0.0) -> bool:
        return any(interval_contains(lo, hi, theta, margin) for lo, hi in self.intervals)


def _arc_inside_multicone(
    intervals: Sequence[Tuple[float, float]], start: float, end: float, margin: float
) -> bool:
    """A connected arc lies in the multicone iff it fits inside one interval."""
    length = end - start
    for lo, hi in intervals:
        rel = lo + ((start - lo) % PI)
        if lo + margin <= rel and rel + length <= hi - margin:
            return True
    return False


def _check_strict_invariance(
    ifs: AffineIFS, intervals: Sequence[Tuple[float, float]], margin: float = STRICT_MARGIN
) -> bool:
    for m in ifs.matrices:
        rank = m.rank(ifs.rank_tol)
        if rank == 0:
            return False
        if rank == 1:
            image = rank_one_factor(m, ifs.rank_tol).image_line.angle
            if not any(
                interval_contains(lo, hi, image, margin) for lo, hi in intervals
            ):
                return False
            continue
        for lo, hi in intervals:
            start, end = _image_interval(m, lo, hi)
            if not _arc_inside_multicone(intervals, start, end, margin):
                return False
    return True


def _candidate_angles(ifs: AffineIFS, max_words: int = 20000) -> np.ndarray:
    """Leading image directions of long letter products.

    For a dominated tuple the top left singular direction of A_w converges,
    as the word grows, into the attracting multicone, so these angles
    accumulate exactly where the cone components sit.  Products whose two
    singular values nearly coincide carry no direction and are skipped."""
    letters = ifs.matrix_stack()
    depth = 1
    while len(ifs) ** (depth + 1) <= max_words and depth < 24:
        depth += 1
    collected = []
    for level, prods in iter_product_levels(letters, depth):
        if level < depth - 2:
            continue
        gram = np.einsum("mij,mkj->mik", prods, prods)  # A A^T per product
        a, b, d = gram[:, 0, 0], gram[:, 0, 1], gram[:, 1, 1]
        tr = a + d
        gap2 = (a - d) ** 2 + 4.0 * b * b
        keep = (tr > 0) & (gap2 > (1e-9 * tr) ** 2)
        # principal-axis angle of the symmetric matrix A A^T
        collected.append(0.5 * np.arctan2(2.0 * b[keep], (a - d)[keep]) % PI)
    if not collected:
        return np.array([])
    angles = np.concatenate(collected)
    angles = np.unique(np.round(angles / 1e-6).astype(np.int64)) * 1e-6
    return np.sort(angles % PI)


def _cluster_intervals(
    angles: np.ndarray, max_intervals: int = 8
) -> Optional[List[Tuple[float, float]]]:
    if len(angles) == 0:
        return None
    angles = np.sort(angles % PI)
    gaps = np.diff(np.concatenate([angles, [angles[0] + PI]]))
    biggest = np.max(gaps)
    if biggest < 0.05:
        return None  # orbit fills the circle; no invariant multicone visible
    # cut at every gap comparable to the biggest one, up to the interval cap
    order = np.argsort(gaps)[::-1]
    cuts = [int(order[0])]
    for idx in order[1:]:
        if len(cuts) >= max_intervals:
            break
        if gaps[idx] >= max(0.25 * biggest, 0.02):
            cuts.append(int(idx))
    cuts = sorted(cuts)
    k = len(angles)
    out: List[Tuple[float, float]] = []
    for a, b in zip(cuts, cuts[1:] + [cuts[0]]):
        # the cluster runs from the angle after cut a up to the angle at cut b
        lo = float(angles[(a + 1) % k])
        hi = lo + ((float(angles[b]) - lo) % PI)
        lo -= min(0.3 * float(gaps[a]), 0.15)
        hi += min(0.3 * float(gaps[b]), 0.15)
        if hi - lo >= PI:
            return None
        lo_n = _norm_angle(lo)
        out.append((lo_n, lo_n + (hi - lo)))
    return out


def _kappa_floor(
    ifs: AffineIFS,
    intervals: Sequence[Tuple[float, float]],
    depth: int,
    grid_per_interval: int = 256,
    budget: Optional[int] = None,
) -> float:
    """min over cone directions and words up to depth of |A_i x| / |A_i|."""
    thetas = np.concatenate(
        [np.linspace(lo, hi, grid_per_interval) % PI for lo, hi in intervals]
    )
    X = np.stack([np.cos(thetas), np.sin(thetas)])  # (2, G)
    letters = ifs.matrix_stack()
    kappa = 1.0
    for _, prods in iter_product_levels(letters, depth, budget=node_budget(budget)):
        norms = operator_norms(prods)
        live = norms > 0
        if not np.any(live):
            break
        P = prods[live]
        images = np.einsum("mij,jg->mig", P, X)
        restricted = np.sqrt(np.einsum("mig,mig->mg", images, images))
        ratios = restricted / norms[live][:, None]
        kappa = min(kappa, float(np.min(ratios)))
    return kappa


def find_domination_certificate(
    ifs: AffineIFS,
    verified_depth: int = 4,
    grid_per_interval: int = 256,
    max_intervals: int = 8,
) -> Optional[DominationCertificate]:
    """Search for a strongly invariant multicone; None means inconclusive.

    The candidate cone comes from the forward orbit of a direction grid,
    padded into closed intervals; certification re-checks strict invariance
    by pushing interval endpoints through the projective action."""
    if any(m.rank(ifs.rank_tol) == 0 for m in ifs.matrices):
        raise RankZeroLetter("domination requires every letter matrix nonzero")
    angles = _candidate_angles(ifs)
    if len(angles) == 0:
        return None
    # fewer, fatter intervals first: a single padded interval usually works
    # and its invariance is the cheapest to confirm
    clustered = None
    for k in sorted({1, 2, 4, max_intervals}):
        if k > max_intervals:
            break
        trial = _cluster_intervals(angles, k)
        if trial is not None and _check_strict_invariance(ifs, trial):
            clustered = trial
            break
    if clustered is None:
        return None
    # keep words enumerated for the kappa floor within a modest budget
    depth = verified_depth
    while len(ifs) ** depth > 20000 and depth > 1:
        depth -= 1
    kappa = _kappa_floor(ifs, clustered, depth, grid_per_interval)
    if kappa <= 0.0:
        return None
    return DominationCertificate(tuple(clustered), KAPPA_SAFETY * kappa, depth)


def verify_certificate(
    ifs: AffineIFS,
    cert: DominationCertificate,
    grid_scale: int = 1,
    extra_depth: int = 0,
) -> bool:
    """Re-check a certificate, optionally at denser grid and deeper words."""
    if not _check_strict_invariance(ifs, cert.intervals):
        return False
    depth = cert.verified_depth + extra_depth
    while len(ifs) ** depth > 200000 and depth > 1:
        depth -= 1
    kappa = _kappa_floor(ifs, cert.intervals, depth, 256 * grid_scale)
    # the stated floor must survive the denser grid and the deeper words
    return kappa >= cert.kappa - 1e-12


# ---------------------------------------------------------------------------
# irreducibility

def _is_scalar_like(m: Mat2, tol: float) -> bool:
    scale = m.max_abs_entry()
    if scale == 0.0:
        return True
    return abs(m.b) <= tol * scale and abs(m.c) <= tol * scale and abs(m.a - m.d) <= tol * scale


def _fixed_lines(m: Mat2, tol: float) -> List[Direction]:
    """Real eigendirections of a non-scalar matrix (at most two lines)."""
    t, det = m.trace(), m.det()
    scale = max(m.max_abs_entry(), 1e-300)
    disc = t * t - 4.0 * det
    if disc < -tol * scale * scale:
        return []
    sq = math.sqrt(max(disc, 0.0))
    lines: List[Direction] = []
    for lam in ((t + sq) / 2.0, (t - sq) / 2.0):
        rows = [(m.a - lam, m.b), (m.c, m.d - lam)]
        row = max(rows, key=lambda r: r[0] * r[0] + r[1] * r[1])
        x = np.array([-row[1], row[0]])
        if np.hypot(*x) > tol * scale:
            d = Direction.of_vector(x)
            if all(d.distance(other) > 1e-9 for other in lines):
                lines.append(d)
    return lines


def _line_invariant(m: Mat2, line: Direction, tol: float = 1e-9) -> bool:
    x = line.unit_vector()
    y = m.apply(x)
    norm_y = float(np.hypot(*y))
    scale = max(m.norm(), 1e-300)
    if norm_y <= tol * scale:
        return True  # the line maps into the origin, hence into itself
    cross = abs(y[0] * x[1] - y[1] * x[0])
    return cross <= tol * norm_y


@dataclass(frozen=True)
class IrreducibilityResult:
    irreducible: bool
    common_line: Optional[Direction] = None


def is_irreducible(ifs: AffineIFS, tol: float = 1e-9) -> IrreducibilityResult:
    """No line is invariant under every letter.

    Candidate lines come from the first letter that does not fix every line;
    scalar multiples of the identity (and zero matrices) fix all lines."""
    mats = ifs.matrices
    if all(m.max_abs_entry() == 0.0 for m in mats):
        raise PreconditionError("is_irreducible requires a nonzero letter")
    distinguishing = None
    for m in mats:
        if not _is_scalar_like(m, tol):
            distinguishing = m
            break
    if distinguishing is None:
        return IrreducibilityResult(False, Direction(0.0))
    for candidate in _fixed_lines(distinguishing, tol):
        if all(_line_invariant(m, candidate, tol) for m in mats):
            return IrreducibilityResult(False, candidate)
    return IrreducibilityResult(True)


# ---------------------------------------------------------------------------
# strict affineness and the joint spectral radius

@dataclass(frozen=True)
class StrictAffineResult:
    status: str  # "witness" | "inconclusive"
    witness: Optional[Word] = None


def is_strictly_affine(
    ifs: AffineIFS, max_depth: int = 8, budget: Optional[int] = None
) -> StrictAffineResult:
    """Search invertible-letter products of increasing length for a proximal
    one (two real eigenvalues with distinct absolute values)."""
    letters = ifs.invertible_index
    if not letters:
        raise NoInvertibleLetters("strict affineness is defined on GL2 letters")
    budget = node_budget(budget)
    frontier: List[Tuple[Word, Mat2]] = [((), Mat2.identity())]
    nodes = 0
    for _ in range(max_depth):
        next_frontier = []
        for word, prod in frontier:
            for i in letters:
                nodes += 1
                if nodes > budget:
                    raise BudgetExceeded("proximal search exceeded budget", nodes, budget)
                child = prod @ ifs.matrices[i]
                t, det = child.trace(), child.det()
                if det != 0.0 and t * t > 4.0 * det and t != 0.0:
                    return StrictAffineResult("witness", word + (i,))
                next_frontier.append((word + (i,), child))
        frontier = next_frontier
    return StrictAffineResult("inconclusive")


def jsr_bounds(
    ifs: AffineIFS, n: int, budget: Optional[int] = None
) -> Tuple[float, float]:
    """Certified bracket for the joint spectral radius.

    Upper: Fekete infimum of (max product norm)^(1/k) over k <= n.
    Lower: best (spectral radius)^(1/k) among enumerated products."""
    if n < 1:
        raise ValueError("jsr_bounds requires depth n >= 1")
    letters = ifs.matrix_stack()
    upper = math.inf
    lower = 0.0
    for depth, prods in iter_product_levels(letters, n, budget=node_budget(budget)):
        if len(prods) == 0:
            return 0.0, 0.0
        max_norm = float(np.max(operator_norms(prods)))
        if max_norm == 0.0:
            return 0.0, 0.0
        upper = min(upper, max_norm ** (1.0 / depth))
        max_rho = float(np.max(spectral_radii(prods)))
        if max_rho > 0.0:
            lower = max(lower, max_rho ** (1.0 / depth))
    return lower, min(upper, max(upper, lower))


# ---------------------------------------------------------------------------
# the full classification

@dataclass
class TupleClassification:
    rank_profile: List[int]
    contains_rank_one: bool
    contains_invertible: bool
    irreducible: IrreducibilityResult
    dominated: Optional[DominationCertificate]
    strongly_irreducible: str  # "yes" | "inconclusive"
    strictly_affine: Optional[StrictAffineResult]  # None when no GL2 letters
    continuity_at_zero: Optional[bool]
    continuity_at_zero_reason: str
    continuity_at_one: Optional[bool]
    continuity_at_one_reason: str

    def to_report(self) -> str:
        lines = []
        lines.append("rank_profile: " + ",".join(str(r) for r in self.rank_profile))
        lines.append(f"contains_rank_one: {self.contains_rank_one}")
        lines.append(f"contains_invertible: {self.contains_invertible}")
        if self.irreducible.irreducible:
            lines.append("irreducible: yes")
        else:
            lines.append(
                f"irreducible: no common_line_angle={self.irreducible.common_line.angle:.12g}"
            )
        if self.dominated is not None:
            cone = ";".join(f"[{lo:.12g},{hi:.12g}]" for lo, hi in self.dominated.intervals)
            lines.append(
                f"dominated: certified kappa={self.dominated.kappa:.12g} "
                f"depth={self.dominated.verified_depth} multicone={cone}"
            )
        else:
            lines.append("dominated: inconclusive")
        lines.append(f"strongly_irreducible: {self.strongly_irreducible}")
        if self.strictly_affine is None:
            lines.append("strictly_affine: no_invertible_letters")
        elif self.strictly_affine.status == "witness":
            word = "".join(str(l) for l in self.strictly_affine.witness)
            lines.append(f"strictly_affine: witness word={word}")
        else:
            lines.append("strictly_affine: inconclusive")
        for label, value, reason in (
            ("continuity_at_zero", self.continuity_at_zero, self.continuity_at_zero_reason),
            ("continuity_at_one", self.continuity_at_one, self.continuity_at_one_reason),
        ):
            shown = "unavailable" if value is None else str(value)
            lines.append(f"{label}: {shown} ({reason})")
        return "\n".join(lines)


def classify(ifs: AffineIFS) -> TupleClassification:
    tol = ifs.rank_tol
    ranks = [m.rank(tol) for m in ifs.matrices]
    contains_rank_one = any(r == 1 for r in ranks)
    contains_invertible = any(r == 2 for r in ranks)

    irr = is_irreducible(ifs) if any(r > 0 for r in ranks) else IrreducibilityResult(False, Direction(0.0))
    dom = None
    if all(r > 0 for r in ranks):
        dom = find_domination_certificate(ifs)

    strongly = (
        "yes"
        if dom is not None and irr.irreducible and all(r == 2 for r in ranks)
        else "inconclusive"
    )

    strictly = None
    if contains_invertible:
        strictly = is_strictly_affine(ifs)

    zero_product = semigroup_has_rank_zero_product(ifs)
    if zero_product is True:
        cont_zero, zero_reason = False, "a rank-zero product exists in the semigroup"
    elif zero_product is False:
        cont_zero, zero_reason = True, "no product of the letters is the zero matrix"
    else:
        cont_zero, zero_reason = None, "semigroup search hit its state cap"

    if dom is not None or irr.irreducible:
        cont_one = not contains_rank_one
        one_reason = (
            "dominated-or-irreducible tuple; continuity at 1 fails exactly "
            "when a rank-one letter is present"
        )
    else:
        cont_one, one_reason = None, "neither domination nor irreducibility established"

    return TupleClassification(
        rank_profile=ranks,
        contains_rank_one=contains_rank_one,
        contains_invertible=contains_invertible,
        irreducible=irr,
        dominated=dom,
        strongly_irreducible=strongly,
        strictly_affine=strictly,
        continuity_at_zero=cont_zero,
        continuity_at_zero_reason=zero_reason,
        continuity_at_one=cont_one,
        continuity_at_one_reason=one_reason,
    )
