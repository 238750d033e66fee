"""Certified subadditive pressure, piecewise dispatch, affinity dimension,
pressure-gap certification, Gibbs cylinder weights and entropy/energy
diagnostics.

Upper bounds come from Fekete's infimum over finite-level sums; lower
bounds come from a ladder of certificates (conformal exactness, a
domination cone constant, periodic-orbit eigenvalue rates).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .classify import DominationCertificate, verify_certificate
from .errors import (
    DepthMismatch,
    EmptySigma,
    InconclusiveBracket,
    InvalidCertificate,
    MissingInvertible,
    MissingRankOne,
    NotContractive,
    PreconditionError,
)
from .ifs import AffineIFS, node_budget
from .mat2 import Mat2, svf_phi
from .stacks import iter_product_levels, operator_norms, phi_values
from .symbolic import (
    SubshiftKind,
    Word,
    ZERO_PRODUCT_TOL,
    enumerate_level,
    has_infinite_nonzero_word,
    word_product,
)

NEG_INF = float("-inf")


@dataclass(frozen=True)
class PressureEstimate:
    s: float
    kind: SubshiftKind
    depth: int
    lower: float
    upper: float
    certificate: str  # none | exact-count | conformal | fixed-axis | domination | periodic-orbit

    def bracket_width(self) -> float:
        return self.upper - self.lower


def _kind_letters(ifs: AffineIFS, kind: SubshiftKind) -> List[int]:
    if kind is SubshiftKind.INVERTIBLE:
        return ifs.invertible_index
    return list(range(len(ifs)))


def _conformal_ratios(ifs: AffineIFS, letters: Sequence[int]) -> Optional[List[float]]:
    """Singular-value ratios when every requested letter is a scalar times
    an orthogonal matrix; None otherwise."""
    ratios = []
    for i in letters:
        r = ifs.matrices[i].is_conformal()
        if r is None:
            return None
        ratios.append(r)
    return ratios


def _fixed_axis_norms(
    ifs: AffineIFS, letters: Sequence[int], tol: float = 1e-12
) -> Optional[List[float]]:
    """Letter norms when one direction is an eigenvector of every letter
    with eigenvalue modulus equal to its operator norm.

    Along such an axis norms multiply exactly, so the level sums dominate
    (sum of norm^s)^n and the pressure lower bound is closed-form."""
    mats = [ifs.matrices[i].to_array() for i in letters]
    norms = [ifs.matrices[i].norm() for i in letters]
    first = next((m for m, r in zip(mats, norms) if r > 0.0), None)
    if first is None:
        return None
    eigvals, eigvecs = np.linalg.eig(first)
    for k in range(2):
        if abs(eigvals[k].imag) > tol:
            continue
        x = eigvecs[:, k].real
        nx = float(np.hypot(*x))
        if nx == 0.0:
            continue
        x = x / nx
        ok = True
        for m, r in zip(mats, norms):
            y = m @ x
            ny = float(np.hypot(*y))
            if ny <= tol and r <= tol:
                continue  # zero letter, vacuously fine
            cross = abs(y[0] * x[1] - y[1] * x[0])
            if ny < r * (1.0 - 1e-12) or cross > tol * max(ny, 1.0):
                ok = False
                break
        if ok:
            return norms
    return None


def _level_log_sums(
    ifs: AffineIFS,
    kind: SubshiftKind,
    s: float,
    n: int,
    budget: Optional[int] = None,
) -> List[float]:
    """log of the level sums of the singular value function, depths 1..n.

    Sigma pruning drops structurally-zero products; for the full shift they
    stay in but contribute zero anyway for s > 0."""
    letters_idx = _kind_letters(ifs, kind)
    if not letters_idx:
        return [NEG_INF] * n
    letters = np.stack([ifs.matrices[i].to_array() for i in letters_idx])
    prune = ZERO_PRODUCT_TOL if kind is SubshiftKind.SIGMA else None
    out = []
    for depth, prods in iter_product_levels(
        letters, n, prune_below=prune, budget=node_budget(budget)
    ):
        if len(prods) == 0:
            out.append(NEG_INF)
            continue
        phi = phi_values(prods, s)
        top = float(np.max(phi))
        if top <= 0.0:
            out.append(NEG_INF)
        else:
            out.append(math.log(top) + math.log(float(np.sum(phi / top))))
    while len(out) < n:
        out.append(NEG_INF)
    return out


def _orbit_rate(B: Mat2, length: int, s: float) -> float:
    """Asymptotic per-letter rate of log phi^s along powers of the product B,
    in closed form from the eigenvalue moduli of B."""
    rho = B.spectral_radius()
    det = abs(B.det())
    lam1 = rho
    lam2 = det / rho if rho > 0.0 else 0.0
    if s == 0.0:
        return 0.0
    if s <= 1.0:
        rate = s * math.log(lam1) if lam1 > 0.0 else NEG_INF
    elif s <= 2.0:
        if lam1 > 0.0 and lam2 > 0.0:
            rate = math.log(lam1) + (s - 1.0) * math.log(lam2)
        else:
            rate = NEG_INF
    else:
        rate = (s / 2.0) * math.log(det) if det > 0.0 else NEG_INF
    return rate / length if rate != NEG_INF else NEG_INF


def periodic_orbit_lower(
    ifs: AffineIFS, kind: SubshiftKind, s: float, max_len: int = 3
) -> float:
    """Best lower bound from a single periodic word: the pressure dominates
    the phi^s growth rate along powers of any admissible word."""
    letters = _kind_letters(ifs, kind)
    if not letters:
        return NEG_INF
    best = NEG_INF
    frontier: List[Tuple[Word, Mat2]] = [((), Mat2.identity())]
    for _ in range(max_len):
        next_frontier = []
        for word, prod in frontier:
            for i in letters:
                child = prod @ ifs.matrices[i]
                w = word + (i,)
                next_frontier.append((w, child))
                if kind is not SubshiftKind.FULL and child.spectral_radius() <= 0.0:
                    # the periodic word must stay inside the subshift
                    continue
                best = max(best, _orbit_rate(child, len(w), s))
        frontier = next_frontier
    return best


def pressure_estimate(
    ifs: AffineIFS,
    kind: SubshiftKind,
    s: float,
    n: int,
    cert: Optional[DominationCertificate] = None,
    budget: Optional[int] = None,
    check_cert: bool = True,
) -> PressureEstimate:
    """Certified lower/upper bounds for the pressure at exponent s, depth n."""
    if s < 0:
        raise PreconditionError("pressure requires s >= 0")
    if n < 1:
        raise ValueError("pressure_estimate requires depth n >= 1")
    letters = _kind_letters(ifs, kind)

    # exact counting when the subshift is a full shift on its alphabet
    if s == 0.0 and kind in (SubshiftKind.FULL, SubshiftKind.INVERTIBLE):
        if not letters:
            return PressureEstimate(s, kind, n, NEG_INF, NEG_INF, "none")
        value = math.log(len(letters))
        return PressureEstimate(s, kind, n, value, value, "exact-count")

    if kind is SubshiftKind.INVERTIBLE and not letters:
        return PressureEstimate(s, kind, n, NEG_INF, NEG_INF, "none")
    if s > 1.0 and not ifs.invertible_index:
        # rank <= 1 everywhere forces phi^s = 0 beyond s = 1
        return PressureEstimate(s, kind, n, NEG_INF, NEG_INF, "none")

    log_sums = _level_log_sums(ifs, kind, s, n, budget=budget)
    upper = min(ls / (k + 1) for k, ls in enumerate(log_sums))
    if upper == NEG_INF:
        return PressureEstimate(s, kind, n, NEG_INF, NEG_INF, "none")

    lower = NEG_INF
    provenance = "none"

    ratios = _conformal_ratios(ifs, letters)
    if ratios is not None:
        if s == 0.0:
            positive = [r for r in ratios if r > 0.0]
            # Sigma at s = 0 counts words with nonzero products
            total = len(positive) if kind is SubshiftKind.SIGMA else len(ratios)
        else:
            total = sum(r**s for r in ratios if r > 0.0)
        exact = math.log(total) if total > 0.0 else NEG_INF
        # norms multiply exactly, so the closed form is the pressure itself;
        # replace the rounded Fekete value to keep lower == upper
        lower = upper = exact
        provenance = "conformal"
    else:
        if s <= 1.0:
            axis_norms = _fixed_axis_norms(ifs, letters)
            if axis_norms is not None:
                if s == 0.0:
                    total = float(sum(1 for r in axis_norms if r > 0.0))
                else:
                    total = sum(r**s for r in axis_norms if r > 0.0)
                cand = math.log(total) if total > 0.0 else NEG_INF
                if cand > lower:
                    lower, provenance = cand, "fixed-axis"
        if cert is not None and s <= 2.0:
            if check_cert and not verify_certificate(ifs, cert):
                raise InvalidCertificate(
                    "domination certificate failed spot re-verification"
                )
            cand = log_sums[-1] / n + (2.0 / n) * math.log(cert.kappa)
            if cand > lower:
                lower, provenance = cand, "domination"
        orbit = periodic_orbit_lower(ifs, kind, s)
        if orbit > lower:
            lower, provenance = orbit, "periodic-orbit"
        if (
            lower == NEG_INF
            and s == 0.0
            and kind is SubshiftKind.SIGMA
            and has_infinite_nonzero_word(ifs).status == "yes"
        ):
            lower, provenance = 0.0, "periodic-orbit"

    if lower > upper:  # tiny float slack; bounds cross only by rounding
        lower = upper
    return PressureEstimate(s, kind, n, lower, upper, provenance)


def pressure_dispatch(
    ifs: AffineIFS,
    s: float,
    n: int,
    cert: Optional[DominationCertificate] = None,
    budget: Optional[int] = None,
) -> PressureEstimate:
    """Route the full-shift pressure through its piecewise representation:
    log #J at s = 0, the nonzero-product shift on (0, 1], the invertible
    shift beyond 1."""
    if s < 0:
        raise PreconditionError("pressure requires s >= 0")
    if s == 0.0:
        value = math.log(len(ifs))
        return PressureEstimate(s, SubshiftKind.FULL, n, value, value, "exact-count")
    if s <= 1.0:
        return pressure_estimate(ifs, SubshiftKind.SIGMA, s, n, cert=cert, budget=budget)
    return pressure_estimate(ifs, SubshiftKind.INVERTIBLE, s, n, cert=cert, budget=budget)


def affinity_dimension(
    ifs: AffineIFS,
    kind: SubshiftKind = SubshiftKind.FULL,
    tol: float = 1e-3,
    budget: Optional[int] = None,
    initial_depth: int = 6,
    max_depth: int = 22,
    cert: Optional[DominationCertificate] = None,
    auto_certify: bool = True,
) -> Tuple[float, float]:
    """Bracket the affinity dimension by bisection on certified pressure
    bounds, escalating depth when the bounds straddle zero."""
    if tol <= 0:
        raise PreconditionError("affinity_dimension requires tol > 0")
    if not ifs.is_contractive():
        raise NotContractive("affinity_dimension requires max matrix norm < 1")
    letters = _kind_letters(ifs, kind)
    if not letters:
        return (0.0, 0.0)

    if cert is None and auto_certify:
        if _conformal_ratios(ifs, letters) is None:
            from .classify import find_domination_certificate

            try:
                cert = find_domination_certificate(ifs)
            except PreconditionError:
                cert = None

    budget = node_budget(budget)
    lo, hi = 0.0, 4.0
    depth = initial_depth
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        est = pressure_estimate(
            ifs, kind, mid, depth, cert=cert, budget=budget, check_cert=False
        )
        if est.lower == 0.0 and est.upper == 0.0:
            # the pressure vanishes exactly at mid (conformal arithmetic);
            # strict monotonicity in s pins the dimension there
            return mid, mid
        if est.upper < 0.0:
            hi = mid
        elif est.lower > 0.0:
            lo = mid
        else:
            depth *= 2
            if depth > max_depth or len(letters) ** depth > budget:
                return _refine_stalled(
                    ifs, kind, lo, hi, min(depth // 2, max_depth), tol, cert, budget
                )
    return lo, hi


def _refine_stalled(ifs, kind, lo, hi, depth, tol, cert, budget):
    """Shrink a stalled bracket from both ends on a point grid.

    The bounds are monotone in s, so every grid point with a positive lower
    bound raises lo and the first with a negative upper bound caps hi; the
    bracket converges onto the plateau where the bound slack hides the sign."""
    for _ in range(8):
        if hi - lo <= tol:
            return lo, hi
        new_lo, new_hi = lo, hi
        for s in np.linspace(lo, hi, 9)[1:-1]:
            est = pressure_estimate(
                ifs, kind, float(s), depth, cert=cert, budget=budget, check_cert=False
            )
            if est.lower > 0.0:
                new_lo = max(new_lo, float(s))
            elif est.upper < 0.0:
                new_hi = min(new_hi, float(s))
                break
        if (new_lo, new_hi) == (lo, hi):
            break
        lo, hi = new_lo, new_hi
    if hi - lo <= tol:
        return lo, hi
    raise InconclusiveBracket(
        f"bisection stalled at bracket [{lo:.6g}, {hi:.6g}]",
        bracket=(lo, hi),
    )


@dataclass(frozen=True)
class GapResult:
    status: str  # "certified" | "inconclusive"
    s: float
    lower_full: Optional[float] = None
    upper_invertible: Optional[float] = None
    depth: Optional[int] = None


def pressure_gap(
    ifs: AffineIFS,
    s: float,
    max_depth: int = 14,
    budget: Optional[int] = None,
    cert: Optional[DominationCertificate] = None,
) -> GapResult:
    """Certify that the full-shift pressure strictly exceeds the invertible
    pressure at the given exponent, on this concrete instance."""
    if not (0.0 <= s <= 1.0):
        raise PreconditionError("pressure_gap is stated for 0 <= s <= 1")
    ranks = [m.rank(ifs.rank_tol) for m in ifs.matrices]
    if not any(r == 1 for r in ranks):
        raise MissingRankOne("pressure_gap requires a rank-one letter")
    inv = ifs.invertible_index
    if not inv:
        raise MissingInvertible("pressure_gap requires an invertible letter")

    if s == 0.0:
        return GapResult(
            "certified", s, math.log(len(ifs)), math.log(len(inv)), depth=0
        )

    conformal = _conformal_ratios(ifs, range(len(ifs))) is not None
    if cert is None and not conformal:
        from .classify import find_domination_certificate

        cert = find_domination_certificate(ifs)
        if cert is None:
            return GapResult("inconclusive", s)

    budget = node_budget(budget)
    full_letters = ifs.matrix_stack()
    inv_letters = np.stack([ifs.matrices[i].to_array() for i in inv])

    upper_inv = math.inf
    inv_iter = iter_product_levels(inv_letters, max_depth, budget=budget)
    full_iter = iter_product_levels(full_letters, max_depth, budget=budget)
    for depth in range(1, max_depth + 1):
        _, inv_prods = next(inv_iter)
        _, full_prods = next(full_iter)
        inv_phi = phi_values(inv_prods, s)
        total_inv = float(np.sum(inv_phi))
        if total_inv > 0.0:
            upper_inv = min(upper_inv, math.log(total_inv) / depth)
        full_phi = phi_values(full_prods, s)
        total_full = float(np.sum(full_phi))
        if total_full <= 0.0:
            return GapResult("inconclusive", s)
        if conformal:
            lower_full = math.log(total_full) / depth
        else:
            lower_full = (math.log(total_full) + 2.0 * math.log(cert.kappa)) / depth
        if lower_full > upper_inv:
            return GapResult("certified", s, lower_full, upper_inv, depth)
    return GapResult("inconclusive", s, lower_full, upper_inv, max_depth)


# ---------------------------------------------------------------------------
# cylinder measures

@dataclass(frozen=True)
class CylinderMeasure:
    depth: int
    words: Tuple[Word, ...]
    weights: np.ndarray
    provenance: str
    kind: SubshiftKind = SubshiftKind.SIGMA

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if len(w) != len(self.words):
            raise DepthMismatch("weights and words have different lengths")
        if np.any(w < 0):
            raise PreconditionError("cylinder weights must be nonnegative")
        if abs(float(np.sum(w)) - 1.0) > 1e-12:
            raise PreconditionError("cylinder weights must sum to 1")
        if any(len(word) != self.depth for word in self.words):
            raise DepthMismatch("every word must have length equal to depth")
        object.__setattr__(self, "weights", w)


@dataclass(frozen=True)
class MeasureDiagnostics:
    entropy_rate: float
    energy_rate: float
    pressure_upper: float

    @property
    def defect(self) -> float:
        """Finite-depth Jensen slack: pressure_upper - entropy - energy."""
        return self.pressure_upper - (self.entropy_rate + self.energy_rate)


def gibbs_weights(ifs: AffineIFS, s: float, n: int, budget: Optional[int] = None) -> CylinderMeasure:
    """Depth-n surrogate of the Gibbs-type measure: weights proportional to
    the operator norm to the power s over nonzero-product words."""
    if not (0.0 < s <= 1.0):
        raise PreconditionError("gibbs_weights is stated for 0 < s <= 1")
    level = enumerate_level(ifs, SubshiftKind.SIGMA, n, budget=budget)
    if len(level) == 0:
        raise EmptySigma(f"no nonzero-product words at depth {n}")
    norms = np.array([m.norm() for _, m in level.entries])
    weights = norms**s
    weights = weights / float(np.sum(weights))
    return CylinderMeasure(n, tuple(level.words), weights, f"gibbs-phi(s={s:g})")


def uniform_measure(ifs: AffineIFS, kind: SubshiftKind, n: int) -> CylinderMeasure:
    level = enumerate_level(ifs, kind, n)
    if len(level) == 0:
        raise EmptySigma(f"no words at depth {n}")
    k = len(level)
    return CylinderMeasure(n, tuple(level.words), np.full(k, 1.0 / k), "uniform", kind)


def phi_proportional_measure(
    ifs: AffineIFS, kind: SubshiftKind, s: float, n: int
) -> CylinderMeasure:
    """Weights proportional to phi^s over the level set; the finite-depth
    equilibrium surrogate (attains equality in the Jensen inequality)."""
    level = enumerate_level(ifs, kind, n)
    phis = np.array([svf_phi(m, s) for _, m in level.entries])
    total = float(np.sum(phis))
    if total <= 0.0:
        raise EmptySigma(f"all level-{n} products have zero phi^{s:g}")
    keep = phis > 0.0
    words = tuple(w for w, k in zip(level.words, keep) if k)
    return CylinderMeasure(n, words, phis[keep] / total, f"phi-proportional(s={s:g})", kind)


def measure_diagnostics(ifs: AffineIFS, mu: CylinderMeasure, s: float) -> MeasureDiagnostics:
    """Entropy and energy rates of a cylinder measure, against the same-depth
    pressure upper bound; the finite-depth Gibbs/Jensen inequality
    h + energy <= pressure holds exactly at every depth."""
    n = mu.depth
    w = mu.weights
    positive = w > 0
    entropy = -float(np.sum(w[positive] * np.log(w[positive]))) / n
    energy = 0.0
    for weight, word in zip(w, mu.words):
        if weight <= 0:
            continue
        phi = svf_phi(word_product(ifs, word), s)
        if phi <= 0.0:
            return MeasureDiagnostics(entropy, NEG_INF, _depth_upper(ifs, mu.kind, s, n))
        energy += weight * math.log(phi)
    return MeasureDiagnostics(entropy, energy / n, _depth_upper(ifs, mu.kind, s, n))


def _depth_upper(ifs: AffineIFS, kind: SubshiftKind, s: float, n: int) -> float:
    log_sums = _level_log_sums(ifs, kind, s, n)
    return log_sums[-1] / n


def quasi_multiplicativity_report(
    ifs: AffineIFS, s: float, depths: Sequence[int] = (2, 4, 6, 8), samples: int = 200,
    seed: int = 0,
) -> Dict[int, Tuple[float, float]]:
    """Observed range of |A_ij|^s / (|A_i|^s |A_j|^s) over random word pairs.

    Monitored constants only; no bound is asserted."""
    rng = np.random.default_rng(seed)
    report: Dict[int, Tuple[float, float]] = {}
    for n in depths:
        half = n // 2
        if half < 1:
            continue
        level = enumerate_level(ifs, SubshiftKind.SIGMA, half)
        if len(level) == 0:
            continue
        ratios = []
        for _ in range(samples):
            wi, mi = level.entries[rng.integers(len(level))]
            wj, mj = level.entries[rng.integers(len(level))]
            denom = (mi.norm() * mj.norm()) ** s
            if denom > 0.0:
                ratios.append(((mi @ mj).norm() ** s) / denom)
        if ratios:
            report[n] = (min(ratios), max(ratios))
    return report
