"""End-to-end acceptance checks, one per stated criterion.

Each test prints a single pass/fail line with its measured runtime so a
full run doubles as a conformance report."""

import math
import time

import numpy as np

import affthermo as at
from affthermo import SubshiftKind
from affthermo.stacks import expand_level, phi_values, singular_value_pairs

from conftest import GAP_MATRICES, random_contractive_tuple, random_matrix

LOG32 = math.log(3) / math.log(2)


def report(num, label, ok, elapsed, detail=""):
    verdict = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"\nacceptance {num} [{label}]: {verdict} in {elapsed:.2f}s{suffix}")
    assert ok, f"criterion {num}: {label}{suffix}"


def test_criterion_1_zero_exponent_pressure():
    rng = np.random.default_rng(101)
    start = time.perf_counter()
    ok = True
    for _ in range(50):
        count = int(rng.integers(2, 7))
        ifs = random_contractive_tuple(rng, count)
        est = at.pressure_dispatch(ifs, 0.0, 4)
        if abs(est.lower - math.log(count)) > 1e-12 or est.lower != est.upper:
            ok = False
            break
    elapsed = time.perf_counter() - start
    report(1, "zero-exponent pressure equals log #J", ok and elapsed < 1.0, elapsed)


def test_criterion_2_discontinuity_at_one():
    ifs = at.AffineIFS.from_matrices([[[1, 0], [0, 0]], [[1, 0], [0, 1]]])
    start = time.perf_counter()
    ok = True
    for n in range(1, 13):
        est = at.pressure_dispatch(ifs, 1.0, n)
        if abs(est.lower - math.log(2)) > 1e-12 or abs(est.upper - math.log(2)) > 1e-12:
            ok = False
    for s in (1.25, 1.5, 2.0):
        for n in range(1, 13):
            est = at.pressure_dispatch(ifs, s, n)
            if est.lower != 0.0 or est.upper != 0.0:
                ok = False
    elapsed = time.perf_counter() - start
    report(2, "pressure log 2 at s=1 then 0 beyond", ok and elapsed < 1.0, elapsed)


def test_criterion_3_sigma_structure():
    ifs = at.AffineIFS.from_matrices([[[0, 1], [0, 0]], [[0, 0], [0, 1]]])
    start = time.perf_counter()
    ok = True
    previous = None
    for n in range(1, 13):
        words = set(at.enumerate_level(ifs, SubshiftKind.SIGMA, n).words)
        if words != {(0,) + (1,) * (n - 1), (1,) * n}:
            ok = False
        if previous is not None and any(at.shift(w) not in previous for w in words):
            ok = False
        previous = words
    elapsed = time.perf_counter() - start
    report(3, "two-point nonzero-product shift", ok, elapsed)


def test_criterion_4_conformal_affinity_dimension(sierpinski):
    start = time.perf_counter()
    lo, hi = at.affinity_dimension(sierpinski, SubshiftKind.FULL, tol=1e-3)
    elapsed = time.perf_counter() - start
    ok = hi - lo <= 1e-3 and lo <= LOG32 <= hi and elapsed < 5.0
    report(4, "affinity dimension brackets log3/log2", ok, elapsed,
           f"bracket [{lo:.6f}, {hi:.6f}]")


def test_criterion_5_certified_pressure_gap():
    ifs = at.AffineIFS.from_matrices(GAP_MATRICES)
    start = time.perf_counter()
    result = at.pressure_gap(ifs, 1.0, max_depth=14)
    elapsed = time.perf_counter() - start
    ok = (
        result.status == "certified"
        and result.lower_full > result.upper_invertible
        and result.depth <= 14
        and elapsed < 60.0
    )
    report(5, "certified full-vs-invertible pressure gap", ok, elapsed,
           f"lower {result.lower_full:.6f} > upper {result.upper_invertible:.6f} "
           f"at depth {result.depth}")


def test_criterion_6_property_suites():
    rng = np.random.default_rng(106)
    start = time.perf_counter()
    failures = []

    # phi submultiplicativity, 10^4 random pairs across the s grid
    A = np.stack([random_matrix(rng) for _ in range(10_000)])
    B = np.stack([random_matrix(rng) for _ in range(10_000)])
    AB = np.einsum("mij,mjk->mik", A, B)
    for s in (0.0, 0.3, 1.0, 1.5, 2.0, 2.7):
        lhs = phi_values(AB, s)
        rhs = phi_values(A, s) * phi_values(B, s)
        if not np.all(lhs <= rhs * (1 + 1e-9) + 1e-300):
            failures.append(f"submultiplicativity at s={s}")

    # singular-value identities against the library svd, 10^4 cases
    a1, a2 = singular_value_pairs(A)
    dets = np.abs(np.linalg.det(A))
    norms = np.linalg.norm(A, 2, axis=(1, 2))
    if not np.allclose(a1 * a2, dets, rtol=1e-9, atol=1e-12):
        failures.append("alpha1*alpha2 = |det|")
    if not np.allclose(a1, norms, rtol=1e-10):
        failures.append("alpha1 = operator norm")

    # rank-one reconstruction and the idempotency identity, 10^4 cases
    for k in range(10_000):
        v = rng.standard_normal(2)
        w = rng.standard_normal(2)
        m = at.Mat2.from_array(np.outer(v, w))
        if m.rank() != 1:
            continue
        form = at.rank_one_factor(m)
        err = np.linalg.norm(form.reconstruct().to_array() - m.to_array(), 2)
        if err > 1e-10 * m.norm():
            failures.append(f"reconstruction case {k}")
            break
        if not form.nilpotent:
            sq = (m @ m).to_array()
            if not np.allclose(sq, form.scale * m.to_array(), rtol=1e-8, atol=1e-12):
                failures.append(f"A^2 = <v,w>A case {k}")
                break

    # finite-depth Jensen inequality and phi-weight equality, 10^4 cases
    pool = [random_contractive_tuple(rng, int(rng.integers(2, 4))) for _ in range(20)]
    levels = []
    for ifs in pool:
        prods = ifs.matrix_stack()
        for _ in range(2):  # depth 3 level products
            prods = expand_level(prods, ifs.matrix_stack()).reshape(-1, 2, 2)
        levels.append(prods)
    n = 3
    for case in range(10_000):
        idx = case % len(pool)
        prods = levels[idx]
        s = float(rng.uniform(0.05, 2.5))
        phi = phi_values(prods, s)
        total = float(np.sum(phi))
        if total <= 0.0:
            continue
        pressure_n = math.log(total) / n
        keep = phi > 0.0
        w = rng.dirichlet(np.ones(int(np.sum(keep))))
        h = -float(np.sum(w[w > 0] * np.log(w[w > 0]))) / n
        energy = float(np.sum(w * np.log(phi[keep]))) / n
        if h + energy > pressure_n + 1e-9:
            failures.append(f"Jensen case {case}")
            break
        weq = phi[keep] / total
        heq = -float(np.sum(weq * np.log(weq))) / n
        eeq = float(np.sum(weq * np.log(phi[keep]))) / n
        if abs(heq + eeq - pressure_n) > 1e-9:
            failures.append(f"Jensen equality case {case}")
            break

    # Fekete monotonicity of upper bounds, 10^4 (tuple, s, depth) cases
    for case in range(2000):
        ifs = random_contractive_tuple(rng, 2)
        s = float(rng.uniform(0.0, 2.5))
        prev = math.inf
        for depth in range(1, 6):
            upper = at.pressure_estimate(ifs, SubshiftKind.FULL, s, depth).upper
            if upper > prev + 1e-12:
                failures.append(f"Fekete case {case}")
                break
            prev = upper
        if failures and failures[-1].startswith("Fekete"):
            break

    # JSR bracket monotonicity, 10^4 (tuple, depth) cases
    for case in range(2500):
        ifs = random_contractive_tuple(rng, 2)
        lo_prev, hi_prev = 0.0, math.inf
        for depth in range(1, 5):
            lo, hi = at.jsr_bounds(ifs, depth)
            if lo < lo_prev - 1e-12 or hi > hi_prev + 1e-12 or lo > hi + 1e-12:
                failures.append(f"JSR case {case}")
                break
            lo_prev, hi_prev = lo, hi
        if failures and failures[-1].startswith("JSR"):
            break

    elapsed = time.perf_counter() - start
    report(6, "property suites over random instances", not failures, elapsed,
           "; ".join(failures) if failures else "all suites passed")


def test_criterion_7_box_counting_sanity(sierpinski):
    start = time.perf_counter()
    cloud = at.attractor_cloud(sierpinski, SubshiftKind.FULL, 1 / 256)
    est = at.box_dimension(cloud, [1 / 8, 1 / 16, 1 / 32, 1 / 64])
    t_gasket = time.perf_counter() - start
    ok_gasket = abs(est.slope - 1.585) <= 0.05 and t_gasket < 30.0

    start2 = time.perf_counter()
    square = at.AffineIFS.from_matrices(
        [[[0.5, 0], [0, 0.5]]] * 4,
        [[0, 0], [0.5, 0], [0, 0.5], [0.5, 0.5]],
    )
    cloud2 = at.attractor_cloud(square, SubshiftKind.FULL, 1 / 256)
    est2 = at.box_dimension(cloud2, [1 / 8, 1 / 16, 1 / 32, 1 / 64])
    t_square = time.perf_counter() - start2
    ok_square = abs(est2.slope - 2.0) <= 0.1 and t_square < 30.0

    report(7, "box-counting sanity on gasket and square",
           ok_gasket and ok_square, t_gasket + t_square,
           f"gasket {est.slope:.4f}, square {est2.slope:.4f}")


def test_criterion_8_inhomogeneous_decomposition(gap_tuple):
    eps = 1 / 128
    start = time.perf_counter()
    _, _, recon = at.condensation_decomposition(gap_tuple, eps)
    direct = at.attractor_cloud(gap_tuple, SubshiftKind.FULL, eps)
    dist = at.hausdorff_distance(direct, recon)
    elapsed = time.perf_counter() - start
    ok = dist <= 2 * eps and elapsed < 60.0
    report(8, "condensation reconstruction within 2 epsilon", ok, elapsed,
           f"hausdorff {dist:.5f} vs bound {2 * eps:.5f}")


def test_criterion_9_desk_scale_experiments():
    base = at.AffineIFS.from_matrices(GAP_MATRICES)
    scaled = base.rescaled(0.45 / base.max_norm())
    start = time.perf_counter()

    part2 = at.theorem_experiment(scaled, "part2", seed=0, epsilon=1 / 128)
    r = part2.results
    diff_ok = r["boxdim_difference"] > 0.0
    full_ok = abs(r["boxdim_xprime"] - r["midpoint_full"]) <= 0.15
    inv_ok = abs(r["boxdim_x"] - r["midpoint_invertible"]) <= 0.15

    translated = scaled.with_translations(r["translations"])
    part3 = at.theorem_experiment(translated, "part3", seed=0, epsilon=1 / 128)
    r3 = part3.results
    proj_ok = all(
        abs(r3["boxdim_xprime"] - entry["boxdim_projection"]) <= 0.1
        for entry in r3["kernel_projections"]
    )

    elapsed = time.perf_counter() - start
    ok = diff_ok and full_ok and inv_ok and proj_ok and elapsed < 300.0
    report(9, "desk-scale dimension experiments", ok, elapsed,
           f"diff {r['boxdim_difference']:.3f}, full dev "
           f"{abs(r['boxdim_xprime'] - r['midpoint_full']):.3f}, inv dev "
           f"{abs(r['boxdim_x'] - r['midpoint_invertible']):.3f}")
