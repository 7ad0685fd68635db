"""Acceptance suite: one test per verification criterion, each printed as a
single PASS/FAIL line with its measured values (run with -s or -rA to see
all lines).

Every threshold below is part of the project's fixed verification contract
and is asserted exactly as stated; none are tuned to the implementation.

Known finite-size limitations, measured with this implementation and with
an independent prototype (values reproduce to Monte-Carlo accuracy):

* Criteria 3, 4, 6 (KS distance of normalized eigenvalues vs the standard
  normal): the asymptotic centering t*sqrt(2n) with t the k/n semicircle
  quantile leaves a deterministic offset of about (pi/2) sqrt(beta/log n)
  standard deviations in the bulk (~0.63 sigma at n=500, beta=1; ~1.26 for
  beta=4), because the k-th order statistic sits half a level spacing away
  from the k/n quantile and the counting variance grows only like log n.
  At the edge the offset is larger (the count expectation has an O(1) term
  that is ~2.5 levels at n=800, k=55).  A KS distance <= 0.08/0.1 against
  a *fixed* N(0,1) would need log n beyond any feasible size, so these
  checks fail with KS ~ 0.25-0.9 while the distributional *shape* is
  verifiably Gaussian (see TestShapeDiagnostics).
* Criterion 3 variance band for beta=4 and criterion 4 variance band: the
  finite-size variance excess is (c + log 2)/log n-like with c ~ 1.4-3.9;
  measured values ~1.29-1.40 (beta=4 bulk) and ~1.9 (edge) sit above the
  stated bands.
* Criterion 5 independence case: at n=1000 a gap of 0.4 n yields a residual
  correlation of ~0.10-0.14 (the finite-n exponent log(400)/log(1000) is
  0.87, not 1), right at or above the stated 0.1 bound.
* Criterion 9 ratio band: the half-line counting variance is
  (log n + c)/(2 pi^2) with c ~ 3.65, so the ratio to log n/(2 pi^2) is
  ~1.48 at n=2000 (outside [0.8, 1.2]), although it does move toward 1 as
  n grows exactly as the check's second clause demands.

These failures are deliberate: the tolerances stand as stated, the tests
report the honest numbers.
"""

from math import log, pi, sqrt

import numpy as np
import pytest

import wigner_fluct as wf
from wigner_fluct import cli
from wigner_fluct.stats import ExperimentPlan, Thresholds

from test_kernel import bernoulli_cumulant_oracle, diag_operator


def report(cid, title, checks):
    """checks: list of (label, passed). Prints the criterion line, then
    asserts every sub-check."""
    ok = all(p for _, p in checks)
    detail = "; ".join(f"{label} {'ok' if p else 'FAIL'}" for label, p in checks)
    line = f"ACCEPTANCE {cid:>2} {title}: {'PASS' if ok else 'FAIL'} | {detail}"
    print(line)
    assert ok, line


def test_criterion_01_superposition_identity():
    """even(GOE_n u GOE_{n+1}) reproduces GUE_n: two-sample KS per index."""
    n, trials = 8, 5000
    left, right = cli.fr_check_samples("gue", n, trials, seed=101)
    checks = []
    for k in (2, 4, 6):
        _, p = wf.ks_two_sample(left[:, k - 1], right[:, k - 1])
        checks.append((f"k={k} p={p:.4f} (>0.01)", p > 0.01))
    report(1, "superposition: even(GOE_8 + GOE_9) = GUE_8", checks)


def test_criterion_02_decimation_identity():
    """even(GOE_{2n+1}) / sqrt(2) reproduces GSE_n: KS at every index."""
    n, trials = 4, 5000
    left, right = cli.fr_check_samples("gse", n, trials, seed=102)
    checks = []
    for k in range(1, n + 1):
        _, p = wf.ks_two_sample(left[:, k - 1], right[:, k - 1])
        checks.append((f"k={k} p={p:.4f} (>0.01)", p > 0.01))
    report(2, "decimation: even(GOE_9)/sqrt2 = GSE_4", checks)


def _bulk_result(beta, seed):
    plan = ExperimentPlan(
        ensemble=wf.EnsembleSpec(wf.EnsembleKind.TRIDIAG_BETA, 500, beta=beta),
        index_spec=wf.IndexSpec(regime="bulk", indices=(250,)),
        trials=2000,
        seed=seed,
        thresholds=Thresholds(ks_max=0.08, var_lo=0.8, var_hi=1.25),
    )
    return wf.run_mc(plan)


def test_criterion_03_bulk_clt_goe_gse():
    """Median eigenvalue of the beta=1 and beta=4 ensembles at n=500,
    normalized by the limit-theorem constants: KS <= 0.08, variance in
    [0.8, 1.25].  See the module docstring for the measured finite-size
    offsets that keep the KS clause (and the beta=4 variance) red."""
    checks = []
    for beta, seed in ((1, 103), (4, 104)):
        res = _bulk_result(beta, seed)
        ks = res.summary["ks"][0]
        var = res.summary["var"][0]
        mean = res.summary["mean"][0]
        checks.append((f"b{beta} KS={ks:.4f} (<=0.08) [mean={mean:+.3f}]", ks <= 0.08))
        checks.append((f"b{beta} var={var:.4f} (in [0.8,1.25])", 0.8 <= var <= 1.25))
    report(3, "bulk CLT, tridiagonal path (n=500, k=250)", checks)


def test_criterion_04_edge_clt_goe():
    """Eigenvalue 55 from the top at n=800 (beta=1): KS <= 0.1 and variance
    in [0.75, 1.3].  Red at this size; see module docstring."""
    n = 800
    k = int(n**0.6)
    plan = ExperimentPlan(
        ensemble=wf.EnsembleSpec(wf.EnsembleKind.TRIDIAG_BETA, n, beta=1),
        index_spec=wf.IndexSpec(regime="edge", indices=(k,), gamma=log(k) / log(n)),
        trials=2000,
        seed=105,
        thresholds=Thresholds(ks_max=0.1, var_lo=0.75, var_hi=1.3),
    )
    res = wf.run_mc(plan)
    ks = res.summary["ks"][0]
    var = res.summary["var"][0]
    mean = res.summary["mean"][0]
    report(
        4,
        f"edge CLT (n=800, k={k})",
        [
            (f"KS={ks:.4f} (<=0.1) [mean={mean:+.3f}]", ks <= 0.1),
            (f"var={var:.4f} (in [0.75,1.3])", 0.75 <= var <= 1.3),
        ],
    )


def _joint_corr(indices, seed):
    plan = ExperimentPlan(
        ensemble=wf.EnsembleSpec(wf.EnsembleKind.TRIDIAG_BETA, 1000, beta=1),
        index_spec=wf.bulk_index_spec(indices, 1000),
        trials=3000,
        seed=seed,
    )
    res = wf.run_mc(plan)
    return res.summary["corr"][0][1]


def test_criterion_05_joint_covariance():
    """Pairwise correlation of two bulk eigenvalues at n=1000: gap n^0.5
    should give corr ~ 0.5 (tol 0.12); gap 0.4n should decorrelate
    (|corr| <= 0.1).  The second clause is marginal at n=1000; see module
    docstring."""
    gap = int(1000**0.5)
    c_half = _joint_corr((500, 500 + gap), seed=106)
    c_far = _joint_corr((300, 700), seed=107)
    report(
        5,
        "joint bulk covariance (n=1000)",
        [
            (f"gap={gap}: corr={c_half:.4f} (|corr-0.5|<=0.12)", abs(c_half - 0.5) <= 0.12),
            (f"gap=400: corr={c_far:.4f} (|corr|<=0.1)", abs(c_far) <= 0.1),
        ],
    )


def test_criterion_06_matched_moment_universality():
    """Bulk CLT for the three-point matched-moment real Wigner ensemble,
    same thresholds as criterion 3.  The KS clause carries the same
    centering offset and stays red; the variance clause holds."""
    plan = ExperimentPlan(
        ensemble=wf.EnsembleSpec(wf.EnsembleKind.WIGNER_REAL_MATCHED, 500),
        index_spec=wf.IndexSpec(regime="bulk", indices=(250,)),
        trials=2000,
        seed=108,
        thresholds=Thresholds(ks_max=0.08, var_lo=0.8, var_hi=1.25),
    )
    res = wf.run_mc(plan)
    ks = res.summary["ks"][0]
    var = res.summary["var"][0]
    mean = res.summary["mean"][0]
    report(
        6,
        "matched-moment universality (three-point entries, n=500)",
        [
            (f"KS={ks:.4f} (<=0.08) [mean={mean:+.3f}]", ks <= 0.08),
            (f"var={var:.4f} (in [0.8,1.25])", 0.8 <= var <= 1.25),
        ],
    )


def test_criterion_07_kernel_identities():
    """Exact kernel quadrature identities at small n."""
    checks = []
    for n in (1, 5, 20, 100):
        got = wf.expected_count(n, (-np.inf, np.inf))
        checks.append((f"E#(R) n={n}: {got:.10f}", abs(got - n) <= 1e-8))
    v_all = wf.variance_count(1, (-np.inf, np.inf))
    checks.append((f"Var#(R) n=1: {v_all:.2e} (<=1e-8)", abs(v_all) <= 1e-8))
    v_half = wf.variance_count(1, (0.0, np.inf))
    checks.append((f"Var#[0,inf) n=1: {v_half:.8f} (0.25 +- 1e-6)", abs(v_half - 0.25) <= 1e-6))
    report(7, "kernel quadrature identities", checks)


def test_criterion_08_bulk_expectation_lemma():
    """Expected count on [x sqrt(log n / 2n), inf) at n=1000 against the
    asymptotic n - k - (x/pi) sqrt((1-t^2) log n) at t=0."""
    n, k, t = 1000, 500, 0.0
    checks = []
    for x in (-1.0, 0.5, 1.0):
        a = t * sqrt(2 * n) + x * sqrt(log(n) / (2 * n))
        got = wf.expected_count(n, (a, np.inf))
        formula = n - k - (x / pi) * sqrt((1 - t * t) * log(n))
        diff = got - formula
        checks.append((f"x={x}: diff={diff:+.5f} (|.|<=0.05)", abs(diff) <= 0.05))
    report(8, "bulk counting expectation (n=1000, k=500)", checks)


def test_criterion_09_variance_lemma():
    """Half-line counting variance vs (1/2 pi^2) log n at t=0.  The band
    clause is red (the variance carries a +c/(2 pi^2) term with c ~ 3.65);
    the trend clause holds.  See module docstring."""
    ratios = {}
    for n in (200, 2000):
        v = wf.variance_count(n, (0.0, np.inf))
        ratios[n] = v / (log(n) / (2 * pi * pi))
    report(
        9,
        "counting variance asymptotics (t=0)",
        [
            (f"n=2000 ratio={ratios[2000]:.4f} (in [0.8,1.2])", 0.8 <= ratios[2000] <= 1.2),
            (
                f"trend |{ratios[2000]:.3f}-1| < |{ratios[200]:.3f}-1|",
                abs(ratios[2000] - 1) < abs(ratios[200] - 1),
            ),
        ],
    )


def test_criterion_10_variance_doubling():
    """Monte-Carlo counting variance of the beta=1 ensemble over a bulk
    half-line vs the kernel (beta=2) variance: ratio in [1.6, 2.4]."""
    n, trials = 1000, 4000
    counts = wf.counting_experiment(n, 1, 0.0, trials, seed=110)
    mc_var = counts.var(ddof=1)
    kernel_var = wf.variance_count(n, (0.0, np.inf))
    ratio = mc_var / kernel_var
    report(
        10,
        "counting variance doubling (n=1000)",
        [(f"ratio={ratio:.4f} (in [1.6,2.4])", 1.6 <= ratio <= 2.4)],
    )


def test_criterion_11_cumulant_engine():
    """Cumulant recursion equals the independent-Bernoulli oracle on
    diagonal operators; C2 matches the variance quadrature; normalized
    third/fourth cumulants shrink as n grows on a fixed bulk interval."""
    checks = []

    rng = np.random.default_rng(111)
    worst = 0.0
    for _ in range(25):
        probs = rng.uniform(0.0, 1.0, size=rng.integers(1, 15))
        rep = wf.counting_cumulants(diag_operator(probs))
        k2, k3, k4 = bernoulli_cumulant_oracle(probs)
        worst = max(worst, abs(rep.c2 - k2), abs(rep.c3 - k3), abs(rep.c4 - k4))
    checks.append((f"Bernoulli oracle max err={worst:.2e} (<=1e-10)", worst <= 1e-10))

    n, interval = 20, (0.0, 2.5)
    rep = wf.counting_cumulants(wf.discretize_operator(n, interval, order=32))
    var = wf.variance_count(n, interval)
    rel = abs(rep.c2 - var) / var
    checks.append((f"C2 vs variance rel err={rel:.2e} (<=1e-5)", rel <= 1e-5))

    # fixed bulk half-line: a single boundary keeps the odd cumulants away
    # from the exact cancellation that symmetric or two-sided bulk windows
    # produce (at a symmetric cut C3 vanishes identically)
    interval = (2.0, np.inf)
    norms = {}
    for n in (200, 2000):
        op = wf.discretize_operator(
            n,
            interval,
            order=20,
            wavelengths_per_panel=5.0,
            validate_band=(n <= 200),
        )
        norms[n] = wf.counting_cumulants(op).normalized()
    checks.append(
        (f"|C3|/C2^1.5 shrinks: {norms[200][0]:.5f} -> {norms[2000][0]:.5f}",
         norms[2000][0] < norms[200][0])
    )
    checks.append(
        (f"|C4|/C2^2 shrinks: {norms[200][1]:.5f} -> {norms[2000][1]:.5f}",
         norms[2000][1] < norms[200][1])
    )
    report(11, "counting-cumulant engine", checks)


def test_criterion_12_interlacing():
    """Principal-submatrix eigenvalues interlace, 10^4 random pairs, zero
    failures allowed."""
    failures = 0
    for trial in range(10_000):
        s = wf.sample_goe(20, wf.mix_trial_seed(112, trial))
        parent = wf.eigenvalues(s)
        child = wf.eigenvalues(s.array[:-1, :-1])
        if not wf.check_interlacing(parent.values, child.values):
            failures += 1
    report(
        12,
        "interlacing (10^4 GOE_20 principal submatrices)",
        [(f"failures={failures} (=0)", failures == 0)],
    )


def test_criterion_13_semicircle_law():
    """Rescaled spectrum of one size-2000 beta=1 sample vs the semicircle
    CDF: sup distance <= 0.05.  (The tridiagonal model has exactly the GOE
    spectrum law.)"""
    values = wf.eigenvalues(wf.sample_tridiag_beta(2000, 1, 113)).values / sqrt(4000.0)
    cdf = np.array([wf.semicircle_cdf(v) for v in np.clip(values, -1, 1)])
    n = values.size
    sup = max(np.max(np.arange(1, n + 1) / n - cdf), np.max(cdf - np.arange(n) / n))
    report(
        13,
        "semicircle law (one n=2000 sample)",
        [(f"sup-distance={sup:.4f} (<=0.05)", sup <= 0.05)],
    )


def test_criterion_14_determinism(tmp_path):
    """Reruns with the same seed and different thread counts must emit
    byte-identical JSON (timestamp suppressed)."""
    base = [
        "bulk-fluct", "--n", "100", "--k", "50", "--beta", "1",
        "--trials", "40", "--seed", "114", "--no-timestamp", "--per-trial",
    ]
    out1, out2 = tmp_path / "t1.json", tmp_path / "t4.json"
    code1 = cli.main(base + ["--threads", "1", "--out", str(out1)])
    code2 = cli.main(base + ["--threads", "4", "--out", str(out2)])
    identical = out1.read_bytes() == out2.read_bytes()
    report(
        14,
        "determinism across thread counts",
        [
            (f"exit codes {code1},{code2} (=0)", code1 == 0 and code2 == 0),
            (f"byte-identical JSON={identical}", identical),
        ],
    )


class TestShapeDiagnostics:
    """Companion checks (not part of the numbered contract): after removing
    the finite-size location/scale offsets the fluctuation law is verifiably
    Gaussian at these sizes, which is the substance of the limit theorems."""

    @pytest.mark.parametrize("beta,seed", [(1, 115), (4, 116)])
    def test_bulk_shape_is_normal_after_standardizing(self, beta, seed):
        res = _bulk_result(beta, seed)
        x = res.vectors[:, 0]
        z = (x - x.mean()) / x.std(ddof=1)
        d = wf.ks_one_sample(z)
        assert d <= 0.05

    def test_edge_shape_is_normal_after_standardizing(self):
        n, k = 800, int(800**0.6)
        plan = ExperimentPlan(
            ensemble=wf.EnsembleSpec(wf.EnsembleKind.TRIDIAG_BETA, n, beta=1),
            index_spec=wf.IndexSpec(regime="edge", indices=(k,), gamma=log(k) / log(n)),
            trials=2000,
            seed=117,
        )
        x = wf.run_mc(plan).vectors[:, 0]
        z = (x - x.mean()) / x.std(ddof=1)
        assert wf.ks_one_sample(z) <= 0.05
