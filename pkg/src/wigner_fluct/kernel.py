"""Determinantal kernel computations for the complex Hermitian (beta = 2)
Gaussian ensemble: weighted Hermite functions, the n-level kernel

    K_n(x, y) = sum_{i=0}^{n-1} phi_i(x) phi_i(y) exp(-(x^2+y^2)/2),

counting expectations/variances by quadrature, Nystrom discretization of the
kernel operator on an interval, and the counting-statistic cumulant engine.

phi_i are the orthonormal Hermite polynomials for the weight exp(-x^2); the
code works throughout with the weighted functions psi_i = phi_i exp(-x^2/2),
evaluated by the stable three-term recurrence

    psi_{i+1} = x sqrt(2/(i+1)) psi_i - sqrt(i/(i+1)) psi_{i-1}.

The recurrence is carried with explicit power-of-two scaling (mantissa plus
integer exponent per point): the seed psi_0 = pi^(-1/4) exp(-x^2/2)
underflows for |x| > 38, yet the terminal values psi_{n-2..n} are O(1) in
the bulk, so unscaled upward recursion silently zeroes the outer bulk for
n >= 1000.  Scaling keeps the evaluation exact up to n = 10^4 on
|x| <= sqrt(2n) + 10.

Evaluation of K_n off the diagonal uses the Christoffel-Darboux form

    K_n(x, y) = sqrt(n/2) [psi_n(x) psi_{n-1}(y) - psi_{n-1}(x) psi_n(y)] / (x - y)

and its confluent limit n psi_{n-1}^2 - sqrt(n(n-1)) psi_{n-2} psi_n on the
diagonal.
"""

from dataclasses import dataclass
from math import pi, sqrt

import numpy as np

from .errors import (
    DiscretizationFailureError,
    NumericalFailureError,
    NumericalRangeError,
    ShapeError,
    UnsupportedError,
)

_LOG2E = 1.4426950408889634  # 1 / ln 2
_MAX_HERMITE_INDEX = 10**4


def _hermite_guard(i):
    """Index guard; the evaluation is validated for |x| <= sqrt(2i) + 10,
    and beyond that psi underflows to an exact 0 (correct to double
    precision), so only the index range is a hard limit."""
    if i < 0:
        raise ShapeError(f"Hermite index must be >= 0, got {i}")
    if i > _MAX_HERMITE_INDEX:
        raise NumericalRangeError(
            f"Hermite index {i} above supported maximum {_MAX_HERMITE_INDEX}"
        )


def _psi_seed(x):
    """psi_0 and psi_1 as (mantissa, exponent) pairs; exact for the |x| range
    admitted by the index guard."""
    l0 = -0.5 * x * x * _LOG2E
    expo = np.floor(l0).astype(np.int64)
    m0 = np.pi ** -0.25 * np.exp2(l0 - expo)
    m1 = sqrt(2.0) * x * m0
    return m0, m1, expo


def _rescale(pm, pc, expo):
    a = np.abs(pc) + np.abs(pm)
    big = a > 2.0**300
    if np.any(big):
        pc = np.where(big, np.ldexp(pc, -600), pc)
        pm = np.where(big, np.ldexp(pm, -600), pm)
        expo = expo + np.where(big, 600, 0)
    small = (a < 2.0**-300) & (a > 0.0)
    if np.any(small):
        pc = np.where(small, np.ldexp(pc, 600), pc)
        pm = np.where(small, np.ldexp(pm, 600), pm)
        expo = expo - np.where(small, 600, 0)
    return pm, pc, expo


def _psi_top_three(n, x):
    """psi_{n-2}, psi_{n-1}, psi_n at the points x (n >= 1), descaled to
    plain floats (values below the double-precision floor flush to zero,
    which is exact to working precision)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    _hermite_guard(n)
    m0, m1, expo = _psi_seed(x)
    if n == 1:
        zero = np.zeros_like(m0)
        return zero, np.ldexp(m0, expo), np.ldexp(m1, expo)
    pm, pc = m0, m1
    keep = (m0.copy(), expo.copy()) if n == 2 else None  # psi_{n-2} = psi_0
    for i in range(1, n):
        pm, pc = pc, x * sqrt(2.0 / (i + 1)) * pc - sqrt(i / (i + 1)) * pm
        pm, pc, expo = _rescale(pm, pc, expo)
        if i == n - 2:
            keep = (pm.copy(), expo.copy())  # pm is psi_i = psi_{n-2} here
    m_nm2, e_nm2 = keep
    return np.ldexp(m_nm2, e_nm2), np.ldexp(pm, expo), np.ldexp(pc, expo)


def hermite_psi(i, x):
    """Weighted orthonormal Hermite function psi_i(x) = phi_i(x) e^{-x^2/2}."""
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    _hermite_guard(i)
    if i == 0:
        out = np.pi**-0.25 * np.exp(-0.5 * x_arr * x_arr)
    else:
        _, _, top = _psi_top_three(i, x_arr)
        out = top
    return out if np.ndim(x) else float(out[0])


def hermite_phi(i, x):
    """Orthonormal Hermite polynomial phi_i(x), with
    integral phi_i phi_j e^{-x^2} dx = delta_ij.

    Computed as psi_i(x) e^{x^2/2}; raises NumericalRangeError when the
    result (or the unweighting factor) cannot be represented.
    """
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    _hermite_guard(i)
    if np.any(0.5 * x_arr * x_arr > 700.0):
        raise NumericalRangeError("e^{x^2/2} overflows double precision")
    psi = hermite_psi(i, x_arr)
    out = np.atleast_1d(psi) * np.exp(0.5 * x_arr * x_arr)
    if not np.all(np.isfinite(out)):
        raise NumericalRangeError(f"phi_{i} overflows at |x| up to {np.max(np.abs(x_arr))}")
    return out if np.ndim(x) else float(out[0])


@dataclass(frozen=True)
class HermiteBasis:
    """First n weighted orthonormal Hermite functions psi_0 .. psi_{n-1}."""

    n: int

    def psi(self, i, x):
        if not 0 <= i < self.n:
            raise ShapeError(f"basis holds indices 0..{self.n - 1}, got {i}")
        return hermite_psi(i, x)

    def phi(self, i, x):
        if not 0 <= i < self.n:
            raise ShapeError(f"basis holds indices 0..{self.n - 1}, got {i}")
        return hermite_phi(i, x)


def kernel_diag(n, x):
    """K_n(x, x) via the confluent Christoffel-Darboux form."""
    if n < 1:
        raise ShapeError(f"kernel order must be >= 1, got {n}")
    p2, p1, p0 = _psi_top_three(n, x)
    if n == 1:
        out = p1 * p1
    else:
        out = n * p1 * p1 - sqrt(n * (n - 1.0)) * p2 * p0
    return out if np.ndim(x) else float(out[0])


def kernel_point(n, x, y):
    """K_n(x, y): Christoffel-Darboux off the diagonal, confluent form on it."""
    if n < 1:
        raise ShapeError(f"kernel order must be >= 1, got {n}")
    if x == y:
        return kernel_diag(n, x)
    pts = np.array([x, y], dtype=float)
    _, p1, p0 = _psi_top_three(n, pts)
    return float(sqrt(n / 2.0) * (p0[0] * p1[1] - p1[0] * p0[1]) / (x - y))


def kernel_sum_direct(n, x, y):
    """Direct evaluation sum_i psi_i(x) psi_i(y); O(n) per call, used as the
    cross-check oracle for the Christoffel-Darboux path at moderate n."""
    total = 0.0
    for i in range(n):
        total += hermite_psi(i, x) * hermite_psi(i, y)
    return total


def _kernel_cross(n, x_rows, x_cols, diag_rows=None, psi_cache=None):
    """K_n on the grid x_rows x x_cols.  Exactly coincident points use the
    confluent form; x arrays are assumed to come from the same node set so
    coincidence only happens elementwise-equal."""
    if psi_cache is None:
        _, p1r, p0r = _psi_top_three(n, x_rows)
        _, p1c, p0c = _psi_top_three(n, x_cols)
    else:
        p1r, p0r = psi_cache[0]
        p1c, p0c = psi_cache[1]
    num = p0r[:, None] * p1c[None, :] - p1r[:, None] * p0c[None, :]
    den = x_rows[:, None] - x_cols[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        k = sqrt(n / 2.0) * num / den
    eq = den == 0.0
    if np.any(eq):
        if diag_rows is None:
            diag_rows = kernel_diag(n, x_rows)
        k[eq] = np.broadcast_to(np.atleast_1d(diag_rows)[:, None], k.shape)[eq]
    return k


def truncation_halfwidth(n):
    """|x| beyond which the kernel is negligible: sqrt(2n) + 10."""
    return sqrt(2.0 * n) + 10.0


def _clip_interval(n, interval):
    a, b = interval
    if not a < b:
        raise ShapeError(f"interval endpoints must satisfy a < b, got ({a}, {b})")
    lim = truncation_halfwidth(n)
    return max(float(a), -lim), min(float(b), lim)


def _composite_gl(n, a, b, order, wavelengths_per_panel):
    """Composite Gauss-Legendre nodes/weights on [a, b], with panels sized by
    the local oscillation wavelength pi / sqrt(2n) of the kernel."""
    lam = pi / sqrt(2.0 * n)
    width = wavelengths_per_panel * lam
    panels = max(1, int(np.ceil((b - a) / width)))
    xg, wg = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    weights = (half[:, None] * wg[None, :]).ravel()
    return nodes, weights


def expected_count(n, interval, abs_tol=1e-8, order=24):
    """Expected number of eigenvalues in the interval: integral of K_n(x, x).

    Composite Gauss-Legendre panels refined until two consecutive levels
    agree to abs_tol.
    """
    if n < 1:
        raise ShapeError(f"kernel order must be >= 1, got {n}")
    a, b = _clip_interval(n, interval)
    if a >= b:
        return 0.0
    prev = None
    for wl in (3.0, 1.5, 0.75, 0.375):
        nodes, weights = _composite_gl(n, a, b, order, wl)
        val = float(np.sum(weights * kernel_diag(n, nodes)))
        if prev is not None and abs(val - prev) <= abs_tol:
            return val
        prev = val
    raise NumericalFailureError(
        "expected_count quadrature did not converge",
        n=n,
        interval=(a, b),
        last=prev,
        abs_tol=abs_tol,
    )


def _trace_pair(n, nodes, weights, row_chunk_budget=2 * 10**7):
    """(Tr A, Tr A^2) for the Nystrom operator on the given quadrature rule,
    computed in row chunks without materializing the full matrix."""
    m = nodes.size
    _, p1, p0 = _psi_top_three(n, nodes)
    kd = kernel_diag(n, nodes)
    tr_a = float(np.sum(weights * kd))
    tr_a2 = 0.0
    chunk = max(1, row_chunk_budget // m)
    cache_cols = (p1, p0)
    for s in range(0, m, chunk):
        rows = slice(s, min(s + chunk, m))
        k = _kernel_cross(
            n,
            nodes[rows],
            nodes,
            diag_rows=kd[rows],
            psi_cache=((p1[rows], p0[rows]), cache_cols),
        )
        tr_a2 += float(np.sum(weights[rows, None] * weights[None, :] * k * k))
    return tr_a, tr_a2


def variance_count(n, interval, rel_tol=1e-6, order=24):
    """Variance of the eigenvalue count in the interval:
    Tr(A) - Tr(A^2) = int_I K(x,x) - int_I int_I K(x,y)^2."""
    if n < 1:
        raise ShapeError(f"kernel order must be >= 1, got {n}")
    a, b = _clip_interval(n, interval)
    if a >= b:
        return 0.0
    prev = None
    for wl in (3.0, 1.5, 0.75):
        nodes, weights = _composite_gl(n, a, b, order, wl)
        tr_a, tr_a2 = _trace_pair(n, nodes, weights)
        val = tr_a - tr_a2
        if prev is not None and abs(val - prev) <= rel_tol * max(abs(val), 1e-3):
            return val
        prev = val
    raise NumericalFailureError(
        "variance_count quadrature did not converge",
        n=n,
        interval=(a, b),
        last=prev,
        rel_tol=rel_tol,
    )


@dataclass
class KernelOperator:
    """Nystrom discretization of K_n restricted to an interval.

    matrix[a, b] = sqrt(w_a) K_n(x_a, x_b) sqrt(w_b); symmetric, and its
    spectrum discretizes the operator inequality 0 <= A <= 1.
    """

    nodes: np.ndarray
    weights: np.ndarray
    matrix: np.ndarray
    interval: tuple
    n: int

    @property
    def size(self):
        return self.nodes.size


def discretize_operator(
    n,
    interval,
    order=32,
    band_tol=1e-8,
    trace_tol=1e-6,
    wavelengths_per_panel=3.0,
    validate_band=True,
):
    """Build the Nystrom operator and validate it: Tr A must match
    expected_count to trace_tol and the spectrum must lie in
    [-band_tol, 1 + band_tol].

    The band check costs a dense eigendecomposition (O(size^3)); callers
    building very large operators may pass validate_band=False after having
    established the band on a coarser version of the same interval.
    """
    if order < 16:
        raise UnsupportedError(f"quadrature order must be >= 16, got {order}")
    a, b = _clip_interval(n, interval)
    if a >= b:
        raise ShapeError(f"interval {interval} is empty after truncation")
    nodes, weights = _composite_gl(n, a, b, order, wavelengths_per_panel)
    k = _kernel_cross(n, nodes, nodes)
    sw = np.sqrt(weights)
    matrix = sw[:, None] * k * sw[None, :]
    matrix = 0.5 * (matrix + matrix.T)
    op = KernelOperator(nodes=nodes, weights=weights, matrix=matrix, interval=(a, b), n=n)

    tr = float(np.trace(matrix))
    ref = expected_count(n, (a, b))
    if abs(tr - ref) > trace_tol * max(1.0, abs(ref)):
        raise DiscretizationFailureError(
            "Nystrom trace disagrees with quadrature expectation",
            trace=tr,
            expected=ref,
            n=n,
        )
    if validate_band:
        eigs = np.linalg.eigvalsh(matrix)
        if eigs[0] < -band_tol or eigs[-1] > 1.0 + band_tol:
            raise DiscretizationFailureError(
                "Nystrom spectrum escapes [0, 1] band; raise the quadrature order",
                min_eig=float(eigs[0]),
                max_eig=float(eigs[-1]),
                n=n,
            )
    return op


@dataclass(frozen=True)
class CumulantReport:
    """Cumulants C_2..C_4 of the eigenvalue count, plus the power traces."""

    c2: float
    c3: float
    c4: float
    traces: dict

    def normalized(self):
        """(|C_3| / C_2^{3/2}, |C_4| / C_2^2): both must vanish as the
        variance grows for the counting CLT to hold."""
        if self.c2 <= 0.0:
            return float("inf"), float("inf")
        return abs(self.c3) / self.c2**1.5, abs(self.c4) / self.c2**2


# Recursion C_l = (-1)^l (l-1)! Tr(A - A^l) + sum_s alpha_{s,l} C_s, with the
# alpha coefficients derived by expanding log(1+u) powers in
#   sum C_k (iz)^k / k! = sum T_k (e^{iz}-1)^k / k!,
# where T_k = (-1)^{k-1} (k-1)! Tr(A^k) for a determinantal field (the sign
# and the power placement were fixed against the independent-Bernoulli
# oracle; see the tests).  Expanding u = e^{iz}-1:
#   C_2 =      Tr(A - A^2)
#   C_3 = -2   Tr(A - A^3) + 3 C_2
#   C_4 =  6   Tr(A - A^4) + 6 C_3 - 11 C_2
_ALPHA = {3: {2: 3.0}, 4: {2: -11.0, 3: 6.0}}


def counting_cumulants(op: KernelOperator, lmax=4):
    """Counting-statistic cumulants C_2, C_3, C_4 from operator power traces.

    Equivalent closed forms (the independent-Bernoulli view of a
    determinantal count, used as the test oracle):
      C_2 = Tr(A - A^2),
      C_3 = Tr(A - 3A^2 + 2A^3),
      C_4 = Tr(A - 7A^2 + 12A^3 - 6A^4).
    """
    if lmax > 4 or lmax < 2:
        raise UnsupportedError(f"cumulants supported for 2 <= lmax <= 4, got {lmax}")
    a = op.matrix
    traces = {1: float(np.trace(a))}
    power = a
    for l in range(2, 5):
        power = power @ a
        traces[l] = float(np.trace(power))

    c = {2: traces[1] - traces[2]}
    for l in (3, 4):
        fact = 1.0
        for j in range(2, l):
            fact *= j
        c[l] = (-1.0) ** l * fact * (traces[1] - traces[l]) + sum(
            coef * c[s] for s, coef in _ALPHA[l].items()
        )

    if c[2] < -1e-10:
        raise NumericalFailureError("count variance came out negative", c2=c[2], n=op.n)
    return CumulantReport(c2=c[2], c3=c[3], c4=c[4], traces=traces)
