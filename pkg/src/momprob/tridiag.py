"""High-precision eigensolver for symmetric tridiagonal matrices.

Eigenvalues are located by Sturm-count bisection (the LDL^T negative-pivot
count, robust at any mantissa size) and polished with a guarded Newton
iteration on the characteristic polynomial, so each eigenvalue converges to
the full working precision at quadratic rate.  Eigenvectors come from the
classical recurrence identity: for an eigenvalue x of a tridiagonal matrix
with positive off-diagonal entries, the vector of orthonormal-polynomial
values (p_0(x), ..., p_{N-1}(x)) is an (unnormalized) eigenvector, and its
normalization constant yields the Gauss quadrature weight
w = 1 / sum_k p_k(x)^2 (Golub-Welsch).  Only eigenvalues and first
components are needed for quadrature, so no dense eigenvector accumulation
is performed.

Inputs are plain sequences; everything is evaluated in mpmath arithmetic at
the precision requested by the caller.
"""
from __future__ import annotations

import mpmath as mp

from .precision import to_mpf, wp


def _sturm_count(q, b2, x):
    """Number of eigenvalues strictly below ``x`` (negative LDL^T pivots)."""
    count = 0
    d = q[0] - x
    if d == 0:
        d = mp.mpf(2) ** (-mp.mp.prec * 2)
    if d < 0:
        count += 1
    for k in range(1, len(q)):
        d = (q[k] - x) - b2[k - 1] / d
        if d == 0:
            d = mp.mpf(2) ** (-mp.mp.prec * 2)
        if d < 0:
            count += 1
    return count


def _charpoly_and_derivative(q, b2, x):
    """Characteristic polynomial of the leading sections, with derivative.

    Returns (p_N(x), p_N'(x)) from the standard three-term recursion
    p_k = (q_k - x) p_{k-1} - b_{k-1}^2 p_{k-2}.  Magnitudes can be huge;
    mpmath's unbounded exponent makes rescaling unnecessary.
    """
    pm1, p = mp.mpf(1), q[0] - x
    dm1, dp = mp.mpf(0), mp.mpf(-1)
    for k in range(1, len(q)):
        pn = (q[k] - x) * p - b2[k - 1] * pm1
        dn = (q[k] - x) * dp - p - b2[k - 1] * dm1
        pm1, p = p, pn
        dm1, dp = dp, dn
    return p, dp


def eigenvalues(q, b, bits: int):
    """All eigenvalues of the symmetric tridiagonal matrix, ascending.

    ``q`` is the diagonal (length N), ``b`` the positive off-diagonal
    (length N-1); with b > 0 all eigenvalues are simple.
    """
    n = len(q)
    if len(b) != n - 1:
        raise ValueError("off-diagonal must be one entry shorter than diagonal")
    guard = bits + 24
    with wp(guard):
        qq = [to_mpf(v) for v in q]
        bb = [to_mpf(v) for v in b]
        b2 = [v * v for v in bb]
        if n == 1:
            return [+qq[0]]
        # Gershgorin enclosure
        radius = [mp.mpf(0)] * n
        for k in range(n):
            r = mp.mpf(0)
            if k > 0:
                r += abs(bb[k - 1])
            if k < n - 1:
                r += abs(bb[k])
            radius[k] = r
        lo = min(qq[k] - radius[k] for k in range(n))
        hi = max(qq[k] + radius[k] for k in range(n))
        span = hi - lo
        if span == 0:
            return [+qq[0]] * n

        eps = mp.mpf(2) ** (-(bits + 8))
        out = []
        for idx in range(n):
            a, c = lo - eps * (1 + abs(lo)), hi + eps * (1 + abs(hi))
            ca, cc = 0, n
            # isolate: bisect until the bracket holds exactly one eigenvalue
            # (matters for strongly graded matrices, where neighbor spacing
            # can be astronomically small relative to the spectral span)
            it = 0
            while cc - ca > 1 and it < 4 * guard:
                mid = (a + c) / 2
                cm = _sturm_count(qq, b2, mid)
                if cm <= idx:
                    a, ca = mid, cm
                else:
                    c, cc = mid, cm
                it += 1
            # refine the bracket until Newton has a safe basin
            for _ in range(48):
                if c - a <= mp.mpf("1e-12") * max(abs(a), abs(c), mp.mpf(1)):
                    break
                mid = (a + c) / 2
                if _sturm_count(qq, b2, mid) <= idx:
                    a = mid
                else:
                    c = mid
            x = (a + c) / 2
            # guarded Newton on the characteristic polynomial
            converged = False
            for _ in range(max(12, int(mp.log(bits, 2)) + 6)):
                p, dp = _charpoly_and_derivative(qq, b2, x)
                if dp == 0:
                    break
                xn = x - p / dp
                if not (a <= xn <= c):
                    if _sturm_count(qq, b2, x) <= idx:
                        a = x
                    else:
                        c = x
                    xn = (a + c) / 2
                if abs(xn - x) <= eps * max(mp.mpf(1), abs(xn)):
                    x = xn
                    converged = True
                    break
                x = xn
            if not converged:
                # pure bisection to full precision as a fallback
                while c - a > eps * max(mp.mpf(1), abs(a), abs(c)):
                    mid = (a + c) / 2
                    if mid == a or mid == c:
                        break
                    if _sturm_count(qq, b2, mid) <= idx:
                        a = mid
                    else:
                        c = mid
                x = (a + c) / 2
            out.append(x)
    with wp(bits):
        return [+x for x in out]


def poly_values(q, b, x, n: int):
    """Values (p_0(x), ..., p_{n-1}(x)) of the orthonormal recurrence.

    p_0 = 1, b_1 p_1 = (x - q_1) p_0, and
    b_k p_k = (x - q_k) p_{k-1} - b_{k-1} p_{k-2}.
    """
    vals = [mp.mpf(1)]
    if n == 1:
        return vals
    prev, cur = mp.mpf(0), mp.mpf(1)
    for k in range(n - 1):
        nxt = ((x - q[k]) * cur - (b[k - 1] * prev if k > 0 else 0)) / b[k]
        vals.append(nxt)
        prev, cur = cur, nxt
    return vals


def gauss_rule(q, b, bits: int):
    """Gauss quadrature of the (normalized) measure attached to the matrix.

    Nodes are the eigenvalues of the N x N section; the weight at node x is
    1 / sum_k p_k(x)^2, the squared first component of the normalized
    eigenvector.  Weights are renormalized to unit total mass at the end to
    absorb the last ulps of rounding.
    """
    nodes = eigenvalues(q, b, bits)
    n = len(q)
    with wp(bits + 24):
        qq = [to_mpf(v) for v in q]
        bb = [to_mpf(v) for v in b]
        weights = []
        for x in nodes:
            vals = poly_values(qq, bb, x, n)
            weights.append(1 / mp.fsum(v * v for v in vals))
        total = mp.fsum(weights)
        weights = [w / total for w in weights]
    with wp(bits):
        return [+x for x in nodes], [+w for w in weights]


def eigenvector_columns(q, b, nodes, bits: int):
    """Normalized eigenvector for each node, as a list of column lists."""
    n = len(q)
    cols = []
    with wp(bits + 24):
        qq = [to_mpf(v) for v in q]
        bb = [to_mpf(v) for v in b]
        for x in nodes:
            vals = poly_values(qq, bb, to_mpf(x), n)
            nrm = mp.sqrt(mp.fsum(v * v for v in vals))
            cols.append([v / nrm for v in vals])
    with wp(bits):
        return [[+v for v in col] for col in cols]
