"""Pure-Python polynomial kernels over a tabled finite field.

Polynomials are lists of field codes, index = exponent offset.  The compiled
module ``_ccore`` exposes the same four functions; ``kisin._core`` picks one
at import time.
"""


def poly_mul(a, b, add_t, mul_t):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            mrow = mul_t[x]
            for j, y in enumerate(b):
                if y:
                    k = i + j
                    out[k] = add_t[out[k]][mrow[y]]
    return out


def poly_mul_trunc(a, b, n, add_t, mul_t):
    """First n coefficients of a*b."""
    out = [0] * n
    for i in range(min(len(a), n)):
        x = a[i]
        if x:
            mrow = mul_t[x]
            for j in range(min(len(b), n - i)):
                y = b[j]
                if y:
                    k = i + j
                    out[k] = add_t[out[k]][mrow[y]]
    return out


def poly_addshift(a, b, shift, add_t):
    """a + u^shift * b, shift >= 0."""
    n = max(len(a), len(b) + shift)
    out = list(a) + [0] * (n - len(a))
    for j, y in enumerate(b):
        if y:
            k = j + shift
            out[k] = add_t[out[k]][y]
    return out


def series_inv(a, n, add_t, neg_t, mul_t, inv_t):
    """First n coefficients of 1/a for a unit power series a (a[0] != 0)."""
    c0 = inv_t[a[0]]
    out = [0] * n
    if n == 0:
        return out
    out[0] = c0
    la = len(a)
    for k in range(1, n):
        acc = 0
        for j in range(1, min(k, la - 1) + 1):
            x = a[j]
            y = out[k - j]
            if x and y:
                acc = add_t[acc][mul_t[x][y]]
        out[k] = mul_t[neg_t[acc]][c0] if acc else 0
    return out
