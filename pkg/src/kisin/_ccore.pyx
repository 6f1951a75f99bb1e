# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled twin of kisin._pycore (same signatures, same results)."""


def poly_mul(list a, list b, list add_t, list mul_t):
    cdef Py_ssize_t la = len(a), lb = len(b), i, j, k
    cdef long x, y
    cdef list out, mrow, arow
    if la == 0 or lb == 0:
        return []
    out = [0] * (la + lb - 1)
    for i in range(la):
        x = a[i]
        if x:
            mrow = mul_t[x]
            for j in range(lb):
                y = b[j]
                if y:
                    k = i + j
                    arow = add_t[<long>out[k]]
                    out[k] = arow[<long>mrow[y]]
    return out


def poly_mul_trunc(list a, list b, Py_ssize_t n, list add_t, list mul_t):
    cdef Py_ssize_t la = len(a), lb = len(b), i, j, k, top
    cdef long x, y
    cdef list out = [0] * n, mrow, arow
    for i in range(min(la, n)):
        x = a[i]
        if x:
            mrow = mul_t[x]
            top = min(lb, n - i)
            for j in range(top):
                y = b[j]
                if y:
                    k = i + j
                    arow = add_t[<long>out[k]]
                    out[k] = arow[<long>mrow[y]]
    return out


def poly_addshift(a, list b, Py_ssize_t shift, list add_t):
    cdef Py_ssize_t n, j, k, lb = len(b)
    cdef long y
    cdef list out = list(a), arow
    n = max(len(out), lb + shift)
    if n > len(out):
        out.extend([0] * (n - len(out)))
    for j in range(lb):
        y = b[j]
        if y:
            k = j + shift
            arow = add_t[<long>out[k]]
            out[k] = arow[y]
    return out


def series_inv(list a, Py_ssize_t n, list add_t, list neg_t, list mul_t, list inv_t):
    cdef Py_ssize_t la = len(a), k, j, top
    cdef long c0, acc, x, y
    cdef list out = [0] * n, mrow
    if n == 0:
        return out
    c0 = inv_t[<long>a[0]]
    out[0] = c0
    for k in range(1, n):
        acc = 0
        top = min(k, la - 1)
        for j in range(1, top + 1):
            x = a[j]
            y = out[k - j]
            if x and y:
                mrow = mul_t[x]
                acc = add_t[acc][<long>mrow[y]]
        if acc:
            mrow = mul_t[<long>neg_t[acc]]
            out[k] = mrow[c0]
        else:
            out[k] = 0
    return out
