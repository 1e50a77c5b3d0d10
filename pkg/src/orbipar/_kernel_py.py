"""Pure-Python series kernels.

Reference implementation of the hot loops: truncated convolution, series
inversion and composition over a FieldCtx.  Coefficient vectors are plain
lists of element encodings.  orbipar._speedups implements the same three
functions in C; orbipar.kernels picks one at import time and the test suite
checks they agree.
"""


def vec_mul(ctx, a, b, n):
    """Truncated product: first n coefficients of a*b."""
    if ctx.k == 1:
        p = ctx.p
        la, lb = len(a), len(b)
        out = [0] * n
        for k in range(n):
            acc = 0
            lo = k - lb + 1
            if lo < 0:
                lo = 0
            hi = k + 1
            if hi > la:
                hi = la
            for i in range(lo, hi):
                acc += a[i] * b[k - i]
            out[k] = acc % p
        return out
    exp, log, add = ctx.exp, ctx.log, ctx.add
    la, lb = len(a), len(b)
    out = [0] * n
    for k in range(n):
        acc = 0
        lo = max(0, k - lb + 1)
        hi = min(k + 1, la)
        for i in range(lo, hi):
            ai = a[i]
            bj = b[k - i]
            if ai and bj:
                acc = add(acc, exp[log[ai] + log[bj]])
        out[k] = acc
    return out


def vec_inverse(ctx, a, n):
    """First n coefficients of 1/a; a[0] must be a unit (caller-checked)."""
    c0inv = ctx.inv(a[0])
    if ctx.k == 1:
        p = ctx.p
        la = len(a)
        out = [0] * n
        out[0] = c0inv
        for k in range(1, n):
            acc = 0
            hi = min(k + 1, la)
            for i in range(1, hi):
                acc += a[i] * out[k - i]
            out[k] = (-acc * c0inv) % p
        return out
    exp, log, add, neg = ctx.exp, ctx.log, ctx.add, ctx.neg
    la = len(a)
    out = [0] * n
    out[0] = c0inv
    lci = log[c0inv]
    for k in range(1, n):
        acc = 0
        hi = min(k + 1, la)
        for i in range(1, hi):
            ai = a[i]
            bj = out[k - i]
            if ai and bj:
                acc = add(acc, exp[log[ai] + log[bj]])
        out[k] = exp[log[neg(acc)] + lci] if acc else 0
    return out


def vec_compose(ctx, f, g, n):
    """First n coefficients of f(g); g[0] must be 0 (caller-checked).

    Horner from the top coefficient: each step is one truncated product.
    """
    if not f:
        return [0] * n
    res = [0] * n
    res[0] = f[-1]
    for idx in range(len(f) - 2, -1, -1):
        res = vec_mul(ctx, res, g, n)
        res[0] = ctx.add(res[0], f[idx])
    return res
