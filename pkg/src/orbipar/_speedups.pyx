# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled series kernels.

Same contracts as orbipar._kernel_py (vec_mul / vec_inverse / vec_compose);
field arithmetic is inlined over a compiled copy of the exp/log tables.
Addition for extension fields is digitwise base p, so no q*q table is needed.
"""

from libc.stdlib cimport calloc, free

cimport cython


cdef class CompiledCtx:
    cdef public int p, k, q
    cdef int *exp
    cdef int *log

    def __cinit__(self, int p, int k, int q, exp_list, log_list):
        cdef Py_ssize_t i
        self.p = p
        self.k = k
        self.q = q
        self.exp = <int *> calloc(len(exp_list), sizeof(int))
        self.log = <int *> calloc(len(log_list), sizeof(int))
        if self.exp == NULL or self.log == NULL:
            raise MemoryError()
        for i in range(len(exp_list)):
            self.exp[i] = exp_list[i]
        for i in range(len(log_list)):
            self.log[i] = log_list[i]

    def __dealloc__(self):
        if self.exp != NULL:
            free(self.exp)
        if self.log != NULL:
            free(self.log)


cdef inline int _add(CompiledCtx c, int a, int b) nogil:
    cdef int out = 0, mult = 1, i
    if c.k == 1:
        out = a + b
        if out >= c.p:
            out -= c.p
        return out
    for i in range(c.k):
        out += ((a + b) % c.p) * mult
        a //= c.p
        b //= c.p
        mult *= c.p
    return out


cdef inline int _neg(CompiledCtx c, int a) nogil:
    cdef int out = 0, mult = 1, i
    if c.k == 1:
        return 0 if a == 0 else c.p - a
    for i in range(c.k):
        out += ((c.p - a % c.p) % c.p) * mult
        a //= c.p
        mult *= c.p
    return out


cdef inline int _mul(CompiledCtx c, int a, int b) nogil:
    if a == 0 or b == 0:
        return 0
    return c.exp[c.log[a] + c.log[b]]


cdef int _vec_mul_into(CompiledCtx c, int *a, Py_ssize_t la, int *b, Py_ssize_t lb,
                       int *out, Py_ssize_t n) nogil:
    cdef Py_ssize_t k, i, lo, hi
    cdef long long acc
    cdef int acc_f
    if c.k == 1:
        for k in range(n):
            acc = 0
            lo = k - lb + 1
            if lo < 0:
                lo = 0
            hi = k + 1
            if hi > la:
                hi = la
            for i in range(lo, hi):
                acc += <long long> a[i] * b[k - i]
            out[k] = <int> (acc % c.p)
    else:
        for k in range(n):
            acc_f = 0
            lo = k - lb + 1
            if lo < 0:
                lo = 0
            hi = k + 1
            if hi > la:
                hi = la
            for i in range(lo, hi):
                if a[i] != 0 and b[k - i] != 0:
                    acc_f = _add(c, acc_f, c.exp[c.log[a[i]] + c.log[b[k - i]]])
            out[k] = acc_f
    return 0


cdef int *_to_c(list v) except NULL:
    cdef Py_ssize_t i, n = len(v)
    cdef int *out = <int *> calloc(n if n else 1, sizeof(int))
    if out == NULL:
        raise MemoryError()
    for i in range(n):
        out[i] = v[i]
    return out


cdef list _to_list(int *v, Py_ssize_t n):
    cdef Py_ssize_t i
    return [v[i] for i in range(n)]


def vec_mul(CompiledCtx c, list a, list b, Py_ssize_t n):
    cdef int *ca = _to_c(a)
    cdef int *cb = _to_c(b)
    cdef int *out = <int *> calloc(n if n else 1, sizeof(int))
    if out == NULL:
        free(ca); free(cb)
        raise MemoryError()
    _vec_mul_into(c, ca, len(a), cb, len(b), out, n)
    res = _to_list(out, n)
    free(ca); free(cb); free(out)
    return res


def vec_inverse(CompiledCtx c, list a, Py_ssize_t n):
    cdef int *ca = _to_c(a)
    cdef int *out = <int *> calloc(n if n else 1, sizeof(int))
    cdef Py_ssize_t k, i, hi, la = len(a)
    cdef int acc, c0inv
    if out == NULL:
        free(ca)
        raise MemoryError()
    c0inv = c.exp[c.q - 1 - c.log[a[0]]]
    out[0] = c0inv
    for k in range(1, n):
        acc = 0
        hi = k + 1
        if hi > la:
            hi = la
        for i in range(1, hi):
            if ca[i] != 0 and out[k - i] != 0:
                acc = _add(c, acc, c.exp[c.log[ca[i]] + c.log[out[k - i]]])
        out[k] = _mul(c, _neg(c, acc), c0inv)
    res = _to_list(out, n)
    free(ca); free(out)
    return res


def vec_compose(CompiledCtx c, list f, list g, Py_ssize_t n):
    cdef Py_ssize_t idx, lf = len(f)
    cdef int *cg
    cdef int *res
    cdef int *tmp
    cdef int *swap
    if lf == 0:
        return [0] * n
    cg = _to_c(g)
    res = <int *> calloc(n if n else 1, sizeof(int))
    tmp = <int *> calloc(n if n else 1, sizeof(int))
    if res == NULL or tmp == NULL:
        free(cg)
        raise MemoryError()
    res[0] = f[lf - 1]
    for idx in range(lf - 2, -1, -1):
        _vec_mul_into(c, res, n, cg, len(g), tmp, n)
        swap = res; res = tmp; tmp = swap
        res[0] = _add(c, res[0], f[idx])
    out = _to_list(res, n)
    free(cg); free(res); free(tmp)
    return out
