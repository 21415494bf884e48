# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled arithmetic kernels; behavioural twin of qipsim._kernels.purepy.

Elements are uint64 values (bit i = coefficient of x^i), so k <= 64. The one
intentional divergence is gf_inv: the pure backend runs the extended Euclidean
algorithm on unbounded ints, while here Fermat exponentiation (a^(2^k-2))
keeps every intermediate inside a machine word; the returned inverse is the
same unique element either way.
"""

from libc.stdlib cimport free, malloc

ctypedef unsigned long long u64

NAME = "fast"

OP_VAR, OP_NOT, OP_AND, OP_OR = 0, 1, 2, 3
K_FORALL, K_EXISTS, K_REDUCE = 0, 1, 2

cdef enum:
    MAXPTS = 64  # interpolation points per round; plenty for desk scale


cdef struct Ctx:
    u64 glow   # modulus without its x^k bit
    u64 mask   # 2^k - 1
    u64 top    # 2^(k-1)


cdef Ctx _ctx(object g, int k):
    # mask arithmetic on Python ints: a C int literal would wrap the shift
    # count at 32 bits and silently corrupt every width from k=32 up
    cdef Ctx c
    cdef object mask_py = ((<object> 1) << k) - 1
    c.mask = <u64> mask_py
    c.glow = <u64> (g & mask_py)
    c.top = <u64> ((<object> 1) << (k - 1))
    return c


cdef inline u64 c_mul(u64 a, u64 b, Ctx* c) noexcept:
    cdef u64 p = 0
    cdef u64 carry
    while b:
        if b & 1:
            p ^= a
        b >>= 1
        carry = a & c.top
        a = (a << 1) & c.mask
        if carry:
            a ^= c.glow
    return p


cdef inline u64 c_inv(u64 a, Ctx* c) noexcept:
    cdef u64 e = c.mask - 1  # 2^k - 2
    cdef u64 acc = 1
    cdef u64 base = a
    while e:
        if e & 1:
            acc = c_mul(acc, base, c)
        base = c_mul(base, base, c)
        e >>= 1
    return acc


cdef inline u64 c_poly_eval(u64* cs, int n, u64 z, Ctx* c) noexcept:
    cdef u64 acc = 0
    cdef int i
    for i in range(n - 1, -1, -1):
        acc = c_mul(acc, z, c) ^ cs[i]
    return acc


cdef void c_interp(u64* xs, u64* ys, int n, u64* out, Ctx* c) noexcept:
    cdef u64 num[MAXPTS + 1]
    cdef u64 den, scale
    cdef int i, j, t, ln
    for t in range(n):
        out[t] = 0
    for i in range(n):
        num[0] = 1
        ln = 1
        den = 1
        for j in range(n):
            if j == i:
                continue
            num[ln] = 0
            ln += 1
            for t in range(ln - 1, 0, -1):
                num[t] = num[t - 1] ^ c_mul(num[t], xs[j], c)
            num[0] = c_mul(num[0], xs[j], c)
            den = c_mul(den, xs[i] ^ xs[j], c)
        scale = c_mul(ys[i], c_inv(den, c), c)
        for t in range(n):
            out[t] ^= c_mul(num[t], scale, c)


cdef u64 c_eval_formula(long* prog, int plen, u64* assign, u64* stack, Ctx* c) noexcept:
    cdef int sp = 0
    cdef int pos
    cdef long op
    cdef u64 b
    for pos in range(0, plen, 2):
        op = prog[pos]
        if op == 0:
            stack[sp] = assign[prog[pos + 1]]
            sp += 1
        elif op == 1:
            stack[sp - 1] ^= 1
        elif op == 2:
            b = stack[sp - 1]
            sp -= 1
            stack[sp - 1] = c_mul(stack[sp - 1], b, c)
        else:
            b = stack[sp - 1]
            sp -= 1
            stack[sp - 1] = stack[sp - 1] ^ b ^ c_mul(stack[sp - 1], b, c)
    return stack[0]


cdef u64 c_qval(long* kinds, long* tvars, int nops, int start, long* prog,
                int plen, u64* assign, u64* stack, Ctx* c) noexcept:
    if start == nops:
        return c_eval_formula(prog, plen, assign, stack, c)
    cdef int t = tvars[start]
    cdef u64 old = assign[t]
    cdef u64 v0, v1
    assign[t] = 0
    v0 = c_qval(kinds, tvars, nops, start + 1, prog, plen, assign, stack, c)
    assign[t] = 1
    v1 = c_qval(kinds, tvars, nops, start + 1, prog, plen, assign, stack, c)
    assign[t] = old
    cdef long kind = kinds[start]
    if kind == 0:
        return c_mul(v0, v1, c)
    if kind == 1:
        return v0 ^ v1 ^ c_mul(v0, v1, c)
    return c_mul(old ^ 1, v0, c) ^ c_mul(old, v1, c)


cdef bint c_sweep(long* kinds, long* tvars, long* dbounds, int nops, int j,
                  long* prog, int plen, u64* assign, u64* stack, u64 v,
                  u64 size, Ctx* c) noexcept:
    if j == nops:
        return v == c_eval_formula(prog, plen, assign, stack, c)
    cdef int t = tvars[j]
    cdef u64 old = assign[t]
    cdef int npts = <int> dbounds[j] + 1
    if <u64> npts > size:
        npts = <int> size
    cdef u64 xs[MAXPTS]
    cdef u64 ys[MAXPTS]
    cdef u64 cs[MAXPTS]
    cdef int z
    for z in range(npts):
        xs[z] = <u64> z
        assign[t] = <u64> z
        ys[z] = c_qval(kinds, tvars, nops, j + 1, prog, plen, assign, stack, c)
    assign[t] = old
    c_interp(xs, ys, npts, cs, c)
    cdef u64 c0 = ys[0]
    cdef u64 c1 = ys[1]
    cdef u64 comb
    cdef long kind = kinds[j]
    if kind == 0:
        comb = c_mul(c0, c1, c)
    elif kind == 1:
        comb = c0 ^ c1 ^ c_mul(c0, c1, c)
    else:
        comb = c_mul(old ^ 1, c0, c) ^ c_mul(old, c1, c)
    if comb != v:
        return False
    cdef u64 r, vr
    for r in range(size):
        assign[t] = r
        vr = ys[r] if r < <u64> npts else c_poly_eval(cs, npts, r, c)
        if not c_sweep(kinds, tvars, dbounds, nops, j + 1, prog, plen,
                       assign, stack, vr, size, c):
            assign[t] = old
            return False
    assign[t] = old
    return True


# ---------------------------------------------------------------------------
# Python entry points.


cdef long* _longs(object seq, Py_ssize_t* n) except NULL:
    cdef Py_ssize_t ln = len(seq)
    cdef long* buf = <long*> malloc((ln if ln else 1) * sizeof(long))
    if buf == NULL:
        raise MemoryError
    cdef Py_ssize_t i
    for i in range(ln):
        buf[i] = seq[i]
    n[0] = ln
    return buf


cdef u64* _u64s(object seq, Py_ssize_t* n) except NULL:
    cdef Py_ssize_t ln = len(seq)
    cdef u64* buf = <u64*> malloc((ln if ln else 1) * sizeof(u64))
    if buf == NULL:
        raise MemoryError
    cdef Py_ssize_t i
    for i in range(ln):
        buf[i] = seq[i]
    n[0] = ln
    return buf


def gf_mul(a, b, g, k):
    cdef Ctx c = _ctx(g, k)
    return c_mul(<u64> a, <u64> b, &c)


def gf_inv(a, g, k):
    if a == 0:
        raise ZeroDivisionError("0 has no inverse")
    cdef Ctx c = _ctx(g, k)
    return c_inv(<u64> a, &c)


def poly_eval(coeffs, z, g, k):
    cdef Ctx c = _ctx(g, k)
    cdef Py_ssize_t n
    cdef u64* cs = _u64s(coeffs, &n)
    cdef u64 out = c_poly_eval(cs, <int> n, <u64> z, &c)
    free(cs)
    return out


def interpolate(xs, ys, g, k):
    if len(xs) != len(ys):
        raise ValueError("xs and ys must have equal length")
    if len(xs) > MAXPTS:
        raise ValueError(f"compiled backend interpolates at most {MAXPTS} points")
    cdef Ctx c = _ctx(g, k)
    cdef Py_ssize_t n, n2
    cdef u64* cxs = _u64s(xs, &n)
    cdef u64* cys = _u64s(ys, &n2)
    cdef u64 out[MAXPTS]
    c_interp(cxs, cys, <int> n, out, &c)
    free(cxs)
    free(cys)
    return [out[i] for i in range(n)]


def eval_formula(prog, assign, g, k):
    cdef Ctx c = _ctx(g, k)
    cdef Py_ssize_t plen, alen
    cdef long* cprog = _longs(prog, &plen)
    cdef u64* cassign = _u64s(assign, &alen)
    cdef u64* stack = <u64*> malloc((plen // 2 + 1) * sizeof(u64))
    if stack == NULL:
        free(cprog)
        free(cassign)
        raise MemoryError
    cdef u64 out = c_eval_formula(cprog, <int> plen, cassign, stack, &c)
    free(cprog)
    free(cassign)
    free(stack)
    return out


def quantified_value(kinds, tvars, start, prog, assign, g, k):
    cdef Ctx c = _ctx(g, k)
    cdef Py_ssize_t nops, nt, plen, alen
    cdef long* ckinds = _longs(kinds, &nops)
    cdef long* ctvars = _longs(tvars, &nt)
    cdef long* cprog = _longs(prog, &plen)
    cdef u64* cassign = _u64s(assign, &alen)
    cdef u64* stack = <u64*> malloc((plen // 2 + 1) * sizeof(u64))
    if stack == NULL:
        free(ckinds)
        free(ctvars)
        free(cprog)
        free(cassign)
        raise MemoryError
    cdef u64 out = c_qval(ckinds, ctvars, <int> nops, <int> start, cprog,
                          <int> plen, cassign, stack, &c)
    free(ckinds)
    free(ctvars)
    free(cprog)
    free(cassign)
    free(stack)
    return out


def honest_sweep(kinds, tvars, dbounds, prog, nvars, g, k):
    if any(d + 1 > MAXPTS for d in dbounds):
        raise ValueError(f"compiled backend supports degree bounds below {MAXPTS}")
    if k >= 32:
        raise ValueError("exhaustive sweep is not meaningful beyond k=31")
    cdef Ctx c = _ctx(g, k)
    cdef Py_ssize_t nops, nt, nd, plen
    cdef long* ckinds = _longs(kinds, &nops)
    cdef long* ctvars = _longs(tvars, &nt)
    cdef long* cdbounds = _longs(dbounds, &nd)
    cdef long* cprog = _longs(prog, &plen)
    cdef u64* cassign = <u64*> malloc((nvars if nvars else 1) * sizeof(u64))
    cdef u64* stack = <u64*> malloc((plen // 2 + 1) * sizeof(u64))
    if cassign == NULL or stack == NULL:
        raise MemoryError
    cdef int i
    for i in range(nvars):
        cassign[i] = 0
    cdef bint ok = c_sweep(ckinds, ctvars, cdbounds, <int> nops, 0, cprog,
                           <int> plen, cassign, stack, 1, (<u64> 1) << k, &c)
    free(ckinds)
    free(ctvars)
    free(cdbounds)
    free(cprog)
    free(cassign)
    free(stack)
    return bool(ok)
