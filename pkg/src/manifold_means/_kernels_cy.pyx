# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled implementation of the dense linear-algebra kernels.

Twin of ``_kernels_py``: same eight functions, same semantics, same
error types, but calling LAPACK/BLAS directly on Fortran-ordered
buffers to cut per-call overhead for the small matrices (k <= 10 or so)
that dominate the Monte Carlo loops.
"""

import numpy as np

from libc.math cimport acos, ceil, fabs, log2, sqrt

from scipy.linalg.cython_blas cimport dgemm
from scipy.linalg.cython_lapack cimport dgeqrf, dgesdd, dgesv, dorgqr, dsyevd

from .errors import NoConvergence, RankDeficient, Unsolvable

RANK_TOL_FACTOR = 1e-12

cdef double _RANK_TOL_FACTOR = 1e-12


cdef inline object _fcopy(object x):
    """Fresh writable Fortran-ordered float64 copy of a caller array.

    The LAPACK drivers overwrite their input, and callers may hand in
    read-only views, so every entry point must own its buffer.
    """
    return np.array(x, dtype=np.float64, order='F', copy=True)


cdef inline object _ccopy(object x):
    """Row-major counterpart of ``_fcopy`` for the pure-loop kernels."""
    return np.array(x, dtype=np.float64, order='C', copy=True)


cdef void _mm(char ta, char tb, int m, int n, int k, double alpha,
              double[::1, :] a, double[::1, :] b, double beta,
              double[::1, :] c):
    """c = alpha * op(a) @ op(b) + beta * c (column-major)."""
    cdef int lda = a.shape[0]
    cdef int ldb = b.shape[0]
    cdef int ldc = c.shape[0]
    dgemm(&ta, &tb, &m, &n, &k, &alpha, &a[0, 0], &lda, &b[0, 0], &ldb,
          &beta, &c[0, 0], &ldc)


cdef object _thin_svd(double[::1, :] a, int p, int k,
                      double[::1] s, double[::1, :] u, double[::1, :] vt,
                      bint want_vectors):
    """dgesdd on a (destroyed); fills s (and u, vt when asked)."""
    cdef char jobz = ord('S') if want_vectors else ord('N')
    cdef int info = 0, lwork = -1
    cdef int ldu = u.shape[0], ldvt = vt.shape[0]
    cdef double wkopt = 0.0
    cdef int[::1] iwork = np.empty(8 * k, dtype=np.intc)
    dgesdd(&jobz, &p, &k, &a[0, 0], &p, &s[0], &u[0, 0], &ldu,
           &vt[0, 0], &ldvt, &wkopt, &lwork, &iwork[0], &info)
    lwork = <int> wkopt
    cdef double[::1] work = np.empty(lwork)
    dgesdd(&jobz, &p, &k, &a[0, 0], &p, &s[0], &u[0, 0], &ldu,
           &vt[0, 0], &ldvt, &work[0], &lwork, &iwork[0], &info)
    if info != 0:
        raise RuntimeError(f"dgesdd failed with info={info}")
    return None


def polar_factor(x):
    """Orthogonal polar factor uf(X) of a tall full-rank matrix."""
    cdef double[::1, :] a = _fcopy(x)
    cdef int p = a.shape[0]
    cdef int k = a.shape[1]
    cdef double[::1] s = np.empty(k)
    cdef double[::1, :] u = np.empty((p, k), order='F')
    cdef double[::1, :] vt = np.empty((k, k), order='F')
    _thin_svd(a, p, k, s, u, vt, True)
    if s[k - 1] <= _RANK_TOL_FACTOR * max(p, k) * s[0]:
        raise RankDeficient(
            f"polar factor undefined: sigma_min={s[k - 1]:.3e} "
            f"with sigma_max={s[0]:.3e}"
        )
    cdef double[::1, :] out = np.empty((p, k), order='F')
    _mm(ord('N'), ord('N'), p, k, k, 1.0, u, vt, 0.0, out)
    return np.ascontiguousarray(out)


def qr_positive(x):
    """Thin QR with diag(R) > 0; returns (Q, R)."""
    cdef double[::1, :] a = _fcopy(x)
    cdef int p = a.shape[0]
    cdef int k = a.shape[1]
    cdef double[::1] tau = np.empty(k)
    cdef int info = 0, lwork = -1
    cdef double wkopt = 0.0
    dgeqrf(&p, &k, &a[0, 0], &p, &tau[0], &wkopt, &lwork, &info)
    lwork = <int> wkopt
    cdef double[::1] work = np.empty(lwork)
    dgeqrf(&p, &k, &a[0, 0], &p, &tau[0], &work[0], &lwork, &info)
    if info != 0:
        raise RuntimeError(f"dgeqrf failed with info={info}")
    r_arr = np.zeros((k, k))
    cdef double[:, ::1] r = r_arr
    cdef int i, j
    cdef double scale = 0.0, d
    for j in range(k):
        for i in range(j + 1):
            r[i, j] = a[i, j]
        d = fabs(r[j, j])
        if d > scale:
            scale = d
    for j in range(k):
        if fabs(r[j, j]) <= _RANK_TOL_FACTOR * max(p, k) * scale:
            raise RankDeficient("qr factor undefined: near-zero diagonal in R")
    lwork = -1
    dorgqr(&p, &k, &k, &a[0, 0], &p, &tau[0], &wkopt, &lwork, &info)
    lwork = <int> wkopt
    work = np.empty(lwork)
    dorgqr(&p, &k, &k, &a[0, 0], &p, &tau[0], &work[0], &lwork, &info)
    if info != 0:
        raise RuntimeError(f"dorgqr failed with info={info}")
    for j in range(k):
        if r[j, j] < 0.0:
            for i in range(p):
                a[i, j] = -a[i, j]
            for i in range(j, k):
                r[j, i] = -r[j, i]
    return np.ascontiguousarray(a), r_arr


def sym_eig(s):
    """Descending eigendecomposition of (S + S.T)/2."""
    sym = np.asarray(s, dtype=np.float64)
    cdef double[::1, :] a = np.asfortranarray(0.5 * (sym + sym.T))
    cdef int p = a.shape[0]
    cdef double[::1] w = np.empty(p)
    cdef char jobz = ord('V')
    cdef char uplo = ord('L')
    cdef int info = 0, lwork = -1, liwork = -1, iwkopt = 0
    cdef double wkopt = 0.0
    dsyevd(&jobz, &uplo, &p, &a[0, 0], &p, &w[0], &wkopt, &lwork,
           &iwkopt, &liwork, &info)
    lwork = <int> wkopt
    liwork = iwkopt
    cdef double[::1] work = np.empty(lwork)
    cdef int[::1] iwork = np.empty(liwork, dtype=np.intc)
    dsyevd(&jobz, &uplo, &p, &a[0, 0], &p, &w[0], &work[0], &lwork,
           &iwork[0], &liwork, &info)
    if info != 0:
        raise RuntimeError(f"dsyevd failed with info={info}")
    w_arr = np.asarray(w)
    v_arr = np.asarray(a)
    return w_arr[::-1].copy(), np.ascontiguousarray(v_arr[:, ::-1])


# Pade-13 numerator coefficients (Higham's scaling-and-squaring).
cdef double[14] _PADE13
_PADE13[0] = 64764752532480000.0
_PADE13[1] = 32382376266240000.0
_PADE13[2] = 7771770303897600.0
_PADE13[3] = 1187353796428800.0
_PADE13[4] = 129060195264000.0
_PADE13[5] = 10559470521600.0
_PADE13[6] = 670442572800.0
_PADE13[7] = 33522128640.0
_PADE13[8] = 1323241920.0
_PADE13[9] = 40840800.0
_PADE13[10] = 960960.0
_PADE13[11] = 16380.0
_PADE13[12] = 182.0
_PADE13[13] = 1.0

cdef double _THETA13 = 5.371920351148152


def expm_skew(om):
    """expm of the skew-symmetric part of ``om`` (degree-13 Pade with
    scaling and squaring)."""
    omc = np.asarray(om, dtype=np.float64)
    cdef double[::1, :] a = np.asfortranarray(0.5 * (omc - omc.T))
    cdef int n = a.shape[0]
    cdef int i, j, m, squarings = 0
    cdef double nrm = 0.0, colsum, scale
    for j in range(n):
        colsum = 0.0
        for i in range(n):
            colsum += fabs(a[i, j])
        if colsum > nrm:
            nrm = colsum
    if nrm > _THETA13:
        squarings = <int> ceil(log2(nrm / _THETA13))
        scale = 2.0 ** (-squarings)
        for j in range(n):
            for i in range(n):
                a[i, j] *= scale
    cdef double[::1, :] a2 = np.empty((n, n), order='F')
    cdef double[::1, :] a4 = np.empty((n, n), order='F')
    cdef double[::1, :] a6 = np.empty((n, n), order='F')
    cdef double[::1, :] t1 = np.empty((n, n), order='F')
    cdef double[::1, :] t2 = np.empty((n, n), order='F')
    cdef double[::1, :] u = np.empty((n, n), order='F')
    cdef double[::1, :] v = np.empty((n, n), order='F')
    _mm(ord('N'), ord('N'), n, n, n, 1.0, a, a, 0.0, a2)
    _mm(ord('N'), ord('N'), n, n, n, 1.0, a2, a2, 0.0, a4)
    _mm(ord('N'), ord('N'), n, n, n, 1.0, a2, a4, 0.0, a6)
    # t1 = b13 A6 + b11 A4 + b9 A2
    for j in range(n):
        for i in range(n):
            t1[i, j] = (_PADE13[13] * a6[i, j] + _PADE13[11] * a4[i, j]
                        + _PADE13[9] * a2[i, j])
    _mm(ord('N'), ord('N'), n, n, n, 1.0, a6, t1, 0.0, t2)
    # t2 += b7 A6 + b5 A4 + b3 A2 + b1 I
    for j in range(n):
        for i in range(n):
            t2[i, j] += (_PADE13[7] * a6[i, j] + _PADE13[5] * a4[i, j]
                         + _PADE13[3] * a2[i, j])
        t2[j, j] += _PADE13[1]
    _mm(ord('N'), ord('N'), n, n, n, 1.0, a, t2, 0.0, u)
    # t1 = b12 A6 + b10 A4 + b8 A2
    for j in range(n):
        for i in range(n):
            t1[i, j] = (_PADE13[12] * a6[i, j] + _PADE13[10] * a4[i, j]
                        + _PADE13[8] * a2[i, j])
    _mm(ord('N'), ord('N'), n, n, n, 1.0, a6, t1, 0.0, v)
    # v += b6 A6 + b4 A4 + b2 A2 + b0 I
    for j in range(n):
        for i in range(n):
            v[i, j] += (_PADE13[6] * a6[i, j] + _PADE13[4] * a4[i, j]
                        + _PADE13[2] * a2[i, j])
        v[j, j] += _PADE13[0]
    # solve (V - U) X = (V + U); reuse t1 as the system, t2 as the rhs/X
    for j in range(n):
        for i in range(n):
            t1[i, j] = v[i, j] - u[i, j]
            t2[i, j] = v[i, j] + u[i, j]
    cdef int[::1] ipiv = np.empty(n, dtype=np.intc)
    cdef int info = 0
    dgesv(&n, &n, &t1[0, 0], &n, &ipiv[0], &t2[0, 0], &n, &info)
    if info != 0:
        raise Unsolvable(f"Pade denominator singular (info={info})")
    for m in range(squarings):
        _mm(ord('N'), ord('N'), n, n, n, 1.0, t2, t2, 0.0, t1)
        t1, t2 = t2, t1
    return np.ascontiguousarray(t2)


def solve_sym_product(a):
    """Symmetric S with A S + S A.T = 2 I via the dense k^2 system."""
    cdef double[::1, :] av = _fcopy(a)
    cdef int k = av.shape[0]
    cdef int k2 = k * k
    cdef double[::1, :] m = np.zeros((k2, k2), order='F')
    cdef double[::1] rhs = np.zeros(k2)
    cdef int i, j, t, row
    for j in range(k):
        for i in range(k):
            row = i + j * k
            for t in range(k):
                m[row, t + j * k] += av[i, t]
                m[row, i + t * k] += av[j, t]
        rhs[j + j * k] = 2.0
    cdef int[::1] ipiv = np.empty(k2, dtype=np.intc)
    cdef int info = 0, one = 1
    dgesv(&k2, &one, &m[0, 0], &k2, &ipiv[0], &rhs[0], &k2, &info)
    if info != 0:
        raise Unsolvable("A S + S A.T = 2I is singular")
    s = np.asarray(rhs).reshape((k, k), order='F')
    if not np.all(np.isfinite(s)):
        raise Unsolvable("A S + S A.T = 2I produced non-finite solution")
    return 0.5 * (s + s.T)


def solve_upper_from_sym(b):
    """Upper-triangular R with B R + R.T B.T = 2 I, column recursion."""
    cdef double[:, ::1] bv = _ccopy(b)
    cdef int k = bv.shape[0]
    r_arr = np.zeros((k, k))
    cdef double[:, ::1] r = r_arr
    cdef double[:, ::1] c = np.zeros((k, k))
    cdef double[::1, :] blk = np.empty((k, k), order='F')
    cdef double[::1] y = np.empty(k)
    cdef int[::1] ipiv = np.empty(k, dtype=np.intc)
    cdef int i, j, t, nb, info, one = 1
    cdef double acc
    for j in range(k):
        nb = j + 1
        for t in range(nb):
            for i in range(nb):
                blk[i, t] = bv[i, t]
        for i in range(j):
            y[i] = -c[j, i]
        y[j] = 1.0
        info = 0
        dgesv(&nb, &one, &blk[0, 0], &k, &ipiv[0], &y[0], &k, &info)
        if info != 0:
            raise Unsolvable(f"leading {nb}x{nb} block of B is singular")
        for i in range(nb):
            r[i, j] = y[i]
        for i in range(k):
            acc = 0.0
            for t in range(nb):
                acc += bv[i, t] * y[t]
            c[i, j] = acc
    if not np.all(np.isfinite(r_arr)):
        raise Unsolvable("triangular recursion produced non-finite column")
    return r_arr


def solve_riccati(a, q, double tol=1e-12, int max_iter=1000):
    """Symmetric solution of 2 S = Q + A S - S A + S^2 by fixed point."""
    cdef double[:, ::1] av = _ccopy(a)
    cdef double[:, ::1] qv = _ccopy(q)
    cdef int k = qv.shape[0]
    s_arr = np.zeros((k, k))
    cdef double[:, ::1] s = s_arr
    cdef double[:, ::1] t = np.empty((k, k))
    cdef int i, j, m, sweep
    cdef double acc, delta
    for sweep in range(max_iter):
        for i in range(k):
            for j in range(k):
                acc = qv[i, j]
                for m in range(k):
                    acc += (av[i, m] * s[m, j] - s[i, m] * av[m, j]
                            + s[i, m] * s[m, j])
                t[i, j] = 0.5 * acc
        delta = 0.0
        for i in range(k):
            for j in range(k):
                acc = t[i, j] - s[i, j]
                delta += acc * acc
                s[i, j] = t[i, j]
        if sqrt(delta) < tol:
            return 0.5 * (s_arr + s_arr.T)
    raise NoConvergence(
        f"Riccati fixed point did not reach {tol:.1e} in {max_iter} iterations"
    )


def principal_angles(u, v):
    """Ascending principal angles between two orthonormal spans."""
    cdef double[::1, :] uf = _fcopy(u)
    cdef double[::1, :] vf = _fcopy(v)
    cdef int p = uf.shape[0]
    cdef int k = uf.shape[1]
    cdef double[::1, :] b = np.empty((k, k), order='F')
    _mm(ord('T'), ord('N'), k, k, p, 1.0, uf, vf, 0.0, b)
    cdef double[::1] s = np.empty(k)
    cdef double[::1, :] dummy = np.empty((1, 1), order='F')
    _thin_svd(b, k, k, s, dummy, dummy, False)
    theta = np.empty(k)
    cdef double[::1] tv = theta
    cdef int i
    cdef double val
    for i in range(k):
        val = s[i]
        if val > 1.0:
            val = 1.0
        elif val < 0.0:
            val = 0.0
        tv[i] = acos(val)
    return theta
