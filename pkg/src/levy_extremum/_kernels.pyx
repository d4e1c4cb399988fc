# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled Cauchy-sum tables.

For each row j the reciprocal matrix R[k, m] = 1/(xi[k] - eta[j] - nodes[m])
is filled in a tight C loop and contracted with the coefficient block via
BLAS zgemm, so no temporaries are allocated per row.
"""

import numpy as np
cimport numpy as cnp
from scipy.linalg.cython_blas cimport zgemm

cnp.import_array()


def cauchy_tables(xi, eta, nodes, coef):
    """out[p, j, k] = sum_m coef[j, m, p] / (xi[k] - eta[j] - nodes[m])."""
    cdef const double complex[::1] x = np.ascontiguousarray(xi, dtype=np.complex128)
    cdef const double complex[::1] e = np.ascontiguousarray(eta, dtype=np.complex128)
    cdef const double complex[::1] z = np.ascontiguousarray(nodes, dtype=np.complex128)
    c_arr = np.asarray(coef, dtype=np.complex128)
    cdef Py_ssize_t nj = e.shape[0], nk = x.shape[0], nm = z.shape[0]
    cdef Py_ssize_t P = c_arr.shape[2]
    if c_arr.shape[0] != nj or c_arr.shape[1] != nm:
        raise ValueError("coef must have shape (len(eta), len(nodes), P)")
    cdef bint shared = c_arr.strides[0] == 0
    cdef double complex[:, :, ::1] C
    if shared:
        C = np.array(c_arr[:1], order="C", copy=True)
    else:
        C = np.require(c_arr, requirements=["C", "W"])
    # output laid out (j, p, k) so that each row is one Fortran-order gemm result
    out = np.empty((nj, P, nk), dtype=np.complex128)
    cdef double complex[:, :, ::1] O = out
    R_arr = np.empty((nm, 2 * nk), dtype=np.float64)
    cdef double[:, ::1] R = R_arr
    cdef const double[::1] xr = np.ascontiguousarray(np.real(xi), dtype=np.float64)
    cdef const double[::1] xim = np.ascontiguousarray(np.imag(xi), dtype=np.float64)
    cdef Py_ssize_t j, k, m
    cdef double ar, ai, br, bi, dr, di, den
    cdef double complex alpha = 1.0, beta = 0.0
    cdef int M_ = <int>nk, N_ = <int>P, K_ = <int>nm
    cdef int lda = <int>nk, ldb = <int>P, ldc = <int>nk
    cdef char tn = b'N', tt = b'T'
    for j in range(nj):
        ar = e[j].real
        ai = e[j].imag
        for m in range(nm):
            br = ar + z[m].real
            bi = ai + z[m].imag
            for k in range(nk):
                dr = xr[k] - br
                di = xim[k] - bi
                den = 1.0 / (dr * dr + di * di)
                R[m, 2 * k] = dr * den
                R[m, 2 * k + 1] = -di * den
        # column-major view: R is (nk x nm) with lda = nk, C[j] is (P x nm) with ldb = P
        # result (nk x P) column-major == O[j] (P, nk) row-major
        zgemm(&tn, &tt, &M_, &N_, &K_, &alpha, <double complex *> &R[0, 0], &lda,
              &C[0 if shared else j, 0, 0], &ldb, &beta, &O[j, 0, 0], &ldc)
    return np.ascontiguousarray(out.transpose(1, 0, 2))
