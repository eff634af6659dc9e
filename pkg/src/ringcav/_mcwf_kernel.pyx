# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled no-jump propagation loop for quantum trajectories.

Mirrors :mod:`ringcav._mcwf_fallback` exactly; see there for the algorithm.
"""

from libc.math cimport sqrt

cimport numpy as cnp
from scipy.linalg.cython_blas cimport zgemv

cnp.import_array()


cdef inline double _matvec_norm2(const double complex[:, ::1] U,
                                 const double complex[::1] x,
                                 double complex[::1] out) noexcept nogil:
    # U is row-major, i.e. U^T in BLAS column-major terms, so out = U x is
    # zgemv with trans = 'T'.
    cdef int n = <int> x.shape[0]
    cdef int inc = 1
    cdef char trans = b'T'
    cdef double complex one = 1.0
    cdef double complex zero = 0.0
    cdef Py_ssize_t i
    cdef double nrm = 0.0
    zgemv(&trans, &n, &n, &one, <double complex *> &U[0, 0], &n,
          <double complex *> &x[0], &inc, &zero, &out[0], &inc)
    for i in range(n):
        nrm += out[i].real * out[i].real + out[i].imag * out[i].imag
    return nrm


def advance(double complex[::1] psi,
            const double complex[:, :, ::1] ladder,
            double threshold,
            long long t,
            long long t_stop,
            long long sample_units,
            double complex[:, ::1] snapshots,
            double[::1] snap_norms):
    cdef Py_ssize_t n_levels = ladder.shape[0]
    cdef Py_ssize_t dim = psi.shape[0]
    cdef Py_ssize_t j, i, min_level = 0
    cdef long long size, idx
    cdef double nrm, inv
    cdef bint jumped = False
    cdef double complex[::1] tmp = cnp.PyArray_ZEROS(1, [dim], cnp.NPY_COMPLEX128, 0)

    with nogil:
        while t < t_stop:
            j = min_level
            size = (<long long>1) << (n_levels - 1 - j)
            while size > t_stop - t or t % size != 0:
                j += 1
                size >>= 1
            nrm = _matvec_norm2(ladder[j], psi, tmp)
            if nrm < threshold and j < n_levels - 1:
                min_level = j + 1
                continue
            psi[:] = tmp
            t += size
            if t % sample_units == 0:
                idx = t // sample_units
                inv = 1.0 / sqrt(nrm)
                for i in range(dim):
                    snapshots[idx, i] = psi[i] * inv
                snap_norms[idx] = nrm
            if nrm < threshold:
                jumped = True
                break
    return t, jumped
