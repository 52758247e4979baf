# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernel: scalar inner loops, GIL released during the batch.

Same evaluation-order contract as the numpy fallback: per destination
neuron the accumulator starts at the bias, weighted inputs added in
fan-in order, hidden layers squashed by tanh, linear output layer.
"""

from libc.math cimport tanh
from libc.stdlib cimport free, malloc

import numpy as np


def forward_batch(double[::1] params, sizes, double[:, ::1] X):
    cdef Py_ssize_t n_layers = len(sizes) - 1
    cdef Py_ssize_t n = X.shape[0]
    cdef Py_ssize_t max_width = 0
    cdef Py_ssize_t i

    cdef Py_ssize_t[64] csizes
    if n_layers + 1 > 64:
        raise ValueError("too many layers for the compiled kernel")
    for i in range(n_layers + 1):
        csizes[i] = sizes[i]
        if csizes[i] > max_width:
            max_width = csizes[i]

    out_arr = np.empty((n, sizes[n_layers]), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double *buf_a
    cdef double *buf_b
    cdef double *prev
    cdef double *cur
    cdef double *tmp
    cdef double acc
    cdef Py_ssize_t row, layer, j, k, offset, fan_in, fan_out, w_base

    with nogil:
        buf_a = <double *> malloc(max_width * sizeof(double))
        buf_b = <double *> malloc(max_width * sizeof(double))
        if buf_a == NULL or buf_b == NULL:
            free(buf_a)
            free(buf_b)
            with gil:
                raise MemoryError()
        for row in range(n):
            prev = buf_a
            cur = buf_b
            for k in range(csizes[0]):
                prev[k] = X[row, k]
            offset = 0
            for layer in range(n_layers):
                fan_in = csizes[layer]
                fan_out = csizes[layer + 1]
                for j in range(fan_out):
                    acc = params[offset + fan_in * fan_out + j]
                    w_base = offset + j * fan_in
                    for k in range(fan_in):
                        acc += params[w_base + k] * prev[k]
                    if layer < n_layers - 1:
                        acc = tanh(acc)
                    cur[j] = acc
                offset += fan_in * fan_out + fan_out
                tmp = prev
                prev = cur
                cur = tmp
            for j in range(csizes[n_layers]):
                out[row, j] = prev[j]
        free(buf_a)
        free(buf_b)
    return out_arr
