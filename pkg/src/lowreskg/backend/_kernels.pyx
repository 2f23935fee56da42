# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled message-passing hot kernels (see pure.py for the reference)."""

import numpy as np

cimport numpy as cnp

cnp.import_array()

NAME = "compiled"


def scatter_add_rows(double[:, ::1] values, long[::1] index, Py_ssize_t num_out):
    cdef Py_ssize_t n = values.shape[0]
    cdef Py_ssize_t d = values.shape[1]
    out_arr = np.zeros((num_out, d), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, j, row
    for i in range(n):
        row = index[i]
        for j in range(d):
            out[row, j] += values[i, j]
    return out_arr


def edge_message_sum(
    double[:, ::1] node_state,
    double[:, ::1] edge_emb,
    long[::1] src,
    long[::1] etype,
    long[::1] dst,
    Py_ssize_t num_out,
):
    cdef Py_ssize_t n = src.shape[0]
    cdef Py_ssize_t d = node_state.shape[1]
    out_arr = np.zeros((num_out, d), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t e, j, s, t, k
    for e in range(n):
        s = src[e]
        k = etype[e]
        t = dst[e]
        for j in range(d):
            out[t, j] += node_state[s, j] * edge_emb[k, j]
    return out_arr


def edge_message_sum_backward(
    double[:, ::1] grad_out,
    double[:, ::1] node_state,
    double[:, ::1] edge_emb,
    long[::1] src,
    long[::1] etype,
    long[::1] dst,
):
    cdef Py_ssize_t n = src.shape[0]
    cdef Py_ssize_t d = node_state.shape[1]
    grad_state_arr = np.zeros((node_state.shape[0], d), dtype=np.float64)
    grad_emb_arr = np.zeros((edge_emb.shape[0], d), dtype=np.float64)
    cdef double[:, ::1] grad_state = grad_state_arr
    cdef double[:, ::1] grad_emb = grad_emb_arr
    cdef Py_ssize_t e, j, s, t, k
    cdef double g
    for e in range(n):
        s = src[e]
        k = etype[e]
        t = dst[e]
        for j in range(d):
            g = grad_out[t, j]
            grad_state[s, j] += g * edge_emb[k, j]
            grad_emb[k, j] += g * node_state[s, j]
    return grad_state_arr, grad_emb_arr
