"""Scalar reference implementations of the fifteen su3 kernels.

Every kernel is straight-line real arithmetic on (re, im) pairs, one element
read or written at a time, in the arrays' own precision. This backend is the
correctness reference and the substrate for operation counting: any object
supporting ``*``, ``+``, ``-`` can flow through it.

Summation convention: each output component of a complex contraction
accumulates the four real product sums (re*re, re*im, im*re, im*im)
separately, left to right over the contraction index, and combines them with
a single add or subtract at the end. The vector backend evaluates its packed
lanes in the same order, so the two backends round identically; keeping one
canonical association is what makes tight cross-backend tolerances
meaningful.

Conjugation conventions (adj = conjugate transpose):
    mult_su3_nn          c[i][k] = sum_j a[i][j] * b[j][k]
    mult_su3_na          c[i][k] = sum_j a[i][j] * conj(b[k][j])
    mult_su3_an          c[i][k] = sum_j conj(a[j][i]) * b[j][k]
    mult_adj_su3_mat_vec c[i]    = sum_j conj(a[j][i]) * b[j]
    su3_projector        c[i][j] = a[i] * conj(b[j])
"""
from __future__ import annotations

import numpy as np

from . import validation
from .types import OPERAND_SHAPES, batch_count, routine_spec


def _result(out: np.ndarray | None, like: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    if out is None:
        return np.empty(shape, dtype=like.dtype)
    if out.shape != shape:
        raise ValueError(f"result array has shape {out.shape}, expected {shape}")
    return out


def add_su3_vector(a: np.ndarray, b: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
    """c[i] = a[i] + b[i]."""
    validation.check_no_alias(out, a, b)
    c = _result(out, a, (3, 2))
    for i in range(3):
        c[i, 0] = a[i, 0] + b[i, 0]
        c[i, 1] = a[i, 1] + b[i, 1]
    return c


def mult_su3_mat_vec(a: np.ndarray, b: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
    """c[i] = sum_j a[i][j] * b[j]."""
    validation.check_no_alias(out, a, b)
    c = _result(out, b, (3, 2))
    for i in range(3):
        rr = a[i, 0, 0] * b[0, 0] + a[i, 1, 0] * b[1, 0] + a[i, 2, 0] * b[2, 0]
        ri = a[i, 0, 0] * b[0, 1] + a[i, 1, 0] * b[1, 1] + a[i, 2, 0] * b[2, 1]
        ir = a[i, 0, 1] * b[0, 0] + a[i, 1, 1] * b[1, 0] + a[i, 2, 1] * b[2, 0]
        ii = a[i, 0, 1] * b[0, 1] + a[i, 1, 1] * b[1, 1] + a[i, 2, 1] * b[2, 1]
        c[i, 0] = rr - ii
        c[i, 1] = ri + ir
    return c


def mult_adj_su3_mat_vec(a: np.ndarray, b: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
    """c[i] = sum_j conj(a[j][i]) * b[j]."""
    validation.check_no_alias(out, a, b)
    c = _result(out, b, (3, 2))
    for i in range(3):
        rr = a[0, i, 0] * b[0, 0] + a[1, i, 0] * b[1, 0] + a[2, i, 0] * b[2, 0]
        ri = a[0, i, 0] * b[0, 1] + a[1, i, 0] * b[1, 1] + a[2, i, 0] * b[2, 1]
        ir = a[0, i, 1] * b[0, 0] + a[1, i, 1] * b[1, 0] + a[2, i, 1] * b[2, 0]
        ii = a[0, i, 1] * b[0, 1] + a[1, i, 1] * b[1, 1] + a[2, i, 1] * b[2, 1]
        c[i, 0] = rr + ii
        c[i, 1] = ri - ir
    return c


def mult_su3_nn(a: np.ndarray, b: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
    """c[i][k] = sum_j a[i][j] * b[j][k]."""
    validation.check_no_alias(out, a, b)
    c = _result(out, a, (3, 3, 2))
    for i in range(3):
        for k in range(3):
            rr = a[i, 0, 0] * b[0, k, 0] + a[i, 1, 0] * b[1, k, 0] + a[i, 2, 0] * b[2, k, 0]
            ri = a[i, 0, 0] * b[0, k, 1] + a[i, 1, 0] * b[1, k, 1] + a[i, 2, 0] * b[2, k, 1]
            ir = a[i, 0, 1] * b[0, k, 0] + a[i, 1, 1] * b[1, k, 0] + a[i, 2, 1] * b[2, k, 0]
            ii = a[i, 0, 1] * b[0, k, 1] + a[i, 1, 1] * b[1, k, 1] + a[i, 2, 1] * b[2, k, 1]
            c[i, k, 0] = rr - ii
            c[i, k, 1] = ri + ir
    return c


def mult_su3_na(a: np.ndarray, b: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
    """c[i][k] = sum_j a[i][j] * conj(b[k][j])."""
    validation.check_no_alias(out, a, b)
    c = _result(out, a, (3, 3, 2))
    for i in range(3):
        for k in range(3):
            rr = b[k, 0, 0] * a[i, 0, 0] + b[k, 1, 0] * a[i, 1, 0] + b[k, 2, 0] * a[i, 2, 0]
            ir = b[k, 0, 0] * a[i, 0, 1] + b[k, 1, 0] * a[i, 1, 1] + b[k, 2, 0] * a[i, 2, 1]
            ri = b[k, 0, 1] * a[i, 0, 0] + b[k, 1, 1] * a[i, 1, 0] + b[k, 2, 1] * a[i, 2, 0]
            ii = b[k, 0, 1] * a[i, 0, 1] + b[k, 1, 1] * a[i, 1, 1] + b[k, 2, 1] * a[i, 2, 1]
            c[i, k, 0] = rr + ii
            c[i, k, 1] = ir - ri
    return c


def mult_su3_an(a: np.ndarray, b: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
    """c[i][k] = sum_j conj(a[j][i]) * b[j][k]."""
    validation.check_no_alias(out, a, b)
    c = _result(out, a, (3, 3, 2))
    for i in range(3):
        for k in range(3):
            rr = a[0, i, 0] * b[0, k, 0] + a[1, i, 0] * b[1, k, 0] + a[2, i, 0] * b[2, k, 0]
            ri = a[0, i, 0] * b[0, k, 1] + a[1, i, 0] * b[1, k, 1] + a[2, i, 0] * b[2, k, 1]
            ir = a[0, i, 1] * b[0, k, 0] + a[1, i, 1] * b[1, k, 0] + a[2, i, 1] * b[2, k, 0]
            ii = a[0, i, 1] * b[0, k, 1] + a[1, i, 1] * b[1, k, 1] + a[2, i, 1] * b[2, k, 1]
            c[i, k, 0] = rr + ii
            c[i, k, 1] = ri - ir
    return c


def mult_su3_mat_hwvec(a: np.ndarray, h: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
    """c[k] = a * h[k] for both halves k."""
    validation.check_no_alias(out, a, h)
    c = _result(out, h, (2, 3, 2))
    for k in range(2):
        mult_su3_mat_vec(a, h[k], out=c[k])
    return c


def mult_adj_su3_mat_hwvec(a: np.ndarray, h: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
    """c[k] = adj(a) * h[k] for both halves k."""
    validation.check_no_alias(out, a, h)
    c = _result(out, h, (2, 3, 2))
    for k in range(2):
        mult_adj_su3_mat_vec(a, h[k], out=c[k])
    return c


def mult_adj_su3_mat_vec_4dir(a4: np.ndarray, b: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
    """c[d] = adj(a4[d]) * b for the four directions."""
    validation.check_no_alias(out, a4, b)
    c = _result(out, b, (4, 3, 2))
    for d in range(4):
        mult_adj_su3_mat_vec(a4[d], b, out=c[d])
    return c


def mult_adj_su3_mat_4vec(a4: np.ndarray, b: np.ndarray, out: np.ndarray | None = None, outs=None) -> np.ndarray | tuple:
    """c_d = adj(a4[d]) * b, written to four separate destinations.

    With ``outs`` given (a sequence of four (3, 2) arrays) each product lands
    in its own destination and the tuple is returned; otherwise the packed
    (4, 3, 2) form is produced in ``out`` or a fresh array.
    """
    if outs is None:
        return mult_adj_su3_mat_vec_4dir(a4, b, out=out)
    if out is not None:
        raise ValueError("pass either out or outs, not both")
    if len(outs) != 4:
        raise ValueError("outs must hold four destination vectors")
    for d in range(4):
        validation.check_no_alias(outs[d], a4, b)
        mult_adj_su3_mat_vec(a4[d], b, out=outs[d])
    return tuple(outs)


def mult_su3_mat_vec_sum_4dir(a4: np.ndarray, b4: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
    """c = sum_d adj(a4[d]) * b4[d], accumulated direction-major."""
    validation.check_no_alias(out, a4, b4)
    c = _result(out, b4, (3, 2))
    for i in range(3):
        rr = ri = ir = ii = None
        for d in range(4):
            a = a4[d]
            b = b4[d]
            if rr is None:
                rr = a[0, i, 0] * b[0, 0]
                ri = a[0, i, 0] * b[0, 1]
                ir = a[0, i, 1] * b[0, 0]
                ii = a[0, i, 1] * b[0, 1]
            else:
                rr = rr + a[0, i, 0] * b[0, 0]
                ri = ri + a[0, i, 0] * b[0, 1]
                ir = ir + a[0, i, 1] * b[0, 0]
                ii = ii + a[0, i, 1] * b[0, 1]
            for j in (1, 2):
                rr = rr + a[j, i, 0] * b[j, 0]
                ri = ri + a[j, i, 0] * b[j, 1]
                ir = ir + a[j, i, 1] * b[j, 0]
                ii = ii + a[j, i, 1] * b[j, 1]
        c[i, 0] = rr + ii
        c[i, 1] = ri - ir
    return c


def scalar_mult_add_su3_matrix(a: np.ndarray, b: np.ndarray, s, out: np.ndarray | None = None) -> np.ndarray:
    """c[i][j] = a[i][j] + s * b[i][j] for real s."""
    validation.check_no_alias(out, a, b)
    c = _result(out, a, (3, 3, 2))
    for i in range(3):
        for j in range(3):
            c[i, j, 0] = a[i, j, 0] + s * b[i, j, 0]
            c[i, j, 1] = a[i, j, 1] + s * b[i, j, 1]
    return c


def scalar_mult_add_su3_vector(a: np.ndarray, b: np.ndarray, s, out: np.ndarray | None = None) -> np.ndarray:
    """c[i] = a[i] + s * b[i] for real s."""
    validation.check_no_alias(out, a, b)
    c = _result(out, a, (3, 2))
    for i in range(3):
        c[i, 0] = a[i, 0] + s * b[i, 0]
        c[i, 1] = a[i, 1] + s * b[i, 1]
    return c


def su3_projector(a: np.ndarray, b: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
    """c[i][j] = a[i] * conj(b[j]) (outer product)."""
    validation.check_no_alias(out, a, b)
    c = _result(out, a, (3, 3, 2))
    for i in range(3):
        for j in range(3):
            rr = b[j, 0] * a[i, 0]
            ir = b[j, 0] * a[i, 1]
            ri = b[j, 1] * a[i, 0]
            ii = b[j, 1] * a[i, 1]
            c[i, j, 0] = rr + ii
            c[i, j, 1] = ir - ri
    return c


def sub_four_su3_vecs(a: np.ndarray, b1: np.ndarray, b2: np.ndarray, b3: np.ndarray, b4: np.ndarray) -> np.ndarray:
    """a[i] -= b1[i] + b2[i] + b3[i] + b4[i], in place, left to right."""
    for i in range(3):
        for k in range(2):
            a[i, k] = a[i, k] - b1[i, k] - b2[i, k] - b3[i, k] - b4[i, k]
    return a


KERNELS = {
    "add_su3_vector": add_su3_vector,
    "mult_adj_su3_mat_hwvec": mult_adj_su3_mat_hwvec,
    "mult_adj_su3_mat_vec": mult_adj_su3_mat_vec,
    "mult_adj_su3_mat_vec_4dir": mult_adj_su3_mat_vec_4dir,
    "mult_adj_su3_mat_4vec": mult_adj_su3_mat_4vec,
    "mult_su3_an": mult_su3_an,
    "mult_su3_mat_hwvec": mult_su3_mat_hwvec,
    "mult_su3_na": mult_su3_na,
    "mult_su3_nn": mult_su3_nn,
    "mult_su3_mat_vec": mult_su3_mat_vec,
    "mult_su3_mat_vec_sum_4dir": mult_su3_mat_vec_sum_4dir,
    "scalar_mult_add_su3_matrix": scalar_mult_add_su3_matrix,
    "scalar_mult_add_su3_vector": scalar_mult_add_su3_vector,
    "su3_projector": su3_projector,
    "sub_four_su3_vecs": sub_four_su3_vecs,
}


def apply(routine: str, *operands, out: np.ndarray | None = None):
    """Invoke one kernel by name on a single operand set."""
    spec = routine_spec(routine)
    kernel = KERNELS[routine]
    if spec.in_place:
        return kernel(*operands)
    return kernel(*operands, out=out)


def batch_apply(routine: str, operands, count: int | None = None, out: np.ndarray | None = None):
    """Apply one kernel independently to each of `count` stacked operand sets.

    Operand arrays carry the batch axis in front of the per-object shape;
    scalars are (count,) arrays or plain numbers. Equivalent to slicing out
    each set and calling the kernel, and bitwise identical to doing so.
    """
    spec = routine_spec(routine)
    kernel = KERNELS[routine]
    n = batch_count(spec, operands, count)
    if spec.in_place:
        target = operands[0]
        for s in range(n):
            kernel(*(op[s] for op in operands))
        return target
    if out is None:
        first = next(op for op, kind in zip(operands, spec.operands) if kind != "scalar")
        out = np.empty((n,) + OPERAND_SHAPES[spec.result], dtype=first.dtype)
    for s in range(n):
        args = [op if kind == "scalar" and np.ndim(op) == 0 else op[s] for op, kind in zip(operands, spec.operands)]
        kernel(*args, out=out[s])
    return out
