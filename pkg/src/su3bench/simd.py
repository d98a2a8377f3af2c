"""Packed-lane implementations of the su3 kernels.

The code follows a 128-bit register recipe: a complex value's (re, im) pair
rides in one packed lane group; each matrix element contributes through two
broadcasts (its real and its imaginary part), packed multiplies against the
untouched pair, and packed adds into two running accumulators; one
swap + sign-flip + add at the end turns the accumulated (re*re, re*im) and
(im*re, im*im) lane sums into the complex result. Lanes here are numpy array
axes rather than xmm registers, and a leading batch axis widens every lane so
one call covers many operand sets; the arithmetic sequence per output
component is identical either way, which keeps this backend bitwise equal to
the scalar reference.

Conjugate variants reuse the recipe: adjoint-on-the-left broadcasts column
elements instead of row elements and flips the sign applied after the swap;
conjugate-on-the-right broadcasts the conjugated operand's components so the
swap lands on its imaginary-part sums.

Every kernel accepts operands with any (shared) leading batch shape in front
of the per-object shape documented in the scalar reference.
"""
from __future__ import annotations

import platform
from dataclasses import dataclass

import numpy as np

from . import validation
from .types import OPERAND_SHAPES, batch_count, routine_spec

_SIGNS: dict[tuple, np.ndarray] = {}


def _sign(dtype: np.dtype, mode: str) -> np.ndarray:
    # "plain": (rr - ii, ri + ir); "conj": (rr + ii, ri - ir)
    key = (dtype, mode)
    cached = _SIGNS.get(key)
    if cached is None:
        pair = [-1.0, 1.0] if mode == "plain" else [1.0, -1.0]
        cached = _SIGNS[key] = np.array(pair, dtype=dtype)
    return cached


def _combine(acc1: np.ndarray, acc2: np.ndarray, mode: str, out: np.ndarray) -> None:
    # acc1 holds the re*? lane sums, acc2 the im*? lane sums of the
    # broadcast operand; swap acc2's lanes, flip one sign, add once.
    out[...] = acc1 + acc2[..., ::-1] * _sign(acc1.dtype, mode)


def _result(out: np.ndarray | None, like: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    if out is None:
        return np.empty(shape, dtype=like.dtype)
    if out.shape != shape:
        raise ValueError(f"result array has shape {out.shape}, expected {shape}")
    return out


def _check_shapes(name: str, **arrays) -> None:
    prefixes = set()
    for label, (arr, kind) in arrays.items():
        obj = OPERAND_SHAPES[kind]
        nd = len(obj)
        if arr.ndim < nd or arr.shape[arr.ndim - nd:] != obj:
            raise ValueError(f"{name}: operand {label} has shape {arr.shape}, expected (...,) + {obj}")
        prefixes.add(arr.shape[: arr.ndim - nd])
    if len(prefixes) > 1:
        raise ValueError(f"{name}: operands disagree on batch shape: {sorted(prefixes)}")


def add_su3_vector(a: np.ndarray, b: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
    """c[i] = a[i] + b[i]."""
    _check_shapes("add_su3_vector", a=(a, "vec"), b=(b, "vec"))
    validation.check_no_alias(out, a, b)
    c = _result(out, a, a.shape)
    np.add(a, b, out=c)
    return c


def mult_su3_mat_vec(a: np.ndarray, b: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
    """c[i] = sum_j a[i][j] * b[j]."""
    _check_shapes("mult_su3_mat_vec", a=(a, "mat"), b=(b, "vec"))
    validation.check_no_alias(out, a, b)
    c = _result(out, b, b.shape)
    acc1 = a[..., :, 0, 0:1] * b[..., None, 0, :]
    acc2 = a[..., :, 0, 1:2] * b[..., None, 0, :]
    for j in (1, 2):
        acc1 = acc1 + a[..., :, j, 0:1] * b[..., None, j, :]
        acc2 = acc2 + a[..., :, j, 1:2] * b[..., None, j, :]
    _combine(acc1, acc2, "plain", c)
    return c


def mult_adj_su3_mat_vec(a: np.ndarray, b: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
    """c[i] = sum_j conj(a[j][i]) * b[j]."""
    _check_shapes("mult_adj_su3_mat_vec", a=(a, "mat"), b=(b, "vec"))
    validation.check_no_alias(out, a, b)
    c = _result(out, b, b.shape)
    acc1 = a[..., 0, :, 0:1] * b[..., None, 0, :]
    acc2 = a[..., 0, :, 1:2] * b[..., None, 0, :]
    for j in (1, 2):
        acc1 = acc1 + a[..., j, :, 0:1] * b[..., None, j, :]
        acc2 = acc2 + a[..., j, :, 1:2] * b[..., None, j, :]
    _combine(acc1, acc2, "conj", c)
    return c


def mult_su3_nn(a: np.ndarray, b: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
    """c[i][k] = sum_j a[i][j] * b[j][k]."""
    _check_shapes("mult_su3_nn", a=(a, "mat"), b=(b, "mat"))
    validation.check_no_alias(out, a, b)
    c = _result(out, a, a.shape)
    acc1 = a[..., :, 0, 0, None, None] * b[..., None, 0, :, :]
    acc2 = a[..., :, 0, 1, None, None] * b[..., None, 0, :, :]
    for j in (1, 2):
        acc1 = acc1 + a[..., :, j, 0, None, None] * b[..., None, j, :, :]
        acc2 = acc2 + a[..., :, j, 1, None, None] * b[..., None, j, :, :]
    _combine(acc1, acc2, "plain", c)
    return c


def mult_su3_an(a: np.ndarray, b: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
    """c[i][k] = sum_j conj(a[j][i]) * b[j][k]."""
    _check_shapes("mult_su3_an", a=(a, "mat"), b=(b, "mat"))
    validation.check_no_alias(out, a, b)
    c = _result(out, a, a.shape)
    acc1 = a[..., 0, :, 0, None, None] * b[..., None, 0, :, :]
    acc2 = a[..., 0, :, 1, None, None] * b[..., None, 0, :, :]
    for j in (1, 2):
        acc1 = acc1 + a[..., j, :, 0, None, None] * b[..., None, j, :, :]
        acc2 = acc2 + a[..., j, :, 1, None, None] * b[..., None, j, :, :]
    _combine(acc1, acc2, "conj", c)
    return c


def mult_su3_na(a: np.ndarray, b: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
    """c[i][k] = sum_j a[i][j] * conj(b[k][j])."""
    _check_shapes("mult_su3_na", a=(a, "mat"), b=(b, "mat"))
    validation.check_no_alias(out, a, b)
    c = _result(out, a, a.shape)
    # b is the conjugated operand: broadcast its components so the final
    # swap lands on its imaginary-part sums.
    acc1 = b[..., None, :, 0, 0, None] * a[..., :, None, 0, :]
    acc2 = b[..., None, :, 0, 1, None] * a[..., :, None, 0, :]
    for j in (1, 2):
        acc1 = acc1 + b[..., None, :, j, 0, None] * a[..., :, None, j, :]
        acc2 = acc2 + b[..., None, :, j, 1, None] * a[..., :, None, j, :]
    _combine(acc1, acc2, "conj", c)
    return c


def mult_su3_mat_hwvec(a: np.ndarray, h: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
    """c[k] = a * h[k] for both halves k."""
    _check_shapes("mult_su3_mat_hwvec", a=(a, "mat"), h=(h, "hwvec"))
    validation.check_no_alias(out, a, h)
    c = _result(out, h, h.shape)
    for k in (0, 1):
        mult_su3_mat_vec(a, h[..., k, :, :], out=c[..., k, :, :])
    return c


def mult_adj_su3_mat_hwvec(a: np.ndarray, h: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
    """c[k] = adj(a) * h[k] for both halves k."""
    _check_shapes("mult_adj_su3_mat_hwvec", a=(a, "mat"), h=(h, "hwvec"))
    validation.check_no_alias(out, a, h)
    c = _result(out, h, h.shape)
    for k in (0, 1):
        mult_adj_su3_mat_vec(a, h[..., k, :, :], out=c[..., k, :, :])
    return c


def mult_adj_su3_mat_vec_4dir(a4: np.ndarray, b: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
    """c[d] = adj(a4[d]) * b for the four directions."""
    _check_shapes("mult_adj_su3_mat_vec_4dir", a4=(a4, "mat4"), b=(b, "vec"))
    validation.check_no_alias(out, a4, b)
    c = _result(out, b, b.shape[:-2] + (4, 3, 2))
    for d in range(4):
        mult_adj_su3_mat_vec(a4[..., d, :, :, :], b, out=c[..., d, :, :])
    return c


def mult_adj_su3_mat_4vec(a4: np.ndarray, b: np.ndarray, out: np.ndarray | None = None, outs=None) -> np.ndarray | tuple:
    """c_d = adj(a4[d]) * b, four destinations; packed when outs is omitted."""
    if outs is None:
        return mult_adj_su3_mat_vec_4dir(a4, b, out=out)
    if out is not None:
        raise ValueError("pass either out or outs, not both")
    if len(outs) != 4:
        raise ValueError("outs must hold four destination vectors")
    _check_shapes("mult_adj_su3_mat_4vec", a4=(a4, "mat4"), b=(b, "vec"))
    for d in range(4):
        validation.check_no_alias(outs[d], a4, b)
        mult_adj_su3_mat_vec(a4[..., d, :, :, :], b, out=outs[d])
    return tuple(outs)


def mult_su3_mat_vec_sum_4dir(a4: np.ndarray, b4: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
    """c = sum_d adj(a4[d]) * b4[d], accumulated direction-major."""
    _check_shapes("mult_su3_mat_vec_sum_4dir", a4=(a4, "mat4"), b4=(b4, "vec4"))
    validation.check_no_alias(out, a4, b4)
    c = _result(out, b4, b4.shape[:-3] + (3, 2))
    acc1 = acc2 = None
    for d in range(4):
        for j in range(3):
            bp = b4[..., d, None, j, :]
            p1 = a4[..., d, j, :, 0:1] * bp
            p2 = a4[..., d, j, :, 1:2] * bp
            if acc1 is None:
                acc1, acc2 = p1, p2
            else:
                acc1 = acc1 + p1
                acc2 = acc2 + p2
    _combine(acc1, acc2, "conj", c)
    return c


def _scalar_factor(s, like: np.ndarray, extra_axes: int):
    s_arr = np.asarray(s, dtype=like.dtype)
    if s_arr.ndim:
        s_arr = s_arr.reshape(s_arr.shape + (1,) * extra_axes)
    return s_arr


def scalar_mult_add_su3_matrix(a: np.ndarray, b: np.ndarray, s, out: np.ndarray | None = None) -> np.ndarray:
    """c[i][j] = a[i][j] + s * b[i][j] for real s."""
    _check_shapes("scalar_mult_add_su3_matrix", a=(a, "mat"), b=(b, "mat"))
    validation.check_no_alias(out, a, b)
    c = _result(out, a, a.shape)
    c[...] = a + _scalar_factor(s, a, 3) * b
    return c


def scalar_mult_add_su3_vector(a: np.ndarray, b: np.ndarray, s, out: np.ndarray | None = None) -> np.ndarray:
    """c[i] = a[i] + s * b[i] for real s."""
    _check_shapes("scalar_mult_add_su3_vector", a=(a, "vec"), b=(b, "vec"))
    validation.check_no_alias(out, a, b)
    c = _result(out, a, a.shape)
    c[...] = a + _scalar_factor(s, a, 2) * b
    return c


def su3_projector(a: np.ndarray, b: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
    """c[i][j] = a[i] * conj(b[j]) (outer product)."""
    _check_shapes("su3_projector", a=(a, "vec"), b=(b, "vec"))
    validation.check_no_alias(out, a, b)
    c = _result(out, a, a.shape[:-2] + (3, 3, 2))
    ap = a[..., :, None, :]
    acc1 = b[..., None, :, 0, None] * ap
    acc2 = b[..., None, :, 1, None] * ap
    _combine(acc1, acc2, "conj", c)
    return c


def sub_four_su3_vecs(a: np.ndarray, b1: np.ndarray, b2: np.ndarray, b3: np.ndarray, b4: np.ndarray) -> np.ndarray:
    """a[i] -= b1[i] + b2[i] + b3[i] + b4[i], in place, left to right."""
    _check_shapes("sub_four_su3_vecs", a=(a, "vec"), b1=(b1, "vec"), b2=(b2, "vec"), b3=(b3, "vec"), b4=(b4, "vec"))
    for b in (b1, b2, b3, b4):
        np.subtract(a, b, out=a)
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


def aligned_apply(routine: str, *operands, out: np.ndarray | None = None, alignment: int = 16):
    """Like apply(), for operands promised to sit on aligned storage.

    The promise is only checked under debug validation; the arithmetic is
    the same either way.
    """
    for pos, arr in enumerate(operands):
        if isinstance(arr, np.ndarray):
            validation.check_aligned(arr, alignment, name=f"{routine} operand {pos}")
    if out is not None:
        validation.check_aligned(out, alignment, name=f"{routine} result")
    return apply(routine, *operands, out=out)


def batch_apply(routine: str, operands, count: int | None = None, out: np.ndarray | None = None):
    """Apply one kernel to `count` stacked operand sets in a single call.

    Bitwise identical to slicing out each set and calling the kernel on it.
    """
    spec = routine_spec(routine)
    batch_count(spec, operands, count)
    kernel = KERNELS[routine]
    if spec.in_place:
        return kernel(*operands)
    return kernel(*operands, out=out)


@dataclass(frozen=True)
class LaneGroup:
    """One packed register's worth of same-precision lanes."""

    width_bits: int
    element_bits: int

    def __post_init__(self) -> None:
        if self.element_bits not in (32, 64):
            raise ValueError(f"element_bits must be 32 or 64, got {self.element_bits}")
        if self.width_bits <= 0 or self.width_bits % self.element_bits:
            raise ValueError(f"width_bits {self.width_bits} is not a positive multiple of element_bits {self.element_bits}")

    @property
    def lanes(self) -> int:
        return self.width_bits // self.element_bits


def lane_group(precision: str) -> LaneGroup:
    """The 128-bit lane group backing a precision: 2 double or 4 single lanes."""
    bits = {"single": 32, "double": 64}
    if precision not in bits:
        raise ValueError(f"unknown precision {precision!r}")
    return LaneGroup(128, bits[precision])


@dataclass(frozen=True)
class LaneOpCount:
    """Packed-lane operation tally for one kernel invocation.

    broadcasts: scalar components broadcast across a lane pair (matrix
    elements, or the conjugated operand's components, or the real factor s).
    packed_mults / packed_adds: two-lane multiplies and add-class ops,
    including the final combine add; each stands for two real operations.
    swaps: lane swaps feeding the combine. negates: the packed sign flip
    folded into the scalar backend's combining subtraction; not a
    floating-point add.
    """

    broadcasts: int
    packed_mults: int
    packed_adds: int
    swaps: int
    negates: int


LANE_OPS: dict[str, LaneOpCount] = {
    "add_su3_vector": LaneOpCount(0, 0, 3, 0, 0),
    "mult_adj_su3_mat_hwvec": LaneOpCount(36, 36, 30, 6, 6),
    "mult_adj_su3_mat_vec": LaneOpCount(18, 18, 15, 3, 3),
    "mult_adj_su3_mat_vec_4dir": LaneOpCount(72, 72, 60, 12, 12),
    "mult_adj_su3_mat_4vec": LaneOpCount(72, 72, 60, 12, 12),
    "mult_su3_an": LaneOpCount(18, 54, 45, 9, 9),
    "mult_su3_mat_hwvec": LaneOpCount(36, 36, 30, 6, 6),
    "mult_su3_na": LaneOpCount(18, 54, 45, 9, 9),
    "mult_su3_nn": LaneOpCount(18, 54, 45, 9, 9),
    "mult_su3_mat_vec": LaneOpCount(18, 18, 15, 3, 3),
    "mult_su3_mat_vec_sum_4dir": LaneOpCount(72, 72, 69, 3, 3),
    "scalar_mult_add_su3_matrix": LaneOpCount(1, 9, 9, 0, 0),
    "scalar_mult_add_su3_vector": LaneOpCount(1, 3, 3, 0, 0),
    "su3_projector": LaneOpCount(6, 18, 9, 9, 9),
    "sub_four_su3_vecs": LaneOpCount(0, 0, 12, 0, 0),
}


def lane_op_count(routine: str) -> LaneOpCount:
    """Static packed-lane operation tally for one kernel invocation."""
    routine_spec(routine)
    return LANE_OPS[routine]


def capability() -> dict:
    """Report what backs the packed lanes on this host."""
    features: list[str] = []
    for mod in ("numpy._core._multiarray_umath", "numpy.core._multiarray_umath"):
        try:
            umath = __import__(mod, fromlist=["__cpu_features__"])
            features = sorted(k for k, v in umath.__cpu_features__.items() if v)
            break
        except (ImportError, AttributeError):
            continue
    return {
        "backend": "array-lane emulation",
        "width_bits": 128,
        "lanes": {"single": lane_group("single").lanes, "double": lane_group("double").lanes},
        "python": platform.python_version(),
        "numpy": np.__version__,
        "machine": platform.machine(),
        "cpu_features": features,
    }
