"""Dense tensors, multilinear contractions and the JSON tensor file format.

A tensor is held as a numpy array. Float tensors use ``float64``; exact
tensors use an ``object`` array of :class:`fractions.Fraction`. Every
function here accepts either a plain array or a :class:`DenseTensor` and
works for both scalar backends.
"""
import itertools
import json
import math
from fractions import Fraction

import numpy as np

__all__ = [
    "DenseTensor", "NonnegTensor", "PositiveTensor", "SymTensor",
    "asarray", "is_exact", "contract_except", "contract_all", "rayleigh",
    "inner", "hs_norm", "outer", "symmetrize", "is_symmetric",
    "load", "save", "loads", "dumps", "TensorFormatError",
]

SYM_RTOL = 1e-12


class TensorFormatError(ValueError):
    """Raised for malformed tensor files or inconsistent shape/data."""


class DenseTensor:
    """Immutable dense real tensor of shape ``(n_1, ..., n_d)``.

    Parameters
    ----------
    data : array_like
        Entries. Nested lists, numpy arrays or another tensor. Entries that
        are :class:`~fractions.Fraction` (or a ``dtype=object`` array) select
        the exact backend.
    shape : tuple of int, optional
        If given, ``data`` is read as a flat row-major sequence.
    """

    def __init__(self, data, shape=None):
        arr = _coerce(data)
        if shape is not None:
            shape = tuple(int(n) for n in shape)
            if arr.size != math.prod(shape):
                raise TensorFormatError(
                    f"data has {arr.size} entries but shape {shape} needs "
                    f"{math.prod(shape)}")
            arr = arr.reshape(shape)
        if arr.ndim < 1:
            raise TensorFormatError("a tensor needs at least one mode")
        if any(n < 1 for n in arr.shape):
            raise TensorFormatError(f"every dimension must be positive, got {arr.shape}")
        if arr.dtype != object and not np.all(np.isfinite(arr)):
            raise TensorFormatError("tensor entries must be finite")
        arr = arr.copy()
        arr.flags.writeable = False
        self._data = arr
        self._check()

    def _check(self):
        pass

    @property
    def data(self):
        return self._data

    @property
    def shape(self):
        return self._data.shape

    @property
    def ndim(self):
        return self._data.ndim

    @property
    def exact(self):
        return self._data.dtype == object

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._data
        return self._data.astype(dtype)

    def to_float(self):
        return type(self)(self._data.astype(float))

    def to_exact(self):
        return type(self)(_to_fraction_array(self._data))

    def __eq__(self, other):
        if not isinstance(other, DenseTensor):
            return NotImplemented
        return self.shape == other.shape and bool(np.all(self._data == other._data))

    def __hash__(self):
        return hash((self.shape, tuple(self._data.ravel().tolist())))

    def __repr__(self):
        kind = "exact" if self.exact else "float"
        return f"{type(self).__name__}(shape={self.shape}, {kind})"


class NonnegTensor(DenseTensor):
    """Tensor with every entry ``>= 0``."""

    def _check(self):
        if np.any(self._data < 0):
            raise ValueError("tensor has a negative entry")


class PositiveTensor(NonnegTensor):
    """Tensor with every entry ``> 0``."""

    def _check(self):
        if np.any(self._data <= 0):
            raise ValueError("tensor has a non-positive entry")


class SymTensor(DenseTensor):
    """Cubical tensor invariant under every permutation of its indices.

    Exact tensors are checked with tolerance 0, float tensors with relative
    tolerance ``1e-12``.
    """

    def _check(self):
        if len(set(self.shape)) != 1:
            raise ValueError(f"symmetric tensor must be cubical, got shape {self.shape}")
        if not is_symmetric(self._data):
            raise ValueError("tensor is not symmetric")


def _to_fraction_array(arr):
    arr = np.asarray(arr)
    out = np.empty(arr.shape, dtype=object)
    for idx, x in np.ndenumerate(arr):
        out[idx] = Fraction(x) if not isinstance(x, Fraction) else x
    return out


def _coerce(data):
    if isinstance(data, DenseTensor):
        return data.data
    arr = np.asarray(data)
    if arr.dtype == object:
        return _to_fraction_array(arr)
    if arr.dtype.kind in "biuf":
        return arr.astype(float)
    raise TensorFormatError(f"unsupported entry type {arr.dtype}")


def asarray(T):
    """Return the underlying numpy array of ``T`` (no copy for DenseTensor)."""
    if isinstance(T, DenseTensor):
        return T.data
    arr = np.asarray(T)
    if arr.dtype.kind in "biu":
        arr = arr.astype(float)
    return arr


def is_exact(T):
    return asarray(T).dtype == object


def _check_mode_vectors(shape, vecs, skip=None):
    modes = [k for k in range(len(shape)) if k != skip]
    if len(vecs) != len(modes):
        raise ValueError(f"expected {len(modes)} vectors, got {len(vecs)}")
    out = []
    for k, v in zip(modes, vecs):
        v = asarray(v)
        if v.shape != (shape[k],):
            raise ValueError(f"vector for mode {k} has shape {v.shape}, expected ({shape[k]},)")
        out.append(v)
    return out


def contract_except(T, i, vecs):
    """Contract every mode of ``T`` except ``i`` against ``vecs``.

    Parameters
    ----------
    T : array_like, shape (n_1, ..., n_d)
    i : int
        The mode left free.
    vecs : sequence of d-1 vectors
        Vectors for the remaining modes, in increasing mode order.

    Returns
    -------
    ndarray, shape (n_i,)
    """
    A = asarray(T)
    d = A.ndim
    if not 0 <= i < d:
        raise IndexError(f"mode {i} out of range for a {d}-way tensor")
    vecs = _check_mode_vectors(A.shape, vecs, skip=i)
    # contract from the last mode down so axis numbers stay valid
    modes = [k for k in range(d) if k != i]
    out = A
    for k, v in zip(reversed(modes), reversed(vecs)):
        out = np.tensordot(out, v, axes=([k], [0]))
    return out


def contract_all(T, vecs):
    """List of all mode-wise contractions ``[contract_except(T, i, ...)]``."""
    vecs = list(vecs)
    return [contract_except(T, i, vecs[:i] + vecs[i + 1:]) for i in range(len(vecs))]


def rayleigh(T, vecs):
    """Multilinear value ``<T, v_1 x ... x v_d>``."""
    A = asarray(T)
    vecs = _check_mode_vectors(A.shape, vecs)
    out = A
    for v in reversed(vecs):
        out = np.tensordot(out, v, axes=([out.ndim - 1], [0]))
    return out[()] if isinstance(out, np.ndarray) else out


def inner(A, B):
    """Hilbert-Schmidt inner product of two tensors of identical shape."""
    a, b = asarray(A), asarray(B)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    return np.sum(a * b)


def hs_norm(A):
    """Hilbert-Schmidt (Frobenius) norm, always returned as a float."""
    return math.sqrt(float(inner(A, A)))


def outer(vecs):
    """Segre outer product ``v_1 x ... x v_d``."""
    vecs = [asarray(v) for v in vecs]
    if not vecs:
        raise ValueError("need at least one vector")
    out = vecs[0]
    for v in vecs[1:]:
        out = np.multiply.outer(out, v)
    return out


def symmetrize(T):
    """Average ``T`` over all permutations of its modes.

    The result is wrapped as a :class:`SymTensor`.
    """
    A = asarray(T)
    if len(set(A.shape)) != 1:
        raise ValueError(f"symmetrize needs a cubical tensor, got shape {A.shape}")
    perms = list(itertools.permutations(range(A.ndim)))
    acc = sum(np.transpose(A, p) for p in perms)
    if A.dtype == object:
        acc = acc * Fraction(1, len(perms))
    else:
        acc = acc / len(perms)
    return SymTensor(acc)


def is_symmetric(T, rtol=None):
    A = asarray(T)
    if len(set(A.shape)) != 1:
        return False
    exact = A.dtype == object
    if rtol is None:
        rtol = 0 if exact else SYM_RTOL
    scale = max(1.0, float(np.max(np.abs(A.astype(float))))) if A.size else 1.0
    for p in itertools.permutations(range(A.ndim)):
        diff = A - np.transpose(A, p)
        if exact and rtol == 0:
            if any(x != 0 for x in diff.ravel()):
                return False
        elif float(np.max(np.abs(diff.astype(float)))) > rtol * scale:
            return False
    return True


# -- file format -----------------------------------------------------------

def _parse_number(x):
    if isinstance(x, bool):
        raise TensorFormatError("booleans are not tensor entries")
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError) as exc:
            raise TensorFormatError(f"bad rational entry {x!r}") from exc
    if isinstance(x, (int, float)):
        if not math.isfinite(x):
            raise TensorFormatError("non-finite entry")
        return x
    raise TensorFormatError(f"entry {x!r} is not a number")


def from_dict(obj):
    """Build a tensor from the decoded JSON object of the file format."""
    if not isinstance(obj, dict):
        raise TensorFormatError("top level must be a JSON object")
    if "shape" not in obj or "data" not in obj:
        raise TensorFormatError('required keys are "shape" and "data"')
    shape, data = obj["shape"], obj["data"]
    if (not isinstance(shape, list) or not shape
            or not all(isinstance(n, int) and not isinstance(n, bool) and n >= 1 for n in shape)):
        raise TensorFormatError('"shape" must be a non-empty list of positive integers')
    if not isinstance(data, list):
        raise TensorFormatError('"data" must be a list')
    if len(data) != math.prod(shape):
        raise TensorFormatError(
            f"length mismatch: shape {shape} needs {math.prod(shape)} entries, got {len(data)}")
    vals = [_parse_number(x) for x in data]
    if any(isinstance(v, Fraction) for v in vals):
        arr = np.empty(len(vals), dtype=object)
        arr[:] = [Fraction(v) for v in vals]
    else:
        arr = np.array(vals, dtype=float)
    symmetric = obj.get("symmetric", False)
    if symmetric not in (True, False):
        raise TensorFormatError('"symmetric" must be a boolean')
    cls = SymTensor if symmetric else DenseTensor
    try:
        return cls(arr, shape=shape)
    except ValueError as exc:
        if isinstance(exc, TensorFormatError):
            raise
        raise TensorFormatError(str(exc)) from exc


def to_dict(T, symmetric=None):
    A = asarray(T)
    if A.dtype == object:
        data = [f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)
                for x in A.ravel()]
    else:
        data = [float(x) for x in A.ravel()]
    obj = {"shape": list(A.shape), "data": data}
    if symmetric is None:
        symmetric = isinstance(T, SymTensor)
    if symmetric:
        obj["symmetric"] = True
    return obj


def loads(text):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TensorFormatError(f"invalid JSON: {exc}") from exc
    return from_dict(obj)


def dumps(T, symmetric=None):
    return json.dumps(to_dict(T, symmetric))


def load(path):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def save(T, path, symmetric=None):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(T, symmetric))
        fh.write("\n")
