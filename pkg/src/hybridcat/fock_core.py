"""Truncated multimode Fock-space linear algebra.

A Register lists bosonic modes, each with an occupation cutoff; a joint pure
state stores a dense complex amplitude array with one axis per mode. The flat
index of an occupation tuple follows C order (the last listed mode varies
fastest). Operators act on one or two target modes via axis reshaping and a
small matrix product, so the full joint operator is never materialized.

All values are immutable in intent: operations return new objects and never
mutate their inputs, which keeps everything safe for concurrent use.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .errors import CutoffError, ValidationError

__all__ = [
    "ModeSpec",
    "Register",
    "PureState",
    "Ensemble",
    "DensityOperator",
    "ModeOperator",
    "build_register",
    "basis_state",
    "tensor",
    "apply",
    "apply_to_density",
    "inner",
    "norm",
    "partial_trace",
    "to_density",
    "project_vacuum",
    "occupation_distribution",
]

HERMITICITY_TOL = 1e-10


@dataclass(frozen=True)
class ModeSpec:
    """A single bosonic mode: unique label plus maximum kept occupation."""

    label: str
    cutoff: int

    def __post_init__(self) -> None:
        if not isinstance(self.label, str) or not self.label:
            raise ValidationError("mode label must be a nonempty string")
        if int(self.cutoff) != self.cutoff or self.cutoff < 0:
            raise ValidationError(
                f"mode {self.label!r}: cutoff must be a nonnegative integer, "
                f"got {self.cutoff!r}"
            )

    @property
    def dim(self) -> int:
        """Dimension of the truncated single-mode space (cutoff + 1)."""
        return self.cutoff + 1


class Register:
    """Ordered collection of modes fixing the tensor layout of joint states.

    Equality and hashing consider only the mode list, so two registers built
    from the same specs are interchangeable. The `routed` set records which
    spatial modes already passed a polarizing beam splitter; it is pure
    bookkeeping and does not affect equality.
    """

    __slots__ = ("modes", "labels", "dims", "size", "routed", "_axis")

    def __init__(self, modes: Iterable[ModeSpec], routed: frozenset = frozenset()):
        modes = tuple(modes)
        if not modes:
            raise ValidationError("register needs at least one mode")
        labels = tuple(m.label for m in modes)
        if len(set(labels)) != len(labels):
            raise ValidationError(f"duplicate mode labels in {labels}")
        self.modes = modes
        self.labels = labels
        self.dims = tuple(m.dim for m in modes)
        self.size = int(np.prod(self.dims))
        self.routed = frozenset(routed)
        self._axis = {label: k for k, label in enumerate(labels)}

    # -- lookups ---------------------------------------------------------

    def axis(self, label: str) -> int:
        try:
            return self._axis[label]
        except KeyError:
            raise ValidationError(
                f"unknown mode label {label!r}; register has {self.labels}"
            ) from None

    def mode(self, label: str) -> ModeSpec:
        return self.modes[self.axis(label)]

    def __contains__(self, label: str) -> bool:
        return label in self._axis

    def index_of(self, occupations: Sequence[int]) -> int:
        """Flat index of an occupation tuple (C order)."""
        return int(np.ravel_multi_index(tuple(occupations), self.dims))

    def occupation_of(self, index: int) -> tuple:
        """Occupation tuple of a flat index; inverse of index_of."""
        return tuple(int(k) for k in np.unravel_index(index, self.dims))

    # -- derived registers -------------------------------------------------

    def subset(self, labels: Sequence[str]) -> "Register":
        return Register((self.mode(label) for label in labels), routed=self.routed)

    def relabeled(self, mapping: Mapping[str, str]) -> "Register":
        for old in mapping:
            self.axis(old)
        return Register(
            (ModeSpec(mapping.get(m.label, m.label), m.cutoff) for m in self.modes),
            routed=self.routed,
        )

    # -- value semantics ---------------------------------------------------

    def __eq__(self, other) -> bool:
        return isinstance(other, Register) and self.modes == other.modes

    def __hash__(self) -> int:
        return hash(self.modes)

    def __repr__(self) -> str:
        body = ", ".join(f"{m.label}:{m.cutoff}" for m in self.modes)
        return f"Register({body})"


def build_register(specs: Iterable) -> Register:
    """Build a register from ModeSpec entries or (label, cutoff) pairs."""
    modes = []
    for item in specs:
        if isinstance(item, ModeSpec):
            modes.append(item)
        else:
            label, cutoff = item
            modes.append(ModeSpec(str(label), int(cutoff)))
    return Register(modes)


class PureState:
    """Dense pure state over a register; not necessarily normalized."""

    __slots__ = ("register", "amps")

    def __init__(self, register: Register, amps, *, copy: bool = True):
        arr = (np.array if copy else np.asarray)(amps, dtype=np.complex128)
        if arr.shape != register.dims:
            if arr.size != register.size:
                raise ValidationError(
                    f"amplitude array has {arr.size} entries, register "
                    f"{register!r} needs {register.size}"
                )
            arr = arr.reshape(register.dims)
        self.register = register
        self.amps = arr

    # -- basic quantities ----------------------------------------------------

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def normalized(self) -> "PureState":
        n = self.norm()
        if n == 0.0:
            raise ValidationError("cannot normalize the zero state")
        return PureState(self.register, self.amps / n, copy=False)

    def amplitude(self, occupations: Sequence[int]) -> complex:
        return complex(self.amps[tuple(occupations)])

    # -- structural helpers ----------------------------------------------------

    def relabeled(self, mapping: Mapping[str, str]) -> "PureState":
        return PureState(self.register.relabeled(mapping), self.amps, copy=False)

    def reordered(self, labels: Sequence[str]) -> "PureState":
        """Same state with modes listed in the given order."""
        labels = tuple(labels)
        if sorted(labels) != sorted(self.register.labels):
            raise ValidationError(
                f"reorder labels {labels} must be a permutation of "
                f"{self.register.labels}"
            )
        axes = tuple(self.register.axis(label) for label in labels)
        return PureState(
            self.register.subset(labels), np.transpose(self.amps, axes), copy=False
        )

    # -- small algebra ----------------------------------------------------------

    def __add__(self, other: "PureState") -> "PureState":
        if self.register != other.register:
            raise ValidationError("cannot add states on different registers")
        return PureState(self.register, self.amps + other.amps, copy=False)

    def __mul__(self, scalar) -> "PureState":
        return PureState(self.register, self.amps * complex(scalar), copy=False)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"PureState({self.register!r}, norm={self.norm():.6g})"


class Ensemble:
    """Classical mixture of pure states with nonnegative weights.

    Weights are probabilities of preparation; they need not sum to one
    (heralding produces sub-normalized ensembles).
    """

    __slots__ = ("register", "branches")

    def __init__(self, register: Register, branches: Iterable):
        branches = tuple((float(w), state) for w, state in branches)
        for w, state in branches:
            if w < 0:
                raise ValidationError(f"ensemble weight {w} is negative")
            if state.register != register:
                raise ValidationError("ensemble branch register mismatch")
        self.register = register
        self.branches = branches

    @classmethod
    def pure(cls, state: PureState, weight: float = 1.0) -> "Ensemble":
        return cls(state.register, [(weight, state)])

    @property
    def total_weight(self) -> float:
        return float(sum(w for w, _ in self.branches))

    def __iter__(self):
        return iter(self.branches)

    def __len__(self) -> int:
        return len(self.branches)

    def __repr__(self) -> str:
        return f"Ensemble({self.register!r}, {len(self.branches)} branches)"


class DensityOperator:
    """Dense Hermitian operator over a register's joint space."""

    __slots__ = ("register", "matrix")

    def __init__(self, register: Register, matrix, *, check: bool = True,
                 copy: bool = True):
        arr = (np.array if copy else np.asarray)(matrix, dtype=np.complex128)
        if arr.shape != (register.size, register.size):
            raise ValidationError(
                f"density matrix shape {arr.shape} does not match register "
                f"dimension {register.size}"
            )
        if check:
            scale = max(1.0, float(np.abs(arr).max()))
            defect = float(np.abs(arr - arr.conj().T).max())
            if defect > HERMITICITY_TOL * scale:
                raise ValidationError(
                    f"matrix is not Hermitian (defect {defect:.3e})"
                )
        self.register = register
        self.matrix = arr

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def normalized(self) -> "DensityOperator":
        tr = self.trace
        if tr <= 0.0:
            raise ValidationError(f"cannot normalize trace {tr}")
        return DensityOperator(self.register, self.matrix / tr,
                               check=False, copy=False)

    def relabeled(self, mapping: Mapping[str, str]) -> "DensityOperator":
        return DensityOperator(self.register.relabeled(mapping), self.matrix,
                               check=False, copy=False)

    def reordered(self, labels: Sequence[str]) -> "DensityOperator":
        """Same operator with modes listed in the given order."""
        labels = tuple(labels)
        if sorted(labels) != sorted(self.register.labels):
            raise ValidationError(
                f"reorder labels {labels} must be a permutation of "
                f"{self.register.labels}"
            )
        n = len(self.register.dims)
        axes = tuple(self.register.axis(label) for label in labels)
        tens = self.matrix.reshape(self.register.dims * 2)
        tens = np.transpose(tens, axes + tuple(n + a for a in axes))
        target = self.register.subset(labels)
        return DensityOperator(
            target, tens.reshape(target.size, target.size), check=False, copy=False
        )

    def expectation(self, state: PureState) -> float:
        """Real part of <psi| rho |psi> for a state on the same register."""
        if state.register != self.register:
            raise ValidationError("state register does not match the operator")
        vec = state.amps.reshape(-1)
        value = np.vdot(vec, self.matrix @ vec)
        return float(value.real)

    def __repr__(self) -> str:
        return f"DensityOperator({self.register!r}, trace={self.trace:.6g})"


@dataclass(frozen=True, eq=False)
class ModeOperator:
    """Matrix block acting on the joint space of one or two modes."""

    matrix: np.ndarray
    arity: int = 1
    unitary: bool = False


# ---------------------------------------------------------------------------
# construction helpers


def basis_state(register: Register,
                occupations: Union[Sequence[int], Mapping[str, int]]) -> PureState:
    """Unit-amplitude state on one occupation tuple.

    `occupations` is either a full tuple in register order or a mapping from
    labels to occupations (missing labels default to vacuum).
    """
    if isinstance(occupations, Mapping):
        for label in occupations:
            register.axis(label)
        occ = tuple(int(occupations.get(label, 0)) for label in register.labels)
    else:
        occ = tuple(int(n) for n in occupations)
        if len(occ) != len(register.dims):
            raise ValidationError(
                f"occupation tuple has {len(occ)} entries, register has "
                f"{len(register.dims)} modes"
            )
    for n, spec in zip(occ, register.modes):
        if n < 0 or n > spec.cutoff:
            raise CutoffError(
                f"occupation {n} outside [0, {spec.cutoff}] for mode "
                f"{spec.label!r}"
            )
    amps = np.zeros(register.dims, dtype=np.complex128)
    amps[occ] = 1.0
    return PureState(register, amps, copy=False)


def tensor(a: PureState, b: PureState) -> PureState:
    """Tensor product; the mode labels must be disjoint."""
    overlap = set(a.register.labels) & set(b.register.labels)
    if overlap:
        raise ValidationError(f"tensor factors share mode labels {sorted(overlap)}")
    register = Register(a.register.modes + b.register.modes)
    return PureState(register, np.multiply.outer(a.amps, b.amps), copy=False)


# ---------------------------------------------------------------------------
# operator application


def _apply_axes(arr: np.ndarray, kernel: np.ndarray, axes: Sequence[int]) -> np.ndarray:
    """Apply a square kernel to the listed axes of a tensor.

    The kernel indexes the flattened joint space of the listed axes with the
    first listed axis most significant.
    """
    ndim = arr.ndim
    axes = list(axes)
    order = axes + [k for k in range(ndim) if k not in axes]
    moved = np.transpose(arr, order)
    head_shape = moved.shape[: len(axes)]
    head = int(np.prod(head_shape))
    flat = np.ascontiguousarray(moved).reshape(head, -1)
    out = kernel @ flat
    out = out.reshape(head_shape + moved.shape[len(axes):])
    return np.transpose(out, np.argsort(order))


def _kernel_matrix(op, labels) -> np.ndarray:
    if isinstance(op, ModeOperator):
        if op.arity != len(labels):
            raise ValidationError(
                f"operator arity {op.arity} does not match {len(labels)} targets"
            )
        return op.matrix
    return np.asarray(op, dtype=np.complex128)


def apply(op, labels: Union[str, Sequence[str]], state: PureState) -> PureState:
    """Apply an operator to the listed target modes of a pure state.

    `op` is a ModeOperator or a square matrix over the joint truncated space
    of the targets (row index: first listed mode most significant).
    """
    if isinstance(labels, str):
        labels = (labels,)
    labels = tuple(labels)
    register = state.register
    axes = [register.axis(label) for label in labels]
    joint = int(np.prod([register.dims[a] for a in axes]))
    kernel = _kernel_matrix(op, labels)
    if kernel.shape != (joint, joint):
        raise ValidationError(
            f"kernel shape {kernel.shape} does not match joint dimension "
            f"{joint} of modes {labels}"
        )
    return PureState(register, _apply_axes(state.amps, kernel, axes), copy=False)


def apply_to_density(op, labels: Union[str, Sequence[str]],
                     rho: DensityOperator) -> DensityOperator:
    """Conjugate a density operator by an operator on the listed modes."""
    if isinstance(labels, str):
        labels = (labels,)
    labels = tuple(labels)
    register = rho.register
    ndim = len(register.dims)
    axes = [register.axis(label) for label in labels]
    joint = int(np.prod([register.dims[a] for a in axes]))
    kernel = _kernel_matrix(op, labels)
    if kernel.shape != (joint, joint):
        raise ValidationError(
            f"kernel shape {kernel.shape} does not match joint dimension "
            f"{joint} of modes {labels}"
        )
    tens = rho.matrix.reshape(register.dims * 2)
    tens = _apply_axes(tens, kernel, axes)
    tens = _apply_axes(tens, kernel.conj(), [ndim + a for a in axes])
    return DensityOperator(
        register, tens.reshape(register.size, register.size), check=False, copy=False
    )


# ---------------------------------------------------------------------------
# scalars


def inner(a: PureState, b: PureState) -> complex:
    """<a|b>, conjugate-linear in the first argument."""
    if a.register != b.register:
        raise ValidationError("inner product requires a common register")
    return complex(np.vdot(a.amps, b.amps))


def norm(state: PureState) -> float:
    return state.norm()


# ---------------------------------------------------------------------------
# reductions


def _pure_partial_trace(state: PureState, keep_axes: Sequence[int]) -> np.ndarray:
    ndim = state.amps.ndim
    order = list(keep_axes) + [k for k in range(ndim) if k not in keep_axes]
    moved = np.transpose(state.amps, order)
    kept = int(np.prod(moved.shape[: len(keep_axes)])) if keep_axes else 1
    mat = np.ascontiguousarray(moved).reshape(kept, -1)
    return mat @ mat.conj().T


def partial_trace(source, keep: Sequence[str]) -> DensityOperator:
    """Trace out all modes except `keep` (result listed in `keep` order)."""
    keep = tuple(keep)
    if not keep:
        raise ValidationError("keep set must be non-empty")
    register = source.register
    keep_axes = [register.axis(label) for label in keep]
    target = register.subset(keep)

    if isinstance(source, PureState):
        mat = _pure_partial_trace(source, keep_axes)
    elif isinstance(source, Ensemble):
        mat = np.zeros((target.size, target.size), dtype=np.complex128)
        for weight, state in source.branches:
            if weight:
                mat += weight * _pure_partial_trace(state, keep_axes)
    elif isinstance(source, DensityOperator):
        ndim = len(register.dims)
        traced = [k for k in range(ndim) if k not in keep_axes]
        perm = (
            list(keep_axes) + traced
            + [ndim + a for a in keep_axes] + [ndim + a for a in traced]
        )
        tens = np.transpose(source.matrix.reshape(register.dims * 2), perm)
        dt = int(np.prod([register.dims[a] for a in traced])) if traced else 1
        tens = tens.reshape(target.size, dt, target.size, dt)
        mat = np.einsum("ajbj->ab", tens)
    else:
        raise ValidationError(f"cannot partial-trace {type(source).__name__}")
    return DensityOperator(target, mat, check=False, copy=False)


def to_density(source) -> DensityOperator:
    """Full density operator of a pure state or ensemble."""
    if isinstance(source, PureState):
        vec = source.amps.reshape(-1, 1)
        return DensityOperator(source.register, vec @ vec.conj().T,
                               check=False, copy=False)
    if isinstance(source, Ensemble):
        mat = np.zeros((source.register.size, source.register.size),
                       dtype=np.complex128)
        for weight, state in source.branches:
            if weight:
                vec = state.amps.reshape(-1, 1)
                mat += weight * (vec @ vec.conj().T)
        return DensityOperator(source.register, mat, check=False, copy=False)
    raise ValidationError(f"cannot convert {type(source).__name__} to a density")


def project_vacuum(state: PureState, label: str) -> tuple:
    """Project one mode onto vacuum and drop it from the register.

    Returns (reduced state, removed probability mass). The reduced state is
    not renormalized.
    """
    register = state.register
    axis = register.axis(label)
    if len(register.dims) == 1:
        raise ValidationError("cannot drop the only mode of a register")
    kept = np.take(state.amps, 0, axis=axis)
    removed = float(np.linalg.norm(state.amps) ** 2 - np.linalg.norm(kept) ** 2)
    labels = [lab for lab in register.labels if lab != label]
    return PureState(register.subset(labels), kept), max(removed, 0.0)


def occupation_distribution(state: PureState, label: str) -> np.ndarray:
    """Probability of each occupation of one mode (unnormalized state ok)."""
    axis = state.register.axis(label)
    probs = np.abs(state.amps) ** 2
    other = tuple(k for k in range(probs.ndim) if k != axis)
    return probs.sum(axis=other)
