"""Coefficient vectors and the catalogue of (quasi-)norms the experiments run in.

A vector is a finitely supported real sequence indexed by positive integers.
Norms are plain callables on such vectors; a ``SpaceDescriptor`` bundles a
norm with the structural constants the estimators need (quasi-triangle
constant, basis bounds, optional extreme-point / dual-functional oracles).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Optional, Sequence

import numpy as np

__all__ = [
    "CoeffVector",
    "SpaceDescriptor",
    "GapSequence",
    "summing_norm",
    "lp_norm",
    "sup_norm",
    "weighted_lp_norm",
    "projection",
    "summing_space",
    "lp_space",
    "sup_space",
    "weighted_lp_space",
    "space_from_key",
    "estimate_operator_norm",
]


class CoeffVector:
    """Finitely supported coefficient sequence, canonical form.

    Canonical means: indices are strictly increasing positive integers and no
    stored coefficient is zero.  Instances are immutable; every operation
    returns a new vector.
    """

    __slots__ = ("_idx", "_val")

    def __init__(self, indices: Iterable[int] = (), values: Iterable[float] = ()):
        idx = np.asarray(list(indices) if not isinstance(indices, np.ndarray) else indices,
                         dtype=np.int64)
        val = np.asarray(list(values) if not isinstance(values, np.ndarray) else values,
                         dtype=np.float64)
        if idx.shape != val.shape or idx.ndim != 1:
            raise ValueError("indices and values must be 1-d and of equal length")
        if idx.size and int(idx.min()) < 1:
            raise ValueError("indices must be positive integers")
        order = np.argsort(idx, kind="stable")
        idx, val = idx[order], val[order]
        if idx.size and np.any(np.diff(idx) == 0):
            uniq, inverse = np.unique(idx, return_inverse=True)
            acc = np.zeros(uniq.size, dtype=np.float64)
            np.add.at(acc, inverse, val)
            idx, val = uniq, acc
        keep = val != 0.0
        self._idx = np.ascontiguousarray(idx[keep])
        self._val = np.ascontiguousarray(val[keep])
        self._idx.setflags(write=False)
        self._val.setflags(write=False)

    # -- constructors -------------------------------------------------

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, float]]) -> "CoeffVector":
        pairs = list(pairs)
        return cls([p[0] for p in pairs], [p[1] for p in pairs])

    @classmethod
    def from_dense(cls, values: Sequence[float], start: int = 1) -> "CoeffVector":
        values = np.asarray(values, dtype=np.float64)
        return cls(np.arange(start, start + values.size), values)

    @classmethod
    def zero(cls) -> "CoeffVector":
        return cls()

    @classmethod
    def basis_vector(cls, i: int, coeff: float = 1.0) -> "CoeffVector":
        return cls([i], [coeff])

    @classmethod
    def indicator(cls, indices: Iterable[int], coeff: float = 1.0) -> "CoeffVector":
        idx = sorted(set(int(i) for i in indices))
        return cls(idx, [coeff] * len(idx))

    # -- inspection ---------------------------------------------------

    @property
    def indices(self) -> np.ndarray:
        return self._idx

    @property
    def values(self) -> np.ndarray:
        return self._val

    def support(self) -> tuple[int, ...]:
        return tuple(int(i) for i in self._idx)

    def __len__(self) -> int:
        return int(self._idx.size)

    def __bool__(self) -> bool:
        return self._idx.size > 0

    def max_index(self) -> int:
        return int(self._idx[-1]) if self._idx.size else 0

    def __getitem__(self, i: int) -> float:
        pos = np.searchsorted(self._idx, i)
        if pos < self._idx.size and self._idx[pos] == i:
            return float(self._val[pos])
        return 0.0

    def pairs(self) -> Iterator[tuple[int, float]]:
        for i, v in zip(self._idx, self._val):
            yield int(i), float(v)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CoeffVector):
            return NotImplemented
        return (self._idx.shape == other._idx.shape
                and bool(np.all(self._idx == other._idx))
                and bool(np.all(self._val == other._val)))

    def __hash__(self):
        return hash((self._idx.tobytes(), self._val.tobytes()))

    def __repr__(self) -> str:
        inner = ", ".join(f"{i}: {v:g}" for i, v in itertools.islice(self.pairs(), 8))
        more = ", ..." if len(self) > 8 else ""
        return f"CoeffVector({{{inner}{more}}})"

    # -- algebra ------------------------------------------------------

    def restrict(self, A: Iterable[int]) -> "CoeffVector":
        """Projection onto the index set A (empty set gives the zero vector)."""
        A_arr = np.asarray(sorted(set(int(i) for i in A)), dtype=np.int64)
        if A_arr.size == 0 or self._idx.size == 0:
            return CoeffVector()
        mask = np.isin(self._idx, A_arr, assume_unique=True)
        return CoeffVector(self._idx[mask], self._val[mask])

    def drop(self, A: Iterable[int]) -> "CoeffVector":
        A_arr = np.asarray(sorted(set(int(i) for i in A)), dtype=np.int64)
        if A_arr.size == 0 or self._idx.size == 0:
            return self
        mask = ~np.isin(self._idx, A_arr, assume_unique=True)
        return CoeffVector(self._idx[mask], self._val[mask])

    def __add__(self, other: "CoeffVector") -> "CoeffVector":
        return CoeffVector(np.concatenate([self._idx, other._idx]),
                           np.concatenate([self._val, other._val]))

    def __sub__(self, other: "CoeffVector") -> "CoeffVector":
        return self + other.scale(-1.0)

    def __neg__(self) -> "CoeffVector":
        return self.scale(-1.0)

    def scale(self, c: float) -> "CoeffVector":
        return CoeffVector(self._idx, self._val * float(c))

    def __mul__(self, c: float) -> "CoeffVector":
        return self.scale(c)

    __rmul__ = __mul__

    def to_dense(self, dim: Optional[int] = None) -> np.ndarray:
        n = self.max_index() if dim is None else int(dim)
        out = np.zeros(n, dtype=np.float64)
        if self._idx.size:
            inside = self._idx <= n
            out[self._idx[inside] - 1] = self._val[inside]
        return out

    # -- serialization ------------------------------------------------

    def to_json_pairs(self) -> list[list[float]]:
        return [[int(i), float(v)] for i, v in self.pairs()]

    @classmethod
    def from_json_pairs(cls, data: Iterable[Sequence[float]]) -> "CoeffVector":
        return cls.from_pairs((int(i), float(v)) for i, v in data)

    def to_json(self) -> str:
        return json.dumps(self.to_json_pairs())

    @classmethod
    def from_json(cls, text: str) -> "CoeffVector":
        return cls.from_json_pairs(json.loads(text))


# ---------------------------------------------------------------------------
# Norms
# ---------------------------------------------------------------------------


def summing_norm(x: CoeffVector) -> float:
    """sup over n of |partial sum of the first n coefficients|.

    The partial sum only changes at support points, so a single cumulative
    pass over the stored values is exact.
    """
    if not x:
        return 0.0
    return float(np.max(np.abs(np.cumsum(x.values))))


def lp_norm(x: CoeffVector, p: float) -> float:
    """(sum |a_i|^p)^(1/p); a quasi-norm for 0 < p < 1."""
    if p <= 0:
        raise ValueError(f"lp_norm requires p > 0, got {p}")
    if not x:
        return 0.0
    a = np.abs(x.values)
    peak = float(a.max())
    if peak == 0.0:
        return 0.0
    # factor out the peak so tiny p does not underflow
    return peak * float(np.sum((a / peak) ** p)) ** (1.0 / p)


def sup_norm(x: CoeffVector) -> float:
    if not x:
        return 0.0
    return float(np.max(np.abs(x.values)))


def weighted_lp_norm(x: CoeffVector, p: float, weights: Sequence[float]) -> float:
    """(sum w_i |a_i|^p)^(1/p); weights beyond the configured table default to 1."""
    if p <= 0:
        raise ValueError(f"weighted_lp_norm requires p > 0, got {p}")
    if not x:
        return 0.0
    w = np.asarray(weights, dtype=np.float64)
    wi = np.where(x.indices <= w.size, w[np.minimum(x.indices, w.size) - 1], 1.0)
    return float(np.sum(wi * np.abs(x.values) ** p)) ** (1.0 / p)


def projection(x: CoeffVector, A: Iterable[int]) -> CoeffVector:
    """P_A(x): restriction of x to the finite index set A (empty sum is zero)."""
    return x.restrict(A)


# ---------------------------------------------------------------------------
# Space descriptors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpaceDescriptor:
    """A (quasi-)norm together with the structural constants used by estimators.

    Fields:
        norm: the (quasi-)norm evaluator.
        alpha: quasi-triangle constant (1 for genuine norms).
        alpha1: sup over i of the norm of the i-th basis vector.
        alpha2: sup over i of the norm of the i-th coordinate functional.
        schauder_constant: uniform bound for prefix partial-sum projections,
            when known.
        c_param: sup over i of (1 + |e_i|)(1 + |e_i*|); always > 2.
        extreme_points: optional generator of unit-ball extreme points for a
            given finite support tuple (exact search is only available where
            this exists and the ball is polyhedral).
        dual_functionals: optional dense matrix F(d) of functionals with
            norm(z) = max over rows f of |f . z| on vectors supported in
            [1, d]; presence of this oracle marks the norm as polyhedral.
        contractive_projections: True when every coordinate projection
            satisfies |P_A x| <= |x| (1-suppression-unconditional catalogue
            entries).
    """

    name: str
    norm: Callable[[CoeffVector], float]
    alpha: float
    alpha1: float
    alpha2: float
    c_param: float
    schauder_constant: Optional[float] = None
    extreme_points: Optional[Callable[[tuple[int, ...]], Iterator[CoeffVector]]] = None
    dual_functionals: Optional[Callable[[int], np.ndarray]] = None
    contractive_projections: bool = False

    def __post_init__(self):
        if self.alpha < 1.0:
            raise ValueError("quasi-triangle constant must satisfy alpha >= 1")
        if not self.c_param > 2.0:
            raise ValueError("c parameter must exceed 2")

    @property
    def is_polyhedral(self) -> bool:
        return self.dual_functionals is not None


def _summing_extreme_points(support: tuple[int, ...]) -> Iterator[CoeffVector]:
    """Extreme points of the summing-norm unit ball restricted to a support set.

    In prefix coordinates the ball is the cube |u_j| <= 1, so its vertices are
    the sign patterns; mapping back gives difference vectors.
    """
    k = len(support)
    if k > 24:
        raise ValueError("extreme-point enumeration capped at 24 support points")
    for pattern in itertools.product((1.0, -1.0), repeat=k):
        vals = [pattern[0]] + [pattern[j] - pattern[j - 1] for j in range(1, k)]
        yield CoeffVector(support, vals)


def _l1_extreme_points(support: tuple[int, ...]) -> Iterator[CoeffVector]:
    for i in support:
        yield CoeffVector.basis_vector(i, 1.0)
        yield CoeffVector.basis_vector(i, -1.0)


def _sup_extreme_points(support: tuple[int, ...]) -> Iterator[CoeffVector]:
    k = len(support)
    if k > 24:
        raise ValueError("extreme-point enumeration capped at 24 support points")
    for pattern in itertools.product((1.0, -1.0), repeat=k):
        yield CoeffVector(support, pattern)


def _summing_dual_functionals(dim: int) -> np.ndarray:
    # rows: prefix indicators 1_{[1..n]}; norm(z) = max_n |row_n . z|
    return np.tril(np.ones((dim, dim)))


def _l1_dual_functionals(dim: int) -> np.ndarray:
    if dim > 14:
        raise ValueError("l1 dual-functional enumeration capped at dimension 14")
    return np.array(list(itertools.product((1.0, -1.0), repeat=dim)))


def _sup_dual_functionals(dim: int) -> np.ndarray:
    return np.eye(dim)


def summing_space(dim: int = 64) -> SpaceDescriptor:
    """The completion of finitely supported sequences under the summing norm.

    The canonical basis is a monotone normalized Schauder basis.  Coordinate
    functionals have norm 2 from the second coordinate on (difference of two
    prefix sums), hence alpha2 = 2 once dim >= 2.
    """
    alpha2 = 2.0 if dim >= 2 else 1.0
    return SpaceDescriptor(
        name="summing",
        norm=summing_norm,
        alpha=1.0,
        alpha1=1.0,
        alpha2=alpha2,
        c_param=(1.0 + 1.0) * (1.0 + alpha2),
        schauder_constant=1.0,
        extreme_points=_summing_extreme_points,
        dual_functionals=_summing_dual_functionals,
        contractive_projections=False,
    )


def lp_space(p: float, dim: int = 64) -> SpaceDescriptor:
    """l_p with the canonical basis; a quasi-norm with alpha = 2^(1/p-1) for p < 1."""
    if p <= 0:
        raise ValueError(f"lp_space requires p > 0, got {p}")
    alpha = 1.0 if p >= 1.0 else 2.0 ** (1.0 / p - 1.0)
    extreme = _l1_extreme_points if p == 1.0 else None
    duals = _l1_dual_functionals if p == 1.0 else None
    return SpaceDescriptor(
        name=f"lp:{p:g}",
        norm=lambda x, _p=p: lp_norm(x, _p),
        alpha=alpha,
        alpha1=1.0,
        alpha2=1.0,
        c_param=4.0,
        schauder_constant=1.0,
        extreme_points=extreme,
        dual_functionals=duals,
        contractive_projections=True,
    )


def sup_space(dim: int = 64) -> SpaceDescriptor:
    return SpaceDescriptor(
        name="sup",
        norm=sup_norm,
        alpha=1.0,
        alpha1=1.0,
        alpha2=1.0,
        c_param=4.0,
        schauder_constant=1.0,
        extreme_points=_sup_extreme_points,
        dual_functionals=_sup_dual_functionals,
        contractive_projections=True,
    )


def weighted_lp_space(p: float, weights: Sequence[float], dim: int = 64) -> SpaceDescriptor:
    if p <= 0:
        raise ValueError(f"weighted_lp_space requires p > 0, got {p}")
    w = np.asarray(weights, dtype=np.float64)
    if w.size and w.min() <= 0:
        raise ValueError("weights must be positive")
    alpha = 1.0 if p >= 1.0 else 2.0 ** (1.0 / p - 1.0)
    w_at = lambda i: float(w[i - 1]) if i <= w.size else 1.0
    span = range(1, max(dim, 1) + 1)
    alpha1 = max(w_at(i) ** (1.0 / p) for i in span)
    alpha2 = max(w_at(i) ** (-1.0 / p) for i in span)
    c = max((1.0 + w_at(i) ** (1.0 / p)) * (1.0 + w_at(i) ** (-1.0 / p)) for i in span)
    return SpaceDescriptor(
        name=f"weighted-lp:{p:g}",
        norm=lambda x, _p=p, _w=w: weighted_lp_norm(x, _p, _w),
        alpha=alpha,
        alpha1=alpha1,
        alpha2=alpha2,
        c_param=c,
        schauder_constant=1.0,
        contractive_projections=True,
    )


def _parse_exponent(text: str) -> float:
    """Exponent literal, accepting fractions like "2/3"."""
    if "/" in text:
        num, den = text.split("/", 1)
        return float(num) / float(den)
    return float(text)


def space_from_key(key: str, dim: int = 64) -> SpaceDescriptor:
    """Resolve a catalogue key: "summing", "lp:<p>", "sup", "weighted-lp:<p>:<weight-file>"."""
    if key == "summing":
        return summing_space(dim)
    if key == "sup":
        return sup_space(dim)
    if key.startswith("lp:"):
        return lp_space(_parse_exponent(key.split(":", 1)[1]), dim)
    if key.startswith("weighted-lp:"):
        parts = key.split(":", 2)
        if len(parts) != 3:
            raise ValueError(f"malformed weighted-lp key: {key!r}")
        p = _parse_exponent(parts[1])
        with open(parts[2], "r", encoding="utf-8") as fh:
            weights = json.load(fh)
        return weighted_lp_space(p, weights, dim)
    raise ValueError(f"unknown space key: {key!r}")


# ---------------------------------------------------------------------------
# Gap sequences
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GapSequence:
    """Strictly increasing positive integers, explicit prefix or closed-form rule."""

    values: tuple[int, ...] = ()
    rule: Optional[Callable[[int], int]] = None  # 1-based term formula
    bound_l: Optional[int] = None

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if vals:
            if vals[0] < 1:
                raise ValueError("gap sequence terms must be positive")
            if any(b <= a for a, b in zip(vals, vals[1:])):
                raise ValueError("gap sequence must be strictly increasing")
        if self.bound_l is not None:
            if self.bound_l <= 1:
                raise ValueError("gap bound l must exceed 1")
            for a, b in zip(vals, vals[1:]):
                if b > self.bound_l * a:
                    raise ValueError(
                        f"stored terms violate {self.bound_l}-bounded gaps: {a} -> {b}")
        if not vals and self.rule is None:
            raise ValueError("gap sequence needs an explicit prefix or a rule")

    @classmethod
    def explicit(cls, values: Iterable[int], bound_l: Optional[int] = None) -> "GapSequence":
        return cls(tuple(values), None, bound_l)

    @classmethod
    def naturals(cls) -> "GapSequence":
        # ratios (k+1)/k are at most 2, so the naturals have 2-bounded gaps
        return cls((), lambda k: k, 2)

    @classmethod
    def powers(cls, base: int, first: int = 1) -> "GapSequence":
        if base <= 1:
            raise ValueError("base must exceed 1")
        return cls((), lambda k, b=base, f=first: f * b ** (k - 1), base)

    def members_up_to(self, n: int) -> tuple[int, ...]:
        out = [v for v in self.values if v <= n]
        if self.rule is not None:
            k = 1
            prev = out[-1] if out else 0
            while True:
                v = int(self.rule(k))
                k += 1
                if v <= prev:
                    continue
                if v > n:
                    break
                out.append(v)
                prev = v
                if k > 10 * n + 64:  # guard against a non-increasing rule
                    break
        return tuple(out)

    def __contains__(self, m: int) -> bool:
        return m in self.members_up_to(m)

    def first(self) -> int:
        members = self.members_up_to(10 ** 9) if self.values else (int(self.rule(1)),)
        return members[0]


# ---------------------------------------------------------------------------
# Operator-norm estimation
# ---------------------------------------------------------------------------


def random_vectors(dim: int, count: int, rng: np.random.Generator,
                   style_offset: int = 0) -> Iterator[CoeffVector]:
    """Mixture of dense normal, sparse and tie-rich sign/quantized samples."""
    for j in range(count):
        style = (j + style_offset) % 4
        if style == 0:
            vals = rng.standard_normal(dim)
        elif style == 1:
            vals = rng.standard_cauchy(dim)
        elif style == 2:
            vals = rng.choice([-1.0, 1.0], size=dim)
        else:
            vals = np.round(rng.standard_normal(dim) * 4.0) / 4.0
        if style != 2:
            mask = rng.random(dim) < rng.uniform(0.3, 1.0)
            vals = np.where(mask, vals, 0.0)
        if not np.any(vals):
            vals[int(rng.integers(dim))] = 1.0
        yield CoeffVector.from_dense(vals)


def estimate_operator_norm(space: SpaceDescriptor, A: Iterable[int], dim: int,
                           budget: int, rng: Optional[np.random.Generator] = None):
    """Lower bound (exact for polyhedral norms with an extreme-point oracle)
    on the operator norm of the projection P_A on vectors supported in [1, dim].

    Returns a ConstantEstimate of kind "P_A_norm"; its mode field records
    whether extreme-point enumeration or sampling produced the value.
    """
    from .estimates import ConstantEstimate

    A_set = frozenset(int(i) for i in A)
    if A_set and dim < max(A_set):
        raise ValueError("dim must cover the index set A")
    if not A_set:
        return ConstantEstimate(kind="P_A_norm", value=0.0, witness_x=CoeffVector.zero(),
                                witness_A=A_set, exact=True, mode="degenerate",
                                note="empty index set projects to zero")

    best = 0.0
    best_x: Optional[CoeffVector] = None
    support = tuple(range(1, dim + 1))

    def consider(x: CoeffVector):
        nonlocal best, best_x
        nx = space.norm(x)
        if nx <= 0.0:
            return
        ratio = space.norm(projection(x, A_set)) / nx
        if ratio > best or (ratio == best and best_x is not None
                            and x.to_json() < best_x.to_json()):
            best, best_x = ratio, x

    if space.extreme_points is not None and dim <= 20:
        for x in space.extreme_points(support):
            consider(x)
        mode = "extreme"
        exact = space.is_polyhedral
    else:
        if budget <= 0:
            raise ValueError("no search strategy: zero budget and no extreme-point oracle")
        mode = "sampled"
        exact = False
        rng = rng if rng is not None else np.random.default_rng(0)
        for i in sorted(A_set):
            consider(CoeffVector.basis_vector(i))
        for x in random_vectors(dim, budget, rng):
            consider(x)

    return ConstantEstimate(kind="P_A_norm", value=float(best), witness_x=best_x,
                            witness_A=A_set, exact=exact, mode=mode,
                            note="" if exact else "LOWER_BOUND")
