"""Convex feasible sets with exact Euclidean projections.

Variants: whole space, box, Euclidean ball, scaled probability simplex, and
a block product of those (the problem zoo needs ball x interval).  Every
compact variant answers two size queries consumed by the complexity-bound
calculators: ``diameter`` (max pairwise distance) and ``max_norm`` (max
Euclidean norm over the set).  Unbounded answers are the explicit marker
``UNBOUNDED``, never an inf float, so downstream code has to deal with it
deliberately.

All sets are immutable after construction and safe to share across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ConstraintSet",
    "WholeSpace",
    "Box",
    "Ball",
    "Simplex",
    "Product",
    "UNBOUNDED",
    "is_unbounded",
    "project",
    "contains",
    "diameter",
    "max_norm",
    "sample_point",
    "parse_set",
]


class _Unbounded:
    """Marker for an infinite diameter / max-norm query."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNBOUNDED"


UNBOUNDED = _Unbounded()


def is_unbounded(value) -> bool:
    return value is UNBOUNDED


def _freeze(a) -> np.ndarray:
    arr = np.asarray(a, dtype=float)
    if arr.ndim != 1:
        raise ValueError("expected a 1-D real vector")
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


def _check_dim(s: "ConstraintSet", v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (s.dim,):
        raise ValueError(f"dimension mismatch: set has dim {s.dim}, vector has shape {v.shape}")
    return v


class ConstraintSet:
    """Base class; concrete variants implement the projection calculus."""

    dim: int

    def project(self, v: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def contains(self, v: np.ndarray, tol: float = 0.0) -> bool:
        raise NotImplementedError

    def diameter(self):
        raise NotImplementedError

    def max_norm(self):
        raise NotImplementedError

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        """Random point of the set (used by property tests and checkers)."""
        raise NotImplementedError

    def descriptor(self) -> str:
        """Config-format text form; ``parse_set`` inverts it."""
        raise NotImplementedError

    def __repr__(self):
        return self.descriptor()


@dataclass(frozen=True)
class WholeSpace(ConstraintSet):
    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")

    def project(self, v):
        return np.array(_check_dim(self, v), dtype=float)

    def contains(self, v, tol=0.0):
        _check_dim(self, v)
        return True

    def diameter(self):
        return UNBOUNDED

    def max_norm(self):
        return UNBOUNDED

    def sample(self, rng):
        return rng.standard_normal(self.dim)

    def descriptor(self):
        return f"free(dim={self.dim})"


@dataclass(frozen=True)
class Box(ConstraintSet):
    lower: np.ndarray
    upper: np.ndarray
    dim: int = field(init=False)

    def __post_init__(self):
        lo = _freeze(self.lower)
        hi = _freeze(self.upper)
        if lo.shape != hi.shape:
            raise ValueError("lower/upper dimension mismatch")
        if np.any(lo > hi):
            raise ValueError("box requires lower <= upper componentwise")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        object.__setattr__(self, "dim", lo.shape[0])

    def project(self, v):
        v = _check_dim(self, v)
        return np.minimum(np.maximum(v, self.lower), self.upper)

    def contains(self, v, tol=0.0):
        v = _check_dim(self, v)
        return bool(np.all(v >= self.lower - tol) and np.all(v <= self.upper + tol))

    def diameter(self):
        return float(np.linalg.norm(self.upper - self.lower))

    def max_norm(self):
        return float(math.sqrt(float(np.sum(np.maximum(self.lower**2, self.upper**2)))))

    def sample(self, rng):
        return rng.uniform(self.lower, self.upper)

    def descriptor(self):
        return f"box(lower={_fmt_vec(self.lower)}, upper={_fmt_vec(self.upper)})"


@dataclass(frozen=True)
class Ball(ConstraintSet):
    center: np.ndarray
    radius: float
    dim: int = field(init=False)

    def __post_init__(self):
        c = _freeze(self.center)
        r = float(self.radius)
        if not (r > 0):
            raise ValueError("ball radius must be > 0")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", r)
        object.__setattr__(self, "dim", c.shape[0])

    def project(self, v):
        v = _check_dim(self, v)
        d = v - self.center
        n = float(np.linalg.norm(d))
        if n <= self.radius:
            # includes v == center: the center itself is returned
            return v.copy()
        return self.center + d * (self.radius / n)

    def contains(self, v, tol=0.0):
        v = _check_dim(self, v)
        return bool(np.linalg.norm(v - self.center) <= self.radius + tol)

    def diameter(self):
        return 2.0 * self.radius

    def max_norm(self):
        return float(np.linalg.norm(self.center)) + self.radius

    def sample(self, rng):
        d = rng.standard_normal(self.dim)
        n = np.linalg.norm(d)
        if n == 0:
            return self.center.copy()
        u = rng.uniform() ** (1.0 / self.dim)
        return self.center + d * (self.radius * u / n)

    def descriptor(self):
        return f"ball(center={_fmt_vec(self.center)}, radius={_fmt_num(self.radius)})"


@dataclass(frozen=True)
class Simplex(ConstraintSet):
    """The scaled simplex {v >= 0, sum(v) = scale}."""

    dim: int
    scale: float = 1.0

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if not (float(self.scale) > 0):
            raise ValueError("simplex scale must be > 0")
        object.__setattr__(self, "scale", float(self.scale))

    def project(self, v):
        # sort-then-threshold: find tau with sum(max(v_i - tau, 0)) = scale
        v = _check_dim(self, v)
        u = np.sort(v)[::-1]
        css = np.cumsum(u) - self.scale
        idx = np.arange(1, self.dim + 1)
        rho = int(idx[u - css / idx > 0][-1])
        tau = css[rho - 1] / rho
        return np.maximum(v - tau, 0.0)

    def contains(self, v, tol=0.0):
        v = _check_dim(self, v)
        return bool(np.all(v >= -tol) and abs(float(np.sum(v)) - self.scale) <= tol)

    def diameter(self):
        if self.dim == 1:
            return 0.0
        return self.scale * math.sqrt(2.0)

    def max_norm(self):
        # norm is convex, so the max sits at a vertex scale * e_i
        return self.scale

    def sample(self, rng):
        return rng.dirichlet(np.ones(self.dim)) * self.scale

    def descriptor(self):
        return f"simplex(dim={self.dim}, scale={_fmt_num(self.scale)})"


@dataclass(frozen=True)
class Product(ConstraintSet):
    """Block product of sets; projection is exact blockwise projection."""

    parts: tuple
    dim: int = field(init=False)

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts:
            raise ValueError("product needs at least one part")
        for p in parts:
            if not isinstance(p, ConstraintSet):
                raise ValueError("product parts must be constraint sets")
        object.__setattr__(self, "parts", parts)
        object.__setattr__(self, "dim", sum(p.dim for p in parts))

    def _blocks(self, v):
        out = []
        i = 0
        for p in self.parts:
            out.append((p, v[i : i + p.dim]))
            i += p.dim
        return out

    def project(self, v):
        v = _check_dim(self, v)
        return np.concatenate([p.project(b) for p, b in self._blocks(v)])

    def contains(self, v, tol=0.0):
        v = _check_dim(self, v)
        return all(p.contains(b, tol) for p, b in self._blocks(v))

    def diameter(self):
        ds = [p.diameter() for p in self.parts]
        if any(is_unbounded(d) for d in ds):
            return UNBOUNDED
        return float(math.sqrt(sum(d * d for d in ds)))

    def max_norm(self):
        ms = [p.max_norm() for p in self.parts]
        if any(is_unbounded(m) for m in ms):
            return UNBOUNDED
        return float(math.sqrt(sum(m * m for m in ms)))

    def sample(self, rng):
        return np.concatenate([p.sample(rng) for p in self.parts])

    def descriptor(self):
        inner = ", ".join(p.descriptor() for p in self.parts)
        return f"product({inner})"


# ---------------------------------------------------------------------------
# operation-style wrappers


def project(s: ConstraintSet, v) -> np.ndarray:
    return s.project(v)


def contains(s: ConstraintSet, v, tol: float = 0.0) -> bool:
    if tol < 0:
        raise ValueError("tol must be >= 0")
    return s.contains(v, tol)


def diameter(s: ConstraintSet):
    return s.diameter()


def max_norm(s: ConstraintSet):
    return s.max_norm()


def sample_point(s: ConstraintSet, rng: np.random.Generator) -> np.ndarray:
    return s.sample(rng)


# ---------------------------------------------------------------------------
# config-text serialization


def _fmt_num(x: float) -> str:
    return "%.17g" % float(x)


def _fmt_vec(v) -> str:
    return "[" + ", ".join(_fmt_num(x) for x in np.asarray(v, dtype=float)) + "]"


def parse_set(text: str) -> ConstraintSet:
    """Parse a set descriptor like ``box(lower=[0, 0], upper=[1, 1])``."""
    from ._expr import parse_call

    name, args, kwargs = parse_call(text)
    return build_set(name, args, kwargs)


def build_set(name: str, args: list, kwargs: dict) -> ConstraintSet:
    from ._expr import _CallValue

    def as_set(v):
        if isinstance(v, ConstraintSet):
            return v
        if isinstance(v, _CallValue):
            return build_set(v.name, v.args, v.kwargs)
        raise ValueError(f"expected a set descriptor, got {v!r}")

    name = name.lower()
    if name == "free":
        return WholeSpace(int(kwargs.get("dim", args[0] if args else 0)))
    if name == "box":
        return Box(kwargs["lower"], kwargs["upper"])
    if name == "ball":
        return Ball(kwargs["center"], kwargs["radius"])
    if name == "simplex":
        return Simplex(int(kwargs["dim"]), float(kwargs.get("scale", 1.0)))
    if name == "interval":
        lo, hi = (args if len(args) == 2 else (kwargs["lower"], kwargs["upper"]))
        return Box([float(lo)], [float(hi)])
    if name == "product":
        return Product(tuple(as_set(a) for a in args))
    raise ValueError(f"unknown set kind: {name!r}")
