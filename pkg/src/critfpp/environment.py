"""Seeded random edge-weight environments via the coupling t_e = F^{-1}(U_e).

Each primal edge carries an independent uniform U_e in [0, 1] computed by a
counter-based hash of (seed, edge coordinates): no stream state, so values
never depend on the sampling window or on query order, and the same edge
always returns the same value. An edge is open iff U_e <= 1/2, p-open iff
U_e <= p, and its weight is F^{-1}(U_e) for the chosen distribution. Dual
edges inherit the uniform of their primal partner.
"""

import math

import numpy as np

from .lattice import DUAL, EAST, NORTH, PRIMAL, Edge, Vertex, dual_edge

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_CX = 0xD6E8FEB86659FD93
_CY = 0xCA01F9DD51B87F89


def _mix(z):
    z &= _MASK
    z ^= z >> 30
    z = (z * _M1) & _MASK
    z ^= z >> 27
    z = (z * _M2) & _MASK
    z ^= z >> 31
    return z


def mix_seed(seed, label):
    """Derive a sub-seed from (seed, integer label); used for per-sample and
    per-purpose seeds so one top-level seed reproduces a whole study."""
    return _mix(_mix((seed + _GAMMA) & _MASK) ^ _mix((label * _CX + _GAMMA) & _MASK))


def _edge_uniform_scalar(seed, x, y, direction):
    h = _mix((seed + _GAMMA) & _MASK)
    h = _mix(h ^ ((x * _CX) & _MASK))
    h = _mix(h ^ ((y * _CY) & _MASK))
    h = _mix(h ^ direction)
    return (h >> 11) * (2.0**-53)


def _edge_uniform_array(seed, x, y, direction):
    """Vectorized twin of _edge_uniform_scalar; bit-identical results."""
    with np.errstate(over="ignore"):
        x = np.asarray(x, dtype=np.int64).astype(np.uint64)
        y = np.asarray(y, dtype=np.int64).astype(np.uint64)
        d = np.asarray(direction, dtype=np.int64).astype(np.uint64)

        def mx(z):
            z = z ^ (z >> np.uint64(30))
            z = z * np.uint64(_M1)
            z = z ^ (z >> np.uint64(27))
            z = z * np.uint64(_M2)
            z = z ^ (z >> np.uint64(31))
            return z

        h0 = np.uint64(_mix((seed + _GAMMA) & _MASK))
        h = mx(h0 ^ (x * np.uint64(_CX)))
        h = mx(h ^ (y * np.uint64(_CY)))
        h = mx(h ^ d)
        return (h >> np.uint64(11)).astype(np.float64) * (2.0**-53)


class WeightDistribution:
    """A critical edge-weight distribution: F(0^-) = 0 and F(0) = 1/2.

    Kinds:
      bernoulli  -- atoms 1/2 at 0 and 1/2 at 1
      gap        -- atoms 1/2 at 0 and 1/2 at h (support gap at 0)
      power-law  -- F(t) = 1/2 + C t^alpha on [0, h], C = 1/(2 h^alpha)
      stretched  -- F(t) = 1/2 + C exp(-t^-alpha) on (0, h], C = exp(h^-alpha)/2
      table      -- stepwise F^{-1} given as breakpoints [(u_i, t_i)]
    """

    def __init__(self, kind="bernoulli", alpha=1.0, h=None, table=None):
        self.kind = kind
        self.alpha = float(alpha)
        if kind == "bernoulli":
            self.h = 1.0
        elif kind == "gap":
            self.h = 1.0 if h is None else float(h)
        elif kind == "power-law":
            self.h = 0.5 if h is None else float(h)
            if self.alpha <= 0 or self.h <= 0:
                raise ValueError("power-law needs alpha > 0 and h > 0")
            self.C = 1.0 / (2.0 * self.h**self.alpha)
        elif kind == "stretched":
            self.h = 1.0 if h is None else float(h)
            if self.alpha <= 0 or self.h <= 0:
                raise ValueError("stretched needs alpha > 0 and h > 0")
            self.C = 0.5 * math.exp(self.h**-self.alpha)
        elif kind == "table":
            if not table:
                raise ValueError("table kind needs breakpoints")
            tab = sorted((float(u), float(t)) for u, t in table)
            if tab[-1][0] < 1.0:
                tab.append((1.0, tab[-1][1]))
            if any(t < 0 for _, t in tab):
                raise ValueError("negative weights not allowed")
            ts = [t for _, t in tab]
            if ts != sorted(ts):
                raise ValueError("table must give a nondecreasing inverse")
            self.table = tab
            self.h = tab[-1][1]
        else:
            raise ValueError("unknown distribution kind: %r" % (kind,))

    def inverse_cdf(self, u):
        """Generalized inverse F^{-1}(u) = inf{t : F(t) >= u}; 0 for u <= 1/2."""
        if u < 0.0 or u > 1.0:
            raise ValueError("u must lie in [0, 1]")
        if u <= 0.5:
            return 0.0
        k = self.kind
        if k == "bernoulli" or k == "gap":
            return self.h
        if k == "power-law":
            return ((u - 0.5) / self.C) ** (1.0 / self.alpha)
        if k == "stretched":
            return math.log(self.C / (u - 0.5)) ** (-1.0 / self.alpha)
        for bu, bt in self.table:
            if u <= bu:
                return bt
        return self.table[-1][1]

    def inverse_cdf_array(self, u):
        u = np.asarray(u, dtype=np.float64)
        out = np.zeros_like(u)
        hi = u > 0.5
        k = self.kind
        if k == "bernoulli" or k == "gap":
            out[hi] = self.h
        elif k == "power-law":
            out[hi] = ((u[hi] - 0.5) / self.C) ** (1.0 / self.alpha)
        elif k == "stretched":
            out[hi] = np.log(self.C / (u[hi] - 0.5)) ** (-1.0 / self.alpha)
        else:
            uu = u[hi]
            res = np.full_like(uu, self.table[-1][1])
            for bu, bt in reversed(self.table):
                res[uu <= bu] = bt
            out[hi] = res
        return out

    @property
    def integer_weights(self):
        """True when all weights are integers (fast path for geodesics)."""
        if self.kind in ("bernoulli", "gap"):
            return float(self.h).is_integer()
        if self.kind == "table":
            return all(float(t).is_integer() for _, t in self.table)
        return False

    def to_json(self):
        d = {"kind": self.kind}
        if self.kind in ("power-law", "stretched"):
            d["alpha"] = self.alpha
            d["h"] = self.h
        elif self.kind == "gap":
            d["h"] = self.h
        elif self.kind == "table":
            d["table"] = self.table
        return d

    @classmethod
    def from_json(cls, d):
        kind = d.get("kind", "bernoulli")
        return cls(
            kind=kind,
            alpha=d.get("alpha", 1.0),
            h=d.get("h"),
            table=d.get("table"),
        )

    @classmethod
    def parse(cls, text):
        """Parse 'kind' or 'kind:alpha=..,h=..' flag syntax."""
        if ":" in text:
            kind, rest = text.split(":", 1)
            params = {}
            for part in rest.split(","):
                k, v = part.split("=")
                params[k.strip()] = float(v)
            return cls(kind=kind.strip(), **params)
        return cls(kind=text.strip())


class Environment:
    """An immutable random environment: seed + distribution.

    All queries are pure; concurrent use is safe. The optional forced map
    (edge -> bool open status) supports the modified environments used by
    the circuit construction: forcing only ever changes open/closed status,
    never the underlying uniforms.
    """

    def __init__(self, seed, distribution=None, forced=None, all_status=None):
        self.seed = int(seed) & _MASK
        self.distribution = distribution or WeightDistribution()
        self.forced = forced or {}
        self.all_status = all_status  # None, or True/False for every edge

    def _primal(self, e):
        if e.layer == DUAL:
            e = dual_edge(e)
        return e

    def uniform(self, e):
        e = self._primal(e)
        return _edge_uniform_scalar(self.seed, e.base.x, e.base.y, e.direction)

    def _closed_weight(self):
        return max(self.distribution.inverse_cdf(0.75), 1e-9)

    def weight(self, e):
        e = self._primal(e)
        if e in self.forced:
            return 0.0 if self.forced[e] else self._closed_weight()
        if self.all_status is not None:
            return 0.0 if self.all_status else self._closed_weight()
        return self.distribution.inverse_cdf(self.uniform(e))

    def is_open(self, e):
        e = self._primal(e)
        if e in self.forced:
            return self.forced[e]
        if self.all_status is not None:
            return self.all_status
        return self.uniform(e) <= 0.5

    def is_p_open(self, e, p):
        if p < 0.0 or p > 1.0:
            raise ValueError("p must lie in [0, 1]")
        e = self._primal(e)
        return self.uniform(e) <= p

    def with_forced(self, forced):
        """A copy with extra forced statuses layered on top."""
        merged = dict(self.forced)
        for e, st in forced.items():
            merged[self._primal(e)] = st
        return Environment(self.seed, self.distribution, merged, self.all_status)

    # -- vectorized window access -------------------------------------------

    def uniform_grid(self, x0, y0, nx, ny):
        """Uniforms for all primal edges with base in [x0, x0+nx) x [y0, y0+ny),
        as an array of shape (2, ny, nx) indexed by (direction, y, x)."""
        xs = np.arange(x0, x0 + nx, dtype=np.int64)
        ys = np.arange(y0, y0 + ny, dtype=np.int64)
        X, Y = np.meshgrid(xs, ys)
        out = np.empty((2, ny, nx), dtype=np.float64)
        out[EAST] = _edge_uniform_array(self.seed, X, Y, EAST)
        out[NORTH] = _edge_uniform_array(self.seed, X, Y, NORTH)
        return out

    def open_grid(self, x0, y0, nx, ny):
        if self.all_status is not None:
            grid = np.full((2, ny, nx), self.all_status, dtype=bool)
        else:
            grid = self.uniform_grid(x0, y0, nx, ny) <= 0.5
        for e, st in self.forced.items():
            bx, by = e.base.x - x0, e.base.y - y0
            if 0 <= bx < nx and 0 <= by < ny:
                grid[e.direction, by, bx] = st
        return grid

    def weight_grid(self, x0, y0, nx, ny):
        if self.all_status is not None:
            w = np.full(
                (2, ny, nx),
                0.0 if self.all_status else self._closed_weight(),
                dtype=np.float64,
            )
        else:
            u = self.uniform_grid(x0, y0, nx, ny)
            w = self.distribution.inverse_cdf_array(u)
        for e, st in self.forced.items():
            bx, by = e.base.x - x0, e.base.y - y0
            if 0 <= bx < nx and 0 <= by < ny:
                w[e.direction, by, bx] = (
                    0.0 if st else max(self.distribution.inverse_cdf(0.75), 1e-9)
                )
        return w


def edge_uniforms(seed, xs, ys, directions):
    """Uniforms for arbitrary arrays of primal edge coordinates."""
    return _edge_uniform_array(seed, xs, ys, directions)
