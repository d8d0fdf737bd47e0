"""Spatial discretization on a box: tensor-product spectral Galerkin spaces,
Gauss quadrature, boundary quadrature, and collocation operators.

Two nested families of spaces realize the discrete velocity/content pair:

* ``VelocitySpace`` -- per component, the factor along the component's own
  axis vanishes at both faces (a Legendre "bubble" basis), so every discrete
  velocity satisfies v.n = 0 on the boundary exactly.  Periodic axes use a
  real Fourier basis and carry no constraint.
* ``ScalarSpace`` -- unconstrained tensor products (contains constants).

The deformation gradient and the mass density are not expanded in these
spaces; they live as collocation values on the quadrature grid, with spatial
derivatives taken through the degree-(nq-1) interpolant per axis
(``QuadGrid.nodal_grad``).
"""

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import legendre as L

from .errors import AllPeriodic, DimensionMismatch

__all__ = [
    "Box",
    "ScalarSpace",
    "VelocitySpace",
    "QuadGrid",
    "BoundaryQuad",
    "boundary_quadrature",
    "eval_field",
    "grad_field",
    "grad2_field",
    "project_scalar",
    "project_impenetrable",
    "embed_coeffs",
]


@dataclass(frozen=True)
class Box:
    lower: tuple
    upper: tuple
    periodic: tuple = None

    def __post_init__(self):
        lo = tuple(float(v) for v in np.atleast_1d(self.lower))
        hi = tuple(float(v) for v in np.atleast_1d(self.upper))
        per = self.periodic
        per = (False,) * len(lo) if per is None else tuple(bool(p) for p in per)
        if not (len(lo) == len(hi) == len(per)):
            raise ValueError("lower/upper/periodic length mismatch")
        if any(h <= l for l, h in zip(lo, hi)):
            raise ValueError("box edge lengths must be positive")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        object.__setattr__(self, "periodic", per)

    @property
    def d(self):
        return len(self.lower)

    @property
    def lengths(self):
        return tuple(h - l for l, h in zip(self.lower, self.upper))


# ---------------------------------------------------------------------------
# 1D bases


class _LegendreBasis:
    """Polynomial factor basis stored as Legendre coefficient columns on the
    reference interval [-1, 1], mapped affinely to [lo, hi]."""

    def __init__(self, coef, lo, hi):
        self.coef = np.asarray(coef, dtype=float)  # (ncoef, nfun)
        self.lo, self.hi = float(lo), float(hi)
        self.scale = 2.0 / (hi - lo)
        self.n = self.coef.shape[1]

    @classmethod
    def full(cls, degree, lo, hi):
        return cls(np.eye(degree + 1), lo, hi)

    @classmethod
    def bubble(cls, degree, lo, hi):
        # (1 - xi^2) P_j, j = 0..degree-2; all vanish at both endpoints
        if degree < 2:
            raise ValueError("bubble factor needs degree >= 2")
        w = np.array([2.0 / 3.0, 0.0, -2.0 / 3.0])  # 1 - xi^2 in Legendre basis
        cols = [L.legmul(w, np.eye(j + 1)[:, j]) for j in range(degree - 1)]
        ncoef = degree + 1
        C = np.zeros((ncoef, degree - 1))
        for j, c in enumerate(cols):
            C[: len(c), j] = c
        return cls(C, lo, hi)

    def _xi(self, x):
        return self.scale * (np.asarray(x, dtype=float) - self.lo) - 1.0

    def deriv_matrix(self, x, order=0):
        c = self.coef if order == 0 else L.legder(self.coef, order, axis=0)
        if c.shape[0] == 0:
            return np.zeros((np.asarray(x).size, self.n))
        vals = L.legval(self._xi(x), c)  # (nfun, npts)
        return np.ascontiguousarray(vals.T) * self.scale**order


class _FourierBasis:
    """Real trigonometric factor basis: 1, sin(m th), cos(m th), ...,
    th = 2 pi (x - lo)/length."""

    def __init__(self, degree, lo, hi):
        self.n = degree + 1
        self.lo = float(lo)
        self.omega = 2.0 * np.pi / (hi - lo)

    def deriv_matrix(self, x, order=0):
        x = np.asarray(x, dtype=float).reshape(-1)
        th = self.omega * (x - self.lo)
        out = np.zeros((x.size, self.n))
        shift = order * np.pi / 2.0
        if order == 0:
            out[:, 0] = 1.0
        for j in range(1, self.n):
            m = (j + 1) // 2
            amp = (m * self.omega) ** order
            if j % 2 == 1:  # sin branch
                out[:, j] = amp * np.sin(m * th + shift)
            else:  # cos branch
                out[:, j] = amp * np.cos(m * th + shift)
        return out


def _axis_basis(box, axis, degree, kind):
    lo, hi = box.lower[axis], box.upper[axis]
    if box.periodic[axis]:
        return _FourierBasis(degree, lo, hi)
    if kind == "full":
        return _LegendreBasis.full(degree, lo, hi)
    return _LegendreBasis.bubble(degree, lo, hi)


class _TensorBasis:
    """Tensor product of per-axis factor bases; function index runs last,
    in C order over the per-axis indices."""

    def __init__(self, factors):
        self.factors = factors
        self.dims = tuple(f.n for f in factors)
        self.n = int(np.prod(self.dims))

    def deriv_matrix(self, points, orders):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        mats = [
            f.deriv_matrix(points[:, a], orders[a]) for a, f in enumerate(self.factors)
        ]
        out = mats[0]
        for m in mats[1:]:
            out = np.einsum("mi,mj->mij", out, m).reshape(points.shape[0], -1)
        return out


# ---------------------------------------------------------------------------
# quadrature grid with collocation operators


class _AxisQuad:
    def __init__(self, box, axis, npts):
        lo, hi = box.lower[axis], box.upper[axis]
        length = hi - lo
        if box.periodic[axis]:
            npts += 1 - npts % 2  # odd count keeps the trig basis unisolvent
            x = lo + (np.arange(npts) + 0.5) * length / npts
            w = np.full(npts, length / npts)
            basis = _FourierBasis(npts - 1, lo, hi)
        else:
            xi, w = L.leggauss(npts)
            x = lo + 0.5 * (xi + 1.0) * length
            w = 0.5 * length * w
            basis = _LegendreBasis.full(npts - 1, lo, hi)
        V = basis.deriv_matrix(x, 0)
        Vinv = np.linalg.inv(V)
        self.points = x
        self.weights = w
        self.n = npts
        self._basis = basis
        self._Vinv = Vinv
        self.D = basis.deriv_matrix(x, 1) @ Vinv

    def interp_to(self, x_target):
        return self._basis.deriv_matrix(np.asarray(x_target), 0) @ self._Vinv


class QuadGrid:
    """Tensor-product quadrature with nodal differentiation per axis.

    Exactness degree is at least 2*max(degree)+2 for the default point
    count.  Collocation fields (F, rho) are flat arrays indexed by the
    C-ordered node index, with any component axes trailing.
    """

    def __init__(self, box, npts_per_axis):
        if np.isscalar(npts_per_axis):
            npts_per_axis = (int(npts_per_axis),) * box.d
        self.box = box
        self.axes = [_AxisQuad(box, a, npts_per_axis[a]) for a in range(box.d)]
        self.shape = tuple(ax.n for ax in self.axes)
        self.n = int(np.prod(self.shape))
        grids = np.meshgrid(*[ax.points for ax in self.axes], indexing="ij")
        self.points = np.stack([g.reshape(-1) for g in grids], axis=-1)
        wgrids = np.meshgrid(*[ax.weights for ax in self.axes], indexing="ij")
        self.weights = np.prod(np.stack(wgrids), axis=0).reshape(-1)

    @property
    def min_spacing(self):
        return min(float(np.min(np.diff(ax.points))) for ax in self.axes)

    def integrate(self, values):
        return np.einsum("q,q...->...", self.weights, values)

    def nodal_grad(self, values):
        """Spectral gradient of a collocation field: (n, *c) -> (n, d, *c)."""
        values = np.asarray(values)
        comp = values.shape[1:]
        grid = values.reshape(self.shape + comp)
        d = self.box.d
        out = np.empty((self.n, d) + comp)
        for a, ax in enumerate(self.axes):
            der = np.moveaxis(
                np.tensordot(ax.D, np.moveaxis(grid, a, 0), axes=(1, 0)), 0, a
            )
            out[:, a] = der.reshape((self.n,) + comp)
        return out

    def interp_matrix(self, points_target):
        """Interpolation operator from nodal values to arbitrary points."""
        pts = np.atleast_2d(np.asarray(points_target, dtype=float))
        mats = [ax.interp_to(pts[:, a]) for a, ax in enumerate(self.axes)]
        out = mats[0]
        for m in mats[1:]:
            out = np.einsum("mi,mj->mij", out, m).reshape(pts.shape[0], -1)
        return out


# ---------------------------------------------------------------------------
# Galerkin spaces


class ScalarSpace:
    """Unconstrained tensor-product space of per-axis degree `degree`."""

    def __init__(self, box, degree):
        self.box = box
        self.degree = int(degree)
        self._tb = _TensorBasis(
            [_axis_basis(box, a, self.degree, "full") for a in range(box.d)]
        )
        self.dim = self._tb.n

    def eval_matrix(self, points):
        return self._tb.deriv_matrix(points, (0,) * self.box.d)

    def grad_matrix(self, points):
        d = self.box.d
        pts = np.atleast_2d(points)
        out = np.empty((pts.shape[0], d, self.dim))
        for a in range(d):
            orders = tuple(1 if b == a else 0 for b in range(d))
            out[:, a] = self._tb.deriv_matrix(pts, orders)
        return out

    def grad2_matrix(self, points):
        d = self.box.d
        pts = np.atleast_2d(points)
        out = np.empty((pts.shape[0], d, d, self.dim))
        for a in range(d):
            for b in range(a, d):
                orders = tuple((1 if c == a else 0) + (1 if c == b else 0) for c in range(d))
                m = self._tb.deriv_matrix(pts, orders)
                out[:, a, b] = m
                out[:, b, a] = m
        return out


class VelocitySpace:
    """Vector space with v.n = 0 built in on non-periodic faces.

    Component c uses the bubble factor along axis c (vanishing at both
    faces) and full factors along the other axes; periodic axes are
    Fourier and unconstrained.
    """

    def __init__(self, box, degree):
        self.box = box
        self.degree = int(degree)
        d = box.d
        self._tbs = []
        for c in range(d):
            factors = [
                _axis_basis(box, a, self.degree, "bubble" if a == c else "full")
                for a in range(d)
            ]
            self._tbs.append(_TensorBasis(factors))
        self.comp_dims = tuple(tb.n for tb in self._tbs)
        self.offsets = tuple(np.cumsum((0,) + self.comp_dims))
        self.dim = int(sum(self.comp_dims))

    def _per_component(self, points, fill):
        pts = np.atleast_2d(points)
        d = self.box.d
        out = None
        for c, tb in enumerate(self._tbs):
            block = fill(tb, pts)
            if out is None:
                out = np.zeros((pts.shape[0], d) + block.shape[1:-1] + (self.dim,))
            out[:, c, ..., self.offsets[c] : self.offsets[c + 1]] = block
        return out

    def eval_matrix(self, points):
        """(M, d, dim): values of each basis field's components."""
        d = self.box.d
        return self._per_component(
            points, lambda tb, p: tb.deriv_matrix(p, (0,) * d)
        )

    def grad_matrix(self, points):
        """(M, d, d, dim): entry [m, i, j, J] = d v_i / d x_j of basis J."""
        d = self.box.d

        def fill(tb, pts):
            out = np.empty((pts.shape[0], d, tb.n))
            for a in range(d):
                orders = tuple(1 if b == a else 0 for b in range(d))
                out[:, a] = tb.deriv_matrix(pts, orders)
            return out

        return self._per_component(points, fill)

    def grad2_matrix(self, points):
        """(M, d, d, d, dim): [m, i, j, k, J] = d^2 v_i / dx_j dx_k."""
        d = self.box.d

        def fill(tb, pts):
            out = np.empty((pts.shape[0], d, d, tb.n))
            for a in range(d):
                for b in range(a, d):
                    orders = tuple(
                        (1 if c == a else 0) + (1 if c == b else 0) for c in range(d)
                    )
                    m = tb.deriv_matrix(pts, orders)
                    out[:, a, b] = m
                    out[:, b, a] = m
            return out

        return self._per_component(points, fill)


# ---------------------------------------------------------------------------
# field evaluation (coefficients -> point values)


def _check_coeffs(space, coeffs):
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape != (space.dim,):
        raise DimensionMismatch(
            f"coefficient vector of length {coeffs.shape} does not match "
            f"space dimension {space.dim}"
        )
    return coeffs


def eval_field(space, coeffs, points):
    coeffs = _check_coeffs(space, coeffs)
    return space.eval_matrix(points) @ coeffs


def grad_field(space, coeffs, points):
    coeffs = _check_coeffs(space, coeffs)
    return space.grad_matrix(points) @ coeffs


def grad2_field(space, coeffs, points):
    coeffs = _check_coeffs(space, coeffs)
    return space.grad2_matrix(points) @ coeffs


# ---------------------------------------------------------------------------
# boundary quadrature


@dataclass
class BoundaryQuad:
    points: np.ndarray  # (M, d)
    weights: np.ndarray  # (M,)
    normals: np.ndarray  # (M, d)
    face: np.ndarray  # (M,) index 2*axis + (0 lower | 1 upper)

    @property
    def n(self):
        return self.points.shape[0]


def boundary_quadrature(box, npts_per_axis):
    """Gauss quadrature on each non-periodic face of the box."""
    if np.isscalar(npts_per_axis):
        npts_per_axis = (int(npts_per_axis),) * box.d
    d = box.d
    solid = [a for a in range(d) if not box.periodic[a]]
    if not solid:
        raise AllPeriodic("box has no boundary: every axis is periodic")
    pts, wts, nrm, fid = [], [], [], []
    for a in solid:
        others = [b for b in range(d) if b != a]
        if others:
            axq = [_AxisQuad(box, b, npts_per_axis[b]) for b in others]
            grids = np.meshgrid(*[q.points for q in axq], indexing="ij")
            coords = [g.reshape(-1) for g in grids]
            wg = np.meshgrid(*[q.weights for q in axq], indexing="ij")
            w = np.prod(np.stack(wg), axis=0).reshape(-1)
        else:
            coords, w = [], np.ones(1)
        m = w.size
        for side, xval in ((0, box.lower[a]), (1, box.upper[a])):
            p = np.empty((m, d))
            p[:, a] = xval
            for b, cb in zip(others, coords):
                p[:, b] = cb
            pts.append(p)
            wts.append(w)
            normal = np.zeros(d)
            normal[a] = -1.0 if side == 0 else 1.0
            nrm.append(np.tile(normal, (m, 1)))
            fid.append(np.full(m, 2 * a + side, dtype=int))
    return BoundaryQuad(
        np.concatenate(pts),
        np.concatenate(wts),
        np.concatenate(nrm),
        np.concatenate(fid),
    )


# ---------------------------------------------------------------------------
# projections and embeddings


def _gram(space, quad):
    B = space.eval_matrix(quad.points)
    if B.ndim == 3:  # velocity: contract the component axis
        return np.einsum("q,qcJ,qcK->JK", quad.weights, B, B)
    return np.einsum("q,qJ,qK->JK", quad.weights, B, B)


def project_scalar(space, quad, values):
    """L2 projection of nodal values onto the scalar space."""
    B = space.eval_matrix(quad.points)
    rhs = np.einsum("q,qJ,q->J", quad.weights, B, np.asarray(values, dtype=float))
    return np.linalg.solve(_gram(space, quad), rhs)


def project_impenetrable(space, quad, values):
    """L2 projection of nodal velocity samples onto the constrained space.

    The result satisfies v.n = 0 at the boundary by construction; any
    normal component of the input is discarded in the least-squares sense.
    """
    B = space.eval_matrix(quad.points)
    rhs = np.einsum("q,qcJ,qc->J", quad.weights, B, np.asarray(values, dtype=float))
    return np.linalg.solve(_gram(space, quad), rhs)


def _axis_index_maps(space):
    if isinstance(space, VelocitySpace):
        return [tb.dims for tb in space._tbs]
    return [space._tb.dims]


def embed_coeffs(space_small, space_big, coeffs):
    """Embed coefficients of a lower-degree space into a higher-degree one
    (identical basis functions, zero-padded per axis)."""
    coeffs = _check_coeffs(space_small, coeffs)
    out = np.zeros(space_big.dim)
    small_blocks = _axis_index_maps(space_small)
    big_blocks = _axis_index_maps(space_big)
    if len(small_blocks) != len(big_blocks):
        raise DimensionMismatch("spaces have different component structure")
    ofs_s = getattr(space_small, "offsets", (0, space_small.dim))
    ofs_b = getattr(space_big, "offsets", (0, space_big.dim))
    for c, (ds, db) in enumerate(zip(small_blocks, big_blocks)):
        if any(s > b for s, b in zip(ds, db)):
            raise DimensionMismatch("target space is not a superset")
        block = coeffs[ofs_s[c] : ofs_s[c + 1]].reshape(ds)
        padded = np.zeros(db)
        padded[tuple(slice(0, s) for s in ds)] = block
        out[ofs_b[c] : ofs_b[c + 1]] = padded.reshape(-1)
    return out
