"""Singular and near-singular Nyström quadrature on parametric patches.

For a target x and a source patch the engine returns one weight per patch
node such that sum_j W_j f_j approximates the integral of k(x, y) f(y) over
the patch, with f the patch interpolant of the nodal values.

* far pairs use the nodal rule directly;
* near pairs refine the parameter box adaptively (anisotropic quadtree) and
  map leaf rules back to the nodes through the interpolation matrices;
* a target lying on the patch is handled in polar coordinates about its
  parameter point inside a locally square box: the box is cut into right
  triangles at the feet of the perpendiculars and the angular variable is
  replaced by asinh(tau/h), which makes the integrand smooth even for thin
  triangles. The rest of the patch goes through the adaptive rule.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..numerics import gauss_legendre
from .kernels import kernel_values

__all__ = ["QuadOptions", "TargetSet", "assemble_kernels"]


@dataclass(frozen=True)
class QuadOptions:
    near_factor: float = 0.5
    leaf_eta: float = 1.0
    leaf_order: int = 6
    polar_radial: int = 8
    polar_angular: int = 8
    max_depth: int = 16
    block_rows: int = 512
    leaf_chunk: int = 3000


@dataclass
class TargetSet:
    points: np.ndarray
    normals: np.ndarray | None = None
    patch: np.ndarray | None = None  # source patch containing the target, -1 if none
    params: np.ndarray | None = None

    @property
    def n(self) -> int:
        return len(self.points)


def _patch_bounds(patch, m: int = 5):
    s0, s1, t0, t1 = patch.box
    s = np.linspace(s0, s1, m)
    t = np.linspace(t0, t1, m)
    ss, tt = np.meshgrid(s, t, indexing="ij")
    X, _, _ = patch.chart.eval(ss.ravel(), tt.ravel())
    c = X.mean(axis=0)
    R = float(np.max(np.linalg.norm(X - c, axis=1)))
    diam = float(np.max(np.linalg.norm(X[:, None] - X[None, :], axis=-1)))
    return c, R, diam


def _eval_block(kinds, kappa, x, nx, y, ny, w):
    vals = kernel_values(kinds, kappa, x[:, None, :], y[None, :, :],
                         None if nx is None else nx[:, None, :], ny[None, :, :])
    return {k: v * w[None, :] for k, v in vals.items()}


class _Accumulator:
    """Per-patch rows of replacement weights, one array per kernel kind."""

    def __init__(self, kinds, n_rows, n_nodes):
        self.w = {k: np.zeros((n_rows, n_nodes), complex) for k in kinds}

    def add(self, rows, contrib):
        for k, c in contrib.items():
            np.add.at(self.w[k], rows, c)


def _leaf_contrib(patch, kinds, kappa, x, nx, boxes, q):
    """Tensor q x q Gauss rule on each box, interpolated back to patch nodes.

    Geometry and interpolation factors depend only on the box, so they are
    computed once per distinct box; the tensor structure keeps the mapping to
    nodes as Ls^T K Lt with Ls (q, ns) and Lt (q, nt).
    """
    g, gw = gauss_legendre(q)
    ub, inv = np.unique(boxes, axis=0, return_inverse=True)
    inv = inv.ravel()
    s0, s1, t0, t1 = ub.T
    hs, ht = 0.5 * (s1 - s0), 0.5 * (t1 - t0)
    s = (0.5 * (s0 + s1))[:, None] + hs[:, None] * g[None, :]
    t = (0.5 * (t0 + t1))[:, None] + ht[:, None] * g[None, :]
    S = np.repeat(s, q, axis=1)
    T = np.tile(t, (1, q))
    W = np.outer(gw, gw).ravel()[None, :] * (hs * ht)[:, None]
    Y, nu, J = patch.geometry(S, T)
    WJ = W * J
    Ls = patch.rs.interp(s)
    Lt = patch.rt.interp(t)
    vals = kernel_values(kinds, kappa, x[:, None, :], Y[inv], None if nx is None else nx[:, None, :], nu[inv])
    n = len(boxes)
    out = {}
    for k, v in vals.items():
        kw = (v * WJ[inv]).reshape(n, q, q)
        out[k] = np.matmul(np.matmul(Ls[inv].transpose(0, 2, 1), kw), Lt[inv]).reshape(n, -1)
    return out


def _box_samples(patch, boxes):
    ub, inv = np.unique(boxes, axis=0, return_inverse=True)
    X, Ls, Lt = _box_samples_unique(patch, ub)
    inv = inv.ravel()
    return X[inv], Ls[inv], Lt[inv]


def _box_samples_unique(patch, boxes):
    s0, s1, t0, t1 = boxes.T
    fr = np.array([0.0, 0.5, 1.0])
    s = s0[:, None] + (s1 - s0)[:, None] * fr[None, :]
    t = t0[:, None] + (t1 - t0)[:, None] * fr[None, :]
    S = np.repeat(s, 3, axis=1)
    T = np.tile(t, (1, 3))
    X, Xs, Xt = patch.chart.eval(S, T)
    Ls = np.linalg.norm(Xs[:, 4], axis=-1) * (s1 - s0)
    Lt = np.linalg.norm(Xt[:, 4], axis=-1) * (t1 - t0)
    return X, Ls, Lt


def _adaptive(patch, kinds, kappa, x, nx, rows, boxes, acc, opts: QuadOptions):
    level = 0
    q = opts.leaf_order
    while len(boxes):
        X, Ls, Lt = _box_samples(patch, boxes)
        h = np.sqrt(Ls**2 + Lt**2)
        dmin = np.min(np.linalg.norm(X - x[:, None, :], axis=-1), axis=1) - 0.25 * h
        ok = (dmin >= opts.leaf_eta * h) | (level >= opts.max_depth)
        idx = np.nonzero(ok)[0]
        for c0 in range(0, len(idx), opts.leaf_chunk):
            sel = idx[c0:c0 + opts.leaf_chunk]
            contrib = _leaf_contrib(patch, kinds, kappa, x[sel], None if nx is None else nx[sel], boxes[sel], q)
            acc.add(rows[sel], contrib)
        bad = ~ok
        if not bad.any():
            break
        b, xb, rb = boxes[bad], x[bad], rows[bad]
        nxb = None if nx is None else nx[bad]
        lsb, ltb = Ls[bad], Lt[bad]
        only_s = lsb > 2.0 * ltb
        only_t = ltb > 2.0 * lsb
        both = ~(only_s | only_t)
        s0, s1, t0, t1 = b.T
        sm, tm = 0.5 * (s0 + s1), 0.5 * (t0 + t1)
        new_b, new_x, new_r, new_n = [], [], [], []

        def push(mask, bx):
            new_b.append(bx[mask])
            new_x.append(xb[mask])
            new_r.append(rb[mask])
            if nxb is not None:
                new_n.append(nxb[mask])

        sp_s = only_s | both
        sp_t = only_t | both
        # children: s-halves x t-halves where split, else the whole range
        for s_lo, s_hi, s_mask in ((s0, np.where(sp_s, sm, s1), np.ones_like(sp_s)),
                                   (sm, s1, sp_s)):
            for t_lo, t_hi, t_mask in ((t0, np.where(sp_t, tm, t1), np.ones_like(sp_t)),
                                       (tm, t1, sp_t)):
                push(s_mask & t_mask, np.stack([s_lo, s_hi, t_lo, t_hi], axis=1))
        boxes = np.concatenate(new_b)
        x = np.concatenate(new_x)
        rows = np.concatenate(new_r)
        nx = None if nxb is None else np.concatenate(new_n)
        level += 1


def _polar_self(patch, kinds, kappa, x, nx, prm, opts: QuadOptions):
    """Local polar integration; returns (weights dict, surrounding boxes)."""
    s0, s1, t0, t1 = patch.box
    per = patch.rt.periodic
    P = t1 - t0
    n_t = len(x)
    ss, tt = prm[:, 0], prm[:, 1]
    hs, ht = patch.metric_scales(ss, tt)
    Es = hs * (s1 - s0)
    Et = ht * (t1 - t0)
    ell = 0.5 * np.minimum(Es, Et)
    sa = np.maximum(s0, ss - ell / hs)
    sb = np.minimum(s1, ss + ell / hs)
    if per:
        ta, tb = tt - ell / ht, tt + ell / ht
    else:
        ta = np.maximum(t0, tt - ell / ht)
        tb = np.minimum(t1, tt + ell / ht)
    sL, sR = hs * (sa - ss), hs * (sb - ss)
    tB, tT = ht * (ta - tt), ht * (tb - tt)
    z = np.zeros(n_t)
    o = np.ones(n_t)
    # (foot_sigma, foot_tau, e_sigma, e_tau, h, leg) for the 8 right triangles
    tri = [
        (sR, z, z, o, sR, tT), (sR, z, z, -o, sR, -tB),
        (sL, z, z, o, -sL, tT), (sL, z, z, -o, -sL, -tB),
        (z, tT, o, z, tT, sR), (z, tT, -o, z, tT, -sL),
        (z, tB, o, z, -tB, sR), (z, tB, -o, z, -tB, -sL),
    ]
    fs, ft, es, et, h, leg = (np.stack(c, axis=1) for c in zip(*tri))  # (n_t, 8)
    gu, wu = gauss_legendre(opts.polar_radial)
    gx, wx = gauss_legendre(opts.polar_angular)
    u = 0.5 * (gu + 1.0)
    wu = 0.5 * wu
    xmax = np.arcsinh(leg / h)  # (n_t, 8)
    xi = 0.5 * xmax[..., None] * (gx + 1.0)  # (n_t, 8, nx)
    wxi = 0.5 * xmax[..., None] * wx
    tau = h[..., None] * np.sinh(xi)
    ps = u[None, None, None, :] * (fs[..., None, None] + tau[..., None] * es[..., None, None])
    pt = u[None, None, None, :] * (ft[..., None, None] + tau[..., None] * et[..., None, None])
    wgt = (u[None, None, None, :] * wu[None, None, None, :]) * (h[..., None, None] ** 2) * (
        np.cosh(xi)[..., None] * wxi[..., None])
    S = (ss[:, None, None, None] + ps / hs[:, None, None, None]).reshape(n_t, -1)
    T = (tt[:, None, None, None] + pt / ht[:, None, None, None]).reshape(n_t, -1)
    wgt = (wgt / (hs * ht)[:, None, None, None]).reshape(n_t, -1)
    Y, nu, J = patch.geometry(S, T)
    vals = kernel_values(kinds, kappa, x[:, None, :], Y, None if nx is None else nx[:, None, :], nu)
    Ls = patch.rs.interp(S)
    Lt = patch.rt.interp(T)
    out = {}
    for k, v in vals.items():
        kw = v * wgt * J
        out[k] = np.matmul((Ls * kw[..., None]).transpose(0, 2, 1), Lt).reshape(n_t, -1)
    # surrounding rectangles
    boxes, owner = [], []
    for i in range(n_t):
        s_iv = [(s0, sa[i]), (sa[i], sb[i]), (sb[i], s1)]
        if per:
            t_iv = [(ta[i], tb[i]), (tb[i], ta[i] + P)]
            centre_t = 0
        else:
            t_iv = [(t0, ta[i]), (ta[i], tb[i]), (tb[i], t1)]
            centre_t = 1
        for a, (sl, sh) in enumerate(s_iv):
            if sh - sl <= 1e-14 * (s1 - s0):
                continue
            for b, (tl, th) in enumerate(t_iv):
                if th - tl <= 1e-14 * P:
                    continue
                if a == 1 and b == centre_t:
                    continue
                boxes.append((sl, sh, tl, th))
                owner.append(i)
    return out, np.array(boxes, float).reshape(-1, 4), np.array(owner, int)


def assemble_kernels(kinds, kappa, source, targets: TargetSet, opts: QuadOptions = QuadOptions()):
    """Dense matrices (targets x source nodes) for each kernel kind."""
    kinds = tuple(kinds)
    M, N = targets.n, source.n
    y, ny, w = source.points, source.normals, source.weights
    x = np.asarray(targets.points, float)
    nx = None if targets.normals is None else np.asarray(targets.normals, float)
    mats = {k: np.empty((M, N), complex) for k in kinds}
    for r0 in range(0, M, opts.block_rows):
        r1 = min(M, r0 + opts.block_rows)
        blk = _eval_block(kinds, kappa, x[r0:r1], None if nx is None else nx[r0:r1], y, ny, w)
        for k in kinds:
            mats[k][r0:r1] = blk[k]
    tpatch = targets.patch if targets.patch is not None else np.full(M, -1)
    for pi, patch in enumerate(source.patches):
        c, R, diam = _patch_bounds(patch)
        dist = np.linalg.norm(x - c, axis=1) - R
        is_self = tpatch == pi
        near = (dist < opts.near_factor * diam) & ~is_self
        idx_near = np.nonzero(near)[0]
        idx_self = np.nonzero(is_self)[0]
        rows_t = np.concatenate([idx_near, idx_self])
        if not len(rows_t):
            continue
        acc = _Accumulator(kinds, len(rows_t), patch.n_nodes)
        box = np.array(patch.box, float)
        items_rows = [np.arange(len(idx_near))]
        items_boxes = [np.broadcast_to(box, (len(idx_near), 4))]
        if len(idx_self):
            xs = x[idx_self]
            nxs = None if nx is None else nx[idx_self]
            polar, sboxes, owner = _polar_self(patch, kinds, kappa, xs, nxs, targets.params[idx_self], opts)
            acc.add(len(idx_near) + np.arange(len(idx_self)), polar)
            items_rows.append(len(idx_near) + owner)
            items_boxes.append(sboxes)
        rows = np.concatenate(items_rows)
        boxes = np.concatenate(items_boxes)
        if len(rows):
            xt = x[rows_t][rows]
            nxt = None if nx is None else nx[rows_t][rows]
            _adaptive(patch, kinds, kappa, xt, nxt, rows, np.ascontiguousarray(boxes), acc, opts)
        sl = patch.node_slice
        for k in kinds:
            mats[k][rows_t, sl] = acc.w[k]
    return mats
