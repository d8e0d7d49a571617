"""Vertex enumeration of an outer-approximation polytope under incremental cuts.

The polytope ``{x in R^r : A x <= b}`` starts as an axis-aligned box and is
refined one halfspace at a time.  The complete vertex list is maintained
together with

* ``incidence``: one bitset per vertex (rows of ``uint64`` words) marking the
  constraints that are tight at that vertex;
* ``edges``: the adjacency relation as an ``(n_edges, 2)`` index array.

When a cut removes vertices, the replacement vertices lie on the edges that
join a removed vertex to a surviving one.  Edges inside the new facet are
recovered from the incidence bitsets: two facet vertices are adjacent when they
share at least ``r - 1`` tight constraints and, for degenerate vertex sets, no
third facet vertex is tight on all of the shared constraints.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

WORD_BITS = 64
DEFAULT_R_CAP = 10
DEFAULT_VERTEX_CAP = 5_000_000

# dead slots tolerated before add_cut compacts storage
_COMPACT_SLACK = 4096
_EDGE_DTYPE = np.int32  # vertex ids; caps stay far below 2**31


class CoverExploded(RuntimeError):
    """The vertex count passed the configured cap."""


class InfeasibleCover(RuntimeError):
    """A cut removed every vertex; the cut or the tolerances are invalid."""


@dataclass(frozen=True)
class HalfspaceCut:
    """``<Z, W> + alpha * w <= beta`` in the packed ``(w, W)`` space."""

    Z: np.ndarray
    alpha: float
    beta: float

    @property
    def normal(self) -> np.ndarray:
        return np.concatenate(([self.alpha], np.asarray(self.Z, dtype=float).ravel()))

    @classmethod
    def from_normal(cls, a, beta: float, shape: tuple[int, int] | None = None) -> "HalfspaceCut":
        a = np.asarray(a, dtype=float)
        Z = a[1:] if shape is None else a[1:].reshape(shape)
        return cls(Z=Z, alpha=float(a[0]), beta=float(beta))


@dataclass(frozen=True)
class CutReport:
    n_removed: int
    n_added: int
    n_tight: int
    binding: bool


def _bit(k: int) -> tuple[int, np.uint64]:
    return k // WORD_BITS, np.uint64(1) << np.uint64(k % WORD_BITS)


def popcount_rows(words: np.ndarray) -> np.ndarray:
    return np.bitwise_count(words).sum(axis=-1, dtype=np.int64)


def bits_to_indices(row: np.ndarray) -> list[int]:
    bits = np.unpackbits(row.view(np.uint8), bitorder="little")
    return np.flatnonzero(bits).tolist()


class PolytopeCover:
    """Vertex description of the current outer approximation.

    Build one with :func:`init_box`.  Mutation happens only through
    :func:`add_cut`.

    Storage is slot based: cut-off vertices and edges are only flagged dead
    and new ones are appended, and the arrays are compacted once dead slots
    dominate.  The public views ``E``, ``inc`` and ``edges`` compact first,
    so outside this module vertex indices are always dense and in creation
    order.
    """

    def __init__(self, r: int, *, tol_eq: float = 1e-11, tol_feas: float = 1e-11,
                 tol_merge: float = 1e-12, vertex_cap: int = DEFAULT_VERTEX_CAP):
        self.r = int(r)
        self.tol_eq = tol_eq
        self.tol_feas = tol_feas
        self.tol_merge = tol_merge
        self.vertex_cap = int(vertex_cap)
        self._A = np.zeros((0, r))
        self._m = 0
        self._b = np.zeros(0)
        self.binding: list[bool] = []
        self.scale = np.ones(r)
        self._objective = None
        self._set_storage(np.zeros((0, r)), np.zeros((0, 1), dtype=np.uint64), np.zeros((0, 2), dtype=np.intp))

    def _set_storage(self, E, inc, edges) -> None:
        self._E = np.ascontiguousarray(E, dtype=float)
        self._inc = np.ascontiguousarray(inc, dtype=np.uint64)
        self._alive = np.ones(len(E), dtype=bool)
        self._hi = self._nalive = len(E)
        self._edges = np.ascontiguousarray(edges, dtype=_EDGE_DTYPE).reshape(-1, 2)
        self._ealive = np.ones(len(self._edges), dtype=bool)
        self._ehi = self._nedges = len(self._edges)
        self._fv = None
        if self._objective is not None:
            self.set_objective(self._objective)

    # -- read-only views --------------------------------------------------
    @property
    def nv(self) -> int:
        return self._nalive

    @property
    def n_edges(self) -> int:
        return self._nedges

    @property
    def m(self) -> int:
        return self._m

    @property
    def A(self) -> np.ndarray:
        return self._A[:self._m]

    @property
    def b(self) -> np.ndarray:
        return self._b[:self._m]

    @property
    def E(self) -> np.ndarray:
        self._compact()
        return self._E[:self._hi]

    @property
    def inc(self) -> np.ndarray:
        self._compact()
        return self._inc[:self._hi]

    @property
    def edges(self) -> np.ndarray:
        self._compact()
        return self._edges[:self._ehi]

    @property
    def vertices(self) -> np.ndarray:
        return self.E

    def tight_counts(self) -> np.ndarray:
        return popcount_rows(self.inc)

    def incidence(self, i: int) -> list[int]:
        return bits_to_indices(self.inc[i])

    def degree(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.nv)

    def adjacency_pairs(self) -> set[tuple[int, int]]:
        e = np.sort(self.edges, axis=1)
        return set(map(tuple, e.tolist()))

    def to_dict(self) -> dict:
        """Diagnostic snapshot (vertices, tight-constraint cardinalities, counts)."""
        return {
            "r": self.r,
            "n_constraints": self.m,
            "n_binding": int(sum(self.binding)),
            "n_vertices": self.nv,
            "n_edges": self.n_edges,
            "vertices": self.E.tolist(),
            "tight_counts": self.tight_counts().tolist(),
        }

    def dump_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh)

    # -- internals -----------------------------------------------------------
    def _tol(self, factor: float, b) -> np.ndarray:
        return factor * (1.0 + np.abs(b))

    def _append_constraint(self, a: np.ndarray, beta: float, binding: bool) -> int:
        k = self._m
        if k == len(self._b):
            cap = max(16, 2 * k)
            self._A = np.concatenate([self._A[:k], np.zeros((cap - k, self.r))])
            self._b = np.concatenate([self._b[:k], np.zeros(cap - k)])
        self._A[k] = a
        self._b[k] = beta
        self._m = k + 1
        self.binding.append(binding)
        words = (k + WORD_BITS) // WORD_BITS
        if words > self._inc.shape[1]:
            grow = max(words, 2 * self._inc.shape[1]) - self._inc.shape[1]
            self._inc = np.hstack([self._inc, np.zeros((len(self._inc), grow), dtype=np.uint64)])
        return k

    def _reserve(self, n_vertices: int, n_edges: int) -> None:
        """Make room for appending ``n_vertices`` slots and ``n_edges`` edges."""
        need = self._hi + n_vertices
        if need > np.iinfo(_EDGE_DTYPE).max:
            raise CoverExploded(f"{need} vertex slots exceed the edge index range")
        if need > len(self._E):
            cap = max(need, 2 * len(self._E), 64)
            self._E = _grow(self._E, self._hi, cap)
            self._inc = _grow(self._inc, self._hi, cap)
            self._alive = _grow(self._alive, self._hi, cap)
            if self._fv is not None:
                self._fv = _grow(self._fv, self._hi, cap, fill=np.inf)
        need = self._ehi + n_edges
        if need > len(self._edges):
            cap = max(need, 2 * len(self._edges), 64)
            self._edges = _grow(self._edges, self._ehi, cap)
            self._ealive = _grow(self._ealive, self._ehi, cap)

    def _compact(self, force: bool = True) -> None:
        hi, ehi = self._hi, self._ehi
        if hi > self._nalive and (force or hi > 2 * self._nalive + _COMPACT_SLACK):
            keep = self._alive[:hi]
            remap = np.cumsum(keep) - 1
            self._E = self._E[:hi][keep]
            self._inc = self._inc[:hi][keep]
            if self._fv is not None:
                self._fv = self._fv[:hi][keep]
            self._alive = np.ones(self._nalive, dtype=bool)
            self._hi = self._nalive
            live = self._ealive[:ehi]
            self._edges = remap[self._edges[:ehi][live]].astype(_EDGE_DTYPE)
            self._ealive = np.ones(len(self._edges), dtype=bool)
            self._ehi = self._nedges = len(self._edges)
        elif ehi > self._nedges and (force or ehi > 2 * self._nedges + _COMPACT_SLACK):
            live = self._ealive[:ehi]
            self._edges = self._edges[:ehi][live]
            self._ealive = np.ones(len(self._edges), dtype=bool)
            self._ehi = self._nedges = len(self._edges)

    def _evaluate(self, pts: np.ndarray) -> np.ndarray:
        return np.asarray(self._objective(pts), dtype=float).reshape(-1)

    def set_objective(self, f) -> None:
        self._objective = f
        fv = np.full(len(self._E), np.inf)
        live = np.flatnonzero(self._alive[:self._hi])
        if live.size:
            fv[live] = self._evaluate(self._E[live])
        self._fv = fv


def _grow(arr: np.ndarray, used: int, cap: int, fill=0) -> np.ndarray:
    out = np.full((cap,) + arr.shape[1:], fill, dtype=arr.dtype)
    out[:used] = arr[:used]
    return out


def init_box(lo, hi, *, tol_box: float = 1e-6, r_cap: int = DEFAULT_R_CAP, **kw) -> PolytopeCover:
    """Axis-aligned box ``lo <= x <= hi`` with its ``2^r`` corners.

    Constraint ``2k`` is ``-x_k <= -lo_k`` and ``2k+1`` is ``x_k <= hi_k``.
    Zero or near-zero widths are widened by ``tol_box * (1 + |bound|)``.
    """
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    if lo.shape != hi.shape or lo.ndim != 1:
        raise ValueError("lo and hi must be vectors of equal length")
    r = lo.size
    if r > r_cap:
        raise ValueError(f"r={r} exceeds the cap of {r_cap} (2^r box corners)")
    if np.any(hi < lo):
        raise ValueError("box has hi < lo")
    pad = tol_box * (1.0 + np.maximum(np.abs(lo), np.abs(hi)))
    thin = (hi - lo) <= pad
    lo[thin] -= pad[thin]
    hi[thin] += pad[thin]

    cover = PolytopeCover(r, **kw)
    if 2 ** r > cover.vertex_cap:
        raise CoverExploded(f"box with r={r} has more corners than the vertex cap")
    eye = np.eye(r)
    A = np.empty((2 * r, r))
    A[0::2] = -eye
    A[1::2] = eye
    b = np.empty(2 * r)
    b[0::2] = -lo
    b[1::2] = hi
    cover._A, cover._b, cover._m = A, b, 2 * r
    cover.binding = [True] * (2 * r)

    corners = np.arange(2 ** r)
    upper = (corners[:, None] >> np.arange(r)[None, :]) & 1
    E = np.where(upper == 1, hi[None, :], lo[None, :])
    inc = np.zeros((corners.size, (2 * r + WORD_BITS - 1) // WORD_BITS), dtype=np.uint64)
    for k in range(r):
        tight_idx = 2 * k + upper[:, k]
        np.bitwise_or.at(inc, (np.arange(corners.size), tight_idx // WORD_BITS),
                         np.uint64(1) << (tight_idx % WORD_BITS).astype(np.uint64))
    edges = []
    for k in range(r):
        low_side = corners[upper[:, k] == 0]
        edges.append(np.stack([low_side, low_side | (1 << k)], axis=1))
    cover._set_storage(E, inc, np.concatenate(edges).astype(np.intp))
    cover.scale = hi - lo
    return cover


def _shared_counts(inc_a: np.ndarray, inc_b: np.ndarray) -> np.ndarray:
    return np.bitwise_count(inc_a[:, None, :] & inc_b[None, :, :]).sum(axis=-1, dtype=np.int64)


def _drop_one_bit(rows: np.ndarray, n_bits: int) -> list[np.ndarray]:
    """For rows with exactly ``n_bits`` set bits, the copies with each bit cleared in turn."""
    rest = rows.copy()
    at = np.arange(len(rows))
    out = []
    for _ in range(n_bits):
        word = np.argmax(rest != 0, axis=1)
        x = rest[at, word]
        low = x & (~x + np.uint64(1))
        rest[at, word] ^= low
        key = rows.copy()
        key[at, word] ^= low
        out.append(key)
    return out


def _subset_rows(ids, size: int, n_words: int) -> np.ndarray:
    """Bitset rows of all ``size``-subsets of the constraint indices ``ids``."""
    subsets = list(itertools.combinations(ids, size))
    combos = np.array(subsets, dtype=np.int64).reshape(len(subsets), size)
    rows = np.zeros((len(combos), n_words), dtype=np.uint64)
    at = np.arange(len(combos))
    for col in combos.T:
        np.bitwise_or.at(rows, (at, col // WORD_BITS), np.left_shift(np.uint64(1), (col % WORD_BITS).astype(np.uint64)))
    return rows


def _group_keys(keys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sort order of key rows and the start offset of each run of equal keys."""
    # sort on a 64-bit FNV-style row hash; fall back to lexsort on a collision
    h = np.full(len(keys), 0xCBF29CE484222325, dtype=np.uint64)
    with np.errstate(over="ignore"):
        for col in keys.T:
            h = (h ^ col) * np.uint64(0x100000001B3)
    order = np.argsort(h, kind="stable")
    ks = keys[order]
    change = np.any(ks[1:] != ks[:-1], axis=1)
    hs = h[order]
    if np.any(change & (hs[1:] == hs[:-1])):
        order = np.lexsort(keys.T[::-1])
        ks = keys[order]
        change = np.any(ks[1:] != ks[:-1], axis=1)
    starts = np.concatenate(([0], np.flatnonzero(change) + 1))
    return order, starts


def _facet_edges(inc_f: np.ndarray, r: int, new_bit: int) -> np.ndarray:
    """Adjacent pairs ``(u, v)``, ``u < v``, among vertices of the newest facet.

    Two facet vertices are adjacent when they share ``r - 2`` old tight
    constraints besides ``new_bit``, and no third facet vertex is tight on
    everything they share.  Candidates are found by grouping vertices on each
    ``(r - 2)``-subset of their old tight constraints.
    """
    k = inc_f.shape[0]
    if k < 2:
        return np.zeros((0, 2), dtype=np.intp)
    word, mask = _bit(new_bit)
    old = inc_f.copy()
    old[:, word] &= ~mask
    counts = popcount_rows(old)
    simple = np.flatnonzero(counts == r - 1)
    other = np.flatnonzero(counts != r - 1)

    owners, keys = [], []
    if simple.size:
        for key in _drop_one_bit(old[simple], r - 1):
            keys.append(key)
            owners.append(simple)
    fallback = []
    for v in other:
        ids = bits_to_indices(old[v])
        if len(ids) < r - 2:
            continue
        if _n_choose(len(ids), r - 2) > _MAX_SUBSETS:
            fallback.append(v)
            continue
        combos = _subset_rows(ids, r - 2, old.shape[1])
        keys.append(combos)
        owners.append(np.full(len(combos), v))

    pairs = []
    checked = []
    if keys:
        keys_a = np.concatenate(keys)
        owners_a = np.concatenate(owners)
        order, starts = _group_keys(keys_a)
        sizes = np.diff(np.append(starts, len(order)))
        own_sorted = owners_a[order]
        two = starts[sizes == 2]
        if two.size:
            u, v = own_sorted[two], own_sorted[two + 1]
            both_simple = (counts[u] == r - 1) & (counts[v] == r - 1)
            pairs.append(np.stack([u[both_simple], v[both_simple]], axis=1))
            checked.extend(own_sorted[[s, s + 1]] for s in two[~both_simple])
        for s, size in zip(starts[sizes > 2], sizes[sizes > 2]):
            checked.append(own_sorted[s:s + size])
    # vertices with too many subsets to enumerate may cover any candidate pair
    checked = [np.concatenate([g, fallback]) for g in checked] if fallback else checked
    for grp in checked:
        pairs.append(_containment_pairs(inc_f, np.unique(grp), r))
    for v in fallback:
        shared = _shared_counts(old[v:v + 1], old)[0]
        grp = np.union1d(np.flatnonzero(shared >= r - 2), [v])
        pairs.append(_containment_pairs(inc_f, grp, r, anchor=v))
    if not pairs:
        return np.zeros((0, 2), dtype=np.intp)
    out = np.concatenate(pairs).astype(np.intp)
    if len(out) == 0:
        return out.reshape(0, 2)
    out = np.sort(out, axis=1)
    codes = np.unique(out[:, 0].astype(np.int64) * k + out[:, 1])
    return np.stack([codes // k, codes % k], axis=1).astype(np.intp)


_MAX_SUBSETS = 4096


def _n_choose(n: int, k: int) -> int:
    return math.comb(n, k)


def _containment_pairs(inc_f: np.ndarray, grp: np.ndarray, r: int, anchor: int | None = None) -> np.ndarray:
    """Adjacent pairs inside a candidate group, by the combinatorial test.

    With ``anchor`` only pairs containing that vertex are tested.
    """
    if grp.size < 2:
        return np.zeros((0, 2), dtype=np.intp)
    g = inc_f[grp]
    if anchor is None:
        u, v = np.triu_indices(grp.size, 1)
    else:
        pos = int(np.searchsorted(grp, anchor))
        v = np.delete(np.arange(grp.size), pos)
        u = np.full(v.size, pos)
    S = g[u] & g[v]
    enough = popcount_rows(S) >= r - 1
    u, v, S = u[enough], v[enough], S[enough]
    covers = np.all((g[None, :, :] & S[:, None, :]) == S[:, None, :], axis=-1)
    covers[np.arange(u.size), u] = False
    covers[np.arange(u.size), v] = False
    keep = ~covers.any(axis=1)
    return np.stack([grp[u[keep]], grp[v[keep]]], axis=1)


def _merge_close(P: np.ndarray, scale: np.ndarray, tol: float) -> np.ndarray:
    """Representative index for points within ``tol`` (max-norm, box units) of a neighbour.

    Neighbours are taken in the order of the first scaled coordinate, which
    is sufficient for the sub-1e-10 coincidences this guards against.
    """
    rep = np.arange(len(P))
    if len(P) < 2:
        return rep
    Q = P / scale
    order = np.argsort(Q[:, 0], kind="stable")
    close = np.max(np.abs(Q[order[1:]] - Q[order[:-1]]), axis=1) <= tol
    for i in np.flatnonzero(close):
        a, b = order[i], order[i + 1]
        ra, rb = rep[a], rep[b]
        lo = min(ra, rb)
        rep[rep == max(ra, rb)] = lo
    return rep


def add_cut(cover: PolytopeCover, cut) -> CutReport:
    """Intersect the cover with ``a^T x <= beta`` and update vertices in place.

    ``cut`` is a :class:`HalfspaceCut` or a ``(normal, beta)`` pair.
    """
    if isinstance(cut, HalfspaceCut):
        a, beta = cut.normal, cut.beta
    else:
        a, beta = np.asarray(cut[0], dtype=float), float(cut[1])
    if a.shape != (cover.r,):
        raise ValueError(f"cut normal has shape {a.shape}, expected ({cover.r},)")
    if not np.any(a) or not np.all(np.isfinite(a)) or not np.isfinite(beta):
        raise ValueError("cut normal must be finite and nonzero")

    hi = cover._hi
    E, alive = cover._E[:hi], cover._alive[:hi]
    s = E @ a - beta
    viol = alive & (s > cover._tol(cover.tol_feas, beta))
    tight = alive & ~viol & (np.abs(s) <= cover._tol(cover.tol_eq, beta))
    n_viol = int(np.count_nonzero(viol))
    if n_viol == cover.nv:
        raise InfeasibleCover("cut removes every vertex of the cover")
    k = cover._append_constraint(a, beta, binding=n_viol > 0)
    word, mask = _bit(k)
    inc = cover._inc
    if not n_viol:
        inc[np.flatnonzero(tight), word] |= mask
        return CutReport(0, 0, int(np.count_nonzero(tight)), False)

    ehi = cover._ehi
    edges, ealive = cover._edges[:ehi], cover._ealive[:ehi]
    v0, v1 = viol[edges[:, 0]], viol[edges[:, 1]]
    touched = (v0 | v1) & ealive
    cross = touched & (v0 != v1)
    ce = edges[cross]
    first_bad = v0[cross]
    bad = np.where(first_bad, ce[:, 0], ce[:, 1])
    good = np.where(first_bad, ce[:, 1], ce[:, 0])
    # an edge ending at a tight vertex is cut exactly at that vertex
    sel = ~tight[good]
    bad, good = bad[sel], good[sel]

    lam = s[bad] / (s[bad] - s[good])
    P = E[bad] + lam[:, None] * (E[good] - E[bad])
    Pinc = inc[bad] & inc[good]
    Pinc[:, word] |= mask

    # points numerically on top of their surviving parent collapse onto it;
    # the remaining near-coincident points are merged into one vertex
    idx = np.arange(len(P))
    rep = idx.copy()
    near = np.zeros(len(P), dtype=bool)
    if len(P):
        near = np.max(np.abs(P - E[good]) / cover.scale, axis=1) <= cover.tol_merge
        tight[good[near]] = True
        rest = np.flatnonzero(~near)
        rep[rest] = rest[_merge_close(P[rest], cover.scale, cover.tol_merge)]
    merged = rep != idx
    if merged.any():
        np.bitwise_or.at(Pinc, rep[merged], Pinc[merged])
    tight_ids = np.flatnonzero(tight)
    inc[tight_ids, word] |= mask

    live = ~near & ~merged
    n_new = int(np.count_nonzero(live))
    new_id = np.full(len(P), -1, dtype=np.intp)
    new_id[live] = hi + np.arange(n_new)
    new_id[merged] = new_id[rep[merged]]
    parent_edges = np.stack([good, new_id], axis=1)[new_id >= 0]

    facet = np.concatenate([tight_ids, hi + np.arange(n_new)])
    inc_f = np.concatenate([inc[tight_ids], Pinc[live]])
    fpairs = facet[_facet_edges(inc_f, cover.r, k)]
    fresh = _unique_edges_keep_order(np.concatenate([parent_edges, fpairs]), hi + n_new)
    both_old = fresh[:, 1] < hi
    if both_old.any():
        # facet pairs between two formerly tight vertices may already be edges
        nv = hi + n_new
        on_facet = np.zeros(hi, dtype=bool)
        on_facet[tight_ids] = True
        known_mask = ealive & ~touched & on_facet[edges[:, 0]] & on_facet[edges[:, 1]]
        known = np.sort(edges[known_mask], axis=1).astype(np.int64)
        dup = np.zeros(len(fresh), dtype=bool)
        dup[both_old] = np.isin(fresh[both_old, 0] * nv + fresh[both_old, 1],
                                known[:, 0] * nv + known[:, 1])
        fresh = fresh[~dup]

    # retire cut-off vertices and their edges, then append the new ones
    cover._alive[:hi][viol] = False
    ealive[touched] = False
    cover._nedges -= int(np.count_nonzero(touched))
    cover._nalive -= n_viol
    if cover._fv is not None:
        cover._fv[:hi][viol] = np.inf
    cover._reserve(n_new, len(fresh))
    cover._E[hi:hi + n_new] = P[live]
    cover._inc[hi:hi + n_new] = Pinc[live]
    cover._alive[hi:hi + n_new] = True
    if cover._fv is not None and n_new:
        cover._fv[hi:hi + n_new] = cover._evaluate(P[live])
    cover._hi = hi + n_new
    cover._nalive += n_new
    ehi = cover._ehi
    cover._edges[ehi:ehi + len(fresh)] = fresh
    cover._ealive[ehi:ehi + len(fresh)] = True
    cover._ehi = ehi + len(fresh)
    cover._nedges += len(fresh)
    cover._compact(force=False)

    if cover.nv > cover.vertex_cap:
        raise CoverExploded(f"cover has {cover.nv} vertices (> cap {cover.vertex_cap}); "
                            "rerun with a larger tolerance")
    return CutReport(n_viol, n_new, len(tight_ids), True)


def _unique_edges_keep_order(edges: np.ndarray, nv: int) -> np.ndarray:
    if len(edges) == 0:
        return edges.reshape(0, 2)
    e = np.sort(edges.astype(np.intp), axis=1)
    e = e[e[:, 0] != e[:, 1]]
    keys = e[:, 0].astype(np.int64) * nv + e[:, 1]
    _, first = np.unique(keys, return_index=True)
    return e[np.sort(first)]


def min_concave_vertex(cover: PolytopeCover, f) -> tuple[int, np.ndarray, float]:
    """Vertex minimising ``f`` (vectorised over rows); lowest index wins ties.

    Values are cached on the cover and extended as vertices are added, so
    repeated queries with the same ``f`` cost one ``argmin``.
    """
    if cover.nv == 0:
        raise ValueError("cover has no vertices")
    if cover._objective is not f or cover._fv is None:
        cover.set_objective(f)
    slot = int(np.argmin(cover._fv[:cover._hi]))
    # slots keep creation order, so the dense index is the live count before it
    i = int(np.count_nonzero(cover._alive[:slot]))
    return i, cover._E[slot].copy(), float(cover._fv[slot])
