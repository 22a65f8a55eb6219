"""Ground-truth verification of colorings, independent of the structures.

Two families of checks:

* object colorings (rectangles/squares vs. probe points): the probe set is
  the coordinate grid of all object edges plus midpoints between
  consecutive coordinates, so every cell, edge and vertex of the
  axis-parallel arrangement carries a probe.  `check_cf` runs an exact
  sweep over that grid organized by y-slab; `check_cf_probes` /
  `check_unimax_probes` are the direct per-probe versions for small inputs.

* point colorings (points vs. interval or rectangle ranges): canonical
  ranges span all coordinate pairs.  Exhaustive below a size cutoff,
  deterministic random sampling beyond it.

Also hosts the definitional color recomputations: colors evaluated
directly from tree shape with freshly computed heights and summaries, used
to cross-check the incremental assignments.
"""

from __future__ import annotations

import random
from bisect import bisect_left, insort
from dataclasses import dataclass

import numpy as np

from .augtree import AugTree, Node
from .geom import AxisRect, Pt

EXHAUSTIVE_2D_LIMIT = 40      # exhaustive canonical rectangles up to this many points
EXHAUSTIVE_1D_LIMIT = 640     # exhaustive canonical intervals up to this many points
SAMPLED_RANGES = 100_000      # ranges drawn beyond the exhaustive cutoffs


@dataclass
class Witness:
    """A probe (point or range) where the required unique color is missing."""

    probe: object
    colors: list

    def __str__(self) -> str:
        return f"violation at {self.probe}: colors {self.colors}"


# ---------------------------------------------------------------------------
# object colorings: probe points against closed axis-parallel rectangles
# ---------------------------------------------------------------------------

def probe_grid(rects: list[AxisRect]) -> list[Pt]:
    """Coordinates and midpoints in both axes, crossed."""
    if not rects:
        return []
    xs = sorted({r.x1 for r in rects} | {r.x2 for r in rects})
    ys = sorted({r.y1 for r in rects} | {r.y2 for r in rects})
    px = _with_midpoints(xs)
    py = _with_midpoints(ys)
    return [Pt(x, y) for x in px for y in py]


def _with_midpoints(coords: list[float]) -> list[float]:
    out = []
    for a, b in zip(coords, coords[1:]):
        out.append(a)
        out.append((a + b) / 2.0)
    out.append(coords[-1])
    return out


def check_cf_probes(colored: list[tuple[AxisRect, object]],
                    probes: list[Pt] | None = None) -> Witness | None:
    """Direct conflict-free check at every probe.  Quadratic; small inputs."""
    if probes is None:
        probes = probe_grid([r for r, _ in colored])
    for p in probes:
        cover = [c for r, c in colored if r.contains(p)]
        if cover and not _has_singleton(cover):
            return Witness(p, sorted(cover))
    return None


def check_unimax_probes(colored: list[tuple[AxisRect, object]],
                        probes: list[Pt] | None = None) -> Witness | None:
    """Unique-maximum check at every probe.  Quadratic; small inputs."""
    if probes is None:
        probes = probe_grid([r for r, _ in colored])
    for p in probes:
        cover = [c for r, c in colored if r.contains(p)]
        if cover and cover.count(max(cover)) != 1:
            return Witness(p, sorted(cover))
    return None


def _has_singleton(colors: list) -> bool:
    counts: dict = {}
    for c in colors:
        counts[c] = counts.get(c, 0) + 1
    return any(v == 1 for v in counts.values())


def check_cf(colored: list[tuple[AxisRect, object]]) -> Witness | None:
    """Exact conflict-free check over the whole probe grid.

    Equivalent to check_cf_probes on the full grid, but organized as a
    sweep over y-slabs so it stays usable at thousands of objects: rows are
    probe rows (coordinates and gaps), and within a row a single pass over
    the active rectangles' x-events tracks how many colors occur exactly
    once.
    """
    if not colored:
        return None
    xs = sorted({v for r, _ in colored for v in (r.x1, r.x2)})
    ys = sorted({v for r, _ in colored for v in (r.y1, r.y2)})
    xi = {v: i for i, v in enumerate(xs)}
    yi = {v: i for i, v in enumerate(ys)}
    color_code: dict = {}
    for _, c in colored:
        if c not in color_code:
            color_code[c] = len(color_code)

    # per rect: probe-index spans (even = coordinate cell, odd = gap cell)
    n_rows = 2 * len(ys) - 1
    starts: list[list[tuple[int, int, int, int]]] = [[] for _ in range(n_rows)]
    ends: list[list[tuple[int, int, int, int]]] = [[] for _ in range(n_rows)]
    for uid, (r, c) in enumerate(colored):
        item = (2 * xi[r.x1], 2 * xi[r.x2], color_code[c], uid)
        starts[2 * yi[r.y1]].append(item)
        ends[2 * yi[r.y2]].append(item)

    # events kept sorted across rows; (position, delta, code, uid)
    events: list[tuple[int, int, int, int]] = []
    counts = [0] * len(color_code)
    for row in range(n_rows):
        changed = bool(starts[row])
        for px1, px2, code, uid in starts[row]:
            insort(events, (px1, 1, code, uid))
            insort(events, (px2 + 1, -1, code, uid))
        if changed or row == 0 or (row > 0 and ends[row - 1]):
            bad = _sweep_row(events, counts)
            if bad is not None:
                return _make_witness(colored, xs, ys, bad, row)
        for px1, px2, code, uid in ends[row]:
            del events[bisect_left(events, (px1, 1, code, uid))]
            del events[bisect_left(events, (px2 + 1, -1, code, uid))]
    return None


def _sweep_row(events: list[tuple[int, int, int, int]], counts: list[int]) -> int | None:
    """One left-to-right pass; returns the first violating probe column."""
    singles = 0
    covering = 0
    bad = None
    k = 0
    m = len(events)
    while k < m:
        pos = events[k][0]
        while k < m and events[k][0] == pos:
            _, delta, code, _ = events[k]
            c = counts[code]
            if delta > 0:
                if c == 0:
                    singles += 1
                elif c == 1:
                    singles -= 1
                counts[code] = c + 1
                covering += 1
            else:
                if c == 1:
                    singles -= 1
                elif c == 2:
                    singles += 1
                counts[code] = c - 1
                covering -= 1
            k += 1
        if covering > 0 and singles == 0:
            bad = pos
            break
    for _, _, code, _ in events:  # reset touched counters
        counts[code] = 0
    return bad


def _probe_value(coords: list[float], probe_index: int) -> float:
    if probe_index % 2 == 0:
        return coords[probe_index // 2]
    return (coords[probe_index // 2] + coords[probe_index // 2 + 1]) / 2.0


def _make_witness(colored, xs, ys, col_index: int, row: int) -> Witness:
    p = Pt(_probe_value(xs, col_index), _probe_value(ys, row))
    cover = sorted(c for r, c in colored if r.contains(p))
    return Witness(p, cover)


# ---------------------------------------------------------------------------
# point colorings: canonical ranges against colored points
# ---------------------------------------------------------------------------

def _group_bounds(values: list[float]) -> tuple[list[bool], list[bool]]:
    """Flags marking the first and last index of each equal-value run."""
    n = len(values)
    is_start = [i == 0 or values[i] != values[i - 1] for i in range(n)]
    is_end = [i == n - 1 or values[i + 1] != values[i] for i in range(n)]
    return is_start, is_end


def check_cf_intervals(points: list[tuple[float, object]],
                       max_starts: int | None = None,
                       seed: int = 0) -> Witness | None:
    """Conflict-freeness of colored 1-D points w.r.t. every canonical interval.

    Canonical windows start and end at point coordinates (duplicate
    coordinates are covered together).  Exhaustive up to
    EXHAUSTIVE_1D_LIMIT points; beyond that, a seeded sample of window
    starts is extended exhaustively.
    """
    pts = sorted(points, key=lambda pc: pc[0])
    n = len(pts)
    if n == 0:
        return None
    is_start, is_end = _group_bounds([x for x, _ in pts])
    start_idxs = [i for i in range(n) if is_start[i]]
    if max_starts is None and n > EXHAUSTIVE_1D_LIMIT:
        max_starts = EXHAUSTIVE_1D_LIMIT
    if max_starts is not None and len(start_idxs) > max_starts:
        rng = random.Random(seed)
        start_idxs = sorted(rng.sample(start_idxs, max_starts))
    for i in start_idxs:
        counts: dict = {}
        singles = 0
        for j in range(i, n):
            c = pts[j][1]
            prev = counts.get(c, 0)
            counts[c] = prev + 1
            if prev == 0:
                singles += 1
            elif prev == 1:
                singles -= 1
            if singles == 0 and is_end[j]:
                return Witness((pts[i][0], pts[j][0]),
                               sorted(v for _, v in pts[i:j + 1]))
    return None


def check_unimax_intervals(points: list[tuple[float, object]]) -> Witness | None:
    """Unique-maximum over every canonical interval; exhaustive."""
    pts = sorted(points, key=lambda pc: pc[0])
    n = len(pts)
    is_start, is_end = _group_bounds([x for x, _ in pts])
    for i in range(n):
        if not is_start[i]:
            continue
        cur_max = None
        max_count = 0
        for j in range(i, n):
            c = pts[j][1]
            if cur_max is None or c > cur_max:
                cur_max, max_count = c, 1
            elif c == cur_max:
                max_count += 1
            if max_count != 1 and is_end[j]:
                return Witness((pts[i][0], pts[j][0]),
                               sorted(v for _, v in pts[i:j + 1]))
    return None


def check_cf_rect_ranges(points: list[tuple[Pt, object]],
                         samples: int = SAMPLED_RANGES,
                         seed: int = 0) -> Witness | None:
    """Conflict-freeness of colored 2-D points w.r.t. canonical rectangles.

    Exhaustive over all coordinate-pair ranges up to EXHAUSTIVE_2D_LIMIT
    points; beyond that, `samples` seeded random canonical ranges checked
    in vectorized batches.
    """
    n = len(points)
    if n == 0:
        return None
    if n <= EXHAUSTIVE_2D_LIMIT:
        return _exhaustive_rect_ranges(points, unimax=False)
    return _sampled_rect_ranges(points, samples, seed, unimax=False)


def check_unimax_rect_ranges(points: list[tuple[Pt, object]],
                             samples: int = SAMPLED_RANGES,
                             seed: int = 0) -> Witness | None:
    n = len(points)
    if n == 0:
        return None
    if n <= EXHAUSTIVE_2D_LIMIT:
        return _exhaustive_rect_ranges(points, unimax=True)
    return _sampled_rect_ranges(points, samples, seed, unimax=True)


def _window_violates(colors: list, unimax: bool) -> bool:
    if not colors:
        return False
    if unimax:
        return colors.count(max(colors)) != 1
    return not _has_singleton(colors)


def _exhaustive_rect_ranges(points: list[tuple[Pt, object]], unimax: bool) -> Witness | None:
    xs = sorted({p.x for p, _ in points})
    by_x = sorted(points, key=lambda pc: (pc[0].x, pc[0].y))
    for a in range(len(xs)):
        for b in range(a, len(xs)):
            xlo, xhi = xs[a], xs[b]
            strip = [(p.y, c) for p, c in by_x if xlo <= p.x <= xhi]
            strip.sort(key=lambda t: t[0])
            m = len(strip)
            is_start, is_end = _group_bounds([y for y, _ in strip])
            for i in range(m):
                if not is_start[i]:
                    continue
                seen: list = []
                for j in range(i, m):
                    seen.append(strip[j][1])
                    if is_end[j] and _window_violates(seen, unimax):
                        return Witness((xlo, xhi, strip[i][0], strip[j][0]),
                                       sorted(seen))
    return None


def _sampled_rect_ranges(points: list[tuple[Pt, object]], samples: int,
                         seed: int, unimax: bool) -> Witness | None:
    n = len(points)
    px = np.array([p.x for p, _ in points])
    py = np.array([p.y for p, _ in points])
    color_code: dict = {}
    for _, c in points:
        if c not in color_code:
            color_code[c] = len(color_code)
    codes = np.array([color_code[c] for _, c in points])
    xs = np.sort(np.unique(px))
    ys = np.sort(np.unique(py))
    rng = np.random.default_rng(seed)

    batch = 4096
    done = 0
    while done < samples:
        b = min(batch, samples - done)
        done += b
        ax = np.sort(rng.integers(0, len(xs), size=(b, 2)), axis=1)
        ay = np.sort(rng.integers(0, len(ys), size=(b, 2)), axis=1)
        xlo, xhi = xs[ax[:, 0]], xs[ax[:, 1]]
        ylo, yhi = ys[ay[:, 0]], ys[ay[:, 1]]
        mask = ((px >= xlo[:, None]) & (px <= xhi[:, None]) &
                (py >= ylo[:, None]) & (py <= yhi[:, None]))
        nonempty = mask.any(axis=1)
        if unimax:
            masked = np.where(mask, codes, -1)
            row_max = masked.max(axis=1)
            max_counts = (masked == row_max[:, None]).sum(axis=1)
            bad_rows = np.nonzero(nonempty & (max_counts != 1))[0]
        else:
            bad_rows = [k for k in np.nonzero(nonempty)[0]
                        if not _has_singleton([points[i][1]
                                               for i in np.nonzero(mask[k])[0]])]
        for k in bad_rows:
            cover = sorted(points[i][1] for i in np.nonzero(mask[k])[0])
            if _window_violates(list(cover), unimax):
                return Witness((xlo[k], xhi[k], ylo[k], yhi[k]), list(cover))
    return None


# ---------------------------------------------------------------------------
# definitional recomputation from tree shape
# ---------------------------------------------------------------------------

def _fresh_augmentation(tree: AugTree):
    """Heights and summaries recomputed from scratch, ignoring stored fields."""
    heights: dict[int, int] = {}
    ymax: dict[int, object] = {}
    ymin: dict[int, object] = {}

    def go(v: Node) -> None:
        if v.is_leaf:
            heights[id(v)] = 0
            ymax[id(v)] = v.ymax
            ymin[id(v)] = v.ymin
            return
        go(v.left)
        go(v.right)
        heights[id(v)] = max(heights[id(v.left)], heights[id(v.right)]) + 1
        ymax[id(v)] = max(ymax[id(v.left)], ymax[id(v.right)])
        ymin[id(v)] = min(ymin[id(v.left)], ymin[id(v.right)])

    if tree.root is not None:
        go(tree.root)
    return heights, ymax, ymin


def recompute_anchored_colors(tree: AugTree) -> dict[int, int]:
    """color(r) = max height over {leaf of r} and internal v with the
    max-summary of right(v) equal to r, evaluated from fresh augmentation."""
    heights, ymax, _ = _fresh_augmentation(tree)
    out: dict[int, int] = {}
    for leaf in tree.leaves():
        best = 0
        v = leaf.parent
        while v is not None:
            if ymax[id(v.right)].tiebreak == leaf.payload and heights[id(v)] > best:
                best = heights[id(v)]
            v = v.parent
        out[leaf.payload] = best
    return out


def recompute_pinned_square_colors(tree: AugTree) -> dict[int, int]:
    """The four-direction coloring: 0 at pure leaves, else 4*h + j with j
    by NE, SE, SW, NW priority among the directions attaining h."""
    heights, ymax, ymin = _fresh_augmentation(tree)
    out: dict[int, int] = {}
    for leaf in tree.leaves():
        oid = leaf.payload
        cat = [0, 0, 0, 0]  # NE, SE, SW, NW
        v = leaf.parent
        while v is not None:
            h = heights[id(v)]
            if ymax[id(v.right)].tiebreak == oid:
                cat[0] = max(cat[0], h)
            if ymin[id(v.right)].tiebreak == oid:
                cat[1] = max(cat[1], h)
            if ymin[id(v.left)].tiebreak == oid:
                cat[2] = max(cat[2], h)
            if ymax[id(v.left)].tiebreak == oid:
                cat[3] = max(cat[3], h)
            v = v.parent
        h_star = max(cat)
        if h_star == 0:
            out[oid] = 0
        else:
            j = cat.index(h_star)
            out[oid] = 4 * h_star + j
    return out


def _recompute_half(tree: AugTree, use_right: bool) -> dict[int, int]:
    heights, ymax, ymin = _fresh_augmentation(tree)
    out: dict[int, int] = {}
    for leaf in tree.leaves():
        oid = leaf.payload
        hi = lo = 0
        v = leaf.parent
        while v is not None:
            child = v.right if use_right else v.left
            h = heights[id(v)]
            if ymax[id(child)].tiebreak == oid:
                hi = max(hi, h)
            if ymin[id(child)].tiebreak == oid:
                lo = max(lo, h)
            v = v.parent
        h_star = max(hi, lo)
        if h_star == 0:
            out[oid] = 0
        else:
            out[oid] = 2 * h_star + (0 if hi == h_star else 1)
    return out


def recompute_common_point_colors(east: AugTree, west: AugTree) -> dict[int, tuple[int, int]]:
    """Pair coloring of a common-point cell: east half from right-child
    summaries, west half from left-child summaries."""
    e = _recompute_half(east, use_right=True)
    w = _recompute_half(west, use_right=False)
    return {oid: (e[oid], w[oid]) for oid in e}
