"""Brute-force reference implementations used only by the tests.

Each oracle is written for clarity, not speed, and shares no code with the
package paths it checks.
"""

from collections import deque
from fractions import Fraction
from itertools import product


def between_class_variance(pixels_255, k):
    """sigma_b^2 for classes {<= k} and {> k}, exact, straight from the definition."""
    c0 = [v for v in pixels_255 if v <= k]
    c1 = [v for v in pixels_255 if v > k]
    if not c0 or not c1:
        return Fraction(0)
    n = len(pixels_255)
    w0, w1 = Fraction(len(c0), n), Fraction(len(c1), n)
    mu0, mu1 = Fraction(sum(c0), len(c0)), Fraction(sum(c1), len(c1))
    return w0 * w1 * (mu0 - mu1) ** 2


def otsu_exhaustive(pixels_255):
    """Lowest k in 0..255 maximizing between-class variance."""
    best_k, best = None, None
    for k in range(256):
        s = between_class_variance(pixels_255, k)
        if best is None or s > best:
            best_k, best = k, s
    return best_k, best


def count_confusion(pred, gt):
    tp = fp = tn = fn = 0
    for p, g in zip(pred.ravel().tolist(), gt.ravel().tolist()):
        if p and g:
            tp += 1
        elif p and not g:
            fp += 1
        elif not p and g:
            fn += 1
        else:
            tn += 1
    return tp, fp, tn, fn


def _neighbors(r, c, h, w, conn):
    steps = [(-1, 0), (1, 0), (0, -1), (0, 1)]
    if conn == 8:
        steps += [(-1, -1), (-1, 1), (1, -1), (1, 1)]
    for dr, dc in steps:
        rr, cc = r + dr, c + dc
        if 0 <= rr < h and 0 <= cc < w:
            yield rr, cc


def components(mask, conn=8):
    """List of pixel sets of the foreground components."""
    h, w = len(mask), len(mask[0])
    seen, out = set(), []
    for r, c in product(range(h), range(w)):
        if mask[r][c] and (r, c) not in seen:
            comp, queue = set(), deque([(r, c)])
            seen.add((r, c))
            while queue:
                p = queue.popleft()
                comp.add(p)
                for q in _neighbors(*p, h, w, conn):
                    if mask[q[0]][q[1]] and q not in seen:
                        seen.add(q)
                        queue.append(q)
            out.append(comp)
    return out


def reachable(allowed, seeds, conn):
    h, w = len(allowed), len(allowed[0])
    seen = set(seeds)
    queue = deque(seeds)
    while queue:
        p = queue.popleft()
        for q in _neighbors(*p, h, w, conn):
            if allowed[q[0]][q[1]] and q not in seen:
                seen.add(q)
                queue.append(q)
    return seen


def fill_holes(edges):
    """Pixels not 4-reachable from the border through non-edge pixels."""
    h, w = len(edges), len(edges[0])
    free = [[not edges[r][c] for c in range(w)] for r in range(h)]
    border = [(r, c) for r, c in product(range(h), range(w))
              if (r in (0, h - 1) or c in (0, w - 1)) and free[r][c]]
    outside = reachable(free, border, 4)
    return [[(r, c) not in outside for c in range(w)] for r in range(h)]


def minimax_costs(elevation, markers, label):
    """Bottleneck cost from ``label`` markers to every pixel, by level sets.

    cost[p] is the smallest level L such that p connects to a ``label``
    marker through pixels of elevation <= L that are not markers of another
    label.  Computed by sweeping L over the sorted elevations and running a
    flood at each level.
    """
    h, w = len(elevation), len(elevation[0])
    inf = float("inf")
    cost = [[inf] * w for _ in range(h)]
    for level in sorted({v for row in elevation for v in row}):
        allowed = [[elevation[r][c] <= level and markers[r][c] in (0, label)
                    for c in range(w)] for r in range(h)]
        seeds = [(r, c) for r, c in product(range(h), range(w))
                 if markers[r][c] == label and allowed[r][c]]
        for r, c in reachable(allowed, seeds, 4):
            if cost[r][c] == inf:
                cost[r][c] = level
    return cost


def watershed_candidates(elevation, markers):
    """For each pixel, the set of labels achieving the minimal path-maximum.

    The path cost excludes the destination pixel itself (its elevation is
    common to every path reaching it).
    """
    h, w = len(elevation), len(elevation[0])
    labels = sorted({v for row in markers for v in row if v})
    costs = {lab: minimax_costs(elevation, markers, lab) for lab in labels}
    out = [[None] * w for _ in range(h)]
    for r, c in product(range(h), range(w)):
        if markers[r][c]:
            out[r][c] = {markers[r][c]}
            continue
        best = {}
        for lab in labels:
            vals = [costs[lab][q[0]][q[1]] for q in _neighbors(r, c, h, w, 4)
                    if markers[q[0]][q[1]] in (0, lab)]
            best[lab] = min(vals) if vals else float("inf")
        m = min(best.values())
        out[r][c] = {lab for lab, v in best.items() if v == m}
    return out


def bilinear_center(values, new_h, new_w):
    """Direct per-pixel evaluation of center-aligned bilinear sampling."""
    h, w = len(values), len(values[0])
    out = []
    for i in range(new_h):
        row = []
        for j in range(new_w):
            y = min(max((i + 0.5) * h / new_h - 0.5, 0.0), h - 1)
            x = min(max((j + 0.5) * w / new_w - 0.5, 0.0), w - 1)
            y0, x0 = int(y), int(x)
            y1, x1 = min(y0 + 1, h - 1), min(x0 + 1, w - 1)
            ty, tx = y - y0, x - x0
            top = values[y0][x0] * (1 - tx) + values[y0][x1] * tx
            bot = values[y1][x0] * (1 - tx) + values[y1][x1] * tx
            row.append(top * (1 - ty) + bot * ty)
        out.append(row)
    return out


def watershed_oracle(elevation, markers):
    """Exact label per pixel for grids with unique elevations.

    A pixel takes the unique label of minimal path-maximum cost.  When two
    labels tie, both optimal paths cross the single pixel whose elevation
    equals that cost (elevations are unique), so the pixel inherits that
    bottleneck pixel's label; the recursion strictly descends in elevation.
    """
    h, w = len(elevation), len(elevation[0])
    flat = [v for row in elevation for v in row]
    assert len(set(flat)) == len(flat), "oracle needs unique elevations"
    where = {elevation[r][c]: (r, c) for r, c in product(range(h), range(w))}
    labels = sorted({v for row in markers for v in row if v})
    costs = {lab: minimax_costs(elevation, markers, lab) for lab in labels}
    memo = {}

    def resolve(r, c):
        if (r, c) in memo:
            return memo[(r, c)]
        if markers[r][c]:
            memo[(r, c)] = markers[r][c]
            return memo[(r, c)]
        best = {}
        for lab in labels:
            vals = [costs[lab][q[0]][q[1]] for q in _neighbors(r, c, h, w, 4)
                    if markers[q[0]][q[1]] in (0, lab)]
            best[lab] = min(vals) if vals else float("inf")
        m = min(best.values())
        winners = [lab for lab, v in best.items() if v == m]
        memo[(r, c)] = winners[0] if len(winners) == 1 else resolve(*where[m])
        return memo[(r, c)]

    return [[resolve(r, c) for c in range(w)] for r in range(h)]
