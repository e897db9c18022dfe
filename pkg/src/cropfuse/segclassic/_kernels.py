"""Compiled pixel-graph kernels (labeling, flood fill, priority flood).

All kernels take C-contiguous 2D arrays and never allocate per pixel.
"""

import heapq

import numpy as np
from numba import njit

_N4 = np.array([[-1, 0], [0, -1], [0, 1], [1, 0]], dtype=np.int64)
_N8 = np.array(
    [[-1, -1], [-1, 0], [-1, 1], [0, -1], [0, 1], [1, -1], [1, 0], [1, 1]], dtype=np.int64
)


def offsets(connectivity):
    if connectivity == 4:
        return _N4
    if connectivity == 8:
        return _N8
    raise ValueError(f"connectivity must be 4 or 8, got {connectivity}")


@njit(cache=True, nogil=True)
def label_components(mask, nbrs):
    """Label foreground components in row-major discovery order.

    Returns ``(labels, sizes)`` where ``labels`` is 0 on background and
    ``sizes[k]`` is the pixel count of component ``k`` (``sizes[0] = 0``).
    """
    h, w = mask.shape
    labels = np.zeros((h, w), dtype=np.int32)
    stack = np.empty(h * w, dtype=np.int64)
    sizes = [0]
    current = 0
    for r0 in range(h):
        for c0 in range(w):
            if not mask[r0, c0] or labels[r0, c0] != 0:
                continue
            current += 1
            labels[r0, c0] = current
            top = 0
            stack[top] = r0 * w + c0
            top += 1
            count = 0
            while top > 0:
                top -= 1
                idx = stack[top]
                r = idx // w
                c = idx % w
                count += 1
                for k in range(nbrs.shape[0]):
                    rr = r + nbrs[k, 0]
                    cc = c + nbrs[k, 1]
                    if rr < 0 or rr >= h or cc < 0 or cc >= w:
                        continue
                    if mask[rr, cc] and labels[rr, cc] == 0:
                        labels[rr, cc] = current
                        stack[top] = rr * w + cc
                        top += 1
            sizes.append(count)
    return labels, np.array(sizes, dtype=np.int64)


@njit(cache=True, nogil=True)
def grow_from_seeds(seeds, allowed, nbrs):
    """Pixels of ``allowed`` connected to a seed through ``allowed`` pixels.

    Seeds themselves are always part of the result.
    """
    h, w = allowed.shape
    out = np.zeros((h, w), dtype=np.bool_)
    stack = np.empty(h * w, dtype=np.int64)
    top = 0
    for r in range(h):
        for c in range(w):
            if seeds[r, c]:
                out[r, c] = True
                stack[top] = r * w + c
                top += 1
    while top > 0:
        top -= 1
        idx = stack[top]
        r = idx // w
        c = idx % w
        for k in range(nbrs.shape[0]):
            rr = r + nbrs[k, 0]
            cc = c + nbrs[k, 1]
            if rr < 0 or rr >= h or cc < 0 or cc >= w:
                continue
            if allowed[rr, cc] and not out[rr, cc]:
                out[rr, cc] = True
                stack[top] = rr * w + cc
                top += 1
    return out


@njit(cache=True, nogil=True)
def priority_flood(elevation, markers, nbrs):
    """Marker-based watershed by priority flooding.

    ``markers`` holds labels > 0 on seed pixels and 0 elsewhere.  The
    labeled pixel with the lowest elevation is expanded first; equal
    elevations are served in insertion order, with seeds inserted in
    row-major order.  A pixel takes its label when first reached.
    """
    h, w = elevation.shape
    labels = markers.copy()
    heap = [(0.0, np.int64(0), np.int64(0))]
    heap.pop()
    counter = 0
    for r in range(h):
        for c in range(w):
            if labels[r, c] > 0:
                heapq.heappush(heap, (elevation[r, c], np.int64(counter), np.int64(r * w + c)))
                counter += 1
    while len(heap) > 0:
        item = heapq.heappop(heap)
        idx = item[2]
        r = idx // w
        c = idx % w
        lab = labels[r, c]
        for k in range(nbrs.shape[0]):
            rr = r + nbrs[k, 0]
            cc = c + nbrs[k, 1]
            if rr < 0 or rr >= h or cc < 0 or cc >= w:
                continue
            if labels[rr, cc] == 0:
                labels[rr, cc] = lab
                heapq.heappush(heap, (elevation[rr, cc], np.int64(counter), np.int64(rr * w + cc)))
                counter += 1
    return labels
