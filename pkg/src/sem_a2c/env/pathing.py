"""Grid connectivity helpers. Walls block movement; water does not."""

from collections import deque

import numpy as np

_NEIGHBORS = ((-1, 0), (1, 0), (0, -1), (0, 1))


def component_labels(passable):
    """Label 4-connected components of passable cells; impassable cells get -1."""
    h, w = passable.shape
    labels = np.full((h, w), -1, dtype=np.int32)
    next_label = 0
    for r in range(h):
        for c in range(w):
            if not passable[r, c] or labels[r, c] >= 0:
                continue
            queue = deque([(r, c)])
            labels[r, c] = next_label
            while queue:
                cr, cc = queue.popleft()
                for dr, dc in _NEIGHBORS:
                    nr, nc = cr + dr, cc + dc
                    if 0 <= nr < h and 0 <= nc < w and passable[nr, nc] and labels[nr, nc] < 0:
                        labels[nr, nc] = next_label
                        queue.append((nr, nc))
            next_label += 1
    return labels


def shortest_path_steps(passable, start, goal):
    """Minimal number of moves between two cells via BFS, or None if unreachable.

    Both endpoints must be in bounds; an impassable endpoint is unreachable.
    """
    h, w = passable.shape
    for r, c in (start, goal):
        if not (0 <= r < h and 0 <= c < w):
            raise ValueError(f"coordinate ({r}, {c}) outside {h}x{w} grid")
    if not (passable[start] and passable[goal]):
        return None
    if start == goal:
        return 0
    dist = np.full((h, w), -1, dtype=np.int32)
    dist[start] = 0
    queue = deque([start])
    while queue:
        cr, cc = queue.popleft()
        d = dist[cr, cc] + 1
        for dr, dc in _NEIGHBORS:
            nr, nc = cr + dr, cc + dc
            if 0 <= nr < h and 0 <= nc < w and passable[nr, nc] and dist[nr, nc] < 0:
                if (nr, nc) == goal:
                    return int(d)
                dist[nr, nc] = d
                queue.append((nr, nc))
    return None
