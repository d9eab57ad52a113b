"""Homotopy signatures via cut-ray crossing words, plus class-constrained search.

Each obstacle gets one vertical upward cut ray anchored at its topmost
point on a vertical line chosen to avoid every polygon vertex. The reduced
word of signed ray crossings is a complete fixed-endpoint homotopy
invariant inside a disk with holes.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Iterable, Optional

from .geom import Point, Polygon, Polyline
from .visibility import PathResult, VisibilityGraph

Letter = tuple[int, int]  # (obstacle id, +1 / -1)
Word = tuple[Letter, ...]


def reduce_word(letters: Iterable[Letter]) -> Word:
    """Cancel adjacent inverse pairs."""
    stack: list[Letter] = []
    for let in letters:
        if stack and stack[-1][0] == let[0] and stack[-1][1] == -let[1]:
            stack.pop()
        else:
            stack.append(let)
    return tuple(stack)


def invert_word(word: Word) -> Word:
    return tuple((obs, -sign) for obs, sign in reversed(word))


@dataclass(frozen=True)
class CutRay:
    obstacle_id: int
    x: float
    y_base: float


class RaySystem:
    """One upward cut ray per obstacle, avoiding all polygon vertices."""

    def __init__(self, outer: Polygon, obstacles: dict[int, Polygon]):
        forbidden = sorted(
            {v.x for v in outer.vertices}
            | {v.x for ob in obstacles.values() for v in ob.vertices}
        )
        self.rays: dict[int, CutRay] = {}
        for oid, ob in obstacles.items():
            xs = [v.x for v in ob.vertices]
            lo, hi = min(xs), max(xs)
            rx = _free_x(0.5 * (lo + hi), lo, hi, forbidden)
            crossings = [
                _segment_line_y(a, b, rx)
                for a, b in ob.edges()
                if (a.x - rx) * (b.x - rx) < 0.0
            ]
            # Threshold strictly inside the obstacle: no path can cross the
            # vertical line there, so grazing contacts classify robustly.
            y_base = 0.5 * (min(crossings) + max(crossings))
            self.rays[oid] = CutRay(oid, rx, y_base)

    def segment_word(self, a: Point, b: Point, ids: Optional[Iterable[int]] = None) -> Word:
        """Signed crossings of segment ab against the selected rays.

        Uses the half-open rule (crossing counted when a.x < rx <= b.x or
        symmetrically) so shared segment endpoints are never double counted.
        """
        keys = self.rays.keys() if ids is None else ids
        hits: list[tuple[float, Letter]] = []
        for oid in keys:
            ray = self.rays[oid]
            ax, bx = a.x - ray.x, b.x - ray.x
            if ax < 0.0 <= bx or bx < 0.0 <= ax:
                if ax == bx:
                    continue
                t = ax / (ax - bx)
                y_cross = a.y + t * (b.y - a.y)
                if y_cross > ray.y_base:
                    sign = 1 if ax < 0.0 else -1
                    hits.append((t, (oid, sign)))
        hits.sort(key=lambda item: item[0])
        return tuple(let for _, let in hits)

    def signature(self, path: Polyline, ids: Optional[Iterable[int]] = None) -> Word:
        ids = tuple(self.rays.keys() if ids is None else ids)
        letters: list[Letter] = []
        for i in range(len(path.vertices) - 1):
            letters.extend(self.segment_word(path.vertices[i], path.vertices[i + 1], ids))
        return reduce_word(letters)


def _free_x(preferred: float, lo: float, hi: float, forbidden: list[float]) -> float:
    """An x strictly inside (lo, hi) well separated from all forbidden values."""
    candidates = sorted(set([lo, hi] + [x for x in forbidden if lo <= x <= hi]))
    best_x, best_gap = preferred, -1.0
    for a, b in zip(candidates, candidates[1:]):
        gap = b - a
        if gap > best_gap:
            best_gap = gap
            best_x = 0.5 * (a + b)
    if best_gap <= 0.0:
        raise ValueError("degenerate obstacle: no free vertical line")
    return best_x


def _segment_line_y(a: Point, b: Point, x: float) -> float:
    t = (x - a.x) / (b.x - a.x)
    return a.y + t * (b.y - a.y)


# -- class-constrained shortest paths ------------------------------------


class LiftedTree:
    """Dijkstra over (vertex, reduced word) states from one source point.

    Built once per source; per-target class queries only attach the final
    hop, so scanning many targets (split-point search) stays cheap.
    Reduced words are capped at ``word_cap`` letters, which suffices for
    shortest representatives when the cap is 2*len(ids)+2.
    """

    def __init__(
        self,
        graph: VisibilityGraph,
        rays: RaySystem,
        ids: tuple[int, ...],
        source: Point,
        word_cap: int,
        dist_cap: float = math.inf,
    ):
        """``dist_cap`` prunes states farther than that from the source;
        without it the state space grows exponentially with the word cap.
        """
        self.graph = graph
        self.rays = rays
        self.ids = ids
        self.source = source
        self.word_cap = word_cap
        self.dist_cap = dist_cap
        edge_words: dict[tuple[int, int], Word] = {}

        def word_between(i: int, j: int) -> Word:
            key = (i, j)
            w = edge_words.get(key)
            if w is None:
                w = rays.segment_word(graph.vertices[i], graph.vertices[j], ids)
                edge_words[key] = w
                edge_words[(j, i)] = invert_word(w)
            return w

        dist: dict[tuple[int, Word], float] = {}
        prev: dict[tuple[int, Word], Optional[tuple[int, Word]]] = {}
        heap: list[tuple[float, int, int, Word]] = []
        counter = 0
        for i, w0 in graph.visible_vertices(source):
            if w0 > dist_cap:
                continue
            word = reduce_word(rays.segment_word(source, graph.vertices[i], ids))
            state = (i, word)
            if w0 < dist.get(state, math.inf):
                dist[state] = w0
                prev[state] = None
                heapq.heappush(heap, (w0, counter, i, word))
                counter += 1
        done: set[tuple[int, Word]] = set()
        while heap:
            d, _, u, word = heapq.heappop(heap)
            state = (u, word)
            if state in done:
                continue
            done.add(state)
            for v, w in graph.adjacency[u]:
                new_word = reduce_word(word + word_between(u, v))
                if len(new_word) > word_cap:
                    continue
                nstate = (v, new_word)
                nd = d + w
                if nd > dist_cap:
                    continue
                if nd < dist.get(nstate, math.inf) - 1e-12:
                    dist[nstate] = nd
                    prev[nstate] = state
                    heapq.heappush(heap, (nd, counter, v, new_word))
                    counter += 1
        self._dist = dist
        self._prev = prev
        # Per-vertex state index for target attachment.
        self._at_vertex: dict[int, list[tuple[Word, float]]] = {}
        for (u, word), d in dist.items():
            self._at_vertex.setdefault(u, []).append((word, d))

    def _attach(
        self, b: Point
    ) -> dict[Word, tuple[float, Optional[tuple[int, Word]]]]:
        graph, rays, ids = self.graph, self.rays, self.ids
        a = self.source
        best: dict[Word, tuple[float, Optional[tuple[int, Word]]]] = {}
        if graph.visible(a, b):
            best[reduce_word(rays.segment_word(a, b, ids))] = (a.dist(b), None)
        for i, w_end in graph.visible_vertices(b):
            tail = rays.segment_word(graph.vertices[i], b, ids)
            for word, d in self._at_vertex.get(i, ()):
                final_word = reduce_word(word + tail)
                if len(final_word) > self.word_cap:
                    continue
                total = d + w_end
                cur = best.get(final_word)
                if cur is None or total < cur[0] - 1e-12:
                    best[final_word] = (total, (i, word))
        return best

    def class_lengths_to(self, b: Point) -> dict[Word, float]:
        """Per-class shortest lengths only; no path reconstruction."""
        return {word: total for word, (total, _) in self._attach(b).items()}

    def classes_to(self, b: Point) -> dict[Word, PathResult]:
        graph = self.graph
        a = self.source
        results: dict[Word, PathResult] = {}
        for final_word, (total, state) in self._attach(b).items():
            ids_seq: list[int] = []
            while state is not None:
                ids_seq.append(state[0])
                state = self._prev[state]
            ids_seq.reverse()
            pts = [a, *[graph.vertices[i] for i in ids_seq], b]
            poly = Polyline(tuple(pts))
            results[final_word] = PathResult(poly, poly.length, tuple(ids_seq))
        return results


def lifted_shortest_paths(
    graph: VisibilityGraph,
    rays: RaySystem,
    ids: tuple[int, ...],
    a: Point,
    b: Point,
    word_cap: int,
    max_classes: Optional[int] = None,
    dist_cap: float = math.inf,
) -> dict[Word, PathResult]:
    """Shortest path per homotopy class between two points."""
    results = LiftedTree(graph, rays, ids, a, word_cap, dist_cap=dist_cap).classes_to(b)
    if max_classes is not None and len(results) > max_classes:
        keep = sorted(results.items(), key=lambda kv: kv[1].length)[:max_classes]
        results = dict(keep)
    return results


def shortest_in_class(
    graph: VisibilityGraph,
    rays: RaySystem,
    ids: tuple[int, ...],
    a: Point,
    b: Point,
    target: Word,
    word_cap: int,
) -> Optional[PathResult]:
    return lifted_shortest_paths(graph, rays, ids, a, b, word_cap).get(target)
