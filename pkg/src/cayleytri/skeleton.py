"""Coherent triangulations of skeleta of the product and their extension."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Dict, List, Optional

from .errors import CyclicSystemError, StructuralError
from .grid import Face, Shape, Triangulation, as_shape, cell_key, restrict_triangulation
from .perms import PermutationSystem, dual_system, find_cyclic_triple, staircase
from .solver import Constraints, solve


@dataclass
class SkeletonTriangulation:
    shape: Shape
    level: int
    assignment: Dict[Face, Triangulation] = field(default_factory=dict)

    def faces(self) -> List[Face]:
        return sorted(self.assignment, key=Face.key)

    def to_dict(self) -> dict:
        return {
            "n": self.shape.n,
            "d": self.shape.d,
            "level": self.level,
            "faces": [
                {"face": f.label(), "rows": sorted(f.rows), "cols": sorted(f.cols),
                 "cells": self.assignment[f].to_tokens()}
                for f in self.faces()
            ],
        }


@dataclass
class ExtensionResult:
    ok: bool
    skeleton: Optional[SkeletonTriangulation]
    witness: Optional[Face] = None


def faces_of(domain, max_dim: int, min_dim: int = 0) -> List[Face]:
    """All faces of a product face with ``min_dim <= dim <= max_dim``, canonical order."""
    if not isinstance(domain, Face):
        domain = Face.full(domain)
    rows, cols = sorted(domain.rows), sorted(domain.cols)
    out = []
    for a in range(1, len(rows) + 1):
        for b in range(1, len(cols) + 1):
            if min_dim <= a + b - 2 <= max_dim:
                for rs in combinations(rows, a):
                    for cs in combinations(cols, b):
                        out.append(Face(rs, cs))
    return sorted(out, key=Face.key)


def simplex_face_triangulation(face: Face) -> Triangulation:
    """The unique triangulation of a face that is itself a simplex."""
    if len(face.rows) != 1 and len(face.cols) != 1:
        raise StructuralError(f"{face.label()} is not a simplex")
    return Triangulation(tuple(face.rows), tuple(face.cols), (face.vertices(),))


def restrict_to_skeleton(t: Triangulation, k: int) -> SkeletonTriangulation:
    shape = t.shape
    assignment = {f: restrict_triangulation(t, f) for f in faces_of(t.face, k)}
    return SkeletonTriangulation(shape, k, assignment)


def coherence_violations(sk: SkeletonTriangulation) -> list:
    """Pairs ``(g, f)`` with ``f`` a facet of ``g`` where the restriction disagrees."""
    bad = []
    for g, tg in sk.assignment.items():
        for f in _facets(g):
            tf = sk.assignment.get(f)
            if tf is not None and restrict_triangulation(tg, f) != tf:
                bad.append((g, f))
    return bad


def is_coherent(sk: SkeletonTriangulation) -> bool:
    return not coherence_violations(sk)


def _facets(g: Face) -> List[Face]:
    out = []
    if len(g.rows) > 1:
        out.extend(Face(g.rows - {r}, g.cols) for r in g.rows)
    if len(g.cols) > 1:
        out.extend(Face(g.rows, g.cols - {c}) for c in g.cols)
    return out


@lru_cache(maxsize=100_000)
def _subface_restrictions(t: Triangulation) -> tuple:
    return tuple((f, restrict_triangulation(t, f) if f != t.face else t)
                 for f in faces_of(t.face, t.face.dim))


def _add_with_subfaces(assignment: dict, t: Triangulation) -> None:
    for f, r in _subface_restrictions(t):
        old = assignment.get(f)
        if old is not None and old != r:
            raise StructuralError(f"incoherent assignment on face {f.label()}")
        assignment[f] = r


def skeleton_from_system(s: PermutationSystem, with_dual: bool = False) -> SkeletonTriangulation:
    """Staircases on every ``[n] x {X, Y}`` (and their subfaces).

    With ``with_dual`` the dual staircases on every ``{i, j} x [d]`` are added
    too, which requires an acyclic system.
    """
    shape = s.shape
    assignment: Dict[Face, Triangulation] = {}
    for (x, y), perm in s.perms:
        _add_with_subfaces(assignment, staircase(perm, x, y))
    if with_dual:
        triple = find_cyclic_triple(s)
        if triple is not None:
            raise CyclicSystemError(triple)
        dual = dual_system(s)
        for (a, b), perm in dual.perms:
            # dual symbols are columns + 1, dual "columns" are rows - 1
            t = staircase(perm, a, b).transpose()
            _add_with_subfaces(assignment, t)
    if shape.n == 1 or shape.d == 1:
        for f in faces_of(shape, 2):
            assignment.setdefault(f, simplex_face_triangulation(f))
    return SkeletonTriangulation(shape, 2, assignment)


def two_skeleton_from_system(s: PermutationSystem) -> SkeletonTriangulation:
    """The full 2-skeleton determined by a system: squares from the staircases."""
    sk = skeleton_from_system(s)
    assignment = {}
    for f in faces_of(s.shape, 2):
        if len(f.rows) == 1 or len(f.cols) == 1:
            assignment[f] = simplex_face_triangulation(f)
        else:
            assignment[f] = sk.assignment[f]
    return SkeletonTriangulation(s.shape, 2, assignment)


def _canonical_constraint(face: Face, fixed: List[Triangulation]) -> tuple:
    rmap = {r: k for k, r in enumerate(sorted(face.rows), start=1)}
    cmap = {c: k for k, c in enumerate(sorted(face.cols))}
    parts = []
    for t in fixed:
        parts.append((tuple(rmap[r] for r in t.rows), tuple(cmap[c] for c in t.cols),
                      tuple(sorted(tuple(sorted((rmap[r], cmap[c]) for r, c in cell))
                                   for cell in t.cells))))
    return (len(face.rows), len(face.cols), tuple(sorted(parts)))


def _constraints_from_key(key: tuple) -> Constraints:
    faces = {}
    for rows, cols, cells in key[2]:
        t = Triangulation(rows, cols, tuple(frozenset(c) for c in cells))
        faces[t.face] = t
    return Constraints(faces=faces)


@lru_cache(maxsize=200_000)
def _solve_canonical(key: tuple):
    res = solve(key[:2], _constraints_from_key(key), mode="decide")
    return res.triangulations[0] if res.satisfiable else None


@lru_cache(maxsize=20_000)
def _enumerate_canonical(key: tuple) -> tuple:
    return tuple(solve(key[:2], _constraints_from_key(key), mode="enumerate").triangulations)


def _from_canonical(face: Face, t: Triangulation) -> Triangulation:
    rows, cols = sorted(face.rows), sorted(face.cols)
    return Triangulation(tuple(rows), tuple(cols),
                         tuple(frozenset((rows[r - 1], cols[c]) for r, c in cell) for cell in t.cells))


def face_completions(face: Face, assignment: Dict[Face, Triangulation]) -> List[Triangulation]:
    """All triangulations of ``face`` compatible with the assigned proper subfaces."""
    key = _canonical_constraint(face, _maximal_assigned(face, assignment))
    return sorted((_from_canonical(face, t) for t in _enumerate_canonical(key)),
                  key=lambda t: tuple(map(cell_key, t.cells)))


def extend_face(face: Face, assignment: Dict[Face, Triangulation]) -> Optional[Triangulation]:
    """First triangulation of ``face`` compatible with all assigned proper subfaces."""
    maximal = _maximal_assigned(face, assignment)
    key = _canonical_constraint(face, maximal)
    sol = _solve_canonical(key)
    return None if sol is None else _from_canonical(face, sol)


def _maximal_assigned(face: Face, assignment) -> List[Triangulation]:
    """Assigned proper subfaces not contained in another assigned one."""
    found, seen = [], set()
    stack = _facets(face)
    while stack:
        f = stack.pop()
        if f in seen:
            continue
        seen.add(f)
        t = assignment.get(f)
        if t is not None:
            found.append(t)
        else:
            stack.extend(_facets(f))
    return [t for t in found
            if not any(o is not t and o.face.contains_face(t.face) for o in found)]


def _extend_job(args):
    face, assignment = args
    return extend_face(face, assignment)


def extend_faces(sk: SkeletonTriangulation, faces: List[Face], jobs: int = 1) -> ExtensionResult:
    faces = sorted(faces, key=Face.key)
    if jobs > 1 and len(faces) > 1:
        with ProcessPoolExecutor(jobs) as pool:
            sols = list(pool.map(_extend_job, [(f, sk.assignment) for f in faces]))
    else:
        sols = []
        for f in faces:
            sol = extend_face(f, sk.assignment)
            sols.append(sol)
            if sol is None:
                break
    assignment = dict(sk.assignment)
    for f, sol in zip(faces, sols):
        if sol is None:
            return ExtensionResult(False, None, f)
        assignment[f] = sol
    level = max([sk.level] + [f.dim for f in faces])
    return ExtensionResult(True, SkeletonTriangulation(sk.shape, level, assignment))


def extend_skeleton(sk: SkeletonTriangulation, to_level: Optional[int] = None,
                    jobs: int = 1, check: bool = True) -> ExtensionResult:
    """Extend a coherent level-``k`` skeleton to level ``k+1`` (or ``to_level``)."""
    to_level = sk.level + 1 if to_level is None else to_level
    if check:
        bad = coherence_violations(sk)
        if bad:
            g, f = bad[0]
            raise StructuralError(f"incoherent skeleton at {g.label()} / {f.label()}")
    current = sk
    for level in range(sk.level + 1, to_level + 1):
        faces = [f for f in faces_of(sk.shape, level, level) if f not in current.assignment]
        res = extend_faces(current, faces, jobs)
        if not res.ok:
            return res
        current = res.skeleton
        current.level = level
    return ExtensionResult(True, current)


def lemma1_flags(s: PermutationSystem) -> Dict[str, bool]:
    """The four properties that must agree for every system."""
    flags = {"acyclic": find_cyclic_triple(s) is None}
    try:
        sk = skeleton_from_system(s, with_dual=True)
        flags["dual"] = is_coherent(sk)
    except (CyclicSystemError, StructuralError):
        flags["dual"] = False
    base = skeleton_from_system(s)
    col_triangles = [Face(s.shape.rows, cs) for cs in combinations(s.shape.cols, 3)]
    flags["extends_to_2faces"] = extend_faces(base, col_triangles).ok
    flags["skel3_compatible"] = extend_skeleton(two_skeleton_from_system(s), 3, check=False).ok
    return flags


def skeleton_key(sk: SkeletonTriangulation) -> tuple:
    return tuple((f.key(), tuple(cell_key(c) for c in sk.assignment[f].cells)) for f in sk.faces())


def all_level2_skeletons(shape) -> List[SkeletonTriangulation]:
    """Every coherent 2-skeleton: an independent diagonal per square."""
    shape = as_shape(shape)
    squares = [f for f in faces_of(shape, 2, 2) if len(f.rows) == 2 and len(f.cols) == 2]
    out = []
    for choice in range(2 ** len(squares)):
        assignment = {f: simplex_face_triangulation(f) for f in faces_of(shape, 2)
                      if len(f.rows) == 1 or len(f.cols) == 1}
        for k, f in enumerate(squares):
            i, j = sorted(f.rows)
            x, y = sorted(f.cols)
            sigma = (i, j) if (choice >> k) & 1 else (j, i)
            assignment[f] = staircase(sigma, x, y)
        out.append(SkeletonTriangulation(shape, 2, assignment))
    return out


def facets_of(domain) -> List[Face]:
    """Faces of codimension one (dropping a row or a column), canonical order."""
    if not isinstance(domain, Face):
        domain = Face.full(domain)
    out = []
    if len(domain.rows) > 1:
        out.extend(Face(domain.rows - {r}, domain.cols) for r in domain.rows)
    if len(domain.cols) > 1:
        out.extend(Face(domain.rows, domain.cols - {c}) for c in domain.cols)
    return sorted(out, key=Face.key)


def boundary_completions(s: PermutationSystem, limit: Optional[int] = None) -> List[SkeletonTriangulation]:
    """Coherent triangulations of the boundary that restrict to the staircases
    (and dual staircases) of an acyclic system.

    Each facet is enumerated on its own; the facet lists are then merged by
    backtracking over agreement on shared faces.
    """
    base = skeleton_from_system(s, with_dual=True)
    shape = s.shape
    facets = facets_of(shape)
    options = [face_completions(f, base.assignment) for f in facets]
    out: List[SkeletonTriangulation] = []
    level = shape.dim - 1

    def walk(k, assignment):
        if limit is not None and len(out) >= limit:
            return
        if k == len(facets):
            out.append(SkeletonTriangulation(shape, level, dict(assignment)))
            return
        for t in options[k]:
            trial = dict(assignment)
            try:
                _add_with_subfaces(trial, t)
            except StructuralError:
                continue
            walk(k + 1, trial)

    walk(0, dict(base.assignment))
    return out


def count_boundary_completions(s: PermutationSystem):
    found = boundary_completions(s)
    return len(found), found


def boundary_of(t: Triangulation) -> SkeletonTriangulation:
    """The boundary complex of a triangulation, as a skeleton one level below the top."""
    return restrict_to_skeleton(t, t.face.dim - 1)


def facet_table(sk: SkeletonTriangulation) -> Dict[Face, Triangulation]:
    """Only the facet entries of a boundary skeleton."""
    return {f: sk.assignment[f] for f in facets_of(sk.shape)}
