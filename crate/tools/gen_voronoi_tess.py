#!/usr/bin/env python3
"""Write a Voronoi tessellation of the unit cube as a Neper-style .tess file.

Seeds are uniform in [0,1]^3. Mirroring them across the six box faces makes
the union of the original cells exactly the box. Vertices closer than a
merge tolerance are identified, which removes the zero-length edges qhull
produces where mirrored seeds are cospherical along box edges.

    python3 tools/gen_voronoi_tess.py --cells 2500 --seed 1 out.tess
"""

import argparse
from collections import defaultdict

import numpy as np
from scipy.spatial import Voronoi

MERGE_TOL = 1e-9


def voronoi_cells(n, seed):
    rng = np.random.default_rng(seed)
    pts = rng.random((n, 3))
    mirrored = [pts]
    for axis in range(3):
        for side in (0.0, 1.0):
            m = pts.copy()
            m[:, axis] = 2 * side - m[:, axis]
            mirrored.append(m)
    vor = Voronoi(np.vstack(mirrored))
    return pts, vor


def snap(v):
    v = v.copy()
    v[np.abs(v) < MERGE_TOL] = 0.0
    v[np.abs(v - 1.0) < MERGE_TOL] = 1.0
    return v


def order_loop(coords, idx, normal):
    """Sort polygon vertex ids by angle around their centroid."""
    c = coords[idx].mean(axis=0)
    u = coords[idx[0]] - c
    u /= np.linalg.norm(u)
    w = np.cross(normal, u)
    ang = [np.arctan2(np.dot(coords[i] - c, w), np.dot(coords[i] - c, u)) for i in idx]
    return [i for _, i in sorted(zip(ang, idx))]


def build(n, seed):
    pts, vor = voronoi_cells(n, seed)
    raw = snap(vor.vertices)

    # merge coincident vertices
    key = {}
    remap = {}
    coords = []
    for i, v in enumerate(raw):
        k = tuple(np.round(v / MERGE_TOL).astype(np.int64))
        if k not in key:
            key[k] = len(coords)
            coords.append(v)
        remap[i] = key[k]
    coords = np.array(coords)

    faces = []  # (cell a, cell b or -1, vertex loop)
    for (a, b), rv in zip(vor.ridge_points, vor.ridge_vertices):
        if a >= n and b >= n:
            continue
        if a >= n:
            a, b = b, a
        if -1 in rv:
            raise RuntimeError("unbounded ridge next to an original cell")
        loop = []
        for v in rv:
            m = remap[v]
            if m not in loop:
                loop.append(m)
        if len(loop) < 3:
            continue
        normal = pts[a] - (pts[b] if b < n else vor.points[b])
        normal /= np.linalg.norm(normal)
        loop = order_loop(coords, loop, normal)
        faces.append((a, b if b < n else -1, loop))

    used = sorted({v for _, _, loop in faces for v in loop})
    vid = {v: i for i, v in enumerate(used)}
    coords = coords[used]
    faces = [(a, b, [vid[v] for v in loop]) for a, b, loop in faces]

    edge_id = {}
    edges = []
    face_edges = []
    for _, _, loop in faces:
        fe = []
        for i in range(len(loop)):
            p, q = loop[i], loop[(i + 1) % len(loop)]
            k = (min(p, q), max(p, q))
            if k not in edge_id:
                edge_id[k] = len(edges)
                edges.append(k)
            fe.append(edge_id[k] + 1 if p < q else -(edge_id[k] + 1))
        face_edges.append(fe)

    cell_faces = defaultdict(list)
    for f, (a, b, _) in enumerate(faces):
        # loops are counter-clockwise seen from outside cell a
        cell_faces[a].append(-(f + 1))
        if b >= 0:
            cell_faces[b].append(f + 1)
    check(coords, edges, faces, cell_faces, n)
    return pts, coords, edges, faces, face_edges, cell_faces


def check(coords, edges, faces, cell_faces, n):
    if len(cell_faces) != n:
        raise RuntimeError("lost cells")
    for c in range(n):
        count = defaultdict(int)
        for f in cell_faces[c]:
            loop = faces[abs(f) - 1][2]
            for i in range(len(loop)):
                p, q = loop[i], loop[(i + 1) % len(loop)]
                count[(min(p, q), max(p, q))] += 1
        if any(k != 2 for k in count.values()):
            raise RuntimeError(f"cell {c} is not closed")
        degree = defaultdict(int)
        for p, q in count:
            degree[p] += 1
            degree[q] += 1
        bad = [v for v, d in degree.items() if d != 3]
        if bad:
            raise RuntimeError(f"cell {c} has non-cubical corners at {bad}")


def write(path, pts, coords, edges, faces, face_edges, cell_faces):
    n = len(pts)
    out = ["***tess", " **format", "   3.4", " **general", "   3 standard", " **cell", f"   {n}", "  *id"]
    out += ["   " + " ".join(str(i + 1) for i in range(k, min(k + 10, n))) for k in range(0, n, 10)]
    out.append("  *seed")
    out += [f"   {i + 1} {p[0]:.12f} {p[1]:.12f} {p[2]:.12f} 0.0" for i, p in enumerate(pts)]
    out += [" **vertex", f"   {len(coords)}"]
    out += [f"   {i + 1} {v[0]:.15f} {v[1]:.15f} {v[2]:.15f} 0" for i, v in enumerate(coords)]
    out += [" **edge", f"   {len(edges)}"]
    out += [f"   {i + 1} {p + 1} {q + 1} 0" for i, (p, q) in enumerate(edges)]
    out += [" **face", f"   {len(faces)}"]
    for i, ((a, b, loop), fe) in enumerate(zip(faces, face_edges)):
        pts_f = coords[loop]
        c = pts_f.mean(axis=0)
        nrm = np.zeros(3)
        for k in range(len(loop)):
            nrm += np.cross(pts_f[k] - c, pts_f[(k + 1) % len(loop)] - c)
        nrm /= np.linalg.norm(nrm)
        out.append(f"   {i + 1} {len(loop)} " + " ".join(str(v + 1) for v in loop))
        out.append(f"     {len(fe)} " + " ".join(str(e) for e in fe))
        out.append(f"     {np.dot(nrm, c):.12f} {nrm[0]:.12f} {nrm[1]:.12f} {nrm[2]:.12f}")
        out.append(f"     0 0 {c[0]:.12f} {c[1]:.12f} {c[2]:.12f}")
    out += [" **polyhedron", f"   {n}"]
    for c in range(n):
        fs = cell_faces[c]
        out.append(f"   {c + 1} {len(fs)} " + " ".join(str(f) for f in fs))
    out.append("***end")
    with open(path, "w") as fh:
        fh.write("\n".join(out) + "\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cells", type=int, default=2500)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("out")
    args = ap.parse_args()
    data = build(args.cells, args.seed)
    write(args.out, *data)
    pts, coords, edges, faces, _, _ = data
    print(f"{args.out}: {len(coords)} vertices, {len(edges)} edges, {len(faces)} faces, {len(pts)} cells")


if __name__ == "__main__":
    main()
