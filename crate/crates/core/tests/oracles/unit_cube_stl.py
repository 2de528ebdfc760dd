"""Writes tests/data/unit_cube.stl with numpy-stl: 12 facets on [0, 1]^3."""
from pathlib import Path

import numpy as np
from stl import mesh

V = np.array([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0], [0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 1]], dtype=float)
F = np.array([
    [0, 3, 1], [1, 3, 2],  # bottom
    [4, 5, 7], [5, 6, 7],  # top
    [0, 1, 4], [1, 5, 4],  # y = 0
    [2, 3, 6], [3, 7, 6],  # y = 1
    [1, 2, 5], [2, 6, 5],  # x = 1
    [0, 4, 3], [3, 4, 7],  # x = 0
])

cube = mesh.Mesh(np.zeros(len(F), dtype=mesh.Mesh.dtype))
for i, f in enumerate(F):
    cube.vectors[i] = V[f]
cube.update_normals()
cube.normals /= np.linalg.norm(cube.normals, axis=1)[:, None]
out = Path(__file__).resolve().parent.parent / "data" / "unit_cube.stl"
cube.save(str(out), mode=mesh.stl.Mode.BINARY)
print(out, out.stat().st_size)
