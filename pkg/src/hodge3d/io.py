"""Mesh/field file formats and machine-readable reports.

Reads VTK legacy ASCII unstructured grids and Gmsh MSH 4.1 files, writes
VTK legacy ASCII (the canonical output, one file per component) and a
versioned JSON report. Output bytes are deterministic for fixed inputs:
floats are written with shortest round-trip repr.
"""

import hashlib
import json
import os

import numpy as np

from ._version import __version__
from .errors import FieldError, ParseError
from .fields import Pcvf
from .hodge import DecompositionResult
from .mesh import TetMesh, betti_numbers, build_complex

__all__ = ["read_mesh", "read_field", "write_vtk", "write_outputs",
           "make_report", "SCHEMA_VERSION"]

SCHEMA_VERSION = 1

_VTK_TET = 10


class _Tokens:
    """Whitespace token stream that remembers line numbers for errors."""

    def __init__(self, text: str, path: str):
        self.path = path
        self.toks = []
        self.lines = []
        for ln, line in enumerate(text.splitlines(), 1):
            for tok in line.split():
                self.toks.append(tok)
                self.lines.append(ln)
        self.pos = 0

    def done(self) -> bool:
        return self.pos >= len(self.toks)

    def line(self) -> int:
        i = min(self.pos, len(self.lines) - 1)
        return self.lines[i] if self.lines else 0

    def next(self) -> str:
        if self.done():
            raise ParseError("unexpected end of file", self.path, self.line())
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def peek(self) -> str | None:
        return None if self.done() else self.toks[self.pos]

    def next_int(self) -> int:
        tok = self.next()
        try:
            return int(tok)
        except ValueError:
            raise ParseError(f"expected integer, got '{tok}'",
                             self.path, self.line()) from None

    def take(self, n: int, dtype) -> np.ndarray:
        if self.pos + n > len(self.toks):
            raise ParseError(f"expected {n} more values, file ended",
                             self.path, self.line())
        try:
            out = np.array(self.toks[self.pos:self.pos + n], dtype=dtype)
        except ValueError:
            raise ParseError("malformed numeric value",
                             self.path, self.line()) from None
        self.pos += n
        return out


def _parse_vtk(path: str):
    """Parse a VTK legacy ASCII unstructured grid.

    Returns (points, cells(list of index rows), cell_types,
    cell_vectors{name: array}, point_vectors{name: array}).
    """
    with open(path, "r") as f:
        text = f.read()
    lines = text.splitlines()
    if not lines or not lines[0].lstrip().startswith("# vtk DataFile"):
        raise ParseError("missing '# vtk DataFile' header", path, 1)
    if len(lines) < 4:
        raise ParseError("truncated VTK header", path, len(lines))
    fmt = lines[2].strip().upper()
    if fmt != "ASCII":
        raise ParseError(f"unsupported VTK format '{lines[2].strip()}' "
                         "(only ASCII legacy files)", path, 3)

    ts = _Tokens("\n".join(lines[3:]), path)
    # token line numbers are offset by the 3 header lines we skipped
    header_offset = 3

    def err(msg):
        return ParseError(msg, path, ts.line() + header_offset)

    points = None
    cells = None
    cell_types = None
    cell_vectors = {}
    point_vectors = {}
    association = None  # "cell" | "point"
    assoc_n = 0

    while not ts.done():
        kw = ts.next().upper()
        if kw == "DATASET":
            kind = ts.next().upper()
            if kind != "UNSTRUCTURED_GRID":
                raise err(f"unsupported dataset type '{kind}'")
        elif kw == "POINTS":
            n = ts.next_int()
            ts.next()  # dtype
            points = ts.take(3 * n, np.float64).reshape(n, 3)
        elif kw == "CELLS":
            n = ts.next_int()
            m = ts.next_int()
            raw = ts.take(m, np.int64)
            cells = []
            pos = 0
            for _ in range(n):
                if pos >= m:
                    raise err("CELLS section shorter than declared")
                cnt = int(raw[pos])
                cells.append(raw[pos + 1:pos + 1 + cnt])
                pos += 1 + cnt
            if pos != m:
                raise err("CELLS section longer than declared")
        elif kw == "CELL_TYPES":
            n = ts.next_int()
            cell_types = ts.take(n, np.int64)
        elif kw == "CELL_DATA":
            association = "cell"
            assoc_n = ts.next_int()
        elif kw == "POINT_DATA":
            association = "point"
            assoc_n = ts.next_int()
        elif kw == "VECTORS":
            name = ts.next()
            ts.next()  # dtype
            if association is None:
                raise err("VECTORS before CELL_DATA/POINT_DATA")
            arr = ts.take(3 * assoc_n, np.float64).reshape(assoc_n, 3)
            (cell_vectors if association == "cell" else point_vectors)[name] = arr
        elif kw == "SCALARS":
            ts.next()  # name
            ts.next()  # dtype
            ncomp = 1
            if ts.peek() is not None and ts.peek().isdigit():
                ncomp = ts.next_int()
            if ts.next().upper() != "LOOKUP_TABLE":
                raise err("SCALARS without LOOKUP_TABLE")
            ts.next()  # table name
            ts.take(ncomp * assoc_n, np.float64)
        elif kw == "FIELD":
            ts.next()  # field name
            n_arrays = ts.next_int()
            for _ in range(n_arrays):
                ts.next()  # array name
                nc = ts.next_int()
                nt = ts.next_int()
                ts.next()  # dtype
                ts.take(nc * nt, np.float64)
        else:
            raise err(f"unexpected token '{kw}'")

    return points, cells, cell_types, cell_vectors, point_vectors


def _parse_msh(path: str):
    """Parse nodes and tetrahedra from a Gmsh MSH 4.1 ASCII file.

    Entity blocks of dimension below 3 (boundary points/curves/surfaces)
    are skipped; volume blocks must contain 4-node tets.
    """
    with open(path, "r") as f:
        text = f.read()
    ts = _Tokens(text, path)

    def err(msg):
        return ParseError(msg, path, ts.line())

    node_tags = []
    node_xyz = []
    tets = []
    saw_format = False

    while not ts.done():
        section = ts.next()
        if not section.startswith("$"):
            raise err(f"expected section marker, got '{section}'")
        name = section[1:]
        if name == "MeshFormat":
            version = ts.next()
            file_type = ts.next_int()
            ts.next_int()  # data size
            if not version.startswith("4.1"):
                raise err(f"unsupported MSH version '{version}' (need 4.1)")
            if file_type != 0:
                raise err("binary MSH files are not supported")
            saw_format = True
            if ts.next() != "$EndMeshFormat":
                raise err("missing $EndMeshFormat")
        elif name == "Nodes":
            n_blocks = ts.next_int()
            ts.next_int()  # numNodes
            ts.next_int()  # minTag
            ts.next_int()  # maxTag
            for _ in range(n_blocks):
                ts.next_int()  # entityDim
                ts.next_int()  # entityTag
                parametric = ts.next_int()
                if parametric != 0:
                    raise err("parametric nodes are not supported")
                n_in_block = ts.next_int()
                tags = ts.take(n_in_block, np.int64)
                xyz = ts.take(3 * n_in_block, np.float64).reshape(n_in_block, 3)
                node_tags.append(tags)
                node_xyz.append(xyz)
            if ts.next() != "$EndNodes":
                raise err("missing $EndNodes")
        elif name == "Elements":
            n_blocks = ts.next_int()
            ts.next_int()
            ts.next_int()
            ts.next_int()
            for _ in range(n_blocks):
                dim = ts.next_int()
                ts.next_int()  # entityTag
                etype = ts.next_int()
                n_in_block = ts.next_int()
                if dim < 3:
                    # lower-dimensional boundary entities: tag + node tags
                    n_nodes = _MSH_NODES_PER_TYPE.get(etype)
                    if n_nodes is None:
                        raise err(f"unsupported element type {etype}")
                    ts.take((1 + n_nodes) * n_in_block, np.int64)
                    continue
                if etype != 4:
                    raise err(f"unsupported volume element type {etype} "
                              "(only 4-node tetrahedra)")
                rows = ts.take(5 * n_in_block, np.int64).reshape(n_in_block, 5)
                tets.append(rows[:, 1:])
            if ts.next() != "$EndElements":
                raise err("missing $EndElements")
        else:
            # skip unknown sections ($PhysicalNames, $Entities, ...)
            end = f"$End{name}"
            while True:
                tok = ts.next()
                if tok == end:
                    break

    if not saw_format:
        raise ParseError("missing $MeshFormat section", path, 1)
    if not node_tags or not tets:
        raise ParseError("file contains no nodes or no tetrahedra", path, 1)

    tags = np.concatenate(node_tags)
    xyz = np.concatenate(node_xyz)
    tet_tags = np.concatenate(tets)
    order = np.argsort(tags)
    tags_sorted = tags[order]
    idx = np.searchsorted(tags_sorted, tet_tags)
    if (idx >= len(tags_sorted)).any() or \
            (tags_sorted[np.minimum(idx, len(tags_sorted) - 1)] != tet_tags).any():
        raise ParseError("element references unknown node tag", path, 1)
    return xyz[order], idx


# node counts of the Gmsh element types we may need to skip
_MSH_NODES_PER_TYPE = {1: 2, 2: 3, 3: 4, 15: 1, 8: 3, 9: 6, 16: 8}


def _compact(points: np.ndarray, tets: np.ndarray):
    """Drop vertices not referenced by any tet, remapping indices."""
    used = np.unique(tets)
    remap = np.full(len(points), -1, dtype=np.int64)
    remap[used] = np.arange(len(used))
    return points[used], remap[tets]


def read_mesh(path, format: str | None = None) -> TetMesh:
    """Read a tetrahedral mesh from a VTK legacy or Gmsh 4.1 file.

    The format is inferred from the extension (.vtk / .msh) unless given
    explicitly as "vtk_legacy" or "gmsh_msh". Non-tetrahedral volume
    cells are rejected; unreferenced points are dropped.
    """
    path = os.fspath(path)
    if format is None:
        ext = os.path.splitext(path)[1].lower()
        format = {"": "vtk_legacy", ".vtk": "vtk_legacy",
                  ".msh": "gmsh_msh"}.get(ext)
        if format is None:
            raise ParseError(f"cannot infer format from extension '{ext}'", path)
    if format == "vtk_legacy":
        points, cells, cell_types, _, _ = _parse_vtk(path)
        if points is None or cells is None or cell_types is None:
            raise ParseError("file lacks POINTS, CELLS or CELL_TYPES", path)
        if len(cells) == 0:
            raise ParseError("empty mesh (no cells)", path)
        bad = np.flatnonzero(cell_types != _VTK_TET)
        if len(bad):
            raise ParseError(f"unsupported cell type {int(cell_types[bad[0]])} "
                             f"(only tetrahedra, type {_VTK_TET})", path)
        tets = np.array([np.asarray(c) for c in cells], dtype=np.int64)
        if tets.shape[1] != 4:
            raise ParseError("tetrahedral cell without 4 vertices", path)
    elif format == "gmsh_msh":
        points, tets = _parse_msh(path)
    else:
        raise ParseError(f"unknown mesh format '{format}'", path)
    points, tets = _compact(points, tets)
    return build_complex(points, tets)


def read_field(path, mesh: TetMesh, resample: str | None = None) -> Pcvf:
    """Read a vector field for `mesh` from a VTK legacy file.

    Cell data (one vector per tet) loads directly. Point data is only
    accepted with resample="barycentric", which averages the four vertex
    vectors of every tet; the conversion is never applied silently.
    """
    path = os.fspath(path)
    _, _, _, cell_vectors, point_vectors = _parse_vtk(path)
    if cell_vectors:
        name = next(iter(cell_vectors))
        arr = cell_vectors[name]
        if len(arr) != mesh.n_t:
            raise FieldError(f"cell vector field '{name}' has {len(arr)} entries, "
                             f"mesh has {mesh.n_t} tets")
    elif point_vectors:
        name = next(iter(point_vectors))
        arr = point_vectors[name]
        if resample != "barycentric":
            raise FieldError("file contains point data; pass "
                             "resample='barycentric' to average it onto tets")
        if len(arr) != mesh.n_v:
            raise FieldError(f"point vector field '{name}' has {len(arr)} entries, "
                             f"mesh has {mesh.n_v} vertices")
        arr = arr[mesh.tets].mean(axis=1)
    else:
        raise FieldError(f"no VECTORS array found in '{path}'")
    if not np.isfinite(arr).all():
        raise FieldError(f"vector field '{name}' contains NaN or Inf entries")
    return Pcvf(mesh, arr)


def _fmt_floats(row) -> str:
    return " ".join(repr(float(v)) for v in row)


def write_vtk(path, mesh: TetMesh, cell_vectors: dict | None = None,
              title: str = "hodge3d"):
    """Write a VTK legacy ASCII unstructured grid with optional per-tet
    vector arrays; byte output is deterministic for fixed inputs."""
    out = []
    out.append("# vtk DataFile Version 3.0")
    out.append(title.replace("\n", " ")[:255])
    out.append("ASCII")
    out.append("DATASET UNSTRUCTURED_GRID")
    out.append(f"POINTS {mesh.n_v} double")
    out.extend(_fmt_floats(p) for p in mesh.vertices)
    out.append(f"CELLS {mesh.n_t} {5 * mesh.n_t}")
    out.extend("4 " + " ".join(str(int(i)) for i in t) for t in mesh.tets)
    out.append(f"CELL_TYPES {mesh.n_t}")
    out.extend("10" for _ in range(mesh.n_t))
    if cell_vectors:
        out.append(f"CELL_DATA {mesh.n_t}")
        for name, arr in cell_vectors.items():
            arr = np.asarray(arr, dtype=np.float64)
            if arr.shape != (mesh.n_t, 3):
                raise FieldError(f"cell vector array '{name}' must have shape "
                                 f"({mesh.n_t}, 3)")
            out.append(f"VECTORS {name} double")
            out.extend(_fmt_floats(v) for v in arr)
    with open(path, "w", newline="\n") as f:
        f.write("\n".join(out))
        f.write("\n")


def _sha256_arrays(*arrays) -> str:
    h = hashlib.sha256()
    for a in arrays:
        h.update(np.ascontiguousarray(a).tobytes())
    return h.hexdigest()


def make_report(result: DecompositionResult, extra: dict | None = None) -> dict:
    """Build the JSON-ready report document for a decomposition."""
    mesh = result.input.mesh
    counts = mesh.counts
    betti = betti_numbers(mesh)
    fractions = result.fractions()
    report = {
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": "hodge3d", "version": __version__},
        "scheme": result.scheme,
        "input_sq_norm": result.input_sq_norm,
        "components": [
            {"name": name,
             "sq_norm": result.sq_norms[name],
             "fraction": fractions[name],
             "zero": bool(result.zero_flags[name])}
            for name in result.components
        ],
        "mesh": {"n_v": counts.n_v, "n_e": counts.n_e, "n_f": counts.n_f,
                 "n_t": counts.n_t, "betti": list(betti)},
        "solver": [
            {"stage": stage,
             "iterations": rep.iterations,
             "relative_residual": rep.relative_residual,
             "converged": rep.converged}
            for stage, rep in result.solver_reports
        ],
        "input_hashes": {
            "mesh": _sha256_arrays(mesh.vertices, mesh.tets),
            "field": _sha256_arrays(result.input.vectors),
        },
    }
    if extra:
        report.update(extra)
    return report


def write_outputs(result: DecompositionResult, out_dir,
                  formats=("vtk", "json"), extra: dict | None = None) -> list:
    """Write one VTK file per component plus the JSON report.

    Returns the list of written paths. Re-running with identical inputs
    produces byte-identical files.
    """
    os.makedirs(out_dir, exist_ok=True)
    written = []
    if "vtk" in formats:
        for name, comp in result.components.items():
            p = os.path.join(out_dir, f"{name}.vtk")
            write_vtk(p, result.input.mesh, {name: comp.vectors},
                      title=f"{result.scheme} component {name}")
            written.append(p)
    if "json" in formats:
        p = os.path.join(out_dir, "report.json")
        with open(p, "w", newline="\n") as f:
            json.dump(make_report(result, extra), f, indent=2)
            f.write("\n")
        written.append(p)
    return written
