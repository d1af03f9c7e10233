"""Galerkin assembly of Gram matrices and projection right-hand sides.

All integrands are constant per tet, so every integral is exact; there is
no quadrature order anywhere. Boundary conditions are imposed by identity
rows so that dof numbering stays identical between the constrained and
unconstrained variants.
"""

from dataclasses import dataclass

import numpy as np
import scipy.io
import scipy.sparse as sp

from .errors import FieldError
from .fem import DofMap, ElementTables
from .fields import Pcvf
from .mesh import TetMesh

__all__ = ["SparseSymMatrix", "assemble_gram", "assemble_rhs", "reconstruct",
           "write_matrix_market"]

# Tets per assembly chunk; fixed so the summation order (and thus every
# bit of the result) never depends on the environment.
_CHUNK = 1 << 18


@dataclass(frozen=True)
class SparseSymMatrix:
    """Symmetric positive semi-definite matrix in CSR form."""

    csr: sp.csr_matrix

    @property
    def n(self) -> int:
        return self.csr.shape[0]

    @property
    def nnz(self) -> int:
        return self.csr.nnz

    def diagonal(self) -> np.ndarray:
        return self.csr.diagonal()

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return self.csr @ x

    def toarray(self) -> np.ndarray:
        return self.csr.toarray()


def _table_for(tables: ElementTables, dofmap: DofMap) -> np.ndarray:
    if dofmap.kind == "edge_based":
        return tables.ned_curls
    if dofmap.kind == "face_based":
        return tables.cr_gradients
    raise ValueError(f"unknown dof kind '{dofmap.kind}'")


def assemble_gram(mesh: TetMesh, tables: ElementTables, dofmap: DofMap,
                  constrained: bool = False) -> SparseSymMatrix:
    """Gram matrix of the derivative basis: A_ij = sum_t vol(t) <d_i, d_j>.

    With `constrained`, rows and columns of boundary dofs are replaced by
    identity rows with zero coupling, which restricts the solve to the
    interior (boundary-constrained) subspace while keeping the numbering.
    """
    table = _table_for(tables, dofmap)
    dofs = dofmap.tet_to_dof
    n = dofmap.n_dofs
    interior = dofmap.interior_mask

    acc = sp.csr_matrix((n, n))
    for start in range(0, mesh.n_t, _CHUNK):
        sl = slice(start, min(start + _CHUNK, mesh.n_t))
        d = table[sl]
        blocks = mesh.volumes[sl, None, None] * np.einsum("tld,tmd->tlm", d, d)
        rows = np.broadcast_to(dofs[sl][:, :, None], blocks.shape).ravel()
        cols = np.broadcast_to(dofs[sl][:, None, :], blocks.shape).ravel()
        vals = blocks.ravel()
        if constrained:
            keep = interior[rows] & interior[cols]
            rows, cols, vals = rows[keep], cols[keep], vals[keep]
        acc = acc + sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    if constrained:
        filler = sp.diags((~interior).astype(np.float64), format="csr")
        acc = acc + filler
    acc.sum_duplicates()
    acc.sort_indices()
    return SparseSymMatrix(csr=acc)


def assemble_rhs(X: Pcvf, tables: ElementTables, dofmap: DofMap,
                 constrained: bool = False) -> np.ndarray:
    """Projection vector b_j = sum_t vol(t) <X_t, d_j>; boundary entries
    are zeroed when constrained."""
    if X.mesh.n_t != tables.cr_gradients.shape[0]:
        raise FieldError("field and element tables belong to different meshes")
    table = _table_for(tables, dofmap)
    contrib = X.mesh.volumes[:, None] * np.einsum("td,tld->tl", X.vectors, table)
    b = np.bincount(dofmap.tet_to_dof.ravel(), weights=contrib.ravel(),
                    minlength=dofmap.n_dofs)
    if constrained:
        b[~dofmap.interior_mask] = 0.0
    return b


def reconstruct(mesh: TetMesh, tables: ElementTables, dofmap: DofMap,
                coefficients: np.ndarray) -> Pcvf:
    """Map a coefficient vector to the piecewise constant field sum_i c_i d_i."""
    coefficients = np.asarray(coefficients, dtype=np.float64)
    if coefficients.shape != (dofmap.n_dofs,):
        raise ValueError(f"expected {dofmap.n_dofs} coefficients, "
                         f"got shape {coefficients.shape}")
    table = _table_for(tables, dofmap)
    local = coefficients[dofmap.tet_to_dof]                  # (n_t, k)
    return Pcvf(mesh, np.einsum("tl,tld->td", local, table))


def write_matrix_market(path, A: SparseSymMatrix, comment: str = ""):
    """Export in symmetric coordinate Matrix Market text format."""
    scipy.io.mmwrite(path, A.csr, comment=comment, field="real",
                     symmetry="symmetric")
