"""Independent validators: k-NN mutual information and brute-force homology.

These implementations deliberately share no machinery with the estimators
they check. The mutual-information estimators use digamma-corrected
k-nearest-neighbor statistics under the max norm (unit-ball volume 1, so
the volume terms cancel). The homology oracle recomputes persistent Betti
numbers from dense GF(2) ranks at every pair of filtration indices and
recovers interval multiplicities by inclusion-exclusion, which determines
the barcode uniquely.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.spatial import cKDTree
from scipy.special import digamma

from .errors import DegenerateCloudError, ShapeError, SizeError
from .topology import Barcode, RankFiltration


@dataclass(frozen=True)
class MiEstimate:
    """Mutual information in nats with the estimator's sample settings."""

    value: float
    k: int
    n: int
    jittered: bool = False


def _as_points(a) -> np.ndarray:
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ShapeError(f"expected 1-D or 2-D array, got shape {arr.shape}")
    return arr


def _jitter(arrays, seed: int):
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    out = []
    for arr in arrays:
        scale = arr.std(axis=0)
        scale[scale == 0] = 1.0
        out.append(arr + 1e-10 * scale * rng.standard_normal(arr.shape))
    return out


def _strict_count(points: np.ndarray, eps: np.ndarray) -> np.ndarray:
    """Number of other points strictly within eps/2 of each point (max norm)."""
    tree = cKDTree(points)
    radius = np.nextafter(eps / 2.0, 0.0)  # closed ball at the previous float = open ball
    return tree.query_ball_point(points, radius, p=np.inf, return_length=True) - 1


def _joint_knn_eps(joint: np.ndarray, k: int) -> np.ndarray:
    tree = cKDTree(joint)
    dist, _ = tree.query(joint, k + 1, p=np.inf)
    return 2.0 * dist[:, k]


def ksg_mutual_information(x, y, k: int = 4, jitter_seed: int = 0) -> MiEstimate:
    """k-NN mutual information estimate between two samples (nats).

    For each point, eps is twice the max-norm distance to its k-th
    neighbor in the joint space; n_x and n_y count marginal neighbors
    strictly within eps/2. The estimate is

        psi(k) + psi(N) - mean psi(n_x + 1) - mean psi(n_y + 1).

    Duplicate joint points (zero k-NN distance) trigger one deterministic
    re-run with seeded jitter of relative scale 1e-10, flagged on the
    result.
    """
    x = _as_points(x)
    y = _as_points(y)
    if len(x) != len(y):
        raise ShapeError(f"sample counts differ: {len(x)} vs {len(y)}")
    n = len(x)
    if n <= k:
        raise SizeError(f"need more than k={k} samples, got {n}")
    jittered = False
    eps = _joint_knn_eps(np.hstack([x, y]), k)
    if (eps == 0).any():
        jittered = True
        x, y = _jitter([x, y], jitter_seed)
        eps = _joint_knn_eps(np.hstack([x, y]), k)
        if (eps == 0).any():
            raise DegenerateCloudError("duplicate points persist after jitter")
    nx = _strict_count(x, eps)
    ny = _strict_count(y, eps)
    value = (
        digamma(k)
        + digamma(n)
        - np.mean(digamma(nx + 1))
        - np.mean(digamma(ny + 1))
    )
    return MiEstimate(value=float(value), k=k, n=n, jittered=jittered)


def projected_mi(
    x, y, z, k: int = 4, jitter_seed: int = 0
) -> tuple[MiEstimate, MiEstimate]:
    """Projected MI of (x; y) and (x; z) sharing joint-space neighbor radii.

    The k-NN radius of each point is taken in the full (x, y, z) space and
    reused for the counts in every projected subspace, which puts the two
    estimates on a common footing:

        I_p(x; y) = psi(N) - mean psi(n_x + 1) - mean psi(n_y + 1)
                    + mean psi(n_xy + 1)

    and symmetrically for (x; z).
    """
    x = _as_points(x)
    y = _as_points(y)
    z = _as_points(z)
    if not (len(x) == len(y) == len(z)):
        raise ShapeError("sample counts must agree")
    n = len(x)
    if n <= k:
        raise SizeError(f"need more than k={k} samples, got {n}")
    jittered = False
    eps = _joint_knn_eps(np.hstack([x, y, z]), k)
    if (eps == 0).any():
        jittered = True
        x, y, z = _jitter([x, y, z], jitter_seed)
        eps = _joint_knn_eps(np.hstack([x, y, z]), k)
        if (eps == 0).any():
            raise DegenerateCloudError("duplicate points persist after jitter")
    psi_n = digamma(n)
    m_x = np.mean(digamma(_strict_count(x, eps) + 1))
    m_y = np.mean(digamma(_strict_count(y, eps) + 1))
    m_z = np.mean(digamma(_strict_count(z, eps) + 1))
    m_xy = np.mean(digamma(_strict_count(np.hstack([x, y]), eps) + 1))
    m_xz = np.mean(digamma(_strict_count(np.hstack([x, z]), eps) + 1))
    mi_xy = MiEstimate(
        value=float(psi_n - m_x - m_y + m_xy), k=k, n=n, jittered=jittered
    )
    mi_xz = MiEstimate(
        value=float(psi_n - m_x - m_z + m_xz), k=k, n=n, jittered=jittered
    )
    return mi_xy, mi_xz


# ---------------------------------------------------------------------------
# dense GF(2) homology oracle
# ---------------------------------------------------------------------------


def gf2_rank(m: np.ndarray) -> int:
    """Rank of a binary matrix over GF(2) by Gaussian elimination."""
    a = (np.asarray(m, dtype=np.uint8) % 2).copy()
    rows, cols = a.shape
    rank = 0
    for c in range(cols):
        sub = np.flatnonzero(a[rank:, c])
        if len(sub) == 0:
            continue
        pivot = rank + sub[0]
        if pivot != rank:
            a[[rank, pivot]] = a[[pivot, rank]]
        hits = np.flatnonzero(a[:, c])
        hits = hits[hits != rank]
        a[hits] ^= a[rank]
        rank += 1
        if rank == rows:
            break
    return rank


def gf2_nullspace(m: np.ndarray) -> np.ndarray:
    """Basis of the kernel of a binary matrix, as columns, over GF(2)."""
    a = (np.asarray(m, dtype=np.uint8) % 2).copy()
    rows, cols = a.shape
    pivot_of_col: dict[int, int] = {}
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        sub = np.flatnonzero(a[r:, c])
        if len(sub) == 0:
            continue
        pivot = r + sub[0]
        if pivot != r:
            a[[r, pivot]] = a[[pivot, r]]
        hits = np.flatnonzero(a[:, c])
        hits = hits[hits != r]
        a[hits] ^= a[r]
        pivot_of_col[c] = r
        r += 1
    free = [c for c in range(cols) if c not in pivot_of_col]
    basis = np.zeros((cols, len(free)), dtype=np.uint8)
    for idx, c in enumerate(free):
        basis[c, idx] = 1
        for pc, pr in pivot_of_col.items():
            if a[pr, c]:
                basis[pc, idx] = 1
    return basis


def _brute_simplices(filt: RankFiltration, max_size: int):
    """Every clique of the final graph with its entry index, by size.

    Fully independent enumeration: check all vertex subsets of each size.
    """
    n = filt.n_nodes
    rank = {}
    for r, (u, v) in enumerate(filt.edges):
        rank[(u, v)] = r
    by_size: dict[int, list[tuple[tuple[int, ...], int]]] = {
        1: [((u,), 0) for u in range(n)]
    }
    for size in range(2, max_size + 1):
        entries = []
        for verts in combinations(range(n), size):
            pair_ranks = []
            ok = True
            for a, b in combinations(verts, 2):
                if (a, b) not in rank:
                    ok = False
                    break
                pair_ranks.append(rank[(a, b)])
            if ok:
                entries.append((verts, max(pair_ranks) + 1))
        by_size[size] = entries
    return by_size


def brute_force_betti(
    filt: RankFiltration, max_hom_dim: int = 1, max_nodes: int = 8
) -> Barcode:
    """Exact barcode from persistent Betti numbers over all index pairs.

    beta_p(i, j) is computed as dim Z_p(K_i) - dim(Z_p(K_i) /\\ B_p(K_j))
    with dense GF(2) ranks; interval multiplicities follow from the usual
    inclusion-exclusion over the four neighboring persistent Betti values.
    Intended as a test oracle, so the node count is capped.
    """
    if filt.n_nodes > max_nodes:
        raise SizeError(f"oracle limited to {max_nodes} nodes, got {filt.n_nodes}")
    m = filt.n_edges
    n_idx = m + 1
    by_size = _brute_simplices(filt, max_hom_dim + 2)

    # global positions per dimension (size = dim + 1)
    pos = {}
    entries = {}
    for size, items in by_size.items():
        dim = size - 1
        pos[dim] = {verts: i for i, (verts, _) in enumerate(items)}
        entries[dim] = np.array([e for _, e in items], dtype=np.int64)

    def boundary_matrix(dim: int) -> np.ndarray:
        """Full boundary from dim to dim-1 over the final complex."""
        rows = len(pos[dim - 1])
        cols = len(pos[dim])
        mat = np.zeros((rows, cols), dtype=np.uint8)
        for verts, _ in by_size[dim + 1]:
            c = pos[dim][verts]
            for skip in range(dim + 1):
                face = verts[:skip] + verts[skip + 1 :]
                mat[pos[dim - 1][face], c] = 1
        return mat

    intervals: list[tuple[int, int, int | None]] = []
    for p in range(max_hom_dim + 1):
        n_p = len(pos[p])
        full_d_p = boundary_matrix(p) if p >= 1 else np.zeros((0, n_p), dtype=np.uint8)
        has_up = (p + 1) in pos and len(pos[p + 1]) > 0
        full_d_up = boundary_matrix(p + 1) if has_up else np.zeros((n_p, 0), dtype=np.uint8)

        # cycle bases Z_p(K_i) embedded in global coordinates, per index
        z_bases = []
        for i in range(n_idx):
            present = np.flatnonzero(entries[p] <= i)
            if len(present) == 0:
                z_bases.append(np.zeros((n_p, 0), dtype=np.uint8))
                continue
            if p == 0:
                basis = np.zeros((n_p, len(present)), dtype=np.uint8)
                basis[present, np.arange(len(present))] = 1
                z_bases.append(basis)
            else:
                sub = full_d_p[:, present]
                kern = gf2_nullspace(sub)
                basis = np.zeros((n_p, kern.shape[1]), dtype=np.uint8)
                basis[present] = kern
                z_bases.append(basis)
        # boundary bases B_p(K_j) per index
        b_bases = []
        for j in range(n_idx):
            if not has_up:
                b_bases.append(np.zeros((n_p, 0), dtype=np.uint8))
                continue
            present_up = np.flatnonzero(entries[p + 1] <= j)
            b_bases.append(full_d_up[:, present_up])

        z_rank = [gf2_rank(z) for z in z_bases]
        b_rank = [gf2_rank(b) for b in b_bases]

        def beta(i: int, j: int) -> int:
            if i < 0:
                return 0
            joint = gf2_rank(np.hstack([z_bases[i], b_bases[j]]))
            inter = z_rank[i] + b_rank[j] - joint
            return z_rank[i] - inter

        table = np.zeros((n_idx, n_idx), dtype=np.int64)
        if p == 0:
            # every vertex is present from index 0, so Z_0(K_i) is the whole
            # chain space and the intersection with B_0(K_j) is B_0(K_j)
            for j in range(n_idx):
                table[:, j] = n_p - b_rank[j]
        else:
            for i in range(n_idx):
                for j in range(i, n_idx):
                    table[i, j] = beta(i, j)
        for i in range(n_idx):
            for j in range(i + 1, n_idx):
                mult = (table[i, j - 1] - table[i, j]) - (
                    (table[i - 1, j - 1] - table[i - 1, j]) if i > 0 else 0
                )
                intervals.extend((p, i, j) for _ in range(mult))
            last = n_idx - 1
            mult_inf = table[i, last] - (table[i - 1, last] if i > 0 else 0)
            intervals.extend((p, i, None) for _ in range(mult_inf))

    intervals.sort(key=lambda t: (t[0], t[1], np.inf if t[2] is None else t[2]))
    return Barcode(intervals=tuple(intervals), n_ranks=m)
