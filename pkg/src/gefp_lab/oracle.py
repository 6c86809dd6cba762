"""Ground-truth engine: weighted enumeration over lattice configurations.

Conventions, fixed once for the whole package:

* rows are counted from the top (row 1 first), columns from the right
  (column 1 is rightmost);
* a vertical edge state 1 means the arrow points down, 0 up; a horizontal
  edge state 1 means the arrow points left, 0 right;
* domain wall boundary conditions: horizontal boundary arrows point out of
  the lattice, vertical boundary arrows point in.  So the state above row 1
  is all ones and the state below row N all zeros, every row sweep starts
  with h = 0 at the right boundary and must end with h = 1 at the left.

The six vertex types, as (h_left, h_right, v_top, v_bottom):

    1: (0,0,0,0) weight a      2: (1,1,1,1) weight a
    3: (0,0,1,1) weight b      4: (1,1,0,0) weight b
    5: (1,0,1,0) weight c      6: (0,1,0,1) weight c

Every configuration satisfies n5 = n6 + N, so c^(n5+n6) = c^N * (c^2)^(n6).
The transfer kernels therefore weight type 6 by c^2 and type 5 by 1, and the
partition function carries one overall factor c^N.  Probabilities are ratios
of these reduced sums and never need c itself, which keeps the exact backend
closed over the rationals even when c^2 has no rational square root.

The transfer engine runs over the 2^N vertical-edge states row by row.  A
deliberately naive ice-rule filter (N <= 3) double-checks it from scratch.
"""

from dataclasses import dataclass, field
from itertools import product

from mpmath import mp

from .backends import EXACT, FLOAT, format_scalar
from .errors import BadIndex, TooLarge, Unsupported
from .params import SpectralData, VertexWeights

DEFAULT_ORACLE_CAP = 8
NAIVE_CAP = 3


@dataclass(frozen=True)
class YoungProfile:
    """Edge positions 1 <= r_1 <= ... <= r_s <= N, one per row from the top.

    The complementary diagram mu = (N - r_1, ..., N - r_s) is the frozen
    corner shape; r_j < j forces the correlation to vanish.
    """

    N: int
    r: tuple

    def __init__(self, N, r):
        object.__setattr__(self, "N", int(N))
        object.__setattr__(self, "r", tuple(int(x) for x in r))
        if self.N < 1:
            raise BadIndex(f"N must be positive, got {N}")
        if len(self.r) > self.N:
            raise BadIndex(f"profile length {len(self.r)} exceeds N={self.N}")
        prev = 1
        for j, rj in enumerate(self.r, start=1):
            if rj < prev or rj > self.N:
                raise BadIndex(
                    f"profile must satisfy 1 <= r_1 <= ... <= r_s <= N, got r={self.r}")
            prev = rj

    @property
    def s(self):
        return len(self.r)

    @property
    def mu(self):
        return tuple(self.N - rj for rj in self.r)

    @property
    def mu_size(self):
        return sum(self.mu)

    def reduced(self):
        """Profile with the last row dropped (same N)."""
        return YoungProfile(self.N, self.r[:-1])


@dataclass
class CorrelationResult:
    """A computed quantity together with its provenance."""

    value: object
    engine: str
    backend: str
    inputs: dict = field(default_factory=dict)
    precision_bits: object = None

    def value_str(self):
        return format_scalar(self.value)


class WeightGrid:
    """Per-site weights (a_jk, b_jk) plus the global c (through c^2).

    a[j][k] is the weight at row j+1 (from the top), column k+1 (from the
    right).  The homogeneous constructor repeats one triple; the spectral
    constructor applies a_jk = sin(lambda_k - nu_j + eta).
    """

    def __init__(self, a_rows, b_rows, c2, c=None, homogeneous=False, backend=EXACT):
        self.a = tuple(tuple(r) for r in a_rows)
        self.b = tuple(tuple(r) for r in b_rows)
        self.c2 = c2
        self.c = c
        self.homogeneous = homogeneous
        self.backend = backend
        self.N = len(self.a)
        self._one = c2 / c2
        self._kernel_cache = {}

    @classmethod
    def from_weights(cls, N, w: VertexWeights):
        a = [[w.a] * N for _ in range(N)]
        b = [[w.b] * N for _ in range(N)]
        return cls(a, b, w.c2, w.c, homogeneous=True, backend=w.backend)

    @classmethod
    def from_spectral(cls, spec: SpectralData):
        n = spec.n
        eta = spec.eta
        a = [[mp.sin(spec.lambdas[k] - spec.nus[j] + eta) for k in range(n)]
             for j in range(n)]
        b = [[mp.sin(spec.lambdas[k] - spec.nus[j] - eta) for k in range(n)]
             for j in range(n)]
        c = mp.sin(2 * eta)
        return cls(a, b, c * c, c, homogeneous=False, backend=FLOAT)

    def describe(self):
        if self.homogeneous:
            return {"a": format_scalar(self.a[0][0]), "b": format_scalar(self.b[0][0]),
                    "c2": format_scalar(self.c2)}
        return {"inhomogeneous": True, "N": self.N}

    # -- row kernels ----------------------------------------------------------
    def _row_kernel(self, row, v_in, mark_col=None, c_at=None, frozen_from=None,
                    width=None):
        """Map of out-states reachable from v_in across one row, with weights.

        mark_col: require the horizontal edge left of that column to point
        left.  c_at: require the row's type-5 vertex at that column.
        frozen_from: require all vertices at columns > frozen_from to be of
        type 2.  width: number of columns in this row (cut domains).
        """
        n = self.N if width is None else width
        key = (row if not self.homogeneous else -1, n, v_in, mark_col, c_at, frozen_from)
        hit = self._kernel_cache.get(key)
        if hit is not None:
            return hit
        aw, bw = self.a[row], self.b[row]
        c2, one = self.c2, self._one
        out = {}

        def sweep(k, h, w, v_out):
            if k == n:
                if h == 1:
                    out[v_out] = out.get(v_out, 0) + w
                return
            vt = (v_in >> k) & 1
            for vb in (0, 1):
                if vt == vb:
                    h2 = h
                    ww = aw[k] if h == vt else bw[k]
                    typ = 2 if (h, vt) == (1, 1) else None
                elif vt == 1:            # vt=1, vb=0: type 5, h flips 0 -> 1
                    if h != 0:
                        continue
                    h2, ww, typ = 1, one, 5
                else:                    # vt=0, vb=1: type 6, h flips 1 -> 0
                    if h != 1:
                        continue
                    h2, ww, typ = 0, c2, 6
                if c_at is not None and typ == 5 and k + 1 != c_at:
                    continue
                if frozen_from is not None and k + 1 > frozen_from and typ != 2:
                    continue
                nh = h2
                if mark_col is not None and k + 1 == mark_col and nh != 1:
                    continue
                sweep(k + 1, nh, w * ww, v_out | (vb << k))

        sweep(0, 0, self._one, 0)
        self._kernel_cache[key] = out
        return out


def _transfer(grid: WeightGrid, marks=None, c_at_row1=None, frozen=None, widths=None):
    """Reduced partition sum (without the overall c^N) under constraints."""
    n = grid.N
    if widths is None:
        states = {(1 << n) - 1: grid._one}
    else:
        states = {(1 << widths[0]) - 1: grid._one}
    for row in range(n):
        width = None if widths is None else widths[row]
        mark = marks[row] if marks is not None and row < len(marks) else None
        c_at = c_at_row1 if row == 0 else None
        froz = frozen[row] if frozen is not None and row < len(frozen) else None
        new = {}
        for st, w in states.items():
            for st2, w2 in grid._row_kernel(row, st, mark, c_at, froz, width).items():
                acc = new.get(st2)
                new[st2] = w * w2 if acc is None else acc + w * w2
        if widths is not None and row + 1 < n and widths[row + 1] > widths[row]:
            # vertical edges entering wider rows from outside point down
            grow = widths[row + 1] - widths[row]
            add = ((1 << grow) - 1) << widths[row]
            new = {st | add: w for st, w in new.items()}
        states = new
    return states.get(0, grid._one * 0)


def _check_cap(n, cap):
    cap = DEFAULT_ORACLE_CAP if cap is None else cap
    if n > cap:
        raise TooLarge(f"N={n} exceeds the enumeration cap {cap}")


def partition_function_oracle(grid: WeightGrid, cap=None):
    """Partition function Z_N by transfer over vertical-edge states.

    Needs a concrete value of c: exact grids whose c^2 has no rational square
    root can only produce probability ratios, not Z itself.
    """
    _check_cap(grid.N, cap)
    if grid.c is None:
        raise Unsupported("Z_N needs a concrete c; this grid only carries c^2")
    return grid.c ** grid.N * _transfer(grid)


def reduced_partition_oracle(grid: WeightGrid, cap=None):
    """The c-reduced sum Z_N / c^N; always available, both backends."""
    _check_cap(grid.N, cap)
    return _transfer(grid)


def gefp_oracle(grid: WeightGrid, profile: YoungProfile, cap=None) -> CorrelationResult:
    """Probability that the s marked horizontal edges all point left.

    Edge j sits in row j between columns r_j and r_j + 1 from the right.
    The equivalent characterization (a frozen corner of type-2 vertices with
    diagram shape mu) is evaluated as well and must agree; a mismatch means
    a bug, so it raises.
    """
    _check_cap(grid.N, cap)
    if profile.N != grid.N:
        raise BadIndex(f"profile N={profile.N} does not match grid N={grid.N}")
    z = _transfer(grid)
    marked = _transfer(grid, marks=list(profile.r))
    frozen = _transfer(grid, frozen=list(profile.r))
    value = marked / z
    other = frozen / z
    if grid.backend == EXACT:
        agree = value == other
    else:
        agree = abs(value - other) <= mp.mpf(2) ** (8 - mp.prec) * (1 + abs(value))
    if not agree:
        raise AssertionError(
            f"edge-based and frozen-region GEFP disagree: {value} vs {other}")
    return CorrelationResult(value, "oracle", grid.backend,
                             {"N": grid.N, "r": list(profile.r), **grid.describe()},
                             None if grid.backend == EXACT else mp.prec)


def boundary_H_oracle(grid: WeightGrid, r: int, cap=None) -> CorrelationResult:
    """Probability that row 1's unique c-vertex sits r columns from the right."""
    _check_cap(grid.N, cap)
    if not 1 <= r <= grid.N:
        raise BadIndex(f"r={r} outside 1..{grid.N}")
    value = _transfer(grid, c_at_row1=r) / _transfer(grid)
    return CorrelationResult(value, "oracle", grid.backend,
                             {"N": grid.N, "r": r, **grid.describe()},
                             None if grid.backend == EXACT else mp.prec)


def boundary_distribution_oracle(grid: WeightGrid, cap=None):
    """The full boundary distribution (H^(1), ..., H^(N)) in one sweep."""
    _check_cap(grid.N, cap)
    z = _transfer(grid)
    return [_transfer(grid, c_at_row1=r) / z for r in range(1, grid.N + 1)]


def modified_domain_partition(grid: WeightGrid, profile: YoungProfile, cap=None):
    """Partition function of the lattice with the mu-shaped corner removed.

    Row j keeps its rightmost r_j vertices (j <= s); boundary arrows stay of
    domain-wall type on the staircase.  Homogeneous weights only: the
    correspondence with the GEFP divides out a^{|mu|}, which is only
    meaningful when all a-weights agree.  Satisfies
    Z_mod * a^{|mu|} = GEFP * Z_N.
    """
    _check_cap(grid.N, cap)
    if not grid.homogeneous:
        raise Unsupported("the cut-corner domain is defined for homogeneous weights")
    if profile.N != grid.N:
        raise BadIndex(f"profile N={profile.N} does not match grid N={grid.N}")
    if grid.c is None:
        raise Unsupported("Z on the cut domain needs a concrete c")
    widths = list(profile.r) + [grid.N] * (grid.N - profile.s)
    return grid.c ** grid.N * _transfer(grid, widths=widths)


def reduced_modified_domain_partition(grid: WeightGrid, profile: YoungProfile, cap=None):
    """Cut-corner partition sum without the overall c^N factor."""
    _check_cap(grid.N, cap)
    if not grid.homogeneous:
        raise Unsupported("the cut-corner domain is defined for homogeneous weights")
    widths = list(profile.r) + [grid.N] * (grid.N - profile.s)
    return _transfer(grid, widths=widths)


# ---------------------------------------------------------------------------
# naive filter: the oracle's own oracle

@dataclass
class NaiveEnumeration:
    """Statistics from brute-force enumeration of all edge assignments."""

    reduced_sum: object          # Z / c^N
    config_count: int
    type_counts: list            # summed over configurations, index 0 unused
    parity_ok: bool              # n5 == n6 + N in every configuration


_VERTEX_TYPES = {
    (0, 0, 0, 0): 1, (1, 1, 1, 1): 2,
    (0, 0, 1, 1): 3, (1, 1, 0, 0): 4,
    (1, 0, 1, 0): 5, (0, 1, 0, 1): 6,
}


def enumerate_naive(grid: WeightGrid, marks=None) -> NaiveEnumeration:
    """Enumerate every free-edge assignment and filter by the ice rule.

    Deliberately independent of the transfer engine; capped at N <= 3.
    ``marks`` optionally restricts to configurations whose marked edges all
    point left, as in the GEFP numerator.
    """
    n = grid.N
    if n > NAIVE_CAP:
        raise TooLarge(f"naive enumeration is capped at N={NAIVE_CAP}")
    zero = grid._one * 0
    total = zero
    count = 0
    type_counts = [0] * 7
    parity_ok = True
    free_h = [(j, k) for j in range(n) for k in range(1, n)]
    free_v = [(i, k) for i in range(1, n) for k in range(n)]
    for bits in product((0, 1), repeat=len(free_h) + len(free_v)):
        h = [[0] * (n + 1) for _ in range(n)]   # h[j][k]: edge between cols k, k+1
        v = [[0] * n for _ in range(n + 1)]
        for j in range(n):
            h[j][0] = 0      # right boundary arrow points right
            h[j][n] = 1      # left boundary arrow points left
        for k in range(n):
            v[0][k] = 1      # top boundary arrows point down
            v[n][k] = 0      # bottom boundary arrows point up
        for (j, k), bit in zip(free_h, bits[: len(free_h)]):
            h[j][k] = bit
        for (i, k), bit in zip(free_v, bits[len(free_h):]):
            v[i][k] = bit
        w = grid._one
        n5 = n6 = 0
        ok = True
        for j in range(n):
            for k in range(n):
                key = (h[j][k + 1], h[j][k], v[j][k], v[j + 1][k])
                typ = _VERTEX_TYPES.get(key)
                if typ is None:
                    ok = False
                    break
                if typ in (1, 2):
                    w = w * grid.a[j][k]
                elif typ in (3, 4):
                    w = w * grid.b[j][k]
                elif typ == 6:
                    w = w * grid.c2
                if typ == 5:
                    n5 += 1
                elif typ == 6:
                    n6 += 1
            if not ok:
                break
        if not ok:
            continue
        if marks is not None and any(h[j][rj] != 1 for j, rj in enumerate(marks)):
            continue
        count += 1
        total = total + w
        if n5 != n6 + n:
            parity_ok = False
        cfg_types = [0] * 7
        for j in range(n):
            for k in range(n):
                cfg_types[_VERTEX_TYPES[(h[j][k + 1], h[j][k], v[j][k], v[j + 1][k])]] += 1
        for t in range(1, 7):
            type_counts[t] += cfg_types[t]
    return NaiveEnumeration(total, count, type_counts, parity_ok)


def all_profiles(N, s=None):
    """All weakly increasing profiles for the given N (and s if fixed)."""
    from itertools import combinations_with_replacement
    sizes = range(1, N + 1) if s is None else [s]
    out = []
    for ss in sizes:
        for r in combinations_with_replacement(range(1, N + 1), ss):
            out.append(YoungProfile(N, r))
    return out
