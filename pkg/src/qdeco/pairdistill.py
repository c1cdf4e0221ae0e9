"""Lifetime lower bounds from an explicit pairwise distillation protocol.

Measuring every qubit of a noisy graph state except an adjacent pair {k, l}
in the computational basis leaves a two-qubit state that is diagonal in the
Bell-like basis generated by {1, Z_k, Z_l, Z_k Z_l} on the ideal pair.  As
long as that state is NPT for every edge of a spanning connected subgraph,
entanglement can be distilled between any two vertices, which certifies
multiparty distillability of the whole state.  This module computes the
reduced pair states (closed form on unweighted graphs, dense local
simulation on weighted ones), the per-edge noise thresholds, closed-form
threshold inequalities, a universal degree-only bound, and the aggregated
per-graph report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channels import SIGMA, ChannelFamily, PauliChannel
from .errors import CapacityError, ValidationError
from .graphs import Graph, neighborhood
from .numeric import DEFAULT_TOL, ThresholdResult, Tolerance, bisect, hermitian_spectrum

REGION_CAP = 12  # dense simulation over N_k, N_l and the pair itself
EDGE_BRACKET = (1e-6, 1.0 - 1e-6)

# Dephasing noise gives a graph-independent pair threshold.
DEPHASING_THRESHOLD = math.sqrt(2.0) - 1.0

# Phase-group index convention: bit 0 flips Z_k, bit 1 flips Z_l, so the
# four weights are ordered (1, Z_k, Z_l, Z_k Z_l).
_I, _ZK, _ZL, _ZKZL = 0, 1, 2, 3


@dataclass(frozen=True)
class BellDiagonal:
    """Weights over {1, Z_k, Z_l, Z_k Z_l} applied to the ideal pair state."""

    c: tuple[float, float, float, float]

    def __post_init__(self) -> None:
        if len(self.c) != 4:
            raise ValidationError("need exactly four weights")
        object.__setattr__(self, "c", tuple(float(x) for x in self.c))
        if min(self.c) < -1e-12:
            raise ValidationError(f"negative weight {min(self.c)}")
        if abs(sum(self.c) - 1.0) > 1e-12:
            raise ValidationError(f"weights sum to {sum(self.c)}, not 1")


def _convolve(a: tuple, b: tuple) -> tuple:
    """XOR-convolution over the phase group Z2 x Z2."""
    return tuple(
        sum(a[x] * b[m ^ x] for x in range(4)) for m in range(4)
    )


def _z_flip(index: int, strength: float) -> tuple:
    """Distribution of a phase flip on group element `index` with 1-2f = strength."""
    out = [0.0, 0.0, 0.0, 0.0]
    out[_I] = (1.0 + strength) / 2.0
    out[index] += (1.0 - strength) / 2.0
    return tuple(out)


def reduced_pair_state(g: Graph, k: int, l: int, ch: PauliChannel) -> BellDiagonal:
    """Two-qubit state left on the adjacent pair {k, l} after the protocol.

    Everything a single-qubit Pauli channel does to the measured / kept
    qubits collapses onto the pair as phase flips: the channel on k itself
    becomes (1, Z_l, Z_k Z_l, Z_k) with weights (p0, p1, p2, p3) because an
    X on k acts like Z on its surviving neighbour l (and symmetrically for
    l); noise on a measured neighbour of exactly one of k, l becomes a
    single-sided phase flip with strength 1 - 2(p1 + p2); noise on a common
    neighbour flips both signs together with the same strength.  Composition
    is XOR-convolution, and m independent flips of the same type merge into
    one of strength (1 - 2f)^m.
    """
    if g.is_weighted:
        raise ValidationError("closed-form reduction needs an unweighted graph; "
                              "use weighted_reduced_pair")
    nk = neighborhood(g, k)
    nl = neighborhood(g, l)
    if not (nk >> l) & 1:
        raise ValidationError(f"vertices {k} and {l} are not adjacent")
    p0, p1, p2, p3 = ch.probs
    vec = (1.0, 0.0, 0.0, 0.0)
    vec = _convolve(vec, (p0, p3, p1, p2))  # channel on k
    vec = _convolve(vec, (p0, p1, p3, p2))  # channel on l
    strength = 1.0 - 2.0 * (p1 + p2)
    side_k = (nk & ~nl & ~(1 << l)).bit_count()
    side_l = (nl & ~nk & ~(1 << k)).bit_count()
    common = (nk & nl).bit_count()
    vec = _convolve(vec, _z_flip(_ZK, strength**side_k))
    vec = _convolve(vec, _z_flip(_ZL, strength**side_l))
    vec = _convolve(vec, _z_flip(_ZKZL, strength**common))
    return BellDiagonal(vec)


def pair_npt(b: BellDiagonal) -> bool:
    """NPT (hence distillable) iff the largest weight exceeds 1/2."""
    return max(b.c) > 0.5


def pair_state_matrix(b: BellDiagonal) -> np.ndarray:
    """Explicit 4x4 density matrix; qubit k is bit 0 of the index, l bit 1."""
    phi = np.array([1.0, 1.0, 1.0, -1.0]) / 2.0
    z_k = np.array([1.0, -1.0, 1.0, -1.0])
    z_l = np.array([1.0, 1.0, -1.0, -1.0])
    signs = (np.ones(4), z_k, z_l, z_k * z_l)
    rho = np.zeros((4, 4))
    for weight, s in zip(b.c, signs):
        v = s * phi
        rho += weight * np.outer(v, v)
    return rho


def pair_pt_min_eig(b: BellDiagonal) -> float:
    """Smallest eigenvalue of the pair state partially transposed on k."""
    rho = pair_state_matrix(b)
    pt = rho.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)
    return float(hermitian_spectrum(pt)[0])


def edge_degrees(g: Graph, k: int, l: int) -> tuple[int, int, int]:
    """(|N_k|, |N_l|, |N_k + N_l|) for an adjacent pair."""
    nk = neighborhood(g, k)
    nl = neighborhood(g, l)
    if not (nk >> l) & 1:
        raise ValidationError(f"vertices {k} and {l} are not adjacent")
    return nk.bit_count(), nl.bit_count(), (nk ^ nl).bit_count()


def closed_form_condition(
    kind: str,
    degrees: tuple[int, int, int],
    p: float,
    q: float | None = None,
) -> bool:
    """Per-edge distillability inequality in terms of local degrees only.

    degrees = (|N_k|, |N_l|, |N_k + N_l|).  Supported kinds: depolarizing,
    bitflip, dephasing (graph-independent), and "qo" for the zero-coherence
    Pauli reduction of the optical channel, parameterised by its two flip
    weights p (for x/y) and q (for z), both in [0, 1/4).
    """
    dk, dl, ds = degrees
    if min(dk, dl) < 1 or ds < 0:
        raise ValidationError(f"bad degrees {degrees}")
    if kind == "depolarizing":
        return p ** (dk + 1) + p**ds + p ** (dl + 1) > 1.0
    if kind == "bitflip":
        return p**dk + p**ds + p**dl > 1.0
    if kind == "dephasing":
        return DEPHASING_THRESHOLD < p <= 1.0
    if kind == "qo":
        if q is None:
            raise ValidationError("qo form needs both weights p and q")
        if not (0.0 <= p < 0.25 and 0.0 <= q < 0.25):
            raise ValidationError("qo weights must lie in [0, 1/4)")
        u = 1.0 - 4.0 * p
        w = 1.0 - 2.0 * (p + q)
        return w * (u**dk + u**dl + u ** (ds - 2) * w) > 1.0
    raise ValidationError(f"unknown closed form kind {kind!r}")


def closed_form_threshold(
    kind: str,
    degrees: tuple[int, int, int],
    tol: Tolerance = DEFAULT_TOL,
) -> ThresholdResult:
    """Root of the closed-form boundary polynomial in p (depolarizing/bitflip)."""
    dk, dl, ds = degrees
    if kind == "depolarizing":
        f = lambda p: p ** (dk + 1) + p**ds + p ** (dl + 1) - 1.0
    elif kind == "bitflip":
        f = lambda p: p**dk + p**ds + p**dl - 1.0
    else:
        raise ValidationError("closed-form threshold solves depolarizing or bitflip")
    return bisect(f, EDGE_BRACKET[0], EDGE_BRACKET[1], tol)


def universal_lower_bound(deg_k: int, deg_l: int) -> tuple[float, float]:
    """Degree-only threshold valid for every graph: (p, kappa*t).

    p = 2^(-2/(deg_k + deg_l + 2)) and the lifetime is 2 ln 2 over the same
    denominator, monotone in the degrees.
    """
    if min(deg_k, deg_l) < 1:
        raise ValidationError("degrees must be at least 1")
    denom = deg_k + deg_l + 2
    return 2.0 ** (-2.0 / denom), 2.0 * math.log(2.0) / denom


# ---------------------------------------------------------------------------
# Weighted graphs: dense simulation of the local region


def _lift(op: np.ndarray, qubit: int, m: int) -> np.ndarray:
    out = np.array([[1.0]], dtype=complex)
    for j in range(m - 1, -1, -1):
        out = np.kron(out, op if j == qubit else np.eye(2))
    return out


def weighted_reduced_pair(
    g: Graph, k: int, l: int, ch: PauliChannel
) -> np.ndarray:
    """Reduced pair state on a weighted graph by simulating the local region.

    Only the region I = N_k u N_l u {k, l} matters: gates leaving it act on
    qubits that are measured anyway and cancel from the pair state.  The
    region state starts as |+..+> with one controlled-phase per internal
    edge; each measured qubit is projected on outcome 0 after its noise,
    which splits every pure branch in two (kept value 0 with weight p0+p3,
    kept value 1 with weight p1+p2); finally the full channels act on k and
    l.  Returns the normalised 4x4 matrix with qubit k as bit 0, l as bit 1.
    """
    nk = neighborhood(g, k)
    nl = neighborhood(g, l)
    if not (nk >> l) & 1:
        raise ValidationError(f"vertices {k} and {l} are not adjacent")
    region_mask = nk | nl | (1 << k) | (1 << l)
    labels = [k, l] + sorted(
        v for v in range(g.n) if (region_mask >> v) & 1 and v not in (k, l)
    )
    m = len(labels)
    if m > REGION_CAP:
        raise CapacityError(f"region has {m} qubits; cap is {REGION_CAP}")
    position = {v: i for i, v in enumerate(labels)}

    dim = 1 << m
    vec = np.full(dim, 1.0 / math.sqrt(dim), dtype=complex)
    idx = np.arange(dim)
    for u, v in g.edges():
        if (region_mask >> u) & 1 and (region_mask >> v) & 1:
            both = (1 << position[u]) | (1 << position[v])
            mask = (idx & both) == both
            vec = np.where(mask, vec * np.exp(1j * g.phase(u, v)), vec)

    p0, p1, p2, p3 = ch.probs
    keep, flip = p0 + p3, p1 + p2
    branches: list[tuple[float, np.ndarray]] = [(1.0, vec)]
    for _ in range(m - 1, 1, -1):  # peel the highest label down to qubit 2
        nxt: list[tuple[float, np.ndarray]] = []
        for w, v in branches:
            halves = v.reshape(2, -1)
            if keep > 0.0:
                nxt.append((w * keep, halves[0]))
            if flip > 0.0:
                nxt.append((w * flip, halves[1]))
        branches = nxt

    rho = np.zeros((4, 4), dtype=complex)
    for w, v in branches:
        rho += w * np.outer(v, v.conj())
    trace = rho.trace().real
    if trace < 1e-14:
        raise ValidationError("branch weights vanished; channel is degenerate")
    rho /= trace

    for qubit in (0, 1):
        mixed = np.zeros((4, 4), dtype=complex)
        for prob, s in zip(ch.probs, SIGMA):
            op = _lift(np.asarray(s), qubit, 2)
            mixed += prob * (op @ rho @ op.conj().T)
        rho = mixed
    return rho


def weighted_pair_pt_min_eig(rho: np.ndarray) -> float:
    pt = rho.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)
    return float(hermitian_spectrum(pt)[0])


# ---------------------------------------------------------------------------
# Aggregation over a whole graph


@dataclass(frozen=True)
class EdgeThreshold:
    u: int
    v: int
    phi: float
    p_crit: float  # NaN when the pair never turns NPT inside the bracket
    found: bool
    iterations: int

    @property
    def kt_crit(self) -> float:
        return -math.log(self.p_crit)


@dataclass(frozen=True)
class LowerBoundReport:
    """Distillability thresholds per edge plus two global certificates.

    p_global asks every edge to be NPT (maximum threshold; the certified
    lifetime is the minimum over edges).  p_spanning only asks the NPT edges
    to contain a spanning connected subgraph, which is all the protocol
    needs, so weak edges cannot spoil it.
    """

    graph: Graph = field(compare=False)
    per_edge: tuple[EdgeThreshold, ...] = ()
    p_global: float = math.nan
    p_spanning: float = math.nan
    critical_edge: tuple[int, int] | None = None
    bottleneck_edge: tuple[int, int] | None = None

    @property
    def kt_global(self) -> float:
        return -math.log(self.p_global)

    @property
    def kt_spanning(self) -> float:
        return -math.log(self.p_spanning)

    def spanning_connected_at(self, p: float) -> bool:
        """Do the edges already NPT at noise level p connect all vertices?"""
        edges = [
            (e.u, e.v) for e in self.per_edge if e.found and e.p_crit < p
        ]
        return _connected(self.graph.n, edges)


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.groups = n

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        self.groups -= 1
        return True


def _connected(n: int, edges: list[tuple[int, int]]) -> bool:
    uf = _UnionFind(n)
    for u, v in edges:
        uf.union(u, v)
    return uf.groups == 1


def lifetime_lower_bound(
    g: Graph,
    family: ChannelFamily,
    tol: Tolerance = DEFAULT_TOL,
) -> LowerBoundReport:
    """Per-edge NPT thresholds and the two global certificates for a graph.

    Works along the channel-family parameter p (clean at 1): each edge gets
    a bisection for the level where its reduced pair stops being NPT; the
    global number takes the maximum (the protocol's weakest link), and the
    spanning variant takes the smallest p at which the NPT edges alone
    connect the graph (the bottleneck edge of a maximum-threshold-last
    union-find sweep).
    """
    if not family.is_pauli_family:
        raise ValidationError(
            "pair thresholds sweep a Pauli channel family (depolarizing, "
            "dephasing, bitflip)"
        )
    all_edges = g.edges()
    if not _connected(g.n, all_edges):
        raise ValidationError("graph is not connected; no global certificate")

    per_edge: list[EdgeThreshold] = []
    for u, v in all_edges:
        if g.is_weighted:
            def gap(p: float, _u=u, _v=v) -> float:
                rho = weighted_reduced_pair(g, _u, _v, family.pauli(p))
                return weighted_pair_pt_min_eig(rho)
        else:
            def gap(p: float, _u=u, _v=v) -> float:
                return max(reduced_pair_state(g, _u, _v, family.pauli(p)).c) - 0.5
        result = bisect(gap, EDGE_BRACKET[0], EDGE_BRACKET[1], tol)
        per_edge.append(
            EdgeThreshold(
                u,
                v,
                g.phase(u, v),
                result.value if result.sign_change_found else math.nan,
                result.sign_change_found,
                result.iterations,
            )
        )

    found = [e for e in per_edge if e.found]
    if len(found) == len(per_edge):
        worst = max(found, key=lambda e: e.p_crit)
        p_global, critical = worst.p_crit, (worst.u, worst.v)
    else:
        p_global, critical = math.nan, None

    p_spanning, bottleneck = math.nan, None
    uf = _UnionFind(g.n)
    for e in sorted(found, key=lambda e: e.p_crit):
        uf.union(e.u, e.v)
        if uf.groups == 1:
            p_spanning, bottleneck = e.p_crit, (e.u, e.v)
            break

    return LowerBoundReport(
        g, tuple(per_edge), p_global, p_spanning, critical, bottleneck
    )
