"""GHZ-diagonal states under local decoherence.

Closed-form coefficients for depolarizing and general quantum-optical
couplings, partial-transpose positivity per group size, lifetime thresholds,
a sufficient distillability certificate, and the blockwise (grouped-party)
bounds obtained by re-scaling.

A state here is diagonal in the computational basis -- with the coefficient
depending only on the excitation count k -- plus a single real coherence mu
between |0...0> and |1...1>.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .channels import QoChannel, qo_snapshot
from .errors import ValidationError
from .numeric import DEFAULT_TOL, ThresholdResult, Tolerance, bisect

_SYM_ATOL = 1e-12


@dataclass(frozen=True)
class GhzDiagonal:
    n: int
    lam: tuple[float, ...]
    mu: float
    symmetric: bool

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValidationError("need at least one qubit")
        if len(self.lam) != self.n + 1:
            raise ValidationError(f"need {self.n + 1} coefficients")
        if any(v < -1e-12 for v in self.lam):
            raise ValidationError("negative diagonal coefficient")
        total = sum(math.comb(self.n, k) * v for k, v in enumerate(self.lam))
        if abs(total - 1.0) > 1e-10:
            raise ValidationError(f"coefficients sum to {total}, not 1")
        if abs(self.mu) > 0.5 + 1e-12:
            raise ValidationError("|mu| exceeds 1/2")

    @staticmethod
    def from_lambdas(n: int, lam: list[float], mu: float) -> "GhzDiagonal":
        sym = all(abs(lam[k] - lam[n - k]) <= _SYM_ATOL for k in range(n + 1))
        return GhzDiagonal(n, tuple(lam), mu, sym)


def ghz_depol_coeffs(n: int, p: float) -> GhzDiagonal:
    """Coefficients after a depolarizing channel with parameter p per qubit."""
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"p={p} outside [0, 1]")
    lam = [
        ((1 + p) ** k * (1 - p) ** (n - k) + (1 + p) ** (n - k) * (1 - p) ** k)
        / 2 ** (n + 1)
        for k in range(n + 1)
    ]
    return GhzDiagonal.from_lambdas(n, lam, p**n / 2)


def ghz_qo_coeffs(n: int, ch: QoChannel, t: float) -> GhzDiagonal:
    """Coefficients after the quantum-optical channel for time t per qubit."""
    snap = qo_snapshot(ch, t)
    a, b, c = snap.a, snap.b, snap.c
    lam = [
        (c**k * (1 - c) ** (n - k) + (1 - a) ** k * a ** (n - k)) / 2
        for k in range(n + 1)
    ]
    return GhzDiagonal.from_lambdas(n, lam, b**n / 2)


def ghz_ppt_condition(d: GhzDiagonal, k: int) -> bool:
    """Positivity of the partial transpose w.r.t. any group of k parties.

    Boundary equality counts as positive.
    """
    if not 1 <= k <= d.n - 1:
        raise ValidationError(f"group size k={k} outside 1..{d.n - 1}")
    return d.mu**2 <= d.lam[k] * d.lam[d.n - k] + 1e-15


def ghz_depolarize(d: GhzDiagonal) -> GhzDiagonal:
    """Symmetrize lam_k <-> lam_{N-k}; reachable by local operations."""
    lam = [(d.lam[k] + d.lam[d.n - k]) / 2 for k in range(d.n + 1)]
    return GhzDiagonal.from_lambdas(d.n, lam, d.mu)


def ghz_lifetime(
    n: int,
    k: int,
    channel: str | QoChannel = "depolarizing",
    t_max: float = 50.0,
    tol: Tolerance = DEFAULT_TOL,
) -> ThresholdResult:
    """Boundary of the k-group partial-transpose condition.

    For the depolarizing channel the result's value is the critical p; for a
    quantum-optical channel it is the critical time on [0, t_max].  k = 1
    bounds distillability; k = floor(n/2) bounds full separability in the
    symmetric case.
    """
    if not 1 <= k <= n - 1:
        raise ValidationError(f"group size k={k} outside 1..{n - 1}")

    if channel == "depolarizing":

        def gap_p(p: float) -> float:
            d = ghz_depol_coeffs(n, p)
            return d.lam[k] * d.lam[n - k] - d.mu**2

        return bisect(gap_p, 1e-9, 1 - 1e-9, tol)

    if isinstance(channel, QoChannel):

        def gap_t(t: float) -> float:
            d = ghz_qo_coeffs(n, channel, t)
            return d.lam[k] * d.lam[n - k] - d.mu**2

        return bisect(gap_t, 0.0, t_max, tol)

    raise ValidationError(f"unsupported channel {channel!r}")


def ghz_qo_distillable_lower(n: int, ch: QoChannel, t: float) -> bool:
    """Sufficient distillability certificate for the quantum-optical channel.

    After local symmetrization the coherence must dominate every upper
    estimate of the diagonal coefficients for group sizes up to floor(n/2).
    """
    snap = qo_snapshot(ch, t)
    a, b, c = snap.a, snap.b, snap.c
    for k in range(1, n // 2 + 1):
        lam_up = max(
            a**k * (1 - a) ** (n - k),
            a ** (n - k) * (1 - a) ** k,
            c**k * (1 - c) ** (n - k),
            c ** (n - k) * (1 - c) ** k,
        )
        if b**n <= 2 * lam_up:
            return False
    return True


def ghz_lambda_product_monotonicity(d: GhzDiagonal) -> bool:
    """lam_k lam_{N-k} is non-increasing for k up to floor(N/2)."""
    for k in range(1, (d.n + 1) // 2):
        if d.lam[k] * d.lam[d.n - k] < d.lam[k + 1] * d.lam[d.n - k - 1] - 1e-15:
            return False
    return True


def _check_open_unit(p: float) -> None:
    if not 0.0 < p < 1.0:
        raise ValidationError(f"p={p} must lie strictly inside (0, 1)")


def blockwise_upper_M(p: float) -> float:
    """Group count at or above which the partial transpose w.r.t. the
    smallest group is certainly positive (equal-size blocks, large N)."""
    _check_open_unit(p)
    return (math.log(1 - p) - math.log(1 + p)) / (math.log(2 * p) - math.log(1 + p))


def blockwise_lower_M(p: float) -> float:
    """Group count at or below which every blockwise partial transpose is
    certainly non-positive."""
    _check_open_unit(p)
    return (math.log(2 * (1 - p)) - math.log(1 + p)) / (
        math.log(2 * p) - math.log(1 + p)
    )


def blockwise_upper_m(n: int, p: float) -> float:
    """Block size below which the block's partial transpose is certainly
    positive; satisfies n / blockwise_upper_m = blockwise_upper_M."""
    _check_open_unit(p)
    return (
        n * math.log(2 * p / (1 + p)) / (math.log(1 - p) - math.log(1 + p))
    )


def blockwise_upper_M_from_kt(kt: float) -> float:
    """blockwise_upper_M at p = e^{-kt}, stable down to kt ~ 1e-300.

    Uses log(tanh(kt/2)) for the numerator and log1p(expm1(kt)/2) for the
    denominator so that nothing cancels when p rounds to 1.0; needed for the
    encoded-qubit pipeline where effective times reach 1e-73 and below.
    """
    if kt <= 0:
        raise ValidationError("kt must be positive")
    return -math.log(math.tanh(kt / 2.0)) / math.log1p(math.expm1(kt) / 2.0)


def blockwise_upper_M_small_kt(kt: float) -> float:
    """Leading small-time behavior of blockwise_upper_M at p = e^{-kt}."""
    if kt <= 0:
        raise ValidationError("kt must be positive")
    return -2.0 * math.log(kt) / kt


def blockwise_qo_upper_M(ch: QoChannel, t: float) -> float:
    """Blockwise group-count bound for the quantum-optical channel.

    Returns inf for the zero-temperature cases s in {0, 1}, where no finite
    bound exists (the partial transpose stays non-positive for all times).
    """
    if ch.s in (0.0, 1.0):
        return math.inf
    if ch.B <= 0 or t <= 0:
        raise ValidationError("need B > 0 and t > 0")
    snap = qo_snapshot(ch, t)
    a, c = snap.a, snap.c
    num = math.log(a * c) - math.log((1 - a) * (1 - c))
    den = math.log(a * c) + ch.B * t
    if den == 0.0:
        raise ValidationError("degenerate denominator")
    return num / den


def ghz_distill_time_estimate(n: int) -> float:
    """Large-n estimate log(2)/n of the pair-protocol lifetime for GHZ-type
    graphs.  This is an estimate of the threshold scale, not a certified
    bound in either direction."""
    if n < 2:
        raise ValidationError("need at least two qubits")
    return math.log(2) / n
