"""Group-comparison tests for solution-quality samples.

Statistics are computed here from their defining formulas; scipy.stats is
used only for distribution tails (F, t, chi-square, beta, normal).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy import stats as sps

from .errors import DegenerateDataError, LabError, UnsupportedDesignError, UnsupportedSizeError

COCHRAN = "cochran"
SHAPIRO_WILK = "shapiro_wilk"
ANOVA = "anova"
LSD = "lsd"
KRUSKAL_WALLIS = "kruskal_wallis"
MANN_WHITNEY = "mann_whitney"

DEFAULT_ALPHAS = (0.05, 0.1, 0.2)


@dataclass(frozen=True)
class GroupedSamples:
    labels: tuple[str, ...]
    values: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        if len(self.labels) != len(self.values):
            raise LabError("labels and value lists differ in length")
        if len(self.labels) < 2:
            raise LabError(f"need at least 2 groups, got {len(self.labels)}")
        if len(set(self.labels)) != len(self.labels):
            raise LabError("group labels must be unique")
        for lab, vals in zip(self.labels, self.values):
            if not vals:
                raise LabError(f"group {lab!r} is empty")
            if not all(math.isfinite(v) for v in vals):
                raise LabError(f"group {lab!r} has non-finite values")

    @classmethod
    def from_pairs(cls, groups: Iterable[tuple[str, Sequence[float]]]) -> "GroupedSamples":
        groups = list(groups)
        return cls(
            tuple(str(lab) for lab, _ in groups),
            tuple(tuple(float(v) for v in vals) for _, vals in groups),
        )

    @property
    def k(self) -> int:
        return len(self.labels)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(v) for v in self.values)

    def arrays(self) -> list[np.ndarray]:
        return [np.asarray(v, dtype=float) for v in self.values]


@dataclass(frozen=True)
class TestOutcome:
    method: str
    statistic: float
    p_value: Optional[float]
    alpha: float
    reject_null: bool
    label: str = ""  # group label for per-group tests

    __test__ = False  # not a pytest class

    def to_row(self) -> dict:
        return {
            "method": self.method,
            "label": self.label,
            "statistic": self.statistic,
            "p_value": "" if self.p_value is None else self.p_value,
            "alpha": self.alpha,
            "reject_null": self.reject_null,
        }


@dataclass(frozen=True)
class PairwiseMatrix:
    """Upper-triangular significance table; ``cells[(i, j)]`` for ``i < j``."""

    method: str
    labels: tuple[str, ...]
    alpha: float
    cells: dict[tuple[int, int], bool]  # True = significant difference
    p_values: dict[tuple[int, int], float]

    def significant(self, i: int, j: int) -> bool:
        return self.cells[(min(i, j), max(i, j))]

    def render(self) -> str:
        """Aligned text panel: ``ok`` = no significant difference, ``X`` = significant."""
        cols = self.labels[1:]
        head = f"{self.method.upper()} alpha={self.alpha:g}"
        width = max(len(head), *(len(l) for l in self.labels)) + 1
        cw = max(3, *(len(c) for c in cols)) + 1
        lines = [head.ljust(width) + "".join(c.rjust(cw) for c in cols)]
        for i, lab in enumerate(self.labels[:-1]):
            row = lab.ljust(width)
            for j in range(1, len(self.labels)):
                cell = "" if j <= i else ("X" if self.cells[(i, j)] else "ok")
                row += cell.rjust(cw)
            lines.append(row.rstrip())
        return "\n".join(lines)

    def to_rows(self) -> list[dict]:
        return [
            {
                "method": self.method,
                "alpha": self.alpha,
                "group_a": self.labels[i],
                "group_b": self.labels[j],
                "p_value": self.p_values.get((i, j), ""),
                "significant": self.cells[(i, j)],
            }
            for (i, j) in sorted(self.cells)
        ]


def _decide(method, stat, p, alpha, label="") -> TestOutcome:
    p = None if p is None else float(p)
    return TestOutcome(method, float(stat), p, alpha, bool(p is not None and p < alpha), label)


def average_ranks(values: Sequence[float]) -> np.ndarray:
    """1-based ranks with ties sharing the mean of their positions."""
    arr = np.asarray(values, dtype=float)
    order = np.argsort(arr, kind="mergesort")
    ranks = np.empty(len(arr))
    i = 0
    while i < len(arr):
        j = i
        while j + 1 < len(arr) and arr[order[j + 1]] == arr[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def _tie_sum(values: Sequence[float]) -> float:
    _, counts = np.unique(np.asarray(values, dtype=float), return_counts=True)
    return float(np.sum(counts.astype(float) ** 3 - counts))


# -- variance homogeneity and normality ----------------------------------------

def cochran_c(gs: GroupedSamples, alpha: float = 0.05) -> TestOutcome:
    """Cochran's C: largest group variance over the sum of variances.

    The p-value uses the Bonferroni bound ``k * P(Beta > C)`` with
    ``Beta((n-1)/2, (k-1)(n-1)/2)``, capped at 1.
    """
    sizes = set(gs.sizes)
    if len(sizes) != 1:
        raise UnsupportedDesignError(f"Cochran's C needs equal group sizes, got {gs.sizes}")
    n = sizes.pop()
    if n < 2:
        raise UnsupportedDesignError("Cochran's C needs at least 2 values per group")
    variances = np.array([np.var(a, ddof=1) for a in gs.arrays()])
    total = variances.sum()
    if total == 0:
        raise DegenerateDataError("all group variances are zero")
    c = variances.max() / total
    k = gs.k
    p = min(1.0, k * sps.beta.sf(c, (n - 1) / 2, (k - 1) * (n - 1) / 2))
    return _decide(COCHRAN, c, p, alpha)


_SW_C1 = (0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056)
_SW_C2 = (0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633)
_SW_C3 = (0.5440, -0.39978, 0.025054, -6.714e-4)
_SW_C4 = (1.3822, -0.77857, 0.062767, -0.0020322)
_SW_C5 = (-1.5861, -0.31082, -0.083751, 0.0038915)
_SW_C6 = (-0.4803, -0.082676, 0.0030302)
_SW_G = (-2.273, 0.459)


def _poly(coefs: Sequence[float], x: float) -> float:
    return sum(c * x**i for i, c in enumerate(coefs))


def shapiro_wilk_coefficients(n: int) -> np.ndarray:
    """Royston's approximation to the Shapiro-Wilk weights (ascending data order)."""
    half = n // 2
    if n == 3:
        a = np.array([math.sqrt(0.5)])
    else:
        m = -sps.norm.ppf((np.arange(1, half + 1) - 0.375) / (n + 0.25))
        summ2 = 2.0 * float(np.sum(m**2))
        ssumm2 = math.sqrt(summ2)
        rsn = 1.0 / math.sqrt(n)
        a1 = _poly(_SW_C1, rsn) + m[0] / ssumm2
        a = np.empty(half)
        if n > 5:
            a2 = _poly(_SW_C2, rsn) + m[1] / ssumm2
            fac = math.sqrt((summ2 - 2 * m[0] ** 2 - 2 * m[1] ** 2) / (1 - 2 * a1**2 - 2 * a2**2))
            a[:2] = a1, a2
            a[2:] = m[2:] / fac
        else:
            fac = math.sqrt((summ2 - 2 * m[0] ** 2) / (1 - 2 * a1**2))
            a[0] = a1
            a[1:] = m[1:] / fac
    full = np.zeros(n)
    full[:half] = -a
    full[n - half:] = a[::-1]
    return full


def _shapiro_p(w: float, n: int) -> float:
    if n == 3:
        p = 6 / math.pi * (math.asin(math.sqrt(w)) - math.asin(math.sqrt(0.75)))
        return min(1.0, max(0.0, p))
    w1 = math.log(1 - w) if w < 1 else -math.inf
    if n <= 11:
        gamma = _poly(_SW_G, n)
        if w1 >= gamma:
            return 0.0
        w1 = -math.log(gamma - w1)
        mean = _poly(_SW_C3, n)
        sd = math.exp(_poly(_SW_C4, n))
    else:
        ln = math.log(n)
        mean = _poly(_SW_C5, ln)
        sd = math.exp(_poly(_SW_C6, ln))
    return float(sps.norm.sf((w1 - mean) / sd))


def shapiro_wilk(sample: Sequence[float], alpha: float = 0.05, label: str = "") -> TestOutcome:
    x = np.sort(np.asarray(sample, dtype=float))
    n = len(x)
    if not 3 <= n <= 5000:
        raise UnsupportedSizeError(f"Shapiro-Wilk needs 3 <= n <= 5000, got {n}")
    if x[0] == x[-1]:
        raise DegenerateDataError("Shapiro-Wilk on a constant sample")
    a = shapiro_wilk_coefficients(n)
    ss = float(np.sum((x - x.mean()) ** 2))
    w = min(1.0, float(np.dot(a, x)) ** 2 / ss)
    return _decide(SHAPIRO_WILK, w, _shapiro_p(w, n), alpha, label)


# -- parametric ---------------------------------------------------------------

@dataclass(frozen=True)
class AnovaTable:
    ss_between: float
    ss_within: float
    ss_total: float
    df_between: int
    df_within: int

    @property
    def ms_between(self) -> float:
        return self.ss_between / self.df_between

    @property
    def ms_within(self) -> float:
        return self.ss_within / self.df_within if self.df_within else 0.0


def anova_table(gs: GroupedSamples) -> AnovaTable:
    arrays = gs.arrays()
    allv = np.concatenate(arrays)
    grand = allv.mean()
    ssb = float(sum(len(a) * (a.mean() - grand) ** 2 for a in arrays))
    ssw = float(sum(np.sum((a - a.mean()) ** 2) for a in arrays))
    sst = float(np.sum((allv - grand) ** 2))
    return AnovaTable(ssb, ssw, sst, gs.k - 1, len(allv) - gs.k)


def anova_oneway(gs: GroupedSamples, alpha: float = 0.05) -> TestOutcome:
    if min(gs.sizes) < 2:
        raise UnsupportedDesignError("ANOVA needs at least 2 values per group")
    t = anova_table(gs)
    msf, mse = t.ms_between, t.ms_within
    if mse == 0:
        if msf == 0:
            raise DegenerateDataError("ANOVA with zero between- and within-group variation")
        return _decide(ANOVA, math.inf, 0.0, alpha)
    f = msf / mse
    return _decide(ANOVA, f, sps.f.sf(f, t.df_between, t.df_within), alpha)


def lsd_pairwise(gs: GroupedSamples, alpha: float = 0.05) -> PairwiseMatrix:
    """Fisher's least significant difference on every pair of group means."""
    if min(gs.sizes) < 2:
        raise UnsupportedDesignError("LSD needs at least 2 values per group")
    t = anova_table(gs)
    if t.ss_between == 0 and t.ss_within == 0:
        raise DegenerateDataError("LSD with zero between- and within-group variation")
    thresholds = lsd_thresholds(gs, alpha)
    means = [a.mean() for a in gs.arrays()]
    cells = {ij: bool(abs(means[ij[0]] - means[ij[1]]) > lsd) for ij, lsd in thresholds.items()}
    return PairwiseMatrix(LSD, gs.labels, alpha, cells, {})


def lsd_thresholds(gs: GroupedSamples, alpha: float = 0.05) -> dict[tuple[int, int], float]:
    t = anova_table(gs)
    crit = sps.t.ppf(1 - alpha / 2, t.df_within)
    return {
        (i, j): float(crit * math.sqrt(t.ms_within * (1 / gs.sizes[i] + 1 / gs.sizes[j])))
        for i, j in combinations(range(gs.k), 2)
    }


# -- rank based -----------------------------------------------------------------

def kruskal_wallis(gs: GroupedSamples, alpha: float = 0.05) -> TestOutcome:
    allv = np.concatenate(gs.arrays())
    n = len(allv)
    if n < 3:
        raise UnsupportedSizeError(f"Kruskal-Wallis needs N >= 3, got {n}")
    ties = 1 - _tie_sum(allv) / (n**3 - n)
    if ties <= 0:
        raise DegenerateDataError("Kruskal-Wallis with every value tied")
    ranks = average_ranks(allv)
    h, start = 0.0, 0
    for size in gs.sizes:
        r = ranks[start:start + size].sum()
        h += r * r / size
        start += size
    h = (12.0 / (n * (n + 1)) * h - 3 * (n + 1)) / ties
    h = max(h, 0.0)
    return _decide(KRUSKAL_WALLIS, h, sps.chi2.sf(h, gs.k - 1), alpha)


EXACT_MW_LIMIT = 8


def _u_null_counts(na: int, nb: int) -> np.ndarray:
    """Number of arrangements giving each U value, 0..na*nb (no ties)."""
    # f[i][j] = counts polynomial for sizes (i, j); recurrence on the largest value
    table = {}

    def f(i, j):
        if (i, j) in table:
            return table[(i, j)]
        if i == 0 or j == 0:
            out = np.zeros(i * j + 1)
            out[0] = 1
        else:
            out = np.zeros(i * j + 1)
            left = f(i - 1, j)  # largest value belongs to sample a: adds j to U_a
            out[j:j + len(left)] += left
            right = f(i, j - 1)
            out[:len(right)] += right
        table[(i, j)] = out
        return out

    return f(na, nb)


def mann_whitney_u(
    a: Sequence[float],
    b: Sequence[float],
    alpha: float = 0.05,
    method: str = "auto",
    continuity: bool = True,
) -> TestOutcome:
    """Two-sided Mann-Whitney U test, ``U = min(U_a, U_b)``.

    ``method="auto"`` uses the exact null distribution when both samples
    have at most 8 values and there are no ties, otherwise the normal
    approximation with tie correction (and continuity correction unless
    disabled).
    """
    na, nb = len(a), len(b)
    if na < 1 or nb < 1:
        raise LabError("Mann-Whitney needs two non-empty samples")
    pooled = np.concatenate([np.asarray(a, float), np.asarray(b, float)])
    ranks = average_ranks(pooled)
    ra = ranks[:na].sum()
    u_a = na * nb + na * (na + 1) / 2 - ra
    u_b = na * nb - u_a
    u = min(u_a, u_b)
    tie_sum = _tie_sum(pooled)
    if method == "auto":
        method = "exact" if max(na, nb) <= EXACT_MW_LIMIT and tie_sum == 0 else "asymptotic"
    if method == "exact":
        if tie_sum:
            raise LabError("exact Mann-Whitney distribution needs untied data")
        counts = _u_null_counts(na, nb)
        p = min(1.0, 2 * counts[: int(round(u)) + 1].sum() / counts.sum())
    elif method == "asymptotic":
        n = na + nb
        var = na * nb / 12 * ((n + 1) - tie_sum / (n * (n - 1)))
        if var <= 0:
            p = 1.0
        else:
            dev = abs(u - na * nb / 2) - (0.5 if continuity else 0.0)
            p = min(1.0, 2 * sps.norm.sf(max(dev, 0.0) / math.sqrt(var)))
    else:
        raise LabError(f"unknown Mann-Whitney method {method!r}")
    return _decide(MANN_WHITNEY, u, p, alpha)


def pairwise_mw_matrix(
    gs: GroupedSamples, alphas: Sequence[float] = DEFAULT_ALPHAS, **mw_kwargs
) -> list[PairwiseMatrix]:
    pvals = {
        (i, j): mann_whitney_u(gs.values[i], gs.values[j], **mw_kwargs).p_value
        for i, j in combinations(range(gs.k), 2)
    }
    return [
        PairwiseMatrix(
            MANN_WHITNEY, gs.labels, alpha, {ij: p < alpha for ij, p in pvals.items()}, pvals
        )
        for alpha in alphas
    ]
