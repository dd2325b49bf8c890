"""Unbiased frequency estimators, variances, mixing, and budget planning."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from statistics import NormalDist

from .catalog import PHI4_1, PHI5_1, PHI5_2, PHI5_3
from .weights import WeightIndex

_NORMAL = NormalDist()

OMEGA1 = frozenset(i for i in range(1, 22) if PHI5_1[i] > 0)
OMEGA2 = frozenset(i for i in range(1, 22) if PHI5_2[i] > 0)
OMEGA3 = frozenset(i for i in range(1, 22) if PHI5_3[i] > 0)
OMEGA3_STAR = OMEGA3 - {2}
OMEGA1_ONLY = OMEGA1 - OMEGA2
OMEGA2_ONLY = OMEGA2 - OMEGA1
OMEGA_BOTH = OMEGA1 & OMEGA2


def z_quantile(level: float) -> float:
    if not 0.0 < level < 1.0:
        raise ValueError("confidence level must lie in (0, 1)")
    return _NORMAL.inv_cdf(0.5 + level / 2.0)


def gaussian_tail_bound(epsilon: float) -> float:
    """Upper tail approximation: P(|Z| deviation > eps sigma) ~ e^{-eps^2/2}/(sqrt(2 pi) eps)."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    return math.exp(-epsilon * epsilon / 2.0) / (math.sqrt(2.0 * math.pi) * epsilon)


def _tail_epsilon(delta: float) -> float:
    # invert the tail approximation by bisection; bound is decreasing in eps
    lo, hi = 1e-9, 60.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if gaussian_tail_bound(mid) > delta:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def confidence_interval(estimate: float, variance: float, level: float,
                        mode: str = "normal") -> float:
    """Half-width of the CI around `estimate` at the given level."""
    if variance < 0:
        raise ValueError("variance must be nonnegative")
    if not 0.0 < level < 1.0:
        raise ValueError("confidence level must lie in (0, 1)")
    if mode == "normal":
        z = z_quantile(level)
    elif mode == "tail":
        z = _tail_epsilon(1.0 - level)
    else:
        raise ValueError(f"unknown CI mode {mode!r}")
    return z * math.sqrt(variance)


def mix_estimates(a: tuple[float, float], b: tuple[float, float]) -> tuple[float, float]:
    """Inverse-variance combination of two independent unbiased estimates.

    Each argument is (estimate, variance).  A zero-variance input is exact
    and wins outright; two zero-variance inputs return the first.
    """
    (ea, va), (eb, vb) = a, b
    if va < 0 or vb < 0:
        raise ValueError("variance must be nonnegative")
    if va == 0:
        return ea, 0.0
    if vb == 0:
        return eb, 0.0
    wa = 1.0 / va
    wb = 1.0 / vb
    return (wa * ea + wb * eb) / (wa + wb), 1.0 / (wa + wb)


def plan_budget(p: float, pilot_estimate: float, epsilon: float, delta: float) -> int:
    """Smallest K with z * sqrt((1/(p n) - 1)/K) <= epsilon n (relative error)."""
    if pilot_estimate <= 0:
        raise ValueError("pilot produced no hits; increase pilot budget")
    if p <= 0:
        raise ValueError("inclusion probability must be positive")
    if epsilon <= 0 or not 0.0 < delta < 1.0:
        raise ValueError("need epsilon > 0 and 0 < delta < 1")
    z = z_quantile(1.0 - delta)
    val = 1.0 / (p * pilot_estimate) - 1.0
    if val <= 0:
        return 1
    return max(1, math.ceil(z * z * val / (epsilon * epsilon)))


def inclusion_probabilities(method: str, index: WeightIndex) -> dict[int, Fraction]:
    """Per-motif single-trial inclusion probabilities for one method."""
    if method == "moss4":
        return {i: Fraction(2 * PHI4_1[i], index.total_gamma)
                for i in (1, 3, 4, 5, 6)}
    if method == "moss4min":
        g = index.total_gamma_check
        return {3: Fraction(2, g), 5: Fraction(2, g), 6: Fraction(6, g)}
    if method == "t5":
        return {i: Fraction(2 * PHI5_1[i], index.total_gamma1) for i in sorted(OMEGA1)}
    if method == "path5":
        return {i: Fraction(2 * PHI5_2[i], index.total_gamma2) for i in sorted(OMEGA2)}
    raise ValueError(f"unknown method {method!r}")


@dataclass
class EstimateReport:
    """Estimates with analytic variance, CIs, and the constants that made them."""
    method: str
    k: int
    estimates: dict[int, float]
    variances: dict[int, float]
    inclusion: dict[int, float]
    covariances: dict[str, float] = field(default_factory=dict)
    mixing: dict[int, tuple[float, float]] = field(default_factory=dict)
    constants: dict[str, int] = field(default_factory=dict)
    budgets: dict[str, int] = field(default_factory=dict)
    level: float = 0.95
    ci_mode: str = "normal"
    seed: int | None = None
    nrmse: dict[int, float] = field(default_factory=dict)

    def stderr(self, motif_id: int) -> float | None:
        est = self.estimates.get(motif_id, 0.0)
        if est <= 0:
            return None
        return math.sqrt(self.variances.get(motif_id, 0.0)) / est

    def ci(self, motif_id: int) -> tuple[float, float]:
        hw = confidence_interval(self.estimates[motif_id],
                                 self.variances.get(motif_id, 0.0),
                                 self.level, self.ci_mode)
        est = self.estimates[motif_id]
        return est - hw, est + hw

    def motif_ids(self):
        return sorted(self.estimates)

    def rows(self) -> list[dict]:
        out = []
        for i in self.motif_ids():
            lo, hi = self.ci(i)
            se = self.stderr(i)
            out.append({"motif_id": i,
                        "estimate": self.estimates[i],
                        "variance": self.variances.get(i, 0.0),
                        "stderr": "" if se is None else se,
                        "nrmse": self.nrmse.get(i, ""),
                        "ci_low": lo, "ci_high": hi})
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        cols = ["motif_id", "estimate", "variance", "stderr", "nrmse",
                "ci_low", "ci_high"]
        writer = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        writer.writeheader()
        for row in self.rows():
            writer.writerow(row)
        return buf.getvalue()

    def to_json_obj(self) -> dict:
        return {
            "method": self.method, "k": self.k,
            "estimates": {str(i): v for i, v in sorted(self.estimates.items())},
            "variances": {str(i): v for i, v in sorted(self.variances.items())},
            "inclusion": {str(i): v for i, v in sorted(self.inclusion.items())},
            "covariances": dict(self.covariances),
            "mixing": {str(i): list(v) for i, v in sorted(self.mixing.items())},
            "constants": {k: int(v) for k, v in self.constants.items()},
            "budgets": dict(self.budgets),
            "level": self.level, "ci_mode": self.ci_mode, "seed": self.seed,
            "nrmse": {str(i): v for i, v in sorted(self.nrmse.items())},
            "rows": self.rows(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2)


def _plugin_gap(inv_p: float, estimate: float) -> float:
    # 1/p - n with the run's own estimate standing in for n; since
    # p*n <= 1 always, a negative plug-in gap is sampling noise: clamp.
    return max(inv_p - estimate, 0.0)


def estimate_moss4(tally, index: WeightIndex, level: float = 0.95,
                   ci_mode: str = "normal", seed: int | None = None) -> EstimateReport:
    if tally.method != "moss4":
        raise ValueError("tally was not produced by the moss4 sampler")
    K = tally.budget
    if K <= 0:
        raise ValueError("tally has zero budget")
    p = {i: float(f) for i, f in inclusion_probabilities("moss4", index).items()}
    est = {i: tally.hits.get(i, 0) / (K * p[i]) for i in (1, 3, 4, 5, 6)}
    est[2] = index.lambda3 - est[4] - 2 * est[5] - 4 * est[6]
    var = {i: est[i] * _plugin_gap(1.0 / p[i], est[i]) / K for i in (1, 3, 4, 5, 6)}
    var[2] = (est[4] / p[4] + 4 * est[5] / p[5] + 16 * est[6] / p[6]
              - (est[4] + 2 * est[5] + 4 * est[6]) ** 2) / K
    var[2] = max(var[2], 0.0)
    cov = {f"{i},{j}": -est[i] * est[j] / K
           for i in (1, 3, 4, 5, 6) for j in (1, 3, 4, 5, 6) if i < j}
    return EstimateReport(
        "moss4", 4, est, var, {i: float(v) for i, v in p.items()}, cov, {},
        index.constants(), {"K": K}, level, ci_mode, seed)


def estimate_moss4min(tally, index: WeightIndex, level: float = 0.95,
                      ci_mode: str = "normal", seed: int | None = None) -> EstimateReport:
    if tally.method != "moss4min":
        raise ValueError("tally was not produced by the moss4min sampler")
    K = tally.budget
    if K <= 0:
        raise ValueError("tally has zero budget")
    p = {i: float(f) for i, f in inclusion_probabilities("moss4min", index).items()}
    est = {i: tally.hits.get(i, 0) / (K * p[i]) for i in (3, 5, 6)}
    var = {i: est[i] * _plugin_gap(1.0 / p[i], est[i]) / K for i in (3, 5, 6)}
    return EstimateReport(
        "moss4min", 4, est, var, p, {}, {},
        index.constants(), {"K": K}, level, ci_mode, seed)


def _lambda_weights(inv_p1: float, inv_p2: float, eta_bar: float,
                    K1: int, K2: int) -> tuple[float, float]:
    # lambda_1 ~ Var^(2)/eta = (1/p2 - eta)/K2; common eta factor cancelled
    a = inv_p2 - eta_bar
    b = inv_p1 - eta_bar
    if a <= 0 or b <= 0:
        a, b = inv_p2, inv_p1
    l1 = a / K2
    l2 = b / K1
    s = l1 + l2
    return l1 / s, l2 / s


def estimate_moss5(tally_t5, tally_path5, index: WeightIndex,
                   level: float = 0.95, ci_mode: str = "normal",
                   seed: int | None = None) -> EstimateReport:
    """Combined 5-node report: mix of the two samplers plus the star identity."""
    if tally_t5.method != "t5" or tally_path5.method != "path5":
        raise ValueError("estimate_moss5 needs one t5 tally and one path5 tally")
    K1, K2 = tally_t5.budget, tally_path5.budget
    if K1 <= 0 or K2 <= 0:
        raise ValueError("both sub-method budgets must be positive")
    p1 = {i: float(f) for i, f in inclusion_probabilities("t5", index).items()}
    p2 = {i: float(f) for i, f in inclusion_probabilities("path5", index).items()}
    sub1 = {i: tally_t5.hits.get(i, 0) / (K1 * p1[i]) for i in OMEGA1}
    sub2 = {i: tally_path5.hits.get(i, 0) / (K2 * p2[i]) for i in OMEGA2}

    est: dict[int, float] = {}
    var: dict[int, float] = {}
    lam: dict[int, tuple[float, float]] = {}
    for i in sorted(OMEGA1 | OMEGA2):
        if i in OMEGA1_ONLY:
            est[i] = sub1[i]
            var[i] = est[i] * _plugin_gap(1.0 / p1[i], est[i]) / K1
        elif i in OMEGA2_ONLY:
            est[i] = sub2[i]
            var[i] = est[i] * _plugin_gap(1.0 / p2[i], est[i]) / K2
        else:
            eta_bar = (K1 * sub1[i] + K2 * sub2[i]) / (K1 + K2)
            l1, l2 = _lambda_weights(1.0 / p1[i], 1.0 / p2[i], eta_bar, K1, K2)
            lam[i] = (l1, l2)
            est[i] = l1 * sub1[i] + l2 * sub2[i]
            v1 = est[i] * _plugin_gap(1.0 / p1[i], est[i]) / K1
            v2 = est[i] * _plugin_gap(1.0 / p2[i], est[i]) / K2
            var[i] = (v1 * v2 / (v1 + v2)) if (v1 > 0 and v2 > 0) else 0.0

    def cov_pair(i: int, j: int) -> float:
        return _mix_covariance(i, j, est[i], est[j], lam, K1, K2)

    cov: dict[str, float] = {}
    star = sorted(OMEGA3_STAR)
    eta2 = float(index.lambda4) - sum(PHI5_3[i] * est[i] for i in star)
    var2 = sum(PHI5_3[i] ** 2 * var[i] for i in star)
    for a in range(len(star)):
        for b in range(a + 1, len(star)):
            i, j = star[a], star[b]
            c = cov_pair(i, j)
            cov[f"{i},{j}"] = c
            var2 += 2 * PHI5_3[i] * PHI5_3[j] * c
    est[2] = eta2
    var[2] = max(var2, 0.0)

    return EstimateReport(
        "moss5", 5, est, var,
        {**{i: p1[i] for i in OMEGA1_ONLY}, **{i: p2[i] for i in OMEGA2_ONLY},
         **{i: p1[i] for i in OMEGA_BOTH}},
        cov, lam, index.constants(), {"K1": K1, "K2": K2},
        level, ci_mode, seed)


def _mix_covariance(i: int, j: int, eta_i: float, eta_j: float,
                    lam: dict[int, tuple[float, float]], K1: int, K2: int) -> float:
    """Covariance of the mixed estimators; the case table applied symmetrically."""
    in_both_i, in_both_j = i in OMEGA_BOTH, j in OMEGA_BOTH
    if in_both_i and in_both_j:
        li, lj = lam[i], lam[j]
        return -eta_i * eta_j * (li[0] * lj[0] / K1 + li[1] * lj[1] / K2)
    if in_both_i or in_both_j:
        if not in_both_i:
            i, j = j, i   # now i is the mixed one
        li = lam[i]
        if j in OMEGA1_ONLY:
            return -li[0] * eta_i * eta_j / K1
        return -li[1] * eta_i * eta_j / K2
    if (i in OMEGA1_ONLY and j in OMEGA1_ONLY):
        return -eta_i * eta_j / K1
    if (i in OMEGA2_ONLY and j in OMEGA2_ONLY):
        return -eta_i * eta_j / K2
    return 0.0


def estimate_single5(tally, index: WeightIndex, level: float = 0.95,
                     ci_mode: str = "normal", seed: int | None = None) -> EstimateReport:
    """Report from one 5-node sampler alone, over the classes it can see."""
    method = tally.method
    if method not in ("t5", "path5"):
        raise ValueError("expected a t5 or path5 tally")
    K = tally.budget
    if K <= 0:
        raise ValueError("tally has zero budget")
    p = {i: float(f) for i, f in inclusion_probabilities(method, index).items()}
    est = {i: tally.hits.get(i, 0) / (K * p[i]) for i in sorted(p)}
    var = {i: est[i] * _plugin_gap(1.0 / p[i], est[i]) / K for i in sorted(p)}
    cov = {f"{i},{j}": -est[i] * est[j] / K
           for i in sorted(p) for j in sorted(p) if i < j}
    return EstimateReport(method, 5, est, var, p, cov, {},
                          index.constants(), {"K": K}, level, ci_mode, seed)


def error_metrics(run_estimates: list[dict[int, float]], ground_truth: dict[int, int],
                  analytic_variance: dict[int, float] | None = None) -> dict:
    """NRMSE over repeated runs, plus StdErr from the true-value variances."""
    if len(run_estimates) < 2:
        raise ValueError("need at least two runs")
    nrmse: dict[int, float] = {}
    stderr: dict[int, float] = {}
    ids = set()
    for run in run_estimates:
        ids.update(run)
    for i in sorted(ids):
        truth = ground_truth.get(i, 0)
        if truth == 0:
            continue
        sq = [(run.get(i, 0.0) - truth) ** 2 for run in run_estimates]
        nrmse[i] = math.sqrt(sum(sq) / len(sq)) / truth
        if analytic_variance is not None and i in analytic_variance:
            stderr[i] = math.sqrt(max(analytic_variance[i], 0.0)) / truth
    return {"nrmse": nrmse, "stderr": stderr}


def analytic_variance_moss4(truth: dict[int, int], index: WeightIndex, K: int) -> dict[int, float]:
    """Closed-form variances evaluated at the true counts."""
    p = {i: float(f) for i, f in inclusion_probabilities("moss4", index).items()}
    var = {i: truth.get(i, 0) * (1.0 / p[i] - truth.get(i, 0)) / K
           for i in (1, 3, 4, 5, 6)}
    n4, n5, n6 = (truth.get(i, 0) for i in (4, 5, 6))
    var[2] = (n4 / p[4] + 4 * n5 / p[5] + 16 * n6 / p[6]
              - (n4 + 2 * n5 + 4 * n6) ** 2) / K
    return var


def analytic_variance_moss4min(truth: dict[int, int], index: WeightIndex, K: int) -> dict[int, float]:
    p = {i: float(f) for i, f in inclusion_probabilities("moss4min", index).items()}
    return {i: truth.get(i, 0) * (1.0 / p[i] - truth.get(i, 0)) / K for i in (3, 5, 6)}


def analytic_variance_moss5(truth: dict[int, int], index: WeightIndex,
                            K1: int, K2: int) -> tuple[dict[int, float],
                                                       dict[int, tuple[float, float]]]:
    """True-value variances and lambda weights for the mixed 5-node estimator."""
    p1 = {i: float(f) for i, f in inclusion_probabilities("t5", index).items()}
    p2 = {i: float(f) for i, f in inclusion_probabilities("path5", index).items()}
    var: dict[int, float] = {}
    lam: dict[int, tuple[float, float]] = {}
    for i in sorted(OMEGA1 | OMEGA2):
        eta = truth.get(i, 0)
        if i in OMEGA1_ONLY:
            var[i] = eta * (1.0 / p1[i] - eta) / K1
        elif i in OMEGA2_ONLY:
            var[i] = eta * (1.0 / p2[i] - eta) / K2
        else:
            v1 = eta * (1.0 / p1[i] - eta) / K1
            v2 = eta * (1.0 / p2[i] - eta) / K2
            if v1 + v2 > 0:
                lam[i] = (v2 / (v1 + v2), v1 / (v1 + v2))
                var[i] = v1 * v2 / (v1 + v2)
            else:
                l1, l2 = _lambda_weights(1.0 / p1[i], 1.0 / p2[i], float(eta), K1, K2)
                lam[i] = (l1, l2)
                var[i] = 0.0
    star = sorted(OMEGA3_STAR)
    var2 = sum(PHI5_3[i] ** 2 * var[i] for i in star)
    for a in range(len(star)):
        for b in range(a + 1, len(star)):
            i, j = star[a], star[b]
            var2 += 2 * PHI5_3[i] * PHI5_3[j] * _mix_covariance(
                i, j, float(truth.get(i, 0)), float(truth.get(j, 0)), lam, K1, K2)
    var[2] = var2
    return var, lam
