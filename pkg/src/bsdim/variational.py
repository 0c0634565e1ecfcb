"""Variational principles as optimization problems and certificate checks.

The dimension equals ``sup h(mu) / int u dmu`` over invariant measures. The
optimum is found by Dinkelbach iteration: at ``s_t`` the inner maximum of
``h - s_t int u`` is the pressure ``P(-s_t u)``, attained by the equilibrium
measure, and ``s_{t+1}`` is that measure's ratio. Random Markov measures act
as falsification probes of the weak-duality bound.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .caratheodory import SetSpec, build_tree, critical_exponent
from .errors import NoConvergence, ValidationError
from .shift_space import Potential, Sft
from .thermo import (
    MarkovMeasure,
    bowen_root,
    entropy,
    equilibrium_markov,
    integral_u,
    restrict_system,
    sample_local_ratios,
    stationary_distribution,
    topological_entropy,
    transition_costs,
)

MAX_OUTER = 500


@dataclass(frozen=True, eq=False)
class VariationalResult:
    best_measure: MarkovMeasure
    ratio: float
    s_star_reference: float
    gap: float
    trail: list[tuple[float, float]]  # (s_t, max of h - s_t int u)

    def to_json(self) -> dict:
        return {
            "ratio": self.ratio,
            "s_star_reference": self.s_star_reference,
            "gap": self.gap,
            "trail": [{"s": s, "attained": a} for s, a in self.trail],
            "best_measure": self.best_measure.to_json(),
        }


@dataclass(frozen=True)
class CertificateReport:
    s_star: float
    draws: list[dict]
    verdicts: dict[str, bool]
    seed: int | None = None
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    def to_json(self) -> dict:
        return {
            "s_star": self.s_star,
            "draws": self.draws,
            "verdicts": {k: ("pass" if v else "fail") for k, v in self.verdicts.items()},
            "seed": self.seed,
            "details": self.details,
        }


def maximize_ratio(sft: Sft, u: Potential, tol: float = 1e-10, max_iter: int = MAX_OUTER) -> VariationalResult:
    """Maximize ``h(mu) / int u dmu`` over Markov measures by Dinkelbach iteration.

    Starts from ``s_0 = h_top / max u``, a lower bound attained by the measure of
    maximal entropy. Stops once ``P(-s_t u) <= tol * u_min``, which bounds the
    distance to the optimum by ``tol``.
    """
    if not tol > 0:
        raise ValidationError(f"tolerance must be > 0, got {tol!r}")
    s = topological_entropy(sft) / u.max_value
    trail: list[tuple[float, float]] = []
    for _ in range(max_iter):
        mu = equilibrium_markov(sft, u, s)
        h, iu = entropy(mu), integral_u(mu, u)
        attained = h - s * iu
        trail.append((s, attained))
        s_next = h / iu
        if attained <= tol * u.min_value or s_next <= s:
            ref = bowen_root(sft, u, tol)
            return VariationalResult(mu, s_next, ref, abs(s_next - ref), trail)
        s = s_next
    raise NoConvergence(f"Dinkelbach iteration did not converge in {max_iter} steps")


# Inner objective over transition matrices. pi(P) = 1^T (I - P + J)^{-1} extends
# the stationary vector smoothly to all matrices near the stochastic ones, so
# the objective is differentiable in every supported entry separately.


def _support(costs: np.ndarray) -> np.ndarray:
    return ~np.isnan(costs)


def _row_terms(P: np.ndarray, costs: np.ndarray, s: float) -> np.ndarray:
    mask = _support(costs)
    safe = np.where(mask, P, 1.0)
    return np.where(mask, P * (-np.log(safe) - s * np.nan_to_num(costs)), 0.0)


def inner_objective(P: np.ndarray, costs: np.ndarray, s: float) -> float:
    """``h - s int u`` of the Markov measure with transition ``P``."""
    pi = stationary_distribution(P)
    return float(pi @ _row_terms(P, costs, s).sum(axis=1))


def inner_gradient(P: np.ndarray, costs: np.ndarray, s: float) -> np.ndarray:
    """Gradient of :func:`inner_objective` in the supported entries (zero elsewhere).

    ``dF/dP_ab = pi_a (-ln P_ab - 1 - s c_ab + (Z g)_b)`` with
    ``Z = (I - P + J)^{-1}`` and ``g`` the row terms.
    """
    n = P.shape[0]
    mask = _support(costs)
    Z = np.linalg.inv(np.eye(n) - P + np.ones((n, n)))
    pi = np.ones(n) @ Z
    g = _row_terms(P, costs, s).sum(axis=1)
    Zg = Z @ g
    safe = np.where(mask, P, 1.0)
    local = -np.log(safe) - 1.0 - s * np.nan_to_num(costs) + Zg[None, :]
    return np.where(mask, pi[:, None] * local, 0.0)


def finite_difference_gradient(P: np.ndarray, costs: np.ndarray, s: float, step: float = 1e-6) -> np.ndarray:
    grad = np.zeros_like(P)
    for a, b in zip(*np.nonzero(_support(costs))):
        up, down = P.copy(), P.copy()
        up[a, b] += step
        down[a, b] -= step
        grad[a, b] = (inner_objective(up, costs, s) - inner_objective(down, costs, s)) / (2 * step)
    return grad


def random_transition(costs: np.ndarray, rng: np.random.Generator, concentration: float = 1.0) -> np.ndarray:
    """Dirichlet rows on the support of ``costs``."""
    mask = _support(costs)
    P = np.zeros(costs.shape)
    for i in range(P.shape[0]):
        cols = np.flatnonzero(mask[i])
        P[i, cols] = rng.dirichlet(np.full(len(cols), concentration))
    return P


def mirror_ascent_inner(
    sft: Sft, u: Potential, s: float, steps: int = 2000, eta: float = 0.5, tol: float = 1e-12
) -> tuple[float, np.ndarray]:
    """Maximize ``h - s int u`` by exponentiated-gradient steps on each row.

    Each row's gradient is divided by its stationary weight, so the step is
    the same for rare and frequent states. An independent route to the value
    that :func:`pressure` computes spectrally.
    """
    states, costs = transition_costs(sft, u)
    mask = _support(costs)
    P = np.where(mask, 1.0, 0.0)
    P /= P.sum(axis=1, keepdims=True)
    value = inner_objective(P, costs, s)
    for _ in range(steps):
        pi = stationary_distribution(P)
        grad = inner_gradient(P, costs, s) / pi[:, None]
        logits = np.where(mask, np.log(np.where(mask, P, 1.0)) + eta * grad, -np.inf)
        logits -= logits.max(axis=1, keepdims=True)
        Q = np.exp(logits)
        P = Q / Q.sum(axis=1, keepdims=True)
        new = inner_objective(P, costs, s)
        if abs(new - value) <= tol:
            value = new
            break
        value = new
    return value, P


def mirror_ascent_ratio(sft: Sft, u: Potential, tol: float = 1e-9, max_iter: int = MAX_OUTER) -> float:
    """Dinkelbach with the inner maximum found by mirror ascent instead of spectrally."""
    states, costs = transition_costs(sft, u)
    s = topological_entropy(sft) / u.max_value
    for _ in range(max_iter):
        value, P = mirror_ascent_inner(sft, u, s)
        mu = MarkovMeasure(tuple(states), P, stationary_distribution(P))
        s_next = entropy(mu) / integral_u(mu, u)
        if abs(s_next - s) <= tol:
            return s_next
        s = s_next
    raise NoConvergence("mirror-ascent Dinkelbach did not converge")


def _record(mu: MarkovMeasure, u: Potential, ident: int) -> dict:
    h, iu = entropy(mu), integral_u(mu, u)
    return {"id": ident, "h": h, "int_u": iu, "ratio": h / iu}


def random_measure_certificate(
    sft: Sft,
    u: Potential,
    count: int,
    seed: int,
    tol: float = 1e-9,
    s_star: float | None = None,
) -> CertificateReport:
    """Weak duality on ``count`` random Markov measures: every ratio is at most ``s*``.

    Each draw has Dirichlet(1) rows on the allowed transitions and its own
    child seed of ``seed``. The report also records the best draw and how far
    it stays below ``s*``.
    """
    if count < 1:
        raise ValidationError(f"count must be >= 1, got {count!r}")
    s_ref = bowen_root(sft, u) if s_star is None else s_star
    states, costs = transition_costs(sft, u)
    draws = []
    for i, child in enumerate(np.random.SeedSequence(seed).spawn(count)):
        P = random_transition(costs, np.random.default_rng(child))
        mu = MarkovMeasure(tuple(states), P, stationary_distribution(P))
        draws.append(_record(mu, u, i))
    best = max(d["ratio"] for d in draws)
    verdicts = {
        "weak_duality": all(d["ratio"] <= s_ref + tol for d in draws),
        "best_below_optimum": best <= s_ref + tol,
    }
    details = {"best_ratio": best, "shortfall": s_ref - best, "tol": tol, "measure_class": "markov"}
    return CertificateReport(s_ref, draws, verdicts, seed, details)


def _target(sft: Sft, u: Potential, z: SetSpec | None):
    if z is None or (z.generators is None and z.sub_adjacency is None):
        return sft, u
    if z.sub_adjacency is None:
        raise ValidationError("variational checks need a sub-SFT target, not generator cylinders")
    sub, usub, _ = restrict_system(sft, u, z.sub_adjacency)
    return sub, usub


def local_global_check(
    sft: Sft,
    u: Potential,
    mu: MarkovMeasure,
    direction: int,
    depth_schedule: Sequence[int],
    z: SetSpec | None = None,
    cover_depth: int = 14,
    draws: int = 200,
    seed: int = 0,
    slack: float = 0.02,
) -> CertificateReport:
    """Local ratio bounds against the cover exponent of ``E``.

    Direction 1: ``s`` is the largest sampled ratio and the check is
    ``dim E <= s + slack``. Direction 2: ``s`` is the smallest and the check
    is ``s <= dim E + slack``. Ratios come from the deepest scheduled depth;
    ``mu`` must live on the shift whose words ``E`` is made of.
    """
    if direction not in (1, 2):
        raise ValidationError(f"direction must be 1 or 2, got {direction!r}")
    ratios = sample_local_ratios(mu, u, sft, depth_schedule, draws, seed)
    tree = build_tree(sft, z, cover_depth)
    dim = critical_exponent("cover", tree, u, max(1, cover_depth // 2))
    deepest = ratios[:, -1]
    if direction == 1:
        s = float(deepest.max())
        ok = dim <= s + slack
    else:
        s = float(deepest.min())
        ok = s <= dim + slack
    depths = sorted(int(d) for d in depth_schedule)
    per_depth = [
        {"depth": d, "min": float(ratios[:, j].min()), "max": float(ratios[:, j].max()), "mean": float(ratios[:, j].mean())}
        for j, d in enumerate(depths)
    ]
    details = {"direction": direction, "s": s, "cover_exponent": dim, "margin": (dim - s) if direction == 2 else (s - dim), "slack": slack, "local_samples": per_depth}
    return CertificateReport(dim, [], {f"local_global_{direction}": ok}, seed, details)


def packing_variational_check(
    sft: Sft,
    u: Potential,
    tol: float = 0.03,
    z: SetSpec | None = None,
    depth: int = 14,
    min_depth: int | None = None,
) -> CertificateReport:
    """Pack exponent of ``K`` against the variational optimum on ``K``.

    Uses the window ``[D - 2, D]`` by default: the finite-window excess of the
    pack exponent decays like ``1/N``. For the ambient shift, cover and pack
    exponents are also checked against the Bowen root.
    """
    sub, usub = _target(sft, u, z)
    opt = maximize_ratio(sub, usub)
    tree = build_tree(sft, z, depth)
    n_min = max(1, depth - 2) if min_depth is None else min_depth
    pack = critical_exponent("pack", tree, u, n_min)
    verdicts = {"pack_matches_optimum": abs(pack - opt.ratio) <= tol}
    details = {"pack_exponent": pack, "optimum": opt.ratio, "depth": depth, "min_depth": n_min, "tol": tol}
    if sub is sft:
        cover = critical_exponent("cover", tree, u, n_min)
        details["cover_exponent"] = cover
        verdicts["cover_matches_root"] = abs(cover - opt.s_star_reference) <= tol
        verdicts["pack_matches_root"] = abs(pack - opt.s_star_reference) <= tol
    return CertificateReport(opt.s_star_reference, [], verdicts, None, details)
