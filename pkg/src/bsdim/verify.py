"""Named invariant checks over one system, run together by ``bsdim verify``."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from .caratheodory import SetSpec, build_tree, cover_sum, critical_exponent
from .shift_space import Potential, Sft
from .thermo import (
    bowen_root_report,
    entropy,
    equilibrium_markov,
    integral_u,
    pressure,
    restrict_system,
    transition_costs,
)
from .variational import (
    finite_difference_gradient,
    inner_gradient,
    maximize_ratio,
    random_measure_certificate,
    random_transition,
)
from .weighted_frostman import (
    FEAS_TOL,
    duality_gap,
    frostman_measure,
    frostman_violation,
    weighted_cover_value,
)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: dict

    def to_json(self) -> dict:
        return {"name": self.name, "verdict": "pass" if self.passed else "fail", "detail": self.detail}


@dataclass(frozen=True)
class VerifyReport:
    checks: list[Check]
    seed: int

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "failures": self.failures,
            "seed": self.seed,
            "checks": [c.to_json() for c in self.checks],
        }


def run_suite(
    sft: Sft,
    u: Potential,
    depth: int,
    seed: int,
    z: SetSpec | None = None,
    min_depth: int | None = None,
    tol: float = 1e-10,
    draws: int = 100,
) -> VerifyReport:
    """Every invariant check on one system; sub-SFT targets are checked on their own system too."""
    n_min = max(1, depth // 2) if min_depth is None else min_depth
    tree = build_tree(sft, z, depth)
    if z is not None and z.sub_adjacency is not None:
        tsft, tu, _ = restrict_system(sft, u, z.sub_adjacency)
    else:
        tsft, tu = sft, u
    checks: list[Check] = []

    def add(name: str, fn: Callable[[], tuple[bool, dict]]) -> None:
        ok, detail = fn()
        checks.append(Check(name, bool(ok), detail))

    root = bowen_root_report(tsft, tu, tol)
    s_star = root.s_star
    grid = np.linspace(0.0, 2.0 * s_star + 0.5, 21)
    press = [pressure(tsft, tu, float(s)) for s in grid]

    def slope():
        h = float(grid[1] - grid[0])
        diffs = np.diff(press)
        lo = -h * tu.max_value - 1e-12
        hi = -h * tu.min_value + 1e-12
        return bool(np.all((diffs >= lo) & (diffs <= hi))), {"max_diff": float(diffs.max()), "min_diff": float(diffs.min())}

    def convex():
        second = np.diff(press, 2)
        return bool(second.min() >= -1e-12), {"min_second_difference": float(second.min())}

    def root_zero():
        return abs(root.pressure_at_root) <= tol * tu.min_value, {"s_star": s_star, "pressure": root.pressure_at_root}

    mu = equilibrium_markov(tsft, tu, s_star)

    def equilibrium_valid():
        rows = float(np.abs(mu.transition.sum(axis=1) - 1.0).max())
        res = mu.stationarity_residual()
        ok = rows <= 1e-12 and res <= 1e-10 and mu.stationary.min() >= 0 and abs(mu.stationary.sum() - 1) <= 1e-12
        return ok, {"row_error": rows, "stationarity_residual": res}

    def equilibrium_ratio():
        r = entropy(mu) / integral_u(mu, tu)
        return abs(r - s_star) <= 10 * tol, {"ratio": r, "s_star": s_star}

    opt = maximize_ratio(tsft, tu, tol)

    def strong_duality():
        return opt.gap <= 1e-6, {"ratio": opt.ratio, "gap": opt.gap}

    def dinkelbach():
        ss = [s for s, _ in opt.trail]
        inc = all(b > a for a, b in zip(ss, ss[1:]))
        err = max(abs(a - pressure(tsft, tu, s)) for s, a in opt.trail)
        return inc and err <= 1e-9, {"iterations": len(ss), "max_inner_error": err}

    cert = random_measure_certificate(tsft, tu, draws, seed, tol=1e-9, s_star=s_star)

    def weak_duality():
        return cert.verdicts["weak_duality"], {"best_ratio": cert.details["best_ratio"], "draws": draws}

    def gradient():
        _, costs = transition_costs(tsft, tu)
        rng = np.random.default_rng(seed)
        uniform = random_transition(costs, rng, concentration=1e6)
        worst = 0.0
        for _ in range(5):
            P = 0.5 * random_transition(costs, rng) + 0.5 * uniform
            a = inner_gradient(P, costs, s_star)
            b = finite_difference_gradient(P, costs, s_star)
            worst = max(worst, float(np.abs(a - b).max() / max(np.abs(b).max(), 1e-300)))
        return worst <= 1e-5, {"max_relative_error": worst}

    def scaling():
        c = 2.5
        scaled = tu.scaled(c)
        r2 = bowen_root_report(tsft, scaled, tol).s_star
        o2 = maximize_ratio(tsft, scaled, tol)
        t_err = float(np.abs(o2.best_measure.transition - opt.best_measure.transition).max())
        ok = abs(r2 * c - s_star) <= 1e-8 and abs(o2.ratio * c - opt.ratio) <= 1e-8 and t_err <= 1e-8
        return ok, {"root_scaled": r2, "ratio_scaled": o2.ratio, "transition_error": t_err}

    cover = critical_exponent("cover", tree, u, n_min)
    pack = critical_exponent("pack", tree, u, n_min)
    caps = {n: critical_exponent("capacity", tree, u, n_min, depth=n) for n in range(n_min, depth + 1)}

    def ordering():
        ok = cover <= pack + 1e-9 and all(cover <= c + 1e-9 and c <= pack + 1e-9 for c in caps.values())
        return ok, {"cover": cover, "pack": pack, "capacity": {str(n): c for n, c in caps.items()}}

    def weighted_equals_cover():
        w = weighted_cover_value(tree, u, s_star, n_min).objective
        m = cover_sum(tree, u, s_star, n_min).value
        return abs(w - m) <= FEAS_TOL * (1 + m), {"W": w, "M": m}

    def frostman():
        fm = frostman_measure(tree, u, s_star, n_min)
        viol = frostman_violation(tree, u, fm, n_min)
        gap = duality_gap(tree, u, s_star, n_min)
        return viol <= FEAS_TOL and gap <= FEAS_TOL * (1 + fm.total_mass), {"violation": viol, "gap": gap}

    def level_counts():
        if z is not None:
            return True, {"skipped": "target is not the whole shift"}
        mism = [n for n in range(depth + 1) if tree.level_size(n) != sft.word_count(n)]
        return not mism, {"mismatched_depths": mism}

    add("pressure_slope_bounds", slope)
    add("pressure_convexity", convex)
    add("bowen_root_zero", root_zero)
    add("equilibrium_valid", equilibrium_valid)
    add("equilibrium_ratio_at_root", equilibrium_ratio)
    add("strong_duality", strong_duality)
    add("dinkelbach_monotone", dinkelbach)
    add("weak_duality", weak_duality)
    add("gradient_check", gradient)
    add("scaling_law", scaling)
    add("cover_capacity_pack_ordering", ordering)
    add("weighted_equals_cover", weighted_equals_cover)
    add("frostman_feasible_and_tight", frostman)
    add("level_counts", level_counts)
    return VerifyReport(checks, seed)
