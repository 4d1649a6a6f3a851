"""Proof-chain replays, regime classification, ratio scans, and search.

The pipeline functions re-run the counting argument behind each growth
theorem on a concrete ring and set, asserting every exact step (lower
bound on the solution count, Cauchy-Schwarz, edge-count identities,
mixing inequality) and reporting the constant-bearing conclusions only
as ratios, since implied constants carry no testable content at desk
scale.  Asymptotically flavored steps degrade gracefully: when a dense
graph or a pairwise count is out of reach, the pipeline keeps whatever
inequality is still provable from the theoretical second singular value
and marks the rest skipped.
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from itertools import combinations
from statistics import median
from typing import Optional, Sequence, Union

from .config import Caps, DEFAULT_CAPS, SPECTRAL_TOL, derive_seed, thread_count
from .errors import BadSize, NotUnits
from .graph import (
    build_graph,
    class_count,
    class_degree,
    edge_count,
    embed_energy_sets,
    embed_solution_sets,
    lambda3_bound,
    pair_edge_count,
    resolve_lambda3,
)
from .ring import ElementFilter, Ring
from .sets import (
    ElementSet,
    count_form_solutions,
    form_energy,
    iterated_sumset,
    restrict_to_units,
    sample_unit_subset,
    square_set,
    sumset,
    triple_product_sizes,
)

__all__ = [
    "PipelineReport",
    "RegimeVerdict",
    "verify_thm1_pipeline",
    "verify_thm2_pipeline",
    "check_square_halving",
    "classify_regime",
    "bound_ratio_scan",
    "extremal_search",
    "verify_hpv",
]


@dataclass
class PipelineReport:
    kind: str
    ring: str
    n: int
    d: int
    sizes: dict
    counts: dict
    embed: dict
    mixing: dict
    steps: dict
    ratio: dict
    hypothesis: Optional[dict]
    warnings: list
    hard_pass: bool

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class RegimeVerdict:
    regime: Optional[int]
    constants: dict
    thresholds: dict
    sizes: dict
    lhs: int
    rhs: Optional[float]
    ratio: Optional[float]
    hypothesis_met: bool
    empty_regimes: list

    def to_dict(self) -> dict:
        return asdict(self)


def _recommended_floor(ring: Ring) -> int:
    return 2 * ring.size // ring.q


def _prepare(a: ElementSet, warnings: list) -> ElementSet:
    floor = _recommended_floor(a.ring)
    if a.card < floor:
        warnings.append(
            f"|A| = {a.card} is below the recommended floor 2*q^(r-1) = {floor}"
        )
    restricted = restrict_to_units(a)
    if restricted.card < a.card:
        warnings.append(
            f"dropped {a.card - restricted.card} non-unit elements before counting"
        )
    return restricted


def _edge_route(ring: Ring, d: int, emb, caps: Caps) -> dict:
    """Resolve e(U, V) by the best available route and price the mixing bound."""
    n_cls = class_count(ring, d)
    deg = class_degree(ring, d)
    edges = None
    mode = "bound-only"
    lam, kind = lambda3_bound(ring, d), "theoretical"
    if emb.u_rows is not None:
        if n_cls <= caps.max_graph_classes:
            g = build_graph(ring, d, caps.max_graph_classes)
            edges = edge_count(g, g.index_of(emb.u_rows), g.index_of(emb.v_rows))
            lam, kind = resolve_lambda3(g, None, caps.spectral_cap)
            mode = "graph"
        elif emb.u_count * emb.v_count <= caps.max_pair_count:
            edges = pair_edge_count(ring, emb.u_rows, emb.v_rows, caps)
            mode = "direct"
    pair_geom = math.sqrt(emb.u_count * emb.v_count)
    main = deg * emb.u_count * emb.v_count / n_cls
    return {
        "classes_per_side": n_cls,
        "degree": deg,
        "edges": edges,
        "mode": mode,
        "lambda3": lam,
        "lambda3_kind": kind,
        "main_term": main,
        "edge_bound": main + lam * pair_geom,
    }


def _step(passed: Optional[bool], mode: str, detail: str) -> dict:
    return {"passed": passed, "mode": mode, "detail": detail}


def _common_sizes(a_in: ElementSet, a: ElementSet, n: int):
    s = sumset(a, a)
    sq = square_set(a)
    tgt = iterated_sumset(sq, n) if sq.card else ElementSet.empty(a.ring)
    sizes = {
        "a": a_in.card,
        "a_units": a.card,
        "a_plus_a": s.card,
        "a_sq": sq.card,
        "n_a_sq": tgt.card,
    }
    return s, sq, tgt, sizes


def verify_thm1_pipeline(
    a_in: ElementSet, n: int, caps: Caps = DEFAULT_CAPS
) -> PipelineReport:
    """Replay the solution-count argument in dimension n + 1."""
    ring = a_in.ring
    warnings: list = []
    a = _prepare(a_in, warnings)
    s, sq, tgt, sizes = _common_sizes(a_in, a, n)
    k = a.card

    sol = count_form_solutions(a, n, caps)
    lower = sq.card * k ** (2 * n - 2)
    counts = {
        "solutions": sol,
        "energy": None,
        "solution_density": (sol / k ** (2 * n - 1)) if k else None,
    }
    steps = {
        "solution_lower_bound": _step(
            sol >= lower, "exact", f"N = {sol} >= |A^2|*|A|^(2n-2) = {lower}"
        )
    }

    emb = embed_solution_sets(a, n, caps)
    route = _edge_route(ring, n + 1, emb, caps)
    edges = route["edges"]
    if edges is not None:
        steps["solutions_le_edges"] = _step(
            sol <= edges, "exact", f"N = {sol} vs e(U,V) = {edges}"
        )
        steps["edges_le_mixing_bound"] = _step(
            edges <= route["edge_bound"] + SPECTRAL_TOL,
            "exact",
            f"e(U,V) = {edges} vs bound = {route['edge_bound']:.6f}",
        )
    else:
        steps["solutions_le_edges"] = _step(None, "skipped", "no edge count available")
        steps["solutions_le_mixing_bound"] = _step(
            sol <= route["edge_bound"] + SPECTRAL_TOL,
            "bound-only",
            f"N = {sol} vs bound = {route['edge_bound']:.6f}",
        )

    q, r = ring.q, ring.r
    rhs = (
        min(
            q ** (r / n) * k ** ((n - 1) / n),
            k ** ((3 * n - 2) / n) / q ** ((n - 1) * (2 * r - 1) / n),
        )
        if k
        else 0.0
    )
    lhs = max(tgt.card, s.card)
    ratio = {"lhs": lhs, "rhs": rhs, "ratio": (lhs / rhs) if rhs > 0 else None}

    embed_info = {
        "u_size": emb.u_count,
        "v_size": emb.v_count,
        "audit": emb.audit,
        **route,
    }
    hard = all(st["passed"] for st in steps.values() if st["passed"] is not None)
    return PipelineReport(
        kind="thm1",
        ring=ring.descriptor,
        n=n,
        d=n + 1,
        sizes=sizes,
        counts=counts,
        embed=embed_info,
        mixing={
            "main_term": route["main_term"],
            "lambda3": route["lambda3"],
            "lambda3_kind": route["lambda3_kind"],
            "edge_bound": route["edge_bound"],
        },
        steps=steps,
        ratio=ratio,
        hypothesis=None,
        warnings=warnings,
        hard_pass=hard,
    )


def verify_thm2_pipeline(
    a_in: ElementSet, n: int, caps: Caps = DEFAULT_CAPS
) -> PipelineReport:
    """Replay the energy argument in dimension 2n."""
    ring = a_in.ring
    warnings: list = []
    a = _prepare(a_in, warnings)
    s, sq, tgt, sizes = _common_sizes(a_in, a, n)
    k = a.card

    sol = count_form_solutions(a, n, caps)
    energy = form_energy(a, n, caps)
    lower = sq.card * k ** (2 * n - 2)
    counts = {
        "solutions": sol,
        "energy": energy,
        "solution_density": (sol / k ** (2 * n - 1)) if k else None,
    }
    steps = {
        "solution_lower_bound": _step(
            sol >= lower, "exact", f"N = {sol} >= |A^2|*|A|^(2n-2) = {lower}"
        ),
        "cauchy_schwarz": _step(
            sol * sol <= tgt.card * energy,
            "exact",
            f"N^2 = {sol * sol} vs |nA^2|*E = {tgt.card * energy}",
        ),
    }

    emb = embed_energy_sets(a, n, caps)
    route = _edge_route(ring, 2 * n, emb, caps)
    edges = route["edges"]
    if edges is not None:
        steps["energy_le_edges"] = _step(
            energy <= edges, "exact", f"E = {energy} vs e(U,V) = {edges}"
        )
        steps["edges_le_mixing_bound"] = _step(
            edges <= route["edge_bound"] + SPECTRAL_TOL,
            "exact",
            f"e(U,V) = {edges} vs bound = {route['edge_bound']:.6f}",
        )
    else:
        steps["energy_le_edges"] = _step(None, "skipped", "no edge count available")
        steps["energy_le_mixing_bound"] = _step(
            energy <= route["edge_bound"] + SPECTRAL_TOL,
            "bound-only",
            f"E = {energy} vs bound = {route['edge_bound']:.6f}",
        )

    q, r = ring.q, ring.r
    rhs = q ** (r / (2 * n - 1)) * k ** ((2 * n - 2) / (2 * n - 1)) if k else 0.0
    lhs = max(s.card, tgt.card)
    ratio = {"lhs": lhs, "rhs": rhs, "ratio": (lhs / rhs) if rhs > 0 else None}
    hyp_lhs = s.card ** (n - 1) * k**n
    hyp_rhs = q ** (r + (n - 1) * (2 * r - 1))
    hypothesis = {"lhs": hyp_lhs, "rhs": hyp_rhs, "met": hyp_lhs >= hyp_rhs}

    embed_info = {
        "u_size": emb.u_count,
        "v_size": emb.v_count,
        "audit": emb.audit,
        **route,
    }
    hard = all(st["passed"] for st in steps.values() if st["passed"] is not None)
    return PipelineReport(
        kind="thm2",
        ring=ring.descriptor,
        n=n,
        d=2 * n,
        sizes=sizes,
        counts=counts,
        embed=embed_info,
        mixing={
            "main_term": route["main_term"],
            "lambda3": route["lambda3"],
            "lambda3_kind": route["lambda3_kind"],
            "edge_bound": route["edge_bound"],
        },
        steps=steps,
        ratio=ratio,
        hypothesis=hypothesis,
        warnings=warnings,
        hard_pass=hard,
    )


# -- square halving -------------------------------------------------------------


def check_square_halving(
    ring: Ring, exhaustive_limit: int, samples: int = 200, seed: int = 0
) -> dict:
    """Check |A|/2 <= |A^2| <= |A| over unit subsets, plus the fiber audit.

    Subsets of size up to ``exhaustive_limit`` are enumerated, larger
    sizes are sampled.  The two-to-one structure is verified first: the
    preimage of each unit square is exactly a pair {y, -y}.
    """
    units = [int(u) for u in ring.indices(ElementFilter.UNITS)]
    sq_of = {u: ring.mul(u, u) for u in units}
    fibers: dict = {}
    for u in units:
        fibers.setdefault(sq_of[u], set()).add(u)
    fiber_ok = all(
        fib == {y, ring.neg(y)} and len(fib) == 2
        for v, fib in fibers.items()
        for y in [next(iter(fib))]
    )

    violations = []
    checked_exhaustive = 0
    checked_sampled = 0

    def check(subset) -> None:
        card = len(subset)
        sq_card = len({sq_of[u] for u in subset})
        if not (2 * sq_card >= card and sq_card <= card):
            violations.append({"set": sorted(subset), "sq_card": sq_card})

    top = min(exhaustive_limit, len(units))
    for size in range(1, top + 1):
        for combo in combinations(units, size):
            check(combo)
            checked_exhaustive += 1
    rng = random.Random(seed)
    for size in range(top + 1, len(units) + 1):
        for _ in range(samples):
            check(rng.sample(units, size))
            checked_sampled += 1

    return {
        "ring": ring.descriptor,
        "exhaustive_limit": exhaustive_limit,
        "checked_exhaustive": checked_exhaustive,
        "checked_sampled": checked_sampled,
        "fiber_ok": fiber_ok,
        "violations": violations,
        "passed": fiber_ok and not violations,
    }


# -- regime classification --------------------------------------------------------


def _regime_core(
    q: int, r: int, size: int, aa_card: int, constants: Sequence[float]
) -> tuple[Optional[int], dict, bool, Optional[float]]:
    c1, c2, c3 = constants
    t1 = c1 * q ** (r - 1 / 3)
    t2 = c2 * q ** (r - 3 / 8)
    floor = 2 * q ** (r - 1)
    hyp_rhs = c3 * q ** (3 * r - 1)
    hyp = aa_card * size**2 >= hyp_rhs
    thresholds = {
        "regime1_min_size": t1,
        "regime2_min_size": t2,
        "regime3_min_size": float(floor),
        "hypothesis_rhs": hyp_rhs,
    }
    if size >= t1:
        return 1, thresholds, hyp, q ** (r / 2) * math.sqrt(size)
    if size >= t2:
        return 2, thresholds, hyp, size**2 / q ** ((2 * r - 1) / 2)
    if size >= floor and hyp:
        return 3, thresholds, hyp, q ** (r / 3) * size ** (2 / 3)
    return None, thresholds, hyp, None


def classify_regime(
    a: ElementSet, constants: Sequence[float] = (1.0, 1.0, 1.0)
) -> RegimeVerdict:
    """Assign the growth regime by applying the threshold cascade literally.

    Regime 1 requires |A| >= c1*q^(r-1/3); regime 2 requires
    |A| >= c2*q^(r-3/8); regime 3 requires |A| >= 2q^(r-1) together with
    |A+A|*|A|^2 >= c3*q^(3r-1).  The first band that matches (top down)
    wins.  Bands that are empty for this ring's parameters are reported
    rather than adjusted.
    """
    ring = a.ring
    q, r = ring.q, ring.r
    aa = sumset(a, a)
    sq = square_set(a)
    sq2 = sumset(sq, sq) if sq.card else ElementSet.empty(ring)
    lhs = max(aa.card, sq2.card)
    regime, thresholds, hyp, rhs = _regime_core(q, r, a.card, aa.card, constants)
    empty = []
    if thresholds["regime2_min_size"] >= thresholds["regime1_min_size"]:
        empty.append(2)
    if thresholds["regime3_min_size"] >= thresholds["regime2_min_size"]:
        empty.append(3)
    return RegimeVerdict(
        regime=regime,
        constants={"c1": constants[0], "c2": constants[1], "c3": constants[2]},
        thresholds=thresholds,
        sizes={"a": a.card, "a_plus_a": aa.card, "sq_plus_sq": sq2.card},
        lhs=lhs,
        rhs=rhs,
        ratio=(lhs / rhs) if rhs else None,
        hypothesis_met=hyp,
        empty_regimes=empty,
    )


# -- scans and search --------------------------------------------------------------


def _scan_trial(ring: Ring, k: int, child_seed: int, constants: Sequence[float]) -> dict:
    a = sample_unit_subset(ring, k, child_seed)
    aa = sumset(a, a)
    sq = square_set(a)
    sq2 = sumset(sq, sq)
    lhs = max(aa.card, sq2.card)
    q, r = ring.q, ring.r
    rhs1 = min(q ** (r / 2) * math.sqrt(k), k**2 / q ** ((2 * r - 1) / 2))
    rhs2 = q ** (r / 3) * k ** (2 / 3)
    regime, _, hyp, _ = _regime_core(q, r, k, aa.card, constants)
    return {
        "k": k,
        "lhs": lhs,
        "aa": aa.card,
        "sq2": sq2.card,
        "thm1": lhs / rhs1,
        "thm2": lhs / rhs2,
        "regime": regime,
        "hyp": hyp,
    }


def bound_ratio_scan(
    ring: Ring,
    sizes: Sequence[int],
    trials: int,
    seed: int,
    constants: Sequence[float] = (1.0, 1.0, 1.0),
) -> dict:
    """Sample unit subsets at each size; tabulate LHS/RHS ratios per theorem.

    Deterministic in (ring, sizes, trials, seed, constants): each trial
    derives its own child seed, so thread scheduling cannot reorder or
    alter anything.
    """
    unit_total = ring.unit_count
    for k in sizes:
        if not 1 <= k <= unit_total:
            raise BadSize(f"size {k} outside [1, {unit_total}] for {ring.descriptor}")
    tasks = [
        (si, t, derive_seed(seed, si, t))
        for si in range(len(sizes))
        for t in range(trials)
    ]
    results: dict = {}
    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        futs = {
            pool.submit(_scan_trial, ring, sizes[si], child, constants): (si, t)
            for si, t, child in tasks
        }
        for fut, key in futs.items():
            results[key] = fut.result()

    rows = []
    for si, k in enumerate(sizes):
        per = [results[(si, t)] for t in range(trials)]
        regimes = {"1": 0, "2": 0, "3": 0, "none": 0}
        for rec in per:
            regimes[str(rec["regime"]) if rec["regime"] else "none"] += 1
        base = {
            "size": k,
            "trials": trials,
            "lhs_min": min(r_["lhs"] for r_ in per),
            "lhs_max": max(r_["lhs"] for r_ in per),
            "regime_counts": regimes,
            "hypothesis_met": sum(1 for r_ in per if r_["hyp"]),
        }
        for theorem in ("thm1", "thm2"):
            ratios = sorted(r_[theorem] for r_ in per)
            rows.append(
                {
                    **base,
                    "theorem": theorem,
                    "ratio_min": ratios[0],
                    "ratio_median": median(ratios),
                    "ratio_max": ratios[-1],
                }
            )
    return {
        "kind": "ratio_scan",
        "ring": ring.descriptor,
        "sizes": list(sizes),
        "trials": trials,
        "seed": seed,
        "constants": list(constants),
        "rows": rows,
    }


def _objective(ring: Ring, members: Sequence[int]) -> int:
    a = ElementSet.from_indices(ring, members)
    sq = square_set(a)
    return max(sumset(a, a).card, sumset(sq, sq).card)


def _search_chain(
    ring: Ring, units: Sequence[int], k: int, budget: int, chain_seed: int, stall_cap: int
) -> tuple[int, list, list]:
    rng = random.Random(chain_seed)
    cur = sorted(rng.sample(list(units), k))
    cur_obj = _objective(ring, cur)
    best, best_obj = list(cur), cur_obj
    trace = [best_obj]
    stall = 0
    pool = set(units)
    for _ in range(budget):
        outs = sorted(pool - set(cur))
        if not outs:
            break
        swap_out = rng.choice(cur)
        swap_in = rng.choice(outs)
        cand = sorted([x for x in cur if x != swap_out] + [swap_in])
        cand_obj = _objective(ring, cand)
        if cand_obj <= cur_obj:
            stall = stall + 1 if cand_obj == cur_obj else 0
            cur, cur_obj = cand, cand_obj
            if cand_obj < best_obj:
                best, best_obj = list(cand), cand_obj
        else:
            stall += 1
        trace.append(best_obj)
        if stall >= stall_cap:
            break
    return best_obj, best, trace


def extremal_search(
    ring: Ring,
    k: int,
    iters: int,
    seed: int,
    chain_len: int = 250,
    stall_cap: int = 60,
) -> dict:
    """Hill-climb for unit k-subsets minimizing max{|A+A|, |A^2+A^2|}.

    The iteration budget is split into independent restart chains (one
    fresh random start each) that run in parallel; a chain also ends
    early once it plateaus.  Swaps that do not increase the objective
    are accepted.  The reported trace is the best objective so far in
    chain order, hence non-increasing.
    """
    units = [int(u) for u in ring.indices(ElementFilter.UNITS)]
    if not 1 <= k <= len(units):
        raise BadSize(f"size {k} outside [1, {len(units)}] for {ring.descriptor}")
    if k == len(units):
        obj = _objective(ring, units)
        return {
            "kind": "extremal_search",
            "ring": ring.descriptor,
            "k": k,
            "iters": 0,
            "seed": seed,
            "chains": 0,
            "best_set": units,
            "best_objective": obj,
            "start_objective": obj,
            "trace": [obj],
        }
    n_chains = max(1, math.ceil(iters / chain_len))
    budgets = [min(chain_len, iters - i * chain_len) for i in range(n_chains)]
    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        futs = [
            pool.submit(
                _search_chain, ring, units, k, budgets[i], derive_seed(seed, i), stall_cap
            )
            for i in range(n_chains)
        ]
        chains = [f.result() for f in futs]

    trace: list = []
    best_obj, best_set = None, None
    for obj, members, chain_trace in chains:
        for v in chain_trace:
            trace.append(v if not trace else min(trace[-1], v))
        if best_obj is None or obj < best_obj:
            best_obj, best_set = obj, members
    return {
        "kind": "extremal_search",
        "ring": ring.descriptor,
        "k": k,
        "iters": iters,
        "seed": seed,
        "chains": n_chains,
        "best_set": best_set,
        "best_objective": best_obj,
        "start_objective": chains[0][2][0],
        "trace": trace,
    }


def verify_hpv(a: ElementSet, b: ElementSet, c: ElementSet) -> dict:
    """Ratio report for the two product-growth inequalities (m = 1 case).

    Both variants share the right-hand side min{q^r*|B|,
    |A|*|B|^2*|C|/q^(2r-1)}; the additive one pairs |A.B| with |B+C|,
    the multiplicative one with |B.C|.  Nothing is asserted: implied
    constants are unknown, so only the ratios carry information.
    """
    ab, bc, b_plus_c = triple_product_sizes(a, b, c)
    ring = a.ring
    q, r = ring.q, ring.r
    rhs = min(q**r * b.card, a.card * b.card**2 * c.card / q ** (2 * r - 1))
    additive = ab * b_plus_c
    multiplicative = ab * bc
    return {
        "kind": "hpv",
        "ring": ring.descriptor,
        "m": 1,
        "sizes": {
            "a": a.card,
            "b": b.card,
            "c": c.card,
            "ab": ab,
            "bc": bc,
            "b_plus_c": b_plus_c,
        },
        "rhs": rhs,
        "additive": {
            "lhs": additive,
            "ratio": (additive / rhs) if rhs > 0 else None,
        },
        "multiplicative": {
            "lhs": multiplicative,
            "ratio": (multiplicative / rhs) if rhs > 0 else None,
        },
    }
