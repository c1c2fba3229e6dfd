"""Seeded property suites behind the CLI `verify` verb.

Each suite returns a list of check records {name, value, tolerance, passed};
a report bundles them with the seed and the tolerance scale.  Checks are
deterministic for a fixed seed, and a scale < 1 tightens every tolerance
(diagnostic use only).
"""

from __future__ import annotations

import math

import numpy as np

from .dynamics import (
    DisjointStretchSystem,
    RateMap,
    check_linearization,
    coefficient_a,
    coefficient_b,
    crossover_solution,
    moebius_transform,
    product_flow_apply,
    rk4_integrate,
    semigroup_apply,
)
from .generalized import (
    CyclicOperator,
    check_flow_commutation,
    check_generalized_ode,
    cyclic_apply,
    flow_coefficients,
    generalized_flow_apply,
    gfun,
    gfun_asymptotic_check,
    roots_of_unity_mean,
)
from .lattice import (
    LinkSet,
    all_link_sets,
    moebius_sign,
    partition_of,
    supersets_of,
)
from .measure import (
    Measure,
    ProductSpace,
    is_positive,
    marginal,
    tensor,
    total_variation,
)
from .recombinator import check_gen_cond, lipschitz_ratio, recombine

SUITE_NAMES = ("algebra", "semigroup", "moebius", "generalized")


def _check(name: str, value: float, tolerance: float, scale: float) -> dict:
    tol = tolerance * scale
    return {
        "name": name,
        "value": float(value),
        "tolerance": tol,
        "passed": bool(value <= tol),
    }


def _count_check(name: str, mismatches: int) -> dict:
    return {
        "name": name,
        "value": float(mismatches),
        "tolerance": 0.0,
        "passed": mismatches == 0,
    }


def _monitor(name: str, value: float, note: str) -> dict:
    return {
        "name": name,
        "value": float(value),
        "tolerance": None,
        "passed": True,
        "monitor": True,
        "note": note,
    }


# -- seeded generators --------------------------------------------------------


def random_positive(space: ProductSpace, rng: np.random.Generator) -> Measure:
    w = rng.random(space.total_states) + 0.05
    return Measure(space, w / w.sum())


def random_signed(space: ProductSpace, rng: np.random.Generator) -> Measure:
    return Measure(space, rng.standard_normal(space.total_states))


def random_space(
    rng: np.random.Generator, min_nodes: int = 3, max_nodes: int = 5, max_alphabet: int = 3
) -> ProductSpace:
    n_nodes = int(rng.integers(min_nodes, max_nodes + 1))
    sizes = tuple(int(rng.integers(2, max_alphabet + 1)) for _ in range(n_nodes))
    return ProductSpace(sizes)


def sample_disjoint_system(
    rng: np.random.Generator, n_links: int, max_components: int = 3
) -> DisjointStretchSystem:
    """Random system of cut sets with pairwise disjoint stretches.

    Splits the link range into consecutive chunks and picks a nonempty subset
    inside each chunk, so the stretches cannot overlap by construction.
    """
    n_components = int(rng.integers(1, min(max_components, n_links) + 1))
    cuts = sorted(rng.choice(n_links - 1, size=n_components - 1, replace=False) + 1) \
        if n_components > 1 else []
    bounds = [0, *map(int, cuts), n_links]
    components = []
    for lo, hi in zip(bounds, bounds[1:]):
        chunk = list(range(lo, hi))
        size = int(rng.integers(1, len(chunk) + 1))
        picked = sorted(rng.choice(chunk, size=size, replace=False).tolist())
        rate = float(rng.uniform(0.3, 1.5))
        components.append((LinkSet.from_indices(picked, n_links), rate))
    return DisjointStretchSystem(tuple(components))


# -- algebra ------------------------------------------------------------------


def suite_algebra(seed: int, scale: float = 1.0) -> list[dict]:
    rng = np.random.default_rng(seed)
    checks = []

    # Refinement duality over all subset pairs of a 4-link lattice.
    n_nodes = 5
    mismatches = 0
    for a in all_link_sets(n_nodes - 1):
        part_a = partition_of(a, n_nodes)
        for b in all_link_sets(n_nodes - 1):
            part_b = partition_of(b, n_nodes)
            if a.issubset(b) != part_b.refines(part_a):
                mismatches += 1
    checks.append(_count_check("lattice.refinement_duality", mismatches))

    # Inclusion-exclusion round trip with integer data is exact.
    n_links = 6
    values = {ls.bits: int(rng.integers(-50, 50)) for ls in all_link_sets(n_links)}
    transformed = {
        ls.bits: sum(moebius_sign(ls, sup) * values[sup.bits] for sup in supersets_of(ls))
        for ls in all_link_sets(n_links)
    }
    mismatches = sum(
        sum(transformed[sup.bits] for sup in supersets_of(ls)) != values[ls.bits]
        for ls in all_link_sets(n_links)
    )
    checks.append(_count_check("lattice.moebius_roundtrip", mismatches))

    mismatches = sum(
        len(partition_of(ls, 6)) != len(ls) + 1 for ls in all_link_sets(5)
    )
    checks.append(_count_check("lattice.block_count", mismatches))

    # Marginalization: consistency, mass, linearity, norm multiplicativity.
    worst_consistency = worst_mass = worst_linearity = worst_norm = 0.0
    for _ in range(12):
        space = random_space(rng)
        omega = random_positive(space, rng)
        nu = random_signed(space, rng)
        nodes = list(range(space.n_nodes))
        outer_keep = sorted(
            rng.choice(nodes, size=int(rng.integers(2, space.n_nodes + 1)), replace=False).tolist()
        )
        inner_keep = sorted(
            rng.choice(outer_keep, size=int(rng.integers(1, len(outer_keep) + 1)), replace=False).tolist()
        )
        via = marginal(marginal(omega, outer_keep), inner_keep)
        direct = marginal(omega, inner_keep)
        worst_consistency = max(worst_consistency, total_variation(via - direct))
        worst_mass = max(worst_mass, abs(marginal(nu, inner_keep).mass - nu.mass))
        a, b = rng.uniform(-2, 2, size=2)
        combo = marginal(a * omega + b * nu, inner_keep)
        split = a * marginal(omega, inner_keep) + b * marginal(nu, inner_keep)
        worst_linearity = max(worst_linearity, total_variation(combo - split))
        left = random_positive(ProductSpace(space.sizes[:2]), rng)
        right = random_positive(ProductSpace(space.sizes[2:]), rng) if space.n_nodes > 2 \
            else Measure(ProductSpace((2,)), [0.4, 0.6], nodes=(2,))
        right = Measure(right.space, right.weights, nodes=tuple(range(2, 2 + right.space.n_nodes)))
        product = tensor([left, right])
        worst_norm = max(
            worst_norm,
            abs(total_variation(product) - total_variation(left) * total_variation(right)),
        )
    checks.append(_check("measure.marginal_consistency", worst_consistency, 1e-12, scale))
    checks.append(_check("measure.marginal_mass", worst_mass, 1e-12, scale))
    checks.append(_check("measure.marginal_linearity", worst_linearity, 1e-12, scale))
    checks.append(_check("measure.norm_multiplicativity", worst_norm, 1e-12, scale))

    # Composition law R_G R_H = R_{G u H}: exhaustive on 3 links, sampled on 6.
    space3 = ProductSpace((2, 3, 2, 2))
    worst = 0.0
    for trial in range(6):
        omega = random_positive(space3, rng)
        for g in all_link_sets(3):
            for h in all_link_sets(3):
                iterated = recombine(recombine(omega, h), g)
                direct = recombine(omega, g.union(h))
                worst = max(worst, total_variation(iterated - direct))
    checks.append(_check("recombinator.composition_exhaustive", worst, 1e-12, scale))

    space6 = ProductSpace((2,) * 7)
    worst = 0.0
    for trial in range(60):
        omega = random_positive(space6, rng)
        g = LinkSet(int(rng.integers(0, 64)), 6)
        h = LinkSet(int(rng.integers(0, 64)), 6)
        worst = max(
            worst,
            total_variation(recombine(recombine(omega, h), g) - recombine(omega, g.union(h))),
        )
    checks.append(_check("recombinator.composition_sampled_6_links", worst, 1e-12, scale))

    # Idempotency and commutativity are the singleton instances of the law.
    worst_idem = worst_comm = 0.0
    for trial in range(20):
        omega = random_positive(space3, rng)
        for i in range(3):
            cut = LinkSet.from_indices([i], 3)
            once = recombine(omega, cut)
            worst_idem = max(worst_idem, total_variation(recombine(once, cut) - once))
            for j in range(i + 1, 3):
                other = LinkSet.from_indices([j], 3)
                ij = recombine(recombine(omega, other), cut)
                ji = recombine(recombine(omega, cut), other)
                worst_comm = max(worst_comm, total_variation(ij - ji))
    checks.append(_check("recombinator.idempotency", worst_idem, 1e-12, scale))
    checks.append(_check("recombinator.commutativity", worst_comm, 1e-12, scale))

    # Scaling law and the norm laws, on signed input.  Negative scalars pick
    # up sign(a)^(cuts+1) straight from the defining normalization; the |a|
    # form holds for a >= 0 and for single cuts.
    worst_homog = worst_contract = worst_preserve = 0.0
    for trial in range(40):
        space = random_space(rng)
        nu = random_signed(space, rng)
        pos = random_positive(space, rng)
        cut = LinkSet(int(rng.integers(1, 1 << space.n_links)), space.n_links)
        a = float(rng.uniform(-3, 3))
        sign = 1.0 if a >= 0 else (-1.0) ** (len(cut) + 1)
        worst_homog = max(
            worst_homog,
            total_variation(recombine(a * nu, cut) - sign * abs(a) * recombine(nu, cut)),
        )
        excess = total_variation(recombine(nu, cut)) - total_variation(nu)
        worst_contract = max(worst_contract, excess)
        worst_preserve = max(
            worst_preserve,
            abs(total_variation(recombine(pos, cut)) - total_variation(pos)),
        )
        rec = recombine(pos, cut)
        if not is_positive(rec, 0.0) or abs(rec.mass - 1.0) > 1e-12:
            worst_preserve = max(worst_preserve, 1.0)
    checks.append(_check("recombinator.positive_homogeneity", worst_homog, 1e-12, scale))
    checks.append(_check("recombinator.norm_contraction_signed", worst_contract, 1e-12, scale))
    checks.append(_check("recombinator.norm_preserved_positive", worst_preserve, 1e-12, scale))

    # Partial-linearity identity across a mixing grid.
    space = ProductSpace((2, 3, 2, 2))
    worst = 0.0
    for trial in range(20):
        omega = random_positive(space, rng)
        for cut_bits in range(1, 8):
            cut = LinkSet(cut_bits, 3)
            for a in (0.0, 0.25, 0.5, 0.75, 1.0):
                worst = max(worst, check_gen_cond(omega, cut, a))
    checks.append(_check("recombinator.partial_linearity", worst, 1e-10, scale))

    # Elementary Lipschitz sweep on signed pairs.
    space = ProductSpace((3, 2, 3))
    worst = 0.0
    for trial in range(1000):
        omega = random_signed(space, rng)
        nu = random_signed(space, rng)
        for link in range(space.n_links):
            worst = max(worst, lipschitz_ratio(omega, nu, link))
    checks.append(_check("recombinator.lipschitz_bound", worst, 3.0 + 1e-9, scale))

    return checks


# -- semigroup ------------------------------------------------------------------


def suite_semigroup(seed: int, scale: float = 1.0) -> list[dict]:
    rng = np.random.default_rng(seed)
    checks = []

    # Closed form against the RK4 oracle over random disjoint-stretch systems,
    # with conservation of mass and positivity along the stored states.
    worst_gap = worst_drift = worst_negative = 0.0
    for scenario in range(20):
        space = random_space(rng)
        omega0 = random_positive(space, rng)
        system = sample_disjoint_system(rng, space.n_links)
        traj = rk4_integrate(omega0, system.as_rate_map(), t_end=5.0, h=1e-3, store_stride=50)
        for t, state in zip(traj.times, traj.states):
            closed = product_flow_apply(omega0, system, [t] * len(system))
            worst_gap = max(worst_gap, total_variation(closed - state))
            worst_drift = max(worst_drift, abs(state.mass - omega0.mass))
            worst_negative = max(worst_negative, -float(state.weights.min()))
    checks.append(_check("semigroup.closed_form_vs_rk4", worst_gap, 1e-6, scale))
    checks.append(_check("semigroup.rk4_mass_drift", worst_drift, 1e-9, scale))
    checks.append(_check("semigroup.rk4_min_weight", worst_negative, 1e-9, scale))

    # One-parameter semigroup law along the diagonal.
    worst = 0.0
    for trial in range(15):
        space = random_space(rng)
        omega0 = random_positive(space, rng)
        system = sample_disjoint_system(rng, space.n_links)
        s, t = rng.uniform(0.05, 2.0, size=2)
        direct = product_flow_apply(omega0, system, [s + t] * len(system))
        staged = product_flow_apply(
            product_flow_apply(omega0, system, [s] * len(system)),
            system,
            [t] * len(system),
        )
        worst = max(worst, total_variation(direct - staged))
    checks.append(_check("semigroup.one_parameter_law", worst, 1e-11, scale))

    # Two-factor commutativity of stretch-disjoint flows.
    worst = 0.0
    for trial in range(50):
        space = random_space(rng, min_nodes=4)
        omega0 = random_positive(space, rng)
        system = sample_disjoint_system(rng, space.n_links, max_components=2)
        if len(system) < 2:
            continue
        (l1, r1), (l2, r2) = system.components
        s, t = rng.uniform(0.05, 2.5, size=2)
        order_a = semigroup_apply(semigroup_apply(omega0, l1, r1, s), l2, r2, t)
        order_b = semigroup_apply(semigroup_apply(omega0, l2, r2, t), l1, r1, s)
        worst = max(worst, total_variation(order_a - order_b))
    checks.append(_check("semigroup.commutativity", worst, 1e-12, scale))

    # Exact decay identity of the one-set flow.
    worst = 0.0
    for trial in range(30):
        space = random_space(rng)
        omega0 = random_positive(space, rng)
        cut = LinkSet(int(rng.integers(1, 1 << space.n_links)), space.n_links)
        rho = float(rng.uniform(0.2, 2.0))
        equilibrium = recombine(omega0, cut)
        span = total_variation(omega0 - equilibrium)
        for t in (0.1, 1.0, 3.0):
            lhs = total_variation(semigroup_apply(omega0, cut, rho, t) - equilibrium)
            rhs = math.exp(-rho * t) * span
            worst = max(worst, abs(lhs - rhs) / max(rhs, 1e-30))
    checks.append(_check("semigroup.exact_decay_identity", worst, 1e-12, scale))

    # Exponential approach to the joint equilibrium.
    worst_excess = 0.0
    for trial in range(10):
        space = random_space(rng)
        omega0 = random_positive(space, rng)
        system = sample_disjoint_system(rng, space.n_links)
        equilibrium = recombine(omega0, system.union())
        rho_min = min(rate for _, rate in system.components)
        envelope = sum(
            total_variation(omega0 - recombine(omega0, links))
            for links, _ in system.components
        )
        for t in np.linspace(0.0, 5.0, 11):
            residual = total_variation(
                product_flow_apply(omega0, system, [float(t)] * len(system)) - equilibrium
            )
            worst_excess = max(
                worst_excess, residual - envelope * math.exp(-rho_min * float(t))
            )
    checks.append(_check("semigroup.equilibrium_envelope", worst_excess, 1e-12, scale))

    return checks


# -- moebius --------------------------------------------------------------------


def suite_moebius(seed: int, scale: float = 1.0) -> list[dict]:
    rng = np.random.default_rng(seed)
    checks = []

    # Crossover expansion vs singleton product flow vs RK4.
    worst_closed = worst_oracle = 0.0
    for scenario in range(3):
        n_links = int(rng.integers(2, 5))
        space = ProductSpace(tuple(int(rng.integers(2, 4)) for _ in range(n_links + 1)))
        omega0 = random_positive(space, rng)
        link_rates = rng.uniform(0.3, 1.5, size=n_links).tolist()
        singleton_system = DisjointStretchSystem(
            tuple(
                (LinkSet.from_indices([i], n_links), link_rates[i])
                for i in range(n_links)
            )
        )
        traj = rk4_integrate(
            omega0, RateMap.crossover(link_rates), t_end=2.0, h=1e-3, store_stride=100
        )
        for t, state in zip(traj.times, traj.states):
            expanded = crossover_solution(omega0, link_rates, t)
            product = product_flow_apply(omega0, singleton_system, [t] * n_links)
            worst_closed = max(worst_closed, total_variation(expanded - product))
            worst_oracle = max(worst_oracle, total_variation(expanded - state))
    checks.append(_check("moebius.expansion_vs_product_flow", worst_closed, 1e-10, scale))
    checks.append(_check("moebius.expansion_vs_rk4", worst_oracle, 1e-6, scale))

    # Expansion weights sum to one; cumulative weights close the lattice.
    worst_sum = 0.0
    n_links = 3
    link_rates = [1.0, 0.4, 0.8]
    for t in np.linspace(0.0, 5.0, 21):
        total = sum(
            coefficient_a(ls, link_rates, float(t)) for ls in all_link_sets(n_links)
        )
        worst_sum = max(worst_sum, abs(total - 1.0))
        full = coefficient_b(LinkSet.full(n_links), link_rates, float(t))
        worst_sum = max(worst_sum, abs(full - 1.0))
    checks.append(_check("moebius.coefficient_sum", worst_sum, 1e-12, scale))

    # Transform trajectories decay along decoupled exponentials.
    worst_linear = 0.0
    grid = np.arange(0.0, 5.0 + 1e-9, 0.25).tolist()
    for scenario in range(4):
        n_links = 3
        space = ProductSpace(tuple(int(rng.integers(2, 4)) for _ in range(n_links + 1)))
        omega0 = random_positive(space, rng)
        link_rates = rng.uniform(0.3, 1.5, size=n_links).tolist()
        for ls in all_link_sets(n_links):
            worst_linear = max(
                worst_linear, check_linearization(omega0, link_rates, ls, grid)
            )
    checks.append(_check("moebius.linearization", worst_linear, 1e-9, scale))

    # Transform inversion and the cumulative-coefficient identity.
    worst_inverse = worst_b = worst_reconstruction = 0.0
    for scenario in range(4):
        n_links = 3
        space = ProductSpace(tuple(int(rng.integers(2, 4)) for _ in range(n_links + 1)))
        omega0 = random_positive(space, rng)
        link_rates = rng.uniform(0.3, 1.5, size=n_links).tolist()
        t = float(rng.uniform(0.2, 2.0))
        state = crossover_solution(omega0, link_rates, t)
        reconstructed = Measure.zero(space)
        for ls in all_link_sets(n_links):
            back = sum(
                (moebius_transform(omega0, sup) for sup in supersets_of(ls)),
                start=Measure.zero(space),
            )
            worst_inverse = max(
                worst_inverse, total_variation(back - recombine(omega0, ls))
            )
            drift = moebius_transform(state, ls) - coefficient_b(
                ls, link_rates, t
            ) * moebius_transform(omega0, ls)
            worst_b = max(worst_b, total_variation(drift))
            reconstructed = reconstructed + coefficient_b(
                ls, link_rates, t
            ) * moebius_transform(omega0, ls)
        worst_reconstruction = max(
            worst_reconstruction, total_variation(reconstructed - state)
        )
    checks.append(_check("moebius.inversion_roundtrip", worst_inverse, 1e-11, scale))
    checks.append(_check("moebius.transform_decay_identity", worst_b, 1e-10, scale))
    checks.append(_check("moebius.transform_reconstruction", worst_reconstruction, 1e-10, scale))

    return checks


# -- generalized ------------------------------------------------------------------


def _three_cycle_operator(rng: np.random.Generator) -> tuple[CyclicOperator, Measure]:
    space = ProductSpace((3, 2, 2))
    cuts = LinkSet.from_indices([0], space.n_links)
    op = CyclicOperator(space, cuts, perm=(1, 2, 0), order=3)
    omega0 = random_positive(space, rng)
    return op, omega0


def suite_generalized(seed: int, scale: float = 1.0) -> list[dict]:
    rng = np.random.default_rng(seed)
    checks = []

    # Series oracle: the filtered slices against their factorial tails.  The
    # root sum is backward-stable at scale e^t, so compare on that scale.
    worst = 0.0
    for n in range(2, 7):
        for k in range(n):
            for t in (0.3, 1.0, 2.5, 5.0):
                series = 1.0 if k == 0 else 0.0
                m = 1
                while True:
                    term = t ** (m * n - k) / math.factorial(m * n - k)
                    series += term
                    if term < 1e-22 * max(series, 1.0):
                        break
                    m += 1
                value = gfun(n, k, t)
                worst = max(worst, abs(value - series) / math.exp(t))
    checks.append(_check("gfun.series_agreement", worst, 1e-13, scale))

    worst = 0.0
    for t in np.linspace(0.0, 10.0, 41):
        t = float(t)
        worst = max(worst, abs(gfun(2, 0, t) - math.cosh(t)) / math.cosh(t))
        reference = math.sinh(t)
        diff = abs(gfun(2, 1, t) - reference)
        worst = max(worst, diff / reference if reference else diff)
    checks.append(_check("gfun.hyperbolic_pair", worst, 1e-12, scale))

    worst = 0.0
    for n in range(2, 7):
        for k in range(n):
            expected = 1.0 if k == 0 else 0.0
            worst = max(worst, abs(gfun(n, k, 0.0) - expected))
    checks.append(_check("gfun.delta_at_zero", worst, 1e-14, scale))

    worst = 0.0
    for n in range(2, 7):
        for t in np.linspace(0.0, 8.0, 17):
            t = float(t)
            total = sum(gfun(n, k, t) for k in range(n))
            worst = max(worst, abs(total - math.exp(t)) / math.exp(t))
    checks.append(_check("gfun.exponential_sum", worst, 1e-10, scale))

    # d/dt F_k = F_{k+1 mod n}: absolute defect and the halving ratio.
    worst_abs = 0.0
    h = 1e-4
    for n in range(2, 7):
        for k in range(n):
            for t in (0.5, 1.5, 3.0):
                derivative = (gfun(n, k, t + h) - gfun(n, k, t - h)) / (2 * h)
                worst_abs = max(worst_abs, abs(derivative - gfun(n, (k + 1) % n, t)))
    checks.append(_check("gfun.derivative_recurrence", worst_abs, 1e-6, scale))

    def recurrence_defect(step: float) -> float:
        worst_local = 0.0
        for n in (2, 3, 5):
            for k in range(n):
                d = (gfun(n, k, 2.0 + step) - gfun(n, k, 2.0 - step)) / (2 * step)
                worst_local = max(worst_local, abs(d - gfun(n, (k + 1) % n, 2.0)))
        return worst_local

    ratio = recurrence_defect(1e-2) / recurrence_defect(5e-3)
    checks.append(_check("gfun.recurrence_halving_ratio", abs(ratio - 4.0), 0.5, scale))

    worst = 0.0
    for n in range(2, 7):
        bound = 2.0 * math.exp((math.cos(2 * math.pi / n) - 1.0) * 30.0)
        for k in range(n):
            worst = max(worst, gfun_asymptotic_check(n, k, 30.0) / bound)
    checks.append(_check("gfun.asymptotic_envelope_ratio", worst, 1.0, scale))

    worst = 0.0
    for n in range(2, 9):
        for exponent in range(-40, 41):
            value = roots_of_unity_mean(n, exponent)
            expected = 1.0 if exponent % n == 0 else 0.0
            worst = max(worst, abs(value - expected))
    checks.append(_check("gfun.roots_filter", worst, 1e-12, scale))

    # Cyclic operator: period, commutation with the flow, generator defect.
    op, omega0 = _three_cycle_operator(rng)
    worst = 0.0
    for power in range(1, op.order + 2):
        wrapped = cyclic_apply(omega0, op, power + op.order)
        direct = cyclic_apply(omega0, op, power)
        worst = max(worst, total_variation(wrapped - direct))
    checks.append(_check("cyclic.period", worst, 1e-12, scale))

    worst = 0.0
    for t in (0.0, 0.1, 1.0, 5.0):
        worst = max(worst, check_flow_commutation(omega0, op, 1.0, t))
    checks.append(_check("cyclic.flow_commutation", worst, 1e-10, scale))

    grid = [0.25, 0.5, 1.0, 1.5, 2.0]
    coarse = check_generalized_ode(omega0, op, 1.0, grid, 1e-2)
    fine = check_generalized_ode(omega0, op, 1.0, grid, 5e-3)
    checks.append(_check("cyclic.ode_halving_ratio", abs(coarse / fine - 4.0), 0.5, scale))

    # Long-time limit with the mixed envelope: the identity coefficient dies
    # at unit rate, the rotating modes at rate 1 - cos(2 pi / n).
    worst_excess = 0.0
    limit = (1.0 / op.order) * sum(
        (cyclic_apply(omega0, op, k) for k in range(2, op.order + 1)),
        start=cyclic_apply(omega0, op, 1),
    )
    rate = min(1.0, 1.0 - math.cos(2 * math.pi / op.order))
    envelope0 = (op.order + 1) * total_variation(omega0)
    for t in np.linspace(0.0, 12.0, 13):
        t = float(t)
        residual = total_variation(generalized_flow_apply(omega0, op, 1.0, t) - limit)
        worst_excess = max(worst_excess, residual - envelope0 * math.exp(-rate * t))
    checks.append(_check("cyclic.long_time_limit", max(worst_excess, 0.0), 1e-12, scale))

    # Flow conservation plus the coefficient nonnegativity monitor.
    worst_mass = worst_neg = 0.0
    min_coeff = math.inf
    for n in range(2, 7):
        for t in np.linspace(0.0, 6.0, 25):
            coeffs = flow_coefficients(n, float(t))
            min_coeff = min(min_coeff, float(coeffs.min()))
            worst_mass = max(worst_mass, abs(float(coeffs.sum()) - 1.0))
    for t in (0.1, 0.7, 2.0, 6.0):
        state = generalized_flow_apply(omega0, op, 1.3, t)
        worst_mass = max(worst_mass, abs(state.mass - omega0.mass))
        worst_neg = max(worst_neg, -float(state.weights.min()))
    checks.append(_check("cyclic.flow_mass_conservation", worst_mass, 1e-12, scale))
    checks.append(_check("cyclic.flow_positivity", worst_neg, 1e-12, scale))
    checks.append(
        _monitor(
            "cyclic.coefficient_nonnegativity",
            min_coeff,
            "smallest flow coefficient over the scanned grid; negative values "
            "would void the probabilistic reading and are only reported",
        )
    )

    # The three-term wrap-around case (C^3 = C): survival, odd-hit, even-hit.
    worst = 0.0
    for t in np.linspace(0.0, 5.0, 26):
        t = float(t)
        coeffs = flow_coefficients(2, t)
        expected = (
            math.exp(-t),
            math.exp(-t) * math.sinh(t),
            math.exp(-t) * (math.cosh(t) - 1.0),
        )
        worst = max(worst, max(abs(c - e) for c, e in zip(coeffs, expected)))
    checks.append(_check("cyclic.three_term_coefficients", worst, 1e-12, scale))

    return checks


_SUITES = {
    "algebra": suite_algebra,
    "semigroup": suite_semigroup,
    "moebius": suite_moebius,
    "generalized": suite_generalized,
}


def run_suite(name: str, seed: int, scale: float = 1.0) -> dict:
    """Run one named suite (or `all`) and bundle the outcome as a report."""
    if name == "all":
        checks = []
        for suite_name in SUITE_NAMES:
            checks.extend(_SUITES[suite_name](seed, scale))
    elif name in _SUITES:
        checks = _SUITES[name](seed, scale)
    else:
        raise KeyError(f"unknown suite {name!r}; choose from {SUITE_NAMES + ('all',)}")
    return {
        "suite": name,
        "seed": int(seed),
        "tolerance_scale": float(scale),
        "checks": checks,
        "passed": all(c["passed"] for c in checks),
    }
