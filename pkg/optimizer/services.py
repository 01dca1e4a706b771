import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from django.conf import settings

from .domain import Bounds, Evaluation, GenerationStats, Individual, ParetoFront
from .exceptions import AllInfeasibleError, OptimizerError

logger = logging.getLogger(__name__)


def _as_evaluation(result):
    if isinstance(result, Evaluation):
        return result
    return Evaluation(np.atleast_1d(np.asarray(result, dtype=float)))


def domination_matrix(objectives, violations):
    """
    dominates[i, j] under constrained domination.

    Feasible beats infeasible, infeasible pairs compare by total violation
    and feasible pairs by Pareto dominance.
    """
    F = np.asarray(objectives, dtype=float)
    v = np.asarray(violations, dtype=float)
    feasible = v <= 0.0
    with np.errstate(invalid="ignore"):
        no_worse = np.all(F[:, None, :] <= F[None, :, :], axis=2)
        better = np.any(F[:, None, :] < F[None, :, :], axis=2)
    pareto = no_worse & better
    both = feasible[:, None] & feasible[None, :]
    neither = ~feasible[:, None] & ~feasible[None, :]
    return np.where(
        both,
        pareto,
        np.where(
            neither, v[:, None] < v[None, :], feasible[:, None] & ~feasible[None, :]
        ),
    )


def non_dominated_sort(objectives, violations):
    """Fast non-dominated sort; returns the list of fronts (index arrays)."""
    dominates = domination_matrix(objectives, violations)
    counts = dominates.sum(axis=0)
    fronts = []
    current = np.flatnonzero(counts == 0)
    while len(current):
        fronts.append(current)
        counts = counts - dominates[current].sum(axis=0)
        counts[np.concatenate(fronts)] = -1
        current = np.flatnonzero(counts == 0)
    return fronts


def crowding_distance(objectives):
    """Crowding distance of one front; boundary members get +inf."""
    F = np.asarray(objectives, dtype=float)
    n = len(F)
    distance = np.zeros(n)
    if n <= 2:
        distance[:] = np.inf
        return distance
    for m in range(F.shape[1]):
        order = np.argsort(F[:, m], kind="stable")
        values = F[order, m]
        distance[order[0]] = distance[order[-1]] = np.inf
        spread = values[-1] - values[0]
        if not np.isfinite(spread) or spread <= 0:
            continue
        distance[order[1:-1]] += (values[2:] - values[:-2]) / spread
    return distance


def rank_population(evaluations):
    """(ranks, crowding) for a list of Evaluations."""
    F = np.array([e.objectives for e in evaluations])
    v = np.array([e.violation for e in evaluations])
    ranks = np.zeros(len(evaluations), dtype=int)
    crowding = np.zeros(len(evaluations))
    for rank, front in enumerate(non_dominated_sort(F, v)):
        ranks[front] = rank
        if np.all(v[front] <= 0):
            crowding[front] = crowding_distance(F[front])
    return ranks, crowding


def sbx_crossover(parent_a, parent_b, bounds, rng, eta=None, probability=None):
    """Simulated binary crossover with bound-aware spread factors."""
    config = settings.GRASPPRINT
    eta = config["SBX_ETA"] if eta is None else eta
    probability = config["SBX_PROBABILITY"] if probability is None else probability
    child_a, child_b = parent_a.copy(), parent_b.copy()
    if rng.random() > probability:
        return child_a, child_b
    for i in range(len(parent_a)):
        lo, hi = bounds.lower[i], bounds.upper[i]
        if rng.random() > 0.5 or abs(parent_a[i] - parent_b[i]) <= 1e-14:
            continue
        y1, y2 = sorted((parent_a[i], parent_b[i]))
        u = rng.random()
        children = []
        for beta in (1 + 2 * (y1 - lo) / (y2 - y1), 1 + 2 * (hi - y2) / (y2 - y1)):
            alpha = 2.0 - beta ** -(eta + 1)
            if u <= 1.0 / alpha:
                betaq = (u * alpha) ** (1.0 / (eta + 1))
            else:
                betaq = (1.0 / (2.0 - u * alpha)) ** (1.0 / (eta + 1))
            children.append(betaq)
        c1 = 0.5 * ((y1 + y2) - children[0] * (y2 - y1))
        c2 = 0.5 * ((y1 + y2) + children[1] * (y2 - y1))
        c1, c2 = min(max(c1, lo), hi), min(max(c2, lo), hi)
        if rng.random() <= 0.5:
            c1, c2 = c2, c1
        child_a[i], child_b[i] = c1, c2
    return child_a, child_b


def polynomial_mutation(x, bounds, rng, eta=None, probability=None):
    """Polynomial mutation, each variable with probability 1/n by default."""
    eta = settings.GRASPPRINT["MUTATION_ETA"] if eta is None else eta
    probability = 1.0 / len(x) if probability is None else probability
    y = x.copy()
    for i in range(len(x)):
        lo, hi = bounds.lower[i], bounds.upper[i]
        if hi <= lo or rng.random() > probability:
            continue
        delta1, delta2 = (y[i] - lo) / (hi - lo), (hi - y[i]) / (hi - lo)
        r = rng.random()
        power = 1.0 / (eta + 1)
        if r < 0.5:
            value = 2 * r + (1 - 2 * r) * (1 - delta1) ** (eta + 1)
            deltaq = value**power - 1
        else:
            value = 2 * (1 - r) + 2 * (r - 0.5) * (1 - delta2) ** (eta + 1)
            deltaq = 1 - value**power
        y[i] = min(max(y[i] + deltaq * (hi - lo), lo), hi)
    return y


def hypervolume(points, reference):
    """Exact dominated hypervolume (minimization) by slicing objectives."""
    reference = np.asarray(reference, dtype=float)
    P = np.asarray(points, dtype=float).reshape(-1, len(reference))
    P = P[np.all(np.isfinite(P), axis=1) & np.all(P < reference, axis=1)]
    if not len(P):
        return 0.0
    if len(reference) == 1:
        return float(reference[0] - P[:, 0].min())
    P = P[np.argsort(P[:, -1], kind="stable")]
    volume = 0.0
    for i in range(len(P)):
        upper = P[i + 1, -1] if i + 1 < len(P) else reference[-1]
        depth = upper - P[i, -1]
        if depth > 0:
            volume += depth * hypervolume(P[: i + 1, :-1], reference[:-1])
    return float(volume)


def _tournament(ranks, crowding, rng):
    a, b = rng.integers(len(ranks), size=2)
    if ranks[a] != ranks[b]:
        return a if ranks[a] < ranks[b] else b
    return a if crowding[a] >= crowding[b] else b


def _evaluate_all(evaluator, population, workers):
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(evaluator, population))
    else:
        results = [evaluator(x) for x in population]
    return [_as_evaluation(r) for r in results]


def _stats(generation, evaluations, ranks, reference):
    feasible = [e for e in evaluations if e.feasible]
    if not feasible:
        return GenerationStats(generation, (), 0.0, 0)
    F = np.array([e.objectives for e in feasible])
    front = np.array(
        [e.objectives for e, r in zip(evaluations, ranks) if r == 0 and e.feasible]
    )
    return GenerationStats(
        generation=generation,
        best=tuple(F.min(axis=0).tolist()),
        hypervolume=hypervolume(front, reference) if len(front) else 0.0,
        feasible=len(feasible),
    )


def nsga2(
    evaluator,
    bounds,
    population=None,
    generations=None,
    seed=None,
    *,
    reference_point=None,
    workers=None,
    sbx_eta=None,
    sbx_probability=None,
    mutation_eta=None,
):
    """
    Elitist non-dominated sorting GA over the box ``bounds``.

    ``evaluator(x)`` returns an Evaluation or a sequence of objective values
    (all minimized). Offspring come from crowded binary tournaments, SBX and
    polynomial mutation; parents and offspring compete for survival by rank
    then crowding distance. With ``workers`` > 1 candidates are evaluated on
    a thread pool, results kept in submission order.

    Raises:
        AllInfeasibleError: no initial candidate satisfies the constraints.
    """
    config = settings.GRASPPRINT
    population = config["POPULATION"] if population is None else population
    generations = config["GENERATIONS"] if generations is None else generations
    seed = config["SEED"] if seed is None else seed
    if not isinstance(bounds, Bounds):
        bounds = Bounds.of_pairs(bounds)
    if population < 4 or population % 2:
        raise OptimizerError("Population must be even and at least 4.")

    rng = np.random.default_rng(seed)
    X = bounds.lower + rng.random((population, len(bounds))) * bounds.span
    evaluations = _evaluate_all(evaluator, X, workers)
    if not any(e.feasible for e in evaluations):
        raise AllInfeasibleError(population, min(e.violation for e in evaluations))

    if reference_point is None:
        F = np.array([e.objectives for e in evaluations if e.feasible])
        worst = F.max(axis=0)
        reference_point = worst + 0.1 * np.abs(worst) + 1e-9
    reference_point = tuple(np.asarray(reference_point, dtype=float).tolist())

    ranks, crowding = rank_population(evaluations)
    history = [_stats(0, evaluations, ranks, reference_point)]
    for generation in range(1, generations + 1):
        offspring = []
        while len(offspring) < population:
            a = X[_tournament(ranks, crowding, rng)]
            b = X[_tournament(ranks, crowding, rng)]
            for child in sbx_crossover(a, b, bounds, rng, sbx_eta, sbx_probability):
                offspring.append(polynomial_mutation(child, bounds, rng, mutation_eta))
        offspring = np.array(offspring[:population])
        merged_x = np.vstack([X, offspring])
        merged = evaluations + _evaluate_all(evaluator, offspring, workers)

        merged_ranks, merged_crowding = rank_population(merged)
        order = np.lexsort((-merged_crowding, merged_ranks))[:population]
        X = merged_x[order]
        evaluations = [merged[i] for i in order]
        ranks, crowding = rank_population(evaluations)
        history.append(_stats(generation, evaluations, ranks, reference_point))
        if generation % 10 == 0 or generation == generations:
            logger.info(
                "Generation %d: %d rank-0, hypervolume %.6g",
                generation,
                int(np.sum(ranks == 0)),
                history[-1].hypervolume,
            )

    order = np.lexsort((-crowding, ranks))
    members = tuple(
        Individual(X[i].copy(), evaluations[i], int(ranks[i]), float(crowding[i]))
        for i in order
    )
    return ParetoFront(
        members=members,
        bounds=bounds,
        history=tuple(history),
        reference_point=reference_point,
    )
