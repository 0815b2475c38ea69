"""Minimising ``mu_E`` over gene orderings.

Three strategies share one objective: exhaustive enumeration (small ``N``),
depth-first branch-and-bound over prefixes, and a permutation genetic
algorithm.  The bound rests on ``E(n)`` depending only on the set of genes in
the first ``n`` positions, so the cost of a prefix is exact and never exceeds
the score of any completion.
"""

from __future__ import annotations

import itertools
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .network import TransitionMap, state_digits
from .stability import SubsetExpansion, stability_scores

EXHAUSTIVE_CAP = 8

ProgressHook = Callable[[dict], None]


class SearchError(ValueError):
    pass


@dataclass
class SearchResult:
    best_score: int
    minimizers: list[tuple[int, ...]]
    certified: bool
    evaluations: int
    wall_time: float
    method: str = ""

    def __post_init__(self):
        self.minimizers = sorted({tuple(int(k) for k in m) for m in self.minimizers})

    @property
    def representative(self) -> tuple[int, ...]:
        """Lexicographically smallest minimiser."""
        return self.minimizers[0]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["minimizers"] = [list(m) for m in self.minimizers]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SearchResult":
        return cls(int(d["best_score"]), [tuple(m) for m in d["minimizers"]],
                   bool(d["certified"]), int(d["evaluations"]), float(d["wall_time"]),
                   d.get("method", ""))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass(frozen=True)
class GAConfig:
    population: int = 200
    generations: int = 500
    tournament_size: int = 4
    crossover_rate: float = 0.9
    mutation_rate: float = 0.2
    elitism: int = 2
    seed: int = 1

    def __post_init__(self):
        if self.population < 2:
            raise SearchError("population must be at least 2")
        if self.generations < 0:
            raise SearchError("generations must be nonnegative")
        if not 1 <= self.tournament_size <= self.population:
            raise SearchError("tournament size must lie in 1..population")
        for name in ("crossover_rate", "mutation_rate"):
            r = getattr(self, name)
            if not 0.0 <= r <= 1.0:
                raise SearchError(f"{name} must lie in [0, 1], got {r}")
        if not 0 <= self.elitism < self.population:
            raise SearchError("elitism must be below the population size")
        if not 0 <= self.seed < 1 << 64:
            raise SearchError("seed must be an unsigned 64-bit integer")


class _Progress:
    def __init__(self, hook: ProgressHook | None, every: float = 1.0):
        self.hook = hook
        self.every = every
        self.t0 = time.perf_counter()
        self.last = self.t0

    def tick(self, evaluations: int, incumbent, force: bool = False):
        if self.hook is None:
            return
        now = time.perf_counter()
        if force or now - self.last >= self.every:
            self.last = now
            elapsed = max(now - self.t0, 1e-9)
            self.hook({"evaluations": evaluations, "rate": evaluations / elapsed,
                       "incumbent": incumbent, "elapsed": elapsed})


# --- exhaustive ---------------------------------------------------------------

class _DirectScorer:
    """``mu_E`` of one ordering through the per-level ball tallies."""

    def __init__(self, f: TransitionMap):
        self.p, self.N = f.p, f.N
        self.digits = state_digits(self.N, self.p)
        self.img_digits = self.digits[f.images]
        self.weights = self.p ** np.arange(self.N, dtype=np.int64)

    def __call__(self, perm: Sequence[int]) -> int:
        p, N = self.p, self.N
        perm = list(perm)
        enc = self.digits[:, perm] @ self.weights
        g = np.empty_like(enc)
        g[enc] = self.img_digits[:, perm] @ self.weights
        total = 0
        for n in range(1, N):
            cols = (g % p ** n).reshape(p ** (N - n), p ** n)
            E = int(np.count_nonzero((cols != cols[0]).any(axis=0)))
            total += E * p ** (N - n)
        return total


def exhaustive_minimize(f: TransitionMap, cap: int = EXHAUSTIVE_CAP,
                        progress: ProgressHook | None = None) -> SearchResult:
    """Score all ``N!`` orderings; refuses ``N > cap``."""
    if f.N > cap:
        raise SearchError(f"exhaustive search is limited to N <= {cap} "
                          f"({f.N}! = {math.factorial(f.N)} orderings); use bnb or ga")
    t0 = time.perf_counter()
    score = _DirectScorer(f)
    prog = _Progress(progress)
    best, mins, evals = None, [], 0
    for perm in itertools.permutations(range(f.N)):
        s = score(perm)
        evals += 1
        if best is None or s < best:
            best, mins = s, [perm]
        elif s == best:
            mins.append(perm)
        prog.tick(evals, best)
    prog.tick(evals, best, force=True)
    return SearchResult(best, mins, True, evals, time.perf_counter() - t0, "exhaustive")


# --- branch and bound ---------------------------------------------------------

def branch_and_bound_minimize(f: TransitionMap, incumbent: Sequence[int] | None = None,
                              node_budget: int | None = None, time_budget: float | None = None,
                              progress: ProgressHook | None = None,
                              seed_config: GAConfig | None = None) -> SearchResult:
    """Exact minimum and complete minimiser set by depth-first search over prefixes.

    A prefix is pruned when its exact partial cost exceeds the incumbent, or
    when the same gene set was already reached more cheaply (its best
    completion is then strictly worse).  Ties are explored so every optimum is
    kept.  Exceeding a budget returns the best found so far, uncertified.
    """
    t0 = time.perf_counter()
    N = f.N
    ev = SubsetExpansion(f)
    if incumbent is None:
        cfg = seed_config or GAConfig(population=40, generations=40, seed=0)
        incumbent = ga_minimize(f, cfg, evaluator=ev).representative
    incumbent = tuple(int(k) for k in incumbent)
    best = ev.score(incumbent)
    mins: set[tuple[int, ...]] = set()
    if N == 1:
        return SearchResult(0, [(0,)], True, 1, time.perf_counter() - t0, "bnb")

    prog = _Progress(progress)
    cheapest: dict[int, int] = {}
    full = (1 << N) - 1
    nodes = 0
    exhausted = False
    prefix: list[int] = []

    def dfs(mask: int, cost: int) -> None:
        nonlocal best, nodes, exhausted
        nodes += 1
        if node_budget is not None and nodes > node_budget:
            exhausted = True
        if time_budget is not None and time.perf_counter() - t0 > time_budget:
            exhausted = True
        if exhausted:
            return
        depth = len(prefix)
        if depth == N - 1:
            last = (full & ~mask).bit_length() - 1
            perm = tuple(prefix) + (last,)
            if cost < best:
                best = cost
                mins.clear()
            if cost == best:
                mins.add(perm)
            prog.tick(nodes, best)
            return
        w = ev.weight(depth + 1)
        children = []
        for g in range(N):
            if mask >> g & 1:
                continue
            m2 = mask | 1 << g
            c2 = cost + ev.count(m2) * w
            if c2 > best:
                continue
            seen = cheapest.get(m2)
            if seen is not None and c2 > seen:
                continue
            cheapest[m2] = c2 if seen is None else min(seen, c2)
            children.append((c2, g, m2))
        children.sort()
        for c2, g, m2 in children:
            if c2 > best or c2 > cheapest[m2]:
                continue
            prefix.append(g)
            dfs(m2, c2)
            prefix.pop()
            if exhausted:
                return

    dfs(0, 0)
    prog.tick(nodes, best, force=True)
    if not mins:
        mins.add(incumbent)
    return SearchResult(best, list(mins), not exhausted, ev.evaluations,
                        time.perf_counter() - t0, "bnb")


# --- genetic algorithm --------------------------------------------------------

def _ox1(a: np.ndarray, b: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Order crossover: keep a slice of ``a``, fill the rest in ``b``'s order."""
    N = a.size
    i, j = sorted(rng.choice(N + 1, size=2, replace=False))
    child = np.full(N, -1, dtype=np.int64)
    child[i:j] = a[i:j]
    kept = set(a[i:j].tolist())
    fill = [g for g in np.roll(b, -j).tolist() if g not in kept]
    slots = [(j + k) % N for k in range(N - (j - i))]
    child[slots] = fill
    return child


def ga_minimize(f: TransitionMap, cfg: GAConfig | None = None, threads: int = 1,
                progress: ProgressHook | None = None,
                evaluator: SubsetExpansion | None = None) -> SearchResult:
    """Permutation GA; output depends only on ``cfg``, never on ``threads``."""
    cfg = cfg or GAConfig()
    t0 = time.perf_counter()
    N = f.N
    ev = evaluator or SubsetExpansion(f)
    rng = np.random.default_rng(cfg.seed)
    prog = _Progress(progress)
    pool = ThreadPoolExecutor(threads) if threads > 1 else None
    evals = 0

    def fitness(pop: list[np.ndarray]) -> list[int]:
        nonlocal evals
        evals += len(pop)
        if pool is None:
            return [ev.score(x) for x in pop]
        return list(pool.map(ev.score, pop))

    pop = [rng.permutation(N) for _ in range(cfg.population)]
    best, mins = None, set()
    try:
        for gen in range(cfg.generations + 1):
            fit = fitness(pop)
            for x, s in zip(pop, fit):
                if best is None or s < best:
                    best, mins = s, {tuple(x.tolist())}
                elif s == best:
                    mins.add(tuple(x.tolist()))
            prog.tick(evals, best)
            if gen == cfg.generations:
                break
            rank = sorted(range(len(pop)), key=lambda i: (fit[i], pop[i].tolist()))
            new = [pop[i].copy() for i in rank[: cfg.elitism]]

            def pick() -> np.ndarray:
                cand = rng.choice(len(pop), size=cfg.tournament_size, replace=False)
                return pop[min(cand, key=lambda i: (fit[i], i))]

            while len(new) < cfg.population:
                a, b = pick(), pick()
                child = _ox1(a, b, rng) if N > 1 and rng.random() < cfg.crossover_rate else a.copy()
                if N > 1 and rng.random() < cfg.mutation_rate:
                    i, j = rng.choice(N, size=2, replace=False)
                    child[i], child[j] = child[j], child[i]
                new.append(child)
            pop = new
    finally:
        if pool is not None:
            pool.shutdown()
    prog.tick(evals, best, force=True)
    return SearchResult(best, list(mins), False, evals, time.perf_counter() - t0, "ga")


def minimize(f: TransitionMap, method: str, *, seed: int = 1, threads: int = 1,
             node_budget: int | None = None, time_budget: float | None = None,
             progress: ProgressHook | None = None) -> SearchResult:
    if method == "exhaustive":
        return exhaustive_minimize(f, progress=progress)
    if method == "bnb":
        return branch_and_bound_minimize(f, node_budget=node_budget, time_budget=time_budget,
                                         progress=progress,
                                         seed_config=GAConfig(population=40, generations=40, seed=seed))
    if method == "ga":
        return ga_minimize(f, GAConfig(seed=seed), threads=threads, progress=progress)
    raise SearchError(f"unknown method {method!r}; choose exhaustive, bnb or ga")


# --- structure of the minimiser set -----------------------------------------

def _swap(perm: tuple[int, ...], i: int, j: int) -> tuple[int, ...]:
    q = list(perm)
    q[i], q[j] = q[j], q[i]
    return tuple(q)


def minimizer_symmetry(minimizers: Iterable[Sequence[int]], f: TransitionMap) -> list[tuple[int, int]]:
    """1-based position transpositions that map the minimiser set onto itself.

    A swap qualifies only if every swapped ordering also keeps the full
    ``(mu_E, mu_A, mu_I)`` triple.
    """
    mins = {tuple(m) for m in minimizers}
    if not mins:
        raise SearchError("empty minimiser set")
    N = len(next(iter(mins)))
    triples = {m: stability_scores(f, m).as_tuple() for m in mins}
    gens = []
    for i, j in itertools.combinations(range(N), 2):
        image = {_swap(m, i, j) for m in mins}
        if image != mins:
            continue
        if all(triples[_swap(m, i, j)] == triples[m] for m in mins):
            gens.append((i + 1, j + 1))
    return gens


def partial_order_summary(minimizers: Iterable[Sequence[int]],
                          gene_names: Sequence[str] | None = None) -> list[list]:
    """Levels of interchangeable genes, in hierarchy order.

    Positions whose occupants are permuted among each other across minimisers
    share a level; a level is widened to a contiguous block of positions.
    """
    mins = sorted({tuple(m) for m in minimizers})
    if not mins:
        raise SearchError("empty minimiser set")
    N = len(mins[0])
    ref = mins[0]
    parent = list(range(N))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for m in mins[1:]:
        where = {g: k for k, g in enumerate(m)}
        for k, g in enumerate(ref):
            a, b = find(k), find(where[g])
            if a != b:
                parent[max(a, b)] = min(a, b)
    # widen each group to the interval it spans
    spans = {}
    for k in range(N):
        r = find(k)
        lo, hi = spans.get(r, (k, k))
        spans[r] = (min(lo, k), max(hi, k))
    blocks = sorted(spans.values())
    merged = []
    for lo, hi in blocks:
        if merged and lo <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    levels = []
    for lo, hi in merged:
        genes = sorted({m[k] for m in mins for k in range(lo, hi + 1)}, key=lambda g: ref.index(g))
        levels.append([gene_names[g] for g in genes] if gene_names is not None else genes)
    return levels


def format_partial_order(levels: list[list]) -> str:
    return " | ".join(str(l[0]) if len(l) == 1 else "{" + ", ".join(map(str, l)) + "}"
                      for l in levels)
