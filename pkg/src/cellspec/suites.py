"""Exhaustive verification suites, one per finitely valid lemma.

Each suite splits into tasks (one per base instance) so the harness can
shard work across processes; results are merged in task order, which keeps
the output independent of scheduling.
"""
from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations, product as cartesian
from typing import Any, Callable

from .clique import bits, maximal_cliques
from .constructions import (
    AntichainFamily,
    f_poset,
    is_monotone_surjection,
    lemma_tech1_check,
    product,
    pullback_antichain,
    t_family,
    witness_family,
)
from .generators import (
    canonical_form,
    canonical_preorders,
    labeled_preorders,
    random_stream,
)
from .order import (
    MonotoneMap,
    Preorder,
    cellularity,
    cellularity_bruteforce,
    density,
    is_antichain,
    is_n_linked,
)
from .spectrum import (
    SpectrumQuery,
    antichains,
    char_k,
    direction_check,
    invariant_chain_report,
    lemma_tech2_check,
    product_spectrum_check,
    rel_spectrum_member,
    verify_family_witness,
)
from .topology import alexandrov_space, down_closed_sets, open_poset, space_product

DEFAULT_SEED = 20240601


@dataclass
class SuiteResult:
    suite: str
    instances: int
    violations: list[dict]
    caps: dict[str, int]
    seed: int
    extra: dict[str, Any] = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.violations


def _pdoc(P: Preorder) -> dict:
    return {"size": P.size, "leq": [list(p) for p in P.pairs()], "closed": True}


def normalized_families(P: Preorder, max_members: int | None = None) -> list[tuple[int, ...]]:
    """Every nonempty normalized family of antichains, members as bitmasks.

    The empty antichain only appears in the one-member family ``{{}}``.
    """
    ants = sorted(antichains(P), key=bits)
    out: list[tuple[int, ...]] = [(0,)]

    def rec(i: int, chosen: list[int]) -> None:
        if chosen:
            out.append(tuple(sorted(chosen, key=bits)))
        if max_members is not None and len(chosen) >= max_members:
            return
        for j in range(i, len(ants)):
            a = ants[j]
            if any(a & c == a or a & c == c for c in chosen):
                continue
            chosen.append(a)
            rec(j + 1, chosen)
            chosen.pop()

    rec(0, [])
    return out


def _family(P: Preorder, members: tuple[int, ...]) -> AntichainFamily:
    return AntichainFamily.from_members(P, [bits(m) for m in members])


# ---------------------------------------------------------------- tech1

def _tasks_grid(caps: dict[str, int], seed: int) -> list[tuple]:
    return [(P, caps["members"]) for P in canonical_preorders(caps["size"])]


def _check_tech1(task: tuple) -> tuple[int, list[dict]]:
    """Incompatibility in F(A) coincides with the union leaving F(A)."""
    P, members = task
    bad, count = [], 0
    for fam_masks in normalized_families(P, members):
        fp = f_poset(_family(P, fam_masks))
        count += 1
        lists = fp.set_lists()
        for i, F in enumerate(lists):
            for G in lists[i:]:
                if not lemma_tech1_check(fp, F, G):
                    bad.append({"base": _pdoc(P), "family": [bits(m) for m in fam_masks], "F": F, "G": G})
    return count, bad


def _check_tfamily(task: tuple) -> tuple[int, list[dict]]:
    """The pairs (p, {p}) form an antichain of P x F(A)."""
    P, members = task
    bad, count = [], 0
    for fam_masks in normalized_families(P, members):
        fam = _family(P, fam_masks)
        T = t_family(fam)
        count += 1
        if not T.verified or len(T.members) != fam.union_size:
            bad.append({"base": _pdoc(P), "family": fam.member_lists()})
    return count, bad


def _check_tech2(task: tuple) -> tuple[int, list[dict]]:
    """Singletons of a 2-linked subset of the union are pairwise incompatible in F(A)."""
    P, members = task
    bad, count = [], 0
    for fam_masks in normalized_families(P, members):
        fam = _family(P, fam_masks)
        union = bits(fam.union)
        for r in range(1, len(union) + 1):
            for A in combinations(union, r):
                if not is_n_linked(P, A, 2):
                    continue
                count += 1
                res = lemma_tech2_check(fam, A, 2)
                if not res.holds:
                    bad.append({"base": _pdoc(P), "family": fam.member_lists(), "A": list(A)})
    return count, bad


# ---------------------------------------------------------------- witness family

def _tasks_pairs(caps: dict[str, int], seed: int) -> list[tuple]:
    inst = canonical_preorders(caps["size"])
    return [(P, inst) for P in inst]


def _check_witness_family(task: tuple) -> tuple[int, list[dict]]:
    """Each A_r built from a maximal antichain W of P x Q is an antichain of P,
    and the union of the A_r is the first projection of W."""
    P, inst = task
    bad, count = [], 0
    for Q in inst:
        prod = product(P, Q)
        for W in maximal_cliques(prod.incompatibility):
            count += 1
            proj = 0
            for w in W:
                proj |= 1 << (w // Q.size)
            raw_ok = True
            for r in range(Q.size):
                A_r = [w // Q.size for w in W if Q.leq(r, w % Q.size)]
                if not is_antichain(P, A_r):
                    raw_ok = False
            fam = witness_family(P, Q, W)
            if not raw_ok or fam.union != proj:
                bad.append({"P": _pdoc(P), "Q": _pdoc(Q), "W": W})
    return count, bad


# ---------------------------------------------------------------- pullback

def _monotone_surjections(S: Preorder, T: Preorder):
    if T.size > S.size:
        return
    for image in cartesian(range(T.size), repeat=S.size):
        m = MonotoneMap(S, T, tuple(image))
        if is_monotone_surjection(m):
            yield m


def _tasks_pullback(caps: dict[str, int], seed: int) -> list[tuple]:
    inst = canonical_preorders(caps["size"])
    rs = canonical_preorders(caps["rsize"])
    return [(S, inst, rs) for S in inst]


def _check_pullback(task: tuple) -> tuple[int, list[dict]]:
    """Antichains of target x R lift along a monotone surjection to antichains
    of source x R of the same size."""
    S, inst, rs = task
    bad, count = [], 0
    for T in inst:
        maps = list(_monotone_surjections(S, T))
        if not maps:
            continue
        for R in rs:
            TR = product(T, R)
            c_down = cellularity(TR)[0]
            c_up = cellularity(product(S, R))[0]
            if c_down > c_up:
                bad.append({"source": _pdoc(S), "target": _pdoc(T), "R": _pdoc(R), "cellularity": [c_up, c_down]})
            ws = list(maximal_cliques(TR.incompatibility))
            for m in maps:
                for W in ws:
                    count += 1
                    try:
                        lifted = pullback_antichain(m, R, W)
                    except AssertionError:
                        lifted = ()
                    if len(lifted) != len(W):
                        bad.append({"source": _pdoc(S), "target": _pdoc(T), "map": list(m.image),
                                    "R": _pdoc(R), "W": W})
    return count, bad


# ---------------------------------------------------------------- denspec

def _tasks_denspec(caps: dict[str, int], seed: int) -> list[tuple]:
    return [(P, caps["k"]) for P in canonical_preorders(caps["size"])]


def _check_denspec(task: tuple) -> tuple[int, list[dict]]:
    """Families whose union exceeds k * d(P) have F(A) of cellularity above k."""
    P, kmax = task
    d, _ = density(P)
    bad, count = [], 0
    for fam_masks in normalized_families(P):
        fam = _family(P, fam_masks)
        c_f = None
        for k in range(1, kmax + 1):
            if fam.union_size < k * d + 1:
                continue
            if c_f is None:
                c_f = cellularity(f_poset(fam).as_preorder)[0]
            count += 1
            if c_f < k + 1:
                bad.append({"base": _pdoc(P), "family": fam.member_lists(), "k": k, "c": c_f})
    return count, bad


# ---------------------------------------------------------------- direction / agreement

def _tasks_agreement(caps: dict[str, int], seed: int) -> list[tuple]:
    return [(P, caps["k"], caps["test-bound"]) for P in canonical_preorders(caps["size"])]


def _check_agreement(task: tuple) -> tuple[int, list[dict], list[dict]]:
    """A negative family verdict makes F(A) itself a product witness; the
    converse is tabulated against the bounded oracle, never asserted."""
    P, kmax, N = task
    bad, rows = [], []
    for k in range(1, kmax + 1):
        rep = char_k(P, SpectrumQuery(k))
        if rep.verdict is False and not verify_family_witness(P, k, rep.witness):
            bad.append({"P": _pdoc(P), "k": k, "reason": "char witness does not re-verify"})
        problem = direction_check(P, k, rep)
        if problem:
            bad.append({"P": _pdoc(P), "k": k, "reason": problem})
        oracle = rel_spectrum_member(P, SpectrumQuery(k, N))
        fa_size = f_poset(rep.witness.family).size if rep.verdict is False else None
        rows.append({
            "P": _pdoc(P), "k": k, "char": rep.verdict, "oracle": oracle.verdict,
            "test_bound": N, "fa_size": fa_size,
            "agree": rep.verdict == oracle.verdict,
        })
    return len(rows), bad, rows


# ---------------------------------------------------------------- invariant chain

def _tasks_chain(caps: dict[str, int], seed: int) -> list[tuple]:
    inst = canonical_preorders(caps["size"])
    stream = random_stream(caps["random"], (1, caps["rsize"]), (0.05, 0.15, 0.3, 0.5), seed)
    inst += list(stream)
    return [(P,) for P in inst]


def _check_chain(task: tuple) -> tuple[int, list[dict]]:
    """c = ind_2 <= ind_3 <= ind_4, ind_n <= (n-1) d, c <= d, c <= fin-pc,
    plus the scaled density bound on families."""
    (P,) = task
    rep = invariant_chain_report(P, 4)
    if rep.violations:
        return 1, [{"P": _pdoc(P), "violations": rep.violations}]
    return 1, []


# ---------------------------------------------------------------- topology

def _tasks_alexandrov(caps: dict[str, int], seed: int) -> list[tuple]:
    small = canonical_preorders(caps["psize"])
    tasks: list[tuple] = [("single", Q) for Q in canonical_preorders(caps["size"])]
    tasks += [("pair", P, small) for P in small]
    return tasks


def _check_alexandrov(task: tuple) -> tuple[int, list[dict]]:
    """Alexandrov opens are the down-sets and keep cellularity; space products
    have the cellularity of the product of open posets."""
    bad, count = [], 0
    if task[0] == "single":
        Q = task[1]
        X = alexandrov_space(Q)
        count += 1
        if set(X.opens) != set(down_closed_sets(Q)):
            bad.append({"Q": _pdoc(Q), "reason": "opens differ from down-sets"})
        OX = open_poset(X)
        if cellularity(OX)[0] != cellularity(Q)[0]:
            bad.append({"Q": _pdoc(Q), "reason": "cellularity changed"})
        opens = X.nonempty_opens
        for i in range(OX.size):
            for j in range(OX.size):
                if bool(OX.down[i] & OX.down[j]) != bool(opens[i] & opens[j]):
                    bad.append({"Q": _pdoc(Q), "reason": "compatibility differs from intersection"})
        return count, bad
    _, P, small = task
    X = alexandrov_space(P)
    for Q in small:
        Y = alexandrov_space(Q)
        count += 1
        lhs = cellularity(open_poset(space_product(X, Y)))[0]
        rhs = cellularity(product(open_poset(X), open_poset(Y)))[0]
        if lhs != rhs:
            bad.append({"P": _pdoc(P), "Q": _pdoc(Q), "space": lhs, "posets": rhs})
    return count, bad


# ---------------------------------------------------------------- enumeration

def _tasks_enumeration(caps: dict[str, int], seed: int) -> list[tuple]:
    return [(n,) for n in range(1, caps["size"] + 1)]


def _check_enumeration(task: tuple) -> tuple[int, list[dict]]:
    """Stream representatives are pairwise non-isomorphic and cover every
    labelled preorder's class."""
    (n,) = task
    bad = []
    stream = [P for P in canonical_preorders(n) if P.size == n]
    codes = [canonical_form(P).code for P in stream]
    for i, j in combinations(range(len(codes)), 2):
        if codes[i] == codes[j]:
            bad.append({"n": n, "duplicate": [_pdoc(stream[i]), _pdoc(stream[j])]})
    labeled = list(labeled_preorders(n))
    classes = {canonical_form(P).code for P in labeled}
    if classes != set(codes):
        bad.append({"n": n, "reason": "class sets differ", "labeled_classes": len(classes), "stream": len(codes)})
    if n == 3 and len(labeled) != 29:
        bad.append({"n": n, "reason": f"labelled count {len(labeled)} != 29"})
    return len(stream), bad


# ---------------------------------------------------------------- solver

def _tasks_solver(caps: dict[str, int], seed: int) -> list[tuple]:
    inst = canonical_preorders(caps["size"])
    inst += list(random_stream(caps["random"], (1, caps["rsize"]), (0.05, 0.1, 0.2, 0.35), seed))
    return [(P,) for P in inst]


def _check_solver(task: tuple) -> tuple[int, list[dict]]:
    """Branch and bound agrees with subset enumeration."""
    (P,) = task
    c, w = cellularity(P)
    cb, _ = cellularity_bruteforce(P)
    if c != cb or not is_antichain(P, w):
        return 1, [{"P": _pdoc(P), "bnb": c, "brute": cb}]
    return 1, []


# ---------------------------------------------------------------- product spectrum

def _tasks_product_spectrum(caps: dict[str, int], seed: int) -> list[tuple]:
    inst = canonical_preorders(caps["size"])
    return [(P, inst, caps["kmax"], caps["test-bound"]) for P in inst]


def _check_product_spectrum(task: tuple) -> tuple[int, list[dict], list[dict]]:
    """Spectrum of P x Q sits inside both factor spectra, via projection pullback."""
    P, inst, kmax, N = task
    bad, rows = [], []
    for Q in inst:
        rec = product_spectrum_check(P, Q, kmax, N)
        if not rec.inclusion_holds or rec.pullback_failures:
            bad.append({"P": _pdoc(P), "Q": _pdoc(Q), "pullback_failures": rec.pullback_failures})
        rows.append({"P": _pdoc(P), "Q": _pdoc(Q), "spec_p": rec.spec_p, "spec_q": rec.spec_q,
                     "spec_pq": rec.spec_pq, "reverse_discrepancies": rec.reverse_discrepancies})
    return len(rows), bad, rows


@dataclass(frozen=True)
class Suite:
    name: str
    lemma: str
    defaults: dict[str, int]
    tasks: Callable[[dict[str, int], int], list[tuple]]
    check: Callable[[tuple], tuple]


SUITES: dict[str, Suite] = {
    s.name: s
    for s in [
        Suite("tech1", "incompatibility in F(A) is the union test", {"size": 4, "members": 3}, _tasks_grid, _check_tech1),
        Suite("t-family", "(p, {p}) pairs form a product antichain", {"size": 4, "members": 3}, _tasks_grid, _check_tfamily),
        Suite("witness-family", "A_r families from product antichains", {"size": 3}, _tasks_pairs, _check_witness_family),
        Suite("tech2", "2-linked sets give singleton antichains in F(A)", {"size": 4, "members": 3}, _tasks_grid, _check_tech2),
        Suite("proj-pullback", "monotone surjections shrink the spectrum", {"size": 4, "rsize": 3}, _tasks_pullback, _check_pullback),
        Suite("denspec-finite", "density bounds F(A) cellularity from below", {"size": 4, "k": 3}, _tasks_denspec, _check_denspec),
        Suite("agreement-experiment", "family characterization vs bounded oracle", {"size": 4, "k": 4, "test-bound": 3}, _tasks_agreement, _check_agreement),
        Suite("invariant-chain", "c <= pc <= K_2 <= ... <= d chain", {"size": 5, "random": 1000, "rsize": 8}, _tasks_chain, _check_chain),
        Suite("alexandrov", "spectrum of a space equals that of its open poset", {"size": 5, "psize": 3}, _tasks_alexandrov, _check_alexandrov),
        Suite("enumeration", "canonical stream against labelled brute force", {"size": 4}, _tasks_enumeration, _check_enumeration),
        Suite("solver", "clique search against subset enumeration", {"size": 6, "random": 500, "rsize": 12}, _tasks_solver, _check_solver),
        Suite("product-spectrum", "spectrum of a product is the intersection", {"size": 2, "kmax": 4, "test-bound": 3}, _tasks_product_spectrum, _check_product_spectrum),
    ]
}


def _run_task(args: tuple[str, tuple]) -> tuple:
    name, task = args
    return SUITES[name].check(task)


def run_suite(name: str, caps: dict[str, int] | None = None, seed: int = DEFAULT_SEED, jobs: int = 1) -> SuiteResult:
    """Run one suite; ``caps`` override the suite's defaults key by key."""
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; known: {', '.join(sorted(SUITES))}")
    suite = SUITES[name]
    merged = dict(suite.defaults)
    for key, value in (caps or {}).items():
        if key not in merged:
            raise KeyError(f"suite {name!r} has no cap {key!r}; known: {', '.join(sorted(merged))}")
        merged[key] = value
    start = time.perf_counter()
    tasks = suite.tasks(merged, seed)
    payload = [(name, t) for t in tasks]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_task, payload, chunksize=max(1, len(payload) // (4 * jobs))))
    else:
        results = [_run_task(p) for p in payload]
    instances, violations, rows = 0, [], []
    for res in results:
        instances += res[0]
        violations.extend(res[1])
        if len(res) > 2:
            rows.extend(res[2])
    extra: dict[str, Any] = {}
    if name == "agreement-experiment":
        extra["table"] = rows
        extra["converse_discrepancies"] = [r for r in rows if not r["agree"]]
    elif name == "product-spectrum":
        extra["table"] = rows
    elif name == "enumeration":
        extra["counts"] = {str(n): sum(1 for P in canonical_preorders(merged["size"]) if P.size == n)
                           for n in range(1, merged["size"] + 1)}
        extra["labeled_count_3"] = sum(1 for _ in labeled_preorders(3))
    return SuiteResult(name, instances, violations, merged, seed, extra, time.perf_counter() - start)


def replay(name: str, violation: dict, caps: dict[str, int] | None = None, seed: int = DEFAULT_SEED) -> bool:
    """True when re-running the suite still reports ``violation``."""
    return violation in run_suite(name, caps, seed).violations
