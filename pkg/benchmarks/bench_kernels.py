"""Compare the compiled and numpy Schur-complement kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5]

For each relaxation it times one Schur assembly per backend on a random
NT scaling matrix, checks the two agree, then times a full solve.
"""

import argparse
import time

import numpy as np

from hierarchy_lab.algebra import MultiIndex, Polynomial, monomials_up_to, parse_polynomial
from hierarchy_lab.relaxations import Hierarchy, HierarchyKind, PolyProblem, build_relaxation
from hierarchy_lab.solver import kernels, solve, standard_form
from hierarchy_lab.solver.ipm import _Stack


def quartic_ball(n: int, seed: int = 0) -> PolyProblem:
    rng = np.random.default_rng(seed)
    terms = {}
    for alpha in monomials_up_to(n, 4):
        terms[alpha] = int(rng.integers(-3, 4))
    ball = Polynomial({MultiIndex.zero(n): 1, **{MultiIndex.unit(i, n) * 2: -1 for i in range(n)}}, n)
    return PolyProblem(Polynomial(terms, n), (ball,))


def cases():
    names = ["x1", "x2"]
    ce = PolyProblem(parse_polynomial("(-2 + x1 + x2)^2", names), (parse_polynomial("1 - x1^2 - x2^2", names),))
    yield "counterexample lasserre d=5", ce, 5, HierarchyKind(Hierarchy.LASSERRE)
    yield "counterexample sdsos d=5", ce, 5, HierarchyKind(Hierarchy.SDSOS)
    yield "quartic n=3 lasserre d=3", quartic_ball(3), 3, HierarchyKind(Hierarchy.LASSERRE)
    yield "quartic n=4 lasserre d=3", quartic_ball(4), 3, HierarchyKind(Hierarchy.LASSERRE)
    yield "quartic n=3 sdsos d=3", quartic_ball(3), 3, HierarchyKind(Hierarchy.SDSOS)


def time_schur(kern, sf, W_by_stack, repeat):
    stacks = W_by_stack[0]
    best = float("inf")
    H = None
    for _ in range(repeat):
        H = np.zeros((sf.m, sf.m))
        t0 = time.perf_counter()
        for st, W in zip(stacks, W_by_stack[1]):
            kern.schur_psd(H, st.rows, st.cols, st.vars, st.coefs, W)
        best = min(best, time.perf_counter() - t0)
    return best, H


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = kernels.available()
    if "compiled" not in backends:
        print("compiled kernels not built; only the numpy backend is timed")
    rng = np.random.default_rng(1)
    print(f"{'case':<30}{'m':>6}" + "".join(f"{'schur ' + b:>16}" for b in backends)
          + "".join(f"{'solve ' + b:>16}" for b in backends) + f"{'max |dH|':>12}")
    for label, problem, d, kind in cases():
        cp = build_relaxation(problem, d, kind)
        sf = standard_form(cp)
        dims = sorted({b.dim for b in sf.blocks})
        stacks = [_Stack(s, [i for i, b in enumerate(sf.blocks) if b.dim == s], sf.blocks, sf.m) for s in dims]
        Ws = []
        for st in stacks:
            G = rng.standard_normal((st.K, st.dim, st.dim))
            Ws.append(np.ascontiguousarray(G @ np.swapaxes(G, 1, 2) + np.eye(st.dim)))
        schur, solves, Hs = [], [], []
        for b in backends:
            t, H = time_schur(kernels.get(b), sf, (stacks, Ws), args.repeat)
            schur.append(t)
            Hs.append(H)
            t0 = time.perf_counter()
            res = solve(cp, backend=b)
            solves.append(time.perf_counter() - t0)
            assert res.status.value == "OPTIMAL", res.status
        diff = max(float(np.max(np.abs(H - Hs[0]))) for H in Hs)
        print(f"{label:<30}{sf.m:>6}" + "".join(f"{1e3 * t:>14.2f}ms" for t in schur)
              + "".join(f"{1e3 * t:>14.1f}ms" for t in solves) + f"{diff:>12.1e}")


if __name__ == "__main__":
    main()
