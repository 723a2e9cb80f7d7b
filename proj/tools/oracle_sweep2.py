#!/usr/bin/env python3
"""General diagonal-sweep oracle for all four table cases.
Finds the first and second labeled-group discontinuities by grid scan plus
warm chains in both directions, refined by bisection with cold restarts.
Usage: oracle_sweep2.py {m2m3|m4|m5a|m5b} [grid_step]"""
import sys
import numpy as np
from scipy.optimize import minimize as scipy_min

rng = np.random.default_rng(2024)

def gellmann(n):
    H = []
    for a in range(n):
        for b in range(a + 1, n):
            M = np.zeros((n, n), complex); M[a, b] = M[b, a] = 1 / np.sqrt(2); H.append(M)
    for a in range(n):
        for b in range(a + 1, n):
            M = np.zeros((n, n), complex); M[a, b] = -1j / np.sqrt(2); M[b, a] = 1j / np.sqrt(2); H.append(M)
    for k in range(1, n):
        M = np.zeros((n, n), complex)
        for t in range(k): M[t, t] = 1
        M[k, k] = -k
        H.append(M / np.sqrt(k * (k + 1)))
    return H

CASES = {
    "m2m3": dict(ns=[2], m=3, target=(0.563, 2.376)),
    "m4":   dict(ns=[2, 2], m=4, target=(0.542, 2.456)),
    "m5a":  dict(ns=[2, 2], m=5, target=(0.734, 2.263)),
    "m5b":  dict(ns=[2, 3], m=5, target=(0.475, 2.526)),
}

case = CASES[sys.argv[1]]
STEP = float(sys.argv[2]) if len(sys.argv) > 2 else 0.02
ns, m = case["ns"], case["m"]
n0 = m - sum(ns)

# inherited directions: factor bases lifted into consecutive env blocks
inh, inh_lab = [], []
off = 0
for fi, n in enumerate(ns):
    for H in gellmann(n):
        M = np.zeros((m, m), complex); M[off:off + n, off:off + n] = H
        inh.append(1j * M); inh_lab.append(f"a{fi+1}")
    off += n

# complement: cross-region entries (fam 2), then consecutive-pair diagonals (fam 5)
regions = []
off = 0
for n in ns:
    regions.append((off, n)); off += n
if n0 > 0:
    regions.append((off, n0))
comp, comp_lab = [], []
nreg = len(regions)
def reg_lab(p, q):
    slack_idx = nreg - 1 if n0 > 0 else -1
    if p == slack_idx or q == slack_idx:
        e = min(p, q)
        return f"c{e+1}"
    return "b"
for p in range(nreg):
    for q in range(p + 1, nreg):
        (op, np_), (oq, nq) = regions[p], regions[q]
        for a in range(np_):
            for b in range(nq):
                M = np.zeros((m, m), complex); M[op + a, oq + b] = M[oq + b, op + a] = 1 / np.sqrt(2)
                comp.append(1j * M); comp_lab.append(reg_lab(p, q))
                M = np.zeros((m, m), complex); M[op + a, oq + b] = -1j / np.sqrt(2); M[oq + b, op + a] = 1j / np.sqrt(2)
                comp.append(1j * M); comp_lab.append(reg_lab(p, q))
pairs = []
if n0 > 0:
    pairs.append((None, 0))
for fi in range(len(ns) - 1):
    pairs.append((fi, fi + 1))
pairs = pairs[1:] + pairs[:1] if n0 > 0 else pairs
raw5 = []
for (i, j) in pairs:
    ni = n0 if i is None else ns[i]
    nj = ns[j]
    oi = regions[nreg - 1][0] if i is None else regions[i][0]
    oj = regions[j][0]
    M = np.zeros((m, m), complex)
    M[oi:oi + ni, oi:oi + ni] = nj * np.eye(ni)
    M[oj:oj + nj, oj:oj + nj] = -ni * np.eye(nj)
    raw5.append(M)
for M in raw5:
    for D in comp:
        M = M - np.trace(D.conj().T @ (1j * M)) * (-1j) * D
    for D in inh:
        M = M - np.trace(D.conj().T @ (1j * M)) * (-1j) * D
    M = M - np.trace(M) / m * np.eye(m)
    nrm = np.sqrt(np.trace(M @ M).real)
    M = M / nrm
    slack_entry = abs(M[m - 1, m - 1]) > 1e-9 if n0 > 0 else False
    comp.append(1j * M); comp_lab.append("e" if slack_entry else "d")

DIRS = inh + comp
DLAB = inh_lab + comp_lab
NJ = len(DIRS)
NI = len(inh)
NFREE = NJ - NI
print(f"case {sys.argv[1]}: m={m} NJ={NJ} NI={NI} NFREE={NFREE} labels={sorted(set(DLAB))}")

C = np.zeros((NJ, NJ, NJ))
for a in range(NJ):
    for b in range(NJ):
        com = DIRS[a] @ DIRS[b] - DIRS[b] @ DIRS[a]
        for c in range(NJ):
            C[a, b, c] = (-np.trace(DIRS[c] @ com)).real
E = np.stack(DIRS)
TR = 1j * np.eye(m) / np.sqrt(m)
NC = NJ + 1

def fields(lam, x):
    B = np.zeros((NJ, m, m), complex)
    B[:NI] = lam * E[:NI]
    xc = x.reshape(NFREE, NC)
    B[NI:] = np.einsum("fl,lab->fab", xc[:, :NJ], E) + xc[:, NJ][:, None, None] * TR
    return B

def v_and_grad(lam, x):
    B = fields(lam, x)
    comm = np.einsum("kab,lbc->klac", B, B)
    comm = comm - comm.transpose(1, 0, 2, 3)
    Om = np.einsum("klm,mab->klab", C, B) - comm
    V = 0.5 * np.einsum("klab,klab->", Om, Om.conj()).real
    G = -np.einsum("klm,klab->mab", C, Om)
    t = np.einsum("lab,mlbc->mac", B, Om) - np.einsum("mlab,lbc->mac", Om, B)
    G = G + 2 * t
    gr = np.einsum("lab,mba->ml", E, G[NI:]).real
    gt = np.einsum("ab,mba->m", TR, G[NI:]).real
    return V, np.concatenate([gr, gt[:, None]], axis=1).ravel()

def basis_start(t=1.0):
    x = np.zeros((NFREE, NC))
    for f in range(NFREE):
        x[f, NI + f] = t
    return x.ravel()

def minimize_at(lam, starts):
    best = None
    for x0 in starts:
        r = scipy_min(lambda x: v_and_grad(lam, x), x0, jac=True, method="L-BFGS-B",
                      options=dict(maxiter=4000, ftol=1e-18, gtol=1e-10))
        if best is None or r.fun < best.fun:
            best = r
    return best

CLASSES = {}
for i, l in enumerate(DLAB):
    CLASSES.setdefault(l, []).append(i)

def group_masses(lam, x):
    """Degeneracy groups split by class-projection weights; stable under
    arbitrary eigenvector mixing inside a degenerate eigenspace."""
    B = fields(lam, x)
    M = np.zeros((NJ, NJ))
    for b in range(NJ):
        cb = np.einsum("lab,bc->lac", E, B[b]) - np.einsum("ab,lbc->lac", B[b], E)
        M += np.einsum("lac,kac->lk", cb, cb.conj()).real
    w, vecs = np.linalg.eigh(M)
    masses = np.sqrt(np.clip(w, 0, None))
    out = {}
    i = 0
    while i < NJ:
        j = i + 1
        while j < NJ and masses[j] - masses[i] <= 1e-6 * max(1.0, masses[j]):
            j += 1
        U = vecs[:, i:j]
        g = j - i
        wts = {lab: float(np.sum(U[idx, :] ** 2)) for lab, idx in CLASSES.items()}
        ints = {lab: int(round(v)) for lab, v in wts.items()}
        if all(abs(wts[lab] - ints[lab]) < 0.1 for lab in wts) and sum(ints.values()) == g:
            mu = float(np.mean(masses[i:j]))
            for lab, d in ints.items():
                for _ in range(d):
                    out.setdefault(lab, []).append(mu)
        else:
            best_lab = max(wts, key=wts.get)
            lab = best_lab if wts[best_lab] >= 0.9 * g else "mixed"
            for t in range(i, j):
                out.setdefault(lab, []).append(masses[t])
        i = j
    return {k: np.array(sorted(v)) for k, v in out.items()}

def jumped(g1, g2):
    if set(g1) != set(g2):
        return True
    for k in g1:
        a, b = g1[k], g2[k]
        if len(a) != len(b) or np.abs(a - b).max() > 0.05:
            return True
    return False

lams = np.arange(0.0, 3.0 + 1e-9, STEP)
def chain(order):
    res = {}
    warm = None
    for lam in order:
        starts = [np.zeros(NFREE * NC), basis_start(1.0)]
        if warm is not None:
            starts.insert(0, warm)
        for _ in range(4):
            sc = rng.choice([0.5, 1.0, 2.0])
            starts.append(rng.uniform(-sc, sc, NFREE * NC))
        r = minimize_at(lam, starts)
        warm = r.x.copy()
        res[round(float(lam), 6)] = r
    return res

fw = chain(lams)
bw = chain(lams[::-1])
best = {k: (fw[k] if fw[k].fun <= bw[k].fun else bw[k]) for k in fw}
print(f"V_min(0)={best[0.0].fun:.3e}  V_min(1.0)={best[1.0].fun:.3e}  V_min(3.0)={best[3.0].fun:.6f}")

groups = {k: group_masses(k, best[k].x) for k in best}
intervals = []
ks = [round(float(l), 6) for l in lams]
for k1, k2 in zip(ks, ks[1:]):
    if jumped(groups[k1], groups[k2]):
        intervals.append((k1, k2))
print("jump intervals:", intervals)

def cold(lam):
    starts = [np.zeros(NFREE * NC), basis_start(1.0)]
    for _ in range(12):
        sc = rng.choice([0.5, 1.0, 2.0, 3.0])
        starts.append(rng.uniform(-sc, sc, NFREE * NC))
    return minimize_at(lam, starts)

refined = []
for (lo, hi) in intervals:
    glo, ghi = groups[lo], groups[hi]
    while hi - lo > 1e-3:
        mid = 0.5 * (lo + hi)
        r = cold(mid)
        gm = group_masses(mid, r.x)
        if jumped(glo, gm):
            hi, ghi = mid, gm
        else:
            lo, glo = mid, gm
    refined.append(0.5 * (lo + hi))
print("refined discontinuities:", [round(r, 4) for r in refined])
print("targets:", case["target"])
