#!/usr/bin/env python3
"""Track labeled mass groups along the M2->M3 sweep to locate label transitions
that register as labeled-group jumps even where eigenvalues move smoothly."""
import numpy as np
from scipy.optimize import minimize as scipy_min

rng = np.random.default_rng(7)

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

def adapted_m2m3():
    dirs, labels = [], []
    for H in gellmann(2):
        M = np.zeros((3, 3), complex); M[:2, :2] = H; dirs.append(1j * M); labels.append("a1")
    for (p, q) in [(0, 2), (1, 2)]:
        M = np.zeros((3, 3), complex); M[p, q] = M[q, p] = 1 / np.sqrt(2); dirs.append(1j * M); labels.append("c1")
        M = np.zeros((3, 3), complex); M[p, q] = -1j / np.sqrt(2); M[q, p] = 1j / np.sqrt(2); dirs.append(1j * M); labels.append("c1")
    M = np.diag([1, 1, -2]).astype(complex) / np.sqrt(6)
    dirs.append(1j * M); labels.append("e")
    return dirs, labels

DIRS, DLAB = adapted_m2m3()
NJ, NI = 8, 3
NFREE = NJ - NI
C = np.zeros((NJ, NJ, NJ))
for a in range(NJ):
    for b in range(NJ):
        com = DIRS[a] @ DIRS[b] - DIRS[b] @ DIRS[a]
        for c in range(NJ):
            C[a, b, c] = (-np.trace(DIRS[c] @ com)).real
E = np.stack(DIRS)
TR = 1j * np.eye(3) / np.sqrt(3)

def fields(lam, x):
    B = np.zeros((NJ, 3, 3), complex)
    B[:NI] = lam * E[:NI]
    xc = x.reshape(NFREE, NJ + 1)
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
    x = np.zeros((NFREE, NJ + 1))
    for f in range(NFREE):
        x[f, NI + f] = t
    return x.ravel()

def minimize_at(lam, starts):
    best = None
    for x0 in starts:
        r = scipy_min(lambda x: v_and_grad(lam, x), x0, jac=True, method="L-BFGS-B",
                      options=dict(maxiter=3000, ftol=1e-18, gtol=1e-11))
        if best is None or r.fun < best.fun:
            best = r
    return best

def heavy_starts(nrand=60):
    starts = [np.zeros(NFREE * (NJ + 1))]
    for t in (-1, 0.5, 1, 2):
        starts.append(basis_start(t))
    for _ in range(nrand):
        sc = rng.choice([0.5, 1.0, 2.0, 4.0])
        starts.append(rng.uniform(-sc, sc, NFREE * (NJ + 1)))
    return starts

CLASSES = {"a1": [i for i, l in enumerate(DLAB) if l == "a1"],
           "c1": [i for i, l in enumerate(DLAB) if l == "c1"],
           "e": [i for i, l in enumerate(DLAB) if l == "e"]}

def labeled_masses(lam, x):
    B = fields(lam, x)
    M = np.zeros((NJ, NJ))
    for l1 in range(NJ):
        for l2 in range(NJ):
            s = 0j
            for b in range(NJ):
                c1 = E[l1] @ B[b] - B[b] @ E[l1]
                c2 = E[l2] @ B[b] - B[b] @ E[l2]
                s += np.trace(c1 @ c2.conj().T)
            M[l1, l2] = s.real
    w, vecs = np.linalg.eigh(M)
    masses = np.sqrt(np.clip(w, 0, None))
    out = []
    for j in range(NJ):
        v = vecs[:, j]
        best_lab, best_w = "mixed", 0.0
        for lab, idx in CLASSES.items():
            wt = float(np.sum(v[idx] ** 2))
            if wt > best_w:
                best_w, best_lab = wt, lab
        out.append((masses[j], best_lab if best_w >= 0.9 else "mixed"))
    return out

prev = None
warm = None
for lam in np.arange(0.50, 2.501, 0.02):
    starts = heavy_starts(40)
    if warm is not None:
        starts.insert(0, warm)
    r = minimize_at(lam, starts)
    warm = r.x.copy()
    lm = labeled_masses(lam, r.x)
    groups = {}
    for m, lab in lm:
        groups.setdefault(lab, []).append(m)
    sig = {lab: (len(v), np.mean(v)) for lab, v in sorted(groups.items())}
    if prev is None or set(sig) != set(prev) or any(
            abs(sig[k][1] - prev[k][1]) > 0.05 or sig[k][0] != prev[k][0]
            for k in sig if k in prev):
        print(f"lam={lam:.2f}  V={r.fun:10.5f}  " +
              "  ".join(f"{lab}:{n}x{mu:.4f}" for lab, (n, mu) in sig.items()))
    prev = sig
