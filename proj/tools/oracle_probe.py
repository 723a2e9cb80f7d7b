#!/usr/bin/env python3
"""Aggressive global-minimum probe for the M2->M3 sweep tail, to decide whether
the second mass-line discontinuity sits near 2.376 or at 3 - 0.563 = 2.437.
Uses many multistart scales plus structured starts."""
import numpy as np
from scipy.optimize import minimize as scipy_min

rng = np.random.default_rng(123)

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
    dirs = []
    for H in gellmann(2):
        M = np.zeros((3, 3), complex); M[:2, :2] = H; dirs.append(1j * M)
    for (p, q) in [(0, 2), (1, 2)]:
        M = np.zeros((3, 3), complex); M[p, q] = M[q, p] = 1 / np.sqrt(2); dirs.append(1j * M)
        M = np.zeros((3, 3), complex); M[p, q] = -1j / np.sqrt(2); M[q, p] = 1j / np.sqrt(2); dirs.append(1j * M)
    M = np.diag([1, 1, -2]).astype(complex) / np.sqrt(6)
    dirs.append(1j * M)
    return dirs

DIRS = adapted_m2m3()
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

def heavy(lam, nrand=120):
    starts = [np.zeros(NFREE * (NJ + 1))]
    for t in (-2, -1, -0.5, 0.5, 1, 1.5, 2, 3):
        starts.append(basis_start(t))
    for _ in range(nrand):
        sc = rng.choice([0.3, 0.7, 1.0, 2.0, 4.0])
        starts.append(rng.uniform(-sc, sc, NFREE * (NJ + 1)))
    return minimize_at(lam, starts)

def spectrum(lam, x):
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
    return np.sqrt(np.clip(np.linalg.eigvalsh(M), 0, None))

# symmetry probe: V_min(l) vs V_min(3-l)
for l in (0.6, 0.8, 1.2, 1.4):
    a, b = heavy(l, 60), heavy(3 - l, 60)
    print(f"V_min({l:.2f}) = {a.fun:.9f}   V_min({3-l:.2f}) = {b.fun:.9f}")

# fine scan of the tail
print("\nlam    V_min        masses")
prev = None
lams = np.arange(2.30, 2.5001, 0.01)
for lam in lams:
    r = heavy(lam)
    m = spectrum(lam, r.x)
    jump = "" if prev is None else ("  JUMP %.3f" % np.abs(m - prev).max()
                                    if np.abs(m - prev).max() > 0.05 else "")
    print(f"{lam:.3f}  {r.fun:11.6f}  {np.round(m,4)}{jump}")
    prev = m
