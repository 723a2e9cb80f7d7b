#!/usr/bin/env python3
"""Prototype of the vacuum sweep on the M2->M3 step, used to validate the
minimizer design (multistart + bidirectional warm chain) and the frozen table
constants before the C++ implementation. Self-contained on purpose."""
import numpy as np
from scipy.optimize import minimize as scipy_min

rng = np.random.default_rng(0)


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


# ---- M2 -> M3 adapted basis (order: inherited sl(2), family-2 entries, family-5 diagonal)
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
NJ = len(DIRS)          # 8
NI = 3                  # inherited
NFREE = NJ - NI         # 5
C = np.zeros((NJ, NJ, NJ))
for a in range(NJ):
    for b in range(NJ):
        com = DIRS[a] @ DIRS[b] - DIRS[b] @ DIRS[a]
        for c in range(NJ):
            C[a, b, c] = (-np.trace(DIRS[c] @ com)).real
E = np.stack(DIRS)      # (8,3,3)
TR = 1j * np.eye(3) / np.sqrt(3)


def fields(lam, x):
    """B stack (8,3,3): inherited frozen at lam*E, free from x (5*(8+1) reals)."""
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
    # G_mu = -C_{kl}^mu Om_kl + 2 [B_l, Om_{mu l}]
    G = -np.einsum("klm,klab->mab", C, Om)
    BO = np.einsum("lab,mlbc->mlac", B, Om) * 0  # placeholder shape
    t = np.einsum("lab,mlbc->mac", B, Om) - np.einsum("mlab,lbc->mac", Om, B)
    G = G + 2 * t
    g = np.empty(NFREE * (NJ + 1))
    gr = np.einsum("lab,mba->ml", E, G[NI:]).real      # tr(E_l G_mu)
    gt = np.einsum("ab,mba->m", TR, G[NI:]).real
    g = np.concatenate([gr, gt[:, None]], axis=1).ravel()
    return V, g


def fd_check():
    x = rng.normal(size=NFREE * (NJ + 1))
    V0, g = v_and_grad(0.7, x)
    h = 1e-6
    worst = 0.0
    for t in range(0, len(x), 7):
        xp = x.copy(); xp[t] += h
        xm = x.copy(); xm[t] -= h
        fd = (v_and_grad(0.7, xp)[0] - v_and_grad(0.7, xm)[0]) / (2 * h)
        worst = max(worst, abs(fd - g[t]) / max(1.0, abs(fd)))
    print(f"gradient FD check: worst rel err {worst:.2e}")
    assert worst < 1e-6


def minimize_at(lam, starts):
    best = None
    for x0 in starts:
        r = scipy_min(lambda x: v_and_grad(lam, x), x0, jac=True, method="L-BFGS-B",
                      options=dict(maxiter=2000, ftol=1e-16, gtol=1e-10))
        if best is None or r.fun < best.fun:
            best = r
    return best


def basis_start():
    x = np.zeros((NFREE, NJ + 1))
    for f in range(NFREE):
        x[f, NI + f] = 1.0
    return x.ravel()


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
    ev = np.linalg.eigvalsh(M)
    ev = np.clip(ev, 0, None)
    return np.sqrt(ev)


fd_check()

lams = np.arange(0.0, 3.0001, 0.02)
n = len(lams)
results = [None] * n
# forward warm chain + deterministic + random starts
warm = None
for idx in range(n):
    starts = [np.zeros(NFREE * (NJ + 1)), basis_start()]
    if warm is not None:
        starts.append(warm)
    for _ in range(4):
        starts.append(rng.uniform(-1, 1, NFREE * (NJ + 1)))
    r = minimize_at(lams[idx], starts)
    results[idx] = r
    warm = r.x.copy()
# backward warm chain
warm = None
for idx in range(n - 1, -1, -1):
    starts = [results[idx].x]
    if warm is not None:
        starts.append(warm)
    r = minimize_at(lams[idx], starts)
    if r.fun < results[idx].fun:
        results[idx] = r
    warm = results[idx].x.copy()

vmin = np.array([r.fun for r in results])
masses = np.stack([spectrum(lams[i], results[i].x) for i in range(n)])

i0 = np.argmin(np.abs(lams - 0)); i1 = np.argmin(np.abs(lams - 1))
print(f"V_min(0) = {vmin[i0]:.3e}   V_min(1) = {vmin[i1]:.3e}")
imax = np.argmax(vmin)
print(f"argmax V_min = {lams[imax]:.3f}  (V={vmin[imax]:.6f})")

jumps = []
for i in range(1, n):
    d = np.abs(masses[i] - masses[i - 1]).max()
    if d > 0.05:
        jumps.append((lams[i - 1], lams[i], d))
print("jump intervals (>0.05):", [(round(a, 3), round(b, 3), round(d, 3)) for a, b, d in jumps])

# bisect the first two jumps with cold restarts
def cold(lam):
    starts = [np.zeros(NFREE * (NJ + 1)), basis_start()] + \
             [rng.uniform(-1, 1, NFREE * (NJ + 1)) for _ in range(8)]
    return minimize_at(lam, starts)

refined = []
for (a, b, _) in jumps[:2]:
    ra, rb = cold(a), cold(b)
    ma, mb = spectrum(a, ra.x), spectrum(b, rb.x)
    while b - a > 1e-3:
        mid = (a + b) / 2
        rm = cold(mid)
        mm = spectrum(mid, rm.x)
        if np.abs(mm - ma).max() > 0.05:
            b, mb = mid, mm
        else:
            a, ma = mid, mm
    refined.append((a + b) / 2)
print("refined discontinuities:", [round(x, 4) for x in refined])
print("targets: 0.563, 2.376")
