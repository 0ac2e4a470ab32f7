"""Compiled inner loops.

Every reduction runs sequentially in a fixed order so that results are
bit-identical regardless of how entries are chunked across threads. The
ATM kernel mirrors the BP kernel's arithmetic exactly; keep them in step.
"""

import math

import numpy as np
from numba import njit

_JIT = dict(nogil=True, cache=True)

# Bernoulli-number coefficients B_2n / (2n) for the asymptotic digamma series
_DIGAMMA_COEF = np.array([
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
])
_DIGAMMA_SHIFT = 10.0


@njit(**_JIT)
def digamma(x):
    result = 0.0
    while x < _DIGAMMA_SHIFT:
        result -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    series = 0.0
    for i in range(_DIGAMMA_COEF.size - 1, -1, -1):
        series = series * inv2 + _DIGAMMA_COEF[i]
    return result + math.log(x) - 0.5 / x - series * inv2


@njit(**_JIT)
def normalize_rows(v):
    n, K = v.shape
    bad = 0
    for i in range(n):
        total = 0.0
        for k in range(K):
            total += v[i, k]
        if total > 0.0 and math.isfinite(total):
            for k in range(K):
                v[i, k] = v[i, k] / total
        else:
            bad += 1
            for k in range(K):
                v[i, k] = 1.0 / K
    return bad


@njit(**_JIT)
def normalize_groups(v, ptr):
    """Normalize each block of rows ``ptr[n]:ptr[n+1]`` to total mass 1."""
    K = v.shape[1]
    bad = 0
    for n in range(ptr.size - 1):
        lo = ptr[n]
        hi = ptr[n + 1]
        total = 0.0
        for s in range(lo, hi):
            for k in range(K):
                total += v[s, k]
        if total > 0.0 and math.isfinite(total):
            for s in range(lo, hi):
                for k in range(K):
                    v[s, k] = v[s, k] / total
        else:
            bad += 1
            u = 1.0 / ((hi - lo) * K)
            for s in range(lo, hi):
                for k in range(K):
                    v[s, k] = u
    return bad


@njit(**_JIT)
def accumulate(index, counts, mu, size):
    """``out[index[n]] += counts[n] * mu[n]`` in entry order."""
    K = mu.shape[1]
    out = np.zeros((size, K))
    for n in range(index.size):
        x = float(counts[n])
        r = index[n]
        for k in range(K):
            out[r, k] += x * mu[n, k]
    return out


@njit(**_JIT)
def column_sums(a):
    out = np.zeros(a.shape[1])
    for i in range(a.shape[0]):
        for k in range(a.shape[1]):
            out[k] += a[i, k]
    return out


@njit(**_JIT)
def group_sums(v, ptr):
    """Sum rows within each block ``ptr[n]:ptr[n+1]``."""
    K = v.shape[1]
    out = np.zeros((ptr.size - 1, K))
    for n in range(ptr.size - 1):
        for s in range(ptr[n], ptr[n + 1]):
            for k in range(K):
                out[n, k] += v[s, k]
    return out


@njit(**_JIT)
def bp_sync(doc, word, cnt, mu, theta_hat, phi_hat, tau, alpha, beta, wbeta,
            out, lo, hi):
    K = mu.shape[1]
    buf = np.empty(K)
    bad = 0
    for n in range(lo, hi):
        d = doc[n]
        w = word[n]
        x = float(cnt[n])
        doc_norm = 0.0
        for k in range(K):
            doc_norm += theta_hat[d, k] - x * mu[n, k] + alpha
        total = 0.0
        for k in range(K):
            sd = theta_hat[d, k] - x * mu[n, k]
            sw = phi_hat[w, k] - x * mu[n, k]
            v = (sd + alpha) / doc_norm * (sw + beta) / (tau[k] - theta_hat[d, k] + wbeta)
            buf[k] = v
            total += v
        if total > 0.0 and math.isfinite(total):
            for k in range(K):
                out[n, k] = buf[k] / total
        else:
            bad += 1
            for k in range(K):
                out[n, k] = 1.0 / K
    return bad


@njit(**_JIT)
def bp_async(doc, word, cnt, mu, theta_hat, phi_hat, tau, alpha, beta, wbeta):
    """Gauss-Seidel sweep: messages and aggregates updated in place."""
    K = mu.shape[1]
    buf = np.empty(K)
    bad = 0
    for n in range(doc.size):
        d = doc[n]
        w = word[n]
        x = float(cnt[n])
        doc_norm = 0.0
        for k in range(K):
            doc_norm += theta_hat[d, k] - x * mu[n, k] + alpha
        total = 0.0
        for k in range(K):
            sd = theta_hat[d, k] - x * mu[n, k]
            sw = phi_hat[w, k] - x * mu[n, k]
            v = (sd + alpha) / doc_norm * (sw + beta) / (tau[k] - theta_hat[d, k] + wbeta)
            buf[k] = v
            total += v
        if total > 0.0 and math.isfinite(total):
            for k in range(K):
                buf[k] = buf[k] / total
        else:
            bad += 1
            for k in range(K):
                buf[k] = 1.0 / K
        for k in range(K):
            delta = x * (buf[k] - mu[n, k])
            theta_hat[d, k] += delta
            phi_hat[w, k] += delta
            tau[k] += delta
            mu[n, k] = buf[k]
    return bad


@njit(**_JIT)
def vb_sync(doc, word, cnt, theta_hat, phi_hat, tau, alpha, beta, wbeta,
            out, lo, hi):
    K = theta_hat.shape[1]
    logv = np.empty(K)
    bad = 0
    for n in range(lo, hi):
        d = doc[n]
        w = word[n]
        doc_total = 0.0
        for k in range(K):
            doc_total += theta_hat[d, k] + alpha
        psi_total = digamma(doc_total)
        top = -np.inf
        for k in range(K):
            lv = (digamma(theta_hat[d, k] + alpha) - psi_total
                  + math.log(phi_hat[w, k] + beta) - math.log(tau[k] + wbeta))
            logv[k] = lv
            if lv > top:
                top = lv
        total = 0.0
        for k in range(K):
            logv[k] = math.exp(logv[k] - top)
            total += logv[k]
        if total > 0.0 and math.isfinite(total):
            for k in range(K):
                out[n, k] = logv[k] / total
        else:
            bad += 1
            for k in range(K):
                out[n, k] = 1.0 / K
    return bad


@njit(**_JIT)
def gs_sweep(tok_doc, tok_word, z, nd, nw, nk, u, alpha, beta, wbeta):
    K = nk.size
    cum = np.empty(K)
    for i in range(z.size):
        d = tok_doc[i]
        w = tok_word[i]
        old = z[i]
        nd[d, old] -= 1
        nw[w, old] -= 1
        nk[old] -= 1
        total = 0.0
        for k in range(K):
            total += (nd[d, k] + alpha) * (nw[w, k] + beta) / (nk[k] + wbeta)
            cum[k] = total
        target = u[i] * total
        new = K - 1
        for k in range(K):
            if target < cum[k]:
                new = k
                break
        z[i] = new
        nd[d, new] += 1
        nw[w, new] += 1
        nk[new] += 1


@njit(**_JIT)
def apply_masks(mu, doc, mask, has_mask):
    """Zero topics outside each masked document's label set and renormalize."""
    bad = 0
    for n in range(doc.size):
        d = doc[n]
        if not has_mask[d]:
            continue
        bad += mask_one(mu[n], mask[d])
    return bad


@njit(**_JIT)
def mask_one(v, allowed):
    K = v.size
    total = 0.0
    size = 0
    for k in range(K):
        if allowed[k]:
            total += v[k]
            size += 1
    if total > 0.0 and math.isfinite(total):
        for k in range(K):
            v[k] = v[k] / total if allowed[k] else 0.0
        return 0
    for k in range(K):
        v[k] = 1.0 / size if allowed[k] else 0.0
    return 1


@njit(**_JIT)
def atm_sync(doc, word, cnt, slot_ptr, slot_author, mu, author_hat, doc_topic,
             phi_hat, tau, alpha, beta, wbeta, out, lo, hi):
    K = mu.shape[1]
    marg = np.empty(K)
    bad = 0
    for n in range(lo, hi):
        d = doc[n]
        w = word[n]
        x = float(cnt[n])
        s0 = slot_ptr[n]
        s1 = slot_ptr[n + 1]
        for k in range(K):
            m = 0.0
            for s in range(s0, s1):
                m += mu[s, k]
            marg[k] = m
        total = 0.0
        for s in range(s0, s1):
            a = slot_author[s]
            author_norm = 0.0
            for k in range(K):
                author_norm += author_hat[a, k] - x * mu[s, k] + alpha
            for k in range(K):
                sa = author_hat[a, k] - x * mu[s, k]
                sw = phi_hat[w, k] - x * marg[k]
                v = (sa + alpha) / author_norm * (sw + beta) / (tau[k] - doc_topic[d, k] + wbeta)
                out[s, k] = v
                total += v
        if total > 0.0 and math.isfinite(total):
            for s in range(s0, s1):
                for k in range(K):
                    out[s, k] = out[s, k] / total
        else:
            bad += 1
            u = 1.0 / ((s1 - s0) * K)
            for s in range(s0, s1):
                for k in range(K):
                    out[s, k] = u
    return bad
