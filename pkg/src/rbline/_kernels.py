"""Numba kernels for the exact solver and the exhaustive oracle.

Both kernels work on an integer-encoded search space so the whole solve
runs inside nopython code.  A solver state (next arrival index, stored
count per site, server site) is packed into one int64:

    code = (i * n_sites + server) * (cap+1)**n_sites  +  mixed-radix counts

The caller guarantees the packing fits (see ``fits_kernel`` in optsolve).
The kernels mirror the pure-Python engines in optsolve.py action for
action; tests compare the two backends directly.
"""

from __future__ import annotations

import numpy as np
from numba import njit, types
from numba.typed import Dict

INF = np.int64(1) << 62


@njit(cache=True)
def dp_kernel(sites, n_sites, cap, start, max_states):
    """Exact cost-to-go for every reachable canonical state.

    Returns (status, memo, start_code); status 1 means max_states was hit
    and the memo is partial.
    """
    n = sites.shape[0]
    radix = np.int64(cap + 1)
    pows = np.empty(n_sites, np.int64)
    acc = np.int64(1)
    for s in range(n_sites):
        pows[s] = acc
        acc *= radix
    big_r = acc

    i0 = np.int64(0)
    while i0 < n and sites[i0] == start:
        i0 += 1
    start_code = (i0 * n_sites + start) * big_r

    memo = Dict.empty(types.int64, types.int64)
    stack = np.empty(4096, np.int64)
    stack[0] = start_code * 2
    sp = 1

    counts = np.empty(n_sites, np.int64)
    succ_codes = np.empty(n_sites + 1, np.int64)
    succ_costs = np.empty(n_sites + 1, np.int64)

    status = 0
    while sp > 0:
        sp -= 1
        item = stack[sp]
        code = item >> 1
        phase = item & 1
        if phase == 0 and code in memo:
            continue

        pcode = code % big_r
        rest = code // big_r
        server = rest % n_sites
        i = rest // n_sites
        total = np.int64(0)
        tmp = pcode
        for s in range(n_sites):
            c = tmp % radix
            counts[s] = c
            total += c
            tmp //= radix
        if i == n and total == 0:
            memo[code] = 0
            continue

        nsucc = 0
        if i < n:
            if total < cap:
                # store the next arrival, then pass through anything that
                # now arrives at the unchanged server site
                si = sites[i]
                i2 = i + 1
                while i2 < n and sites[i2] == server:
                    i2 += 1
                succ_codes[nsucc] = (i2 * n_sites + server) * big_r + (pcode + pows[si])
                succ_costs[nsucc] = 0
                nsucc += 1
            else:
                # buffer full: the next arrival can only be served on
                # arrival, which also clears anything stored at its site
                ns = sites[i]
                i2 = i + 1
                while i2 < n and sites[i2] == ns:
                    i2 += 1
                succ_codes[nsucc] = (i2 * n_sites + ns) * big_r + (pcode - counts[ns] * pows[ns])
                d = ns - server
                succ_costs[nsucc] = d if d >= 0 else -d
                nsucc += 1
        for s in range(n_sites):
            if counts[s] > 0:
                i2 = i
                while i2 < n and sites[i2] == s:
                    i2 += 1
                succ_codes[nsucc] = (i2 * n_sites + s) * big_r + (pcode - counts[s] * pows[s])
                d = s - server
                succ_costs[nsucc] = d if d >= 0 else -d
                nsucc += 1

        if phase == 0:
            if sp + nsucc + 1 > stack.shape[0]:
                newstack = np.empty(stack.shape[0] * 2 + nsucc + 1, np.int64)
                newstack[:sp] = stack[:sp]
                stack = newstack
            stack[sp] = code * 2 + 1
            sp += 1
            for t in range(nsucc):
                if succ_codes[t] not in memo:
                    stack[sp] = succ_codes[t] * 2
                    sp += 1
        else:
            best = INF
            for t in range(nsucc):
                v = succ_costs[t] + memo[succ_codes[t]]
                if v < best:
                    best = v
            memo[code] = best
            if len(memo) > max_states:
                status = 1
                break

    return status, memo, start_code


@njit(cache=True)
def oracle_kernel(sites, cap, start):
    """Minimum cost by plain enumeration of every legal action sequence.

    No pruning beyond the capacity rule itself; requests are served one at
    a time.  Only usable for small inputs (the caller guards the size).
    """
    n = sites.shape[0]
    best = INF
    stack = np.empty((4096, 4), np.int64)
    stack[0, 0] = 0
    stack[0, 1] = 0
    stack[0, 2] = start
    stack[0, 3] = 0
    sp = 1
    while sp > 0:
        sp -= 1
        i = stack[sp, 0]
        mask = stack[sp, 1]
        server = stack[sp, 2]
        g = stack[sp, 3]
        if i == n and mask == 0:
            if g < best:
                best = g
            continue
        pc = 0
        m = mask
        while m != 0:
            m &= m - 1
            pc += 1
        if sp + pc + 2 > stack.shape[0]:
            newstack = np.empty((stack.shape[0] * 2 + pc + 2, 4), np.int64)
            newstack[:sp] = stack[:sp]
            stack = newstack
        if i < n:
            if pc < cap:
                stack[sp, 0] = i + 1
                stack[sp, 1] = mask | (np.int64(1) << i)
                stack[sp, 2] = server
                stack[sp, 3] = g
                sp += 1
            else:
                d = sites[i] - server
                if d < 0:
                    d = -d
                stack[sp, 0] = i + 1
                stack[sp, 1] = mask
                stack[sp, 2] = sites[i]
                stack[sp, 3] = g + d
                sp += 1
        m = mask
        while m != 0:
            b = m & (-m)
            j = 0
            bb = b
            while bb > 1:
                bb >>= np.int64(1)
                j += 1
            m ^= b
            d = sites[j] - server
            if d < 0:
                d = -d
            stack[sp, 0] = i
            stack[sp, 1] = mask ^ b
            stack[sp, 2] = sites[j]
            stack[sp, 3] = g + d
            sp += 1
    return best
