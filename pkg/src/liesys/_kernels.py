"""Hot numeric kernels in two flavours.

``*_loop`` functions are plain scalar loops written for ``numba.njit``;
``*_numpy`` functions are vectorised equivalents used when numba is missing
or disabled.  :mod:`liesys.accel` picks one of each pair at import time.
Both flavours must agree to rounding; ``tests/test_kernels.py`` checks that.
"""

from __future__ import annotations

import math

import numpy as np

# Expression bytecode.  Opcode values are shared with liesys.expr.
OP_CONST = 0
OP_VAR = 1
OP_NEG = 2
OP_ADD = 3
OP_SUB = 4
OP_MUL = 5
OP_DIV = 6
OP_POW = 7
OP_SIN = 10
OP_COS = 11
OP_TAN = 12
OP_EXP = 13
OP_LOG = 14
OP_SQRT = 15
OP_ABS = 16

ERR_OK = 0
ERR_DIV = 1
ERR_LOG = 2
ERR_SQRT = 3
ERR_POW = 4
ERR_NONFINITE = 5

ERROR_MESSAGES = {
    ERR_DIV: "division by zero",
    ERR_LOG: "log of a non-positive number",
    ERR_SQRT: "sqrt of a negative number",
    ERR_POW: "power outside the real domain",
    ERR_NONFINITE: "non-finite intermediate result",
}


# ---------------------------------------------------------------- loop flavour

def run_program_loop(ops, args, consts, ts, stack_size):
    """Evaluate postfix bytecode at every ``ts[j]``.

    Returns ``(values, err_code, err_index)``; on error ``err_index`` is the
    position in ``ts`` of the first failing sample and ``values`` is partial.
    """
    n = ts.shape[0]
    out = np.empty(n)
    stack = np.empty(stack_size)
    for j in range(n):
        t = ts[j]
        sp = 0
        for i in range(ops.shape[0]):
            op = ops[i]
            if op == OP_CONST:
                stack[sp] = consts[args[i]]
                sp += 1
                continue
            if op == OP_VAR:
                stack[sp] = t
                sp += 1
                continue
            if op >= OP_ADD and op <= OP_POW:
                b = stack[sp - 1]
                a = stack[sp - 2]
                sp -= 2
                if op == OP_ADD:
                    r = a + b
                elif op == OP_SUB:
                    r = a - b
                elif op == OP_MUL:
                    r = a * b
                elif op == OP_DIV:
                    if b == 0.0:
                        return out, ERR_DIV, j
                    r = a / b
                else:
                    if a < 0.0 and b != math.floor(b):
                        return out, ERR_POW, j
                    if a == 0.0 and b < 0.0:
                        return out, ERR_POW, j
                    r = a ** b
            else:
                a = stack[sp - 1]
                if op == OP_NEG:
                    r = -a
                elif op == OP_SIN:
                    r = math.sin(a)
                elif op == OP_COS:
                    r = math.cos(a)
                elif op == OP_TAN:
                    r = math.tan(a)
                elif op == OP_EXP:
                    r = math.exp(a)
                elif op == OP_LOG:
                    if a <= 0.0:
                        return out, ERR_LOG, j
                    r = math.log(a)
                elif op == OP_SQRT:
                    if a < 0.0:
                        return out, ERR_SQRT, j
                    r = math.sqrt(a)
                else:
                    r = abs(a)
                sp -= 1
            if not math.isfinite(r):
                return out, ERR_NONFINITE, j
            stack[sp] = r
            sp += 1
        out[j] = stack[0]
    return out, ERR_OK, -1


def dense_eval_loop(starts, hs, coeffs, ts):
    m = starts.shape[0]
    n = coeffs.shape[2]
    out = np.empty((ts.shape[0], n))
    for j in range(ts.shape[0]):
        t = ts[j]
        i = np.searchsorted(starts, t, side="right") - 1
        if i < 0:
            i = 0
        elif i > m - 1:
            i = m - 1
        th = (t - starts[i]) / hs[i]
        th1 = 1.0 - th
        for k in range(n):
            c = coeffs[i]
            out[j, k] = c[0, k] + th * (c[1, k] + th1 * (c[2, k] + th * (c[3, k] + th1 * c[4, k])))
    return out


def mobius_loop(mats, p, q):
    n = p.shape[0]
    po = np.empty(n)
    qo = np.empty(n)
    for i in range(n):
        a = mats[i, 0, 0] * p[i] + mats[i, 0, 1] * q[i]
        b = mats[i, 1, 0] * p[i] + mats[i, 1, 1] * q[i]
        r = math.hypot(a, b)
        po[i] = a / r
        qo[i] = b / r
    return po, qo


def expm_sl2_loop(b0, b1, b2, s):
    n = b0.shape[0]
    out = np.empty((n, 2, 2))
    for i in range(n):
        m11 = 0.5 * b1[i]
        m12 = b0[i]
        m21 = 0.0 - b2[i]
        mu2 = m11 * m11 + m12 * m21
        si = s[i]
        if mu2 > 1e-14:
            mu = math.sqrt(mu2)
            c = math.cosh(mu * si)
            f = math.sinh(mu * si) / mu
        elif mu2 < -1e-14:
            mu = math.sqrt(-mu2)
            c = math.cos(mu * si)
            f = math.sin(mu * si) / mu
        else:
            c = 1.0 + 0.5 * si * si * mu2
            f = si
        a = c + f * m11
        d = c - f * m11
        b = f * m12
        g = f * m21
        det = a * d - b * g
        r = 1.0 / math.sqrt(det)
        out[i, 0, 0] = a * r
        out[i, 0, 1] = b * r
        out[i, 1, 0] = g * r
        out[i, 1, 1] = d * r
    return out


def cross_ratio_loop(p1, q1, p2, q2, p3, q3, k):
    n = p1.shape[0]
    po = np.empty(n)
    qo = np.empty(n)
    for i in range(n):
        d32 = p3[i] * q2[i] - p2[i] * q3[i]
        d13 = p1[i] * q3[i] - p3[i] * q1[i]
        a = k * p1[i] * d32 + p2[i] * d13
        b = k * q1[i] * d32 + q2[i] * d13
        r = math.hypot(a, b)
        if r == 0.0:
            po[i] = 0.0
            qo[i] = 0.0
        else:
            po[i] = a / r
            qo[i] = b / r
    return po, qo


# --------------------------------------------------------------- numpy flavour

def run_program_numpy(ops, args, consts, ts, stack_size):
    ts = np.asarray(ts, dtype=float)
    stack: list[np.ndarray] = []
    n = ts.shape[0]
    # first error code per sample, so the reported failure matches the loop kernel
    err = np.zeros(n, dtype=np.int64)

    def flag(code, bad):
        err[bad & (err == 0)] = code

    with np.errstate(all="ignore"):
        for op, arg in zip(ops, args):
            if op == OP_CONST:
                stack.append(np.full(n, consts[arg]))
                continue
            if op == OP_VAR:
                stack.append(ts.copy())
                continue
            if OP_ADD <= op <= OP_POW:
                b = stack.pop()
                a = stack.pop()
                if op == OP_ADD:
                    r = a + b
                elif op == OP_SUB:
                    r = a - b
                elif op == OP_MUL:
                    r = a * b
                elif op == OP_DIV:
                    flag(ERR_DIV, b == 0.0)
                    r = a / b
                else:
                    flag(ERR_POW, ((a < 0.0) & (b != np.floor(b))) | ((a == 0.0) & (b < 0.0)))
                    r = np.power(a, b)
            else:
                a = stack.pop()
                if op == OP_NEG:
                    r = -a
                elif op == OP_SIN:
                    r = np.sin(a)
                elif op == OP_COS:
                    r = np.cos(a)
                elif op == OP_TAN:
                    r = np.tan(a)
                elif op == OP_EXP:
                    r = np.exp(a)
                elif op == OP_LOG:
                    flag(ERR_LOG, a <= 0.0)
                    r = np.log(a)
                elif op == OP_SQRT:
                    flag(ERR_SQRT, a < 0.0)
                    r = np.sqrt(a)
                else:
                    r = np.abs(a)
            flag(ERR_NONFINITE, ~np.isfinite(r))
            stack.append(r)
    bad = np.flatnonzero(err)
    if bad.size:
        return stack[0], int(err[bad[0]]), int(bad[0])
    return stack[0], ERR_OK, -1


def dense_eval_numpy(starts, hs, coeffs, ts):
    idx = np.clip(np.searchsorted(starts, ts, side="right") - 1, 0, starts.shape[0] - 1)
    th = ((ts - starts[idx]) / hs[idx])[:, None]
    th1 = 1.0 - th
    c = coeffs[idx]
    return c[:, 0] + th * (c[:, 1] + th1 * (c[:, 2] + th * (c[:, 3] + th1 * c[:, 4])))


def mobius_numpy(mats, p, q):
    a = mats[:, 0, 0] * p + mats[:, 0, 1] * q
    b = mats[:, 1, 0] * p + mats[:, 1, 1] * q
    r = np.hypot(a, b)
    return a / r, b / r


def expm_sl2_numpy(b0, b1, b2, s):
    m11 = 0.5 * b1
    m12 = b0
    m21 = 0.0 - b2
    mu2 = m11 * m11 + m12 * m21
    mu = np.sqrt(np.abs(mu2))
    hyp = mu2 > 1e-14
    trig = mu2 < -1e-14
    safe = np.where(hyp | trig, mu, 1.0)
    with np.errstate(all="ignore"):
        c = np.where(hyp, np.cosh(mu * s), np.where(trig, np.cos(mu * s), 1.0 + 0.5 * s * s * mu2))
        f = np.where(hyp, np.sinh(mu * s) / safe, np.where(trig, np.sin(mu * s) / safe, s))
    a = c + f * m11
    d = c - f * m11
    b = f * m12
    g = f * m21
    r = 1.0 / np.sqrt(a * d - b * g)
    out = np.empty((b0.shape[0], 2, 2))
    out[:, 0, 0] = a * r
    out[:, 0, 1] = b * r
    out[:, 1, 0] = g * r
    out[:, 1, 1] = d * r
    return out


def cross_ratio_numpy(p1, q1, p2, q2, p3, q3, k):
    d32 = p3 * q2 - p2 * q3
    d13 = p1 * q3 - p3 * q1
    a = k * p1 * d32 + p2 * d13
    b = k * q1 * d32 + q2 * d13
    r = np.hypot(a, b)
    safe = np.where(r == 0.0, 1.0, r)
    return np.where(r == 0.0, 0.0, a / safe), np.where(r == 0.0, 0.0, b / safe)
