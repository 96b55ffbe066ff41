"""Pure-numpy implementation of the circuit kernels.

Same contract as the compiled ``_kernels`` extension; used when the
extension is not built.
"""
import numpy as np


def _u3(th, ph, lm):
    c, s = np.cos(0.5 * th), np.sin(0.5 * th)
    el, ep = np.exp(1j * lm), np.exp(1j * ph)
    return np.array([[c, -el * s], [ep * s, ep * el * c]])


def _u3_derivs(th, ph, lm):
    c, s = np.cos(0.5 * th), np.sin(0.5 * th)
    el, ep = np.exp(1j * lm), np.exp(1j * ph)
    epl = ep * el
    return (
        np.array([[-0.5 * s, -0.5 * el * c], [0.5 * ep * c, -0.5 * epl * s]]),
        np.array([[0, 0], [1j * ep * s, 1j * epl * c]]),
        np.array([[0, -1j * el * s], [0, 1j * epl * c]]),
    )


def _left(m, g, q, n):
    dim = m.shape[1]
    t = m.reshape(1 << q, 2, 1 << (n - 1 - q), dim)
    return np.einsum("ab,ibjc->iajc", g, t).reshape(m.shape)


def _right(m, g, q, n):
    dim = m.shape[0]
    t = m.reshape(dim, 1 << q, 2, 1 << (n - 1 - q))
    return np.einsum("ribj,ba->riaj", t, g).reshape(m.shape)


def _cx_perm(n, c, t):
    idx = np.arange(1 << n)
    cm, tm = 1 << (n - 1 - c), 1 << (n - 1 - t)
    return np.where(idx & cm, idx ^ tm, idx)


def unitary(n, ops, params):
    u = np.eye(1 << n, dtype=np.complex128)
    for kind, q0, q1, off in ops:
        if kind == 0:
            u = _left(u, _u3(*params[off:off + 3]), q0, n)
        else:
            u = u[_cx_perm(n, q0, q1)]
    return u


def cost_grad(n, ops, params, target):
    dim = 1 << n
    u = unitary(n, ops, params)
    t = np.vdot(target, u)
    at = abs(t)
    ph = t / at if at > 0 else 1.0
    r = u - ph * target
    cost = float(np.vdot(r, r).real) / (2.0 * dim)
    grad = np.zeros(len(params))
    x = u @ target.conj().T
    for kind, q0, q1, off in ops[::-1]:
        if kind == 0:
            g = _u3(*params[off:off + 3])
            x = _left(x, g.conj().T, q0, n)
            if at > 0:
                env = x.reshape(1 << q0, 2, 1 << (n - 1 - q0), 1 << q0, 2, 1 << (n - 1 - q0))
                env = np.einsum("ibjiaj->ba", env)
                for a, dg in enumerate(_u3_derivs(*params[off:off + 3])):
                    dt = np.sum(dg * env.T)
                    grad[off + a] = -(np.conj(t) * dt).real / (at * dim)
            x = _right(x, g, q0, n)
        else:
            p = _cx_perm(n, q0, q1)
            x = x[p][:, p]
    return cost, grad

