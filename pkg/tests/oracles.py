"""Reference computations written independently of the package internals."""

from math import factorial

import numpy as np
from scipy.linalg import expm


def ladder(dim):
    a = np.zeros((dim, dim), dtype=complex)
    for n in range(1, dim):
        a[n - 1, n] = np.sqrt(n)
    return a


def anharmonic_h(m, lam, dim):
    a = ladder(dim)
    x = a + a.conj().T
    return np.diag(np.arange(dim) + 0.5) + lam / (m * 2 ** (m / 2)) * np.linalg.matrix_power(x, m)


def heisenberg(H, O, t):
    U = expm(-1j * H * t)
    return U.conj().T @ O @ U


def coherent(alpha, theta, dim):
    z = alpha * np.exp(1j * theta)
    c = np.array([z**k / np.sqrt(float(factorial(k))) for k in range(dim)], dtype=complex)
    return c / np.linalg.norm(c)


def evolved_variance(m, lam, alpha, theta, t, O, dim):
    psi = expm(-1j * anharmonic_h(m, lam, dim) * t) @ coherent(alpha, theta, dim)
    v = O @ psi
    return float(np.vdot(v, v).real - np.vdot(psi, v).real ** 2)


def sympy_normal_order(m):
    """{(p, q): c} for (a^dag + a)^m using sympy's boson algebra."""
    from sympy import Mul, Pow, expand
    from sympy.physics.quantum import Dagger
    from sympy.physics.quantum.boson import BosonOp
    from sympy.physics.quantum.operatorordering import normal_ordered_form

    b = BosonOp("b")
    expr = normal_ordered_form(expand((Dagger(b) + b) ** m), independent=True)
    out = {}
    for term in expand(expr).as_ordered_terms():
        coeff, p, q = 1, 0, 0
        for f in Mul.make_args(term):
            base, exp = (f.base, int(f.exp)) if isinstance(f, Pow) else (f, 1)
            if base == Dagger(b):
                p += exp
            elif base == b:
                q += exp
            else:
                coeff *= f
        out[(p, q)] = out.get((p, q), 0) + int(coeff)
    return {k: v for k, v in out.items() if v}


def rk4(f, y0, dt, n):
    ys = np.empty((n + 1, len(y0)))
    y = np.asarray(y0, dtype=float)
    ys[0] = y
    for i in range(n):
        k1 = f(y)
        k2 = f(y + dt / 2 * k1)
        k3 = f(y + dt / 2 * k2)
        k4 = f(y + dt * k3)
        y = y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        ys[i + 1] = y
    return ys
