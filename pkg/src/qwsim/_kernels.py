"""Numba-compiled inner loops: equations of motion and time steppers.

State layout (16 reals): populations rho11..rho44, then re/im pairs of the
six upper-triangle coherences rho12, rho13, rho14, rho23, rho24, rho34.
The lower triangle is implied by Hermiticity and never stored.

Parameter vector layout is given by the P_* indices below; `model.pack_params`
is the only producer.
"""

import numpy as np
from numba import njit

# parameter vector indices
P_K = 0
P_Q = 1
P_W43 = 2
P_G31 = 3
P_G32 = 4
P_G41 = 5
P_G42 = 6
P_G2 = 7
P_ETA = 8
P_GAM12 = 9
P_GAM13 = 10
P_GAM14 = 11
P_GAM23 = 12
P_GAM24 = 13
P_GAM34 = 14
P_OP0 = 15
P_OS0 = 16
P_TAU = 17
P_TP = 18
P_TS = 19
P_DP = 20
P_DS = 21
NPARAMS = 22

NSTATE = 16

STATUS_OK = 0
STATUS_STEP_UNDERFLOW = 1

_H_MIN = 1e-12


@njit(cache=True)
def rhs_flat(t, y, p):
    """Time derivative of the 16-component state under the driven master equation."""
    k = p[P_K]
    q = p[P_Q]
    w43 = p[P_W43]
    g31 = p[P_G31]
    g32 = p[P_G32]
    g41 = p[P_G41]
    g42 = p[P_G42]
    g2 = p[P_G2]
    eta = p[P_ETA]
    gam12 = p[P_GAM12]
    gam13 = p[P_GAM13]
    gam14 = p[P_GAM14]
    gam23 = p[P_GAM23]
    gam24 = p[P_GAM24]
    gam34 = p[P_GAM34]
    dp = p[P_DP]
    ds = p[P_DS]
    g3 = g31 + g32
    g4 = g41 + g42

    r11 = y[0]
    r22 = y[1]
    r33 = y[2]
    r44 = y[3]
    r12 = complex(y[4], y[5])
    r13 = complex(y[6], y[7])
    r14 = complex(y[8], y[9])
    r23 = complex(y[10], y[11])
    r24 = complex(y[12], y[13])
    r34 = complex(y[14], y[15])

    op = p[P_OP0] * np.exp(-((t - p[P_TP]) / p[P_TAU]) ** 2)
    os_ = p[P_OS0] * np.exp(-((t - p[P_TS]) / p[P_TAU]) ** 2)

    d = np.empty(NSTATE)
    # populations; the i*X*(conj(r)-r) structures reduce to 2*X*Im(r)
    d[0] = (2.0 * k * op * r14.imag + 2.0 * op * r13.imag
            + g41 * r44 + g31 * r33 + g2 * r22 + eta * r34.real)
    d[1] = (2.0 * q * os_ * r24.imag + 2.0 * os_ * r23.imag
            + g42 * r44 + g32 * r33 - g2 * r22 + eta * r34.real)
    d[2] = (-2.0 * op * r13.imag - 2.0 * os_ * r23.imag
            - g3 * r33 - eta * r34.real)
    d[3] = (-2.0 * k * op * r14.imag - 2.0 * q * os_ * r24.imag
            - g4 * r44 - eta * r34.real)

    d12 = (-(1j * (dp - ds) + 0.5 * gam12) * r12
           + 1j * k * op * np.conj(r24) + 1j * op * np.conj(r23)
           - 1j * q * os_ * r14 - 1j * os_ * r13)
    d13 = (-(1j * dp + 0.5 * gam13) * r13
           + 1j * k * op * np.conj(r34) - 1j * os_ * r12
           + 1j * op * (r33 - r11) - 0.5 * eta * r14)
    d14 = (-(1j * (dp - w43) + 0.5 * gam14) * r14
           + 1j * op * r34 - 1j * q * os_ * r12
           + 1j * k * op * (r44 - r11) - 0.5 * eta * r13)
    d23 = (-(1j * ds + 0.5 * gam23) * r23
           - 1j * op * np.conj(r12) + 1j * q * os_ * np.conj(r34)
           + 1j * os_ * (r33 - r22) - 0.5 * eta * r24)
    d24 = (-(1j * (ds - w43) + 0.5 * gam24) * r24
           - 1j * k * op * np.conj(r12) + 1j * os_ * r34
           - 1j * q * os_ * (r22 - r44) - 0.5 * eta * r23)
    d34 = (-(-1j * w43 + 0.5 * gam34) * r34
           - 1j * k * op * np.conj(r13) + 1j * op * r14
           - 1j * q * os_ * np.conj(r23) + 1j * os_ * r24
           - 0.5 * eta * (r33 + r44))

    d[4] = d12.real
    d[5] = d12.imag
    d[6] = d13.real
    d[7] = d13.imag
    d[8] = d14.real
    d[9] = d14.imag
    d[10] = d23.real
    d[11] = d23.imag
    d[12] = d24.real
    d[13] = d24.imag
    d[14] = d34.real
    d[15] = d34.imag
    return d


@njit(cache=True)
def rk4_span(y, t0, t1, nsub, p):
    """Advance y from t0 to t1 with nsub classical RK4 steps. Returns (y, steps)."""
    h = (t1 - t0) / nsub
    for i in range(nsub):
        t = t0 + i * h
        k1 = rhs_flat(t, y, p)
        k2 = rhs_flat(t + 0.5 * h, y + 0.5 * h * k1, p)
        k3 = rhs_flat(t + 0.5 * h, y + 0.5 * h * k2, p)
        k4 = rhs_flat(t + h, y + h * k3, p)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return y, nsub


@njit(cache=True)
def dp45_span(y, t0, t1, h, atol, rtol, p):
    """Advance y from t0 to t1 with the Dormand-Prince 5(4) embedded pair.

    Controller: safety 0.9, growth clamp x5, shrink clamp x0.2. Returns
    (y, h_next, accepted_steps, status); status != STATUS_OK means the step
    size underflowed below the hard floor.
    """
    t = t0
    steps = 0
    while t < t1:
        if h > t1 - t:
            h = t1 - t
        k1 = rhs_flat(t, y, p)
        k2 = rhs_flat(t + h / 5.0, y + h * (k1 / 5.0), p)
        k3 = rhs_flat(t + 3.0 * h / 10.0,
                      y + h * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2), p)
        k4 = rhs_flat(t + 4.0 * h / 5.0,
                      y + h * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2
                               + 32.0 / 9.0 * k3), p)
        k5 = rhs_flat(t + 8.0 * h / 9.0,
                      y + h * (19372.0 / 6561.0 * k1 - 25360.0 / 2187.0 * k2
                               + 64448.0 / 6561.0 * k3 - 212.0 / 729.0 * k4), p)
        k6 = rhs_flat(t + h,
                      y + h * (9017.0 / 3168.0 * k1 - 355.0 / 33.0 * k2
                               + 46732.0 / 5247.0 * k3 + 49.0 / 176.0 * k4
                               - 5103.0 / 18656.0 * k5), p)
        y5 = y + h * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3
                      + 125.0 / 192.0 * k4 - 2187.0 / 6784.0 * k5
                      + 11.0 / 84.0 * k6)
        k7 = rhs_flat(t + h, y5, p)
        # difference between the 5th-order and embedded 4th-order solutions
        err = h * (71.0 / 57600.0 * k1 - 71.0 / 16695.0 * k3
                   + 71.0 / 1920.0 * k4 - 17253.0 / 339200.0 * k5
                   + 22.0 / 525.0 * k6 - 1.0 / 40.0 * k7)
        acc = 0.0
        for i in range(NSTATE):
            ymax = abs(y[i])
            if abs(y5[i]) > ymax:
                ymax = abs(y5[i])
            sc = atol + rtol * ymax
            acc += (err[i] / sc) ** 2
        norm = np.sqrt(acc / NSTATE)

        if norm <= 1.0:  # accept (norm is NaN-safe: NaN fails the comparison)
            t = t + h
            y = y5
            steps += 1
            if norm == 0.0:
                factor = 5.0
            else:
                factor = 0.9 * norm ** -0.2
                if factor > 5.0:
                    factor = 5.0
        else:
            factor = 0.9 * norm ** -0.2
            if not factor > 0.2:  # also catches NaN
                factor = 0.2
        h = h * factor
        if h < _H_MIN:
            return y, h, steps, STATUS_STEP_UNDERFLOW
    return y, h, steps, STATUS_OK
