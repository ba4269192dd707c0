"""Hot loops: explicit adaptive Runge-Kutta for a constant linear generator.

``dopri_integrate`` is the dispatching entry point. ``dopri_integrate_py``
and ``dopri_integrate_jit`` expose both paths for benchmarking and for the
equivalence test.
"""

import numpy as np

from ._jit import USE_NUMBA, njit

# Dormand-Prince 5(4) tableau
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0,
                                49.0 / 176.0, -5103.0 / 18656.0)
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
_E1, _E3, _E4, _E5, _E6, _E7 = (71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0,
                                -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)

_SAFETY = 0.9
_FAC_MIN = 0.2
_FAC_MAX = 5.0

STATUS_OK = 0
STATUS_UNDERFLOW = 1
STATUS_MAX_STEPS = 2


def _dopri_integrate(G, x0, t_final, dt_max, tol, h_min, max_steps, save_every):
    """Integrate x' = G x from 0 to t_final.

    Error control is the max-norm of the embedded 4th-order difference,
    compared against ``tol`` in absolute terms. Returns
    ``(times, states, status, n_accepted, n_rejected)``.
    """
    n = x0.shape[0]
    cap = 256
    times = np.empty(cap)
    states = np.empty((cap, n))
    times[0] = 0.0
    states[0, :] = x0
    count = 1

    x = x0.copy()
    t = 0.0
    gnorm = 0.0
    for i in range(n):
        row = 0.0
        for j in range(n):
            row += abs(G[i, j])
        gnorm = max(gnorm, row)
    h = min(dt_max, t_final)
    if gnorm > 0.0:
        h = min(h, 1.0 / gnorm)

    k1 = np.dot(G, x)
    n_acc = 0
    n_rej = 0
    status = STATUS_OK
    while t < t_final:
        if n_acc + n_rej >= max_steps:
            status = STATUS_MAX_STEPS
            break
        last = False
        if t + h >= t_final:
            h = t_final - t
            last = True
        elif h < h_min:
            status = STATUS_UNDERFLOW
            break

        k2 = np.dot(G, x + h * (_A21 * k1))
        k3 = np.dot(G, x + h * (_A31 * k1 + _A32 * k2))
        k4 = np.dot(G, x + h * (_A41 * k1 + _A42 * k2 + _A43 * k3))
        k5 = np.dot(G, x + h * (_A51 * k1 + _A52 * k2 + _A53 * k3 + _A54 * k4))
        k6 = np.dot(G, x + h * (_A61 * k1 + _A62 * k2 + _A63 * k3 + _A64 * k4 + _A65 * k5))
        x_new = x + h * (_B1 * k1 + _B3 * k3 + _B4 * k4 + _B5 * k5 + _B6 * k6)
        k7 = np.dot(G, x_new)
        err_vec = h * (_E1 * k1 + _E3 * k3 + _E4 * k4 + _E5 * k5 + _E6 * k6 + _E7 * k7)
        err = np.max(np.abs(err_vec)) / tol

        if err <= 1.0:
            t = t_final if last else t + h
            x = x_new
            k1 = k7
            n_acc += 1
            if last or n_acc % save_every == 0:
                if count == cap:
                    cap *= 2
                    new_times = np.empty(cap)
                    new_states = np.empty((cap, n))
                    new_times[:count] = times[:count]
                    new_states[:count, :] = states[:count, :]
                    times = new_times
                    states = new_states
                times[count] = t
                states[count, :] = x
                count += 1
            fac = _FAC_MAX if err == 0.0 else min(_FAC_MAX, max(_FAC_MIN, _SAFETY * err ** -0.2))
            h = min(h * fac, dt_max)
        else:
            n_rej += 1
            h *= max(_FAC_MIN, _SAFETY * err ** -0.2)

    return times[:count].copy(), states[:count, :].copy(), status, n_acc, n_rej


dopri_integrate_py = _dopri_integrate
dopri_integrate_jit = njit(_dopri_integrate)
dopri_integrate = dopri_integrate_jit if USE_NUMBA else dopri_integrate_py
