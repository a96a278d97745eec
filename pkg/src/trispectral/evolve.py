"""Classical RK4 for the semidiscrete advection system a' = X a."""

import numpy as np


def rk4_step(apply, a, dt):
    k1 = apply(a)
    k2 = apply(a + 0.5 * dt * k1)
    k3 = apply(a + 0.5 * dt * k2)
    k4 = apply(a + dt * k3)
    return a + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def evolve(apply, a0, dt, tfinal, every=1):
    """Integrate to ``tfinal``; returns the sampled times, norms and final state.

    The step count is round(tfinal / dt), so dt should divide tfinal.
    """
    if not dt > 0:
        raise ValueError("time step must be positive")
    nsteps = int(round(tfinal / dt))
    a = np.array(a0, dtype=float)
    times, norms = [0.0], [float(np.linalg.norm(a))]
    for i in range(1, nsteps + 1):
        a = rk4_step(apply, a, dt)
        if i % every == 0 or i == nsteps:
            times.append(i * dt)
            norms.append(float(np.linalg.norm(a)))
    return np.array(times), np.array(norms), a


def norm_drift(norms):
    """Relative change of the norm between the first and last sample."""
    return abs(norms[-1] - norms[0]) / norms[0]
