"""Why the dynamic observer can run high feedback gains near contact.

A free-floating 2-link arm gets a smooth half-second command pulse and
nothing else: no walls, no gravity, no injected disturbance.  The correct
external-wrench estimate is exactly zero the whole time.

The conventional observer infers the disturbance from commanded wrench
minus measured wrench, so the arm's own inertial reaction shows up as a
phantom disturbance of tens of newtons, which the loop then "compensates",
kicking the arm around.  The dynamic observer subtracts the model's
inertial reaction (task inertia times filtered acceleration) before
comparing, leaving a residual three orders of magnitude smaller.

Runs in a couple of seconds; traces land in demo_out/free_space/.
"""
import os

import numpy as np

from zerowrench import (
    CommandPulse,
    CWDOBController,
    DWDOBController,
    SimConfig,
    World,
    standard_gains,
    two_link_unit,
)

OUT_DIR = os.path.join("demo_out", "free_space")


def main():
    model = two_link_unit()
    gains = standard_gains("A", model.task_dim)
    dt = 1e-3
    sim = SimConfig(control_dt=dt, physics_substeps=10, duration=1.0,
                    feedforward=(0.0, 0.0), initial_pose=(0.9, 0.9),
                    command_pulse=CommandPulse((2.0, 1.5), t_start=0.1,
                                               duration=0.3))
    os.makedirs(OUT_DIR, exist_ok=True)
    print("pulse of (2.0, 1.5) N over 0.3 s; true external wrench is zero\n")
    peaks = {}
    for tag, ctl in (("dynamic", DWDOBController(gains, model, dt)),
                     ("conventional", CWDOBController(gains, dt))):
        trace = World(model, ctl, sim, geom=None).run()
        mag = np.linalg.norm(trace.d_hat, axis=1)
        peaks[tag] = float(mag.max())
        t_peak = float(trace.t[int(np.argmax(mag))])
        trace.to_csv(os.path.join(OUT_DIR, f"{tag}_trace.csv"))
        print(f"{tag:>12s} observer: peak |d_hat| = {peaks[tag]:8.4f} N "
              f"at t = {t_peak:.3f} s")
    print(f"\nphantom-disturbance ratio (dynamic / conventional): "
          f"{peaks['dynamic'] / peaks['conventional']:.4f}")
    print(f"traces written to {OUT_DIR}/")


if __name__ == "__main__":
    main()
