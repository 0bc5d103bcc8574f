"""The headline experiment: four controllers, one chamfered slot.

All four controllers start from the same pose 0.2 mm above the slot mouth
with a 0.02 rad tilt and push down with a -20 N feedforward:

  PD_l   low-gain PD          -- safe but stalls at the mouth (stiction)
  PD_h   high-gain PD         -- seats the peg on smooth runs, but with the
                                 scripted approach transient it slams the
                                 wall and trips the 90 N guard
  CWDOB  conventional observer-- phantom inertial disturbances wind up the
                                 loop; guard trips almost immediately
  DWDOB  dynamic observer     -- full insertion with bounded passivity
                                 residual, no guard trip

The runtime energy ledger runs on every tick; its residual rho is the
excess of stored energy over what flowed in through the contact port, so
sustained positive spikes mean the controller is pumping energy into the
contact.  Takes about ten seconds; artifacts land in demo_out/compare/.
"""
from zerowrench import CONTROLLER_NAMES, compare_controllers, preset_scenario

OUT_DIR = "demo_out/compare"


def main():
    scenarios = [preset_scenario(name) for name in CONTROLLER_NAMES]
    report = compare_controllers(scenarios, out_dir=OUT_DIR)
    print(f"{'scenario':<16s} {'depth mm':>9s} {'peak N':>8s} "
          f"{'max rho J':>10s}  outcome")
    for name in report.ranking_by_depth:
        s = report.results[name].summary
        outcome = f"safety stop ({s['stop_reason']})" if s["stopped"] else (
            "full insertion" if s["success"] else "stalled")
        print(f"{name:<16s} {s['final_depth_m'] * 1e3:9.2f} "
              f"{s['max_force_N']:8.1f} {s['max_rho_J']:10.4f}  {outcome}")
    print("\nranking by final depth:          "
          + ", ".join(report.ranking_by_depth))
    print("ranking by peak regulated wrench: "
          + ", ".join(report.ranking_by_peak_residual))
    print(f"\nper-tick traces and rankings written to {OUT_DIR}/")


if __name__ == "__main__":
    main()
