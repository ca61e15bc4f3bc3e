"""End-to-end run on the synthetic three-regime panel.

Prints the detected change points for a handful of seeds next to the
planted ones. Breaks show up as ramps several windows wide (every
window straddling a break mixes two regimes), so the detected point can
sit anywhere on the ramp.
"""
from eraseg.indices import build_index_panel
from eraseg.pipeline import PipelineConfig, build_windows, segment_index_panel
from eraseg.synth import planted_regime_panel

cfg = PipelineConfig(input="<memory>", target_eras=(3,))
for seed in range(5):
    fx = planted_regime_panel(seed=seed)
    ip = build_index_panel([w.tree for w in build_windows(fx.panel, cfg)])
    seg = segment_index_panel(ip, cfg)[0]
    print(f"seed {seed}: planted {fx.true_change_points}, found {seg.change_points}, "
          f"years {seg.change_point_years()}, lam {seg.lam:.3f}")
