"""Classical MDS map and complete-linkage clusters for one window."""
import numpy as np

from eraseg.embed import complete_linkage_clusters, mds_embed
from eraseg.pipeline import PipelineConfig, build_windows
from eraseg.synth import planted_regime_panel

fx = planted_regime_panel(seed=2, n_countries=15)
windows = build_windows(fx.panel, PipelineConfig(input="<memory>"))
w = windows[25]  # deep inside the tightly integrated regime
emb = mds_embed(w.dist)
print("top eigenvalues:", np.round(emb.eigenvalues[:4], 3), "negative:", emb.n_negative)
for country, (x, y) in zip(emb.countries, emb.coordinates):
    print(f"  {country}: ({x:+.3f}, {y:+.3f})")
print("clusters:", complete_linkage_clusters(w.dist, 5).groups())
