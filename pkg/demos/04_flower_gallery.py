"""Render attribute flowers over an embedding and export the scene as SVG.

Joint mode encodes, per petal: TP = fill + black border, FN = fill only,
FP = black border only, TN = faint placeholder outline. The center dot's
darkness is the ACT-PRD error distance normalized by the dataset maximum.
"""

from pathlib import Path

import attrflower as af
from attrflower.glyph import layout_flower, render_svg

out_dir = Path(__file__).parent / "output"
out_dir.mkdir(exist_ok=True)

ds = af.generate_synthetic(n=120, k=8, d=32, n_clusters=4, noise=0.2, seed=9)
result = af.embed_dataset_space(
    ds, af.Space.FEA, af.default_config(af.Space.FEA, len(ds), ds.fea_dim, seed=1))

kind = af.DistanceKind.EUCLIDEAN
max_distance = max(af.error_distance(r.act, r.prd, kind) for r in ds.records)
print(f"max error distance: {max_distance:.3f}")

filter_indices = [0, 1, 2, 3]   # four petals keep the map readable
glyphs = [
    layout_flower(record, ds.schema, filter_indices, af.FlowerMode.JOINT,
                  distance_kind=kind, max_distance=max_distance,
                  center=(float(x), float(y)), radius=9.0)
    for record, (x, y) in zip(ds.records, result.coords)
]

coords = result.coords
pad = 0.08 * (coords.max() - coords.min()) + 1.0
viewport = (float(coords[:, 0].min() - pad), float(coords[:, 1].min() - pad),
            float(coords[:, 0].max() + pad), float(coords[:, 1].max() + pad))
svg = render_svg(glyphs, 1000, 800, viewport)
path = out_dir / "flower-map.svg"
path.write_text(svg)
print(f"wrote {path} ({len(svg)} bytes, {len(glyphs)} flowers)")

# Tally the visual states to see the model's error structure at a glance.
tallies = {"TP": 0, "FN": 0, "FP": 0, "TN": 0}
for glyph in glyphs:
    for petal in glyph.petals:
        filled = petal.fill is not None
        black = petal.border == "#000000"
        tallies[{(True, True): "TP", (True, False): "FN",
                 (False, True): "FP", (False, False): "TN"}[(filled, black)]] += 1
print("petal states:", tallies)
