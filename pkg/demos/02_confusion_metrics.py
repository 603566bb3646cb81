"""Confusion outcomes and the four evaluation metrics, per attribute.

Each (record, attribute) pair is TP, TN, FP or FN at the 0.5 cut-off
(inclusive). Counts micro-aggregate into accuracy, precision, recall and
F1; ranking quality comes from non-interpolated AP and its mean over
attributes (mAP).
"""

import attrflower as af

ds = af.generate_synthetic(n=400, k=17, d=32, n_clusters=6, noise=0.15, seed=7)

overall = af.confusion(ds.records)
report = af.report(overall)
print("overall:", overall.to_json())
print("        ", {k: round(v, 4) for k, v in report.to_json().items()})
print("mAP:    ", round(af.mean_average_precision(ds), 4))

print(f"\n{'attribute':<22}{'acc':>7}{'prec':>7}{'rec':>7}{'f1':>7}{'ap':>7}")
for j, name in enumerate(ds.schema.names):
    c = af.confusion(ds.records, [j])
    r = af.report(c)
    ap = af.average_precision([float(rec.prd[j]) for rec in ds.records],
                              [int(rec.act[j]) for rec in ds.records])

    def show(v):
        return f"{v:>7.3f}" if v is not None else f"{'--':>7}"

    print(f"{name:<22}{show(r.accuracy)}{show(r.precision)}"
          f"{show(r.recall)}{show(r.f1)}{show(ap)}")

# A single record under the microscope: the detail view's raw material.
rec = ds.records[0]
print(f"\nper-attribute outcomes for {rec.id}:")
for j, name in enumerate(ds.schema.names[:8]):
    outcome = af.classify_outcome(int(rec.act[j]), float(rec.prd[j]))
    print(f"  {name:<22} act={int(rec.act[j])} prd={rec.prd[j]:.2f} -> {outcome.value}")
print("  ...")
print("error distance (euclidean):",
      round(af.error_distance(rec.act, rec.prd, af.DistanceKind.EUCLIDEAN), 4))
print("error distance (cosine):   ",
      round(af.error_distance(rec.act, rec.prd, af.DistanceKind.COSINE), 4))
