"""Reference-score synthesis and the two regressors.

Run: python demos/05_scoring.py
"""

import numpy as np

from esglens.score import (
    CATEGORIES,
    CompanyMeasures,
    GbtConfig,
    MeasureDefinition,
    MeasureKind,
    MlpConfig,
    Polarity,
    evaluate,
    synthesize_reference_scores,
    train_gbt,
    train_mlp,
)

# --- reference scores: booleans, polarity, percentiles, weighted roll-up ----
measures = [
    MeasureDefinition("renewable_share", MeasureKind.NUMERIC,
                      Polarity.HIGHER_BETTER, "resource_use"),
    MeasureDefinition("co2_tons", MeasureKind.NUMERIC,
                      Polarity.LOWER_BETTER, "emissions"),
    MeasureDefinition("has_net_zero_target", MeasureKind.BOOLEAN,
                      Polarity.HIGHER_BETTER, "emissions"),
]
weights = {"resource_use": 0.5, "emissions": 0.5}
companies = [
    CompanyMeasures("green-co", 2022, {"renewable_share": 80.0,
                                       "co2_tons": 1_000.0,
                                       "has_net_zero_target": "Yes"}),
    CompanyMeasures("brown-co", 2022, {"renewable_share": 10.0,
                                       "co2_tons": 90_000.0,
                                       "has_net_zero_target": "No"}),
    CompanyMeasures("null-co", 2022, {"renewable_share": 40.0,
                                      "co2_tons": 20_000.0,
                                      "has_net_zero_target": "Null"}),
]
for record in synthesize_reference_scores(companies, measures, weights):
    print(f"  {record.company_id:9s} reference score {record.score:6.2f}")

# --- regressors on a planted signal -------------------------------------------
rng = np.random.default_rng(0)
X = rng.normal(size=(400, 16))
y_raw = 0.7 * X[:, 3] - 0.4 * X[:, 11]
y = (y_raw - y_raw.min()) / (y_raw.max() - y_raw.min())  # scores in [0, 1]

mlp, mlp_metrics = train_mlp(
    X[:320], y[:320],
    MlpConfig(input_dim=16, hidden_dims=(16,), epochs=100,
              learning_rate=0.01, batch_size=32, seed=0))
held_out = evaluate(mlp.predict(X[320:]), y[320:])
print(f"\nMLP: final train loss {mlp_metrics.loss_curve[-1]:.2e}, "
      f"held-out r {held_out.pearson_r:.3f}")

gbt, gbt_metrics = train_gbt(
    X[:320], y[:320],
    GbtConfig(iterations=80, learning_rate=0.1, min_samples_leaf=10,
              feature_fraction=0.8, seed=0))
held_out = evaluate(gbt.predict(X[320:]), y[320:])
print(f"GBT: final train loss {gbt_metrics.loss_curve[-1]:.2e}, "
      f"held-out r {held_out.pearson_r:.3f}")
