//! Temperature scaling and histogram binning fitted on validation
//! predictions of a gbdt trained on 10% of the labels.

use cast_core::calibration::{ece_of_probs, fit_histogram_from_probs, fit_temperature, CalibrationKind};
use cast_core::classifier::{ClassifierSpec, ProbabilisticClassifier};
use cast_core::data::make_split;
use cast_core::data::synthetic::Bundled;

fn main() -> cast_core::Result<()> {
    let ds = Bundled::BlobsHigh.generate(1000, 2024)?;
    let split = make_split(&ds, 0.1, 0)?;
    let fold = &split.folds[0];
    let model = ClassifierSpec::default().fit(
        ds.select_rows(&fold.labeled).view(),
        &ds.labels_of(&fold.labeled)?,
        ds.n_classes(),
        None,
    )?;
    let val = model.predict_proba(ds.select_rows(&fold.val).view())?;
    let y_val = ds.labels_of(&fold.val)?;
    let test = model.predict_proba(ds.select_rows(&split.test_idx).view())?;
    let y_test = ds.labels_of(&split.test_idx)?;

    println!("uncalibrated: val ECE {:.4}, test ECE {:.4}", ece_of_probs(val.view(), &y_val, 10)?, ece_of_probs(test.view(), &y_test, 10)?);
    for map in [fit_temperature(val.view(), &y_val)?, fit_histogram_from_probs(val.view(), &y_val)?] {
        let name = match &map.kind {
            CalibrationKind::Temperature { temperature } => format!("temperature {temperature:.3}"),
            CalibrationKind::Histogram { .. } => "histogram binning".to_string(),
        };
        let calibrated = map.apply_matrix(test.view());
        println!(
            "{name}: val ECE {:.4}, test ECE {:.4}",
            map.fit_ece,
            ece_of_probs(calibrated.view(), &y_test, 10)?
        );
    }
    Ok(())
}
