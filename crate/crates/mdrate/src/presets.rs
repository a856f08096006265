//! Named models and scales accepted in configs.

use mdrate_core::tails::catalog;
use mdrate_core::{ScaleFunction, TailModel};

/// A model preset with its default scale and the centering `eta` used by
/// the classifier.
#[derive(Debug, Clone)]
pub struct ModelPreset {
    /// Preset name.
    pub name: String,
    /// The model.
    pub model: TailModel,
    /// Scale paired with the model.
    pub scale: ScaleFunction,
    /// Centering constant for classification; the model mean unless the
    /// preset is a mean-shift case.
    pub eta: f64,
}

/// All model presets: the reference catalog plus the three degenerate
/// classifier cases.
pub fn model_presets() -> Vec<ModelPreset> {
    let mut out: Vec<ModelPreset> = catalog()
        .into_iter()
        .map(|e| ModelPreset {
            name: e.name.to_string(),
            eta: e.model.moments().mean,
            model: e.model,
            scale: e.scale,
        })
        .collect();
    let id = ScaleFunction::identity();
    out.push(ModelPreset {
        name: "mean_shift".into(),
        model: TailModel::standard_gaussian(),
        scale: id,
        eta: 0.5,
    });
    out.push(ModelPreset {
        name: "pareto1.5".into(),
        model: TailModel::pareto(1.5, 1.0).expect("valid"),
        scale: id,
        eta: 3.0,
    });
    out.push(ModelPreset {
        name: "constant".into(),
        model: TailModel::constant(1.0).expect("valid"),
        scale: id,
        eta: 1.0,
    });
    out
}

/// Looks up a model preset by name.
pub fn model_preset(name: &str) -> Option<ModelPreset> {
    model_presets().into_iter().find(|p| p.name == name)
}

/// Scale presets by name.
pub fn scale_presets() -> Vec<(&'static str, ScaleFunction)> {
    vec![
        ("identity", ScaleFunction::identity()),
        ("log", ScaleFunction::log_clamp()),
        ("square", ScaleFunction::power(2.0).expect("valid")),
        ("linear_log", ScaleFunction::linear_log()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique() {
        let mut names: Vec<String> = model_presets().into_iter().map(|p| p.name).collect();
        let count = names.len();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), count);
        assert!(model_preset("pareto3_centered").is_some());
        assert!(model_preset("nope").is_none());
    }
}
