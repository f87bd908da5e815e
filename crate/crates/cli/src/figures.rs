//! Preset sweeps reproducing the datasets behind each figure.

use crate::{run_sweep, Quantity, SweepError, SweepSpec, SweepTable};

pub const FIGURE_IDS: [&str; 13] = [
    "fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig11", "fig12", "fig13",
];

fn preset(quantity: Quantity, alpha: &[f64], range: (f64, f64), steps: usize) -> SweepSpec {
    SweepSpec {
        alpha: alpha.to_vec(),
        p_min: range.0,
        p_max: range.1,
        steps,
        ..SweepSpec::new(quantity)
    }
}

fn pinned(quantity: Quantity, alpha: &[f64], q: f64, steps: usize) -> SweepSpec {
    SweepSpec {
        q,
        ..preset(quantity, alpha, (q, 1.0), steps)
    }
}

fn alpha_measure(levels: usize) -> Result<SweepTable, SweepError> {
    run_sweep(&SweepSpec {
        levels: vec![levels],
        ..preset(Quantity::Hcla, &[0.7], (0.0, 1.0), 101)
    })
}

/// The spec(s) of a figure, each with the file-name suffix of its dataset.
pub fn figure_specs(id: &str) -> Result<Vec<(&'static str, SweepSpec)>, SweepError> {
    let full = (0.0, 1.0);
    let specs = match id {
        "fig1" => vec![("", pinned(Quantity::ChoiEigs, &[0.0, 0.7], 0.3, 141))],
        "fig2" => vec![
            ("eigs", pinned(Quantity::ChoiEigs, &[0.7], 0.8, 101)),
            ("norm", pinned(Quantity::ChoiNorm, &[0.7], 0.8, 101)),
        ],
        "fig3" => vec![(
            "",
            SweepSpec {
                mark_singular: true,
                ..preset(Quantity::DecayRate, &[0.0, 0.7], full, 201)
            },
        )],
        "fig5" => vec![("", preset(Quantity::TraceDistance, &[0.0, 0.7, 0.9], full, 201))],
        "fig6" => vec![("", pinned(Quantity::MemoryX, &[0.0, 0.7, 0.8, 0.9, 1.0], 0.3, 141))],
        "fig7" => vec![("", preset(Quantity::Volume, &[0.0, 0.7, 0.8], full, 201))],
        "fig8" => vec![("", preset(Quantity::Trajectory, &[0.0], full, 101))],
        "fig9" => vec![(
            "",
            SweepSpec {
                mark_singular: true,
                ..preset(Quantity::Trajectory, &[0.0, 0.7], full, 101)
            },
        )],
        "fig11" => vec![(
            "",
            SweepSpec {
                levels: vec![3],
                ..preset(Quantity::FNorm, &[0.0, 0.7], full, 201)
            },
        )],
        "fig12" => vec![
            (
                "multiqubit",
                SweepSpec {
                    qubits: vec![1, 2, 3],
                    ..pinned(Quantity::ChoiNorm, &[0.9], 0.4, 601)
                },
            ),
            (
                "multilevel",
                SweepSpec {
                    levels: vec![2, 3, 4],
                    ..pinned(Quantity::ChoiNorm, &[0.9], 0.4, 601)
                },
            ),
        ],
        "fig13" => vec![(
            "",
            SweepSpec {
                qubits: vec![1, 2],
                ..preset(Quantity::GFunction, &[0.9], (0.0, 0.99), 100)
            },
        )],
        "fig4" | "fig10" => vec![],
        other => {
            return Err(SweepError::Usage(format!(
                "unknown figure id {other:?}; valid ids: {}",
                FIGURE_IDS.join(", ")
            )))
        }
    };
    Ok(specs)
}

/// Runs a figure preset; returns `(file stem, table)` pairs.
pub fn figure(id: &str) -> Result<Vec<(String, SweepTable)>, SweepError> {
    let stem = |suffix: &str| {
        if suffix.is_empty() {
            id.to_string()
        } else {
            format!("{id}_{suffix}")
        }
    };
    match id {
        "fig4" => {
            let blp = run_sweep(&preset(Quantity::Blp, &[0.7], (0.0, 1.0), 101))?;
            let table = blp.merge(alpha_measure(2)?)?;
            Ok(vec![(stem(""), table)])
        }
        "fig10" => Ok(vec![(stem(""), alpha_measure(3)?)]),
        _ => figure_specs(id)?
            .into_iter()
            .map(|(suffix, spec)| Ok((stem(suffix), run_sweep(&spec)?)))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_id_has_a_preset() {
        for id in FIGURE_IDS {
            assert!(figure_specs(id).is_ok(), "{id}");
        }
        assert!(matches!(figure_specs("fig14"), Err(SweepError::Usage(m)) if m.contains("fig13")));
    }

    #[test]
    fn presets_validate() {
        for id in FIGURE_IDS {
            for (_, spec) in figure_specs(id).unwrap() {
                spec.validate().unwrap();
            }
        }
    }
}
