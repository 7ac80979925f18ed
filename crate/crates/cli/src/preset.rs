//! Figure presets `fig2a`..`fig5i`: pure states (fig2 local, fig3 common)
//! and mixed states (fig4 local, fig5 common), each swept over the standard
//! five temperatures.

use std::path::Path;

use cohtherm::dynamics::EnvironmentKind;
use cohtherm::states::StateKind;

use crate::config::{ConfigLayer, RunConfig};
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PresetSpec {
    pub name: &'static str,
    pub state: StateKind,
    pub environment: EnvironmentKind,
}

const MIXINGS: [f64; 3] = [0.1, 0.5, 0.9];

pub const PANELS: [&str; 26] = [
    "fig2a", "fig2b", "fig2c", "fig2d", "fig3a", "fig3b", "fig3c", "fig3d", "fig4a", "fig4b",
    "fig4c", "fig4d", "fig4e", "fig4f", "fig4g", "fig4h", "fig4i", "fig5a", "fig5b", "fig5c",
    "fig5d", "fig5e", "fig5f", "fig5g", "fig5h", "fig5i",
];

/// Group names accepted in addition to single panels.
pub const GROUPS: [&str; 5] = ["fig2", "fig3", "fig4", "fig5", "all"];

fn unknown(name: &str) -> CliError {
    CliError::config(
        "preset",
        format!(
            "unknown preset '{name}'; valid names: {}, {}",
            GROUPS.join(", "),
            PANELS.join(", ")
        ),
    )
}

pub fn preset_spec(name: &str) -> Result<PresetSpec, CliError> {
    let name: &'static str = PANELS
        .iter()
        .find(|p| **p == name)
        .ok_or_else(|| unknown(name))?;
    let (figure, panel) = (&name[3..4], name.as_bytes()[4] - b'a');
    let environment = match figure {
        "2" | "4" => EnvironmentKind::Local,
        _ => EnvironmentKind::Common,
    };
    let state = match figure {
        "2" | "3" => [
            StateKind::Ghz,
            StateKind::Star,
            StateKind::W,
            StateKind::WWbar,
        ][panel as usize],
        _ => {
            let p = MIXINGS[(panel % 3) as usize];
            match panel / 3 {
                0 => StateKind::MixGhzW(p),
                1 => StateKind::WernerGhz(p),
                _ => StateKind::WernerW(p),
            }
        }
    };
    Ok(PresetSpec {
        name,
        state,
        environment,
    })
}

/// Expands panel and group names into panel names, in order, without repeats.
pub fn expand_presets<S: AsRef<str>>(names: &[S]) -> Result<Vec<&'static str>, CliError> {
    let mut panels: Vec<&'static str> = Vec::new();
    for name in names {
        let name = name.as_ref();
        let members: Vec<&'static str> = match name {
            "all" => PANELS.to_vec(),
            group if GROUPS.contains(&group) => PANELS
                .iter()
                .copied()
                .filter(|p| p.starts_with(group))
                .collect(),
            panel => vec![preset_spec(panel)?.name],
        };
        for m in members {
            if !panels.contains(&m) {
                panels.push(m);
            }
        }
    }
    Ok(panels)
}

/// Run configuration of a panel. `overrides` may change the grid, solver,
/// substeps, cache toggle and output directory; the physics is fixed.
pub fn figure_preset(
    name: &str,
    overrides: ConfigLayer,
    root: &Path,
) -> Result<RunConfig, CliError> {
    let spec = preset_spec(name)?;
    let fixed = ConfigLayer {
        name: Some(spec.name.to_string()),
        state: Some(spec.state.name().to_string()),
        p: spec.state.mixing(),
        environment: Some(spec.environment.name().to_string()),
        eta: Some(0.1),
        lambda: Some(0.01),
        kt: None,
        ..Default::default()
    };
    let layer = ConfigLayer {
        t_max: overrides.t_max,
        samples: overrides.samples,
        solver: overrides.solver,
        substeps: overrides.substeps,
        cache: overrides.cache,
        output: overrides.output.or_else(|| Some(spec.name.into())),
        ..fixed
    };
    let mut config = RunConfig::resolve(layer, root)?;
    config.title = format!("({}) {}", &name[4..], config.title);
    Ok(config)
}
