//! Linear growth of position indeterminacy and its saturation.

use fiqsim_core::dynamics::{
    critical_time, evolve_particle, spread_width, Interval, ParticleState,
};
use fiqsim_core::tolerances::{EXACT_IDENTITY_TOL, SPREAD_SLOPE_TOL};

use crate::config::ExperimentConfig;
use crate::report::{Summary, Table, Verdict};
use crate::scenarios::fmt;

pub fn run(config: &ExperimentConfig) -> (Summary, Vec<Verdict>, Table) {
    let p = &config.params;
    let dv = p.velocity_spread;
    let length = p.segment_length;
    let t_c = critical_time(length, dv).expect("validated positive spread");

    // Independent route: transport a point-position particle whose
    // velocity interval straddles zero, so the position interval never
    // needs to reflect before saturating.
    let particle = ParticleState::new(
        Interval::point(length / 2.0),
        Interval::new(-dv / 2.0, dv / 2.0),
        length,
        0.0,
    )
    .expect("validated geometry");

    let mut table = Table::new(&["time", "width_law", "width_transport"]);
    let mut widths = Vec::with_capacity(p.sample_times.len());
    let mut transport_gap = 0.0f64;
    for &t in &p.sample_times {
        let law = spread_width(dv, t, length);
        let transported = evolve_particle(&particle, t).position.width();
        transport_gap = transport_gap.max((law - transported).abs());
        widths.push((t, law));
        table.push(vec![fmt(t), fmt(law), fmt(transported)]);
    }

    // Least squares through the origin over strictly pre-saturation times.
    let (mut num, mut den) = (0.0f64, 0.0f64);
    for &(t, w) in widths.iter().filter(|(t, _)| *t < t_c) {
        num += t * w;
        den += t * t;
    }
    let fitted_slope = if den > 0.0 { num / den } else { f64::NAN };

    let saturation_width = spread_width(dv, t_c, length);
    let beyond = spread_width(dv, 2.0 * t_c, length);

    let verdicts = vec![
        Verdict::checked(
            "spread_slope_error",
            (fitted_slope - dv).abs(),
            SPREAD_SLOPE_TOL,
        )
        .with_detail(format!("fitted {fitted_slope} vs velocity spread {dv}")),
        Verdict::boolean(
            "spread_saturates_at_critical_time",
            saturation_width == length && beyond == length,
            format!(
                "width({t_c}) = {saturation_width}, width({}) = {beyond}",
                2.0 * t_c
            ),
        ),
        Verdict::checked(
            "spread_transport_agreement",
            transport_gap,
            EXACT_IDENTITY_TOL,
        ),
    ];

    let summary = Summary::Spread {
        fitted_slope,
        critical_time: t_c,
        saturation_width,
        widths,
    };
    (summary, verdicts, table)
}
