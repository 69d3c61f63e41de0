//! One pipeline per experiment, each producing rows and a summary.

use std::sync::Arc;

use super::config::{Experiment, ExperimentConfig};
use super::report::Cell;
use crate::allen_cahn::{
    energy_parts, gamma_sweep, recovery_sequence, well_constant, DoubleWell, SetDescriptor, TruncatedWell,
};
use crate::calculus::{dirichlet_energy, perimeter_gamma, volume_gamma, weak_pairing};
use crate::ehrhard::{ehrhard_symmetrize_function, ehrhard_symmetrize_set};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::gaussian::{profile_clamped, std_normal_cdf, std_normal_quantile, INV_SQRT_2PI};
use crate::grid::GaussianGrid;
use crate::random::{random_smooth_function, random_smooth_set, threshold_for_volume, BandLimited, Rng};
use crate::relaxed::{
    duality_lower_bound, isoperimetric_deficit, minimize_prescribed_curvature, prescribed_curvature_energy,
    relaxed_energy,
};
use crate::sets::{half_space_indicator, half_space_perimeter_exact, superlevel_set};

/// Random sets per run of `isoperimetry` and `symmetrize`.
pub const RANDOM_SETS: usize = 200;
/// Random functions per run of `symmetrize`; consecutive ones form pairs.
pub const RANDOM_FUNCTIONS: usize = 50;
/// Ascent iteration counts reported by `duality-gap`.
pub const DUALITY_ITERATIONS: [usize; 5] = [0, 50, 100, 200, 500];
/// Descent step counts reported by `curvature`.
pub const CURVATURE_STEPS: [usize; 3] = [0, 200, 2000];
/// Perturbations tried by `bernstein-probe`.
pub const BERNSTEIN_PROBES: usize = 100;

/// Fixed column names of each experiment's table.
pub fn columns(e: Experiment) -> &'static [&'static str] {
    match e {
        Experiment::Isoperimetry => &[
            "kind",
            "index",
            "volume",
            "perimeter",
            "profile",
            "deficit",
            "exact_perimeter",
            "relative_error",
        ],
        Experiment::Symmetrize => &[
            "kind",
            "index",
            "k",
            "measure",
            "measure_symmetrized",
            "energy",
            "energy_symmetrized",
        ],
        Experiment::RelaxDemo => &[
            "kind",
            "n",
            "value",
            "target",
            "relative_error",
            "l2_distance_to_half",
            "max_pairing_gap",
        ],
        Experiment::DualityGap => &[
            "field",
            "iterations",
            "lower_bound",
            "relaxed_energy",
            "relative_gap",
        ],
        Experiment::GammaSweep => &[
            "kind",
            "eps",
            "energy",
            "dirichlet_part",
            "potential_part",
            "l2_norm",
            "mass_residual",
            "steps",
            "status",
        ],
        Experiment::Curvature => &[
            "g",
            "steps",
            "energy",
            "oracle_energy",
            "volume",
            "l2_distance_to_oracle",
        ],
        Experiment::BernsteinProbe => &["index", "amplitude", "volume", "perimeter", "perimeter_change"],
    }
}

#[derive(Default)]
pub(super) struct Table {
    pub rows: Vec<Vec<Cell>>,
    pub summary: Vec<(String, f64)>,
}

impl Table {
    fn row(&mut self, cells: Vec<Cell>) {
        self.rows.push(cells);
    }

    fn sum(&mut self, key: &str, value: f64) {
        self.summary.push((key.into(), value));
    }
}

pub(super) fn dispatch(c: &ExperimentConfig) -> Result<Table> {
    let grid = c.grid()?;
    let t = match c.experiment {
        Experiment::Isoperimetry => isoperimetry(c, &grid)?,
        Experiment::Symmetrize => symmetrize(c, &grid)?,
        Experiment::RelaxDemo => relax_demo(&grid)?,
        Experiment::DualityGap => duality_gap(&grid)?,
        Experiment::GammaSweep => sweep(c, &grid)?,
        Experiment::Curvature => curvature(&grid)?,
        Experiment::BernsteinProbe => bernstein(c, &grid)?,
    };
    debug_assert!(t.rows.iter().all(|r| r.len() == columns(c.experiment).len()));
    Ok(t)
}

fn axis_normal(dim: usize, axis: usize) -> Vec<f64> {
    let mut h = vec![0.0; dim];
    h[axis] = 1.0;
    h
}

fn max_of(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

fn isoperimetry(c: &ExperimentConfig, grid: &Arc<GaussianGrid>) -> Result<Table> {
    let mut t = Table::default();
    let mut half_space_errors = Vec::new();
    let mut add_half_space =
        |t: &mut Table, kind: &str, index: usize, h: &[f64], offset: f64| -> Result<()> {
            let e = half_space_indicator(h, offset, grid)?;
            let (v, p) = (volume_gamma(&e), perimeter_gamma(&e)?);
            let exact = half_space_perimeter_exact(offset, 1.0)?;
            let err = (p / exact - 1.0).abs();
            half_space_errors.push(err);
            t.row(vec![
                kind.into(),
                index.into(),
                v.into(),
                p.into(),
                profile_clamped(v).into(),
                (p - profile_clamped(v)).into(),
                exact.into(),
                err.into(),
            ]);
            Ok(())
        };
    let e1 = axis_normal(c.dim, 0);
    for (i, offset) in [0.0, 0.5, 1.0].into_iter().enumerate() {
        add_half_space(&mut t, "half-space", i, &e1, offset)?;
    }
    if c.dim >= 2 {
        let mut index = 0;
        for angle in [0.3f64, 0.7, 1.1] {
            let mut h = vec![0.0; c.dim];
            h[0] = angle.cos();
            h[1] = angle.sin();
            for offset in [0.0, 0.5] {
                add_half_space(&mut t, "tilted", index, &h, offset)?;
                index += 1;
            }
        }
    }
    let mut rng = Rng::new(c.seed);
    let mut min_deficit = f64::INFINITY;
    for i in 0..RANDOM_SETS {
        let e = random_smooth_set(&mut rng, grid);
        let (v, p) = (volume_gamma(&e), perimeter_gamma(&e)?);
        let d = isoperimetric_deficit(&e)?;
        min_deficit = min_deficit.min(d);
        t.row(vec![
            "random".into(),
            i.into(),
            v.into(),
            p.into(),
            profile_clamped(v).into(),
            d.into(),
            f64::NAN.into(),
            f64::NAN.into(),
        ]);
    }
    t.sum("half_space_max_relative_error", max_of(half_space_errors));
    t.sum("random_min_deficit", min_deficit);
    t.sum("random_sets", RANDOM_SETS as f64);
    Ok(t)
}

fn symmetrize(c: &ExperimentConfig, grid: &Arc<GaussianGrid>) -> Result<Table> {
    let mut t = Table::default();
    let mut rng = Rng::new(c.seed);
    let sets: Vec<ScalarField> = (0..RANDOM_SETS)
        .map(|_| random_smooth_set(&mut rng, grid))
        .collect();
    let funcs: Vec<ScalarField> = (0..RANDOM_FUNCTIONS)
        .map(|_| random_smooth_function(&mut rng, grid))
        .collect();
    let (mut vol_drift, mut per_excess) = (0.0f64, f64::NEG_INFINITY);
    let (mut norm_drift, mut dir_excess) = (0.0f64, f64::NEG_INFINITY);
    let (mut contraction, mut pairing) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for k in 1..=c.dim {
        for (i, e) in sets.iter().enumerate() {
            let s = ehrhard_symmetrize_set(e, k)?;
            let (v, vs) = (volume_gamma(e), volume_gamma(&s));
            let (p, ps) = (perimeter_gamma(e)?, perimeter_gamma(&s)?);
            vol_drift = vol_drift.max((vs - v).abs());
            per_excess = per_excess.max(ps - p);
            t.row(vec![
                "set".into(),
                i.into(),
                k.into(),
                v.into(),
                vs.into(),
                p.into(),
                ps.into(),
            ]);
        }
        let syms = funcs
            .iter()
            .map(|u| ehrhard_symmetrize_function(u, k, c.n_levels))
            .collect::<Result<Vec<_>>>()?;
        for (i, (u, s)) in funcs.iter().zip(&syms).enumerate() {
            let (n, ns) = (u.l2_norm(), s.l2_norm());
            let (d, ds) = (dirichlet_energy(u), dirichlet_energy(s));
            norm_drift = norm_drift.max((ns - n).abs());
            dir_excess = dir_excess.max(ds - d);
            t.row(vec![
                "function".into(),
                i.into(),
                k.into(),
                n.into(),
                ns.into(),
                d.into(),
                ds.into(),
            ]);
        }
        for i in 0..funcs.len() / 2 {
            let (u, v) = (&funcs[2 * i], &funcs[2 * i + 1]);
            let (us, vs) = (&syms[2 * i], &syms[2 * i + 1]);
            let (dist, dist_s) = (u.l2_distance(v)?, us.l2_distance(vs)?);
            let (uv, uv_s) = (weak_pairing(u, v)?, weak_pairing(us, vs)?);
            contraction = contraction.max(dist_s - dist);
            pairing = pairing.max(uv - uv_s);
            t.row(vec![
                "pair".into(),
                i.into(),
                k.into(),
                dist.into(),
                dist_s.into(),
                uv.into(),
                uv_s.into(),
            ]);
        }
    }
    t.sum("max_volume_drift", vol_drift);
    t.sum("max_perimeter_excess", per_excess);
    t.sum("max_l2_norm_drift", norm_drift);
    t.sum("max_dirichlet_excess", dir_excess);
    t.sum("max_contraction_excess", contraction);
    t.sum("max_pairing_deficit", pairing);
    Ok(t)
}

type DictionaryEntry = (usize, fn(&[f64]) -> f64);

/// Cylindrical test functions, each with the number of leading variables it
/// depends on.
const DICTIONARY: [DictionaryEntry; 7] = [
    (0, |_| 1.0),
    (1, |x| x[0]),
    (1, |x| x[0] * x[0] - 1.0),
    (1, |x| x[0].sin()),
    (1, |x| std_normal_cdf(x[0])),
    (2, |x| x[0] * x[1]),
    (2, |x| (x[0] - x[1]).cos()),
];

fn relax_demo(grid: &Arc<GaussianGrid>) -> Result<Table> {
    let mut t = Table::default();
    let half = ScalarField::constant(grid, 0.5);
    let f_half = relaxed_energy(&half);
    let err_half = (f_half / INV_SQRT_2PI - 1.0).abs();
    t.row(vec![
        "constant-half".into(),
        0usize.into(),
        f_half.into(),
        INV_SQRT_2PI.into(),
        err_half.into(),
        0.0.into(),
        0.0.into(),
    ]);
    let (mut max_err, mut min_l2, mut max_gap) = (0.0f64, f64::INFINITY, 0.0f64);
    for n in 1..=grid.dim() {
        let e = half_space_indicator(&axis_normal(grid.dim(), n - 1), 0.0, grid)?;
        let p = perimeter_gamma(&e)?;
        let err = (p / INV_SQRT_2PI - 1.0).abs();
        let l2 = e.l2_distance(&half)?;
        let mut gap = 0.0f64;
        for (depends, f) in DICTIONARY.iter().filter(|(d, _)| *d < n) {
            debug_assert!(*depends < n);
            let psi = ScalarField::from_fn(grid, f);
            gap = gap.max((weak_pairing(&e, &psi)? - weak_pairing(&half, &psi)?).abs());
        }
        max_err = max_err.max(err);
        min_l2 = min_l2.min(l2);
        max_gap = max_gap.max(gap);
        t.row(vec![
            "half-space".into(),
            n.into(),
            p.into(),
            INV_SQRT_2PI.into(),
            err.into(),
            l2.into(),
            gap.into(),
        ]);
    }
    t.sum("relaxed_energy_half", f_half);
    t.sum("max_perimeter_relative_error", max_err);
    t.sum("min_l2_distance_to_half", min_l2);
    t.sum("max_pairing_gap", max_gap);
    Ok(t)
}

fn duality_gap(grid: &Arc<GaussianGrid>) -> Result<Table> {
    let mut t = Table::default();
    let fields = [
        ("cdf", ScalarField::from_fn(grid, |x| std_normal_cdf(x[0]))),
        (
            "half-space",
            half_space_indicator(&axis_normal(grid.dim(), 0), 0.0, grid)?,
        ),
        ("constant-half", ScalarField::constant(grid, 0.5)),
    ];
    let mut excess = f64::NEG_INFINITY;
    let mut finals = Vec::new();
    for (name, u) in &fields {
        let f = relaxed_energy(u);
        let mut gap = f64::NAN;
        for iters in DUALITY_ITERATIONS {
            let (lb, _) = duality_lower_bound(u, iters)?;
            gap = (f - lb) / f;
            excess = excess.max(lb - f);
            t.row(vec![
                (*name).into(),
                iters.into(),
                lb.into(),
                f.into(),
                gap.into(),
            ]);
        }
        finals.push(gap);
    }
    t.sum("cdf_relative_gap", finals[0]);
    t.sum("half_space_relative_gap", finals[1]);
    t.sum("constant_relative_gap", finals[2]);
    t.sum("max_excess", excess);
    Ok(t)
}

fn sweep(c: &ExperimentConfig, grid: &Arc<GaussianGrid>) -> Result<Table> {
    let mut t = Table::default();
    let w = DoubleWell::quartic();
    let result = gamma_sweep(&c.eps_list, c.mass, &w, grid)?;
    for r in &result.rows {
        t.row(vec![
            "minimizer".into(),
            r.eps.into(),
            r.energy.into(),
            r.dirichlet_part.into(),
            r.potential_part.into(),
            r.l2_norm.into(),
            r.mass_residual.into(),
            r.steps.into(),
            r.status.clone().into(),
        ]);
    }
    // the recovery field approximates the indicator of {x_1 > α(1 − mass)}
    let truncated = TruncatedWell::new(w, c.delta)?;
    let cw_delta = well_constant(&truncated, 64)?;
    let set = SetDescriptor::half_space(&[1.0], std_normal_quantile(1.0 - c.mass)?);
    let mut recovery_final = f64::NAN;
    for &eps in &c.eps_list {
        let u = recovery_sequence(&set, eps, c.delta, grid, w)?;
        let (dp, pp) = energy_parts(&u, eps, &w)?;
        recovery_final = dp + pp;
        t.row(vec![
            "recovery".into(),
            eps.into(),
            (dp + pp).into(),
            dp.into(),
            pp.into(),
            u.l2_norm().into(),
            (u.integral() - c.mass).into(),
            0usize.into(),
            "constructed".into(),
        ]);
    }
    let limit_delta = cw_delta * profile_clamped(c.mass);
    let final_energy = result.final_energy().unwrap_or(f64::NAN);
    t.sum("well_constant", result.well_constant);
    t.sum("well_constant_truncated", cw_delta);
    t.sum("limit", result.limit);
    t.sum("limit_truncated", limit_delta);
    t.sum("final_energy", final_energy);
    t.sum(
        "final_relative_error",
        (final_energy - result.limit).abs() / result.limit,
    );
    t.sum("recovery_final_energy", recovery_final);
    t.sum("recovery_ratio", recovery_final / limit_delta);
    Ok(t)
}

fn curvature(grid: &Arc<GaussianGrid>) -> Result<Table> {
    let mut t = Table::default();
    let zero = ScalarField::constant(grid, 0.0);
    let one = ScalarField::constant(grid, 1.0);
    let linear_oracle = half_space_indicator(&axis_normal(grid.dim(), 0), 0.0, grid)?;
    let cases = [
        ("zero", ScalarField::constant(grid, 0.0)),
        ("linear", ScalarField::from_fn(grid, |x| 2.0 * x[0])),
        ("constant", ScalarField::constant(grid, 0.5)),
    ];
    let mut finals = Vec::new();
    for (name, g) in &cases {
        let mut last = (f64::NAN, f64::NAN);
        for steps in CURVATURE_STEPS {
            let u = minimize_prescribed_curvature(g, steps);
            let e = prescribed_curvature_energy(&u, g)?;
            let (oracle, dist) = match *name {
                "zero" => (0.0, u.l2_distance(&zero)?.min(u.l2_distance(&one)?)),
                // {x_1 < c} costs (1 − 2)φ(c) against g = 2x_1, least at c = 0
                "linear" => (-INV_SQRT_2PI, u.l2_distance(&linear_oracle)?),
                _ => (0.0, u.l2_distance(&zero)?),
            };
            t.row(vec![
                (*name).into(),
                steps.into(),
                e.into(),
                oracle.into(),
                u.integral().into(),
                dist.into(),
            ]);
            last = (e, dist);
        }
        finals.push(last);
    }
    t.sum("zero_final_energy", finals[0].0);
    t.sum("linear_final_energy", finals[1].0);
    t.sum("linear_oracle_energy", -INV_SQRT_2PI);
    t.sum("linear_l2_distance", finals[1].1);
    t.sum("constant_final_energy", finals[2].0);
    Ok(t)
}

fn bernstein(c: &ExperimentConfig, grid: &Arc<GaussianGrid>) -> Result<Table> {
    let mut t = Table::default();
    let mut rng = Rng::new(c.seed);
    let probe = |f: &ScalarField| -> Result<(f64, f64)> {
        let e = superlevel_set(f, threshold_for_volume(f, 0.5));
        Ok((volume_gamma(&e), perimeter_gamma(&e)?))
    };
    let base = ScalarField::from_fn(grid, |x| -x[0]);
    let (v0, p0) = probe(&base)?;
    if !p0.is_finite() {
        return Err(Error::InvalidArgument("degenerate base set".into()));
    }
    t.row(vec![0usize.into(), 0.0.into(), v0.into(), p0.into(), 0.0.into()]);
    let mut min_change = f64::INFINITY;
    for i in 1..=BERNSTEIN_PROBES {
        let amplitude = rng.uniform_in(0.2, 1.0);
        let bump = BandLimited::sample(&mut rng, grid.dim(), 4, 0.7);
        let f = ScalarField::from_fn(grid, |x| {
            let r2: f64 = x.iter().take(grid.dim()).map(|v| v * v).sum();
            -x[0] + amplitude * bump.eval(x) * (-r2 / 4.0).exp()
        });
        let (v, p) = probe(&f)?;
        min_change = min_change.min(p - p0);
        t.row(vec![
            i.into(),
            amplitude.into(),
            v.into(),
            p.into(),
            (p - p0).into(),
        ]);
    }
    t.sum("base_perimeter", p0);
    t.sum("min_perimeter_change", min_change);
    t.sum("probes", BERNSTEIN_PROBES as f64);
    Ok(t)
}
