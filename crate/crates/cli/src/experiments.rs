//! The five batch experiments.
//!
//! Every runner certifies the spectra it uses before computing statistics
//! from them: levels above the trusted energy of a rung are only used under
//! `allow_unconverged`, and then every affected file is watermarked.

use std::path::PathBuf;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use dicke_core::spectral::goe::{draw_rng, sample_poisson_levels};
use dicke_core::spectral::power::default_fit_band;
use dicke_core::spectral::spacing::{poisson_cdf, wigner_cdf};
use dicke_core::*;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, LevelSource};
use crate::output::{DataTable, Manifest, OutputDir, TrustEntry};

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub seed: u64,
    pub allow_unconverged: bool,
}

impl RunOptions {
    pub fn new(out_dir: impl Into<PathBuf>, seed: u64) -> Self {
        RunOptions {
            out_dir: out_dir.into(),
            seed,
            allow_unconverged: false,
        }
    }
}

#[derive(Debug)]
pub struct RunOutcome {
    pub manifest: Manifest,
    pub out_dir: PathBuf,
}

impl RunOutcome {
    pub fn ok(&self) -> bool {
        self.manifest.violations.is_empty()
    }
}

fn solve_opts(cfg: &ExperimentConfig) -> SolveOptions {
    SolveOptions {
        max_dim: cfg.run.max_dim,
        verify_samples: None,
    }
}

fn solve_all(cfg: &ExperimentConfig, jobs: &[(u32, ParitySector)]) -> Result<Vec<SpectrumRecord>> {
    let opts = solve_opts(cfg);
    jobs.par_iter()
        .map(|&(n_max, sector)| spectrum(&cfg.model, Truncation::new(n_max), sector, &opts))
        .collect::<dicke_core::Result<Vec<_>>>()
        .map_err(Into::into)
}

/// Spectra of every selected sector at one cutoff, with their trust verdicts.
struct Rung {
    n_max: u32,
    spectra: Vec<SpectrumRecord>,
    trust: Vec<TrustedWindow>,
}

impl Rung {
    fn covers(&self, e_per_atom: f64) -> bool {
        self.trust.iter().all(|w| w.covers_per_atom(e_per_atom))
    }
}

fn abs_tol(cfg: &ExperimentConfig) -> f64 {
    cfg.ladder.tol * cfg.model.omega()
}

/// Diagonalize every rung plus the top-rung probe; each rung is certified
/// against the next one up.
fn certified_ladder(cfg: &ExperimentConfig, cutoffs: &[u32]) -> Result<Vec<Rung>> {
    let sectors = cfg.ladder.sector.sectors();
    let top = *cutoffs.last().ok_or_else(|| anyhow!("empty ladder"))?;
    let probe = cfg.ladder.probe.unwrap_or_else(|| default_probe(top));
    let mut all_cutoffs = cutoffs.to_vec();
    all_cutoffs.push(probe);
    let jobs: Vec<(u32, ParitySector)> = all_cutoffs
        .iter()
        .flat_map(|&n| sectors.iter().map(move |&s| (n, s)))
        .collect();
    let mut spectra = solve_all(cfg, &jobs)?;

    let k = sectors.len();
    let probe_spectra = spectra.split_off(cutoffs.len() * k);
    let mut rungs: Vec<Rung> = Vec::with_capacity(cutoffs.len());
    for (i, chunk) in spectra.chunks(k).enumerate() {
        rungs.push(Rung {
            n_max: cutoffs[i],
            spectra: chunk.to_vec(),
            trust: Vec::new(),
        });
    }
    let tol = abs_tol(cfg);
    for i in 0..rungs.len() {
        let next: &[SpectrumRecord] = if i + 1 < rungs.len() {
            &rungs[i + 1].spectra
        } else {
            &probe_spectra
        };
        let trust = rungs[i]
            .spectra
            .iter()
            .zip(next)
            .map(|(base, probe)| trusted_window_from_spectra(base, probe, tol))
            .collect::<dicke_core::Result<Vec<_>>>()?;
        rungs[i].trust = trust;
    }
    Ok(rungs)
}

fn trust_entry(w: &TrustedWindow, window_hi: f64) -> TrustEntry {
    let n = f64::from(w.params.n_atoms());
    TrustEntry {
        sector: w.sector.label().to_string(),
        n_max: w.n_max,
        n_max_probe: w.n_max_probe,
        tol: w.tol,
        count_trusted: w.count_trusted,
        e_trust_per_atom: w.e_trust_per_atom(),
        first_untrusted_per_atom: w.first_untrusted.map(|e| e / n),
        e_star_per_atom: w.e_star / n,
        covers_window: w.covers_per_atom(window_hi),
    }
}

/// What to do with a rung whose trusted window does not reach `hi`.
fn gate_rungs(
    rungs: &[Rung],
    hi: f64,
    opts: &RunOptions,
    manifest: &mut Manifest,
) -> Result<Vec<bool>> {
    let top = rungs.last().expect("non-empty ladder");
    if !top.covers(hi) && !opts.allow_unconverged {
        let reach: Vec<String> = top
            .trust
            .iter()
            .map(|w| match w.first_untrusted {
                Some(e) => format!(
                    "{} below E/N = {:.4}",
                    w.sector.label(),
                    e / f64::from(w.params.n_atoms())
                ),
                None => format!("{} fully", w.sector.label()),
            })
            .collect();
        bail!(
            "top cutoff n_max = {} is not converged up to E/N = {hi} (trusted: {}); raise the cutoff or pass --allow-unconverged",
            top.n_max,
            reach.join(", ")
        );
    }
    let mut keep = Vec::with_capacity(rungs.len());
    for r in rungs {
        let covered = r.covers(hi);
        if covered {
            keep.push(true);
        } else if opts.allow_unconverged {
            manifest.unconverged_output = true;
            manifest.note(format!(
                "n_max = {} is not converged over the window; output watermarked",
                r.n_max
            ));
            keep.push(true);
        } else {
            manifest.note(format!(
                "n_max = {} skipped: not converged over the window",
                r.n_max
            ));
            keep.push(false);
        }
    }
    Ok(keep)
}

fn window_levels(levels: &[f64], n_atoms: u32, lo: f64, hi: f64) -> Vec<f64> {
    let n = f64::from(n_atoms);
    levels
        .iter()
        .copied()
        .filter(|e| (lo..=hi).contains(&(e / n)))
        .collect()
}

#[derive(Serialize)]
struct LevelVerdict {
    sector: String,
    level: usize,
    converged: bool,
    last_change: f64,
    converged_value_per_atom: Option<f64>,
}

/// Selected levels against the cutoff.
pub fn run_convergence_figure(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<RunOutcome> {
    let mut manifest = Manifest::new("converge", cfg, opts.seed, opts.allow_unconverged);
    let mut out = OutputDir::create(&opts.out_dir)?;
    let cutoffs = &cfg.ladder.cutoffs;
    if cutoffs.len() < 2 {
        bail!("converge needs at least two cutoffs");
    }
    let sectors = cfg.ladder.sector.sectors();
    let n = f64::from(cfg.model.n_atoms());
    let e_sc = ground_state_energy(&cfg.model);
    let tol = abs_tol(cfg);

    let t = Instant::now();
    let jobs: Vec<(u32, ParitySector)> = sectors
        .iter()
        .flat_map(|&s| cutoffs.iter().map(move |&c| (c, s)))
        .collect();
    let spectra = solve_all(cfg, &jobs)?;
    manifest.time("diagonalize", t);

    let t = Instant::now();
    let mut verdicts = Vec::new();
    let mut all_converged = Vec::new();
    for (si, &sector) in sectors.iter().enumerate() {
        let ladder = &spectra[si * cutoffs.len()..(si + 1) * cutoffs.len()];
        let reports = reports_from_spectra(ladder, &cfg.ladder.levels, tol)?;
        let check = monotonicity_check(&reports)?;
        for v in &check.violations {
            manifest.violations.push(format!(
                "{} level {} rises by {:.3e} from n_max = {} to {}",
                sector.label(),
                v.level_index,
                v.increase,
                v.n_max_lo,
                v.n_max_hi
            ));
        }

        let mut columns = vec!["n_max".to_string()];
        columns.extend(cfg.ladder.levels.iter().map(|k| format!("E{k}/N")));
        columns.push("E_sc/N".into());
        let mut table = DataTable::new(columns);
        for (ri, &c) in cutoffs.iter().enumerate() {
            let mut row = vec![f64::from(c)];
            row.extend(reports.iter().map(|r| r.ladder[ri].1 / n));
            row.push(e_sc);
            table.push(row);
        }
        out.write_table(&format!("convergence_{}.dat", sector.label()), &table)?;

        for r in &reports {
            verdicts.push(LevelVerdict {
                sector: sector.label().into(),
                level: r.level_index,
                converged: r.converged,
                last_change: r.last_change(),
                converged_value_per_atom: r.converged_value.map(|e| e / n),
            });
        }

        // every level of the sector, compared between the top two rungs
        let (a, b) = (&ladder[ladder.len() - 2], &ladder[ladder.len() - 1]);
        let count = a
            .levels
            .iter()
            .zip(&b.levels)
            .filter(|(x, y)| (*x - *y).abs() < tol)
            .count();
        all_converged.push((sector.label().to_string(), count, a.levels.len()));
        let w = trusted_window_from_spectra(a, b, tol)?;
        manifest.trust.push(trust_entry(&w, f64::INFINITY));
    }
    manifest.time("audit", t);

    manifest.result("ground_state_semiclassical_per_atom", e_sc);
    manifest.result("levels", verdicts);
    manifest.result(
        "converged_between_top_rungs",
        all_converged
            .iter()
            .map(|(s, c, total)| {
                let mut t = toml::Table::new();
                t.insert("sector".into(), s.clone().into());
                t.insert("converged".into(), (*c as i64).into());
                t.insert("levels".into(), (*total as i64).into());
                t
            })
            .collect::<Vec<_>>(),
    );
    manifest.result("monotone", manifest.violations.is_empty());
    let manifest = out.finish(manifest)?;
    Ok(RunOutcome {
        manifest,
        out_dir: opts.out_dir.clone(),
    })
}

#[derive(Serialize)]
struct DosRungSummary {
    n_max: u32,
    converged: bool,
    levels_in_window: usize,
    /// Largest `|count - mean| / sqrt(mean)` over bins in the flat region.
    flat_max_deviation_sigma: Option<f64>,
    /// Largest relative deviation from the bin-averaged semiclassical
    /// density over the same bins.
    flat_max_relative_deviation: Option<f64>,
}

/// Level histograms per cutoff against the semiclassical density.
pub fn run_dos_figure(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<RunOutcome> {
    let mut manifest = Manifest::new("dos", cfg, opts.seed, opts.allow_unconverged);
    let (lo, hi) = (cfg.window.lo, cfg.window.hi);
    let n_atoms = cfg.model.n_atoms();
    let n = f64::from(n_atoms);
    let sector_share = cfg.ladder.sector.sectors().len() as f64 / 2.0;

    let t = Instant::now();
    let rungs = certified_ladder(cfg, &cfg.ladder.cutoffs)?;
    manifest.time("diagonalize", t);
    for r in &rungs {
        for w in &r.trust {
            manifest.trust.push(trust_entry(w, hi));
        }
    }
    let keep = gate_rungs(&rungs, hi, opts, &mut manifest)?;
    let mut out = OutputDir::create(&opts.out_dir)?;

    let t = Instant::now();
    let mut eval = DosEvaluator::new(&cfg.model, SphereQuadrature::default())?;
    let bins = cfg.stats.dos_bins;
    let width = (hi - lo) / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|b| lo + width * b as f64).collect();
    let cumulative: Vec<f64> = edges
        .iter()
        .map(|&e| eval.cumulative(e))
        .collect::<dicke_core::Result<_>>()?;
    let onset = flat_onset_energy(&cfg.model);

    let mut summaries = Vec::new();
    for (r, &k) in rungs.iter().zip(&keep) {
        if !k {
            continue;
        }
        let mut levels: Vec<f64> = r
            .spectra
            .iter()
            .flat_map(|s| s.levels.iter().map(|e| e / n))
            .collect();
        levels.sort_by(f64::total_cmp);
        let mut table = DataTable::new(["E/N", "count", "density", "sigma", "nu_bin", "nu_center"]);
        let mut flat_counts = Vec::new();
        let mut flat_rel: Option<f64> = None;
        let mut in_window = 0;
        for b in 0..bins {
            let (a, z) = (edges[b], edges[b + 1]);
            let count = levels.partition_point(|&e| e <= z) - levels.partition_point(|&e| e <= a);
            in_window += count;
            let scale = n * width;
            let density = count as f64 / scale;
            let nu_bin = sector_share * (cumulative[b + 1] - cumulative[b]) / scale;
            let center = 0.5 * (a + z);
            let nu_center = sector_share * eval.dos(center)?;
            if a >= onset {
                flat_counts.push(count as f64);
                let dev = (density / nu_bin - 1.0).abs();
                flat_rel = Some(flat_rel.map_or(dev, |m| m.max(dev)));
            }
            table.push(vec![
                center,
                count as f64,
                density,
                (count as f64).sqrt() / scale,
                nu_bin,
                nu_center,
            ]);
        }
        let covered = r.covers(hi);
        out.write_table(
            &format!("dos_nmax{}.dat", r.n_max),
            &table.watermark(!covered),
        )?;
        let flat = (!flat_counts.is_empty()).then(|| {
            let mean = flat_counts.iter().sum::<f64>() / flat_counts.len() as f64;
            flat_counts
                .iter()
                .map(|c| (c - mean).abs())
                .fold(0.0, f64::max)
                / mean.sqrt()
        });
        summaries.push(DosRungSummary {
            n_max: r.n_max,
            converged: covered,
            levels_in_window: in_window,
            flat_max_deviation_sigma: flat,
            flat_max_relative_deviation: flat_rel,
        });
    }

    let points = cfg.stats.curve_points;
    let start = ground_state_energy(&cfg.model).min(lo);
    let mut curve = DataTable::new(["E/N", "nu_total", "nu_selected"]);
    for i in 0..points {
        let e = start + (hi - start) * i as f64 / (points - 1) as f64;
        let nu = eval.dos(e)?;
        curve.push(vec![e, nu, sector_share * nu]);
    }
    out.write_table("dos_semiclassical.dat", &curve)?;
    manifest.time("histogram", t);

    manifest.result("flat_onset_per_atom", onset);
    if cfg.model.g() > critical_coupling(&cfg.model) {
        manifest.result("esqpt_per_atom", esqpt_energy(&cfg.model));
    } else {
        manifest.note("normal phase: no excited-state transition");
    }
    manifest.result("flat_density", sector_share * eval.flat_density());
    manifest.result("rungs", summaries);
    let manifest = out.finish(manifest)?;
    Ok(RunOutcome {
        manifest,
        out_dir: opts.out_dir.clone(),
    })
}

#[derive(Serialize)]
struct Plateau {
    value: f64,
    start_n_max: u32,
    rungs: usize,
}

/// First row from which every later `⟨r⟩` stays within `band` of the top
/// value, provided at least two rows qualify.
fn find_plateau(rows: &[(u32, f64)], band: f64) -> Option<Plateau> {
    let top = rows.last()?.1;
    let mut start = rows.len();
    while start > 0 && (rows[start - 1].1 - top).abs() < band {
        start -= 1;
    }
    let run = &rows[start..];
    (run.len() >= 2).then(|| Plateau {
        value: run.iter().map(|r| r.1).sum::<f64>() / run.len() as f64,
        start_n_max: run[0].0,
        rungs: run.len(),
    })
}

#[derive(Serialize)]
struct RatioRow {
    n_max: u32,
    converged: bool,
    r_mean: f64,
    r_std_error: f64,
    n_ratios: usize,
    n_degenerate: usize,
}

/// Mean gap ratio in the window for each cutoff.
pub fn run_rstat_figure(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<RunOutcome> {
    let mut manifest = Manifest::new("rstat", cfg, opts.seed, opts.allow_unconverged);
    let (lo, hi) = (cfg.window.lo, cfg.window.hi);
    let n_atoms = cfg.model.n_atoms();

    let t = Instant::now();
    let rungs = certified_ladder(cfg, &cfg.ladder.cutoffs)?;
    manifest.time("diagonalize", t);
    for s in &rungs[0].spectra {
        let top = s.levels.last().copied().unwrap_or(f64::NEG_INFINITY) / f64::from(n_atoms);
        if top < hi {
            bail!(
                "window top E/N = {hi} lies above the spectrum at n_max = {} (max E/N = {top:.4})",
                rungs[0].n_max
            );
        }
    }
    for r in &rungs {
        for w in &r.trust {
            manifest.trust.push(trust_entry(w, hi));
        }
    }
    let keep = gate_rungs(&rungs, hi, opts, &mut manifest)?;
    let mut out = OutputDir::create(&opts.out_dir)?;

    let t = Instant::now();
    let mut rows = Vec::new();
    let mut any_untrusted = false;
    for (r, &k) in rungs.iter().zip(&keep) {
        if !k {
            continue;
        }
        let mut ratios = Vec::new();
        let mut n_degenerate = 0;
        for s in &r.spectra {
            // sectors are separate sequences; pool their ratios, never their levels
            let stat =
                r_statistic(&window_levels(&s.levels, n_atoms, lo, hi)).with_context(|| {
                    format!("gap ratio at n_max = {}, sector {}", r.n_max, s.sector)
                })?;
            ratios.extend(stat.ratios);
            n_degenerate += stat.n_degenerate;
        }
        let m = ratios.len() as f64;
        let mean = ratios.iter().sum::<f64>() / m;
        let var = ratios.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0).max(1.0);
        let covered = r.covers(hi);
        any_untrusted |= !covered;
        rows.push(RatioRow {
            n_max: r.n_max,
            converged: covered,
            r_mean: mean,
            r_std_error: (var / m).sqrt(),
            n_ratios: ratios.len(),
            n_degenerate,
        });
    }
    let mut table = DataTable::new([
        "n_max",
        "r_mean",
        "r_std_error",
        "n_ratios",
        "converged",
        "r_goe",
    ]);
    for r in &rows {
        table.push(vec![
            f64::from(r.n_max),
            r.r_mean,
            r.r_std_error,
            r.n_ratios as f64,
            if r.converged { 1.0 } else { 0.0 },
            GOE_MEAN_R,
        ]);
    }
    out.write_table("rstat.dat", &table.watermark(any_untrusted))?;
    manifest.time("ratios", t);

    let pairs: Vec<(u32, f64)> = rows.iter().map(|r| (r.n_max, r.r_mean)).collect();
    match find_plateau(&pairs, cfg.stats.plateau_band) {
        Some(p) => manifest.result("plateau", p),
        None => manifest.note("no plateau: fewer than two trailing rungs agree within the band"),
    }
    manifest.result("goe_mean_r", GOE_MEAN_R);
    manifest.result("poisson_mean_r", POISSON_MEAN_R);
    manifest.result("rows", rows);
    let manifest = out.finish(manifest)?;
    Ok(RunOutcome {
        manifest,
        out_dir: opts.out_dir.clone(),
    })
}

#[derive(Serialize)]
struct SectorStats {
    sector: String,
    levels: usize,
    r_mean: f64,
    r_std_error: f64,
    n_degenerate: usize,
}

/// Surrogate levels: as many uniform levels per sector as the semiclassical
/// count predicts for the window.
fn poisson_surrogate(
    cfg: &ExperimentConfig,
    seed: u64,
    sectors: &[ParitySector],
) -> Result<Vec<Vec<f64>>> {
    let (lo, hi) = (cfg.window.lo, cfg.window.hi);
    let n = f64::from(cfg.model.n_atoms());
    let mut eval = DosEvaluator::new(&cfg.model, SphereQuadrature::default())?;
    let count = ((eval.cumulative(hi)? - eval.cumulative(lo)?) / 2.0).round() as usize;
    Ok(sectors
        .iter()
        .enumerate()
        .map(|(i, _)| {
            let mut rng = draw_rng(seed, i as u64);
            sample_poisson_levels(count, &mut rng)
                .into_iter()
                .map(|u| (lo + (hi - lo) * u / count as f64) * n)
                .collect()
        })
        .collect())
}

/// Spacing distribution and δ power spectrum in the window.
pub fn run_chaos_figure(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<RunOutcome> {
    let mut manifest = Manifest::new("chaos", cfg, opts.seed, opts.allow_unconverged);
    let (lo, hi) = (cfg.window.lo, cfg.window.hi);
    let n_atoms = cfg.model.n_atoms();
    let sectors = cfg.ladder.sector.sectors();

    let t = Instant::now();
    let (sector_levels, watermark) = match cfg.stats.source {
        LevelSource::Model => {
            let top = *cfg.ladder.cutoffs.last().unwrap();
            let rungs = certified_ladder(cfg, &[top])?;
            for w in &rungs[0].trust {
                manifest.trust.push(trust_entry(w, hi));
            }
            gate_rungs(&rungs, hi, opts, &mut manifest)?;
            let covered = rungs[0].covers(hi);
            let levels = rungs[0]
                .spectra
                .iter()
                .map(|s| window_levels(&s.levels, n_atoms, lo, hi))
                .collect::<Vec<_>>();
            (levels, !covered)
        }
        LevelSource::PoissonSurrogate => {
            manifest.note("level source: Poisson surrogate, no diagonalization");
            (poisson_surrogate(cfg, opts.seed, &sectors)?, false)
        }
    };
    manifest.time("levels", t);
    let mut out = OutputDir::create(&opts.out_dir)?;

    let t = Instant::now();
    let method = cfg.unfold_method();
    let mut unfolded = Vec::new();
    let mut per_sector = Vec::new();
    for (levels, sector) in sector_levels.iter().zip(&sectors) {
        let r = r_statistic(levels).with_context(|| format!("gap ratio, sector {sector}"))?;
        let mut u =
            unfold(levels, &method).with_context(|| format!("unfolding, sector {sector}"))?;
        u.window = Some((lo, hi));
        if (u.mean_spacing() - 1.0).abs() > 1e-6 {
            manifest.violations.push(format!(
                "sector {sector}: unfolded mean spacing {}",
                u.mean_spacing()
            ));
        }
        per_sector.push(SectorStats {
            sector: sector.label().into(),
            levels: levels.len(),
            r_mean: r.mean,
            r_std_error: r.std_error,
            n_degenerate: u.n_degenerate,
        });
        unfolded.push(u);
    }
    let sample = SpacingSample::pooled(unfolded.iter());
    let hist = spacing_distribution(&sample, cfg.stats.spacing_bins, cfg.stats.s_max)?;
    let mut spacing = DataTable::new(["s", "density", "wigner", "poisson", "count"]);
    for i in 0..hist.centers.len() {
        spacing.push(vec![
            hist.centers[i],
            hist.density[i],
            hist.wigner[i],
            hist.poisson[i],
            hist.counts[i] as f64,
        ]);
    }
    out.write_table("spacing.dat", &spacing.watermark(watermark))?;

    let refs: Vec<&UnfoldedSpectrum> = unfolded.iter().collect();
    let power =
        pooled_delta_power_spectrum(&refs, cfg.stats.segments, None).with_context(|| {
            format!(
                "power spectrum with {} segments per sector; lower stats.segments",
                cfg.stats.segments
            )
        })?;
    let slope = low_k_slope(&power, None)?;
    manifest.time("statistics", t);

    // GOE overlay with the same series length and enough segments per draw
    let t = Instant::now();
    let m = power.segment_len;
    let mut rc = cfg.reference_config(opts.seed);
    rc.ensemble = Ensemble::Goe;
    let per_segment = 3 * (m + 1) / 2;
    let needed = (per_segment as f64 / rc.window_fraction).ceil() as usize;
    rc.dim = rc.dim.max(needed);
    rc.n_segments = ((rc.dim as f64 * rc.window_fraction) as usize / per_segment).max(1);
    rc.common_len = Some(m);
    let goe = ensemble_reference(&rc)?;
    manifest.time("goe_reference", t);

    let mut table = DataTable::new(["k", "P_k", "P_k_std_error", "P_goe", "P_goe_std_error"]);
    for i in 0..power.values.len() {
        table.push(vec![
            power.frequencies[i] as f64,
            power.values[i],
            power.std_errors[i],
            goe.power.values[i],
            goe.power.std_errors[i],
        ]);
    }
    out.write_table("power.dat", &table.watermark(watermark))?;

    manifest.result("sectors", per_sector);
    manifest.result("spacings", sample.len());
    manifest.result("ks_wigner", sample.ks_distance(wigner_cdf));
    manifest.result("ks_poisson", sample.ks_distance(poisson_cdf));
    manifest.result("segment_len", m);
    manifest.result("segments", power.n_segments);
    manifest.result("fit_band_k_max", default_fit_band(m));
    manifest.result("slope", slope);
    manifest.result("goe_slope", goe.slope);
    manifest.result("goe_matrix_dim", rc.dim);
    manifest.result("goe_segments_per_draw", rc.n_segments);
    let manifest = out.finish(manifest)?;
    Ok(RunOutcome {
        manifest,
        out_dir: opts.out_dir.clone(),
    })
}

/// Random-matrix reference statistics on their own.
pub fn run_goe_reference(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<RunOutcome> {
    let mut manifest = Manifest::new("goe-ref", cfg, opts.seed, opts.allow_unconverged);
    let mut out = OutputDir::create(&opts.out_dir)?;
    let t = Instant::now();
    let rc = cfg.reference_config(opts.seed);
    let stats = ensemble_reference(&rc)?;
    manifest.time("sampling", t);

    let h = &stats.histogram;
    let mut spacing = DataTable::new(["s", "density", "wigner", "poisson", "count"]);
    for i in 0..h.centers.len() {
        spacing.push(vec![
            h.centers[i],
            h.density[i],
            h.wigner[i],
            h.poisson[i],
            h.counts[i] as f64,
        ]);
    }
    out.write_table("reference_spacing.dat", &spacing)?;
    let p = &stats.power;
    let mut power = DataTable::new(["k", "P_k", "P_k_std_error"]);
    for i in 0..p.values.len() {
        power.push(vec![p.frequencies[i] as f64, p.values[i], p.std_errors[i]]);
    }
    out.write_table("reference_power.dat", &power)?;

    manifest.result("ensemble", stats.ensemble.name());
    manifest.result("r_mean", stats.r_mean);
    manifest.result("r_std_error", stats.r_std_error);
    manifest.result("ks_wigner", stats.ks_wigner);
    manifest.result("ks_poisson", stats.ks_poisson);
    manifest.result("slope", stats.slope);
    manifest.result("segment_len", p.segment_len);
    manifest.result("segments", p.n_segments);
    let manifest = out.finish(manifest)?;
    Ok(RunOutcome {
        manifest,
        out_dir: opts.out_dir.clone(),
    })
}
