//! Command runners. Each returns a [`Table`] (or text for file formats) and
//! stamps the configuration into the metadata lines.

use std::fs;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use sparsegen_core::asymptotics::{
    concave_max, f_alpha_lambda, lambda_xy, min_split_inequality_check, pair_families, polar_exponents,
    random_coding_exponent, rle_exponents, threshold_closed_forms, threshold_constants,
};
use sparsegen_core::channel_models::{bms_transform_capped, Bms};
use sparsegen_core::code_builder::{
    bec_density_evolution, bms_bit_channels, select_frozen, union_bound_pe, CodeFile, CodeSpec, EncoderGraph, Mode,
};
use sparsegen_core::kernel_lab::{block_identity_kernel, identity_lower_kernel, sparsity_orders, Kernel};
use sparsegen_core::sc_decoders::{simulate, SimChannel};
use sparsegen_core::split_engine::{
    adrs_extra_uses, drs_gamma_closed, drs_matrix, drs_split, n_lub_from_lambda, n_lub_of, ratio_to_f64,
    simple_split_column, simple_split_gamma_tail, simple_split_matrix, SparseColumn, MAX_MATRIX_N,
};
use sparsegen_core::{Bms64, Profile64};

use crate::{
    ChannelAction, Cli, CliError, CodeArgs, Command, Design, ExponentArgs, Family, GammaAlgo, GammaArgs, IneqArgs,
    KernelAction, KernelArgs, Output, SimulateArgs, SplitAlgo, SplitArgs, Table, TablesArgs, WhichTable,
};

/// Largest n accepted by the γ sweep.
pub const MAX_GAMMA_N: usize = 60;

pub fn dispatch(cli: &Cli) -> Result<Output, CliError> {
    Ok(match &cli.command {
        Command::Kernel { action: KernelAction::Analyze(a) } => Output::Table(kernel_analyze(a)?),
        Command::Channel { action: ChannelAction::Z(a) } => Output::Table(channel_z(&a.channel, &a.path, a.cap)?),
        Command::Split(a) => split(a)?,
        Command::Gamma(a) => Output::Table(gamma(a)?),
        Command::Build(a) => Output::Text(build(&a.code)?.to_text()),
        Command::Simulate(a) => Output::Table(simulate_cmd(a, cli.seed)?),
        Command::Exponents(a) => Output::Table(exponents(a)?),
        Command::Thresholds => Output::Table(thresholds()),
        Command::VerifyIneq(a) => Output::Table(verify_ineq(a, cli.seed)),
        Command::Tables(a) => Output::Table(tables(a)?),
    })
}

fn stamp(command: &str) -> Table {
    Table::default().with_meta("tool", format!("sparsegen {}", env!("CARGO_PKG_VERSION"))).with_meta("command", command)
}

fn with_header(t: Table, header: &[&str]) -> Table {
    Table { header: header.iter().map(|s| s.to_string()).collect(), ..t }
}

fn cells<const N: usize>(v: [String; N]) -> Vec<String> {
    v.to_vec()
}

fn read(path: &std::path::Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Twelve significant digits.
pub fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

fn ratio_text(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_kernel(s: &str) -> Result<Kernel, CliError> {
    let size = |v: &str| v.parse::<usize>().map_err(|_| CliError::Input(format!("kernel `{s}`: bad size")));
    Ok(match s {
        "g2" => Kernel::g2(),
        "g3star" => Kernel::g3_star(),
        "g4star" => Kernel::g4_star(),
        "g3prime" => Kernel::g3_prime(),
        "g4prime" => Kernel::g4_prime(),
        _ => match s.split_once(':') {
            Some(("block", l)) => block_identity_kernel(size(l)?)?,
            Some(("idlower", l)) => identity_lower_kernel(size(l)?)?,
            Some(("file", p)) => Kernel::parse(&read(p.as_ref())?)?,
            _ => return Err(CliError::Input(format!("unknown kernel `{s}`"))),
        },
    })
}

/// `bec:`, `bsc:` or `file:` channel as a finite symmetric channel.
pub fn parse_bms(s: &str) -> Result<Bms64, CliError> {
    if let Some(p) = s.strip_prefix("file:") {
        return Ok(Bms::parse(&read(p.as_ref())?)?);
    }
    Ok(match SimChannel::parse(s)? {
        SimChannel::Bec(e) => Bms::from_bec(e)?,
        SimChannel::Bms(w) => w,
    })
}

const BUILTIN: [&str; 5] = ["g2", "g3star", "g4star", "g3prime", "g4prime"];

fn kernel_analyze(a: &KernelArgs) -> Result<Table, CliError> {
    let names: Vec<String> =
        if a.kernels.is_empty() { BUILTIN.iter().map(|s| s.to_string()).collect() } else { a.kernels.clone() };
    let mut t = with_header(
        stamp("kernel analyze").with_meta("delta", a.delta),
        &[
            "kernel",
            "l",
            "partial_distances",
            "e_of_g",
            "w_gm",
            "w_max",
            "lambda_gm_limit",
            "lambda_max_limit",
            "lambda_gm_upper",
            "lambda_max_upper",
        ],
    );
    for name in &names {
        let k = parse_kernel(name)?;
        let r = sparsity_orders(&k, a.delta)?;
        let d: Vec<String> = k.partial_distances().iter().map(u32::to_string).collect();
        t.push(cells([
            name.clone(),
            k.size().to_string(),
            d.join(" "),
            r.e_of_g.to_string(),
            r.w_gm.to_string(),
            r.w_max.to_string(),
            r.lambda_gm_limit.to_string(),
            r.lambda_max_limit.to_string(),
            r.lambda_gm_upper.to_string(),
            r.lambda_max_upper.to_string(),
        ]));
    }
    Ok(t)
}

pub fn tables(a: &TablesArgs) -> Result<Table, CliError> {
    let (name, kernels) = match a.which {
        WhichTable::MaxRate => ("max-rate", vec![("G2", Kernel::g2()), ("G3*", Kernel::g3_star()), ("G4*", Kernel::g4_star())]),
        WhichTable::SparseGm => ("sparse-gm", vec![("G3'", Kernel::g3_prime()), ("G4'", Kernel::g4_prime())]),
    };
    let mut t = with_header(
        stamp("tables").with_meta("which", name).with_meta("delta_prime", 0),
        &["kernel", "e_of_g", "lambda_gm", "lambda_max"],
    );
    for (label, k) in kernels {
        let r = sparsity_orders(&k, 0.0)?;
        t.push(cells([label.into(), r.e_of_g.to_string(), r.lambda_gm_limit.to_string(), r.lambda_max_limit.to_string()]));
    }
    Ok(t)
}

fn channel_z(channel: &str, path: &str, cap: usize) -> Result<Table, CliError> {
    let mut w = parse_bms(channel)?;
    let mut t = with_header(
        stamp("channel z").with_meta("channel", channel).with_meta("path", path).with_meta("cap", cap),
        &["path", "alphabet", "bhattacharyya", "capacity"],
    );
    let row = |p: &str, w: &Bms64| cells([p.to_string(), w.alphabet_size().to_string(), w.bhattacharyya().to_string(), w.capacity().to_string()]);
    t.push(row("", &w));
    for (i, c) in path.char_indices() {
        let pair = bms_transform_capped(&w, &w, cap)?;
        w = match c {
            '-' => pair.minus,
            '+' => pair.plus,
            _ => return Err(CliError::Input(format!("path character `{c}` is not - or +"))),
        }
        .merge_equivalent();
        t.push(row(&path[..i + c.len_utf8()], &w));
    }
    Ok(t)
}

fn split(a: &SplitArgs) -> Result<Output, CliError> {
    if a.n > MAX_MATRIX_N {
        return Err(sparsegen_core::Error::Capability(format!("n = {} exceeds the split limit of {MAX_MATRIX_N}", a.n)).into());
    }
    let run = |c: &SparseColumn| match a.algo {
        SplitAlgo::Simple => simple_split_column(c, a.w_ub),
        SplitAlgo::Drs => drs_split(c, a.w_ub),
    };
    let algo = match a.algo {
        SplitAlgo::Simple => "simple",
        SplitAlgo::Drs => "drs",
    };
    if a.matrix {
        let m = match a.algo {
            SplitAlgo::Simple => simple_split_matrix(a.n, a.w_ub)?,
            SplitAlgo::Drs => drs_matrix(a.n, a.w_ub)?,
        };
        return Ok(Output::Text(m.to_text()));
    }
    let base = stamp("split").with_meta("algo", algo).with_meta("n", a.n).with_meta("w_ub", a.w_ub);
    if let Some(c) = a.column {
        if c >= 1 << a.n {
            return Err(CliError::Input(format!("column {c} out of range for n = {}", a.n)));
        }
        let mut t = with_header(base.with_meta("column", c), &["piece", "weight", "support"]);
        for (i, p) in run(&SparseColumn::polar_column(a.n, c))?.iter().enumerate() {
            let s: Vec<String> = p.support().iter().map(usize::to_string).collect();
            t.push(cells([i.to_string(), p.weight().to_string(), s.join(" ")]));
        }
        return Ok(Output::Table(t));
    }
    let mut rows = Vec::with_capacity(1 << a.n);
    let mut total = 0usize;
    for c in 0..1usize << a.n {
        let col = SparseColumn::polar_column(a.n, c);
        let pieces = run(&col)?.len();
        total += pieces;
        rows.push(cells([c.to_string(), col.weight().to_string(), pieces.to_string()]));
    }
    let gamma = BigRational::new((total - (1 << a.n)).into(), (1usize << a.n).into());
    let mut t = with_header(base.with_meta("pieces", total).with_meta("gamma", ratio_text(&gamma)), &["column", "weight", "pieces"]);
    t.rows = rows;
    Ok(Output::Table(t))
}

pub fn gamma(a: &GammaArgs) -> Result<Table, CliError> {
    let n_max = a.n_max.unwrap_or(a.n_min);
    if n_max > MAX_GAMMA_N {
        return Err(sparsegen_core::Error::Capability(format!("n = {n_max} exceeds the sweep limit of {MAX_GAMMA_N}")).into());
    }
    if a.lambda.is_empty() == a.w_ub.is_empty() {
        return Err(CliError::Input("give exactly one of --lambda or --w-ub".into()));
    }
    let algo = match a.algo {
        GammaAlgo::Simple => "simple",
        GammaAlgo::Drs => "drs",
        GammaAlgo::Adrs => "adrs",
    };
    let mut t = with_header(
        stamp("gamma").with_meta("algo", algo).with_meta("n_min", a.n_min).with_meta("n_max", n_max),
        &["algo", "n", "lambda", "n_lub", "w_ub", "gamma", "gamma_exact"],
    );
    for n in a.n_min..=n_max {
        let mut points: Vec<(String, BigUint)> = Vec::new();
        for &l in &a.lambda {
            if !(0.0..=1.0).contains(&l) {
                return Err(CliError::Input(format!("λ = {l} outside [0, 1]")));
            }
            points.push((l.to_string(), BigUint::one() << n_lub_from_lambda(n, l)));
        }
        for &w in &a.w_ub {
            points.push((String::new(), BigUint::from(w)));
        }
        for (lambda, w) in points {
            let n_lub = n_lub_of(&w)?;
            let g = match a.algo {
                GammaAlgo::Simple => simple_split_gamma_tail(n, &w)?,
                GammaAlgo::Drs => drs_gamma_closed(n, n_lub.min(n)),
                GammaAlgo::Adrs => BigRational::new(adrs_extra_uses(n, n_lub).into(), (BigUint::one() << n).into()),
            };
            t.push(cells([
                algo.into(),
                n.to_string(),
                lambda,
                n_lub.to_string(),
                w.to_string(),
                sig12(ratio_to_f64(&g)),
                ratio_text(&g),
            ]));
        }
    }
    Ok(t)
}

fn design_profile(g: &EncoderGraph, ch: &SimChannel, design: Design, cap: usize) -> Result<Profile64, CliError> {
    Ok(match (ch, design) {
        (SimChannel::Bec(e), _) => bec_density_evolution(g, *e)?,
        (SimChannel::Bms(w), Design::Exact) => bms_bit_channels(g, w, cap)?,
        (SimChannel::Bms(w), Design::Auto | Design::Bound) => bec_density_evolution(g, w.bhattacharyya())?,
    })
}

/// Builds a code from inline options: frozen set from the design
/// channel's bit-channel profile, union bound from the same profile.
pub fn build(a: &CodeArgs) -> Result<CodeFile, CliError> {
    let n = a.n.ok_or_else(|| CliError::Input("--n is required".into()))?;
    if n > sparsegen_core::code_builder::MAX_GRAPH_N {
        return Err(sparsegen_core::Error::Capability(format!("n = {n} exceeds the graph limit")).into());
    }
    let mode = Mode::parse(&a.mode)?;
    let w_ub = match (a.w_ub, a.lambda) {
        (Some(w), _) => w,
        (None, Some(l)) => 1u64 << n_lub_from_lambda(n, l),
        (None, None) => 1u64 << n,
    };
    let k = match (a.k, a.rate) {
        (Some(k), _) => k,
        (None, Some(r)) if (0.0..=1.0).contains(&r) => (r * (1u64 << n) as f64).round() as usize,
        (None, Some(r)) => return Err(CliError::Input(format!("rate {r} outside [0, 1]"))),
        (None, None) => return Err(CliError::Input("give --k or --rate".into())),
    };
    let channel = a.design_channel.clone().unwrap_or_else(|| "bec:0.5".into());
    let ch = SimChannel::parse(&channel)?;
    let mut spec = CodeSpec::new(n, w_ub, mode, vec![true; 1 << n])?;
    spec.log2_n_prime = a.log2_n_prime;
    let g = spec.graph()?;
    let profile = design_profile(&g, &ch, a.design, a.cap)?;
    spec.frozen = select_frozen(&profile, k)?;
    let union_bound_log2 = union_bound_pe(&profile, &spec.frozen, spec.log2_n_prime)?;
    let slots = spec.slot_count()?;
    Ok(CodeFile { spec, channel, slots, union_bound_log2 })
}

pub fn simulate_cmd(a: &SimulateArgs, seed: u64) -> Result<Table, CliError> {
    let (code, design) = match &a.code_file {
        Some(p) => (CodeFile::parse(&read(p)?)?, Design::Auto),
        None => (build(&a.code)?, a.code.design),
    };
    let spec = &code.spec;
    let g = spec.graph()?;
    let channels = if a.channels.is_empty() { vec![code.channel.clone()] } else { a.channels.clone() };
    let mut t = with_header(
        stamp("simulate")
            .with_meta("seed", seed)
            .with_meta("trials", a.trials)
            .with_meta("mode", spec.mode)
            .with_meta("n", spec.n)
            .with_meta("k", spec.k())
            .with_meta("w_ub", spec.w_ub)
            .with_meta("design_channel", &code.channel),
        &[
            "mode",
            "n",
            "k",
            "rate",
            "slots",
            "channel",
            "trials",
            "failures",
            "fer",
            "wilson_lo",
            "wilson_hi",
            "union_bound_log2",
            "union_bound",
        ],
    );
    if a.trials == 0 {
        return Ok(t);
    }
    for name in channels {
        let ch = SimChannel::parse(&name)?;
        let profile = design_profile(&g, &ch, design, a.code.cap)?;
        let ub = union_bound_pe(&profile, &spec.frozen, spec.log2_n_prime)?;
        let r = simulate(spec, &g, &ch, a.trials, seed)?;
        t.push(cells([
            spec.mode.to_string(),
            spec.n.to_string(),
            spec.k().to_string(),
            spec.rate().to_string(),
            code.slots.to_string(),
            name,
            r.trials.to_string(),
            r.failures.to_string(),
            r.rate.to_string(),
            r.wilson_lo.to_string(),
            r.wilson_hi.to_string(),
            ub.to_string(),
            ub.exp2().to_string(),
        ]));
    }
    Ok(t)
}

pub fn exponents(a: &ExponentArgs) -> Result<Table, CliError> {
    if a.points == 0 {
        return Err(CliError::Input("--points must be positive".into()));
    }
    let grid = |hi: f64| -> Vec<f64> { (1..=a.points).map(|i| hi * i as f64 / (a.points + 1) as f64).collect() };
    let base = stamp("exponents").with_meta("points", a.points);
    Ok(match a.family {
        Family::Polar => {
            let mut t = with_header(base.with_meta("family", "polar").with_meta("mu", a.mu), &["lambda", "mu", "exp_gap", "exp_comp", "exp_wcol"]);
            for l in grid(1.0 / (1.0 + a.mu)) {
                let p = polar_exponents(l, a.mu)?;
                t.push(cells([l.to_string(), a.mu.to_string(), p.exp_gap.to_string(), p.exp_comp.to_string(), p.exp_wcol.to_string()]));
            }
            t
        }
        Family::Rle => {
            let mut t = with_header(base.with_meta("family", "rle"), &["alpha", "exp_gap", "exp_comp", "exp_wcol"]);
            for al in grid(0.5) {
                let p = rle_exponents(al)?;
                t.push(cells([al.to_string(), p.exp_gap.to_string(), p.exp_comp.to_string(), p.exp_wcol.to_string()]));
            }
            t
        }
        Family::Paired => {
            let mut t = with_header(
                base.with_meta("family", "paired").with_meta("mu", a.mu),
                &["lambda", "alpha", "exp_gap", "rle_exp_comp", "rle_exp_wcol", "polar_exp_comp", "polar_exp_wcol"],
            );
            for r in pair_families(&grid(1.0 / (1.0 + a.mu)), a.mu)? {
                t.push(cells([
                    r.lambda.to_string(),
                    r.alpha.to_string(),
                    r.exp_gap.to_string(),
                    r.rle.exp_comp.to_string(),
                    r.rle.exp_wcol.to_string(),
                    r.polar.exp_comp.to_string(),
                    r.polar.exp_wcol.to_string(),
                ]));
            }
            t
        }
        Family::RandomCoding => {
            let w = parse_bms(&a.channel)?;
            let cap = w.capacity() * std::f64::consts::LN_2;
            let mut t = with_header(
                base.with_meta("family", "random-coding").with_meta("channel", &a.channel).with_meta("capacity_nats", cap),
                &["rate_nats", "exponent", "rho", "above_capacity"],
            );
            for i in 0..=a.points {
                let r = cap * i as f64 / a.points as f64;
                let e = random_coding_exponent(&w, r)?;
                t.push(cells([r.to_string(), e.exponent.to_string(), e.rho.to_string(), e.above_capacity.to_string()]));
            }
            t
        }
    })
}

pub fn thresholds() -> Table {
    let got = threshold_constants();
    let want = threshold_closed_forms();
    let (a_eps, _) = concave_max(|a| lambda_xy(0.0, a).unwrap_or(f64::NEG_INFINITY), 0.0, 0.5);
    let (a_lam, _) = concave_max(|a| f_alpha_lambda(a, 0.0), 0.0, 1.0);
    let mut t = with_header(stamp("thresholds"), &["name", "computed", "closed_form", "abs_error", "argmax", "argmax_closed_form"]);
    let rows = [
        ("eps_star", got.eps_star, want.eps_star, Some((a_eps, 1.0 / 6.0))),
        ("lambda_star", got.lambda_star, want.lambda_star, Some((a_lam, 2.0 / 3.0))),
        ("lambda_dagger", got.lambda_dagger, want.lambda_dagger, None),
    ];
    for (name, g, w, arg) in rows {
        let (a, b) = arg.map_or((String::new(), String::new()), |(a, b)| (a.to_string(), b.to_string()));
        t.push(cells([name.into(), g.to_string(), w.to_string(), (g - w).abs().to_string(), a, b]));
    }
    t
}

pub fn verify_ineq(a: &IneqArgs, seed: u64) -> Table {
    let r = min_split_inequality_check(a.samples, seed as u32);
    let mut t = with_header(
        stamp("verify-ineq").with_meta("seed", seed).with_meta("samples", a.samples),
        &["points", "corners", "violations", "max_excess", "worst"],
    );
    let worst: Vec<String> = r.worst.iter().map(f64::to_string).collect();
    t.push(cells([r.points.to_string(), r.corners.to_string(), r.violations.to_string(), r.max_excess.to_string(), worst.join(" ")]));
    t
}
