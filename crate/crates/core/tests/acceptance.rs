//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails.

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{corpus, golden_min, max_diff, CORPUS_SEED};
use num_complex::Complex;
use spectral_walk::dynamics::{classical_propagator, quantum_amplitude, quantum_propagator, time_grid};
use spectral_walk::families::{
    meixner_chain, pst_demo_chain, uniform_chain, MeixnerFamily, ScVariant, StieltjesCarlitzFamily,
    TailRule, UniformMode, DEFAULT_SITES,
};
use spectral_walk::jacobi::{generator, pi_coefficients, Boundary};
use spectral_walk::oracle::{expm_generator, unitary_propagator};
use spectral_walk::returns::{
    classify, detect_lattice, modified_measure, return_probability_scan, CharacteristicFunction,
    LatticeOptions, ReturnClass,
};
use spectral_walk::special::jinc;
use spectral_walk::AmplitudeSeries;

type Check = fn() -> Result<String, String>;

const ORACLE_TIMES: [f64; 5] = [0.1, 0.5, 1.0, 2.0, 5.0];

fn within(limit: Duration, start: Instant) -> Result<Duration, String> {
    let elapsed = start.elapsed();
    if elapsed > limit {
        Err(format!("took {:.2} s, limit {:.0} s", elapsed.as_secs_f64(), limit.as_secs_f64()))
    } else {
        Ok(elapsed)
    }
}

fn classical_oracle() -> Result<String, String> {
    let start = Instant::now();
    let chains = corpus(CORPUS_SEED, 50);
    let mut worst = 0.0f64;
    for c in &chains {
        let a = generator(&c.rates, c.n, Boundary::Reflecting).map_err(|e| e.to_string())?;
        for t in ORACLE_TIMES {
            let p = classical_propagator(&c.chain, &c.rates, t).map_err(|e| e.to_string())?;
            let e = expm_generator(&a, t).map_err(|e| e.to_string())?;
            worst = worst.max(max_diff(&p, &e));
        }
    }
    let elapsed = within(Duration::from_secs(5), start)?;
    let msg = format!("max |P_ij - exp(tA)_ij| = {worst:.2e} over 50 chains ({:.2} s)", elapsed.as_secs_f64());
    if worst <= 1e-10 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn quantum_oracle() -> Result<String, String> {
    let start = Instant::now();
    let chains = corpus(CORPUS_SEED, 50);
    let mut worst = 0.0f64;
    for c in &chains {
        for t in ORACLE_TIMES {
            let f = quantum_propagator(&c.chain, t).map_err(|e| e.to_string())?;
            let u = unitary_propagator(&c.jacobi, t).map_err(|e| e.to_string())?;
            for (i, row) in f.iter().enumerate() {
                for (j, z) in row.iter().enumerate() {
                    worst = worst.max((z - u[(i, j)]).norm());
                }
            }
        }
    }
    let elapsed = within(Duration::from_secs(5), start)?;
    let msg = format!("max |f_ij - exp(-iJt)_ij| = {worst:.2e} over 50 chains ({:.2} s)", elapsed.as_secs_f64());
    if worst <= 1e-10 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn uniform_bessel() -> Result<String, String> {
    let order = spectral_walk::families::DEFAULT_QUADRATURE_ORDER;
    let cont = uniform_chain::<f64>(UniformMode::Continuous { order, sites: 2 }).map_err(|e| e.to_string())?;
    let times = time_grid(0.0, 30.0, 3001).map_err(|e| e.to_string())?;
    let f = quantum_amplitude(&cont.chain, 0, 0, &times).map_err(|e| e.to_string())?;
    let bessel_err = times
        .iter()
        .zip(&f.values)
        .map(|(&t, z)| (z - Complex::new(jinc(t), 0.0)).norm())
        .fold(0.0, f64::max);

    let re = |t: f64| quantum_amplitude(&cont.chain, 0, 0, &[t]).unwrap().values[0].re;
    let t1 = golden_min(re, 4.0, 6.0, 1e-9);
    let f1 = re(t1).abs();

    let trunc = uniform_chain::<f64>(UniformMode::Truncated { n: 200 }).map_err(|e| e.to_string())?;
    let short = time_grid(0.0, 20.0, 2001).map_err(|e| e.to_string())?;
    let ft = quantum_amplitude(&trunc.chain, 0, 0, &short).map_err(|e| e.to_string())?;
    let fc = quantum_amplitude(&cont.chain, 0, 0, &short).map_err(|e| e.to_string())?;
    let trunc_err = ft.values.iter().zip(&fc.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);

    let msg = format!(
        "|f00 - 2J1(t)/t| <= {bessel_err:.2e} on [0, 30]; first minimum t1 = {t1:.6}, |f00(t1)| = {f1:.6}; \
         N=200 vs continuous <= {trunc_err:.2e} on [0, 20]"
    );
    let ok = bessel_err <= 1e-8
        && (t1 - 5.14).abs() <= 0.02
        && (f1 - 0.13).abs() <= 0.01
        && trunc_err <= 1e-6;
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn meixner_closed_form() -> Result<String, String> {
    let mut parts = Vec::new();
    let mut ok = true;
    let times = time_grid(0.0, 4.0 * PI, 801).map_err(|e| e.to_string())?;
    for (beta, c) in [(1.0, 0.25), (2.5, 0.5), (0.5, 0.8)] {
        let fam = MeixnerFamily::new(beta, c).map_err(|e| e.to_string())?;
        let fc = fam.chain(DEFAULT_SITES, &TailRule::default()).map_err(|e| e.to_string())?;
        let cf = CharacteristicFunction::new(fc.measure()).map_err(|e| e.to_string())?;
        let err = times
            .iter()
            .map(|&t| (cf.return_amplitude(t) - fam.return_amplitude(t)).norm())
            .fold(0.0, f64::max);
        let tail = fc.measure().tail_mass();
        let ret = quantum_amplitude(&fc.chain, 0, 0, &[2.0 * PI]).map_err(|e| e.to_string())?.values[0].norm();
        ok &= err <= 1e-10 + tail && ret >= 1.0 - 1e-8;
        parts.push(format!("(β={beta}, c={c}): err {err:.1e}, tail {tail:.1e}, |f00(2π)| = {ret:.12}"));
    }
    let msg = parts.join("; ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn stieltjes_carlitz() -> Result<String, String> {
    let mut parts = Vec::new();
    let mut ok = true;
    for k in [0.3, 0.7] {
        for variant in [ScVariant::C, ScVariant::D] {
            let fam = StieltjesCarlitzFamily::new(variant, k).map_err(|e| e.to_string())?;
            let fc = fam.chain(DEFAULT_SITES, &TailRule::default()).map_err(|e| e.to_string())?;
            let verdict = detect_lattice(fc.measure(), &LatticeOptions::default()).map_err(|e| e.to_string())?;
            let t0 = verdict.t0.ok_or("no period detected")?;
            let at_t0 = quantum_amplitude(&fc.chain, 0, 0, &[t0]).map_err(|e| e.to_string())?.values[0].norm();
            let omega = fam.fitted_omega(fc.measure()).map_err(|e| e.to_string())?;
            let big_k = fam.context.big_k;
            let period = match variant {
                ScVariant::C => 4.0 * big_k / omega,
                ScVariant::D => 2.0 * big_k / omega,
            };
            let times = time_grid(0.0, period, 2001).map_err(|e| e.to_string())?;
            let f = quantum_amplitude(&fc.chain, 0, 0, &times).map_err(|e| e.to_string())?;
            let model_err = times
                .iter()
                .zip(&f.values)
                .map(|(&t, z)| (z - Complex::new(fam.model_amplitude(omega, t), 0.0)).norm())
                .fold(0.0, f64::max);
            ok &= at_t0 >= 1.0 - 1e-8 && model_err <= 1e-8;
            let name = match variant {
                ScVariant::C => "C",
                ScVariant::D => "D",
            };
            let shape = match variant {
                ScVariant::C => {
                    // zeros of cn(ωt) at t = (2n+1)K/ω
                    let zeros: Vec<f64> = (0..8).map(|n| (2 * n + 1) as f64 * big_k / omega).collect();
                    let fz = quantum_amplitude(&fc.chain, 0, 0, &zeros).map_err(|e| e.to_string())?;
                    let worst = fz.values.iter().map(|z| z.norm()).fold(0.0, f64::max);
                    ok &= worst <= 1e-6;
                    format!("max |f00| on zero lattice {worst:.1e}")
                }
                ScVariant::D => {
                    let min = f.values.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
                    let kp = fam.context.k_prime;
                    ok &= min >= kp - 1e-6;
                    format!("min |f00| {min:.9} vs k' {kp:.9}")
                }
            };
            parts.push(format!(
                "{name} k={k}: t0 = {t0:.9}, |f00(t0)| = {at_t0:.12}, ω = {omega:.12}, model err {model_err:.1e}, {shape}"
            ));
        }
    }
    let msg = parts.join("; ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn return_classifier() -> Result<String, String> {
    let opts = LatticeOptions::default();
    let mut problems = Vec::new();

    let meixner = meixner_chain(1.0, 0.25, DEFAULT_SITES).map_err(|e| e.to_string())?;
    let v = classify(meixner.measure(), meixner.declared_kind, &opts).map_err(|e| e.to_string())?;
    let t0 = v.t0.unwrap_or(f64::NAN);
    if v.class != ReturnClass::Perfect || !((t0 - 2.0 * PI).abs() <= 1e-9) {
        problems.push(format!("meixner: {:?} t0 = {t0}", v.class));
    }
    for variant in [ScVariant::C, ScVariant::D] {
        for k in [0.3, 0.7] {
            let fc = StieltjesCarlitzFamily::new(variant, k)
                .and_then(|f| f.chain(DEFAULT_SITES, &TailRule::default()))
                .map_err(|e| e.to_string())?;
            let v = classify(fc.measure(), fc.declared_kind, &opts).map_err(|e| e.to_string())?;
            if v.class != ReturnClass::Perfect {
                problems.push(format!("{variant:?} k={k}: {:?}", v.class));
            }
        }
    }
    for mode in [
        UniformMode::Continuous { order: 256, sites: 2 },
        UniformMode::Truncated { n: 200 },
    ] {
        let fc = uniform_chain::<f64>(mode).map_err(|e| e.to_string())?;
        let v = classify(fc.measure(), fc.declared_kind, &opts).map_err(|e| e.to_string())?;
        if v.class != ReturnClass::NoReturn {
            problems.push(format!("uniform {mode:?}: {:?}", v.class));
        }
    }
    let random = corpus(CORPUS_SEED ^ 0xa5a5, 20);
    let mut almost = 0;
    for c in &random {
        let v = classify(c.chain.measure(), spectral_walk::MeasureKind::Discrete, &opts).map_err(|e| e.to_string())?;
        match v.class {
            ReturnClass::AlmostPerfect => almost += 1,
            other => problems.push(format!("random N={}: {other:?}", c.n)),
        }
    }
    let msg = format!(
        "meixner Perfect t0 = {t0:.12}; SC-C/SC-D Perfect; uniform NoReturn; random {almost}/20 AlmostPerfect"
    );
    if problems.is_empty() {
        Ok(msg)
    } else {
        Err(format!("{msg}; problems: {}", problems.join(", ")))
    }
}

fn invariant_suite() -> Result<String, String> {
    let start = Instant::now();
    let chains = corpus(CORPUS_SEED, 50);
    let times = [0.0, 0.3, 1.0, 2.5, 7.0];
    let (mut unitarity, mut stochastic, mut balance, mut symmetry) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let (mut semigroup, mut ortho, mut moments, mut modified, mut modified_amp) =
        (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut worst_order = f64::INFINITY;
    for c in &chains {
        let n = c.n;
        let pi = pi_coefficients(&c.rates, n).map_err(|e| e.to_string())?;
        for &t in &times {
            let f = quantum_propagator(&c.chain, t).map_err(|e| e.to_string())?;
            for row in &f {
                let s: f64 = row.iter().map(|z| z.norm_sqr()).sum();
                unitarity = unitarity.max((s - 1.0).abs());
            }
            let p = classical_propagator(&c.chain, &c.rates, t).map_err(|e| e.to_string())?;
            for (i, row) in p.iter().enumerate() {
                let s: f64 = row.iter().sum();
                stochastic = stochastic.max((s - 1.0).abs());
                for j in 0..=n {
                    let scale = pi.value(i).max(pi.value(j));
                    let d = (pi.value(i) * p[i][j] - pi.value(j) * p[j][i]).abs() / scale;
                    balance = balance.max(d);
                }
            }
        }
        for i in 0..=n.min(4) {
            for j in 0..=n.min(4) {
                let a = quantum_amplitude(&c.chain, i, j, &times).map_err(|e| e.to_string())?;
                let b = quantum_amplitude(&c.chain, j, i, &times).map_err(|e| e.to_string())?;
                for (x, y) in a.values.iter().zip(&b.values) {
                    symmetry = symmetry.max((x - y).norm());
                }
            }
        }
        let (s, t) = (0.7, 1.9);
        let ps = common::dense(&classical_propagator(&c.chain, &c.rates, s).map_err(|e| e.to_string())?);
        let pt = common::dense(&classical_propagator(&c.chain, &c.rates, t).map_err(|e| e.to_string())?);
        let pst = classical_propagator(&c.chain, &c.rates, s + t).map_err(|e| e.to_string())?;
        semigroup = semigroup.max(max_diff(&pst, &(ps * pt)));

        let gram = c.chain.gram(n).map_err(|e| e.to_string())?;
        for (i, row) in gram.iter().enumerate() {
            for (j, &g) in row.iter().enumerate() {
                let delta = if i == j { 1.0 } else { 0.0 };
                ortho = ortho.max((g - delta).abs());
            }
        }
        let dense_j = common::dense(&c.jacobi.to_dense());
        let mut power = nalgebra::DMatrix::<f64>::identity(n + 1, n + 1);
        for k in 0..=6 {
            moments = moments.max((c.chain.measure().moment(k) - power[(0, 0)]).abs());
            power = &power * &dense_j;
        }
        for i in 0..=n.min(5) {
            let mi = modified_measure(c.chain.measure(), &c.jacobi, i).map_err(|e| e.to_string())?;
            modified = modified.max((mi.total_mass() - 1.0).abs());
            let cf = CharacteristicFunction::new(&mi).map_err(|e| e.to_string())?;
            let direct = quantum_amplitude(&c.chain, i, i, &times).map_err(|e| e.to_string())?;
            for (&t, z) in times.iter().zip(&direct.values) {
                modified_amp = modified_amp.max((cf.return_amplitude(t) - z).norm());
            }
        }
        worst_order = worst_order.min(schrodinger_order(c).map_err(|e| e.to_string())?);
    }
    let elapsed = within(Duration::from_secs(30), start)?;
    let checks = [
        ("unitarity", unitarity, 1e-10),
        ("stochasticity", stochastic, 1e-10),
        ("detailed balance", balance, 1e-10),
        ("symmetry", symmetry, 1e-12),
        ("semigroup", semigroup, 1e-9),
        ("orthonormality", ortho, 1e-10),
        ("moments", moments, 1e-9),
        ("modified mass", modified, 1e-12),
        ("modified amplitude", modified_amp, 1e-11),
    ];
    let mut parts: Vec<String> = checks.iter().map(|(n, v, _)| format!("{n} {v:.1e}")).collect();
    parts.push(format!("Schrodinger order {worst_order:.3}"));
    let msg = format!("{} ({:.2} s)", parts.join(", "), elapsed.as_secs_f64());
    if checks.iter().all(|&(_, v, tol)| v <= tol) && worst_order >= 1.9 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// Observed order of the centred difference of `f(t)` against `−i f J`.
fn schrodinger_order(c: &common::RandomChain) -> spectral_walk::Result<f64> {
    let t = 1.3;
    let exact = {
        let f = quantum_propagator(&c.chain, t)?;
        let j = c.jacobi.to_dense();
        let n = f.len();
        (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        let s: Complex<f64> = (0..n).map(|k| f[a][k] * j[k][b]).sum();
                        s * Complex::new(0.0, -1.0)
                    })
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>()
    };
    let error = |h: f64| -> spectral_walk::Result<f64> {
        let plus = quantum_propagator(&c.chain, t + h)?;
        let minus = quantum_propagator(&c.chain, t - h)?;
        let mut worst = 0.0f64;
        for a in 0..plus.len() {
            for b in 0..plus.len() {
                let d = (plus[a][b] - minus[a][b]) / (2.0 * h);
                worst = worst.max((d - exact[a][b]).norm());
            }
        }
        Ok(worst)
    };
    let (e1, e2) = (error(2e-2)?, error(1e-2)?);
    Ok((e1 / e2).log2())
}

fn pst_demo() -> Result<String, String> {
    let fc = pst_demo_chain::<f64>(9).map_err(|e| e.to_string())?;
    let pts = fc.measure().points();
    let spacing_err = pts
        .iter()
        .enumerate()
        .map(|(s, &x)| (x - pts[0] - s as f64).abs())
        .fold(0.0, f64::max);
    let times = time_grid(0.0, 2.0 * PI, 2001).map_err(|e| e.to_string())?;
    let f0n: AmplitudeSeries<f64> = quantum_amplitude(&fc.chain, 0, 9, &times).map_err(|e| e.to_string())?;
    let peak = return_probability_scan(&f0n).map_err(|e| e.to_string())?[0];
    let big_t = peak.t;
    let transfer = quantum_amplitude(&fc.chain, 0, 9, &[big_t]).map_err(|e| e.to_string())?.values[0].norm();
    let back = quantum_amplitude(&fc.chain, 0, 0, &[2.0 * big_t]).map_err(|e| e.to_string())?.values[0].norm();
    let msg = format!(
        "spectrum spacing error {spacing_err:.1e}; T = {big_t:.9}, |f_0,9(T)| = {transfer:.12}, |f00(2T)| = {back:.12}"
    );
    if pts.len() == 10 && spacing_err <= 1e-10 && transfer >= 1.0 - 1e-8 && back >= 1.0 - 1e-8 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 8] = [
        ("classical transition matches exp(tA)", classical_oracle),
        ("quantum amplitude matches exp(-iJt)", quantum_oracle),
        ("uniform chain Bessel law", uniform_bessel),
        ("Meixner characteristic function and 2pi return", meixner_closed_form),
        ("Stieltjes-Carlitz cn/dn amplitudes", stieltjes_carlitz),
        ("return classifier", return_classifier),
        ("invariant suite", invariant_suite),
        ("perfect transfer chain", pst_demo),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {} PASS {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {detail}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
