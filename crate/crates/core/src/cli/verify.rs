//! Identity suites behind `multiphoton verify`.
//!
//! Each suite checks one family of identities at a quick or full scale and
//! reports every failing case with its indices, parameter, expected value,
//! computed value and tolerance.

use std::fmt::Display;
use std::time::Instant;

use clap::ValueEnum;
use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::amplitudes::{bs_amplitude_convolution, bs_amplitude_direct, tms_amplitude};
use crate::asymptotics::convergence_report;
use crate::genfun::{
    check_energy_scaling, diagonal_series, eval_f_bs, eval_f_tms, eval_g_bs, eval_g_tms, f_bs_w1_series, g_bs_series,
    GenFunPoint,
};
use crate::numerics::ExactRational;
use crate::parallel::{self, Execution};
use crate::params::{BeamSplitterParam, Device, DeviceParam, PhotonConfig, SqueezerParam};
use crate::probabilities::{bs_prob_exact, normalization_residual, tms_prob, tms_prob_exact};
use crate::recurrences::{
    bs_diagonal_recurrence, bs_recurrence_check, bs_table_convolution, bs_table_direct, bs_table_exact,
    bs_table_recurrence, tms_recurrence_check, tms_table_direct, tms_table_exact, tms_table_recurrence,
    ClassicalTable,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Normalization,
    RecurrenceBs,
    RecurrenceTms,
    Ptr,
    Hom,
    Energy,
    GenfunSeries,
    Classical,
    Asymptotics,
    All,
}

impl Suite {
    pub const EACH: [Suite; 9] = [
        Suite::Normalization,
        Suite::RecurrenceBs,
        Suite::RecurrenceTms,
        Suite::Ptr,
        Suite::Hom,
        Suite::Energy,
        Suite::GenfunSeries,
        Suite::Classical,
        Suite::Asymptotics,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Normalization => "normalization",
            Suite::RecurrenceBs => "recurrence-bs",
            Suite::RecurrenceTms => "recurrence-tms",
            Suite::Ptr => "ptr",
            Suite::Hom => "hom",
            Suite::Energy => "energy",
            Suite::GenfunSeries => "genfun-series",
            Suite::Classical => "classical",
            Suite::Asymptotics => "asymptotics",
            Suite::All => "all",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Scale {
    Quick,
    Full,
}

impl Scale {
    fn pick(self, quick: usize, full: usize) -> usize {
        match self {
            Scale::Quick => quick,
            Scale::Full => full,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub suite: &'static str,
    pub indices: String,
    pub parameter: String,
    pub expected: String,
    pub got: String,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationResult {
    pub suite: String,
    pub cases: usize,
    pub failures: Vec<Failure>,
    pub seconds: f64,
}

struct Recorder {
    suite: &'static str,
    tolerance_scale: f64,
    cases: usize,
    failures: Vec<Failure>,
}

impl Recorder {
    fn new(suite: &'static str, tolerance_scale: f64) -> Self {
        Self { suite, tolerance_scale, cases: 0, failures: Vec::new() }
    }

    fn record(&mut self, ok: bool, indices: impl FnOnce() -> String, parameter: &dyn Display, expected: String, got: String, tolerance: f64) {
        self.cases += 1;
        if !ok {
            self.failures.push(Failure {
                suite: self.suite,
                indices: indices(),
                parameter: parameter.to_string(),
                expected,
                got,
                tolerance,
            });
        }
    }

    fn near(&mut self, indices: impl FnOnce() -> String, parameter: &dyn Display, expected: f64, got: f64, tolerance: f64) {
        let tolerance = tolerance * self.tolerance_scale;
        let ok = (expected - got).abs() <= tolerance;
        self.record(ok, indices, parameter, expected.to_string(), got.to_string(), tolerance);
    }

    fn equal(&mut self, indices: impl FnOnce() -> String, parameter: &dyn Display, expected: &ExactRational, got: &ExactRational) {
        self.record(expected == got, indices, parameter, expected.to_string(), got.to_string(), 0.0);
    }

    fn holds(&mut self, ok: bool, indices: impl FnOnce() -> String, parameter: &dyn Display, what: &str) {
        self.record(ok, indices, parameter, what.to_string(), if ok { what.to_string() } else { format!("not {what}") }, 0.0);
    }

    /// Unwrap a library result, recording an error as a failed case.
    fn ok<T>(&mut self, indices: impl FnOnce() -> String, parameter: &dyn Display, r: crate::Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.record(false, indices, parameter, "a value".into(), e.to_string(), 0.0);
                None
            }
        }
    }

    fn merge(&mut self, other: Recorder) {
        self.cases += other.cases;
        self.failures.extend(other.failures);
    }

    /// Run `f` on each item in parallel with a private recorder per item.
    fn each<I: Sync>(&mut self, items: &[I], f: impl Fn(&I, &mut Recorder) + Sync + Send) {
        let (suite, scale) = (self.suite, self.tolerance_scale);
        let parts = parallel::map(Execution::default(), items, |item| {
            let mut r = Recorder::new(suite, scale);
            f(item, &mut r);
            r
        });
        for p in parts {
            self.merge(p);
        }
    }
}

fn q(s: &str) -> ExactRational {
    s.parse().expect("literal rational")
}

fn bs(eta: f64) -> BeamSplitterParam {
    BeamSplitterParam::new(eta).expect("valid transmittance")
}

fn tms(lambda: f64) -> SqueezerParam {
    SqueezerParam::new(lambda).expect("valid squeezing")
}

fn pairs(imax: usize, kmax: usize) -> Vec<(usize, usize)> {
    (0..=imax).flat_map(|i| (0..=kmax).map(move |k| (i, k))).collect()
}

/// Run one suite, or every suite for [`Suite::All`].
pub fn run_suite(suite: Suite, scale: Scale) -> VerificationResult {
    run_suite_with(suite, scale, 1.0)
}

/// [`run_suite`] with every floating-point tolerance multiplied by
/// `tolerance_scale`; exact comparisons are unaffected.
pub fn run_suite_with(suite: Suite, scale: Scale, tolerance_scale: f64) -> VerificationResult {
    let started = Instant::now();
    let mut rec = Recorder::new(suite.name(), tolerance_scale);
    let chosen: Vec<Suite> = if suite == Suite::All { Suite::EACH.to_vec() } else { vec![suite] };
    for s in chosen {
        let mut part = Recorder::new(s.name(), tolerance_scale);
        match s {
            Suite::Normalization => normalization(&mut part, scale),
            Suite::RecurrenceBs => recurrence_bs(&mut part, scale),
            Suite::RecurrenceTms => recurrence_tms(&mut part, scale),
            Suite::Ptr => ptr(&mut part, scale),
            Suite::Hom => hom(&mut part),
            Suite::Energy => energy(&mut part, scale),
            Suite::GenfunSeries => genfun_series(&mut part, scale),
            Suite::Classical => classical(&mut part, scale),
            Suite::Asymptotics => asymptotics(&mut part, scale),
            Suite::All => unreachable!("expanded above"),
        }
        rec.merge(part);
    }
    VerificationResult {
        suite: suite.name().to_string(),
        cases: rec.cases,
        failures: rec.failures,
        seconds: started.elapsed().as_secs_f64(),
    }
}

fn normalization(rec: &mut Recorder, scale: Scale) {
    let shells = scale.pick(16, 30);
    for eta in [0.1, 0.5, 0.83] {
        let p: DeviceParam = bs(eta).into();
        let cells: Vec<(usize, usize)> = pairs(shells, shells).into_iter().filter(|(i, k)| i + k <= shells).collect();
        rec.each(&cells, |&(i, k), r| {
            if let Some(res) = r.ok(|| format!("i={i},k={k}"), &p, normalization_residual(i, k, &p)) {
                r.near(|| format!("i={i},k={k}"), &p, 0.0, res, 1e-10);
            }
        });
    }
    let eta = q("2/7");
    let exact = scale.pick(6, 12);
    for (i, k) in pairs(exact, exact).into_iter().filter(|(i, k)| i + k <= exact) {
        let total = (0..=i + k).fold(ExactRational::zero(), |acc, n| {
            acc + bs_prob_exact(&PhotonConfig::bs(i, k, n), &eta).expect("bs config")
        });
        rec.equal(|| format!("i={i},k={k}"), &eta, &ExactRational::one(), &total);
    }
    let side = scale.pick(4, 8);
    for lambda in [0.2, 0.5, 0.8] {
        let p: DeviceParam = tms(lambda).into();
        rec.each(&pairs(side, side), |&(i, k), r| {
            if let Some(res) = r.ok(|| format!("i={i},k={k}"), &p, normalization_residual(i, k, &p)) {
                r.near(|| format!("i={i},k={k}"), &p, 0.0, res, 1e-10);
            }
        });
    }
}

fn recurrence_bs(rec: &mut Recorder, scale: Scale) {
    let side = scale.pick(6, 8);
    for eta in ["0", "1/4", "1/3", "1/2", "1"] {
        let e = q(eta);
        let Some(table) = rec.ok(|| format!("table {side}x{side}"), &e, bs_table_exact(side, side, &e)) else { continue };
        rec.each(&pairs(side, side), |&(i, k), r| {
            for n in 0..=i + k {
                for j in 0..=i + k {
                    let ix = || format!("i={i},k={k},n={n},j={j}");
                    if let Some(res) = r.ok(ix, &e, bs_recurrence_check(i, k, n, j, &table)) {
                        r.equal(ix, &e, &ExactRational::zero(), &res);
                    }
                }
            }
        });
    }
    let side = scale.pick(10, 20);
    for eta in [0.37, 0.5] {
        let p = bs(eta);
        let Ok(table) = bs_table_direct(side, side, &p) else { continue };
        rec.each(&pairs(side, side), |&(i, k), r| {
            for n in 0..=i + k {
                let ix = || format!("i={i},k={k},n={n},j=1");
                if let Some(res) = r.ok(ix, &p, bs_recurrence_check(i, k, n, 1.min(i + k), &table)) {
                    r.near(ix, &p, 0.0, res, 1e-10);
                }
            }
        });
    }
    // the three floating-point routes, pairwise
    let side = scale.pick(12, 25);
    for eta in [0.23, 0.5] {
        let p = bs(eta);
        let tables = (bs_table_recurrence::<f64>(side, side, &p), bs_table_direct(side, side, &p), bs_table_convolution(side, side, &p));
        let (Ok(a), Ok(b), Ok(c)) = tables else {
            rec.record(false, || format!("tables {side}x{side}"), &p, "tables".into(), "build error".into(), 0.0);
            continue;
        };
        for ((x, y), z) in a.entries().zip(b.entries()).zip(c.entries()) {
            let ix = || format!("i={},k={},n={}", x.i, x.k, x.n);
            let worst = (x.value - y.value).abs().max((x.value - z.value).abs()).max((y.value - z.value).abs());
            rec.near(ix, &p, 0.0, worst, 1e-10);
        }
    }
    let side = scale.pick(6, 10);
    let e = q("3/8");
    let p = BeamSplitterParam::exact(e.clone()).expect("valid");
    if let (Ok(a), Ok(b)) = (bs_table_recurrence::<ExactRational>(side, side, &p), bs_table_exact(side, side, &e)) {
        for (x, y) in a.entries().zip(b.entries()) {
            rec.equal(|| format!("i={},k={},n={}", x.i, x.k, x.n), &e, y.value, x.value);
        }
    }
}

fn recurrence_tms(rec: &mut Recorder, scale: Scale) {
    let side = scale.pick(4, 6);
    for lambda in ["0", "1/4", "1/2", "3/4"] {
        let l = q(lambda);
        let Some(table) = rec.ok(|| format!("table {side}^3"), &l, tms_table_exact(side, side, side, &l)) else { continue };
        rec.each(&pairs(side, side), |&(i, k), r| {
            for n in 0..=side {
                for j in 0..=n + k {
                    let ix = || format!("i={i},k={k},n={n},j={j}");
                    if let Some(res) = r.ok(ix, &l, tms_recurrence_check(i, k, n, j, &table)) {
                        r.equal(ix, &l, &ExactRational::zero(), &res);
                    }
                }
            }
        });
    }
    let (side, nmax) = (scale.pick(4, 8), scale.pick(15, 30));
    for lambda in [0.3, 0.7] {
        let p = tms(lambda);
        if let (Ok(a), Ok(b)) = (tms_table_recurrence::<f64>(side, side, nmax, &p), tms_table_direct(side, side, nmax, &p)) {
            for (x, y) in a.entries().zip(b.entries()) {
                rec.near(|| format!("i={},k={},n={}", x.i, x.k, x.n), &p, *y.value, *x.value, 1e-10);
            }
        }
    }
    let side = scale.pick(4, 6);
    let l = q("2/5");
    let p = SqueezerParam::exact(l.clone()).expect("valid");
    if let (Ok(a), Ok(b)) = (tms_table_recurrence::<ExactRational>(side, side, side, &p), tms_table_exact(side, side, side, &l)) {
        for (x, y) in a.entries().zip(b.entries()) {
            rec.equal(|| format!("i={},k={},n={}", x.i, x.k, x.n), &l, y.value, x.value);
        }
    }
}

fn ptr(rec: &mut Recorder, scale: Scale) {
    let mut rng = StdRng::seed_from_u64(0x5eed_0001);
    let points = scale.pick(30, 100);
    for lambda in [0.2, 0.5, 0.8] {
        let sq = tms(lambda);
        let b = BeamSplitterParam::time_reversed(&sq);
        for _ in 0..points {
            let [x, y, z, w]: [f64; 4] = std::array::from_fn(|_| rng.random_range(0.0..0.6));
            let ix = || format!("f at ({x},{y},{z},{w})");
            let (Some(lhs), Some(rhs)) = (
                rec.ok(ix, &sq, eval_f_tms(&GenFunPoint::new(x, y, z, w), &sq)),
                rec.ok(ix, &b, eval_f_bs(&GenFunPoint::new(x, w, z, y), &b)),
            ) else {
                continue;
            };
            rec.near(ix, &sq, (1.0 - lambda) * rhs, lhs, 1e-12);
        }
        for _ in 0..points {
            let [x, y, z, w]: [f64; 4] = std::array::from_fn(|_| rng.random_range(-0.5..0.5));
            let lhs = eval_g_tms(&GenFunPoint::new(x, y, z, w), &sq);
            let rhs = (1.0 - lambda).sqrt() * eval_g_bs(&GenFunPoint::new(x, w, z, y), &b);
            rec.near(|| format!("g at ({x},{y},{z},{w})"), &sq, rhs, lhs, 1e-12);
        }
    }
    let side = scale.pick(5, 10);
    for lambda in ["2/5", "1/3"] {
        let l = q(lambda);
        let eta = l.one_minus();
        let p = SqueezerParam::exact(l.clone()).expect("valid");
        let Some(table) = rec.ok(|| format!("table {side}^3"), &l, tms_table_recurrence::<ExactRational>(side, side, side, &p))
        else {
            continue;
        };
        for e in table.entries() {
            let b = bs_prob_exact(&PhotonConfig::bs(e.i, e.m, e.n), &eta).expect("bs config");
            rec.equal(|| format!("i={},k={},n={}", e.i, e.k, e.n), &l, &(&l.one_minus() * &b), e.value);
        }
    }
}

fn hom(rec: &mut Recorder) {
    let half = q("1/2");
    let zero = ExactRational::zero();
    let b = bs_prob_exact(&PhotonConfig::bs(1, 1, 1), &half).expect("bs config");
    rec.equal(|| "B(1,1;1)".into(), &half, &zero, &b);
    let a = tms_prob_exact(&PhotonConfig::tms(1, 1, 1), &half).expect("tms config");
    rec.equal(|| "A(1,1;1)".into(), &half, &zero, &a);
    let p = BeamSplitterParam::exact(half.clone()).expect("valid");
    if let Ok(t) = bs_table_recurrence::<ExactRational>(1, 1, &p) {
        rec.equal(|| "B(1,1;1) recurrence".into(), &half, &zero, &t.get(1, 1, 1).expect("covered"));
    }
    let s = SqueezerParam::exact(half.clone()).expect("valid");
    if let Ok(t) = tms_table_recurrence::<ExactRational>(1, 1, 1, &s) {
        rec.equal(|| "A(1,1;1) recurrence".into(), &half, &zero, &t.get(1, 1, 1).expect("covered"));
    }
    let c = PhotonConfig::bs(1, 1, 1);
    for (route, v) in [("direct", bs_amplitude_direct(&c, &bs(0.5))), ("convolution", bs_amplitude_convolution(&c, &bs(0.5)))] {
        if let Some(v) = rec.ok(|| format!("b(1,1;1) {route}"), &0.5, v) {
            rec.near(|| format!("b(1,1;1) {route}"), &0.5, 0.0, v.value(), 1e-15);
        }
    }
    if let Ok(v) = tms_amplitude(&PhotonConfig::tms(1, 1, 1), &tms(0.5)) {
        rec.near(|| "a(1,1;1)".into(), &0.5, 0.0, v.value(), 1e-15);
    }
    for s in 0..=100 {
        let lambda = s as f64 / 101.0;
        let p = tms(lambda);
        if let Ok(v) = tms_prob(&PhotonConfig::tms(1, 1, 1), &p) {
            let want = (1.0 - lambda) * (1.0 - 2.0 * lambda).powi(2);
            rec.near(|| "A(1,1;1) sweep".into(), &p, want, v.value, 1e-12);
        }
        let eta = s as f64 / 100.0;
        let p = bs(eta);
        if let Ok(v) = bs_amplitude_direct(&c, &p) {
            rec.near(|| "B(1,1;1) sweep".into(), &p, (2.0 * eta - 1.0).powi(2), v.probability(), 1e-12);
        }
    }
}

fn energy(rec: &mut Recorder, scale: Scale) {
    let mut rng = StdRng::seed_from_u64(0x5eed_0002);
    let wanted = scale.pick(20, 50);
    let params: [DeviceParam; 4] = [bs(0.3).into(), bs(0.5).into(), tms(0.4).into(), tms(0.75).into()];
    for p in &params {
        let mut done = 0;
        let mut tries = 0;
        while done < wanted && tries < 100 * wanted {
            tries += 1;
            let [x, y, z, w]: [f64; 4] = std::array::from_fn(|_| rng.random_range(0.0..0.6));
            let t = rng.random_range(0.75..1.3);
            let pt = GenFunPoint::new(x, y, z, w);
            // a scaled point that leaves the convergence domain is skipped
            let Ok(res) = check_energy_scaling(&pt, t, p) else { continue };
            done += 1;
            rec.near(|| format!("({x},{y},{z},{w}), t={t}"), p, 0.0, res, 1e-12);
        }
        rec.holds(done == wanted, || format!("{wanted} in-domain samples"), p, "enough samples");
    }
    let p = bs(0.3);
    for _ in 0..wanted {
        let [x, y, z, w]: [f64; 4] = std::array::from_fn(|_| rng.random_range(0.0..0.6));
        if let (Ok(a), Ok(b)) = (eval_f_bs(&GenFunPoint::new(x, y, z, w), &p), eval_f_bs(&GenFunPoint::new(y, x, w, z), &p)) {
            rec.near(|| format!("swap at ({x},{y},{z},{w})"), &p, a, b, 1e-14);
        }
    }
}

fn genfun_series(rec: &mut Recorder, scale: Scale) {
    let p = bs(0.3);
    let pt = GenFunPoint::new(0.2, 0.2, 0.2, 0.2);
    if let Some(s) = rec.ok(|| "g series (0.2)^4".into(), &p, g_bs_series(&pt, &p, Some(12))) {
        rec.near(|| "g series (0.2)^4 order 12".into(), &p, s.closed, s.series, 1e-8);
    }
    let mut rng = StdRng::seed_from_u64(0x5eed_0003);
    for _ in 0..scale.pick(5, 20) {
        let [x, y, z, w]: [f64; 4] = std::array::from_fn(|_| rng.random_range(-0.25..0.25));
        let eta = rng.random_range(0.0..1.0);
        let p = bs(eta);
        if let Some(s) = rec.ok(|| format!("g series ({x},{y},{z},{w})"), &p, g_bs_series(&GenFunPoint::new(x, y, z, w), &p, Some(12))) {
            rec.near(|| format!("g series ({x},{y},{z},{w}) order 12"), &p, s.closed, s.series, 1e-8);
        }
    }
    for eta in [0.3, 0.5, 0.9] {
        let p = bs(eta);
        if let Some(s) = rec.ok(|| "f series (0.3,0.3,0.3,1)".into(), &p, f_bs_w1_series(0.3, 0.3, 0.3, &p, None)) {
            rec.holds(s.converged, || format!("f series order {}", s.order), &p, "tail bound below target");
            rec.near(|| format!("f series order {}", s.order), &p, s.closed, s.series, 1e-8);
        }
        if let Some(s) = rec.ok(|| "diagonal series (0.3,0.5)".into(), &p, diagonal_series(0.3, 0.5, &p, None)) {
            rec.holds(s.converged, || format!("diagonal series order {}", s.order), &p, "tail bound below target");
            rec.near(|| format!("diagonal series order {}", s.order), &p, s.closed, s.series, 1e-8);
        }
    }
    for x in [0.0, 0.3, 0.7] {
        for y in [0.0, 0.3, 0.7] {
            let want = 1.0 / ((1.0 - x) * (1.0 - y));
            let pt = GenFunPoint::new(x, y, 1.0, 1.0);
            let b = bs(0.42);
            if let Some(v) = rec.ok(|| format!("f_bs({x},{y},1,1)"), &b, eval_f_bs(&pt, &b)) {
                rec.near(|| format!("f_bs({x},{y},1,1)"), &b, want, v, 1e-12);
            }
            let s = tms(0.42);
            if let Some(v) = rec.ok(|| format!("f_tms({x},{y},1,1)"), &s, eval_f_tms(&pt, &s)) {
                rec.near(|| format!("f_tms({x},{y},1,1)"), &s, want, v, 1e-12);
            }
        }
    }
}

fn classical(rec: &mut Recorder, scale: Scale) {
    let side = scale.pick(6, 12);
    for eta in [0.3, 0.5, 0.7] {
        let p = bs(eta);
        let t = ClassicalTable::<f64>::new(&p).expect("float weights");
        for (i, k) in pairs(side, side) {
            for n in 0..=i + k {
                if i > 0 && k > 0 {
                    if let Some(res) = rec.ok(|| format!("i={i},k={k},n={n}"), &p, t.half_sum_check(i, k, n)) {
                        rec.near(|| format!("i={i},k={k},n={n},j=1"), &p, 0.0, res, 1e-12);
                    }
                }
                if i + k <= scale.pick(8, 12) {
                    for j in 0..=i + k {
                        if let Some(res) = rec.ok(|| format!("i={i},k={k},n={n},j={j}"), &p, t.recurrence_check(i, k, n, j)) {
                            rec.near(|| format!("i={i},k={k},n={n},j={j}"), &p, 0.0, res, 1e-12);
                        }
                    }
                }
            }
        }
        rec.near(|| "row sums".into(), &p, 0.0, t.max_row_residual(), 1e-12);
    }
    let half = q("1/2");
    let t = ClassicalTable::<ExactRational>::new(&BeamSplitterParam::exact(half.clone()).expect("valid")).expect("exact weights");
    let classical = t.prob(1, 1, 1);
    let quantum = bs_prob_exact(&PhotonConfig::bs(1, 1, 1), &half).expect("bs config");
    rec.equal(|| "p(1|1,1)".into(), &half, &half, &classical);
    rec.equal(|| "p(1|1,1) - B(1,1;1)".into(), &half, &half, &(classical - quantum));
}

fn asymptotics(rec: &mut Recorder, scale: Scale) {
    let sizes: Vec<usize> = match scale {
        Scale::Quick => vec![25, 50, 100],
        Scale::Full => vec![50, 100, 200],
    };
    let label = "eta=1/2";
    if let Some(r) = rec.ok(|| format!("sizes {sizes:?}"), &label, convergence_report(&sizes, Device::Bs)) {
        let strictly = r.max_rel_error.windows(2).all(|w| w[1] < w[0]);
        rec.holds(strictly, || format!("max errors {:?}", r.max_rel_error), &label, "decreasing");
        let top = *sizes.last().expect("non-empty");
        match r.row(top, top) {
            Some(row) => rec.near(|| format!("i={top},n={top}"), &label, 0.0, row.rel_error, 0.1),
            None => rec.holds(false, || format!("i={top},n={top}"), &label, "compared"),
        }
    }
    let sizes: Vec<usize> = match scale {
        Scale::Quick => vec![20, 40],
        Scale::Full => vec![50, 100],
    };
    let label = "lambda=1/2";
    if let Some(r) = rec.ok(|| format!("sizes {sizes:?}"), &label, convergence_report(&sizes, Device::Tms)) {
        let strictly = r.max_rel_error.windows(2).all(|w| w[1] < w[0]);
        rec.holds(strictly, || format!("max errors {:?}", r.max_rel_error), &label, "decreasing");
    }
    let side = scale.pick(10, 20);
    let half = BeamSplitterParam::exact(q("1/2")).expect("valid");
    if let Some(rows) = rec.ok(|| format!("diagonal to {side}"), &half, bs_diagonal_recurrence::<ExactRational>(side, &half, Execution::default())) {
        for (i, row) in rows.iter().enumerate() {
            for n in 0..=2 * i {
                if n % 2 == 1 {
                    rec.equal(|| format!("i={i},n={n}"), &half, &ExactRational::zero(), &row[n]);
                } else {
                    rec.equal(|| format!("i={i},n={n} mirrored"), &half, &row[2 * i - n], &row[n]);
                }
            }
        }
    }
}

