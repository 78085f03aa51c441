//! Every check the harness can run, addressed by a stable id.

use std::time::Instant;

use clap::ValueEnum;
use log::info;
use rayon::prelude::*;
use regpart::congruences::{self, CongruenceFamily, SweepConfig, Sweeper, DEFAULT_ORDER_CAP};
use regpart::newman::{self, NewmanSeries};
use regpart::partitions::{self, ColoredSpec, RegularitySpec};
use regpart::theta;
use regpart::{EtaQuotient, Failure, VerificationReport};

pub const IDENTITY_ORDER: usize = 400;
pub const F1_DISSECTION_ORDER: usize = 200;
pub const F1_CUBED_DISSECTION_ORDER: usize = 300;
pub const NEWMAN_ORDER: usize = 3000;
pub const REGULAR_ORACLE_N: usize = 200;
pub const COLORED_ORACLE_N: usize = 150;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, ValueEnum)]
pub enum Class {
    Identities,
    Theta,
    Oracles,
    Newman,
    Families,
    Anchors,
}

impl Class {
    pub fn as_str(self) -> &'static str {
        match self {
            Class::Identities => "identities",
            Class::Theta => "theta",
            Class::Oracles => "oracles",
            Class::Newman => "newman",
            Class::Families => "families",
            Class::Anchors => "anchors",
        }
    }
}

#[derive(Debug, Clone)]
enum Job {
    Identity,
    TripleProduct,
    F1Dissection(u64),
    F1CubedDissection(u64),
    Regular(RegularitySpec),
    Colored(ColoredSpec),
    Newman { r: i64, s: i64, qp: u64, p: u64 },
    Family(Box<CongruenceFamily>),
    PowerCoefficientAnchor,
    OmegaAnchor,
}

#[derive(Debug, Clone)]
pub struct Task {
    pub id: String,
    pub class: Class,
    job: Job,
}

/// Overrides from the command line. `None` means the per-check default.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    pub order: Option<usize>,
    pub n_max: Option<u64>,
    pub j_max: Option<u64>,
    pub primes: Option<Vec<u64>>,
}

/// Settings plus the series cache shared by all family sweeps of one run.
#[derive(Debug, Default)]
pub struct Context {
    pub settings: Settings,
    sweeper: Sweeper,
}

impl Context {
    pub fn new(settings: Settings) -> Self {
        Context {
            settings,
            sweeper: Sweeper::new(),
        }
    }

    fn order(&self, default: usize) -> usize {
        self.settings.order.unwrap_or(default)
    }

    fn sweep_config(&self) -> SweepConfig {
        let mut c = SweepConfig {
            n_max: self.settings.n_max,
            j_max: self.settings.j_max,
            order_cap: self.order(DEFAULT_ORDER_CAP),
            ..SweepConfig::default()
        };
        if let Some(p) = &self.settings.primes {
            c.primes = p.clone();
        }
        c
    }
}

fn task(id: impl Into<String>, class: Class, job: Job) -> Task {
    Task {
        id: id.into(),
        class,
        job,
    }
}

pub fn regular_oracle_specs() -> Vec<RegularitySpec> {
    [&[3u64, 8][..], &[4, 7], &[4, 9], &[3, 5, 8]]
        .iter()
        .map(|v| RegularitySpec::new(v).unwrap())
        .collect()
}

pub fn colored_oracle_specs() -> Vec<ColoredSpec> {
    [&[(3u64, 1u32), (5, 1)][..], &[(1, 1), (15, 1)], &[(1, 1), (3, 1), (5, 1), (15, 1)]]
        .iter()
        .map(|v| ColoredSpec::new(v).unwrap())
        .collect()
}

fn regular_task(spec: RegularitySpec) -> Task {
    let name: Vec<String> = spec.forbidden().map(|d| d.to_string()).collect();
    task(format!("oracle:{}", name.join(",")), Class::Oracles, Job::Regular(spec))
}

fn colored_task(spec: ColoredSpec) -> Task {
    task(format!("oracle:{spec}"), Class::Oracles, Job::Colored(spec))
}

fn newman_task(r: i64, s: i64, qp: u64, p: u64) -> Task {
    task(
        format!("newman:{r},{s},{qp},{p}"),
        Class::Newman,
        Job::Newman { r, s, qp, p },
    )
}

/// The full suite, in registry order.
pub fn all_tasks() -> Vec<Task> {
    let mut v = Vec::new();
    for rec in theta::catalog() {
        v.push(task(rec.id, Class::Identities, Job::Identity));
    }
    v.push(task("jacobi:triple_product", Class::Theta, Job::TripleProduct));
    for p in [5, 7, 11, 13] {
        v.push(task(format!("dissect:f1:{p}"), Class::Theta, Job::F1Dissection(p)));
    }
    for p in [3, 5, 7, 11] {
        v.push(task(
            format!("dissect:f1cubed:{p}"),
            Class::Theta,
            Job::F1CubedDissection(p),
        ));
    }
    v.extend(regular_oracle_specs().into_iter().map(regular_task));
    v.extend(colored_oracle_specs().into_iter().map(colored_task));
    for series in [NewmanSeries::B, NewmanSeries::A] {
        let (r, s, qp) = series.exponents();
        for p in [5, 7, 11, 13] {
            v.push(newman_task(r, s, qp, p));
        }
    }
    for fam in congruences::registry() {
        v.push(task(fam.id, Class::Families, Job::Family(Box::new(fam))));
    }
    v.push(task("remark:b10", Class::Anchors, Job::PowerCoefficientAnchor));
    v.push(task("remark:omega7", Class::Anchors, Job::OmegaAnchor));
    v
}

pub fn tasks_in(only: Option<Class>) -> Vec<Task> {
    all_tasks()
        .into_iter()
        .filter(|t| only.is_none_or(|c| t.class == c))
        .collect()
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Option<Vec<T>> {
    s.split(',').map(|x| x.trim().parse().ok()).collect()
}

/// Looks up a registered id, or builds `newman:r,s,q,p`, `oracle:l,k,...`
/// and `oracle:c^s,...` checks on the fly.
pub fn resolve(id: &str) -> Option<Task> {
    if let Some(t) = all_tasks().into_iter().find(|t| t.id == id) {
        return Some(t);
    }
    if let Some(rest) = id.strip_prefix("newman:") {
        let v: Vec<i64> = parse_list(rest)?;
        let [r, s, qp, p] = v[..] else { return None };
        if qp < 2 || p < 2 {
            return None;
        }
        return Some(newman_task(r, s, qp as u64, p as u64));
    }
    if let Some(rest) = id.strip_prefix("oracle:") {
        if rest.contains('^') {
            let parts: Option<Vec<(u64, u32)>> = rest
                .split(',')
                .map(|t| {
                    let (c, s) = t.split_once('^')?;
                    Some((c.trim().parse().ok()?, s.trim().parse().ok()?))
                })
                .collect();
            return ColoredSpec::new(&parts?).ok().map(colored_task);
        }
        let forbidden: Vec<u64> = parse_list(rest)?;
        return RegularitySpec::new(&forbidden).ok().map(regular_task);
    }
    None
}

fn error_report(id: &str, kind: &str, err: impl ToString) -> VerificationReport {
    let mut r = VerificationReport::new(id, kind);
    r.fail(Failure::new(&[], "-", err.to_string()));
    r.note("error", err.to_string());
    r
}

impl Task {
    pub fn kind(&self) -> &'static str {
        match &self.job {
            Job::Identity => "identity",
            Job::TripleProduct => "theta",
            Job::F1Dissection(_) | Job::F1CubedDissection(_) => "dissection",
            Job::Regular(_) | Job::Colored(_) => "oracle",
            Job::Newman { .. } => "newman",
            Job::Family(f) => f.kind.name(),
            Job::PowerCoefficientAnchor | Job::OmegaAnchor => "anchor",
        }
    }

    pub fn description(&self) -> String {
        match &self.job {
            Job::Identity => theta::lookup(&self.id).map(|r| r.description.to_string()).unwrap_or_default(),
            Job::TripleProduct => "phi, psi and f(-q,-q^2) against their product forms".into(),
            Job::F1Dissection(p) => format!("{p}-dissection of f1"),
            Job::F1CubedDissection(p) => format!("{p}-dissection of f1^3"),
            Job::Regular(s) => format!("eta quotient vs partition count, no part divisible by {s}"),
            Job::Colored(s) => format!("eta quotient vs coloured partition count, {s}"),
            Job::Newman { r, s, qp, p } => format!("recurrence for f1^{r} f{qp}^{s} at p = {p}"),
            Job::Family(f) => f.statement.to_string(),
            Job::PowerCoefficientAnchor => "coefficient of q^10 in f1^2 f3 is 0".into(),
            Job::OmegaAnchor => "omega(7) = 1 for f1^2 f3".into(),
        }
    }

    pub fn run(&self, ctx: &Context) -> VerificationReport {
        let id = self.id.as_str();
        let result: Result<VerificationReport, String> = match &self.job {
            Job::Identity => theta::verify_identity(id, ctx.order(IDENTITY_ORDER)).map_err(|e| e.to_string()),
            Job::TripleProduct => theta::verify_triple_product(ctx.order(IDENTITY_ORDER)).map_err(|e| e.to_string()),
            Job::F1Dissection(p) => {
                theta::verify_f1_dissection(*p, ctx.order(F1_DISSECTION_ORDER)).map_err(|e| e.to_string())
            }
            Job::F1CubedDissection(p) => {
                theta::verify_f1_cubed_dissection(*p, ctx.order(F1_CUBED_DISSECTION_ORDER))
                    .map_err(|e| e.to_string())
            }
            Job::Regular(spec) => {
                let n = ctx.settings.n_max.map_or(REGULAR_ORACLE_N, |n| n as usize);
                partitions::verify_regular_oracle(spec, n).map_err(|e| e.to_string())
            }
            Job::Colored(spec) => {
                let n = ctx.settings.n_max.map_or(COLORED_ORACLE_N, |n| n as usize);
                partitions::verify_colored_oracle(spec, n).map_err(|e| e.to_string())
            }
            Job::Newman { r, s, qp, p } => run_newman(*r, *s, *qp, *p, ctx.order(NEWMAN_ORDER)),
            Job::Family(fam) => ctx.sweeper.run(fam, &ctx.sweep_config()).map_err(|e| e.to_string()),
            Job::PowerCoefficientAnchor => Ok(power_coefficient_anchor()),
            Job::OmegaAnchor => omega_anchor().map_err(|e| e.to_string()),
        };
        result.unwrap_or_else(|e| error_report(id, self.kind(), e))
    }
}

fn run_newman(r: i64, s: i64, qp: u64, p: u64, order: usize) -> Result<VerificationReport, String> {
    let params = newman::newman_params(r, s, qp, p).map_err(|e| e.to_string())?;
    let n_max = newman::max_recurrence_n(&params, order)
        .ok_or_else(|| format!("order {order} is below delta = {}", params.delta))?;
    let coeffs = params.eta_quotient().compile(order, None).map_err(|e| e.to_string())?;
    let mut report = newman::verify_recurrence(&coeffs, &params, n_max).map_err(|e| e.to_string())?;
    report.note("order", order);
    Ok(report)
}

fn power_coefficient_anchor() -> VerificationReport {
    let mut report = VerificationReport::new("remark:b10", "anchor");
    let b = EtaQuotient::from_terms(&[(1, 2), (3, 1)]).compile(10, None).expect("small order");
    let c = b.int_coeff(10);
    report.note("b(10)", &c);
    report.check(c == 0.into(), || Failure::new(&[], 10, &c));
    report
}

fn omega_anchor() -> Result<VerificationReport, newman::NewmanError> {
    let mut report = VerificationReport::new("remark:omega7", "anchor");
    let w = newman::omega_exact(NewmanSeries::B, 7)?;
    report.note("omega(7)", &w);
    report.check(w == 1.into(), || Failure::new(&[("p", "7".into())], "omega", &w));
    Ok(report)
}

/// Runs the tasks, concurrently when `threads` allows, and returns the
/// reports sorted by id with their wall-clock times.
pub fn run_tasks(tasks: &[Task], ctx: &Context, threads: Option<usize>) -> Vec<(VerificationReport, u128)> {
    let work = || {
        tasks
            .par_iter()
            .map(|t| {
                let start = Instant::now();
                let r = t.run(ctx);
                let ms = start.elapsed().as_millis();
                info!("{} {} in {ms} ms", t.id, r.status());
                (r, ms)
            })
            .collect::<Vec<_>>()
    };
    let mut out = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(work),
        None => work(),
    };
    out.sort_by(|a, b| a.0.id.cmp(&b.0.id));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use regpart::Status;

    #[test]
    fn class_sizes() {
        let count = |c| tasks_in(Some(c)).len();
        assert_eq!(count(Class::Identities), 11);
        assert_eq!(count(Class::Newman), 8);
        assert_eq!(count(Class::Oracles), 7);
        assert_eq!(count(Class::Theta), 9);
        assert_eq!(count(Class::Families), 22);
        assert_eq!(count(Class::Anchors), 2);
        assert!(all_tasks().len() >= 30);
    }

    #[test]
    fn ids_are_unique() {
        let mut ids: Vec<String> = all_tasks().into_iter().map(|t| t.id).collect();
        let n = ids.len();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), n);
    }

    #[test]
    fn dynamic_ids() {
        assert_eq!(resolve("newman:2,1,3,5").unwrap().class, Class::Newman);
        assert_eq!(resolve("newman:4,3,2,7").unwrap().id, "newman:4,3,2,7");
        assert_eq!(resolve("oracle:5,7").unwrap().id, "oracle:5,7");
        assert_eq!(resolve("oracle:2^3").unwrap().id, "oracle:2^3");
        for bad in ["newman:1,2", "oracle:1", "oracle:x", "nope", "oracle:3^0"] {
            assert!(resolve(bad).is_none(), "{bad}");
        }
    }

    #[test]
    fn anchors_and_small_runs() {
        let ctx = Context::new(Settings::default());
        for id in ["remark:b10", "remark:omega7", "oracle:4,9", "newman:2,1,3,7"] {
            let r = resolve(id).unwrap().run(&ctx);
            assert_eq!(r.status(), Status::Pass, "{id}: {:?}", r.failures);
        }
    }

    #[test]
    fn errors_become_failing_entries() {
        let ctx = Context::new(Settings {
            order: Some(50),
            ..Settings::default()
        });
        let r = resolve("euler_5dissect").unwrap().run(&ctx);
        assert_eq!(r.status(), Status::Fail);
        assert!(r.notes["error"].contains("order"));
        let r = resolve("newman:2,2,3,5").unwrap().run(&ctx);
        assert_eq!(r.status(), Status::Fail);
    }

    #[test]
    fn results_are_sorted() {
        let ctx = Context::new(Settings::default());
        let out = run_tasks(&tasks_in(Some(Class::Anchors)), &ctx, Some(2));
        let ids: Vec<&str> = out.iter().map(|(r, _)| r.id.as_str()).collect();
        assert_eq!(ids, ["remark:b10", "remark:omega7"]);
    }
}
