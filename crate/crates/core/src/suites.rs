//! Seeded property suites with machine-readable reports.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::automata::AutomatonGroup;
use crate::builtin;
use crate::cantor::{Cone, RationalPoint};
use crate::error::{Error, Result};
use crate::germs::{coset_witness, germ_equal, germ_signature, periodic_nucleus, GermSignature};
use crate::rn::{RnElement, Row};
use crate::sample::{self, SampleRng};
use crate::witnesses::{
    build_e_prime, build_f, check_nesting, kernel_exhaustion_index, phi, separate_points,
    tuple_transporter,
};

pub const SUITES: &[&str] = &["germ", "laws", "oligo", "stab"];

const GERM_CAP: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    NotStabilized,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::NotStabilized => "not-stabilized",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub id: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub group: String,
    pub seed: u64,
    pub cases: usize,
    pub checks: Vec<Check>,
    pub exit_code: i32,
}

impl SuiteReport {
    fn new(
        suite: &str,
        group: &AutomatonGroup,
        config: &SuiteConfig,
        mut checks: Vec<Check>,
    ) -> Self {
        checks.sort_by(|a, b| a.id.cmp(&b.id));
        let exit_code = if checks.iter().any(|c| c.status == Status::Fail) {
            1
        } else if checks.iter().any(|c| c.status == Status::NotStabilized) {
            2
        } else {
            0
        };
        SuiteReport {
            suite: suite.to_string(),
            group: group.name().to_string(),
            seed: config.seed,
            cases: config.cases,
            checks,
            exit_code,
        }
    }

    pub fn passed(&self) -> bool {
        self.exit_code == 0
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("reports serialize")
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "suite {} group {} seed {} cases {}",
            self.suite, self.group, self.seed, self.cases
        )?;
        let width = self.checks.iter().map(|c| c.id.len()).max().unwrap_or(0);
        for c in &self.checks {
            writeln!(
                f,
                "{:<width$}  {:<14}  {}",
                c.id,
                c.status.to_string(),
                c.detail
            )?;
        }
        let passed = self
            .checks
            .iter()
            .filter(|c| c.status == Status::Pass)
            .count();
        write!(f, "{passed}/{} checks passed", self.checks.len())
    }
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    pub cases: usize,
    /// Overrides the suite's default group where the suite allows it.
    pub group: Option<Arc<AutomatonGroup>>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 1,
            cases: 50,
            group: None,
        }
    }
}

fn check(id: &str, body: impl FnOnce() -> Result<(bool, String)>) -> Check {
    let (status, detail) = match body() {
        Ok((true, detail)) => (Status::Pass, detail),
        Ok((false, detail)) => (Status::Fail, detail),
        Err(Error::NotStabilized(cap)) => (
            Status::NotStabilized,
            format!("no stable signature within {cap} steps"),
        ),
        Err(e) => (Status::Fail, e.to_string()),
    };
    Check {
        id: id.to_string(),
        status,
        detail,
    }
}

pub fn run_suite(name: &str, config: &SuiteConfig) -> Result<SuiteReport> {
    match name {
        "oligo" => Ok(oligo(config)),
        "germ" => Ok(germ(config)),
        "stab" => Ok(stab(config)),
        "laws" => Ok(laws(config)),
        other => Err(Error::ContractViolation(format!(
            "unknown suite `{other}` (expected one of {})",
            SUITES.join(", ")
        ))),
    }
}

/// Transporters for tuples of up to four points.
fn oligo(config: &SuiteConfig) -> SuiteReport {
    let group = config
        .group
        .clone()
        .unwrap_or_else(|| Arc::new(builtin::odometer()));
    let mut rng = sample::rng(config.seed);
    let mut checks = Vec::new();
    let mut tallies: [(usize, usize, String); 4] = Default::default();
    for case in 0..config.cases {
        let n = case % 4 + 1;
        let outcome =
            sample::random_transport_instance(&mut rng, &group, n).and_then(|(pairs, movers)| {
                let h = tuple_transporter(&group, &pairs, &movers)?;
                for (p, q) in &pairs {
                    let image = h.evaluate(p)?;
                    if image != *q {
                        return Ok(Some(format!(
                            "case {case}: {p} goes to {image}, expected {q}"
                        )));
                    }
                }
                Ok(None)
            });
        let t = &mut tallies[n - 1];
        t.1 += 1;
        match outcome {
            Ok(None) => t.0 += 1,
            Ok(Some(msg)) => t.2 = msg,
            Err(e) => t.2 = format!("case {case}: {e}"),
        }
    }
    for (i, (ok, total, msg)) in tallies.into_iter().enumerate() {
        if total == 0 {
            continue;
        }
        checks.push(check(&format!("transport-n{}", i + 1), || {
            let detail = if msg.is_empty() {
                format!("{ok}/{total} tuples transported")
            } else {
                format!("{ok}/{total} tuples transported; {msg}")
            };
            Ok((ok == total, detail))
        }));
    }
    SuiteReport::new("oligo", &group, config, checks)
}

/// The element with `h(0ψ) = 01·a(ψ)`, completed to a full table.
pub fn remark_element(group: &Arc<AutomatonGroup>) -> Result<RnElement> {
    let row = Row::new(
        Cone::new(vec![0]),
        Cone::new(vec![0, 1]),
        group.parse_word("a")?,
    );
    RnElement::make_element(group.clone(), &[row])
}

fn signature_text(group: &AutomatonGroup, s: &GermSignature) -> String {
    format!("({}, {})", group.format_word(&s.nucleus_component), s.delta)
}

/// Germs at `(01)` in the reflection group.
fn germ(config: &SuiteConfig) -> SuiteReport {
    let group = Arc::new(builtin::reflection());
    let p: RationalPoint = "(01)".parse().expect("valid point");
    let mut checks = Vec::new();
    let setup = group
        .nucleus(64, 64)
        .and_then(|n| periodic_nucleus(&group, &n, p.period()))
        .and_then(|data| {
            let system = separate_points(2, std::slice::from_ref(&p))?;
            let f = build_f(&group, &system)?;
            let h = remark_element(&group)?;
            Ok((data, f, h))
        });
    let (data, f, h) = match setup {
        Ok(s) => s,
        Err(e) => {
            checks.push(check("setup", || Err(e)));
            return SuiteReport::new("germ", &group, config, checks);
        }
    };
    let beta = p.period().len() as i64;
    let sig = |x: &RnElement| germ_signature(x, &p, &data, GERM_CAP);

    checks.push(check("periodic-nucleus", || {
        let names: Vec<String> = data
            .elements()
            .iter()
            .map(|w| group.format_word(w))
            .collect();
        let ok = names == ["id", "a"] && data.period_lcm() == 1;
        Ok((
            ok,
            format!(
                "elements {{{}}}, M = {}",
                names.join(", "),
                data.period_lcm()
            ),
        ))
    }));
    checks.push(check("f-signature", || {
        let s = sig(&f)?;
        let t = sig(&f.invert())?;
        let ok = s.nucleus_component.is_empty()
            && s.delta == beta
            && t.nucleus_component.is_empty()
            && t.delta == -beta;
        Ok((
            ok,
            format!(
                "f {}, f^-1 {}",
                signature_text(&group, &s),
                signature_text(&group, &t)
            ),
        ))
    }));
    checks.push(check("remark-element", || {
        let fixes = h.evaluate(&p)? == p;
        let s = sig(&h)?;
        let ok = fixes && group.format_word(&s.nucleus_component) == "a" && s.delta == 1;
        Ok((ok, s.render(&group)))
    }));

    let mut rng = sample::rng(config.seed);
    let stabilizers: Result<Vec<RnElement>> = (0..config.cases)
        .map(|_| sample::random_stabilizer(&mut rng, &group, &p, 3, false))
        .collect();
    let thompson: Result<Vec<RnElement>> = (0..config.cases)
        .map(|_| sample::random_stabilizer(&mut rng, &group, &p, 0, true))
        .collect();
    let pure_group = sample::group_stabilizers(&mut rng, &group, &p, 6, config.cases);

    checks.push(check("delta-additivity", || {
        let hs = stabilizers.clone()?;
        let mut failures = Vec::new();
        for pair in hs.chunks(2).filter(|c| c.len() == 2) {
            let (a, b) = (&pair[0], &pair[1]);
            let (sa, sb, sab) = (sig(a)?, sig(b)?, sig(&a.compose(b)?)?);
            if sab.delta != sa.delta + sb.delta {
                failures.push(format!("{} + {} != {}", sa.delta, sb.delta, sab.delta));
            }
        }
        Ok((
            failures.is_empty(),
            format!("{} pairs, {} failures", hs.len() / 2, failures.len()),
        ))
    }));
    checks.push(check("coset-witness", || {
        let hs = stabilizers.clone()?;
        let mut witnessed = 0;
        for pair in hs.chunks(2).filter(|c| c.len() == 2) {
            if coset_witness(&pair[0], &pair[1], &p, &f, &data, GERM_CAP)?.is_some() {
                witnessed += 1;
            }
        }
        Ok((
            true,
            format!("{witnessed} pairs in a common coset, all verified"),
        ))
    }));
    checks.push(check("index-two", || {
        let hs = stabilizers.clone()?;
        let mut realized = BTreeSet::new();
        for x in &hs {
            realized.insert(group.format_word(&sig(x)?.nucleus_component));
        }
        let names: Vec<String> = realized.into_iter().collect();
        let ok = names.len() == data.elements().len();
        Ok((
            ok,
            format!("nucleus components realized: {{{}}}", names.join(", ")),
        ))
    }));
    checks.push(check("signature-finiteness", || {
        let hs = stabilizers.clone()?;
        let modulus = data.period_lcm() as i64 * beta;
        let mut seen = BTreeSet::new();
        for x in &hs {
            let s = sig(x)?;
            seen.insert((s.component_index, s.delta.rem_euclid(modulus)));
        }
        let bound = data.elements().len() * modulus as usize;
        Ok((
            seen.len() <= bound,
            format!("{} classes, bound {bound}", seen.len()),
        ))
    }));
    checks.push(check("thompson-germs-differ", || {
        let ts = thompson.clone()?;
        let mut equal = 0;
        for t in &ts {
            if germ_equal(t, &h, &p, &data, GERM_CAP)? {
                equal += 1;
            }
        }
        Ok((
            equal == 0,
            format!(
                "{} of {} Thompson stabilizers share the germ",
                equal,
                ts.len()
            ),
        ))
    }));
    checks.push(check("group-stabilizers", || {
        let gs = pure_group.clone()?;
        let mut nonzero = 0;
        for g in &gs {
            if sig(g)?.delta != 0 {
                nonzero += 1;
            }
        }
        Ok((
            nonzero == 0,
            format!(
                "{} tree automorphisms fixing p, {} with nonzero delta",
                gs.len(),
                nonzero
            ),
        ))
    }));
    SuiteReport::new("germ", &group, config, checks)
}

fn point_in_cone(rng: &mut SampleRng, d: usize, cone: &Cone) -> RationalPoint {
    sample::random_point(rng, d, 3, 3).prepend(cone.address())
}

/// The stabilizer of `{(1)}` in the Grigorchuk group's RN group.
fn stab(config: &SuiteConfig) -> SuiteReport {
    let group = Arc::new(builtin::grigorchuk());
    let points: Vec<RationalPoint> = vec!["(1)".parse().expect("valid point")];
    let mut checks = Vec::new();
    let setup = separate_points(2, &points).and_then(|system| {
        let f = build_f(&group, &system)?;
        let e = build_e_prime(2, &system)?;
        Ok((system, f, e))
    });
    let (system, f, e) = match setup {
        Ok(s) => s,
        Err(err) => {
            checks.push(check("setup", || Err(err)));
            return SuiteReport::new("stab", &group, config, checks);
        }
    };
    let mut rng = sample::rng(config.seed);

    checks.push(check("nesting", || {
        Ok((
            check_nesting(&f, &system, 5)?,
            "E contains f(E) contains ... f^5(E)".to_string(),
        ))
    }));
    checks.push(check("points-in-e-prime", || {
        let ok = points
            .iter()
            .all(|p| e.e_prime.iter().any(|c| p.in_cone(c)));
        let names: Vec<String> = e.e_prime.iter().map(|c| c.to_string()).collect();
        Ok((ok, format!("E' = {{{}}}", names.join(", "))))
    }));
    checks.push(check("phi-homomorphism", || {
        let mut failures = 0;
        for _ in 0..config.cases {
            let a = sample::random_element(&mut rng, &group, 3, 3);
            let b = sample::random_element(&mut rng, &group, 3, 3);
            let lhs = phi(&a.compose(&b)?, &e)?;
            let rhs = phi(&a, &e)?.compose(&phi(&b, &e)?)?;
            if !lhs.equal(&rhs)? {
                failures += 1;
            }
        }
        Ok((
            failures == 0,
            format!("{} pairs, {failures} failures", config.cases),
        ))
    }));
    checks.push(check("phi-fixes-e-prime", || {
        let h = sample::random_element(&mut rng, &group, 3, 3);
        let image = phi(&h, &e)?;
        let mut moved = 0;
        for i in 0..5 {
            let q = point_in_cone(&mut rng, 2, &e.e_prime[i % e.e_prime.len()]);
            if image.evaluate(&q)? != q {
                moved += 1;
            }
        }
        Ok((
            moved == 0 && image.is_identity_on(&e.e_prime),
            format!("5 points of E', {moved} moved"),
        ))
    }));
    checks.push(check("phi-injective", || {
        let mut failures = 0;
        for i in 0..config.cases {
            let h = if i % 5 == 0 {
                RnElement::identity(group.clone())
            } else {
                sample::random_element(&mut rng, &group, 3, 3)
            };
            if phi(&h, &e)?.is_identity() != h.is_identity() {
                failures += 1;
            }
        }
        Ok((
            failures == 0,
            format!("{} elements, {failures} failures", config.cases),
        ))
    }));
    checks.push(check("kernel-exhaustion", || {
        let mut worst = 0;
        let mut missing = 0;
        for _ in 0..20 {
            let depth = rng.gen_range(1..=6);
            let guard: Vec<Cone> = points.iter().map(|p| Cone::new(p.prefix(depth))).collect();
            let h = sample::random_element_fixing(&mut rng, &group, &guard, 3, 3)?;
            match kernel_exhaustion_index(&h, &f, &system, 8)? {
                Some(i) => worst = worst.max(i),
                None => missing += 1,
            }
        }
        Ok((
            missing == 0,
            format!("20 planted elements, largest index {worst}, {missing} not exhausted"),
        ))
    }));
    SuiteReport::new("stab", &group, config, checks)
}

/// Group axioms and the action axiom on random elements.
fn laws(config: &SuiteConfig) -> SuiteReport {
    let group = config
        .group
        .clone()
        .unwrap_or_else(|| Arc::new(builtin::grigorchuk()));
    let mut rng = sample::rng(config.seed);
    let d = group.degree();
    let mut tallies = [0usize; 4];
    let mut error = None;
    for _ in 0..config.cases {
        let x = sample::random_element(&mut rng, &group, 3, 3);
        let y = sample::random_element(&mut rng, &group, 3, 3);
        let z = sample::random_element(&mut rng, &group, 3, 3);
        let p = sample::random_point(&mut rng, d, 3, 3);
        let outcome = (|| -> Result<[bool; 4]> {
            let id = RnElement::identity(group.clone());
            let assoc = x
                .compose(&y)?
                .compose(&z)?
                .equal(&x.compose(&y.compose(&z)?)?)?;
            let unit = x.compose(&id)?.equal(&x)? && id.compose(&x)?.equal(&x)?;
            let inverse =
                x.compose(&x.invert())?.is_identity() && x.invert().compose(&x)?.is_identity();
            let action = x.compose(&y)?.evaluate(&p)? == x.evaluate(&y.evaluate(&p)?)?;
            Ok([assoc, unit, inverse, action])
        })();
        match outcome {
            Ok(flags) => {
                for (t, ok) in tallies.iter_mut().zip(flags) {
                    *t += usize::from(!ok);
                }
            }
            Err(e) => error = Some(e.to_string()),
        }
    }
    let mut checks = Vec::new();
    for (name, failures) in ["associativity", "identity", "inverse", "action"]
        .into_iter()
        .zip(tallies)
    {
        let error = error.clone();
        checks.push(check(name, || match error {
            Some(e) => Ok((false, e)),
            None => Ok((
                failures == 0,
                format!("{} cases, {failures} failures", config.cases),
            )),
        }));
    }
    SuiteReport::new("laws", &group, config, checks)
}
