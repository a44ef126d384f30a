//! Verification suites and their JSON reports.
//!
//! Every rational is written as a `"p/q"` string. Object keys are sorted and
//! checks appear in a fixed order, so a report is byte-for-byte reproducible.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::dual::{
    ce_iso_de_rham_check, cutoff_for_degree, dual_pairing, kappa, loc_act_check, parallelizability_certificate,
    DualFunctional,
};
use crate::homology::{
    koszul_quotient_exactness, lie_cohomology, lie_homology, poincare_duality_check, ModuleAction, Side,
};
use crate::hopf::{hochschild_ext_compare, inverse_process_check, verify_hopf_axioms, Bimodule, HopfError, TruncatedHopf};
use crate::lie::{
    analytic_functionals_stably_flat, derived_series, diagonal_endomorphism_solve, is_nilpotent, is_solvable,
    killing_form, lower_central_series, positive_grading, staged_bump_stages, validate_lie_algebra,
    verify_contraction_family, verify_weight_structure, HomotopyFamily, LieAlgebra, WeightKind, WeightStructure,
};
use crate::linalg::Matrix;
use crate::pbw::{default_weights, quotient_basis, TruncationContext};
use crate::poly::Poly;
use crate::specfile::AlgebraSpec;
use crate::weights::{
    dilate, entire_diagnostics, factorial_comparison_check, homogeneous_norm, validate_graded_seminorm,
    validate_weight_sequence, Entireness, GradedSeminorm, WeightSequence,
};
use crate::Rational;

pub const SCHEMA: &str = "envlab-report/1";

pub const DEFAULT_CUTOFF: u64 = 4;
pub const DEFAULT_DEGREE: u64 = 3;
pub const DEFAULT_WEIGHT_CUTOFF: u64 = 8;

const MAX_CUTOFF: u64 = 24;
const MAX_DEGREE: u64 = 8;
const MAX_WEIGHT_CUTOFF: u64 = 24;

/// Hochschild/Ext is compared in degrees `0..=HOCHSCHILD_DEGREE`.
const HOCHSCHILD_DEGREE: usize = 2;
/// Graded seminorms use `U/J_{n+1}` with this `n`, sampled to this degree.
const SEMINORM_DESIGNATED: u64 = 2;
const SEMINORM_SAMPLE: u64 = 3;
const DILATION_SAMPLES: usize = 50;
const KAPPA_SAMPLES: usize = 20;
const SEED: u64 = 0x656e_766c_6162;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Structure,
    Series,
    Hopf,
    Cohomology,
    Koszul,
    Parallelize,
    Contract,
    Weights,
    All,
}

impl Suite {
    pub const COMPONENTS: [Suite; 8] = [
        Suite::Structure,
        Suite::Series,
        Suite::Hopf,
        Suite::Cohomology,
        Suite::Koszul,
        Suite::Parallelize,
        Suite::Contract,
        Suite::Weights,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Structure => "structure",
            Suite::Series => "series",
            Suite::Hopf => "hopf",
            Suite::Cohomology => "cohomology",
            Suite::Koszul => "koszul",
            Suite::Parallelize => "parallelize",
            Suite::Contract => "contract",
            Suite::Weights => "weights",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = SuiteError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::COMPONENTS
            .iter()
            .chain(std::iter::once(&Suite::All))
            .find(|x| x.name() == s)
            .copied()
            .ok_or_else(|| SuiteError::UnknownSuite(s.to_string()))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SuiteError {
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("weights: {0}")]
    Weights(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteParams {
    pub cutoff: u64,
    pub degree: u64,
    pub weight_cutoff: u64,
    /// Overrides the weights in the spec file.
    pub weights: Option<WeightStructure>,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams { cutoff: DEFAULT_CUTOFF, degree: DEFAULT_DEGREE, weight_cutoff: DEFAULT_WEIGHT_CUTOFF, weights: None }
    }
}

impl SuiteParams {
    pub fn validate(&self) -> Result<(), SuiteError> {
        let check = |name: &str, v: u64, lo: u64, hi: u64| {
            if v < lo || v > hi {
                Err(SuiteError::ParameterOutOfRange(format!("{name} = {v}, expected {lo}..={hi}")))
            } else {
                Ok(())
            }
        };
        check("cutoff", self.cutoff, 0, MAX_CUTOFF)?;
        check("degree", self.degree, 1, MAX_DEGREE)?;
        check("weight cutoff", self.weight_cutoff, 1, MAX_WEIGHT_CUTOFF)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        }
    }

    fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub status: Status,
    pub resource_cap: bool,
    pub reason: Option<String>,
    pub details: Value,
}

impl Check {
    fn new(suite: Suite, name: &str, ok: bool, details: Value) -> Self {
        Check { suite, name: name.to_string(), status: Status::from_bool(ok), resource_cap: false, reason: None, details }
    }

    fn fail(suite: Suite, name: &str, reason: impl Into<String>) -> Self {
        Check {
            suite,
            name: name.to_string(),
            status: Status::Fail,
            resource_cap: false,
            reason: Some(reason.into()),
            details: Value::Null,
        }
    }

    fn skipped(suite: Suite, name: &str, reason: impl Into<String>, details: Value) -> Self {
        Check { suite, name: name.to_string(), status: Status::Skipped, resource_cap: false, reason: Some(reason.into()), details }
    }

    fn to_json(&self) -> Value {
        json!({
            "suite": self.suite.name(),
            "name": self.name,
            "status": self.status.name(),
            "resource_cap": self.resource_cap,
            "reason": self.reason,
            "details": self.details,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub suite: Suite,
    pub algebra: Value,
    pub parameters: Value,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn count(&self, status: Status) -> usize {
        self.checks.iter().filter(|c| c.status == status).count()
    }

    /// 0 all pass, 1 some check failed, 3 a resource cap forced a skip.
    pub fn exit_code(&self) -> i32 {
        if self.count(Status::Fail) > 0 {
            1
        } else if self.checks.iter().any(|c| c.resource_cap) {
            3
        } else {
            0
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": SCHEMA,
            "suite": self.suite.name(),
            "algebra": self.algebra,
            "parameters": self.parameters,
            "checks": self.checks.iter().map(Check::to_json).collect::<Vec<_>>(),
            "summary": {
                "pass": self.count(Status::Pass),
                "fail": self.count(Status::Fail),
                "skipped": self.count(Status::Skipped),
                "exit_code": self.exit_code(),
            },
        })
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
        s.push('\n');
        s
    }
}

fn q(x: &Rational) -> String {
    x.to_string()
}

fn matrix_json(m: &Matrix) -> Value {
    Value::Array(m.iter().map(|row| Value::Array(row.iter().map(|x| Value::String(q(x))).collect())).collect())
}

fn poly_matrix_json(m: &[Vec<Poly>]) -> Value {
    Value::Array(m.iter().map(|row| Value::Array(row.iter().map(|p| Value::String(p.to_string())).collect())).collect())
}

fn weights_json(ws: &WeightStructure) -> Value {
    json!({ "kind": match ws.kind { WeightKind::Grading => "grading", WeightKind::Filtration => "filtration" }, "weights": ws.weights })
}

struct Runner<'a> {
    a: &'a LieAlgebra,
    params: &'a SuiteParams,
    /// Weights in force, or the reason there are none.
    weights: Result<WeightStructure, String>,
    checks: Vec<Check>,
}

pub fn run_suite(spec: &AlgebraSpec, suite: Suite, params: &SuiteParams) -> Result<Report, SuiteError> {
    params.validate()?;
    let a = &spec.algebra;
    let given = params.weights.as_ref().or(spec.weights.as_ref());
    if let Some(ws) = given {
        if ws.weights.len() != a.dim() {
            return Err(SuiteError::Weights(format!("expected {} weights, got {}", a.dim(), ws.weights.len())));
        }
    }
    let weights = default_weights(a, given).map_err(|e| e.to_string());
    let mut runner = Runner { a, params, weights, checks: Vec::new() };
    let suites: Vec<Suite> = if suite == Suite::All { Suite::COMPONENTS.to_vec() } else { vec![suite] };
    for s in suites {
        match s {
            Suite::Structure => runner.structure(),
            Suite::Series => runner.series(),
            Suite::Hopf => runner.hopf(),
            Suite::Cohomology => runner.cohomology(),
            Suite::Koszul => runner.koszul(),
            Suite::Parallelize => runner.parallelize(),
            Suite::Contract => runner.contract(),
            Suite::Weights => runner.weights_suite(),
            Suite::All => unreachable!(),
        }
    }
    let algebra = json!({
        "name": a.name(),
        "dim": a.dim(),
        "labels": a.labels(),
        "brackets": a.structure_terms().iter().map(|(i, j, k, c)| json!([i, j, k, q(c)])).collect::<Vec<_>>(),
        "weights": runner.weights.as_ref().ok().map(weights_json),
    });
    let parameters = json!({
        "cutoff": params.cutoff,
        "degree": params.degree,
        "weight_cutoff": params.weight_cutoff,
    });
    Ok(Report { suite, algebra, parameters, checks: runner.checks })
}

impl Runner<'_> {
    fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    fn need_weights(&mut self, suite: Suite, name: &str) -> Option<WeightStructure> {
        match &self.weights {
            Ok(w) => Some(w.clone()),
            Err(reason) => {
                let reason = reason.clone();
                self.push(Check::skipped(suite, name, reason, Value::Null));
                None
            }
        }
    }

    fn structure(&mut self) {
        let s = Suite::Structure;
        let v = validate_lie_algebra(self.a);
        self.push(Check::new(s, "lie_axioms", v.is_valid(), serde_json::to_value(&v).expect("serializable")));
        let k = killing_form(self.a);
        self.push(Check::new(
            s,
            "killing_form",
            true,
            json!({ "matrix": matrix_json(&k.matrix), "nondegenerate": k.nondegenerate, "zero": k.is_zero() }),
        ));
        if let Ok(ws) = &self.weights {
            let r = verify_weight_structure(self.a, ws);
            self.push(Check::new(s, "weight_structure", r.is_valid(), serde_json::to_value(&r).expect("serializable")));
        }
    }

    fn series(&mut self) {
        let s = Suite::Series;
        let lcs = lower_central_series(self.a);
        self.push(Check::new(
            s,
            "lower_central_series",
            true,
            json!({ "dims": lcs.dims(), "nilpotent": is_nilpotent(self.a) }),
        ));
        let ds = derived_series(self.a);
        self.push(Check::new(s, "derived_series", true, json!({ "dims": ds.dims(), "solvable": is_solvable(self.a) })));
        self.push(Check::new(
            s,
            "analytic_functionals_stably_flat",
            true,
            json!({ "value": analytic_functionals_stably_flat(self.a) }),
        ));
    }

    fn hopf(&mut self) {
        let s = Suite::Hopf;
        let Some(ws) = self.need_weights(s, "hopf_axioms") else { return };
        let w = self.params.cutoff;
        let h = match TruncatedHopf::for_algebra(self.a, &ws, w) {
            Ok(h) => h,
            Err(e) => return self.push(Check::fail(s, "hopf_axioms", e.to_string())),
        };
        let r = verify_hopf_axioms(&h);
        let axioms: Vec<Value> = r
            .axioms
            .iter()
            .chain([&r.cocommutative, &r.antipode_involution])
            .map(|c| json!({ "name": c.name, "holds": c.holds, "max_violation": q(&c.max_violation), "witness": c.witness }))
            .collect();
        self.push(Check::new(s, "hopf_axioms", r.all_hold(), json!({ "cutoff": w, "dim": r.dim, "axioms": axioms })));
        let ip = inverse_process_check(&h);
        self.push(Check::new(
            s,
            "inverse_process",
            ip.holds(),
            json!({
                "phi_psi_identity": ip.phi_psi_identity,
                "psi_phi_identity": ip.psi_phi_identity,
                "mu_e_equals_eta_epsilon": ip.mu_e_equals_eta_epsilon,
                "mu_e_failures": ip.mu_e_failures,
            }),
        ));
        match hochschild_ext_compare(&h, &Bimodule::regular(&h), HOCHSCHILD_DEGREE) {
            Ok(c) => self.push(Check::new(
                s,
                "hochschild_ext",
                c.agree(),
                json!({ "cutoff": w, "module": "regular", "hochschild": c.hochschild, "ext": c.ext, "cochain_dims": c.cochain_dims }),
            )),
            Err(HopfError::SizeCap { degree, dim, cap }) => {
                let mut c = Check::skipped(
                    s,
                    "hochschild_ext",
                    format!("cochain space in degree {degree} has dimension {dim}, above the cap {cap}"),
                    json!({ "cutoff": w, "degree": degree, "dim": dim, "cap": cap }),
                );
                c.resource_cap = true;
                self.push(c);
            }
            Err(e) => self.push(Check::fail(s, "hochschild_ext", e.to_string())),
        }
    }

    fn cohomology(&mut self) {
        let s = Suite::Cohomology;
        let a = self.a;
        let n = a.dim();
        let left = ModuleAction::trivial(a, Side::Left);
        let right = ModuleAction::trivial(a, Side::Right);
        let (coh, hom) = match (lie_cohomology(a, &left), lie_homology(a, &right)) {
            (Ok(c), Ok(h)) => (c, h),
            (Err(e), _) | (_, Err(e)) => return self.push(Check::fail(s, "betti_trivial", e.to_string())),
        };
        let euler = coh.euler_characteristic();
        let abelianization = n - lower_central_series(a).terms.get(1).map_or(0, |t| t.dim());
        let b1_ok = coh.betti.get(1).copied() == Some(abelianization) || n == 0;
        let euler_ok = n == 0 || euler == 0;
        self.push(Check::new(
            s,
            "betti_trivial",
            b1_ok && euler_ok,
            json!({
                "cohomology": coh.betti,
                "homology": hom.betti,
                "euler_characteristic": euler,
                "abelianization_dim": abelianization,
            }),
        ));
        match poincare_duality_check(a, &left) {
            Ok(p) => self.push(Check::new(
                s,
                "poincare_duality",
                p.holds(),
                json!({
                    "unimodular": p.unimodular,
                    "cohomology": p.cohomology,
                    "twisted_homology_reversed": p.twisted_homology_reversed,
                }),
            )),
            Err(e) => self.push(Check::fail(s, "poincare_duality", e.to_string())),
        }
    }

    fn koszul(&mut self) {
        let s = Suite::Koszul;
        let Some(ws) = self.need_weights(s, "koszul_exactness") else { return };
        let mut rows = Vec::new();
        let mut ok = true;
        for w in 0..=self.params.cutoff {
            match koszul_quotient_exactness(self.a, &ws, w) {
                Ok(c) => {
                    ok &= c.exact() && c.weight_nondecreasing;
                    rows.push(json!({ "cutoff": w, "dims": c.dims, "homology": c.homology.betti, "exact": c.exact() }));
                }
                Err(e) => return self.push(Check::fail(s, "koszul_exactness", e.to_string())),
            }
        }
        self.push(Check::new(s, "koszul_exactness", ok, Value::Array(rows)));
    }

    fn parallelize(&mut self) {
        let s = Suite::Parallelize;
        let Some(ws) = self.need_weights(s, "parallelizability") else { return };
        if !is_nilpotent(self.a) {
            return self.push(Check::skipped(s, "parallelizability", "algebra is not nilpotent", Value::Null));
        }
        let d = self.params.degree;
        // the φ entries need every z_j resolved
        let w = self.params.cutoff.max(u64::from(ws.max_weight()));
        let ctx = match TruncationContext::new(self.a, &ws, w) {
            Ok(c) => c,
            Err(e) => return self.push(Check::fail(s, "parallelizability", e.to_string())),
        };
        match parallelizability_certificate(&ctx, d) {
            Ok(c) => self.push(Check::new(
                s,
                "parallelizability",
                c.holds(),
                json!({
                    "cutoff": w,
                    "degree": d,
                    "phi": poly_matrix_json(&c.phi),
                    "inverse": c.inverse.as_deref().map(poly_matrix_json),
                    "unitriangular": c.unitriangular,
                    "partials_dual": c.partials_dual,
                    "violations": c.violations,
                }),
            )),
            Err(e) => self.push(Check::fail(s, "parallelizability", e.to_string())),
        }
        match loc_act_check(&ctx) {
            Ok(l) => self.push(Check::new(s, "linear_coordinates", l.identity, json!({ "constants": matrix_json(&l.constants) }))),
            Err(e) => self.push(Check::fail(s, "linear_coordinates", e.to_string())),
        }
        let w_iso = w.max(cutoff_for_degree(&ws.weights, d));
        let iso = TruncationContext::new(self.a, &ws, w_iso)
            .map_err(|e| e.to_string())
            .and_then(|ctx| ce_iso_de_rham_check(&ctx, d).map_err(|e| e.to_string()));
        match iso {
            Ok(c) => self.push(Check::new(
                s,
                "ce_de_rham",
                c.holds(),
                json!({
                    "cutoff": w_iso,
                    "degree": d,
                    "polynomials": c.polynomials_checked,
                    "forms": c.forms_checked,
                    "degree0": c.degree0,
                    "degree1": c.degree1,
                    "failures": c.failures,
                }),
            )),
            Err(e) => self.push(Check::fail(s, "ce_de_rham", e)),
        }
        self.kappa_sample();
    }

    fn kappa_sample(&mut self) {
        let s = Suite::Parallelize;
        let n = self.a.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let pool = quotient_basis(&vec![1; n], 2);
        let random = |rng: &mut ChaCha8Rng| {
            let terms = (0..3).map(|_| {
                let a = pool[rng.gen_range(0..pool.len())].clone();
                (a, Rational::new(rng.gen_range(-4..=4).into(), rng.gen_range(1..=3).into()))
            });
            DualFunctional::from_values(n, terms)
        };
        let mut failures = 0;
        for _ in 0..KAPPA_SAMPLES {
            let f = random(&mut rng);
            let g = random(&mut rng);
            if kappa(&f.convolve(&g)) != kappa(&f).mul(&kappa(&g)) {
                failures += 1;
            }
        }
        let orthogonal = pool.iter().all(|a| {
            pool.iter().all(|b| {
                let v = dual_pairing(a, &Poly::monomial(b.clone(), Rational::one()));
                if a == b {
                    v == Rational::from_integer(crate::pbw::multi_factorial(a))
                } else {
                    v.is_zero()
                }
            })
        });
        self.push(Check::new(
            s,
            "kappa_duality",
            failures == 0 && orthogonal,
            json!({ "samples": KAPPA_SAMPLES, "multiplicativity_failures": failures, "pairing_orthogonal": orthogonal }),
        ));
    }

    fn contract(&mut self) {
        let s = Suite::Contract;
        let a = self.a;
        let k = killing_form(a);
        if let Some(g) = positive_grading(a) {
            match verify_contraction_family(a, &HomotopyFamily::graded(&g)) {
                Ok(c) => self.push(Check::new(
                    s,
                    "contraction",
                    c.holds(),
                    json!({ "family": "graded", "grading": g, "certificate": serde_json::to_value(&c).expect("serializable") }),
                )),
                Err(e) => self.push(Check::fail(s, "contraction", e.to_string())),
            }
        } else if let Some(st) = staged_bump_stages(a) {
            match verify_contraction_family(a, &HomotopyFamily::staged_bump(&st)) {
                Ok(c) => self.push(Check::new(
                    s,
                    "contraction",
                    c.holds(),
                    json!({ "family": "bump", "stages": st, "certificate": serde_json::to_value(&c).expect("serializable") }),
                )),
                Err(e) => self.push(Check::fail(s, "contraction", e.to_string())),
            }
        } else {
            let reason = if is_nilpotent(a) {
                "no graded contraction: no positive grading exists; no staged bump family found"
            } else {
                "no graded contraction: no positive grading exists"
            };
            self.push(Check::skipped(
                s,
                "contraction",
                reason,
                json!({ "killing_nondegenerate": k.nondegenerate, "non_contractible_evidence": k.nondegenerate }),
            ));
        }
        if is_nilpotent(a) && a.dim() > 0 {
            // entries on basis vectors outside [g,g] are asked to be nonzero
            let derived = lower_central_series(a).terms.get(1).cloned();
            let nonzero: Vec<usize> = (0..a.dim())
                .filter(|&i| {
                    let mut e = vec![Rational::zero(); a.dim()];
                    e[i] = Rational::one();
                    derived.as_ref().is_none_or(|d| !d.contains(&e))
                })
                .collect();
            let sol = diagonal_endomorphism_solve(a, &nonzero);
            self.push(Check::new(
                s,
                "diagonal_endomorphisms",
                true,
                json!({
                    "nonzero": nonzero,
                    "rigid": sol.rigid,
                    "lattice_index": sol.lattice_index,
                    "description": sol.describe(a.labels()),
                }),
            ));
        }
        self.push(Check::new(
            s,
            "killing_form",
            true,
            json!({ "nondegenerate": k.nondegenerate, "zero": k.is_zero() }),
        ));
    }

    fn weights_suite(&mut self) {
        let s = Suite::Weights;
        let n = self.a.dim();
        let wc = self.params.weight_cutoff;

        let fact = WeightSequence::factorial(n);
        let r = validate_weight_sequence(&fact, wc);
        let diag = entire_diagnostics(&fact, &[Rational::one()], wc);
        self.push(Check::new(
            s,
            "factorial_sequence",
            r.is_valid() && diag.known_verdict == Some(Entireness::Entire),
            json!({
                "cutoff": wc,
                "pairs_checked": r.pairs_checked,
                "violations": r.violations.len(),
                "shell_sums_r1": diag.rows[0].shell_sums.iter().map(q).collect::<Vec<_>>(),
                "divergence_evidence_r1": diag.rows[0].divergence_evidence,
                "verdict": "entire",
            }),
        ));

        let ones_w = self.weights.as_ref().map(|w| w.weights.clone()).unwrap_or_else(|_| vec![1; n]);
        let ones = WeightSequence::ones(ones_w);
        let r = validate_weight_sequence(&ones, wc);
        let diag = entire_diagnostics(&ones, &[Rational::one()], wc);
        self.push(Check::new(
            s,
            "ones_sequence",
            r.is_valid() && diag.rows[0].divergence_evidence,
            json!({
                "cutoff": wc,
                "pairs_checked": r.pairs_checked,
                "violations": r.violations.len(),
                "shell_sums_r1": diag.rows[0].shell_sums.iter().map(q).collect::<Vec<_>>(),
                "divergence_evidence_r1": diag.rows[0].divergence_evidence,
                "verdict": "not entire",
            }),
        ));

        let fc = factorial_comparison_check(n, wc);
        self.push(Check::new(
            s,
            "factorial_comparison",
            fc.holds(),
            json!({ "cutoff": wc, "constant": fc.constant, "checked": fc.checked, "failures": fc.failures }),
        ));

        let dil_w = self.weights.as_ref().map(|w| w.weights.clone()).unwrap_or_else(|_| vec![1; n]);
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 1);
        let mut bad = 0;
        let rand_q = |rng: &mut ChaCha8Rng| Rational::new(rng.gen_range(-20..=20).into(), rng.gen_range(1..=9).into());
        for _ in 0..DILATION_SAMPLES {
            let z = rand_q(&mut rng);
            let t: Vec<Rational> = (0..n).map(|_| rand_q(&mut rng)).collect();
            let lhs = homogeneous_norm(&dilate(&t, &dil_w, &z), &dil_w);
            let rhs = homogeneous_norm(&t, &dil_w).scale(&z);
            if lhs != rhs {
                bad += 1;
            }
        }
        self.push(Check::new(
            s,
            "dilation",
            bad == 0,
            json!({ "samples": DILATION_SAMPLES, "weights": dil_w, "failures": bad }),
        ));

        let grading = match &self.weights {
            Ok(w) if w.kind == WeightKind::Grading => Some(w.clone()),
            _ => positive_grading(self.a).map(WeightStructure::grading),
        };
        match grading {
            Some(g) => match validate_graded_seminorm(self.a, &g, &GradedSeminorm::quotient(SEMINORM_DESIGNATED), SEMINORM_SAMPLE) {
                Ok(r) => self.push(Check::new(
                    s,
                    "graded_seminorm",
                    r.holds(),
                    json!({
                        "grading": g.weights,
                        "designated": r.designated,
                        "sample_degree": r.cutoff,
                        "pairs_checked": r.pairs_checked,
                        "violations": r.violations.len(),
                        "norm_at_designated": r.norm_at_designated,
                    }),
                )),
                Err(e) => self.push(Check::fail(s, "graded_seminorm", e.to_string())),
            },
            None => self.push(Check::skipped(s, "graded_seminorm", "no positive grading", Value::Null)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn run(name: &str, suite: Suite) -> Report {
        run_suite(&corpus::spec(name).unwrap(), suite, &SuiteParams::default()).unwrap()
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::COMPONENTS {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!(matches!("nope".parse::<Suite>(), Err(SuiteError::UnknownSuite(_))));
    }

    #[test]
    fn h3_cohomology_report() {
        let r = run("heisenberg3", Suite::Cohomology);
        let b = r.check("betti_trivial").unwrap();
        assert_eq!(b.status, Status::Pass);
        assert_eq!(b.details["cohomology"], json!([1, 2, 2, 1]));
        assert_eq!(r.check("poincare_duality").unwrap().status, Status::Pass);
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn sl2_contract_report() {
        let r = run("sl2", Suite::Contract);
        let c = r.check("contraction").unwrap();
        assert_eq!(c.status, Status::Skipped);
        assert_eq!(c.reason.as_deref(), Some("no graded contraction: no positive grading exists"));
        assert_eq!(c.details["killing_nondegenerate"], json!(true));
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn parameters_are_range_checked() {
        let p = SuiteParams { degree: 0, ..SuiteParams::default() };
        assert!(matches!(
            run_suite(&corpus::spec("abelian1").unwrap(), Suite::Series, &p),
            Err(SuiteError::ParameterOutOfRange(_))
        ));
    }

    #[test]
    fn reports_are_deterministic() {
        let a = run("heisenberg3", Suite::Weights).to_json_string();
        let b = run("heisenberg3", Suite::Weights).to_json_string();
        assert_eq!(a, b);
        assert!(a.contains(SCHEMA));
    }
}
