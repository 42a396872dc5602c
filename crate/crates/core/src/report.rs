//! Check orchestration and JSON reports.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::centermod;
use crate::freenc::{NCPoly, F_LETTER};
use crate::poisson::{self, PoissonKind};
use crate::qfun::{self, AlgebraKind, GroupModel};
use crate::rmat::{build_r, check_cybe, check_hecke, check_qybe, conj_flip, RMatrixData, Series, SeriesId};
use crate::twistmod;
use crate::exactalg::{QMatrix, Rat};

pub const TOOL: &str = "qgw";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Conventions every report depends on; its hash changes whenever one does.
pub const CONVENTIONS: &str = "\
R(A) = q sum e_ii(x)e_ii + sum_{i!=j} e_ii(x)e_jj + (q-q^-1) sum_{i<j} e_ij(x)e_ji
R(BCD) = flip-conjugated standard orthogonal/symplectic R in the basic representation
FRT: R T1 T2 = T2 T1 R
RE: R21 K1 R12 K2 = K2 R21 K1 R12
B: singlet eigenvector of flip.R, first nonzero entry 1
r = (1/2) R'(1); r- and Omega are the flip-skew and flip-symmetric parts
twist: G = R[lower 1, upper 2] . R^-1[upper 1, upper 2]; Omega_n^-1 = (Omega_m^-1 (x) Omega_k^-1) op((D^m (x) D^k) G)
DS: X1 X2 r - r X1 X2; STS: X1X2 r- + r- X1X2 - X1 r- X2 - X2 r- X1 + X2 Omega X1 - X1 Omega X2
letters: f first, then T^i_j row-major; words ordered by length, then index
coefficients: c*q^k terms, ascending exponents";

pub fn convention_hash() -> String {
    hex::encode(Sha256::digest(CONVENTIONS.as_bytes()))
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Compute(String),
}

fn compute<E: fmt::Display>(e: E) -> ReportError {
    ReportError::Compute(e.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CheckKind {
    Qybe,
    Cybe,
    Flatness,
    Twist,
    Jacobi,
    Semiclassical,
    Center,
    Freeness,
}

impl CheckKind {
    pub const ALL: [CheckKind; 8] = [
        CheckKind::Qybe,
        CheckKind::Cybe,
        CheckKind::Flatness,
        CheckKind::Twist,
        CheckKind::Jacobi,
        CheckKind::Semiclassical,
        CheckKind::Center,
        CheckKind::Freeness,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CheckKind::Qybe => "qybe",
            CheckKind::Cybe => "cybe",
            CheckKind::Flatness => "flatness",
            CheckKind::Twist => "twist",
            CheckKind::Jacobi => "jacobi",
            CheckKind::Semiclassical => "semiclassical",
            CheckKind::Center => "center",
            CheckKind::Freeness => "freeness",
        }
    }
}

impl FromStr for CheckKind {
    type Err = ReportError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CheckKind::ALL
            .iter()
            .copied()
            .find(|c| c.name() == s)
            .ok_or_else(|| ReportError::Config(format!("unknown check {s}")))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub series: Series,
    pub rank: usize,
    pub algebra: Option<AlgebraKind>,
    pub model: Option<GroupModel>,
    pub max_degree: Option<usize>,
    pub seed: u64,
}

impl RunConfig {
    pub fn new(series: Series, rank: usize) -> Self {
        RunConfig { series, rank, algebra: None, model: None, max_degree: None, seed: 0 }
    }

    pub fn id(&self) -> Result<SeriesId, ReportError> {
        SeriesId::new(self.series, self.rank).map_err(|e| ReportError::Config(e.to_string()))
    }

    fn default_model(&self) -> GroupModel {
        if self.series == Series::A {
            GroupModel::Free
        } else {
            GroupModel::Sharp
        }
    }

    fn echo(&self) -> Value {
        json!({
            "series": self.series.to_string(),
            "rank": self.rank,
            "algebra": self.algebra.map(|a| a.to_string()),
            "model": self.model.map(|m| m.to_string()),
            "max_degree": self.max_degree,
            "seed": self.seed,
        })
    }
}

/// Result of one check.
#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub kind: CheckKind,
    pub pass: bool,
    pub detail: Value,
}

fn verdict(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "fail"
    }
}

pub fn build_rdata(cfg: &RunConfig) -> Result<Arc<RMatrixData>, ReportError> {
    let id = cfg.id()?;
    build_r(id).map(Arc::new).map_err(|e| ReportError::Config(e.to_string()))
}

/// Requested degree, defaulting to `default`; `needed_extra` extra degrees must fit in the cap.
fn check_cap(cfg: &RunConfig, id: &SeriesId, needed_extra: usize, default: usize) -> Result<usize, ReportError> {
    let d = cfg.max_degree.unwrap_or(default);
    if d + needed_extra > id.default_cap() + 1 {
        return Err(ReportError::Config(format!(
            "--max-degree {d} exceeds the cap {} for {}",
            id.default_cap() + 1 - needed_extra,
            id.label()
        )));
    }
    Ok(d)
}

fn qybe(rd: &RMatrixData) -> Result<CheckOutcome, ReportError> {
    let q = check_qybe(&rd.r).map_err(compute)?;
    let one = Rat::from_integer(1.into());
    let lim = rd.r.evaluate_at(&one).map_err(compute)?;
    let n2 = rd.r.rows();
    let identity = (0..n2).all(|i| (0..n2).all(|j| lim[i][j] == if i == j { one.clone() } else { Rat::from_integer(0.into()) }));
    let hecke = if rd.id.series == Series::A { Some(check_hecke(&rd.r).map_err(compute)?) } else { None };
    let pass = q && identity && hecke.unwrap_or(true);
    Ok(CheckOutcome {
        kind: CheckKind::Qybe,
        pass,
        detail: json!({
            "qybe": verdict(q),
            "classical_limit_identity": verdict(identity),
            "hecke": hecke.map(verdict),
            "nonzero_entries": rd.r.nonzero_count(),
        }),
    })
}

fn cybe(rd: &RMatrixData) -> Result<CheckOutcome, ReportError> {
    let n = rd.n();
    let c = check_cybe(&rd.r_classical).map_err(compute)?;
    let om = conj_flip(&rd.omega_rep, n) == rd.omega_rep;
    let rm = conj_flip(&rd.r_minus, n) == rd.r_minus.scale(&crate::exactalg::QScalar::from_int(-1));
    let shifted = &rd.r_classical + &QMatrix::identity(n * n);
    let shift_ok = check_cybe(&shifted).map_err(compute)?;
    let pass = c && om && rm && shift_ok;
    Ok(CheckOutcome {
        kind: CheckKind::Cybe,
        pass,
        detail: json!({
            "cybe": verdict(c),
            "omega_flip_symmetric": verdict(om),
            "r_minus_flip_antisymmetric": verdict(rm),
            "cybe_after_central_shift": verdict(shift_ok),
        }),
    })
}

fn flatness(cfg: &RunConfig, rd: &Arc<RMatrixData>) -> Result<CheckOutcome, ReportError> {
    let d = check_cap(cfg, &rd.id, 0, rd.id.default_cap())?;
    let kinds = match cfg.algebra {
        Some(k) => vec![k],
        None => vec![AlgebraKind::Frt, AlgebraKind::Re],
    };
    let model = cfg.model.unwrap_or_else(|| cfg.default_model());
    let classical = qfun::presentation(rd.clone(), AlgebraKind::Classical, model).map_err(compute)?;
    let gc = classical.quotient(d);
    let mut out = serde_json::Map::new();
    let mut pass = true;
    for k in kinds {
        let pres = qfun::presentation(rd.clone(), k, model).map_err(compute)?;
        let gq = pres.quotient(d);
        let rep = qfun::flatness_from(&pres, &gq, &gc).map_err(compute)?;
        pass &= rep.pass;
        out.insert(
            k.to_string(),
            json!({
                "dims": rep.quantum_dims(),
                "classical_dims": rep.classical_dims(),
                "f_regular": rep.f_regular,
                "result": verdict(rep.pass),
            }),
        );
    }
    let mut detail = json!({ "model": model.to_string(), "max_degree": d, "algebras": out });
    if rd.id.series != Series::A && model == GroupModel::Sharp {
        let implied = qfun::classical_metric_implies_det(rd).map_err(compute)?;
        detail["determinant_relation_used"] = json!(false);
        detail["metric_relations_imply_det_minus_f_n"] = json!(implied);
    }
    Ok(CheckOutcome { kind: CheckKind::Flatness, pass, detail })
}

fn twist(rd: &Arc<RMatrixData>) -> Result<CheckOutcome, ReportError> {
    let rep = twistmod::verify_twist_correspondence(rd).map_err(compute)?;
    Ok(CheckOutcome { kind: CheckKind::Twist, pass: rep.pass, detail: serde_json::to_value(&rep).unwrap() })
}

fn jacobi(cfg: &RunConfig, rd: &Arc<RMatrixData>) -> Result<CheckOutcome, ReportError> {
    let kinds = if rd.id.series == Series::A { vec![PoissonKind::Ds, PoissonKind::Sts] } else { vec![PoissonKind::Sts] };
    let mut out = serde_json::Map::new();
    let mut pass = true;
    for k in kinds {
        let spec = poisson::bracket_table(rd, k);
        let two_routes = match k {
            PoissonKind::Ds => poisson::ds_bracket_matrix_form(rd).table() == spec.table(),
            PoissonKind::Sts => poisson::sts_bracket_matrix_form(rd).table() == spec.table(),
        };
        let shift = poisson::shifted_table(rd, k, &Rat::from_integer(1.into())).table() == spec.table();
        let rep = poisson::jacobi_check_on_variety(&spec, 20, cfg.seed).map_err(compute)?;
        let equivariance = match k {
            PoissonKind::Sts => {
                let pts = centermod::group_points(rd, 3, cfg.seed).map_err(compute)?;
                Some(poisson::conjugation_check(rd, &pts).map_err(compute)?)
            }
            PoissonKind::Ds => None,
        };
        let ok = rep.pass && two_routes && shift && equivariance.as_ref().map_or(true, |e| e.pass);
        pass &= ok;
        out.insert(
            k.to_string(),
            json!({
                "jacobi": serde_json::to_value(&rep).unwrap(),
                "two_routes_agree": two_routes,
                "central_shift_invariant": shift,
                "antisymmetric": spec.is_antisymmetric(),
                "conjugation": equivariance.map(|e| serde_json::to_value(&e).unwrap()),
                "result": verdict(ok),
            }),
        );
    }
    Ok(CheckOutcome { kind: CheckKind::Jacobi, pass, detail: Value::Object(out) })
}

fn semiclassical(cfg: &RunConfig, rd: &Arc<RMatrixData>) -> Result<CheckOutcome, ReportError> {
    let model = cfg.model.unwrap_or_else(|| cfg.default_model());
    let classical = qfun::presentation(rd.clone(), AlgebraKind::Classical, model).map_err(compute)?;
    let gc = classical.quotient(2);
    let mut out = serde_json::Map::new();
    let mut constants = Vec::new();
    let mut pass = true;
    for (k, b) in [(AlgebraKind::Frt, PoissonKind::Ds), (AlgebraKind::Re, PoissonKind::Sts)] {
        let pres = qfun::presentation(rd.clone(), k, model).map_err(compute)?;
        let gq = pres.quotient(2);
        let spec = poisson::bracket_table(rd, b);
        let rep = poisson::semiclassical_compare(&pres, &gq, &gc, &spec).map_err(compute)?;
        pass &= rep.pass;
        constants.push(rep.constant.clone());
        out.insert(format!("{k}/{b}"), serde_json::to_value(&rep).unwrap());
    }
    let same = constants.windows(2).all(|w| w[0] == w[1]);
    pass &= same;
    Ok(CheckOutcome {
        kind: CheckKind::Semiclassical,
        pass,
        detail: json!({ "model": model.to_string(), "constant": constants[0], "same_constant": same, "pairings": out }),
    })
}

fn center(cfg: &RunConfig, rd: &Arc<RMatrixData>) -> Result<CheckOutcome, ReportError> {
    let d = check_cap(cfg, &rd.id, 1, rd.id.default_cap() - 1)?;
    let model = cfg.model.unwrap_or_else(|| cfg.default_model());
    let re = qfun::presentation(rd.clone(), AlgebraKind::Re, model).map_err(compute)?;
    let gq_re = re.quotient(d + 1);
    let rep = centermod::center_report(&re, &gq_re, d, cfg.seed).map_err(compute)?;
    let mut pass = rep.pass;
    let mut detail = json!({ "model": model.to_string(), "re": serde_json::to_value(&rep).unwrap() });
    if rd.id.series == Series::A && model == GroupModel::Free {
        let frt = qfun::presentation(rd.clone(), AlgebraKind::Frt, model).map_err(compute)?;
        let gq_frt = frt.quotient(d + 1);
        let frt_deg1 = gq_frt.centralizer_basis(1).map_err(compute)?.len();
        let qt = centermod::quantum_trace(&gq_re).map_err(compute)?;
        let tc = centermod::transported_center_check(rd, &gq_frt, &gq_re, d).map_err(compute)?;
        pass &= frt_deg1 == 0 && tc.pass;
        detail["frt_degree1_center_dim"] = json!(frt_deg1);
        detail["quantum_trace"] = serde_json::to_value(&qt).unwrap();
        detail["transported_center"] = serde_json::to_value(&tc).unwrap();
    }
    Ok(CheckOutcome { kind: CheckKind::Center, pass, detail })
}

/// Center generators of the sharp RE model: the quantum trace, `f`, and any
/// central element in degrees `2..cap` not generated by earlier ones.
fn sharp_center_generators(
    free: &crate::freenc::GradedQuotient,
    sharp: &crate::freenc::GradedQuotient,
    upto: usize,
) -> Result<Vec<NCPoly>, ReportError> {
    let mut gens = vec![centermod::quantum_trace(free).map_err(compute)?.poly, NCPoly::letter(F_LETTER)];
    for d in 2..=upto.min(sharp.max_degree.saturating_sub(1)) {
        let rep = centermod::freeness_report(sharp, &gens, d).map_err(compute)?;
        let covered = rep.rows[d].dim_i;
        let z = sharp.centralizer_basis(d).map_err(compute)?;
        if z.len() > covered {
            let mut e = crate::exactalg::Echelon::new(sharp.dim(d));
            let prods: Vec<NCPoly> = centermod_products(&gens, d);
            for p in &prods {
                e.insert(&sharp.coords(p, d).map_err(compute)?);
            }
            for c in z {
                if e.insert(&sharp.coords(&c, d).map_err(compute)?) {
                    gens.push(c);
                }
            }
        }
    }
    Ok(gens)
}

fn centermod_products(gens: &[NCPoly], d: usize) -> Vec<NCPoly> {
    fn go(gens: &[NCPoly], start: usize, left: usize, acc: NCPoly, out: &mut Vec<NCPoly>) {
        if left == 0 {
            out.push(acc);
            return;
        }
        for k in start..gens.len() {
            let dg = gens[k].degree().unwrap_or(usize::MAX);
            if dg <= left {
                go(gens, k, left - dg, &acc * &gens[k], out);
            }
        }
    }
    let mut out = Vec::new();
    go(gens, 0, d, NCPoly::one(), &mut out);
    out
}

fn freeness(cfg: &RunConfig, rd: &Arc<RMatrixData>) -> Result<CheckOutcome, ReportError> {
    let d = check_cap(cfg, &rd.id, 0, rd.id.default_cap())?;
    if rd.id.series != Series::A {
        let pres = qfun::presentation(rd.clone(), AlgebraKind::Re, GroupModel::Sharp).map_err(compute)?;
        let rep = qfun::flatness_check(&pres, d).map_err(compute)?;
        return Ok(CheckOutcome {
            kind: CheckKind::Freeness,
            pass: rep.pass,
            detail: json!({
                "mode": "dimension-consistency",
                "dims": rep.quantum_dims(),
                "classical_dims": rep.classical_dims(),
            }),
        });
    }
    let free = qfun::presentation(rd.clone(), AlgebraKind::Re, GroupModel::Free).map_err(compute)?.quotient(2);
    let sharp = qfun::presentation(rd.clone(), AlgebraKind::Re, GroupModel::Sharp).map_err(compute)?.quotient(d);
    let gens = sharp_center_generators(&free, &sharp, d)?;
    let rep = centermod::freeness_report(&sharp, &gens, d).map_err(compute)?;
    let alpha = sharp.alphabet.clone();
    let mut bad = gens.clone();
    bad[0] = NCPoly::letter(alpha.gen(0, 1));
    let neg = centermod::freeness_report(&sharp, &bad, d.min(3)).map_err(compute)?;
    let pass = rep.pass && !neg.pass;
    Ok(CheckOutcome {
        kind: CheckKind::Freeness,
        pass,
        detail: json!({
            "mode": "bijectivity",
            "report": serde_json::to_value(&rep).unwrap(),
            "e_dims": rep.e_dims(),
            "negative_control": {
                "generators": neg.generators,
                "rows": serde_json::to_value(&neg.rows).unwrap(),
                "detected": !neg.pass,
            },
        }),
    })
}

pub fn run_check(kind: CheckKind, cfg: &RunConfig) -> Result<CheckOutcome, ReportError> {
    let rd = build_rdata(cfg)?;
    match kind {
        CheckKind::Qybe => qybe(&rd),
        CheckKind::Cybe => cybe(&rd),
        CheckKind::Flatness => flatness(cfg, &rd),
        CheckKind::Twist => twist(&rd),
        CheckKind::Jacobi => jacobi(cfg, &rd),
        CheckKind::Semiclassical => semiclassical(cfg, &rd),
        CheckKind::Center => center(cfg, &rd),
        CheckKind::Freeness => freeness(cfg, &rd),
    }
}

fn envelope(cfg: &RunConfig, command: &str) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("tool".into(), json!(TOOL));
    m.insert("version".into(), json!(VERSION));
    m.insert("conventions_sha256".into(), json!(convention_hash()));
    m.insert("command".into(), json!(command));
    m.insert("config".into(), cfg.echo());
    m
}

/// Report document for one check. Timing is added by the caller if wanted.
pub fn check_document(outcome: &CheckOutcome, cfg: &RunConfig) -> Value {
    let mut m = envelope(cfg, &format!("check {}", outcome.kind.name()));
    m.insert(outcome.kind.name().into(), json!(verdict(outcome.pass)));
    m.insert("detail".into(), outcome.detail.clone());
    m.insert("pass".into(), json!(outcome.pass));
    Value::Object(m)
}

/// Runs every check at default caps; the document carries no timing so reruns are identical.
pub fn report_all(cfg: &RunConfig) -> Result<(Value, Vec<CheckOutcome>), ReportError> {
    let base = RunConfig { algebra: None, model: None, max_degree: None, ..cfg.clone() };
    let mut outcomes = Vec::new();
    for kind in CheckKind::ALL {
        outcomes.push(run_check(kind, &base)?);
    }
    let mut m = envelope(cfg, "report");
    let mut checks = serde_json::Map::new();
    for o in &outcomes {
        checks.insert(o.kind.name().into(), json!({ "result": verdict(o.pass), "detail": o.detail }));
    }
    m.insert("checks".into(), Value::Object(checks));
    m.insert("pass".into(), json!(outcomes.iter().all(|o| o.pass)));
    Ok((Value::Object(m), outcomes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_names_roundtrip() {
        for k in CheckKind::ALL {
            assert_eq!(k.name().parse::<CheckKind>().unwrap(), k);
        }
        assert!("bogus".parse::<CheckKind>().is_err());
    }

    #[test]
    fn hash_is_stable_hex() {
        let h = convention_hash();
        assert_eq!(h.len(), 64);
        assert_eq!(h, convention_hash());
    }

    #[test]
    fn over_cap_is_config_error() {
        let mut cfg = RunConfig::new(Series::A, 1);
        cfg.max_degree = Some(9);
        assert!(matches!(run_check(CheckKind::Flatness, &cfg), Err(ReportError::Config(_))));
    }
}
