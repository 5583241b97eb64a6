use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::{check_generic, GenericityReport, NcPolynomial};
use crate::config::Config;
use crate::numerics::{gamma_scan, schwartz_match_top, ScanReport};
use crate::realization::Sign;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    NotSolvableProven,
    SolvableConditional,
    NotSolvableEvidence,
    Inconclusive,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::NotSolvableProven => "NOT_SOLVABLE_PROVEN",
            Status::SolvableConditional => "SOLVABLE_CONDITIONAL",
            Status::NotSolvableEvidence => "NOT_SOLVABLE_EVIDENCE",
            Status::Inconclusive => "INCONCLUSIVE",
        }
    }
}

/// One rung of the decision ladder with the numbers it used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reason {
    pub criterion: String,
    pub fired: bool,
    pub detail: String,
    pub numbers: BTreeMap<String, f64>,
}

impl Reason {
    fn new(criterion: &str, fired: bool, detail: impl Into<String>, numbers: &[(&str, f64)]) -> Self {
        Reason {
            criterion: criterion.into(),
            fired,
            detail: detail.into(),
            numbers: numbers.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootCounts {
    pub p_pos: usize,
    pub p_neg: usize,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopMatch {
    pub sign: String,
    pub p: usize,
    pub q: usize,
    pub sigma_min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    pub reasons: Vec<Reason>,
    pub root_counts: RootCounts,
    /// the hypothesis a conditional verdict rests on
    pub hypothesis: Option<String>,
    pub genericity: Option<GenericityReport>,
    pub top_matches: Vec<TopMatch>,
    pub scans: Vec<ScanReport>,
}

pub const CONDITIONAL_HYPOTHESIS: &str =
    "local solvability of the principal part P_n, supported only by the numerical kernel test on L_inf";

/// Counts of roots in the right and left half planes.
pub fn root_counts(roots: &[crate::scalar::C64], thr: f64) -> RootCounts {
    RootCounts {
        p_pos: roots.iter().filter(|z| z.re > thr).count(),
        p_neg: roots.iter().filter(|z| z.re < -thr).count(),
        n: roots.len(),
    }
}

fn inconclusive(reasons: Vec<Reason>, counts: RootCounts, gen: Option<GenericityReport>) -> Verdict {
    Verdict {
        status: Status::Inconclusive,
        reasons,
        root_counts: counts,
        hypothesis: None,
        genericity: gen,
        top_matches: vec![],
        scans: vec![],
    }
}

pub fn classify(p: &NcPolynomial, cfg: &Config) -> Verdict {
    let mut reasons = Vec::new();
    let zero = RootCounts { p_pos: 0, p_neg: 0, n: p.degree() };
    let gen = match check_generic(p, &cfg.tol) {
        Ok(g) => g,
        Err(e) => {
            reasons.push(Reason::new("genericity", false, e.to_string(), &[("degree", p.degree() as f64)]));
            return inconclusive(reasons, zero, None);
        }
    };
    if !gen.is_generic {
        reasons.push(Reason::new(
            "genericity",
            false,
            gen.reasons.join("; "),
            &[
                ("monic_defect_re", gen.monic_defect[0]),
                ("monic_defect_im", gen.monic_defect[1]),
                ("min_root_gap", gen.min_root_gap),
            ],
        ));
        return inconclusive(reasons, zero, Some(gen));
    }
    let roots = gen.roots_c64();
    let thr = cfg.tol.re_threshold;
    let counts = root_counts(&roots, thr);
    let min_re = roots.iter().map(|z| z.re.abs()).fold(f64::INFINITY, f64::min);
    reasons.push(Reason::new("genericity", true, "principal part is generic", &[("min_root_gap", gen.min_root_gap)]));
    if counts.p_pos + counts.p_neg < counts.n {
        reasons.push(Reason::new(
            "nonzero_real_parts",
            false,
            format!("a characteristic root has |Re| <= {thr:e}"),
            &[("min_abs_re", min_re), ("threshold", thr)],
        ));
        return inconclusive(reasons, counts, Some(gen));
    }
    reasons.push(Reason::new("nonzero_real_parts", true, "all roots off the imaginary axis", &[("min_abs_re", min_re)]));

    // exact integer comparison of max(p_pos, p_neg) against n/2
    let majority = 2 * counts.p_pos.max(counts.p_neg) > counts.n;
    let nums = [("p_pos", counts.p_pos as f64), ("p_neg", counts.p_neg as f64), ("n", counts.n as f64)];
    reasons.push(Reason::new(
        "root_count_majority",
        majority,
        if majority {
            "more than n/2 roots lie in one half plane"
        } else {
            "no half plane holds more than n/2 roots"
        },
        &nums,
    ));
    if majority {
        return Verdict {
            status: Status::NotSolvableProven,
            reasons,
            root_counts: counts,
            hypothesis: None,
            genericity: Some(gen),
            top_matches: vec![],
            scans: vec![],
        };
    }

    let mut top_matches = Vec::new();
    let mut empty = true;
    for sign in [Sign::Plus, Sign::Minus] {
        match schwartz_match_top(p, sign, cfg) {
            Ok(m) => {
                let e = m.sigma_min >= cfg.tol.sigma;
                empty &= e;
                reasons.push(Reason::new(
                    &format!("top_grade_kernel_{}", if sign == Sign::Plus { "plus" } else { "minus" }),
                    e,
                    if e { "no decaying adjoint kernel element" } else { "decaying adjoint kernel candidate" },
                    &[("sigma_min", m.sigma_min), ("p", m.p as f64), ("q", m.q as f64), ("tol", cfg.tol.sigma)],
                ));
                top_matches.push(TopMatch { sign: sign.label().into(), p: m.p, q: m.q, sigma_min: m.sigma_min });
            }
            Err(e) => {
                empty = false;
                reasons.push(Reason::new("top_grade_kernel", false, e.to_string(), &[]));
            }
        }
    }
    if empty {
        return Verdict {
            status: Status::SolvableConditional,
            reasons,
            root_counts: counts,
            hypothesis: Some(CONDITIONAL_HYPOTHESIS.into()),
            genericity: Some(gen),
            top_matches,
            scans: vec![],
        };
    }

    let mut scans = Vec::new();
    let mut flagged = false;
    for sign in [Sign::Plus, Sign::Minus] {
        match gamma_scan(p, sign, &cfg.gamma_range, cfg) {
            Ok(s) => {
                flagged |= s.limit_point_flag;
                reasons.push(Reason::new(
                    &format!("scan_accumulation_{}", if sign == Sign::Plus { "plus" } else { "minus" }),
                    s.limit_point_flag,
                    "confirmed sub-tolerance dips counted on a base and a refined gamma grid",
                    &[
                        ("confirmed_dips", s.confirmed_dips as f64),
                        ("refined_dips", s.refined_dips as f64),
                        ("gamma_lo", cfg.gamma_range.lo),
                        ("gamma_hi", cfg.gamma_range.hi),
                        ("steps", cfg.gamma_range.steps as f64),
                    ],
                ));
                scans.push(s);
            }
            Err(e) => reasons.push(Reason::new("scan_accumulation", false, e.to_string(), &[])),
        }
    }
    Verdict {
        status: if flagged { Status::NotSolvableEvidence } else { Status::Inconclusive },
        reasons,
        root_counts: counts,
        hypothesis: None,
        genericity: Some(gen),
        top_matches,
        scans,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_operator;

    fn run(text: &str) -> Verdict {
        classify(&parse_operator(text).unwrap(), &Config::default())
    }

    #[test]
    fn ladder_examples() {
        let v = run("i*X^3 + 2*X^2*Y + i*X*Y^2 + 2*Y^3");
        assert_eq!(v.status, Status::NotSolvableProven);
        assert_eq!(v.root_counts, RootCounts { p_pos: 2, p_neg: 1, n: 3 });
        let v = run("-X^2 - Y^2");
        assert_eq!(v.status, Status::SolvableConditional);
        assert!(v.hypothesis.is_some());
        assert_eq!(run("-X^2 + Y^2").status, Status::Inconclusive);
        assert_eq!(run("X*Y - Y*X").status, Status::Inconclusive);
        assert_eq!(run("X").status, Status::Inconclusive);
    }

    #[test]
    fn even_degree_tie_is_not_a_majority() {
        // roots {2, 1, -1, -2}: two on each side
        let v = run("X^4 + 5*Y^2*X^2 + 4*Y^4");
        assert_eq!(v.root_counts, RootCounts { p_pos: 2, p_neg: 2, n: 4 });
        assert_ne!(v.status, Status::NotSolvableProven);
    }
}
