//! Certified upper bounds on the growth rate λ, the threshold semi-decision
//! procedure, the eventual-positivity check, and a Fekete-style limit helper
//! for nonnegative supermultiplicative sequences.
//!
//! Two certificate families bound λ from above, both checked in exact
//! rational arithmetic:
//!
//! * **Weight certificates** `(w, γ, c)`: `w > 0` with `w ⊛ w ≤ γ·w` for
//!   every operator and `s ≤ c·w` for every seed. By induction over
//!   combination trees, every size-`n` value is dominated by
//!   `c^n γ^(n−1) · w`, hence `λ ≤ c·γ`.
//! * **Graded certificates** `(N, ĝ, γ)`: `ĝ(n)` is the componentwise-max
//!   envelope of all size-`n` values, and the certificate demands that every
//!   overflow product `ĝ(m) ⊛ ĝ(n)` (with `m, n ≤ N < m + n`) fall back below
//!   `γ^(m+n−n′) · ĝ(n′)` for some `n′ ≤ N`. By induction, every size-`n`
//!   value is dominated by `γ^(n−n′) ĝ(n′)` for some `n′ ≤ N`, hence `λ ≤ γ`.
//!   Binary search finds a near-minimal γ per horizon.
//!
//! Combined with the pattern lower bounds of [`crate::patterns`], these give
//! two-sided sandwiches on λ; [`decide_threshold`] interleaves the searches to
//! semi-decide `λ > θ` versus `λ ≤ θ` (no algorithm decides it in general, so
//! `Unresolved` is a legitimate outcome).

use num_traits::{One, Signed, Zero};

use crate::core::{growth_table, BilinearSystem};
use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::patterns::{LinearPattern, LowerBoundRow, PatternSearch};
use crate::scalar::{nth_root_below, pow_scalar, rat, to_f64_above, Scalar};
use crate::spectra::radius_scan;

/// Binary-search resolution for graded certificates: 2⁻⁴⁰.
fn gamma_resolution() -> Scalar {
    rat(1, 1 << 40)
}

/// Doubling cap while bracketing γ: growth factors beyond 2¹²⁸ are treated as
/// "no certificate at this horizon".
const GAMMA_DOUBLING_CAP: u32 = 128;

/// A verified weight certificate: `w ⊛ w ≤ γ·w` per operator and `s ≤ c·w`
/// per seed, all exact. Certifies `g(n) ≤ c^n γ^(n−1) · max_i w_i` and hence
/// `λ ≤ c·γ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightCertificate {
    /// Strictly positive weight vector.
    pub w: Vector,
    /// Contraction factor of `w` under every operator.
    pub gamma: Scalar,
    /// Minimal seed scale: the least `c` with `s ≤ c·w` for every seed.
    pub c: Scalar,
}

impl WeightCertificate {
    /// The certified upper bound `c·γ ≥ λ`.
    pub fn bound(&self) -> Scalar {
        &self.c * &self.gamma
    }
}

/// A verified graded certificate over horizon `n_used`: every overflow
/// product of envelope vectors falls back below a γ-graded envelope entry.
/// Certifies `λ ≤ γ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedCertificate {
    /// Horizon `N`: envelope sizes used by the certificate.
    pub n_used: usize,
    /// `envelope[n-1] = ĝ(n)`: componentwise max over all size-`n` values.
    pub envelope: Vec<Vector>,
    /// Certified bound: `λ ≤ γ`.
    pub gamma: Scalar,
    /// Whether γ = 0 was certified (growth dies entirely beyond the horizon).
    pub zero_bound: bool,
}

impl GradedCertificate {
    /// The certified upper bound `γ ≥ λ`.
    pub fn bound(&self) -> Scalar {
        self.gamma.clone()
    }
}

/// Either certificate family, as carried by verdicts and reports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    Weight(WeightCertificate),
    Graded(GradedCertificate),
}

impl Certificate {
    /// The certified upper bound on λ.
    pub fn bound(&self) -> Scalar {
        match self {
            Certificate::Weight(c) => c.bound(),
            Certificate::Graded(c) => c.bound(),
        }
    }
}

/// What a threshold run can conclude.
#[derive(Debug, Clone)]
pub enum Verdict {
    /// `λ > θ`, proven by an exact pattern witness:
    /// `M(P)_{i,i} > θ^(|P|)`.
    GreaterThan { pattern: LinearPattern, index: usize },
    /// `λ ≤ θ`, proven by a verified certificate with bound ≤ θ.
    AtMostCertified(Certificate),
    /// Neither direction resolved within the budget.
    Unresolved(BudgetReport),
}

/// What an unresolved run did manage to establish.
#[derive(Debug, Clone)]
pub struct BudgetReport {
    /// Rounds spent (pattern sizes and certificate horizons explored).
    pub budget: usize,
    /// Best certified lower-bound row seen, if any had a positive root.
    pub best_lower: Option<LowerBoundRow>,
}

/// Exactly verifies the weight-certificate inequalities for `(w, γ)` and, on
/// success, returns the certificate with the minimal seed scale `c`.
///
/// Refusals name the first violated coordinate of the first violating
/// operator (0-based).
pub fn verify_weight_certificate(
    system: &BilinearSystem,
    w: &Vector,
    gamma: &Scalar,
) -> Result<WeightCertificate> {
    system.require_nonnegative("weight certificate")?;
    if w.dim() != system.dim() {
        return Err(Error::DimensionMismatch {
            context: "weight vector",
            expected: system.dim(),
            found: w.dim(),
        });
    }
    if let Some(k) = (0..w.dim()).find(|&k| !w[k].is_positive()) {
        return Err(Error::InvalidArgument(format!(
            "weight vector must be strictly positive, but coordinate {k} is {}",
            w[k]
        )));
    }
    for (op_idx, op) in system.operators().iter().enumerate() {
        let ww = op.apply(w, w);
        for k in 0..w.dim() {
            let bound = gamma * &w[k];
            if ww[k] > bound {
                return Err(Error::CertificateViolated {
                    condition: "w ⊛ w ≤ γ·w",
                    coordinate: k,
                    detail: format!(
                        "operator {op_idx}: (w ⊛ w)_{k} = {} exceeds γ·w_{k} = {}",
                        ww[k], bound
                    ),
                });
            }
        }
    }
    // Minimal c with s ≤ c·w for every seed; exists because w > 0.
    let mut c = Scalar::zero();
    for seed in system.seeds() {
        for k in 0..w.dim() {
            let ratio = &seed[k] / &w[k];
            if ratio > c {
                c = ratio;
            }
        }
    }
    Ok(WeightCertificate {
        w: w.clone(),
        gamma: gamma.clone(),
        c,
    })
}

/// The always-verifying fallback certificate: uniform weights at the seed
/// scale with γ equal to the worst per-coordinate coefficient mass.
///
/// For `w = t·1` with `t = max(max seed entry, 1)`, every `(w ⊛ w)_k` equals
/// `t²·(coefficient mass at k)`, so `γ = t·S` works with `S` the largest
/// mass; the resulting bound is `c·γ = (max seed entry)·S` independent of t.
pub fn trivial_weight_certificate(system: &BilinearSystem) -> Result<WeightCertificate> {
    system.require_nonnegative("weight certificate")?;
    let mut max_seed = Scalar::zero();
    for seed in system.seeds() {
        for k in 0..seed.dim() {
            if seed[k] > max_seed {
                max_seed = seed[k].clone();
            }
        }
    }
    let t = if max_seed > Scalar::one() {
        max_seed
    } else {
        Scalar::one()
    };
    let mut mass = Scalar::zero();
    for op in system.operators() {
        let mut per_coord = vec![Scalar::zero(); system.dim()];
        for (k, _, _, c) in op.iter() {
            per_coord[k] += c;
        }
        for m in per_coord {
            if m > mass {
                mass = m;
            }
        }
    }
    let w = Vector::new(vec![t.clone(); system.dim()]);
    let gamma = &t * &mass;
    verify_weight_certificate(system, &w, &gamma)
}

/// The componentwise-max envelope `ĝ(1..=n_max)`: `ĝ(1)` dominates every
/// seed, and `ĝ(n)` is the max over splits and operators of `ĝ(a) ⊛ ĝ(b)`.
/// Every size-`n` combination value is dominated by `ĝ(n)`.
fn build_envelope(system: &BilinearSystem, n_max: usize) -> Vec<Vector> {
    let dim = system.dim();
    let mut envelope: Vec<Vector> = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let mut top = Vector::zeros(dim);
        if n == 1 {
            for seed in system.seeds() {
                for k in 0..dim {
                    if seed[k] > top[k] {
                        top.set(k, seed[k].clone());
                    }
                }
            }
        } else {
            for a in 1..n {
                let b = n - a;
                for op in system.operators() {
                    let candidate = op.apply(&envelope[a - 1], &envelope[b - 1]);
                    for k in 0..dim {
                        if candidate[k] > top[k] {
                            top.set(k, candidate[k].clone());
                        }
                    }
                }
            }
        }
        envelope.push(top);
    }
    envelope
}

/// Exact graded-domination check: for every ordered `m, n ≤ N` with `m + n > N`
/// and every operator, some `n′ ≤ N` satisfies
/// `ĝ(m) ⊛ ĝ(n) ≤ γ^(m+n−n′) · ĝ(n′)` componentwise.
fn graded_condition_holds(system: &BilinearSystem, envelope: &[Vector], gamma: &Scalar) -> bool {
    let n_used = envelope.len();
    let dim = system.dim();
    for m in 1..=n_used {
        for n in 1..=n_used {
            if m + n <= n_used {
                continue;
            }
            for op in system.operators() {
                let lhs = op.apply(&envelope[m - 1], &envelope[n - 1]);
                let covered = (1..=n_used).any(|np| {
                    let factor = pow_scalar(gamma, (m + n - np) as u32);
                    (0..dim).all(|k| lhs[k] <= &factor * &envelope[np - 1][k])
                });
                if !covered {
                    return false;
                }
            }
        }
    }
    true
}

/// Near-minimal passing γ for a fixed horizon: `Some((γ, zero_bound))` or
/// `None` when no factor up to 2^128 passes (the overflow products hit
/// coordinates the envelope never covers).
fn minimal_gamma(system: &BilinearSystem, envelope: &[Vector]) -> Option<(Scalar, bool)> {
    if graded_condition_holds(system, envelope, &Scalar::zero()) {
        return Some((Scalar::zero(), true));
    }
    let mut hi = Scalar::one();
    let mut exponent = 0u32;
    while !graded_condition_holds(system, envelope, &hi) {
        if exponent >= GAMMA_DOUBLING_CAP {
            return None;
        }
        hi = &hi * &rat(2, 1);
        exponent += 1;
    }
    // hi passes; bisect down to resolution 2⁻⁴⁰, keeping hi passing. The
    // midpoints are dyadic, so a minimal dyadic γ (like an integer) is
    // returned exactly.
    let mut lo = &hi / &rat(2, 1);
    if hi == Scalar::one() {
        lo = Scalar::zero();
    }
    let resolution = gamma_resolution();
    while &hi - &lo > resolution {
        let mid = (&hi + &lo) / rat(2, 1);
        if graded_condition_holds(system, envelope, &mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some((hi, false))
}

/// Builds the envelope up to `n_max` and returns the certificate minimizing
/// γ over all horizons `N′ ≤ n_max` (γ need not be monotone in the horizon,
/// so every prefix is searched and the running minimum reported).
///
/// Fails with [`Error::CapExhausted`] when no horizon admits any γ: small
/// horizons can be structurally uncertifiable when overflow products occupy
/// coordinates the envelope has not reached yet.
pub fn graded_upper_bound(system: &BilinearSystem, n_max: usize) -> Result<GradedCertificate> {
    system.require_nonnegative("graded certificate")?;
    if n_max == 0 {
        return Err(Error::InvalidArgument(
            "graded certificate needs a horizon of at least 1".to_string(),
        ));
    }
    let envelope = build_envelope(system, n_max);
    let mut best: Option<GradedCertificate> = None;
    for n_used in 1..=n_max {
        let prefix = &envelope[..n_used];
        if let Some((gamma, zero_bound)) = minimal_gamma(system, prefix) {
            let better = match &best {
                None => true,
                Some(b) => gamma < b.gamma,
            };
            if better {
                let is_zero = zero_bound;
                best = Some(GradedCertificate {
                    n_used,
                    envelope: prefix.to_vec(),
                    gamma,
                    zero_bound,
                });
                if is_zero {
                    break; // γ = 0 cannot be improved
                }
            }
        }
    }
    best.ok_or(Error::CapExhausted {
        operation: "graded upper bound",
        cap: n_max,
    })
}

/// Semi-decides `λ > θ` against `λ ≤ θ` within a round budget.
///
/// Round `r` first looks for an exact pattern witness `M(P)_{i,i} > θ^r` at
/// size `r` (complete for `λ > θ`: the pattern roots converge to λ), then
/// tries the graded certificate at γ = θ with horizon `r`. A cheap global
/// weight certificate is tried before the rounds. All comparisons are exact;
/// `Unresolved` is a legitimate outcome (no algorithm decides the boundary
/// case in general).
pub fn decide_threshold(
    system: &BilinearSystem,
    theta: &Scalar,
    budget: usize,
) -> Result<Verdict> {
    system.require_nonnegative("threshold decision")?;
    if !theta.is_positive() {
        return Err(Error::InvalidArgument(format!(
            "threshold must be a positive rational, got {theta}"
        )));
    }
    let trivial = trivial_weight_certificate(system)?;
    if trivial.bound() <= *theta {
        return Ok(Verdict::AtMostCertified(Certificate::Weight(trivial)));
    }
    let mut search = PatternSearch::new(system)?;
    let mut best: Option<LowerBoundRow> = None;
    for r in 1..=budget {
        search.step()?;
        let row = search.row(r).expect("row exists after stepping");
        if row.x > pow_scalar(theta, r as u32) {
            let (pattern, index) = row.witness;
            return Ok(Verdict::GreaterThan { pattern, index });
        }
        let improves = match &best {
            None => row.root > 0.0,
            Some(b) => row.root > b.root,
        };
        if improves {
            best = Some(row);
        }
        let envelope = build_envelope(system, r);
        if graded_condition_holds(system, &envelope, theta) {
            return Ok(Verdict::AtMostCertified(Certificate::Graded(
                GradedCertificate {
                    n_used: r,
                    envelope,
                    gamma: theta.clone(),
                    zero_bound: false,
                },
            )));
        }
    }
    Ok(Verdict::Unresolved(BudgetReport {
        budget,
        best_lower: best,
    }))
}

/// Outcome of the eventual-positivity scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LimitOutcome {
    /// Every coordinate is positive at every size in `n0..=horizon`; when
    /// this persists for all larger sizes, the growth roots converge to λ as
    /// a true limit.
    FullPositivityFrom { n0: usize },
    /// The positivity profile repeats with this period over the scanned tail
    /// and keeps zero entries, so full positivity never sets in.
    ZerosRecur { start: usize, period: usize },
    /// Neither full positivity nor a repeating tail was detected.
    Inconclusive,
}

/// Report of [`limit_condition_check`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitReport {
    pub horizon: usize,
    pub outcome: LimitOutcome,
    /// `profile[n-1][i]` = whether some size-`n` combination is positive at
    /// coordinate `i`.
    pub profile: Vec<Vec<bool>>,
}

/// Computes the exact positivity profile `[g_i(n) > 0]` for `n ≤ horizon` by
/// a support-only recurrence (sound and complete on nonnegative systems: no
/// cancellation can kill a positive support).
///
/// Reports the least `n0` with full positivity on `[n0, horizon]` when one
/// exists; otherwise looks for a repeating tail (at least two periods of
/// evidence) and reports recurring zeros, or gives up as inconclusive.
pub fn limit_condition_check(system: &BilinearSystem, horizon: usize) -> Result<LimitReport> {
    system.require_nonnegative("positivity scan")?;
    if horizon == 0 {
        return Err(Error::InvalidArgument(
            "positivity scan needs a horizon of at least 1".to_string(),
        ));
    }
    let dim = system.dim();
    let mut profile: Vec<Vec<bool>> = Vec::with_capacity(horizon);
    for n in 1..=horizon {
        let mut row = vec![false; dim];
        if n == 1 {
            for seed in system.seeds() {
                for k in 0..dim {
                    row[k] = row[k] || seed[k].is_positive();
                }
            }
        } else {
            for a in 1..n {
                let b = n - a;
                for op in system.operators() {
                    for (k, i, j, _) in op.iter() {
                        if !row[k] && profile[a - 1][i] && profile[b - 1][j] {
                            row[k] = true;
                        }
                    }
                }
            }
        }
        profile.push(row);
    }
    let full = |row: &Vec<bool>| row.iter().all(|&b| b);
    // Least n0 with all rows full from n0 through the horizon.
    let mut n0 = None;
    for start in (1..=horizon).rev() {
        if full(&profile[start - 1]) {
            n0 = Some(start);
        } else {
            break;
        }
    }
    let outcome = if let Some(n0) = n0 {
        LimitOutcome::FullPositivityFrom { n0 }
    } else {
        // Smallest period, then smallest start, with at least two periods of
        // evidence inside the horizon.
        let mut found = None;
        'outer: for period in 1..=horizon / 2 {
            for start in 1..=horizon.saturating_sub(2 * period - 1) {
                if (start..=horizon - period).all(|n| profile[n - 1] == profile[n + period - 1]) {
                    found = Some((start, period));
                    break 'outer;
                }
            }
        }
        match found {
            // A fully-positive repeating tail would have produced n0 above,
            // so a detected period here always carries recurring zeros.
            Some((start, period)) => LimitOutcome::ZerosRecur { start, period },
            None => LimitOutcome::Inconclusive,
        }
    };
    Ok(LimitReport {
        horizon,
        outcome,
        profile,
    })
}

/// Report of [`fekete_limit`].
#[derive(Debug, Clone)]
pub struct FeketeReport {
    /// `max_n a_n^(1/n)` over the given prefix (verified downward rounding).
    pub sup_root: f64,
    /// First index attaining the sup, 1-based; `None` when all entries are 0.
    pub attained_at: Option<usize>,
    /// `(n, a_n^(1/n))` for the positive entries, in order.
    pub trajectory: Vec<(usize, f64)>,
    /// Whether supermultiplicativity was verified.
    pub checked: bool,
}

/// Root analysis of a finite nonnegative sequence `a_1, a_2, …`.
///
/// With `check_super` set, first verifies `a_{m+n} ≥ a_m·a_n` exactly for all
/// index pairs in range, refusing with the first violating pair otherwise.
/// For supermultiplicative sequences that are not eventually zero, the
/// positive subsequence of `a_n^(1/n)` converges to `sup_n a_n^(1/n)`, so the
/// trajectory is a certified approximation from below.
pub fn fekete_limit(a: &[Scalar], check_super: bool) -> Result<FeketeReport> {
    if a.is_empty() {
        return Err(Error::InvalidArgument(
            "sequence analysis needs at least one entry".to_string(),
        ));
    }
    for (idx, value) in a.iter().enumerate() {
        if value.is_negative() {
            return Err(Error::NegativeEntry {
                context: "sequence entry",
                index: idx + 1,
                value: value.to_string(),
            });
        }
    }
    if check_super {
        for m in 1..=a.len() {
            for n in m..=a.len() {
                if m + n > a.len() {
                    break;
                }
                if a[m + n - 1] < &a[m - 1] * &a[n - 1] {
                    return Err(Error::NotSupermultiplicative { m, n });
                }
            }
        }
    }
    let mut sup_root = 0.0f64;
    let mut attained_at = None;
    let mut trajectory = Vec::new();
    for (idx, value) in a.iter().enumerate() {
        let n = idx + 1;
        if value.is_zero() {
            continue;
        }
        let root = nth_root_below(value, n as u32);
        trajectory.push((n, root));
        if root > sup_root || attained_at.is_none() {
            sup_root = root;
            attained_at = Some(n);
        }
    }
    Ok(FeketeReport {
        sup_root,
        attained_at,
        trajectory,
        checked: check_super,
    })
}

/// Non-certified diagnostic profile `g(n)^(1/n)` for `n ≤ n_max`.
#[derive(Debug, Clone)]
pub struct LimsupEstimate {
    /// `roots[n-1] ≈ g(n)^(1/n)` (downward-rounded; zero where `g(n) = 0`).
    pub roots: Vec<f64>,
    /// Always false: a finite profile neither bounds λ from above nor from
    /// below in general — use pattern bounds and certificates for sound
    /// conclusions.
    pub certified: bool,
}

/// Diagnostic growth-root profile. Informative but never a bound: the
/// sequence `g(n)^(1/n)` can oscillate and only its limsup equals λ.
pub fn estimate_limsup(system: &BilinearSystem, n_max: usize) -> Result<LimsupEstimate> {
    system.require_nonnegative("growth-root profile")?;
    let table = growth_table(system, n_max)?;
    let roots = (1..=n_max)
        .map(|n| {
            let g = table.g(n).expect("table covers 1..=n_max");
            if g.is_zero() {
                0.0
            } else {
                nth_root_below(g, n as u32)
            }
        })
        .collect();
    Ok(LimsupEstimate {
        roots,
        certified: false,
    })
}

/// A certified lower bound on λ extracted from powers of one pattern matrix:
/// `value = M(P^k)_{index,index}` for `power = k·|P|` total leaves, hence
/// `root = value^(1/power) ≤ λ`.
#[derive(Debug, Clone)]
pub struct RateBound {
    pub root: f64,
    /// The base pattern whose matrix powers realize the bound.
    pub pattern: LinearPattern,
    pub index: usize,
    /// Total root order: `k·|P|`.
    pub power: u32,
    /// Exact diagonal entry backing the bound.
    pub value: Scalar,
}

/// Two-sided certified sandwich on λ.
#[derive(Debug, Clone)]
pub struct BoundsReport {
    /// Per-size lower-bound rows `x_n` with witnesses.
    pub rows: Vec<LowerBoundRow>,
    /// Running maximum of the row roots: a monotone certified lower sequence.
    pub running_lower: Vec<f64>,
    /// Best diagonal-power rate bound over the explored pattern fronts.
    pub rate: Option<RateBound>,
    /// Graded certificate at the requested depth, when one exists.
    pub graded: Option<GradedCertificate>,
    /// The always-available fallback weight certificate.
    pub weight: WeightCertificate,
    /// Best certified lower bound on λ.
    pub lower: f64,
    /// Best certified upper bound on λ (upward-rounded).
    pub upper: f64,
}

/// Power budget for the per-pattern rate scans: smaller patterns get more
/// matrix powers so every size reaches a comparable total root order.
fn rate_power_budget(size: usize) -> usize {
    (256 / size).max(8)
}

/// Assembles the two-sided bound report: the exact lower-bound rows up to
/// `pattern_size`, the best diagonal-power rate bound over the same pattern
/// fronts, and the certificate upper bounds at `cert_depth` (the graded
/// horizon is skipped when no horizon admits a certificate, and entirely when
/// `cert_depth = 0`).
pub fn bounds_report(
    system: &BilinearSystem,
    pattern_size: usize,
    cert_depth: usize,
) -> Result<BoundsReport> {
    system.require_nonnegative("bounds report")?;
    if pattern_size == 0 {
        return Err(Error::InvalidArgument(
            "bounds report needs a pattern size of at least 1".to_string(),
        ));
    }
    let mut search = PatternSearch::new(system)?;
    let mut rows = Vec::with_capacity(pattern_size);
    let mut running_lower = Vec::with_capacity(pattern_size);
    let mut best_running = 0.0f64;
    let mut rate: Option<RateBound> = None;
    for t in 1..=pattern_size {
        search.step()?;
        let row = search.row(t).expect("row exists after stepping");
        best_running = best_running.max(row.root);
        running_lower.push(best_running);
        rows.push(row);
        for entry in search.matrix_front(t).expect("front exists") {
            let scan = radius_scan(&entry.matrix, 0.0, rate_power_budget(t), t as u32)?;
            let current = rate.as_ref().map_or(0.0, |r| r.root);
            if scan.lo > current {
                if let Some(witness) = scan.lo_witness {
                    rate = Some(RateBound {
                        root: scan.lo,
                        pattern: entry.pattern.clone(),
                        index: witness.index,
                        power: witness.power,
                        value: witness.value,
                    });
                }
            }
        }
    }
    let graded = if cert_depth == 0 {
        None
    } else {
        match graded_upper_bound(system, cert_depth) {
            Ok(cert) => Some(cert),
            Err(Error::CapExhausted { .. }) => None,
            Err(e) => return Err(e),
        }
    };
    let weight = trivial_weight_certificate(system)?;
    let lower = best_running.max(rate.as_ref().map_or(0.0, |r| r.root));
    let mut upper = to_f64_above(&weight.bound());
    if let Some(cert) = &graded {
        upper = upper.min(to_f64_above(&cert.gamma));
    }
    Ok(BoundsReport {
        rows,
        running_lower,
        rate,
        graded,
        weight,
        lower,
        upper,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{BilinearMap, SignClass};
    use crate::fixtures::{chained_squares, doubling, golden};
    use crate::linalg::{vector_from_i64, Vector};
    use crate::patterns::pattern_matrix;
    use crate::scalar::{int, scalar_from_f64};

    const PHI: f64 = 1.618033988749895;

    /// Growth lives on coordinate `n mod 3` only: the graded condition is
    /// structurally unsatisfiable below horizon 3 and holds with γ = 1 there.
    fn mod3_cycle() -> BilinearSystem {
        let mut coeffs = Vec::new();
        for a in 0..3usize {
            for b in 0..3usize {
                coeffs.push(((a + b) % 3, a, b, int(1)));
            }
        }
        let op = BilinearMap::from_coeffs(3, coeffs).unwrap();
        BilinearSystem::new(
            3,
            vec![op],
            vec![vector_from_i64(&[0, 1, 0])],
            SignClass::Nonnegative,
        )
        .unwrap()
    }

    #[test]
    fn golden_weight_certificate_verifies() {
        let sys = golden();
        let cert =
            verify_weight_certificate(&sys, &vector_from_i64(&[2, 1]), &int(2)).unwrap();
        assert_eq!(cert.c, int(1));
        assert_eq!(cert.bound(), int(2));
    }

    #[test]
    fn golden_weight_refusal_names_the_coordinate() {
        let sys = golden();
        let err =
            verify_weight_certificate(&sys, &vector_from_i64(&[1, 1]), &int(1)).unwrap_err();
        match err {
            Error::CertificateViolated { coordinate, .. } => assert_eq!(coordinate, 0),
            other => panic!("expected a certificate refusal, got {other:?}"),
        }
        // Misuse of the weight vector itself is a different error.
        assert!(matches!(
            verify_weight_certificate(&sys, &vector_from_i64(&[1, 0]), &int(2)),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            verify_weight_certificate(&sys, &vector_from_i64(&[1, 1, 1]), &int(2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn trivial_certificate_always_verifies() {
        for sys in [golden(), chained_squares(), doubling(), mod3_cycle()] {
            let cert = trivial_weight_certificate(&sys).unwrap();
            // Re-verify through the public checker.
            let again = verify_weight_certificate(&sys, &cert.w, &cert.gamma).unwrap();
            assert_eq!(again.c, cert.c);
        }
        // Golden: seeds at 1, worst coefficient mass 2 → bound 2.
        assert_eq!(trivial_weight_certificate(&golden()).unwrap().bound(), int(2));
    }

    #[test]
    fn weight_certificate_soundness_against_growth() {
        let sys = golden();
        let cert =
            verify_weight_certificate(&sys, &vector_from_i64(&[2, 1]), &int(2)).unwrap();
        let table = growth_table(&sys, 8).unwrap();
        let max_w = int(2);
        for n in 1..=8usize {
            let bound = pow_scalar(&cert.c, n as u32)
                * pow_scalar(&cert.gamma, (n - 1) as u32)
                * &max_w;
            assert!(table.g(n).unwrap() <= &bound, "g({n}) exceeds the certificate bound");
        }
    }

    #[test]
    fn graded_bound_for_golden_lands_between_phi_and_two() {
        let sys = golden();
        let cert = graded_upper_bound(&sys, 3).unwrap();
        // γ ≥ φ exactly: γ² ≥ γ + 1 characterizes γ ≥ φ for positive γ.
        assert!(pow_scalar(&cert.gamma, 2) >= &cert.gamma + int(1));
        assert!(cert.gamma <= int(2));
        assert!(!cert.zero_bound);
        // Horizon 3 beats the coarser horizons 1 (γ=2) and 2 (γ=√3⁺).
        assert_eq!(cert.n_used, 3);
        assert_eq!(cert.envelope.len(), 3);
    }

    #[test]
    fn graded_bound_is_exactly_two_for_doubling() {
        let cert = graded_upper_bound(&doubling(), 4).unwrap();
        assert_eq!(cert.gamma, int(2));
        assert_eq!(cert.n_used, 1);
        assert!(!cert.zero_bound);
    }

    #[test]
    fn graded_bound_zero_when_all_coefficients_vanish() {
        let op = BilinearMap::from_coeffs(1, Vec::new()).unwrap();
        let sys = BilinearSystem::new(
            1,
            vec![op],
            vec![vector_from_i64(&[1])],
            SignClass::Nonnegative,
        )
        .unwrap();
        let cert = graded_upper_bound(&sys, 2).unwrap();
        assert!(cert.zero_bound);
        assert_eq!(cert.gamma, Scalar::zero());
    }

    #[test]
    fn graded_bound_reports_structurally_impossible_horizons() {
        let sys = mod3_cycle();
        assert!(matches!(
            graded_upper_bound(&sys, 2),
            Err(Error::CapExhausted { cap: 2, .. })
        ));
        let cert = graded_upper_bound(&sys, 3).unwrap();
        assert_eq!(cert.gamma, int(1));
        assert_eq!(cert.n_used, 3);
    }

    #[test]
    fn decide_golden_above_one_by_pattern_witness() {
        let sys = golden();
        match decide_threshold(&sys, &int(1), 8).unwrap() {
            Verdict::GreaterThan { pattern, index } => {
                assert_eq!(pattern.leaf_count(), 2);
                let m = pattern_matrix(&sys, &pattern).unwrap();
                assert!(m.get(index, index) > &int(1));
            }
            other => panic!("expected a strict witness, got {other:?}"),
        }
    }

    #[test]
    fn decide_golden_at_most_two_by_certificate() {
        let sys = golden();
        match decide_threshold(&sys, &int(2), 8).unwrap() {
            Verdict::AtMostCertified(cert) => {
                assert!(cert.bound() <= int(2));
                assert!(matches!(cert, Certificate::Weight(_)));
            }
            other => panic!("expected a certificate, got {other:?}"),
        }
    }

    #[test]
    fn decide_golden_above_three_halves_eventually() {
        let sys = golden();
        // x_5 = 8 > (3/2)^5 is the first strict witness.
        match decide_threshold(&sys, &rat(3, 2), 8).unwrap() {
            Verdict::GreaterThan { pattern, index } => {
                let m = pattern_matrix(&sys, &pattern).unwrap();
                let size = pattern.leaf_count();
                assert_eq!(size, 5);
                assert!(*m.get(index, index) > pow_scalar(&rat(3, 2), size as u32));
            }
            other => panic!("expected a strict witness, got {other:?}"),
        }
        // Small budgets stay honestly unresolved.
        match decide_threshold(&sys, &rat(3, 2), 4).unwrap() {
            Verdict::Unresolved(report) => {
                assert_eq!(report.budget, 4);
                let best = report.best_lower.expect("golden has positive lower bounds");
                assert!(best.root > 1.0);
            }
            other => panic!("expected unresolved, got {other:?}"),
        }
    }

    #[test]
    fn decide_boundary_case_unresolved_then_certified() {
        // λ = 1 exactly: no strict pattern witness can exist, and the graded
        // certificate needs horizon 3.
        let sys = mod3_cycle();
        match decide_threshold(&sys, &int(1), 2).unwrap() {
            Verdict::Unresolved(report) => assert_eq!(report.budget, 2),
            other => panic!("expected unresolved at budget 2, got {other:?}"),
        }
        match decide_threshold(&sys, &int(1), 3).unwrap() {
            Verdict::AtMostCertified(Certificate::Graded(cert)) => {
                assert_eq!(cert.gamma, int(1));
                assert_eq!(cert.n_used, 3);
            }
            other => panic!("expected a graded certificate at budget 3, got {other:?}"),
        }
    }

    #[test]
    fn decide_rejects_nonpositive_thresholds() {
        let sys = golden();
        assert!(matches!(
            decide_threshold(&sys, &int(0), 3),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            decide_threshold(&sys, &int(-2), 3),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn limit_check_examples() {
        // Golden: everything positive from the seed onward.
        let report = limit_condition_check(&golden(), 8).unwrap();
        assert_eq!(report.outcome, LimitOutcome::FullPositivityFrom { n0: 1 });

        // mod-3 cycle: support rotates forever, zeros recur with period 3.
        let report = limit_condition_check(&mod3_cycle(), 12).unwrap();
        assert_eq!(
            report.outcome,
            LimitOutcome::ZerosRecur {
                start: 1,
                period: 3
            }
        );
        assert_eq!(report.profile[0], vec![false, true, false]);
        assert_eq!(report.profile[2], vec![true, false, false]);

        // A tail too short for two periods of evidence stays inconclusive.
        let op = BilinearMap::from_coeffs(
            2,
            vec![(0, 1, 1, int(1)), (1, 0, 0, int(1))],
        )
        .unwrap();
        let sys = BilinearSystem::new(
            2,
            vec![op],
            vec![vector_from_i64(&[0, 1])],
            SignClass::Nonnegative,
        )
        .unwrap();
        let report = limit_condition_check(&sys, 3).unwrap();
        assert_eq!(report.outcome, LimitOutcome::Inconclusive);
        // With more horizon its support cycle {1} → {0} → ∅ is recognized.
        let report = limit_condition_check(&sys, 8).unwrap();
        assert_eq!(
            report.outcome,
            LimitOutcome::ZerosRecur {
                start: 1,
                period: 3
            }
        );
        assert_eq!(report.profile[2], vec![false, false]);
        assert_eq!(report.profile[3], vec![false, true]);
    }

    #[test]
    fn fekete_constant_roots_for_powers_of_two() {
        let a: Vec<Scalar> = (1..=10u32).map(|n| pow_scalar(&int(2), n)).collect();
        let report = fekete_limit(&a, true).unwrap();
        assert_eq!(report.sup_root, 2.0);
        assert!(report.trajectory.iter().all(|&(_, r)| r == 2.0));
        assert!(report.checked);
    }

    #[test]
    fn fekete_alternating_zero_sequence() {
        // (0, 4, 0, 16, 0, 64): positive only at even indices, roots all 2.
        let mut a = Vec::new();
        for n in 1..=6u32 {
            a.push(if n % 2 == 0 {
                pow_scalar(&int(2), n)
            } else {
                Scalar::zero()
            });
        }
        let report = fekete_limit(&a, true).unwrap();
        assert_eq!(report.sup_root, 2.0);
        assert_eq!(report.attained_at, Some(2));
        assert_eq!(report.trajectory.len(), 3);
        assert!(report.trajectory.iter().all(|&(n, r)| n % 2 == 0 && r == 2.0));
    }

    #[test]
    fn fekete_golden_diagonal_rises_toward_phi() {
        let rows = crate::patterns::lower_bound_sequence(&golden(), 16).unwrap();
        let a: Vec<Scalar> = rows.iter().map(|r| r.x.clone()).collect();
        let report = fekete_limit(&a, true).unwrap();
        assert!(report.sup_root < PHI);
        // F_17^(1/16) ≈ 1.5857 and the gap to φ shrinks like 0.3235/n.
        assert!(report.sup_root > 1.58);
        assert_eq!(report.attained_at, Some(16));
        // The trajectory is nondecreasing for this sequence.
        for pair in report.trajectory.windows(2) {
            assert!(pair[0].1 <= pair[1].1);
        }
    }

    #[test]
    fn fekete_refuses_violations_and_negatives() {
        let a = [int(2), int(1), int(3)];
        assert!(matches!(
            fekete_limit(&a, true),
            Err(Error::NotSupermultiplicative { m: 1, n: 1 })
        ));
        // Without the check the same sequence is summarized as-is.
        assert!(fekete_limit(&a, false).unwrap().sup_root >= 2.0);
        let b = [int(1), int(-1)];
        assert!(matches!(
            fekete_limit(&b, true),
            Err(Error::NegativeEntry { index: 2, .. })
        ));
        assert!(matches!(
            fekete_limit(&[], false),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn limsup_estimate_profiles() {
        let est = estimate_limsup(&golden(), 8).unwrap();
        assert!(!est.certified);
        // g(8) = 34 → 34^{1/8} ≈ 1.5544.
        assert!((est.roots[7] - 1.5544).abs() < 1e-3);
        // All-zero system: all roots zero.
        let op = BilinearMap::from_coeffs(1, vec![(0, 0, 0, int(1))]).unwrap();
        let sys = BilinearSystem::new(
            1,
            vec![op],
            vec![Vector::new(vec![Scalar::zero()])],
            SignClass::Nonnegative,
        )
        .unwrap();
        assert_eq!(estimate_limsup(&sys, 5).unwrap().roots, vec![0.0; 5]);
    }

    #[test]
    fn golden_bounds_report_sandwiches_phi() {
        let report = bounds_report(&golden(), 8, 3).unwrap();
        // The diagonal-power rate bound pushes the floor past the plain rows.
        assert!(report.lower >= 1.61, "lower = {}", report.lower);
        assert!(report.lower <= PHI);
        assert!(report.upper >= PHI);
        assert!(report.upper <= 2.0 + 1e-12, "upper = {}", report.upper);
        // Running lower bounds are monotone and end at the best row root.
        for pair in report.running_lower.windows(2) {
            assert!(pair[0] <= pair[1]);
        }
        // The rate witness replays exactly.
        let rate = report.rate.as_ref().expect("golden has a rate bound");
        let exact = scalar_from_f64(rate.root).unwrap();
        assert!(pow_scalar(&exact, rate.power) <= rate.value);
        // And its matrix power really shows the diagonal entry.
        let m = pattern_matrix(&golden(), &rate.pattern).unwrap();
        let k = rate.power / rate.pattern.leaf_count() as u32;
        assert_eq!(m.pow(k).get(rate.index, rate.index), &rate.value);
        // Sandwich holds row by row.
        for row in &report.rows {
            assert!(row.root <= report.upper);
        }
    }

    #[test]
    fn doubling_bounds_report_is_tight() {
        let report = bounds_report(&doubling(), 4, 3).unwrap();
        assert_eq!(report.lower, 2.0);
        assert_eq!(report.upper, 2.0);
    }
}
