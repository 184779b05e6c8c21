use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::algebra::{component_dimension, for_each_word, Field, FreePoly, Monomial, Scalar};
use crate::construction::{
    member_with, phi_poly, phi_signed, span_basis, ComponentSpan, ConstructionParams,
    Generator, MembershipCertificate, PhiImage, Route, Space, SpanQuery, SwapRule, Verdict,
    ZElement,
};
use crate::ore::{ore_pow, power_x0x, windowed_power, OrePoly};
use crate::series::{
    coefficient_identity, invert_one_minus, s_index, vandermonde_extract, InnerDerivation,
    Matrix, MatrixAlgebra, NilAlgebraElement, SeriesError,
};

use super::sampling::{random_block_generator, random_word, sample_z};
use super::{certificate_value, CampaignReport, CheckRecord, ComponentRef, HarnessError, HarnessOptions};

const Q: Field = Field::Rationals;

fn rng(opts: &HarnessOptions) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(opts.seed)
}

fn params_json(params: &ConstructionParams) -> Value {
    json!({
        "b": params.b,
        "r": params.r,
        "k_max": params.k_max,
        "field": params.field.to_string(),
        "swap_rule": params.swap_rule,
    })
}

/// A decided and re-verified membership query.
struct Decision {
    cert: MembershipCertificate,
    verified: bool,
    /// False when an independent route disagreed.
    agrees: bool,
}

impl Decision {
    fn member(&self) -> bool {
        self.cert.verdict == Verdict::Member
    }

    fn sound(&self) -> bool {
        self.verified && self.agrees
    }
}

fn decide(
    a: &FreePoly,
    query: &SpanQuery,
    params: &ConstructionParams,
    opts: &HarnessOptions,
) -> Result<Decision, HarnessError> {
    let cert = member_with(a, query, params, Route::default_for(query.space), &opts.budget)?;
    let verified = cert.verify(params, &opts.budget).is_ok();
    let mut agrees = true;
    let block_space = matches!(query.space, Space::B(_) | Space::BSum(_));
    if block_space && component_dimension(query.length, query.degree) <= opts.cross_check_dim {
        let full = member_with(a, query, params, Route::Full, &opts.budget)?;
        agrees = full.verdict == cert.verdict && full.verify(params, &opts.budget).is_ok();
    }
    Ok(Decision {
        cert,
        verified,
        agrees,
    })
}

fn is_ballot(word: &Monomial) -> bool {
    let mut sum = 0u64;
    word.letters().iter().enumerate().all(|(i, &n)| {
        sum += n;
        sum <= i as u64
    })
}

/// Number of index sequences of length `m` with partial sums `<= i - 1`.
fn ballot_count(m: u64) -> u128 {
    let m = m as usize;
    // ways[s] = number of prefixes with partial sum s
    let mut ways = vec![0u128; m + 1];
    ways[0] = 1;
    for i in 1..=m {
        let mut next = vec![0u128; m + 1];
        for (s, &w) in ways.iter().enumerate() {
            if w == 0 {
                continue;
            }
            for t in s..i {
                next[t] += w;
            }
        }
        ways = next;
    }
    ways.iter().sum()
}

/// Every summand of every coefficient of `(x_0 X)^m`, `m <= m_max`, has
/// length `m`, sits at exponent `m - deg`, and satisfies the ballot bound.
pub fn verify_ballot(m_max: u64, opts: &HarnessOptions) -> Result<CampaignReport, HarnessError> {
    let mut report = CampaignReport::new("ballot", json!({ "m_max": m_max, "field": "rationals" }), opts);
    for m in 1..=m_max {
        let p = power_x0x(m, Q, opts.expansion_budget)?;
        let mut terms = 0u64;
        let mut bad: Option<String> = None;
        for (t, a) in p.iter() {
            for mono in a.monomials() {
                terms += 1;
                let ok = mono.len() as u64 == m && mono.degree() + t == m && is_ballot(mono);
                if !ok && bad.is_none() {
                    bad = Some(format!("{mono} at X^{t}"));
                }
            }
        }
        let top = p.get(m) == Some(&FreePoly::monomial(Monomial::power(0, m as usize), Q));
        let constant_zero = p.get(0).is_none();
        report.push(CheckRecord::mandatory(
            format!("ballot m={m}"),
            bad.is_none() && top && constant_zero,
            json!({
                "terms": terms,
                "top_is_x0_power": top,
                "constant_term_zero": constant_zero,
                "violation": bad,
            }),
        ));
        report.push(CheckRecord::info(
            format!("ballot coverage m={m}"),
            json!({ "ballot_words": ballot_count(m).to_string(), "occurring": terms }),
        ));
        for &field in &opts.extra_fields {
            let pf = power_x0x(m, field, opts.expansion_budget)?;
            let occurring: usize = pf.iter().map(|(_, a)| a.num_terms()).sum();
            let ballot = pf
                .iter()
                .all(|(t, a)| a.monomials().all(|s| s.degree() + t == m && is_ballot(s)));
            report.push(CheckRecord::info(
                format!("ballot m={m} over {field}"),
                json!({
                    "ballot_holds": ballot,
                    "occurring": occurring,
                    "vanished": terms - occurring as u64,
                }),
            ));
        }
    }
    Ok(report)
}

fn z_kind(z: &ZElement) -> &'static str {
    match z {
        ZElement::Repeat { .. } => "repeat",
        ZElement::Swap { .. } => "swap",
    }
}

/// `D(z)` lies in the span of `Z_k` for sampled `z`, with the decomposition
/// into `Z_k` elements recorded.
pub fn verify_z_closure(
    params: &ConstructionParams,
    k: u32,
    sample_size: usize,
    opts: &HarnessOptions,
) -> Result<CampaignReport, HarnessError> {
    let mut report = CampaignReport::new(
        "z-closure",
        json!({ "params": params_json(params), "k": k, "samples": sample_size }),
        opts,
    );
    let level = params.level(k)?;
    let len = level.z_length();
    let field = params.field;
    let mut rng = rng(opts);

    let zero_q = SpanQuery::new(Space::B(k), len, 1);
    let zero = decide(&FreePoly::zero(field), &zero_q, params, opts)?;
    report.push(CheckRecord::mandatory(
        "D(0) member",
        zero.member() && zero.sound(),
        json!({}),
    ));

    let mut samples = Vec::with_capacity(sample_size);
    if sample_size > 0 {
        samples.push(ZElement::Repeat {
            word: Monomial::power(0, len),
            p: 0,
            q: 1,
        });
    }
    while samples.len() < sample_size {
        samples.push(sample_z(&mut rng, params, k, 3)?);
    }
    for z in &samples {
        let poly = z.to_poly(field);
        let dz = poly.derive();
        let degree = poly.bidegree().map(|(_, d)| d).unwrap_or(0) + 1;
        let q = SpanQuery::new(Space::B(k), len, degree);
        let d = decide(&dz, &q, params, opts)?;
        let local = member_with(&dz, &q, params, Route::Localized, &opts.budget)?;
        let agrees = local.verdict == d.cert.verdict;
        let repeats = d
            .cert
            .witness
            .iter()
            .filter(|t| matches!(t.generator, Generator::Repeat { .. }))
            .count();
        report.push(
            CheckRecord::mandatory(
                "D(z) in span Z_k",
                d.member() && d.sound() && agrees,
                json!({
                    "z": poly.to_string(),
                    "kind": z_kind(z),
                    "witness": z.witness(),
                    "decomposition": {
                        "repeat_terms": repeats,
                        "swap_terms": d.cert.witness.len() - repeats,
                    },
                    "localized_route_agrees": agrees,
                }),
            )
            .at(ComponentRef::from(&q))
            .with_certificate(certificate_value(&d.cert, d.verified, opts)),
        );
    }

    if params.swap_rule == SwapRule::AllowZero {
        // what the literal l2 > 0 reading would say about the first sample
        let literal = params.clone().with_swap_rule(SwapRule::PositiveOnly);
        let dz = FreePoly::monomial(Monomial::power(0, len), field).derive();
        let q = SpanQuery::new(Space::B(k), len, 1);
        let cert = member_with(&dz, &q, &literal, Route::Projection, &opts.budget)?;
        report.push(CheckRecord::info(
            "D(x0^(N-1)) under the l2 > 0 reading",
            json!({ "verdict": cert.verdict }),
        ));
    }
    Ok(report)
}

/// Every spanning element of `I_k` in the given components is a member of
/// `W_k` and of `B_k`.
pub fn verify_inclusions(
    params: &ConstructionParams,
    k: u32,
    lengths: &[usize],
    degree_cap: u64,
    opts: &HarnessOptions,
) -> Result<CampaignReport, HarnessError> {
    let mut report = CampaignReport::new(
        "inclusions",
        json!({
            "params": params_json(params),
            "k": k,
            "lengths": lengths,
            "degree_cap": degree_cap,
        }),
        opts,
    );
    let field = params.field;
    for &length in lengths {
        for degree in 0..=degree_cap {
            let iq = SpanQuery::new(Space::I(k), length, degree);
            let generators = span_basis(&iq, params, &opts.budget)?;
            if generators.is_empty() {
                report.push(
                    CheckRecord::info("I_k component empty", json!({})).at(ComponentRef::from(&iq)),
                );
                continue;
            }
            let wq = SpanQuery::new(Space::W(k), length, degree);
            let bq = SpanQuery::new(Space::B(k), length, degree);
            let w_span = ComponentSpan::full(wq, params, &opts.budget)?;
            let (mut in_w, mut in_b, mut elements) = (0usize, 0usize, 0usize);
            let (mut bad_w, mut bad_b): (Option<String>, Option<String>) = (None, None);
            for g in &generators {
                let poly = g.to_poly(field);
                if poly.is_zero() {
                    continue;
                }
                elements += 1;
                let wc = w_span.certify(&poly)?;
                if wc.is_member() && wc.verify(params, &opts.budget).is_ok() {
                    in_w += 1;
                } else if bad_w.is_none() {
                    bad_w = Some(g.to_string());
                }
                let bc = member_with(&poly, &bq, params, Route::Projection, &opts.budget)?;
                if bc.is_member() && bc.verify(params, &opts.budget).is_ok() {
                    in_b += 1;
                } else if bad_b.is_none() {
                    bad_b = Some(g.to_string());
                }
            }
            report.push(
                CheckRecord::mandatory(
                    "I_k in W_k",
                    in_w == elements,
                    json!({
                        "elements": elements,
                        "members": in_w,
                        "w_rank": w_span.rank(),
                        "first_failure": bad_w,
                    }),
                )
                .at(ComponentRef::from(&iq)),
            );
            report.push(
                CheckRecord::mandatory(
                    "I_k in B_k",
                    in_b == elements,
                    json!({ "elements": elements, "members": in_b, "first_failure": bad_b }),
                )
                .at(ComponentRef::from(&iq)),
            );
        }
    }
    Ok(report)
}

/// A random word of `length` letters with letter sum `degree`.
fn random_word_of_degree<R: Rng>(rng: &mut R, length: usize, degree: u64) -> Monomial {
    let mut letters = vec![0u64; length];
    for _ in 0..degree {
        letters[rng.gen_range(0..length)] += 1;
    }
    Monomial::new(letters)
}

fn random_homogeneous<R: Rng>(rng: &mut R, length: usize, degree: u64, field: Field) -> FreePoly {
    let mut p = FreePoly::zero(field);
    while p.is_zero() {
        for _ in 0..rng.gen_range(1..=3) {
            let c = loop {
                let c = rng.gen_range(-3i64..=3);
                if c != 0 {
                    break c;
                }
            };
            p.add_term(random_word_of_degree(rng, length, degree), Scalar::from_i64(c, field));
        }
    }
    p
}

/// Products `a_1 x_{m_1} ... a_n x_{m_n}` of certified non-members of
/// `B_1 + ... + B_k` with lengths `N p_i - 1` stay outside the sum.
pub fn verify_product_lemma(
    params: &ConstructionParams,
    k: u32,
    trials: usize,
    opts: &HarnessOptions,
) -> Result<CampaignReport, HarnessError> {
    let mut report = CampaignReport::new(
        "product",
        json!({ "params": params_json(params), "k": k, "trials": trials }),
        opts,
    );
    let n_block = params.block_size(k)? as usize;
    let field = params.field;
    let mut rng = rng(opts);
    let mut skipped = 0usize;
    for trial in 0..trials {
        let n = if trial == 0 { 1 } else { rng.gen_range(1..=3) };
        let mut factors = Vec::with_capacity(n);
        let mut factors_sound = true;
        while factors.len() < n {
            let len = n_block * rng.gen_range(1..=2) - 1;
            let degree = rng.gen_range(0..=3);
            let a = random_homogeneous(&mut rng, len, degree, field);
            let d = decide(&a, &SpanQuery::new(Space::BSum(k), len, degree), params, opts)?;
            if d.member() {
                // only non-members are valid factors
                skipped += 1;
                continue;
            }
            factors_sound &= d.sound();
            factors.push((a, len, degree));
        }
        let mut product = FreePoly::one(field);
        let (mut length, mut degree) = (0usize, 0u64);
        let mut letters = Vec::with_capacity(n);
        for (a, len, d) in &factors {
            let m = rng.gen_range(0..=2u64);
            letters.push(m);
            product = product.mul(a).mul(&FreePoly::letter(m, field));
            length += len + 1;
            degree += d + m;
        }
        let q = SpanQuery::new(Space::BSum(k), length, degree);
        let d = decide(&product, &q, params, opts)?;
        report.push(
            CheckRecord::mandatory(
                "product of non-members is a non-member",
                !d.member() && d.sound() && factors_sound,
                json!({
                    "trial": trial,
                    "factors": factors.iter().map(|(a, _, _)| a.to_string()).collect::<Vec<_>>(),
                    "letters": letters,
                }),
            )
            .at(ComponentRef::from(&q))
            .with_certificate(certificate_value(&d.cert, d.verified, opts)),
        );
    }
    report.push(CheckRecord::info(
        "member factors redrawn",
        json!({ "count": skipped }),
    ));
    Ok(report)
}

/// Outcome of [`locate_escape`].
#[derive(Clone, Debug)]
pub struct EscapeResult {
    pub report: CampaignReport,
    pub m: u64,
    /// The largest `i` with `a_i` outside `B_1 + ... + B_k`.
    pub index: Option<u64>,
    pub coefficient: Option<FreePoly>,
    pub certificate: Option<MembershipCertificate>,
}

fn sum_label(k: u32) -> String {
    if k == 1 {
        "B_1".to_string()
    } else {
        format!("B_1+...+B_{k}")
    }
}

fn is_original_point(params: &ConstructionParams, k: u32, h: u64) -> bool {
    params.b == 100 && params.r == 3 && k == 1 && h == 1
}

/// Scans the coefficients of `(x_0 X)^m`, `m = N(k) h - 1`, from the top and
/// stops at the first one outside `B_1 + ... + B_k`.
fn scan_escape(
    params: &ConstructionParams,
    k: u32,
    m: u64,
    opts: &HarnessOptions,
    mut on_check: impl FnMut(u64, &FreePoly, &SpanQuery, &Decision),
) -> Result<Option<(u64, FreePoly, MembershipCertificate)>, HarnessError> {
    let mut span = 2u64;
    let mut next = m;
    loop {
        let floor = m.saturating_sub(span);
        let window = windowed_power(m, floor, params.field)?;
        let mut t = next;
        loop {
            let a = window
                .get(t)
                .cloned()
                .unwrap_or_else(|| FreePoly::zero(params.field));
            let q = SpanQuery::new(Space::BSum(k), m as usize, m - t);
            let d = decide(&a, &q, params, opts)?;
            on_check(t, &a, &q, &d);
            if !d.member() {
                return Ok(Some((t, a, d.cert)));
            }
            if t == floor {
                break;
            }
            t -= 1;
        }
        if floor == 0 {
            return Ok(None);
        }
        next = floor - 1;
        span *= 2;
    }
}

/// Finds the escape index for `m = N(k) h - 1` and checks that every higher
/// coefficient is a member. The ratio to the threshold
/// `(1/2 + 1/(2(k+1)))(m+1)` is asserted only at `b = 100, r = 3, k = 1,
/// h = 1`, where it must exceed 75 and the index must be 97 or 98.
pub fn locate_escape(
    params: &ConstructionParams,
    k: u32,
    h: u64,
    opts: &HarnessOptions,
) -> Result<EscapeResult, HarnessError> {
    let n_block = params.block_size(k)?;
    let m = n_block * h - 1;
    let mut report = CampaignReport::new(
        "escape",
        json!({ "params": params_json(params), "k": k, "h": h, "m": m }),
        opts,
    );
    let mut records = Vec::new();
    let found = scan_escape(params, k, m, opts, |t, a, q, d| {
        let claim = if d.member() {
            format!("a_{t} in {}", sum_label(k))
        } else {
            format!("a_{t} escapes {}", sum_label(k))
        };
        records.push(
            CheckRecord::mandatory(claim, d.sound(), json!({ "terms": a.num_terms() }))
                .at(ComponentRef::from(q))
                .with_certificate(certificate_value(&d.cert, d.verified, opts)),
        );
    })?;
    for r in records {
        report.push(r);
    }
    let Some((index, coefficient, cert)) = found else {
        report.push(CheckRecord::mandatory(
            "escape index exists",
            false,
            json!({ "m": m, "scanned_down_to": 0 }),
        ));
        return Ok(EscapeResult {
            report,
            m,
            index: None,
            coefficient: None,
            certificate: None,
        });
    };
    report.push(CheckRecord::mandatory(
        "escape index exists",
        true,
        json!({ "index": index }),
    ));
    // i > (1/2 + 1/(2(k+1)))(m+1)  <=>  2(k+1) i > (k+2)(m+1)
    let k64 = k as u64;
    let above = 2 * (k64 + 1) * index > (k64 + 2) * (m + 1);
    let ratio = json!({
        "index": index,
        "m_plus_1": m + 1,
        "threshold": format!("{}/{}", (k64 + 2) * (m + 1), 2 * (k64 + 1)),
        "above_threshold": above,
    });
    if is_original_point(params, k, h) && params.field == Field::Rationals {
        report.push(CheckRecord::mandatory(
            "index in {97, 98} and above 75",
            above && (index == 97 || index == 98),
            ratio,
        ));
        let window = windowed_power(m, 97, params.field)?;
        let a97 = window.coefficient_at(&crate::ore::ShiftAlgebra::new(params.field), 97);
        let q = SpanQuery::new(Space::B(1), 99, 2);
        let d = decide(&a97, &q, params, opts)?;
        report.push(
            CheckRecord::mandatory(
                "a_97 escapes B_1",
                !d.member() && d.sound(),
                json!({ "terms": a97.num_terms() }),
            )
            .at(ComponentRef::from(&q))
            .with_certificate(certificate_value(&d.cert, d.verified, opts)),
        );
        let mut letters = vec![0u64; 99];
        letters[2] = 2;
        let special = Monomial::new(letters);
        report.push(CheckRecord::mandatory(
            "a_97 contains x2 at position 3 over x0 elsewhere",
            !a97.coeff(&special).is_zero(),
            json!({ "coefficient": a97.coeff(&special).to_string() }),
        ));
    } else {
        report.push(CheckRecord::info("threshold ratio", ratio));
    }
    for &field in &opts.extra_fields {
        let p = params.clone().with_field(field);
        let other = scan_escape(&p, k, m, opts, |_, _, _, _| {})?;
        let other_index = other.map(|(i, _, _)| i);
        report.push(CheckRecord::info(
            format!("escape index over {field}"),
            json!({
                "index": other_index,
                "rational_index": index,
                "discrepancy": other_index != Some(index),
            }),
        ));
    }
    Ok(EscapeResult {
        report,
        m,
        index: Some(index),
        coefficient: Some(coefficient),
        certificate: Some(cert),
    })
}

fn absorb(report: &mut CampaignReport, prefix: &str, other: CampaignReport) {
    for mut c in other.checks {
        c.claim = format!("{prefix}{}", c.claim);
        report.push(c);
    }
}

/// Local nilpotency of `A/I` on the subalgebras generated by `x_0..x_{k-1}`
/// and non-vanishing of `(x_0 X)^m` modulo `I` through escape coefficients.
pub fn verify_counterexample(
    params: &ConstructionParams,
    k_max: u32,
    h_max: u64,
    opts: &HarnessOptions,
) -> Result<CampaignReport, HarnessError> {
    let mut report = CampaignReport::new(
        "counterexample",
        json!({ "params": params_json(params), "k_max": k_max, "h_max": h_max }),
        opts,
    );
    let field = params.field;
    let mut rng = rng(opts);
    for k in 1..=k_max {
        let n = 2 * params.block_size(k)? as usize;
        let words = (k as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        if words > opts.budget.max_spanning_set {
            report.push(CheckRecord::info(
                format!("local nilpotency k={k} skipped"),
                json!({ "words": words.to_string(), "reason": "over the spanning-set budget" }),
            ));
            continue;
        }
        // every word of length 2N over x_0..x_{k-1} is in I_k
        let mut checked = 0usize;
        let mut ok = true;
        for d in 0..=(n as u64) * (k as u64 - 1) {
            let mut ws = Vec::new();
            for_each_word(n, d, k as u64, |w| ws.push(Monomial::new(w.to_vec())));
            if ws.is_empty() {
                continue;
            }
            let span = ComponentSpan::full(SpanQuery::new(Space::I(k), n, d), params, &opts.budget)?;
            for w in ws {
                let c = span.certify(&FreePoly::monomial(w, field))?;
                ok &= c.is_member() && c.verify(params, &opts.budget).is_ok();
                checked += 1;
            }
        }
        report.push(CheckRecord::mandatory(
            format!("words of length {n} over x0..x{} lie in I_{k}", k - 1),
            ok,
            json!({ "words": checked }),
        ));
        // products of 2N elements of the subalgebra vanish modulo I
        for trial in 0..20 {
            let mut product = FreePoly::one(field);
            for _ in 0..n {
                let mut e = FreePoly::zero(field);
                for _ in 0..rng.gen_range(1..=2) {
                    let len = rng.gen_range(1..=2);
                    let w: Vec<u64> = (0..len).map(|_| rng.gen_range(0..k as u64)).collect();
                    e.add_term(Monomial::new(w), Scalar::from_i64(rng.gen_range(1..=3), field));
                }
                product = product.mul(&e);
            }
            let mut all = true;
            let components = product.components();
            for &(len, deg) in &components {
                let q = SpanQuery::new(Space::ITruncated, len, deg);
                let part = product.component(len, deg);
                let c = ComponentSpan::full(q, params, &opts.budget)?.certify(&part)?;
                all &= c.is_member() && c.verify(params, &opts.budget).is_ok();
            }
            report.push(CheckRecord::mandatory(
                format!("product of {n} subalgebra elements vanishes mod I"),
                all,
                json!({ "trial": trial, "components": components.len() }),
            ));
        }
    }
    for h in 1..=h_max {
        let esc = locate_escape(params, k_max, h, opts)?;
        absorb(&mut report, &format!("h={h}: "), esc.report);
        let (Some(i), Some(a)) = (esc.index, esc.coefficient) else {
            continue;
        };
        let q = SpanQuery::new(Space::ITruncated, esc.m as usize, esc.m - i);
        let cert = member_with(&a, &q, params, Route::Full, &opts.budget)?;
        let verified = cert.verify(params, &opts.budget).is_ok();
        report.push(
            CheckRecord::mandatory(
                format!("h={h}: a_{i} outside I, so (x0 X)^{} survives in (A/I)[X; D]", esc.m),
                !cert.is_member() && verified,
                json!({ "index": i, "m": esc.m }),
            )
            .at(ComponentRef::from(&q))
            .with_certificate(certificate_value(&cert, verified, opts)),
        );
    }
    Ok(report)
}

/// The signed checkpoint map kills `B_k` in length `N(k) - 1`, keeps
/// `B_1 + ... + B_{k-1}` inside itself, and fixes the pattern words.
pub fn verify_phi(
    params: &ConstructionParams,
    k: u32,
    trials: usize,
    opts: &HarnessOptions,
) -> Result<CampaignReport, HarnessError> {
    let mut report = CampaignReport::new(
        "phi",
        json!({ "params": params_json(params), "k": k, "trials": trials }),
        opts,
    );
    let level = params.level(k)?;
    let len = level.z_length();
    let field = params.field;
    let mut rng = rng(opts);

    let mut killed = 0usize;
    let mut first_survivor = None;
    for _ in 0..trials {
        let z = sample_z(&mut rng, params, k, 3)?;
        let image = phi_poly(&z.to_poly(field), params, k)?;
        if image.is_zero() {
            killed += 1;
        } else if first_survivor.is_none() {
            first_survivor = Some(z.to_poly(field).to_string());
        }
    }
    report.push(CheckRecord::mandatory(
        format!("phi kills B_{k} in length {len}"),
        killed == trials,
        json!({ "sampled": trials, "killed": killed, "first_survivor": first_survivor }),
    ));

    let lower: Vec<u32> = (1..k).filter(|&j| !params.is_degenerate(j)).collect();
    if lower.is_empty() {
        report.push(CheckRecord::info(
            "phi preserves B_1+...+B_(k-1)",
            json!({ "vacuous": true, "reason": "no non-degenerate lower level" }),
        ));
    } else {
        let mut kept = 0usize;
        let mut sound = true;
        let mut first_failure = None;
        let mut sampled = 0usize;
        while sampled < trials {
            let j = lower[rng.gen_range(0..lower.len())];
            let Some(g) = random_block_generator(&mut rng, params, j, len, 3)? else {
                continue;
            };
            sampled += 1;
            let image = phi_poly(&g.to_poly(field), params, k)?;
            let Some((_, degree)) = image.bidegree() else {
                kept += 1;
                continue;
            };
            let q = SpanQuery::new(Space::BSum(k - 1), len, degree);
            let d = decide(&image, &q, params, opts)?;
            sound &= d.sound();
            if d.member() {
                kept += 1;
            } else if first_failure.is_none() {
                first_failure = Some(g.to_string());
            }
        }
        report.push(CheckRecord::mandatory(
            "phi preserves B_1+...+B_(k-1)",
            kept == trials && sound,
            json!({ "sampled": trials, "preserved": kept, "first_failure": first_failure }),
        ));
    }

    let positions: Vec<usize> = level.positions().iter().map(|&c| c as usize - 1).collect();
    let mut fixed = 0usize;
    const E_SAMPLES: usize = 20;
    for _ in 0..E_SAMPLES {
        let mut letters = random_word(&mut rng, len, 3);
        for (&p, &t) in positions.iter().zip(level.target_letters()) {
            letters[p] = t;
        }
        if phi_signed(&Monomial::new(letters), params, k)? == PhiImage::Fixed {
            fixed += 1;
        }
    }
    report.push(CheckRecord::mandatory(
        "phi fixes pattern words",
        fixed == E_SAMPLES,
        json!({ "sampled": E_SAMPLES, "fixed": fixed }),
    ));
    Ok(report)
}

/// The mechanics of the nil argument on random strictly upper-triangular
/// matrices with inner derivations.
pub fn verify_series(dimension: usize, trials: usize, opts: &HarnessOptions) -> Result<CampaignReport, HarnessError> {
    let mut report = CampaignReport::new(
        "series",
        json!({ "dimension": dimension, "trials": trials }),
        opts,
    );
    let mut rng = rng(opts);
    for trial in 0..trials {
        let u = if trial % 10 == 0 {
            Matrix::zero(dimension, Q)
        } else {
            Matrix::random_strictly_upper(dimension, Q, &mut rng)
        };
        let d = InnerDerivation::new(NilAlgebraElement::new(u)?);
        let c = NilAlgebraElement::new(Matrix::random_strictly_upper(dimension, Q, &mut rng))?;
        let s = s_index(&c, &d);
        let p = s + 1 + rng.gen_range(0..=1);

        let inverse = match invert_one_minus(&c, p, &d) {
            Ok(_) => true,
            Err(SeriesError::IdentityFailed(_)) => false,
            Err(e) => return Err(e.into()),
        };
        let mut identity = true;
        for n in 1..=dimension as u64 {
            identity &= coefficient_identity(&c, p, n, &d)?;
        }

        // ((cX^p)^j)_{np} for j = n..n+dimension-1; from n = dimension on
        // every part is a product of at least `dimension` elements of R
        let alg = MatrixAlgebra::new(d.clone());
        let y = OrePoly::term(&alg, c.matrix().clone(), p);
        let parts = |n: u64| -> Vec<Matrix> {
            (n..n + dimension as u64)
                .map(|j| ore_pow(&alg, &y, j).coefficient_at(&alg, n * p))
                .collect()
        };
        let sample = |parts: &[Matrix], n: u64| -> Vec<(Scalar, Matrix)> {
            (1..=parts.len() as i64)
                .map(|a| {
                    let alpha = Scalar::from_i64(a, Q);
                    let mut v = Matrix::zero(dimension, Q);
                    for (j, part) in parts.iter().enumerate() {
                        v = v.add(&part.scale(&alpha.pow(n + j as u64)));
                    }
                    (alpha, v)
                })
                .collect()
        };
        let n0 = dimension as u64;
        let zero_parts = parts(n0);
        let zero_samples = sample(&zero_parts, n0);
        let samples_zero = zero_samples.iter().all(|(_, v)| v.is_zero());
        let recovered = vandermonde_extract(&zero_samples, n0, n0 + dimension as u64 - 1)?;
        let zero_recovery = samples_zero && recovered.iter().all(Matrix::is_zero);
        let live_parts = parts(1);
        let live = vandermonde_extract(&sample(&live_parts, 1), 1, dimension as u64)?;
        let live_recovery = live == live_parts;

        report.push(CheckRecord::mandatory(
            "series mechanics",
            s < 2 * dimension as u64 && inverse && identity && zero_recovery && live_recovery,
            json!({
                "trial": trial,
                "c": c.matrix().to_string(),
                "u": d.generator().to_string(),
                "s": s,
                "p": p,
                "inverse_two_sided": inverse,
                "coefficient_identity": identity,
                "zero_samples_give_zero_parts": zero_recovery,
                "recovers_parts": live_recovery,
            }),
        ));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ballot_counts_are_catalan() {
        let catalan = [1u128, 1, 2, 5, 14, 42, 132];
        for m in 1..=6 {
            assert_eq!(ballot_count(m), catalan[m as usize]);
        }
        assert_eq!(ballot_count(12), 208_012);
    }

    #[test]
    fn ballot_predicate() {
        assert!(is_ballot(&Monomial::new(vec![0, 1, 1])));
        assert!(!is_ballot(&Monomial::new(vec![0, 2, 0])));
        assert!(!is_ballot(&Monomial::new(vec![1])));
    }
}
