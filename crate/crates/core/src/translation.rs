//! Translation surfaces x³ = f(x¹) + g(x²). Minimality reduces to
//! λ f″ + μ g″ = 0 with λ, μ polynomial in r = f′², s = g′², and with
//! p = r + s, q = r − s one has λ = K(p) − L(p)q, μ = K(p) + L(p)q.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{self, rat};
use crate::jet::{mce0_bracket_exact, ImmersionJet1, ImmersionJet2};
use crate::poly::Poly;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TranslationPoint {
    pub fp: f64,
    pub fpp: f64,
    pub gp: f64,
    pub gpp: f64,
}

impl TranslationPoint {
    pub fn new(fp: f64, fpp: f64, gp: f64, gpp: f64) -> Self {
        Self { fp, fpp, gp, gpp }
    }
    pub fn r(&self) -> f64 {
        self.fp * self.fp
    }
    pub fn s(&self) -> f64 {
        self.gp * self.gp
    }
    pub fn p(&self) -> f64 {
        self.r() + self.s()
    }
    pub fn q(&self) -> f64 {
        self.r() - self.s()
    }

    pub fn jets(&self) -> (ImmersionJet1, ImmersionJet2) {
        (ImmersionJet1::graph(self.fp, self.gp), ImmersionJet2::graph(self.fpp, 0.0, self.gpp))
    }
}

/// λ = α(1 + s) + βr, μ = α(1 + r) + βs with T = 2 + (2 + b²)p,
/// α = T(T − 2b²), β = 2b²(T + 4b²).
fn lambda_mu_generic<F: field::Field>(r: F, s: F, b2: F) -> (F, F) {
    let n = F::from_i64;
    let p = r.clone() + s.clone();
    let t = n(2) + (n(2) + b2.clone()) * p;
    let alpha = t.clone() * (t.clone() - n(2) * b2.clone());
    let beta = n(2) * b2.clone() * (t + n(4) * b2);
    let lambda = alpha.clone() * (n(1) + s.clone()) + beta.clone() * r.clone();
    let mu = alpha * (n(1) + r) + beta * s;
    (lambda, mu)
}

pub fn lambda_mu(r: f64, s: f64, b: f64) -> (f64, f64) {
    lambda_mu_generic(r, s, b * b)
}

pub fn lambda_mu_exact(r: &BigRational, s: &BigRational, b2: &BigRational) -> (BigRational, BigRational) {
    lambda_mu_generic(r.clone(), s.clone(), b2.clone())
}

pub fn translation_residual(tp: &TranslationPoint, b: f64) -> f64 {
    let (l, m) = lambda_mu(tp.r(), tp.s(), b);
    l * tp.fpp + m * tp.gpp
}

/// Exact mean-curvature bracket of the graph jet with f′ = a, g′ = c and
/// the given second derivatives, v = φ_{x¹} × φ_{x²}.
fn bracket_exact(
    a: &BigRational,
    c: &BigRational,
    fpp: &BigRational,
    gpp: &BigRational,
    b2: &BigRational,
) -> BigRational {
    let one = BigRational::one;
    let zero = BigRational::zero;
    let z = [[one(), zero()], [zero(), one()], [a.clone(), c.clone()]];
    let second = [
        [[zero(), zero()], [zero(), zero()]],
        [[zero(), zero()], [zero(), zero()]],
        [[fpp.clone(), zero()], [zero(), gpp.clone()]],
    ];
    let v = [-a.clone(), -c.clone(), one()];
    mce0_bracket_exact(&z, &second, b2, &v)
}

/// λ and μ read off the exact bracket, which equals 2(λ f″ + μ g″), at
/// f′ = a, g′ = c. Shares no code with [`lambda_mu`].
pub fn lambda_mu_oracle(a: &BigRational, c: &BigRational, b2: &BigRational) -> (BigRational, BigRational) {
    let (one, zero) = (BigRational::one(), BigRational::zero());
    let two = rat(2, 1);
    (bracket_exact(a, c, &one, &zero, b2) / &two, bracket_exact(a, c, &zero, &one, b2) / two)
}

fn check_b2(b2: &BigRational) -> Result<()> {
    if b2.is_negative() || *b2 >= rat(1, 4) {
        return Err(Error::InvalidParameter(format!("b² = {b2} outside [0, 1/4)")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct KLPolys {
    pub b2: BigRational,
    pub k: Poly,
    pub l: Poly,
}

impl KLPolys {
    pub fn lambda_mu(&self, r: &BigRational, s: &BigRational) -> (BigRational, BigRational) {
        let p = r + s;
        let q = r - s;
        let (k, l) = (self.k.eval(&p), self.l.eval(&p));
        (&k - &l * &q, k + l * q)
    }

    /// (K/L)′ at p; `Pole` where L vanishes.
    pub fn ratio_derivative(&self, p: &BigRational) -> Result<BigRational> {
        ratio_derivative(self, p)
    }
}

/// K and L by interpolation of the exact bracket. On the axis s = 0,
/// p = q = n², so K(n²) = (λ + μ)/2 and L(n²) = (μ − λ)/(2n²).
pub fn kl_polys(b2: &BigRational) -> Result<KLPolys> {
    check_b2(b2)?;
    let zero = BigRational::zero();
    let mut kx = Vec::new();
    let mut ky = Vec::new();
    let mut lx = Vec::new();
    let mut ly = Vec::new();
    for n in 0..4i64 {
        let a = rat(n, 1);
        let (lam, mu) = lambda_mu_oracle(&a, &zero, b2);
        let p = &a * &a;
        ky.push((&lam + &mu) / rat(2, 1));
        kx.push(p.clone());
        if n > 0 {
            ly.push((mu - lam) / (rat(2, 1) * &p));
            lx.push(p);
        }
    }
    Ok(KLPolys { b2: b2.clone(), k: Poly::interpolate(&kx, &ky)?, l: Poly::interpolate(&lx, &ly)? })
}

/// Coefficients of K and L as polynomials in B = b², interpolated from
/// [`kl_polys`] at B ∈ {0, 1/100, 4/100, 9/100, 16/100}.
#[derive(Clone, Debug, PartialEq)]
pub struct FormalKL {
    pub k: Vec<Poly>,
    pub l: Vec<Poly>,
}

pub fn kl_polys_formal() -> Result<FormalKL> {
    let nodes: Vec<BigRational> = [0, 1, 4, 9, 16].iter().map(|&n| rat(n, 100)).collect();
    let tables: Vec<KLPolys> = nodes.iter().map(kl_polys).collect::<Result<_>>()?;
    let column = |deg: usize, pick: fn(&KLPolys) -> &Poly| -> Result<Vec<Poly>> {
        (0..=deg)
            .map(|i| Poly::interpolate(&nodes, &tables.iter().map(|t| pick(t).coeff(i)).collect::<Vec<_>>()))
            .collect()
    };
    Ok(FormalKL { k: column(3, |t| &t.k)?, l: column(2, |t| &t.l)? })
}

/// (K′L − KL′)/L² at p.
pub fn kl_ratio_derivative(b2: &BigRational, p: &BigRational) -> Result<BigRational> {
    let kl = kl_polys(b2)?;
    ratio_derivative(&kl, p)
}

fn ratio_derivative(kl: &KLPolys, p: &BigRational) -> Result<BigRational> {
    let l = kl.l.eval(p);
    if l.is_zero() {
        return Err(Error::Pole(format!("L({p}) = 0 for b² = {}", kl.b2)));
    }
    let k = kl.k.eval(p);
    let kp = kl.k.derivative().eval(p);
    let lp = kl.l.derivative().eval(p);
    Ok((kp * &l - k * lp) / (&l * &l))
}

/// K/L as printed in closed form:
/// p + (8 + 32B − 10B²)/(2+B)² + 4B²/T·[(132 − 60B + 9B²)p + 2(66 − 21B)]/(2+B)²,
/// T = 4 − 16B + (8 − 12B + 4B²)p + (2+B)²p².
pub fn printed_kl_ratio(b2: &BigRational, p: &BigRational) -> BigRational {
    let n = |v: i64| rat(v, 1);
    let b = b2.clone();
    let b_sq = &b * &b;
    let d = (n(2) + &b) * (n(2) + &b);
    let t = n(4) - n(16) * &b + (n(8) - n(12) * &b + n(4) * &b_sq) * p + &d * p * p;
    let head = p + (n(8) + n(32) * &b - n(10) * &b_sq) / &d;
    let tail = n(4) * &b_sq / t * ((n(132) - n(60) * &b + n(9) * &b_sq) * p + n(2) * (n(66) - n(21) * &b)) / d;
    head + tail
}

/// Polynomial in q whose coefficients are polynomials in p.
type QPoly = Vec<Poly>;

fn q_mul(a: &QPoly, b: &QPoly) -> QPoly {
    let mut out = vec![Poly::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    out
}

fn q_add(a: &QPoly, b: &QPoly, sign: i64) -> QPoly {
    let n = a.len().max(b.len());
    let s = rat(sign, 1);
    (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_default();
            let y = b.get(i).map(|y| y.scale(&s)).unwrap_or_default();
            &x + &y
        })
        .collect()
}

fn q_dp(a: &QPoly) -> QPoly {
    a.iter().map(Poly::derivative).collect()
}

/// Cleared numerator of (log λ/μ)_pp − (log λ/μ)_qq in the variables (p, q):
/// a_pp·a·c² − a_p²c² − c_pp·c·a² + c_p²a² + L²c² − L²a², a = K − Lq, c = K + Lq.
pub fn compatibility_numerator(kl: &KLPolys) -> Vec<Poly> {
    let a: QPoly = vec![kl.k.clone(), -&kl.l];
    let c: QPoly = vec![kl.k.clone(), kl.l.clone()];
    let (ap, cp) = (q_dp(&a), q_dp(&c));
    let (app, cpp) = (q_dp(&ap), q_dp(&cp));
    let (a2, c2) = (q_mul(&a, &a), q_mul(&c, &c));
    let l2: QPoly = vec![&kl.l * &kl.l];
    let mut n = q_mul(&q_mul(&app, &a), &c2);
    n = q_add(&n, &q_mul(&q_mul(&ap, &ap), &c2), -1);
    n = q_add(&n, &q_mul(&q_mul(&cpp, &c), &a2), -1);
    n = q_add(&n, &q_mul(&q_mul(&cp, &cp), &a2), 1);
    n = q_add(&n, &q_mul(&l2, &c2), 1);
    n = q_add(&n, &q_mul(&l2, &a2), -1);
    n
}

/// K″L³ − KL²L″ − 2K′L′L² + 2KLL′².
pub fn compatibility_e1(kl: &KLPolys) -> Poly {
    let (k, l) = (&kl.k, &kl.l);
    let (kp, lp) = (k.derivative(), l.derivative());
    let (kpp, lpp) = (kp.derivative(), lp.derivative());
    let l2 = l * l;
    let two = rat(2, 1);
    let t1 = &kpp * &(&l2 * l);
    let t2 = &(k * &l2) * &lpp;
    let t3 = (&(&kp * &lp) * &l2).scale(&two);
    let t4 = (&(k * l) * &(&lp * &lp)).scale(&two);
    &(&(&t1 - &t2) - &t3) + &t4
}

/// −K″K²L + K³L″ − 2K′K²L′ + 2K′²KL − 2KL³.
pub fn compatibility_e2(kl: &KLPolys) -> Poly {
    let (k, l) = (&kl.k, &kl.l);
    let (kp, lp) = (k.derivative(), l.derivative());
    let (kpp, lpp) = (kp.derivative(), lp.derivative());
    let k2 = k * k;
    let two = rat(2, 1);
    let t1 = &(&kpp * &k2) * l;
    let t2 = &(&k2 * k) * &lpp;
    let t3 = (&(&kp * &k2) * &lp).scale(&two);
    let t4 = (&(&(&kp * &kp) * k) * l).scale(&two);
    let t5 = (&(k * l) * &(l * l)).scale(&two);
    &(&(&(&t2 - &t1) - &t3) + &t4) - &t5
}

/// `num/den` with an explicit denominator.
pub fn rat_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn poly_strings(p: &Poly) -> Vec<String> {
    p.coeffs().iter().map(rat_string).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LowestTerm {
    pub expression: String,
    pub power: usize,
    pub coefficient: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompatibilityReport {
    pub b2: String,
    pub k: Vec<String>,
    pub l: Vec<String>,
    pub e1: Vec<String>,
    pub e2: Vec<String>,
    pub e1_is_zero: bool,
    pub e2_is_zero: bool,
    pub both_hold: bool,
    pub lowest_nonzero: Option<LowestTerm>,
    /// E1 and E2 equal −½ times the q³ and q¹ coefficients of the cleared
    /// log-ratio numerator, whose even q-coefficients vanish.
    pub numerator_agrees: bool,
    /// K = Q·L + R.
    pub k_over_l_quotient: Vec<String>,
    pub k_over_l_remainder: Vec<String>,
    /// Whether the printed closed form of K/L agrees with K/L at the sample
    /// nodes p ∈ {0, 1/2, 1, 2, 5, 10}.
    pub printed_ratio_matches: bool,
}

pub const SAMPLE_P: [(i64, i64); 6] = [(0, 1), (1, 2), (1, 1), (2, 1), (5, 1), (10, 1)];

pub fn compatibility_check(b2: &BigRational) -> Result<CompatibilityReport> {
    let kl = kl_polys(b2)?;
    let e1 = compatibility_e1(&kl);
    let e2 = compatibility_e2(&kl);
    let num = compatibility_numerator(&kl);
    let half = rat(-1, 2);
    let coeff = |i: usize| num.get(i).cloned().unwrap_or_default();
    let numerator_agrees = coeff(3).scale(&half) == e1
        && coeff(1).scale(&half) == e2
        && coeff(0).is_zero()
        && coeff(2).is_zero()
        && num.iter().skip(4).all(Poly::is_zero);
    let lowest_nonzero = [("E1", &e1), ("E2", &e2)]
        .iter()
        .filter_map(|(name, p)| p.lowest_nonzero().map(|(i, c)| (i, *name, c.clone())))
        .min_by_key(|(i, _, _)| *i)
        .map(|(power, name, c)| LowestTerm { expression: name.to_string(), power, coefficient: rat_string(&c) });
    let (quot, rem) = kl.k.div_rem(&kl.l)?;
    let printed_ratio_matches = SAMPLE_P.iter().all(|&(n, d)| {
        let p = rat(n, d);
        let l = kl.l.eval(&p);
        !l.is_zero() && kl.k.eval(&p) / l == printed_kl_ratio(b2, &p)
    });
    Ok(CompatibilityReport {
        b2: rat_string(b2),
        k: poly_strings(&kl.k),
        l: poly_strings(&kl.l),
        e1_is_zero: e1.is_zero(),
        e2_is_zero: e2.is_zero(),
        both_hold: e1.is_zero() && e2.is_zero(),
        e1: poly_strings(&e1),
        e2: poly_strings(&e2),
        lowest_nonzero,
        numerator_agrees,
        k_over_l_quotient: poly_strings(&quot),
        k_over_l_remainder: poly_strings(&rem),
        printed_ratio_matches,
    })
}

/// Exact (K/L)′ at one p for a given b².
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RigidityRow {
    pub b2: String,
    pub p: String,
    pub ratio_derivative: String,
    pub ratio_derivative_f64: f64,
    pub is_plus_minus_one: bool,
}

pub fn rigidity_table(b2: &BigRational, ps: &[BigRational]) -> Result<Vec<RigidityRow>> {
    let kl = kl_polys(b2)?;
    ps.iter()
        .map(|p| {
            let d = ratio_derivative(&kl, p)?;
            Ok(RigidityRow {
                b2: rat_string(b2),
                p: rat_string(p),
                ratio_derivative_f64: num_traits::ToPrimitive::to_f64(&d).unwrap_or(f64::NAN),
                is_plus_minus_one: d.abs().is_one(),
                ratio_derivative: rat_string(&d),
            })
        })
        .collect()
}

/// Parses `1/100`, `0.01` or `3` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Argument(format!("cannot parse '{s}' as a rational"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("0{int}{frac}").parse().map_err(|_| bad())?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    let r = BigRational::new(digits, den);
    Ok(if neg { -r } else { r })
}
