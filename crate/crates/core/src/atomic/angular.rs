//! Angular-momentum algebra: Wigner 3j symbols, reduced matrix elements of
//! the C^k tensors and the Wigner–Eckart theorem for the `z` component.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Integer or half-integer angular momentum, stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const fn from_twice(twice: i32) -> Self {
        Self(twice)
    }

    pub const fn int(v: i32) -> Self {
        Self(2 * v)
    }

    pub fn new(v: f64) -> Result<Self> {
        let twice = 2.0 * v;
        if !twice.is_finite() || (twice - twice.round()).abs() > 1e-9 {
            return Err(Error::domain(format!("{v} is not a multiple of 1/2")));
        }
        Ok(Self(twice.round() as i32))
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl Serialize for HalfInt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.value())
    }
}

impl<'de> Deserialize<'de> for HalfInt {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        HalfInt::new(v).map_err(serde::de::Error::custom)
    }
}

const MAX_FACTORIAL: usize = 1024;

/// ln n! for n < MAX_FACTORIAL, accumulated with Neumaier summation.
fn ln_factorial(n: i32) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut out = Vec::with_capacity(MAX_FACTORIAL);
        let mut sum = NeumaierSum::default();
        out.push(0.0);
        for k in 1..MAX_FACTORIAL {
            sum.add((k as f64).ln());
            out.push(sum.value());
        }
        out
    });
    table[n as usize]
}

#[derive(Default)]
struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

fn check_pair(j: HalfInt, m: HalfInt) -> Result<()> {
    if j.twice() < 0 {
        return Err(Error::domain(format!("negative angular momentum {j}")));
    }
    if m.twice().abs() > j.twice() {
        return Err(Error::domain(format!("|m| = {m} exceeds j = {j}")));
    }
    if (j.twice() - m.twice()) % 2 != 0 {
        return Err(Error::domain(format!("j = {j} and m = {m} differ by a non-integer")));
    }
    Ok(())
}

/// Wigner 3j symbol by the Racah sum over log-factorials.
///
/// Returns zero when the projections do not sum to zero or the triangle
/// condition fails; rejects malformed `(j, m)` pairs.
pub fn wigner_3j_half(j1: HalfInt, j2: HalfInt, j3: HalfInt, m1: HalfInt, m2: HalfInt, m3: HalfInt) -> Result<f64> {
    check_pair(j1, m1)?;
    check_pair(j2, m2)?;
    check_pair(j3, m3)?;
    let (tj1, tj2, tj3) = (j1.twice(), j2.twice(), j3.twice());
    let (tm1, tm2, tm3) = (m1.twice(), m2.twice(), m3.twice());
    if tm1 + tm2 + tm3 != 0 {
        return Ok(0.0);
    }
    if (tj1 + tj2 + tj3) % 2 != 0 || tj3 > tj1 + tj2 || tj3 < (tj1 - tj2).abs() {
        return Ok(0.0);
    }
    if (tj1 + tj2 + tj3) / 2 + 1 >= MAX_FACTORIAL as i32 {
        return Err(Error::domain("angular momenta too large for the factorial table"));
    }
    // Every combination below is an integer once halved.
    let h = |x: i32| x / 2;
    let a = h(tj1 + tj2 - tj3);
    let b = h(tj1 - tj2 + tj3);
    let c = h(-tj1 + tj2 + tj3);
    let ln_triangle = ln_factorial(a) + ln_factorial(b) + ln_factorial(c) - ln_factorial(h(tj1 + tj2 + tj3) + 1);
    let ln_proj = ln_factorial(h(tj1 + tm1))
        + ln_factorial(h(tj1 - tm1))
        + ln_factorial(h(tj2 + tm2))
        + ln_factorial(h(tj2 - tm2))
        + ln_factorial(h(tj3 + tm3))
        + ln_factorial(h(tj3 - tm3));
    let ln_pref = 0.5 * (ln_triangle + ln_proj);

    let d1 = h(tj3 - tj2 + tm1);
    let d2 = h(tj3 - tj1 - tm2);
    let e1 = h(tj1 - tm1);
    let e2 = h(tj2 + tm2);
    let k_min = 0.max(-d1).max(-d2);
    let k_max = a.min(e1).min(e2);
    let mut sum = NeumaierSum::default();
    for k in k_min..=k_max {
        let ln_den = ln_factorial(k)
            + ln_factorial(d1 + k)
            + ln_factorial(d2 + k)
            + ln_factorial(a - k)
            + ln_factorial(e1 - k)
            + ln_factorial(e2 - k);
        let term = (ln_pref - ln_den).exp();
        sum.add(if k % 2 == 0 { term } else { -term });
    }
    let phase = h(tj1 - tj2 - tm3);
    let sign = if phase.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    Ok(sign * sum.value())
}

/// Wigner 3j symbol for real arguments that must be multiples of 1/2.
pub fn wigner_3j(j1: f64, j2: f64, j3: f64, m1: f64, m2: f64, m3: f64) -> Result<f64> {
    wigner_3j_half(
        HalfInt::new(j1)?,
        HalfInt::new(j2)?,
        HalfInt::new(j3)?,
        HalfInt::new(m1)?,
        HalfInt::new(m2)?,
        HalfInt::new(m3)?,
    )
}

/// 3j symbol for arguments known to be well formed; zero otherwise.
pub(crate) fn three_j(j1: HalfInt, j2: HalfInt, j3: HalfInt, m1: HalfInt, m2: HalfInt, m3: HalfInt) -> f64 {
    wigner_3j_half(j1, j2, j3, m1, m2, m3).unwrap_or(0.0)
}

fn parity_sign(twice_exponent: i32) -> f64 {
    debug_assert!(twice_exponent % 2 == 0);
    if (twice_exponent / 2).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `⟨l‖C^k‖l'⟩ = (-1)^l √((2l+1)(2l'+1)) (l k l'; 0 0 0)`.
pub fn reduced_ck(l: u32, k: u32, lp: u32) -> f64 {
    let (l, k, lp) = (l as i32, k as i32, lp as i32);
    let z = HalfInt::int(0);
    let tj = three_j(HalfInt::int(l), HalfInt::int(k), HalfInt::int(lp), z, z, z);
    parity_sign(2 * l) * (((2 * l + 1) * (2 * lp + 1)) as f64).sqrt() * tj
}

/// `⟨j‖C^k‖j'⟩ = (-1)^(j+1/2) √((2j+1)(2j'+1)) (j j' k; -1/2 1/2 0)` for
/// half-integer `j`, `j'` in a single-electron `l s j` basis. Parity is
/// carried by the orbital part and must be checked by the caller.
pub fn reduced_ck_half(j: HalfInt, k: u32, jp: HalfInt) -> Result<f64> {
    if j.is_integer() || jp.is_integer() {
        return Err(Error::domain("reduced_ck_half takes half-integer j"));
    }
    let half = HalfInt::from_twice(1);
    let tj = three_j(j, jp, HalfInt::int(k as i32), HalfInt::from_twice(-1), half, HalfInt::int(0));
    Ok(parity_sign(j.twice() + 1) * (((j.twice() + 1) * (jp.twice() + 1)) as f64).sqrt() * tj)
}

/// `⟨j m|z|j' m⟩ = (-1)^(j-m) (j 1 j'; -m 0 m) ⟨j‖r‖j'⟩`.
pub fn wigner_eckart_z(j: HalfInt, m: HalfInt, jp: HalfInt, reduced: f64) -> f64 {
    if m.twice().abs() > j.twice() || m.twice().abs() > jp.twice() || (j.twice() - m.twice()) % 2 != 0 {
        return 0.0;
    }
    let neg_m = HalfInt::from_twice(-m.twice());
    parity_sign(j.twice() - m.twice()) * three_j(j, HalfInt::int(1), jp, neg_m, HalfInt::int(0), m) * reduced
}

/// `⟨L m| cos θ |l m⟩`, the angular part of the dipole `z` operator between
/// orbital states.
pub fn cos_theta_element(big_l: u32, l: u32, m: i32) -> f64 {
    wigner_eckart_z(HalfInt::int(big_l as i32), HalfInt::int(m), HalfInt::int(l as i32), reduced_ck(big_l, 1, l))
}

/// `Y_lm(θ, φ = 0)` with the Condon–Shortley phase. The azimuthal factor
/// `e^{imφ}` is left to the caller.
pub fn spherical_harmonic(l: u32, m: i32, theta: f64) -> f64 {
    let am = m.unsigned_abs();
    if am > l {
        return 0.0;
    }
    let x = theta.cos();
    let sx = theta.sin().abs();
    // P_m^m, then upward in l.
    let mut pmm = 1.0;
    for i in 0..am {
        pmm *= -((2 * i + 1) as f64) * sx;
    }
    let plm = if l == am {
        pmm
    } else {
        let mut p_prev = pmm;
        let mut p = x * (2 * am + 1) as f64 * pmm;
        for ll in am + 2..=l {
            let next = ((2 * ll - 1) as f64 * x * p - (ll + am - 1) as f64 * p_prev) / (ll - am) as f64;
            p_prev = p;
            p = next;
        }
        p
    };
    let ln_ratio = ln_factorial((l - am) as i32) - ln_factorial((l + am) as i32);
    let y = ((2 * l + 1) as f64 / (4.0 * std::f64::consts::PI) * ln_ratio.exp()).sqrt() * plm;
    if m < 0 {
        parity_sign(2 * m) * y
    } else {
        y
    }
}
