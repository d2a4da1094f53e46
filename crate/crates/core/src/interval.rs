//! Outward-rounded interval arithmetic on `f64`.
//!
//! Every operation returns an interval containing the exact image of its
//! inputs. Endpoints are computed in round-to-nearest and then stepped
//! outward by one representable value (two for the elementary functions,
//! whose libm implementations are not correctly rounded). Intervals are
//! always closed, bounded and nonempty; operations that cannot maintain
//! that signal an error instead.

use std::fmt;

/// A closed interval `[lo, hi]` with finite endpoints, `lo <= hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalError {
    /// `intersect` of disjoint intervals.
    EmptyIntersection,
    /// Division by an interval containing zero.
    DivisionByZero,
    /// `sqrt` of an interval with a negative lower endpoint.
    NegativeDomain,
}

impl fmt::Display for IntervalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntervalError::EmptyIntersection => write!(f, "intersection of disjoint intervals"),
            IntervalError::DivisionByZero => write!(f, "division by an interval containing zero"),
            IntervalError::NegativeDomain => write!(f, "square root of a negative interval"),
        }
    }
}

impl std::error::Error for IntervalError {}

#[inline]
fn step_down(x: f64, steps: u32) -> f64 {
    let mut y = x;
    for _ in 0..steps {
        y = y.next_down();
    }
    y
}

#[inline]
fn step_up(x: f64, steps: u32) -> f64 {
    let mut y = x;
    for _ in 0..steps {
        y = y.next_up();
    }
    y
}

impl Interval {
    /// Panics if the endpoints are not finite with `lo <= hi`; an invalid
    /// interval is a modeling bug, never a data condition.
    pub fn new(lo: f64, hi: f64) -> Interval {
        assert!(
            lo.is_finite() && hi.is_finite() && lo <= hi,
            "invalid interval [{lo}, {hi}]"
        );
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Interval {
        Interval::new(x, x)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn mid(&self) -> f64 {
        0.5 * self.lo + 0.5 * self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Largest absolute value of any point in the interval.
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn widen_ulps(&self, steps: u32) -> Interval {
        Interval::new(step_down(self.lo, steps), step_up(self.hi, steps))
    }

    /// Intersects with `[0, inf)`. For quantities that are nonnegative by
    /// construction (sums of squares, squared norms) whose lower endpoint
    /// drifted below zero through outward rounding.
    pub fn clamp_nonnegative(&self) -> Interval {
        Interval::new(self.lo.max(0.0), self.hi.max(0.0))
    }

    pub fn add(&self, rhs: &Interval) -> Interval {
        Interval::new(step_down(self.lo + rhs.lo, 1), step_up(self.hi + rhs.hi, 1))
    }

    pub fn sub(&self, rhs: &Interval) -> Interval {
        Interval::new(step_down(self.lo - rhs.hi, 1), step_up(self.hi - rhs.lo, 1))
    }

    pub fn neg(&self) -> Interval {
        // Negation of endpoints is exact.
        Interval::new(-self.hi, -self.lo)
    }

    pub fn mul(&self, rhs: &Interval) -> Interval {
        let p1 = self.lo * rhs.lo;
        let p2 = self.lo * rhs.hi;
        let p3 = self.hi * rhs.lo;
        let p4 = self.hi * rhs.hi;
        let lo = p1.min(p2).min(p3).min(p4);
        let hi = p1.max(p2).max(p3).max(p4);
        Interval::new(step_down(lo, 1), step_up(hi, 1))
    }

    pub fn div(&self, rhs: &Interval) -> Result<Interval, IntervalError> {
        if rhs.lo <= 0.0 && rhs.hi >= 0.0 {
            return Err(IntervalError::DivisionByZero);
        }
        let q1 = self.lo / rhs.lo;
        let q2 = self.lo / rhs.hi;
        let q3 = self.hi / rhs.lo;
        let q4 = self.hi / rhs.hi;
        let lo = q1.min(q2).min(q3).min(q4);
        let hi = q1.max(q2).max(q3).max(q4);
        Ok(Interval::new(step_down(lo, 1), step_up(hi, 1)))
    }

    pub fn sqr(&self) -> Interval {
        if self.lo >= 0.0 {
            Interval::new(
                step_down(self.lo * self.lo, 1).max(0.0),
                step_up(self.hi * self.hi, 1),
            )
        } else if self.hi <= 0.0 {
            Interval::new(
                step_down(self.hi * self.hi, 1).max(0.0),
                step_up(self.lo * self.lo, 1),
            )
        } else {
            let m = self.mag();
            Interval::new(0.0, step_up(m * m, 1))
        }
    }

    pub fn abs(&self) -> Interval {
        if self.lo >= 0.0 {
            *self
        } else if self.hi <= 0.0 {
            self.neg()
        } else {
            Interval::new(0.0, self.mag())
        }
    }

    pub fn hull(&self, rhs: &Interval) -> Interval {
        Interval::new(self.lo.min(rhs.lo), self.hi.max(rhs.hi))
    }

    pub fn intersect(&self, rhs: &Interval) -> Result<Interval, IntervalError> {
        let lo = self.lo.max(rhs.lo);
        let hi = self.hi.min(rhs.hi);
        if lo > hi {
            return Err(IntervalError::EmptyIntersection);
        }
        Ok(Interval::new(lo, hi))
    }

    pub fn sqrt(&self) -> Result<Interval, IntervalError> {
        if self.lo < 0.0 {
            return Err(IntervalError::NegativeDomain);
        }
        // IEEE sqrt is correctly rounded; one step out suffices.
        Ok(Interval::new(
            step_down(self.lo.sqrt(), 1).max(0.0),
            step_up(self.hi.sqrt(), 1),
        ))
    }

    /// Nonnegative integer power via binary powering on intervals.
    pub fn pow_int(&self, n: u32) -> Interval {
        match n {
            0 => Interval::point(1.0),
            1 => *self,
            _ => {
                if n % 2 == 1 || self.lo >= 0.0 {
                    // monotone increasing on the whole line (odd n) or on [0, inf)
                    Interval::new(pow_point(self.lo, n).lo, pow_point(self.hi, n).hi)
                } else if self.hi <= 0.0 {
                    // even power, decreasing on (-inf, 0]
                    Interval::new(pow_point(self.hi, n).lo, pow_point(self.lo, n).hi)
                } else {
                    let m = pow_point(self.lo, n).hi.max(pow_point(self.hi, n).hi);
                    Interval::new(0.0, m)
                }
            }
        }
    }

    pub fn exp(&self) -> Interval {
        Interval::new(
            step_down(self.lo.exp(), 2).max(0.0),
            step_up(self.hi.exp(), 2),
        )
    }

    pub fn sin(&self) -> Interval {
        if self.width() >= TRIG_FULL_WIDTH {
            return Interval::new(-1.0, 1.0);
        }
        let s0 = self.lo.sin();
        let s1 = self.hi.sin();
        let mut lo = step_down(s0.min(s1), 2);
        let mut hi = step_up(s0.max(s1), 2);
        // Critical points of sin at (k + 1/2)*pi: maxima for even k, minima
        // for odd k. Any candidate whose enclosure may touch the interval is
        // treated as interior; over-flagging only widens the result.
        let pi = const_pi();
        let k_first = ((self.lo / std::f64::consts::PI) - 0.5).floor() as i64 - 1;
        let k_last = ((self.hi / std::f64::consts::PI) - 0.5).ceil() as i64 + 1;
        for k in k_first..=k_last {
            let c = pi.mul(&Interval::point(k as f64 + 0.5));
            if c.lo <= self.hi && c.hi >= self.lo {
                if k % 2 == 0 {
                    hi = 1.0;
                } else {
                    lo = -1.0;
                }
            }
        }
        Interval::new(lo.max(-1.0), hi.min(1.0))
    }

    pub fn cos(&self) -> Interval {
        if self.width() >= TRIG_FULL_WIDTH {
            return Interval::new(-1.0, 1.0);
        }
        let c0 = self.lo.cos();
        let c1 = self.hi.cos();
        let mut lo = step_down(c0.min(c1), 2);
        let mut hi = step_up(c0.max(c1), 2);
        // Critical points of cos at k*pi: maxima for even k, minima for odd k.
        let pi = const_pi();
        let k_first = (self.lo / std::f64::consts::PI).floor() as i64 - 1;
        let k_last = (self.hi / std::f64::consts::PI).ceil() as i64 + 1;
        for k in k_first..=k_last {
            let c = pi.mul(&Interval::point(k as f64));
            if c.lo <= self.hi && c.hi >= self.lo {
                if k % 2 == 0 {
                    hi = 1.0;
                } else {
                    lo = -1.0;
                }
            }
        }
        Interval::new(lo.max(-1.0), hi.min(1.0))
    }
}

/// Any interval at least this wide covers a full trig period.
const TRIG_FULL_WIDTH: f64 = 7.0;

/// Rigorous enclosure of `x^n` for a single point, by repeated squaring
/// on degenerate intervals.
fn pow_point(x: f64, n: u32) -> Interval {
    let mut acc = Interval::point(1.0);
    let mut base = Interval::point(x);
    let mut k = n;
    while k > 0 {
        if k & 1 == 1 {
            acc = acc.mul(&base);
        }
        k >>= 1;
        if k > 0 {
            base = base.sqr();
        }
    }
    acc
}

/// Enclosure of pi, two ulps wide.
pub fn const_pi() -> Interval {
    let p = std::f64::consts::PI;
    Interval::new(p.next_down(), p.next_up())
}

/// Enclosure of the embedding constant `(tanh 1)^(-1/2) = sqrt((e^2+1)/(e^2-1))`.
///
/// The midpoint 1.1458775176690270 is the nearest double to the constant
/// (value 1.14587751766902700831...), so stepping one ulp out on each side
/// encloses it. [`const_c1_from_formula`] recomputes the defining expression
/// in interval arithmetic as a consistency check.
pub fn const_c1() -> Interval {
    let c = 1.145_877_517_669_027_f64;
    Interval::new(c.next_down(), c.next_up())
}

/// The defining formula of `c1`, evaluated in interval arithmetic. Wider
/// than [`const_c1`] but derived with no precomputed digits.
pub fn const_c1_from_formula() -> Interval {
    let e2 = Interval::point(2.0).exp();
    let one = Interval::point(1.0);
    let quot = e2.add(&one).div(&e2.sub(&one)).expect("e^2 - 1 is positive");
    quot.sqrt().expect("quotient is positive")
}

impl std::ops::Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        Interval::add(&self, &rhs)
    }
}

impl std::ops::Sub for Interval {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        Interval::sub(&self, &rhs)
    }
}

impl std::ops::Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        Interval::mul(&self, &rhs)
    }
}

impl std::ops::Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval::neg(&self)
    }
}

/// Prints `[lo, hi]` with the lower endpoint rounded toward -inf and the
/// upper toward +inf, 17 significant digits each.
impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}]",
            format_directed(self.lo, RoundDir::Down),
            format_directed(self.hi, RoundDir::Up)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoundDir {
    Down,
    Up,
}

const SIG_DIGITS: usize = 17;

/// Formats `x` as `d.dddddddddddddddde<exp>` with 17 significant digits,
/// rounded in the requested direction. The decimal expansion of a double is
/// finite, so directed rounding is decided from the exact digits.
pub fn format_directed(x: f64, dir: RoundDir) -> String {
    assert!(x.is_finite());
    if x == 0.0 {
        return format!("0.{}e0", "0".repeat(SIG_DIGITS - 1));
    }
    let neg = x < 0.0;
    // 1074 fractional digits cover the exact expansion of every double.
    let s = format!("{:.1074}", x.abs());
    let dot = s.find('.').expect("fixed-point format");
    let digits: Vec<u8> = s.bytes().filter(|&b| b != b'.').map(|b| b - b'0').collect();
    let first_nz = digits.iter().position(|&d| d != 0).expect("nonzero value");
    let mut e10 = dot as i64 - 1 - first_nz as i64;
    let mut kept: Vec<u8> = digits[first_nz..].iter().copied().take(SIG_DIGITS).collect();
    while kept.len() < SIG_DIGITS {
        kept.push(0);
    }
    let leftover = digits[first_nz..].iter().skip(SIG_DIGITS).any(|&d| d != 0);
    // Truncation shrinks the magnitude; bump the last digit whenever the
    // requested direction needs the magnitude to grow instead.
    let grow = match dir {
        RoundDir::Up => !neg,
        RoundDir::Down => neg,
    };
    if leftover && grow {
        let mut i = SIG_DIGITS;
        loop {
            if i == 0 {
                kept.insert(0, 1);
                kept.pop();
                e10 += 1;
                break;
            }
            i -= 1;
            if kept[i] == 9 {
                kept[i] = 0;
            } else {
                kept[i] += 1;
                break;
            }
        }
    }
    let mut out = String::with_capacity(SIG_DIGITS + 8);
    if neg {
        out.push('-');
    }
    out.push((b'0' + kept[0]) as char);
    out.push('.');
    for &d in &kept[1..] {
        out.push((b'0' + d) as char);
    }
    out.push('e');
    out.push_str(&e10.to_string());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ulp(x: f64) -> f64 {
        x.abs().next_up() - x.abs()
    }

    #[test]
    fn add_contains_and_stays_tight() {
        let r = Interval::new(1.0, 2.0).add(&Interval::new(3.0, 4.0));
        assert!(r.lo <= 4.0 && r.hi >= 6.0);
        assert!(r.width() <= 2.0 + 4.0 * ulp(6.0));
    }

    #[test]
    fn mul_sign_cases() {
        let r = Interval::new(-1.0, 2.0).mul(&Interval::new(3.0, 4.0));
        assert!(r.lo <= -4.0 && r.hi >= 8.0);
        let r = Interval::new(-3.0, -2.0).mul(&Interval::new(-5.0, 7.0));
        assert!(r.lo <= -21.0 && r.hi >= 15.0);
    }

    #[test]
    fn sqr_is_even() {
        let r = Interval::new(-2.0, 1.0).sqr();
        assert!(r.hi >= 4.0);
        assert!(r.lo >= 0.0 && r.contains(0.0));
    }

    #[test]
    fn div_cases() {
        let r = Interval::point(1.0).div(&Interval::point(2.0)).unwrap();
        assert!(r.contains(0.5));
        assert_eq!(
            Interval::new(1.0, 2.0).div(&Interval::new(-1.0, 1.0)),
            Err(IntervalError::DivisionByZero)
        );
        let r = Interval::new(1.0, 2.0).div(&Interval::new(4.0, 8.0)).unwrap();
        assert!(r.lo <= 0.125 && r.hi >= 0.5);
        assert!(r.width() <= 0.375 + 4.0 * ulp(0.5));
    }

    #[test]
    fn sqrt_cases() {
        let r = Interval::new(4.0, 9.0).sqrt().unwrap();
        assert!(r.lo <= 2.0 && r.hi >= 3.0);
        let r = Interval::point(0.0).sqrt().unwrap();
        assert!(r.contains(0.0));
        let r = Interval::point(2.0).sqrt().unwrap();
        // sqrt(2) = 1.41421356237309504880...
        #[allow(clippy::approx_constant, clippy::excessive_precision)]
        let sqrt2_nearest = 1.414_213_562_373_095_1_f64;
        assert!(r.contains(sqrt2_nearest));
        assert!(r.width() <= 4.0 * ulp(1.5));
        assert_eq!(
            Interval::new(-1.0, 1.0).sqrt(),
            Err(IntervalError::NegativeDomain)
        );
    }

    #[test]
    fn pow_int_cases() {
        let r = Interval::new(-2.0, 1.0).pow_int(2);
        assert!(r.lo <= 0.0 && r.hi >= 4.0);
        let r = Interval::new(-2.0, 1.0).pow_int(3);
        assert!(r.lo <= -8.0 && r.hi >= 1.0);
        let r = Interval::new(-3.0, -2.0).pow_int(4);
        assert!(r.lo <= 16.0 && r.hi >= 81.0);
        assert_eq!(Interval::new(-5.0, 5.0).pow_int(0), Interval::point(1.0));
    }

    #[test]
    fn trig_cases() {
        let pi = const_pi();
        let r = Interval::new(0.0, pi.hi()).cos();
        assert!(r.lo <= -1.0 && r.hi >= 1.0);
        let r = Interval::point(0.0).sin();
        assert!(r.contains(0.0));
        // sin on [0.1, 0.2]: monotone, no critical point
        let r = Interval::new(0.1, 0.2).sin();
        let exact_lo = 0.099_833_416_646_828_15;
        let exact_hi = 0.198_669_330_795_061_22;
        assert!(r.contains(exact_lo) && r.contains(exact_hi));
        assert!(r.width() <= (exact_hi - exact_lo) + 8.0 * ulp(0.2));
        // full period collapses to [-1, 1]
        let r = Interval::new(0.0, 10.0).sin();
        assert_eq!((r.lo, r.hi), (-1.0, 1.0));
    }

    #[test]
    fn exp_monotone() {
        let r = Interval::new(0.0, 1.0).exp();
        assert!(r.lo <= 1.0 && r.hi >= std::f64::consts::E);
        let r = Interval::point(-800.0).exp();
        assert!(r.lo >= 0.0 && r.contains(0.0));
    }

    #[test]
    fn constants() {
        let pi = const_pi();
        assert!(pi.contains(std::f64::consts::PI));
        // true pi lies strictly above the nearest double
        assert!(pi.hi() > std::f64::consts::PI);
        assert!(pi.width() <= 4.0 * ulp(3.2));

        let c1 = const_c1();
        assert!(c1.contains(1.145_877_517_669_027));
        assert!(c1.lo() > 1.0);
        assert!(c1.width() <= 4.0 * ulp(1.15));
        // consistency with the defining formula
        let f = const_c1_from_formula();
        assert!(c1.lo() <= f.hi() && f.lo() <= c1.hi());
    }

    #[test]
    fn hull_intersect() {
        let a = Interval::new(0.0, 2.0);
        let b = Interval::new(1.0, 3.0);
        assert_eq!(a.hull(&b), Interval::new(0.0, 3.0));
        assert_eq!(a.intersect(&b).unwrap(), Interval::new(1.0, 2.0));
        assert_eq!(
            Interval::new(0.0, 1.0).intersect(&Interval::new(2.0, 3.0)),
            Err(IntervalError::EmptyIntersection)
        );
    }

    #[test]
    fn point_width_control() {
        // arithmetic on degenerate intervals stays within 8 ulps
        let a = Interval::point(1.7);
        let b = Interval::point(-2.3);
        for r in [a.add(&b), a.sub(&b), a.mul(&b), a.div(&b).unwrap(), a.sqr()] {
            assert!(r.width() <= 8.0 * ulp(r.mid().abs().max(1.0)), "{r:?}");
        }
    }

    #[test]
    fn directed_format_of_tenth() {
        // 0.1 in binary is 0.1000000000000000055511151231257827021181583404541015625
        let x = 0.1f64;
        assert_eq!(format_directed(x, RoundDir::Down), "1.0000000000000000e-1");
        assert_eq!(format_directed(x, RoundDir::Up), "1.0000000000000001e-1");
        assert_eq!(format_directed(-x, RoundDir::Down), "-1.0000000000000001e-1");
        assert_eq!(format_directed(-x, RoundDir::Up), "-1.0000000000000000e-1");
        assert_eq!(format_directed(0.0, RoundDir::Up), "0.0000000000000000e0");
        assert_eq!(format_directed(0.5, RoundDir::Up), "5.0000000000000000e-1");
        assert_eq!(format_directed(0.5, RoundDir::Down), "5.0000000000000000e-1");
    }

    #[test]
    fn directed_format_carry() {
        // 2^-1074: exact expansion starts 4.9406564584124654...e-324
        let x = f64::MIN_POSITIVE * f64::EPSILON;
        assert_eq!(format_directed(x, RoundDir::Down), "4.9406564584124654e-324");
        assert_eq!(format_directed(x, RoundDir::Up), "4.9406564584124655e-324");
        let y = 1.0f64.next_down(); // 0.99999999999999988897769753748...
        assert_eq!(format_directed(y, RoundDir::Down), "9.9999999999999988e-1");
        assert_eq!(format_directed(y, RoundDir::Up), "9.9999999999999989e-1");
    }

    #[test]
    fn display_interval() {
        let iv = Interval::new(-0.1, 0.1);
        assert_eq!(
            iv.to_string(),
            "[-1.0000000000000001e-1, 1.0000000000000001e-1]"
        );
    }

    // small deterministic xorshift for the quick in-module containment check
    fn rng_next(state: &mut u64) -> f64 {
        *state ^= *state << 13;
        *state ^= *state >> 7;
        *state ^= *state << 17;
        (*state >> 11) as f64 / (1u64 << 53) as f64
    }

    #[test]
    fn containment_spot_check() {
        let mut st = 0x9e3779b97f4a7c15u64;
        for _ in 0..1000 {
            let a = rng_next(&mut st) * 8.0 - 4.0;
            let b = a + rng_next(&mut st) * 3.0;
            let c = rng_next(&mut st) * 8.0 - 4.0;
            let d = c + rng_next(&mut st) * 3.0;
            let x = a + rng_next(&mut st) * (b - a);
            let y = c + rng_next(&mut st) * (d - c);
            let ia = Interval::new(a, b);
            let ic = Interval::new(c, d);
            assert!(ia.add(&ic).contains(x + y));
            assert!(ia.sub(&ic).contains(x - y));
            assert!(ia.mul(&ic).contains(x * y));
            assert!(ia.sqr().contains(x * x));
            assert!(ia.sin().contains(x.sin()));
            assert!(ia.cos().contains(x.cos()));
            assert!(ia.exp().contains(x.exp()));
            assert!(ia.pow_int(3).contains(x * x * x));
            assert!(ia.abs().contains(x.abs()));
        }
    }
}
