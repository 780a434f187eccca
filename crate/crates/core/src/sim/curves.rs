//! Closed-form curves that sandwich the transcendental construction's `U`.

use crate::scalar::Scalar;

fn e<T: Scalar>() -> T {
    T::E()
}

fn c<T: Scalar>() -> T {
    T::SQRT_2() - T::one()
}

/// `f(t) = e^{-t} + e^{1-e^{-t}} - 1`.
pub fn f<T: Scalar>(t: T) -> T {
    (-t).exp() + (T::one() - (-t).exp()).exp() - T::one()
}

/// Upper root `(f + sqrt(f^2 + 4)) / 2`.
pub fn r1<T: Scalar>(t: T) -> T {
    let f = f(t);
    (f + (f * f + T::lit(4.0)).sqrt()) / T::lit(2.0)
}

/// Lower root `(f - sqrt(f^2 + 4)) / 2`.
pub fn r2<T: Scalar>(t: T) -> T {
    let f = f(t);
    (f - (f * f + T::lit(4.0)).sqrt()) / T::lit(2.0)
}

/// `L = (e - 1 + sqrt((e-1)^2 + 4)) / 2`.
pub fn limit<T: Scalar>() -> T {
    let em1 = e::<T>() - T::one();
    (em1 + (em1 * em1 + T::lit(4.0)).sqrt()) / T::lit(2.0)
}

/// `L (1 - e^{-t})`.
pub fn r_hat<T: Scalar>(t: T) -> T {
    limit::<T>() * (T::one() - (-t).exp())
}

/// Solution of `u' = -(u - r_hat)(sqrt 2 - 1)`, `u(0) = 0`.
pub fn u_hat<T: Scalar>(t: T) -> T {
    let c = c::<T>();
    limit::<T>() * (T::one() - ((-c * t).exp() - c * (-t).exp()) / (T::one() - c))
}

/// `u - v` along the solution: `e^{1-e^{-t}} - 1`.
pub fn y<T: Scalar>(t: T) -> T {
    (T::one() - (-t).exp()).exp() - T::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_at_zero() {
        assert_eq!(f(0.0f64), 1.0);
        assert!((r1(0.0f64) - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-15);
        assert!(u_hat(0.0f64).abs() < 1e-15);
        assert_eq!(y(0.0f64), 0.0);
    }

    #[test]
    fn limit_value() {
        assert!((limit::<f64>() - 2.1775199).abs() < 1e-7);
        assert!((r1(60.0f64) - limit::<f64>()).abs() < 1e-12);
        assert!((u_hat(120.0f64) - limit::<f64>()).abs() < 1e-12);
    }

    #[test]
    fn u_hat_solves_its_ode() {
        let h = 1e-5;
        for k in 0..50 {
            let t = 0.3 * k as f64 + 0.1;
            let d = (u_hat(t + h) - u_hat(t - h)) / (2.0 * h);
            let rhs = -(u_hat(t) - r_hat(t)) * (2f64.sqrt() - 1.0);
            assert!((d - rhs).abs() < 1e-8, "t={t}");
        }
    }

    #[test]
    fn sandwich_of_bounds() {
        for k in 0..500 {
            let t = 0.1 * k as f64;
            assert!(u_hat(t) <= r1(t) + 1e-12);
            assert!(r_hat(t) <= r1(t) + 1e-12);
            assert!(-r2(t) > 2f64.sqrt() - 1.0);
        }
    }
}
