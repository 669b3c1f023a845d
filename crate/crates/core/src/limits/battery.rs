//! Fixed batteries of smooth test functions used as a finite proxy for
//! distributional convergence.

use crate::quadrature::{integrate, Region, Tolerance};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub enum TestFunction {
    Constant,
    Coordinate(usize),
    Product(usize, usize),
    /// `cos(π x_i / period)`.
    Wave { axis: usize, period: f64 },
    /// `exp(1 − 1/(1 − |x − c|²/r²))` inside the ball, zero outside.
    Bump { center: Vec<f64>, radius: f64 },
}

impl TestFunction {
    pub fn eval<T: Real>(&self, x: &[T]) -> T {
        match self {
            TestFunction::Constant => T::one(),
            TestFunction::Coordinate(i) => x[*i],
            TestFunction::Product(i, j) => x[*i] * x[*j],
            TestFunction::Wave { axis, period } => (T::PI() * x[*axis] / T::lit(*period)).cos(),
            TestFunction::Bump { center, radius } => {
                let r2 = x.iter().zip(center).fold(T::zero(), |a, (&xi, &ci)| {
                    let d = (xi - T::lit(ci)) / T::lit(*radius);
                    a + d * d
                });
                if r2 >= T::one() {
                    T::zero()
                } else {
                    (T::one() - T::one() / (T::one() - r2)).exp()
                }
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            TestFunction::Constant => "1".into(),
            TestFunction::Coordinate(i) => format!("x{}", i + 1),
            TestFunction::Product(i, j) => format!("x{}*x{}", i + 1, j + 1),
            TestFunction::Wave { axis, period } => format!("cos(pi*x{}/{period})", axis + 1),
            TestFunction::Bump { center, radius } => format!("bump({center:?},{radius})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestBattery {
    pub members: Vec<TestFunction>,
}

impl TestBattery {
    /// `1`, every `x_i`, every `x_i x_j`, `cos(π x_i / diam)` and a compact
    /// bump of radius `diam/2` around `center`.
    pub fn standard(center: &[f64], diam: f64) -> Self {
        let n = center.len();
        let mut members = vec![TestFunction::Constant];
        members.extend((0..n).map(TestFunction::Coordinate));
        for i in 0..n {
            for j in i..n {
                members.push(TestFunction::Product(i, j));
            }
        }
        members.extend((0..n).map(|axis| TestFunction::Wave { axis, period: diam }));
        members.push(TestFunction::Bump { center: center.to_vec(), radius: 0.5 * diam });
        Self { members }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn eval<T: Real>(&self, x: &[T]) -> Vec<T> {
        self.members.iter().map(|f| f.eval(x)).collect()
    }

    pub fn names(&self) -> Vec<String> {
        self.members.iter().map(|f| f.name()).collect()
    }

    /// Means over `region` weighted by `e^{w(x)}`, by adaptive quadrature.
    pub fn weighted_means<T: Real>(
        &self,
        region: &Region<T>,
        cuts: &[(Vec<T>, T)],
        log_weight: impl Fn(&[T]) -> T,
        tol: &Tolerance<T>,
    ) -> Vec<T> {
        let k = self.len();
        let r = integrate(
            region,
            cuts,
            |x| {
                let w = log_weight(x).exp();
                let mut v = self.eval(x);
                for t in v.iter_mut() {
                    *t *= w;
                }
                v.push(w);
                v
            },
            k + 1,
            tol,
        );
        let z = r.value[k];
        r.value[..k].iter().map(|&v| v / z).collect()
    }

    pub fn means<T: Real>(&self, region: &Region<T>, tol: &Tolerance<T>) -> Vec<T> {
        self.weighted_means(region, &[], |_| T::zero(), tol)
    }
}
