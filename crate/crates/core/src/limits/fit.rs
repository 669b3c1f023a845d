//! Least-squares rate fits of error sequences.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateModel {
    /// `e ≈ C s^{−p}`.
    Power,
    /// `e ≈ C e^{−g s}`.
    Exponential,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateFit {
    pub s: Vec<f64>,
    pub errors: Vec<f64>,
    pub model: RateModel,
    /// `p` for the power law, `g` for the exponential law.
    pub rate: f64,
    pub prefactor: f64,
    /// Root-mean-square residual of `log e` about the fit.
    pub residual: f64,
}

fn line_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let icept = my - slope * mx;
    let res = (xs.iter().zip(ys).map(|(x, y)| (y - icept - slope * x).powi(2)).sum::<f64>() / n).sqrt();
    (slope, icept, res)
}

fn usable(s: &[f64], e: &[f64]) -> (Vec<f64>, Vec<f64>) {
    s.iter().zip(e).filter(|(si, ei)| **si > 0.0 && **ei > 0.0 && ei.is_finite()).map(|(a, b)| (*a, *b)).unzip()
}

/// Fits `log e` against `log s` (power) or `s` (exponential).
pub fn fit(s: &[f64], errors: &[f64], model: RateModel) -> RateFit {
    let (ss, ee) = usable(s, errors);
    let ly: Vec<f64> = ee.iter().map(|e| e.ln()).collect();
    let (rate, prefactor, residual) = if ss.len() < 2 {
        (f64::NAN, f64::NAN, f64::NAN)
    } else {
        match model {
            RateModel::Power => {
                let lx: Vec<f64> = ss.iter().map(|x| x.ln()).collect();
                let (sl, ic, r) = line_fit(&lx, &ly);
                (-sl, ic.exp(), r)
            }
            RateModel::Exponential => {
                let (sl, ic, r) = line_fit(&ss, &ly);
                (-sl, ic.exp(), r)
            }
        }
    };
    RateFit { s: s.to_vec(), errors: errors.to_vec(), model, rate, prefactor, residual }
}

/// Both fits, the one with the smaller residual first.
pub fn fit_best(s: &[f64], errors: &[f64]) -> (RateFit, RateFit) {
    let p = fit(s, errors, RateModel::Power);
    let e = fit(s, errors, RateModel::Exponential);
    if e.residual < p.residual {
        (e, p)
    } else {
        (p, e)
    }
}

/// Whether `errors` decrease from index `burn_in` on, allowing each step to
/// rise by at most the relative `noise`.
pub fn decreasing_after(errors: &[f64], burn_in: usize, noise: f64) -> bool {
    errors[burn_in.min(errors.len())..].windows(2).all(|w| w[1] <= w[0] * (1.0 + noise))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_laws() {
        let s: Vec<f64> = (5..13).map(|k| 2f64.powi(k)).collect();
        let pw: Vec<f64> = s.iter().map(|x| 3.0 / x).collect();
        let (best, _) = fit_best(&s, &pw);
        assert_eq!(best.model, RateModel::Power);
        assert!((best.rate - 1.0).abs() < 1e-12);
        assert!((best.prefactor - 3.0).abs() < 1e-10);
        let s: Vec<f64> = (1..9).map(|k| k as f64).collect();
        let ex: Vec<f64> = s.iter().map(|x| (-0.7 * x).exp()).collect();
        let (best, _) = fit_best(&s, &ex);
        assert_eq!(best.model, RateModel::Exponential);
        assert!((best.rate - 0.7).abs() < 1e-12);
        assert!(decreasing_after(&[1.0, 2.0, 1.0, 0.5], 1, 0.0));
        assert!(!decreasing_after(&[1.0, 0.5, 0.6], 0, 0.05));
    }
}
