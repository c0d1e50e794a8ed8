//! Dormand–Prince 5(4) stepper with proportional step control and the
//! fourth-order continuous extension of Hairer, Nørsett & Wanner.
//!
//! Specialised to the two-dimensional phase plane `y = [x, p]`.

use crate::error::{Error, Result};

pub type State = [f64; 2];

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// 5th minus embedded 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    /// Steps below this abort the integration.
    pub min_step: f64,
}

/// Interpolant over one accepted step.
#[derive(Debug, Clone, Copy)]
pub struct DenseSegment {
    pub t0: f64,
    pub h: f64,
    pub y0: State,
    pub y1: State,
    rcont: [State; 5],
}

impl DenseSegment {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    /// Interpolated state at `t` within `[t0, t0 + h]`.
    pub fn eval(&self, t: f64) -> State {
        if t == self.t1() {
            return self.y1;
        }
        let theta = (t - self.t0) / self.h;
        let theta1 = 1.0 - theta;
        let r = &self.rcont;
        std::array::from_fn(|i| {
            r[0][i] + theta * (r[1][i] + theta1 * (r[2][i] + theta * (r[3][i] + theta1 * r[4][i])))
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub evaluations: u64,
    pub accepted: u64,
    pub rejected: u64,
}

pub struct DormandPrince<F> {
    rhs: F,
    control: StepControl,
    t: f64,
    y: State,
    k1: State,
    h: f64,
    pub stats: Stats,
}

fn axpy(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    std::array::from_fn(|i| y[i] + h * terms.iter().map(|(c, k)| c * k[i]).sum::<f64>())
}

impl<F> DormandPrince<F>
where
    F: FnMut(f64, &State) -> Result<State>,
{
    pub fn new(mut rhs: F, t0: f64, y0: State, control: StepControl) -> Result<Self> {
        let k1 = rhs(t0, &y0)?;
        let mut solver = Self {
            rhs,
            control,
            t: t0,
            y: y0,
            k1,
            h: 0.0,
            stats: Stats {
                evaluations: 1,
                ..Stats::default()
            },
        };
        solver.h = solver.initial_step()?;
        Ok(solver)
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> State {
        self.y
    }

    fn weighted_rms(&self, v: &State, scale_from: &State) -> f64 {
        let StepControl { rtol, atol, .. } = self.control;
        let sum: f64 = v
            .iter()
            .zip(scale_from)
            .map(|(vi, yi)| {
                let r = vi / (atol + rtol * yi.abs());
                r * r
            })
            .sum();
        (sum / v.len() as f64).sqrt()
    }

    fn initial_step(&mut self) -> Result<f64> {
        let d0 = self.weighted_rms(&self.y, &self.y);
        let d1 = self.weighted_rms(&self.k1, &self.y);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        let h0 = h0.min(self.control.max_step);
        let y1 = axpy(&self.y, h0, &[(1.0, &self.k1)]);
        let f1 = (self.rhs)(self.t + h0, &y1)?;
        self.stats.evaluations += 1;
        let diff: State = std::array::from_fn(|i| f1[i] - self.k1[i]);
        let d2 = self.weighted_rms(&diff, &self.y) / h0;
        let dm = d1.max(d2);
        let h1 = if dm <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / dm).powf(0.2)
        };
        Ok((100.0 * h0).min(h1).min(self.control.max_step))
    }

    /// Takes one accepted step, never passing `t_end`.
    pub fn step(&mut self, t_end: f64) -> Result<DenseSegment> {
        let mut h = self.h.min(self.control.max_step);
        let mut last_reject = false;
        loop {
            let remaining = t_end - self.t;
            let clipped = h >= remaining;
            if clipped {
                h = remaining;
            }
            if h < self.control.min_step && !clipped {
                return Err(Error::Stiffness {
                    t: self.t,
                    x: self.y[0],
                    p: self.y[1],
                    step: h,
                });
            }
            let trial = match self.attempt(h) {
                Ok(trial) => trial,
                // a trial stage left the admissible region; shrink and retry
                Err(e) if e.is_numerical() && h / 4.0 >= self.control.min_step => {
                    self.stats.rejected += 1;
                    h /= 4.0;
                    last_reject = true;
                    continue;
                }
                Err(e) => return Err(e),
            };
            let (y1, k7, err, k) = trial;
            if err <= 1.0 {
                let mut fac = if err == 0.0 {
                    FAC_MAX
                } else {
                    (SAFETY * err.powf(-0.2)).clamp(FAC_MIN, FAC_MAX)
                };
                if last_reject {
                    fac = fac.min(1.0);
                }
                let segment = self.dense(h, &y1, &k, &k7);
                self.t = if clipped { t_end } else { self.t + h };
                self.y = y1;
                self.k1 = k7;
                if !clipped {
                    self.h = h * fac;
                }
                self.stats.accepted += 1;
                return Ok(segment);
            }
            self.stats.rejected += 1;
            last_reject = true;
            h *= (SAFETY * err.powf(-0.2)).max(FAC_MIN);
        }
    }

    #[allow(clippy::type_complexity)]
    fn attempt(&mut self, h: f64) -> Result<(State, State, f64, [State; 6])> {
        let (t, y, k1) = (self.t, self.y, self.k1);
        let f = &mut self.rhs;
        let k2 = f(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]))?;
        let k3 = f(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]))?;
        let k4 = f(
            t + C4 * h,
            &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
        )?;
        let k5 = f(
            t + C5 * h,
            &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        )?;
        let k6 = f(
            t + h,
            &axpy(
                &y,
                h,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ),
        )?;
        let y1 = axpy(
            &y,
            h,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        let k7 = f(t + h, &y1)?;
        self.stats.evaluations += 6;

        let e = axpy(
            &[0.0; 2],
            h,
            &[
                (E1, &k1),
                (E3, &k3),
                (E4, &k4),
                (E5, &k5),
                (E6, &k6),
                (E7, &k7),
            ],
        );
        let scale: State = std::array::from_fn(|i| y[i].abs().max(y1[i].abs()));
        let err = self.weighted_rms(&e, &scale);
        let err = if err.is_finite() { err } else { f64::INFINITY };
        Ok((y1, k7, err, [k1, k2, k3, k4, k5, k6]))
    }

    fn dense(&self, h: f64, y1: &State, k: &[State; 6], k7: &State) -> DenseSegment {
        let y0 = self.y;
        let [k1, _, k3, k4, k5, k6] = k;
        let r1: State = std::array::from_fn(|i| y1[i] - y0[i]);
        let r2: State = std::array::from_fn(|i| h * k1[i] - r1[i]);
        let r3: State = std::array::from_fn(|i| r1[i] - h * k7[i] - r2[i]);
        let r4: State = std::array::from_fn(|i| {
            h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i])
        });
        DenseSegment {
            t0: self.t,
            h,
            y0,
            y1: *y1,
            rcont: [y0, r1, r2, r3, r4],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn control(tol: f64) -> StepControl {
        StepControl {
            rtol: tol,
            atol: tol,
            max_step: 1.0,
            min_step: 1e-12,
        }
    }

    fn oscillator(_t: f64, y: &State) -> Result<State> {
        Ok([y[1], -y[0]])
    }

    #[test]
    fn harmonic_oscillator_accuracy() {
        let mut s = DormandPrince::new(oscillator, 0.0, [1.0, 0.0], control(1e-10)).unwrap();
        let t_end = 10.0;
        let mut max_dense_err: f64 = 0.0;
        while s.t() < t_end {
            let seg = s.step(t_end).unwrap();
            for j in 0..=10 {
                let t = seg.t0 + seg.h * f64::from(j) / 10.0;
                let y = seg.eval(t);
                max_dense_err = max_dense_err
                    .max((y[0] - t.cos()).abs())
                    .max((y[1] + t.sin()).abs());
            }
        }
        assert_eq!(s.t(), t_end);
        let y = s.y();
        assert!((y[0] - t_end.cos()).abs() < 1e-8);
        assert!((y[1] + t_end.sin()).abs() < 1e-8);
        assert!(max_dense_err < 1e-8, "{max_dense_err}");
    }

    #[test]
    fn dense_output_is_fourth_order() {
        // single step of fixed size; interpolation error shrinks like h^5
        let err_for = |h: f64| {
            let c = StepControl {
                rtol: 1.0,
                atol: 1.0,
                max_step: h,
                min_step: 1e-12,
            };
            let mut s = DormandPrince::new(oscillator, 0.0, [1.0, 0.0], c).unwrap();
            s.h = h;
            let seg = s.step(h).unwrap();
            let t = 0.5 * h;
            (seg.eval(t)[0] - t.cos()).abs()
        };
        let ratio = err_for(0.2) / err_for(0.1);
        assert!(ratio > 20.0, "ratio {ratio}");
    }

    #[test]
    fn linear_motion_is_exact() {
        let rhs = |_t: f64, y: &State| Ok([y[1], 0.0]);
        let mut s = DormandPrince::new(rhs, 0.0, [2.5, -1.0], control(1e-10)).unwrap();
        while s.t() < 7.0 {
            let seg = s.step(7.0).unwrap();
            let mid = seg.t0 + 0.37 * seg.h;
            assert!((seg.eval(mid)[0] - (2.5 - mid)).abs() < 1e-13);
        }
        assert!((s.y()[0] + 4.5).abs() < 1e-13);
    }

    #[test]
    fn blow_up_reports_stiffness() {
        let rhs = |t: f64, _y: &State| Ok([1.0 / (1.0 - t).powi(2), 0.0]);
        let mut s = DormandPrince::new(rhs, 0.0, [1.0, 0.0], control(1e-10)).unwrap();
        let err = loop {
            match s.step(2.0) {
                Ok(_) => continue,
                Err(e) => break e,
            }
        };
        assert!(matches!(err, Error::Stiffness { .. }));
    }
}
