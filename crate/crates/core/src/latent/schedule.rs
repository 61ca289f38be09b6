//! Nesterov step schedule: `a_0 = 1`, `a_r = (1 + sqrt(4 a_{r-1}^2 + 1)) / 2`,
//! and the step coefficient `alpha_r = (a_{r+1} + a_r - 1) / (a_{r+1} L)`.

/// Memoized `a_r` sequence paired with a Lipschitz constant.
#[derive(Clone, Debug, PartialEq)]
pub struct StepSchedule {
    a: Vec<f64>,
    lipschitz: f64,
}

impl StepSchedule {
    pub fn new(lipschitz: f64) -> Self {
        assert!(lipschitz > 0.0, "Lipschitz constant must be positive");
        StepSchedule {
            a: vec![1.0],
            lipschitz,
        }
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn a(&mut self, r: usize) -> f64 {
        while self.a.len() <= r {
            let prev = *self.a.last().unwrap();
            self.a.push(next_a(prev));
        }
        self.a[r]
    }

    /// Step coefficient used at iteration `r`.
    pub fn alpha(&mut self, r: usize) -> f64 {
        let next = self.a(r + 1);
        let cur = self.a[r];
        (next + cur - 1.0) / (next * self.lipschitz)
    }
}

#[inline]
fn next_a(prev: f64) -> f64 {
    (1.0 + (4.0 * prev * prev + 1.0).sqrt()) / 2.0
}

/// `a_r` evaluated from scratch.
pub fn nesterov_a(r: usize) -> f64 {
    (0..r).fold(1.0, |a, _| next_a(a))
}

/// `alpha = (a_{r+1} + a_r - 1) / (a_{r+1} L)`.
pub fn step_coefficient(r: usize, lipschitz: f64) -> f64 {
    let cur = nesterov_a(r);
    let next = next_a(cur);
    (next + cur - 1.0) / (next * lipschitz)
}
