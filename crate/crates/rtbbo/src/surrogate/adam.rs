//! Adam optimizer state for one parameter tensor.

/// First/second moment accumulators plus the shared step counter.
///
/// Moments start at zero and the counter increments once per [`apply`]
/// call (one gradient application to the whole tensor), before the bias
/// correction is computed.
///
/// [`apply`]: AdamState::apply
#[derive(Clone, Debug)]
pub struct AdamState {
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl AdamState {
    pub fn new(len: usize) -> Self {
        AdamState {
            m: vec![0.0; len],
            v: vec![0.0; len],
            t: 0,
        }
    }

    /// Zero the moments and the step counter.
    pub fn reset(&mut self) {
        self.m.fill(0.0);
        self.v.fill(0.0);
        self.t = 0;
    }

    pub fn steps(&self) -> u64 {
        self.t
    }

    /// One Adam update of `params` along `grads`.
    pub fn apply(
        &mut self,
        params: &mut [f64],
        grads: &[f64],
        lr: f64,
        beta1: f64,
        beta2: f64,
        eps: f64,
    ) {
        assert_eq!(params.len(), grads.len());
        assert_eq!(params.len(), self.m.len());
        self.t += 1;
        let bc1 = 1.0 - beta1.powi(self.t as i32);
        let bc2 = 1.0 - beta2.powi(self.t as i32);
        for i in 0..params.len() {
            let g = grads[i];
            self.m[i] = beta1 * self.m[i] + (1.0 - beta1) * g;
            self.v[i] = beta2 * self.v[i] + (1.0 - beta2) * g * g;
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            params[i] -= lr * m_hat / (v_hat.sqrt() + eps);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const B1: f64 = 0.9;
    const B2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    #[test]
    fn zero_gradient_leaves_parameter_unchanged() {
        let mut st = AdamState::new(1);
        let mut p = [1.5];
        st.apply(&mut p, &[0.0], 0.1, B1, B2, EPS);
        assert_eq!(p[0], 1.5);
        assert_eq!(st.steps(), 1);
    }

    #[test]
    fn first_step_moves_by_roughly_the_learning_rate() {
        // Hand evaluation at t=1, g=1: m̂ = v̂ = 1, so Δ = lr/(1+eps) ≈ lr.
        let lr = 0.05;
        let mut st = AdamState::new(1);
        let mut p = [0.0];
        st.apply(&mut p, &[1.0], lr, B1, B2, EPS);
        assert!((p[0] + lr).abs() < 1e-9, "got {}", p[0]);
    }

    #[test]
    fn constant_gradient_converges_to_lr_sized_steps() {
        // Fixed point of the recurrence under constant g: |Δp| -> lr.
        let lr = 0.01;
        let mut st = AdamState::new(1);
        let mut p = [0.0];
        let mut prev = p[0];
        let mut last_delta = 0.0;
        for _ in 0..500 {
            st.apply(&mut p, &[3.0], lr, B1, B2, EPS);
            last_delta = (p[0] - prev).abs();
            prev = p[0];
        }
        assert!((last_delta - lr).abs() < 1e-6, "delta {last_delta}");
    }

    #[test]
    fn reset_clears_history() {
        let mut st = AdamState::new(2);
        let mut p = [0.0, 0.0];
        st.apply(&mut p, &[1.0, -1.0], 0.1, B1, B2, EPS);
        st.reset();
        assert_eq!(st.steps(), 0);
        let mut q = [0.0, 0.0];
        st.apply(&mut q, &[1.0, -1.0], 0.1, B1, B2, EPS);
        assert_eq!(p, q);
    }
}
