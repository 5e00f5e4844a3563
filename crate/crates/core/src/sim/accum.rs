//! Running sums for campaign statistics.
//!
//! Partial sums are built per slot chunk and merged in chunk order, so the result
//! does not depend on how chunks were spread over threads.

/// Count, sum and sum of squares of a scalar sample.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub count: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(&mut self, other: &Moments) {
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            return 0.0;
        }
        self.sum / self.count as f64
    }

    /// Unbiased sample variance; zero below two samples.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        ((self.sum_sq - self.sum * self.sum / n) / (n - 1.0)).max(0.0)
    }

    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            return 0.0;
        }
        (self.variance() / self.count as f64).sqrt()
    }
}

/// Joint sums of the in-band magnitude `a`, the aligned OOB magnitude `g`, and the
/// cross part `x = |h|² − a² − g²` of the channel gain.
///
/// The factorized model predicts `E[x] = 2c E[a] E[g]` with `c = 1` when the OOB
/// reflection is phased coherently and `c = 0` otherwise. The sums here are enough
/// for a delta-method standard error of `x̄ − 2c ā ḡ`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CrossMoments {
    pub count: u64,
    pub a: f64,
    pub g: f64,
    pub aa: f64,
    pub gg: f64,
    pub ag: f64,
    pub x: f64,
    pub xx: f64,
    pub xa: f64,
    pub xg: f64,
}

impl CrossMoments {
    pub fn push(&mut self, a: f64, g: f64, x: f64) {
        self.count += 1;
        self.a += a;
        self.g += g;
        self.aa += a * a;
        self.gg += g * g;
        self.ag += a * g;
        self.x += x;
        self.xx += x * x;
        self.xa += x * a;
        self.xg += x * g;
    }

    pub fn merge(&mut self, o: &CrossMoments) {
        self.count += o.count;
        self.a += o.a;
        self.g += o.g;
        self.aa += o.aa;
        self.gg += o.gg;
        self.ag += o.ag;
        self.x += o.x;
        self.xx += o.xx;
        self.xa += o.xa;
        self.xg += o.xg;
    }

    pub fn mean_a(&self) -> f64 {
        self.a / self.count.max(1) as f64
    }

    pub fn mean_g(&self) -> f64 {
        self.g / self.count.max(1) as f64
    }

    /// `(x̄ − 2c ā ḡ, standard error)`.
    pub fn factorization_residual(&self, coherent: bool) -> (f64, f64) {
        if self.count == 0 {
            return (0.0, 0.0);
        }
        let n = self.count as f64;
        let c = if coherent { 1.0 } else { 0.0 };
        let (ma, mg) = (self.a / n, self.g / n);
        let (maa, mgg, mag) = (self.aa / n, self.gg / n, self.ag / n);
        let (mx, mxx, mxa, mxg) = (self.x / n, self.xx / n, self.xa / n, self.xg / n);
        // Influence function ψ = x − 2c(ā g + ḡ a).
        let psi_mean = mx - 4.0 * c * ma * mg;
        let psi_sq = mxx - 4.0 * c * (ma * mxg + mg * mxa)
            + 4.0 * c * c * (ma * ma * mgg + 2.0 * ma * mg * mag + mg * mg * maa);
        let var = (psi_sq - psi_mean * psi_mean).max(0.0);
        (mx - 2.0 * c * ma * mg, (var / n).sqrt())
    }
}
