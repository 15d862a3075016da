use crate::float::sqrt;
use crate::model::ChannelParams;

/// Quantities shared by every closed-form expression in the analysis.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Terms {
    pub p: f64,
    pub s1: f64,
    pub s2: f64,
    pub rz: f64,
    /// sigma1^2
    pub v1: f64,
    /// sigma2^2
    pub v2: f64,
    /// sigma1 * sigma2
    pub s12: f64,
    /// sqrt(P + sigma1^2) * sqrt(P + sigma2^2), formed without squaring P.
    pub root: f64,
    /// 1 - P / root, evaluated without cancellation.
    pub root_gap: f64,
}

impl Terms {
    pub fn new(params: &ChannelParams) -> Terms {
        let p = params.power();
        let noise = params.noise();
        let (s1, s2, rz) = (noise.sigma1(), noise.sigma2(), noise.rho_z());
        let (v1, v2) = (s1 * s1, s2 * s2);
        let root = sqrt(p + v1) * sqrt(p + v2);
        // root^2 - P^2 = (v1 + v2) P + v1 v2
        let root_gap = ((v1 + v2) * p + v1 * v2) / root / (root + p);
        Terms { p, s1, s2, rz, v1, v2, s12: s1 * s2, root, root_gap }
    }

    /// 1 - P (P + v1 + v2 - rz s1 s2) / ((P + v1)(P + v2)).
    pub fn innovation_gap(&self) -> f64 {
        (self.s12 / (self.p + self.v1)) * ((self.s12 + self.rz * self.p) / (self.p + self.v2))
    }
}
