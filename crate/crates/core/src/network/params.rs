use super::ModelError;

/// Beamforming scheme at every SBS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    /// Matched filter, no coordination.
    Mf,
    /// Zero forcing coordinated within the K-nearest cluster.
    Zf,
}

impl Scheme {
    pub const ALL: [Scheme; 2] = [Scheme::Mf, Scheme::Zf];

    /// Shape of the Gamma-distributed serving gain.
    pub fn gain_shape(self, antennas: usize, cluster_size: usize) -> usize {
        match self {
            Scheme::Mf => antennas,
            Scheme::Zf => antennas + 1 - cluster_size,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Mf => "mf",
            Scheme::Zf => "zf",
        }
    }
}

impl core::fmt::Display for Scheme {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for Scheme {
    type Err = &'static str;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "mf" => Ok(Scheme::Mf),
            "zf" => Ok(Scheme::Zf),
            _ => Err("expected `mf` or `zf`"),
        }
    }
}

/// How interfering SBS beamformers are simulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InterfererModel {
    /// Build every beamformer from fresh dummy-user channels.
    #[default]
    Explicit,
    /// Sample the resulting gains directly: Exp(1) toward the typical user,
    /// Γ(m, 1) for the serving link.
    Fast,
}

impl InterfererModel {
    pub fn as_str(self) -> &'static str {
        match self {
            InterfererModel::Explicit => "explicit",
            InterfererModel::Fast => "fast",
        }
    }
}

impl core::fmt::Display for InterfererModel {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for InterfererModel {
    type Err = &'static str;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "explicit" => Ok(InterfererModel::Explicit),
            "fast" => Ok(InterfererModel::Fast),
            _ => Err("expected `explicit` or `fast`"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkParams {
    /// SBS intensity in m^-2.
    pub lambda_b: f64,
    pub alpha: f64,
    pub antennas: usize,
    pub cluster_size: usize,
    /// SIR target, linear scale.
    pub gamma: f64,
    /// The simulation window is `[-w, w]^2` around the typical user.
    pub region_half_width: f64,
    /// Draws whose K-th nearest SBS lies beyond this radius are resampled.
    pub guard_radius: f64,
}

impl Default for NetworkParams {
    fn default() -> Self {
        Self {
            lambda_b: 5e-5,
            alpha: 4.0,
            antennas: 2,
            cluster_size: 2,
            gamma: 1.0,
            region_half_width: 2000.0,
            guard_radius: 1000.0,
        }
    }
}

fn invalid(field: &'static str, reason: &'static str) -> ModelError {
    ModelError::InvalidParams { field, reason }
}

impl NetworkParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.lambda_b > 0.0) || !self.lambda_b.is_finite() {
            return Err(invalid("lambda_b", "must be positive and finite"));
        }
        if !(self.alpha > 2.0) || !self.alpha.is_finite() {
            return Err(invalid("alpha", "path-loss exponent must exceed 2"));
        }
        if self.antennas < 1 {
            return Err(invalid("antennas", "must be at least 1"));
        }
        if self.cluster_size < 2 {
            return Err(invalid("cluster_size", "must be at least 2"));
        }
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return Err(invalid("gamma", "SIR target must be positive"));
        }
        if !(self.region_half_width > 0.0) || !self.region_half_width.is_finite() {
            return Err(invalid("region_half_width", "must be positive"));
        }
        if !(self.guard_radius > 0.0) || self.guard_radius >= self.region_half_width {
            return Err(invalid(
                "guard_radius",
                "must be positive and smaller than region_half_width",
            ));
        }
        Ok(())
    }

    pub fn validate_for(&self, scheme: Scheme) -> Result<(), ModelError> {
        self.validate()?;
        if scheme == Scheme::Zf && self.antennas < self.cluster_size {
            return Err(invalid(
                "antennas",
                "zero forcing needs at least as many antennas as the cluster size",
            ));
        }
        if self.antennas > crate::numerics::MAX_DERIVATIVE_ORDER {
            return Err(invalid("antennas", "at most 16 antennas are supported"));
        }
        Ok(())
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_antennas(mut self, antennas: usize) -> Self {
        self.antennas = antennas;
        self
    }

    /// Mean number of SBSs in the simulation window.
    pub fn mean_sbs_count(&self) -> f64 {
        let side = 2.0 * self.region_half_width;
        self.lambda_b * side * side
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let p = NetworkParams::default();
        p.validate_for(Scheme::Mf).unwrap();
        p.validate_for(Scheme::Zf).unwrap();
        assert!((p.mean_sbs_count() - 800.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_values() {
        let base = NetworkParams::default();
        let cases = [
            NetworkParams { lambda_b: 0.0, ..base },
            NetworkParams { alpha: 2.0, ..base },
            NetworkParams { antennas: 0, ..base },
            NetworkParams { cluster_size: 1, ..base },
            NetworkParams { gamma: 0.0, ..base },
            NetworkParams { guard_radius: 3000.0, ..base },
        ];
        for p in cases {
            assert!(p.validate().is_err(), "{p:?}");
        }
        let zf = NetworkParams { antennas: 2, cluster_size: 3, ..base };
        assert!(zf.validate_for(Scheme::Mf).is_ok());
        assert!(zf.validate_for(Scheme::Zf).is_err());
    }

    #[test]
    fn scheme_parsing() {
        assert_eq!("MF".parse::<Scheme>().unwrap(), Scheme::Mf);
        assert_eq!("zf".parse::<Scheme>().unwrap(), Scheme::Zf);
        assert!("mmse".parse::<Scheme>().is_err());
        assert_eq!(Scheme::Zf.gain_shape(4, 2), 3);
    }
}
