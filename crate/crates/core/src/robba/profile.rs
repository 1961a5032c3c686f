use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finite window parameters standing in for the annulus data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Profile {
    pub p: u64,
    /// p-adic precision budget for approximated constants.
    #[serde(rename = "P")]
    pub prec: i64,
    pub kmin: i64,
    pub kmax: i64,
    /// t-adic truncation.
    #[serde(rename = "T")]
    pub t_prec: i64,
    pub n0: u32,
    pub n1: u32,
}

impl Default for Profile {
    fn default() -> Self {
        Profile { p: 2, prec: 16, kmin: -8, kmax: 64, t_prec: 8, n0: 1, n1: 3 }
    }
}

impl Profile {
    pub fn new(p: u64, prec: i64, kmin: i64, kmax: i64, t_prec: i64, n0: u32, n1: u32) -> Result<Self> {
        let pr = Profile { p, prec, kmin, kmax, t_prec, n0, n1 };
        pr.validate()?;
        Ok(pr)
    }

    pub fn with_levels(mut self, n0: u32, n1: u32) -> Self {
        self.n0 = n0;
        self.n1 = n1;
        self
    }

    pub fn with_t_prec(mut self, t: i64) -> Self {
        self.t_prec = t;
        self
    }

    pub fn with_p(mut self, p: u64) -> Self {
        self.p = p;
        self
    }

    pub fn with_window(mut self, kmin: i64, kmax: i64) -> Self {
        self.kmin = kmin;
        self.kmax = kmax;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !is_prime(self.p) {
            return Err(Error::Validation(format!("p = {} is not prime", self.p)));
        }
        if self.n0 < 1 || self.n0 > self.n1 {
            return Err(Error::Validation(format!("bad level window {}:{}", self.n0, self.n1)));
        }
        if self.kmin > 0 || self.kmax < 0 {
            return Err(Error::Validation("window must contain exponent 0".into()));
        }
        if self.t_prec < 1 || self.prec < 1 {
            return Err(Error::Validation("precisions must be positive".into()));
        }
        if self.kmax < self.p as i64 * self.t_prec {
            return Err(Error::Validation(format!(
                "kmax = {} is below p*T = {}",
                self.kmax,
                self.p as i64 * self.t_prec
            )));
        }
        Ok(())
    }

    pub fn levels(&self) -> impl Iterator<Item = u32> {
        self.n0..=self.n1
    }

    pub fn check_level(&self, n: u32) -> Result<()> {
        if n < self.n0 || n > self.n1 {
            Err(Error::LevelOutOfWindow(n, self.n0, self.n1))
        } else {
            Ok(())
        }
    }

    /// Ramification index of K_n.
    pub fn e(&self, n: u32) -> u64 {
        self.p.pow(n - 1) * (self.p - 1)
    }
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}
