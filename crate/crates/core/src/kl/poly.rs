use std::fmt;

/// A polynomial in `q` with nonnegative integer coefficients, lowest degree first.
#[derive(Clone, PartialEq, Eq, Hash, Default, serde::Serialize)]
pub struct KlPolynomial {
    coeffs: Vec<u64>,
}

impl KlPolynomial {
    pub fn zero() -> Self {
        KlPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        KlPolynomial { coeffs: vec![1] }
    }

    /// Trailing zeros are stripped.
    pub fn from_coeffs(mut coeffs: Vec<u64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        KlPolynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    /// Value at `q = 1`; `None` on overflow.
    pub fn at_one(&self) -> Option<u64> {
        self.coeffs
            .iter()
            .try_fold(0u64, |acc, &c| acc.checked_add(c))
    }
}

impl fmt::Display for KlPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match (i, c) {
                (0, _) => write!(f, "{c}")?,
                (1, 1) => write!(f, "q")?,
                (1, _) => write!(f, "{c}q")?,
                (_, 1) => write!(f, "q^{i}")?,
                _ => write!(f, "{c}q^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for KlPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "KlPolynomial({self})")
    }
}
