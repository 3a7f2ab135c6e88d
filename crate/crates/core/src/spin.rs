//! Spin-1/2 configurations and their computational-basis encoding.
//!
//! A configuration assigns every site a value σ ∈ {+1, −1} (+1 is "up").
//! Configurations map to basis indices bit-by-bit: bit `b` of the index
//! stores site `b`, with σ = +1 encoded as bit 0, so the all-up
//! configuration is index 0. Text tokens spell sites in site order starting
//! from site 0, using `u` for +1 and `d` for −1.

use std::fmt;

use crate::error::{Error, Result};

/// Maximum number of sites a configuration may have. Indices then still fit
/// comfortably in the basis-index representation.
pub const MAX_SITES: usize = 30;

/// Maximum number of sites for which the full basis may be enumerated
/// (2^14 = 16384 states); exact-oracle routines share this cap.
pub const MAX_ENUMERATED_SITES: usize = 14;

/// Index of a computational-basis state, with bit `b` holding site `b`
/// (0 = up, 1 = down).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisIndex(pub usize);

impl fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A classical configuration of N spin-1/2 sites with values ±1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpinConfiguration {
    spins: Vec<i8>,
}

impl SpinConfiguration {
    /// All-up configuration on `n_sites` sites.
    pub fn all_up(n_sites: usize) -> Result<Self> {
        check_site_count(n_sites)?;
        Ok(Self { spins: vec![1; n_sites] })
    }

    /// Build from explicit ±1 values, site 0 first.
    pub fn from_spins(spins: Vec<i8>) -> Result<Self> {
        check_site_count(spins.len())?;
        if let Some(bad) = spins.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::Domain(format!(
                "spin values must be +1 or -1, got {bad}"
            )));
        }
        Ok(Self { spins })
    }

    /// Number of sites.
    pub fn n_sites(&self) -> usize {
        self.spins.len()
    }

    /// Spin values, site 0 first.
    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    /// Value at one site (+1 or −1); site must be in range.
    #[inline]
    pub fn spin(&self, site: usize) -> i8 {
        self.spins[site]
    }

    /// Basis index of this configuration (bit `b` = site `b`, down = 1).
    pub fn encode(&self) -> BasisIndex {
        let mut index = 0usize;
        for (site, &s) in self.spins.iter().enumerate() {
            if s < 0 {
                index |= 1 << site;
            }
        }
        BasisIndex(index)
    }

    /// Configuration for a basis index on `n_sites` sites.
    ///
    /// Fails if the index has bits at or above `n_sites`.
    pub fn decode(index: BasisIndex, n_sites: usize) -> Result<Self> {
        check_site_count(n_sites)?;
        if index.0 >> n_sites != 0 {
            return Err(Error::Domain(format!(
                "basis index {} out of range for {n_sites} sites",
                index.0
            )));
        }
        let spins = (0..n_sites)
            .map(|site| if index.0 >> site & 1 == 1 { -1 } else { 1 })
            .collect();
        Ok(Self { spins })
    }

    /// Flip one site in place.
    pub fn flip(&mut self, site: usize) -> Result<()> {
        let n = self.n_sites();
        let s = self.spins.get_mut(site).ok_or_else(|| {
            Error::Domain(format!("site {site} out of range for {n} sites"))
        })?;
        *s = -*s;
        Ok(())
    }

    /// Copy of this configuration with one site flipped.
    pub fn flipped(&self, site: usize) -> Result<Self> {
        let mut out = self.clone();
        out.flip(site)?;
        Ok(out)
    }

    /// Copy with every site in `sites` flipped (a site listed twice flips
    /// back; callers pass distinct sites).
    pub fn flipped_many(&self, sites: &[usize]) -> Result<Self> {
        let mut out = self.clone();
        for &site in sites {
            out.flip(site)?;
        }
        Ok(out)
    }

    /// Exchange the values of two sites in place.
    pub fn swap_sites(&mut self, a: usize, b: usize) -> Result<()> {
        let n = self.n_sites();
        if a >= n || b >= n {
            return Err(Error::Domain(format!(
                "site pair ({a}, {b}) out of range for {n} sites"
            )));
        }
        self.spins.swap(a, b);
        Ok(())
    }

    /// Total magnetization Σ_i σ_i. Always in [−N, N] with the parity of N.
    pub fn total_magnetization(&self) -> i64 {
        self.spins.iter().map(|&s| i64::from(s)).sum()
    }

    /// Parse a `u`/`d` token, site 0 first (e.g. `uudd`).
    pub fn parse_token(token: &str) -> Result<Self> {
        if token.is_empty() {
            return Err(Error::Parse("empty configuration token".into()));
        }
        let mut spins = Vec::with_capacity(token.len());
        for (pos, c) in token.chars().enumerate() {
            match c {
                'u' => spins.push(1),
                'd' => spins.push(-1),
                other => {
                    return Err(Error::Parse(format!(
                        "invalid character {other:?} at position {pos} in configuration token"
                    )))
                }
            }
        }
        Self::from_spins(spins)
    }

    /// Token form of this configuration (`u` = +1, `d` = −1, site 0 first).
    pub fn token(&self) -> String {
        self.spins
            .iter()
            .map(|&s| if s > 0 { 'u' } else { 'd' })
            .collect()
    }
}

impl fmt::Display for SpinConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.token())
    }
}

fn check_site_count(n_sites: usize) -> Result<()> {
    if n_sites == 0 {
        return Err(Error::Domain("configuration needs at least one site".into()));
    }
    if n_sites > MAX_SITES {
        return Err(Error::Capacity(format!(
            "{n_sites} sites exceeds the maximum of {MAX_SITES}"
        )));
    }
    Ok(())
}

/// Iterator over the full computational basis of `n_sites` sites in index
/// order (2^n configurations).
///
/// Fails for `n_sites > MAX_ENUMERATED_SITES`.
pub fn full_basis(n_sites: usize) -> Result<FullBasis> {
    check_site_count(n_sites)?;
    if n_sites > MAX_ENUMERATED_SITES {
        return Err(Error::Capacity(format!(
            "full basis enumeration is capped at {MAX_ENUMERATED_SITES} sites, got {n_sites}"
        )));
    }
    Ok(FullBasis { n_sites, next: 0, dim: 1usize << n_sites })
}

/// Dimension 2^n of the Hilbert space on `n_sites` sites (enumeration cap
/// applies).
pub fn basis_dimension(n_sites: usize) -> Result<usize> {
    full_basis(n_sites).map(|b| b.dim)
}

/// See [`full_basis`].
#[derive(Debug, Clone)]
pub struct FullBasis {
    n_sites: usize,
    next: usize,
    dim: usize,
}

impl Iterator for FullBasis {
    type Item = SpinConfiguration;

    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.dim {
            return None;
        }
        let config = SpinConfiguration::decode(BasisIndex(self.next), self.n_sites)
            .expect("indices below 2^n are always decodable");
        self.next += 1;
        Some(config)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = self.dim - self.next;
        (left, Some(left))
    }
}

impl ExactSizeIterator for FullBasis {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encode_decode_round_trip_exhaustive() {
        for n in 1..=6 {
            for idx in 0..(1usize << n) {
                let config = SpinConfiguration::decode(BasisIndex(idx), n).unwrap();
                assert_eq!(config.encode(), BasisIndex(idx));
                assert_eq!(config.n_sites(), n);
            }
        }
    }

    #[test]
    fn all_up_is_index_zero() {
        let config = SpinConfiguration::all_up(5).unwrap();
        assert_eq!(config.encode(), BasisIndex(0));
        assert_eq!(config.total_magnetization(), 5);
    }

    #[test]
    fn bit_convention_site_is_bit() {
        // Down at site 2 only -> index 4.
        let mut config = SpinConfiguration::all_up(4).unwrap();
        config.flip(2).unwrap();
        assert_eq!(config.encode(), BasisIndex(4));
        assert_eq!(config.token(), "uudu");
    }

    #[test]
    fn token_round_trip() {
        let config = SpinConfiguration::parse_token("uddu").unwrap();
        assert_eq!(config.spins(), &[1, -1, -1, 1]);
        assert_eq!(config.token(), "uddu");
        assert_eq!(config.to_string(), "uddu");
    }

    #[test]
    fn token_rejects_bad_characters() {
        assert!(matches!(
            SpinConfiguration::parse_token("uxdu"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            SpinConfiguration::parse_token(""),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn flip_is_involutive_and_checks_range() {
        let mut config = SpinConfiguration::parse_token("udu").unwrap();
        let original = config.clone();
        config.flip(1).unwrap();
        assert_ne!(config, original);
        config.flip(1).unwrap();
        assert_eq!(config, original);
        assert!(matches!(config.flip(3), Err(Error::Domain(_))));
    }

    #[test]
    fn magnetization_has_site_parity() {
        for n in 1..=6 {
            for config in full_basis(n).unwrap() {
                let m = config.total_magnetization();
                assert!(m.abs() <= n as i64);
                assert_eq!((m - n as i64) % 2, 0);
            }
        }
    }

    #[test]
    fn decode_rejects_out_of_range_index() {
        assert!(matches!(
            SpinConfiguration::decode(BasisIndex(16), 4),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn site_count_caps() {
        assert!(SpinConfiguration::all_up(MAX_SITES).is_ok());
        assert!(matches!(
            SpinConfiguration::all_up(MAX_SITES + 1),
            Err(Error::Capacity(_))
        ));
        assert!(full_basis(MAX_ENUMERATED_SITES).is_ok());
        assert!(matches!(
            full_basis(MAX_ENUMERATED_SITES + 1),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn full_basis_is_complete_and_ordered() {
        let basis: Vec<_> = full_basis(3).unwrap().collect();
        assert_eq!(basis.len(), 8);
        for (i, config) in basis.iter().enumerate() {
            assert_eq!(config.encode(), BasisIndex(i));
        }
    }

    #[test]
    fn swap_sites_conserves_magnetization() {
        let mut config = SpinConfiguration::parse_token("uddu").unwrap();
        let m = config.total_magnetization();
        config.swap_sites(0, 1).unwrap();
        assert_eq!(config.token(), "dudu");
        assert_eq!(config.total_magnetization(), m);
    }
}
