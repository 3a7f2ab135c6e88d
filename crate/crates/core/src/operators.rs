//! k-local operators as sums of weighted Pauli strings.
//!
//! An operator is stored in a canonical form — terms sorted by site set and
//! letters, duplicates merged, zero coefficients dropped — so two
//! constructions of the same operator compare equal. The module provides the
//! model Hamiltonians used throughout the crate (transverse-field Ising,
//! anisotropic Heisenberg with fields, Jordan–Wigner free fermions), dense
//! matrix assembly by Kronecker composition, and the connected-element
//! enumeration ⟨s|Ô|s′⟩ that powers every local estimator.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::{real, to_f64, Cplx, Real};
use crate::spin::{SpinConfiguration, MAX_ENUMERATED_SITES};

/// One Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    /// σˣ — flips the spin.
    X,
    /// σʸ — flips the spin with a ±i phase.
    Y,
    /// σᶻ — diagonal ±1.
    Z,
}

impl Pauli {
    /// Single-letter text form.
    pub fn letter(self) -> char {
        match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// Parse a single letter (case-insensitive).
    pub fn from_letter(c: char) -> Result<Self> {
        match c.to_ascii_uppercase() {
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            other => Err(Error::Parse(format!("unknown Pauli letter {other:?}"))),
        }
    }

    /// Dense 2×2 matrix in the (up, down) basis.
    pub fn matrix<T: Real>(self) -> DMatrix<Cplx<T>> {
        let zero = Cplx::new(T::zero(), T::zero());
        let one = Cplx::new(T::one(), T::zero());
        let i = Cplx::new(T::zero(), T::one());
        match self {
            Pauli::X => DMatrix::from_row_slice(2, 2, &[zero, one, one, zero]),
            Pauli::Y => DMatrix::from_row_slice(2, 2, &[zero, -i, i, zero]),
            Pauli::Z => DMatrix::from_row_slice(2, 2, &[one, zero, zero, -one]),
        }
    }
}

/// Product of two Pauli letters on the same site: returns (phase, letter),
/// with `None` for the identity (σₐσₐ = 1).
fn pauli_product<T: Real>(a: Pauli, b: Pauli) -> (Cplx<T>, Option<Pauli>) {
    use Pauli::*;
    let one = Cplx::new(T::one(), T::zero());
    let i = Cplx::new(T::zero(), T::one());
    match (a, b) {
        (X, X) | (Y, Y) | (Z, Z) => (one, None),
        (X, Y) => (i, Some(Z)),
        (Y, X) => (-i, Some(Z)),
        (Y, Z) => (i, Some(X)),
        (Z, Y) => (-i, Some(X)),
        (Z, X) => (i, Some(Y)),
        (X, Z) => (-i, Some(Y)),
    }
}

/// A weighted Pauli string: coefficient × ∏ σ^{letter}_site, identity on
/// unlisted sites. Each site appears at most once.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliString<T: Real> {
    coefficient: Cplx<T>,
    factors: BTreeMap<usize, Pauli>,
}

impl<T: Real> PauliString<T> {
    /// Identity string with the given coefficient.
    pub fn identity(coefficient: Cplx<T>) -> Self {
        Self { coefficient, factors: BTreeMap::new() }
    }

    /// String with one letter on one site.
    pub fn single(coefficient: Cplx<T>, site: usize, letter: Pauli) -> Self {
        let mut factors = BTreeMap::new();
        factors.insert(site, letter);
        Self { coefficient, factors }
    }

    /// String from explicit (site, letter) pairs; each site at most once.
    pub fn new(coefficient: Cplx<T>, letters: &[(usize, Pauli)]) -> Result<Self> {
        let mut factors = BTreeMap::new();
        for &(site, letter) in letters {
            if factors.insert(site, letter).is_some() {
                return Err(Error::Domain(format!(
                    "site {site} appears more than once in a Pauli string"
                )));
            }
        }
        Ok(Self { coefficient, factors })
    }

    /// Coefficient of the string.
    pub fn coefficient(&self) -> Cplx<T> {
        self.coefficient
    }

    /// Sites and letters, sorted by site.
    pub fn factors(&self) -> impl Iterator<Item = (usize, Pauli)> + '_ {
        self.factors.iter().map(|(&s, &p)| (s, p))
    }

    /// Number of listed sites (the locality k).
    pub fn locality(&self) -> usize {
        self.factors.len()
    }

    /// Largest listed site, if any.
    pub fn max_site(&self) -> Option<usize> {
        self.factors.keys().next_back().copied()
    }

    /// Adjoint: Pauli strings are Hermitian, so only the coefficient
    /// conjugates.
    pub fn adjoint(&self) -> Self {
        Self { coefficient: self.coefficient.conj(), factors: self.factors.clone() }
    }

    /// Operator product of two strings (site-wise Pauli algebra with the
    /// accumulated phase folded into the coefficient).
    pub fn multiply(&self, other: &Self) -> Self {
        let mut coefficient = self.coefficient * other.coefficient;
        let mut factors = self.factors.clone();
        for (&site, &letter) in &other.factors {
            match factors.remove(&site) {
                None => {
                    factors.insert(site, letter);
                }
                Some(existing) => {
                    let (phase, product) = pauli_product::<T>(existing, letter);
                    coefficient *= phase;
                    if let Some(p) = product {
                        factors.insert(site, p);
                    }
                }
            }
        }
        Self { coefficient, factors }
    }

    /// Sort key implementing the canonical term order: by site set, then
    /// letters.
    fn sort_key(&self) -> Vec<(usize, u8)> {
        self.factors
            .iter()
            .map(|(&s, &p)| (s, p.letter() as u8))
            .collect()
    }

    /// Structural key ignoring the coefficient, used to merge duplicates.
    fn structure(&self) -> &BTreeMap<usize, Pauli> {
        &self.factors
    }
}

/// ⟨s|string|s′⟩ action for a fixed bra `s`: which sites flip, and the value.
///
/// The target differs from `s` exactly on the X and Y sites. Per site the
/// factor is: Z → σ_i(s) (diagonal ±1), X → 1, Y → −i·σ_i(s) (the ket holds
/// the flipped spin, so ⟨s|σʸ|s′⟩ = i·σ_i(s′) = −i·σ_i(s)).
fn string_action<T: Real>(string: &PauliString<T>, s: &SpinConfiguration) -> (usize, Cplx<T>) {
    let mut mask = 0usize;
    let mut value = string.coefficient;
    let i_unit = Cplx::new(T::zero(), T::one());
    for (&site, &letter) in &string.factors {
        let sigma = if s.spin(site) > 0 { T::one() } else { -T::one() };
        match letter {
            Pauli::Z => value *= Cplx::new(sigma, T::zero()),
            Pauli::X => mask |= 1 << site,
            Pauli::Y => {
                mask |= 1 << site;
                value *= -i_unit * Cplx::new(sigma, T::zero());
            }
        }
    }
    (mask, value)
}

/// A nonzero matrix element ⟨s|Ô|target⟩ produced by
/// [`LocalOperator::connected_elements`].
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixElement<T: Real> {
    /// The connected configuration s′.
    pub target: SpinConfiguration,
    /// The complex value ⟨s|Ô|s′⟩ (never zero).
    pub value: Cplx<T>,
}

/// Sum of weighted Pauli strings on a fixed number of sites, kept in
/// canonical form (terms sorted by site set then letter, duplicates merged,
/// zero coefficients dropped).
#[derive(Debug, Clone, PartialEq)]
pub struct LocalOperator<T: Real> {
    n_sites: usize,
    terms: Vec<PauliString<T>>,
}

impl<T: Real> LocalOperator<T> {
    /// Empty operator (the zero operator) on `n_sites` sites.
    pub fn zero(n_sites: usize) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::Domain("operator needs at least one site".into()));
        }
        Ok(Self { n_sites, terms: Vec::new() })
    }

    /// Build from terms, canonicalizing. Every term must fit the site count.
    pub fn from_terms(n_sites: usize, terms: Vec<PauliString<T>>) -> Result<Self> {
        let mut op = Self::zero(n_sites)?;
        for term in &terms {
            if let Some(max) = term.max_site() {
                if max >= n_sites {
                    return Err(Error::Domain(format!(
                        "term touches site {max}, beyond the {n_sites}-site system"
                    )));
                }
            }
        }
        op.terms = terms;
        op.canonicalize();
        Ok(op)
    }

    /// Number of sites.
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// Canonical term list.
    pub fn terms(&self) -> &[PauliString<T>] {
        &self.terms
    }

    /// Sum of two operators on the same sites.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n_sites != other.n_sites {
            return Err(Error::Domain(format!(
                "cannot add operators on {} and {} sites",
                self.n_sites, other.n_sites
            )));
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self::from_terms(self.n_sites, terms)
    }

    /// Operator scaled by a complex factor.
    pub fn scaled(&self, factor: Cplx<T>) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| PauliString { coefficient: t.coefficient * factor, factors: t.factors.clone() })
            .collect();
        let mut op = Self { n_sites: self.n_sites, terms };
        op.canonicalize();
        op
    }

    /// Operator product (composition), re-canonicalized.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.n_sites != other.n_sites {
            return Err(Error::Domain(format!(
                "cannot compose operators on {} and {} sites",
                self.n_sites, other.n_sites
            )));
        }
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(a.multiply(b));
            }
        }
        Self::from_terms(self.n_sites, terms)
    }

    /// Adjoint operator.
    pub fn adjoint(&self) -> Self {
        let terms = self.terms.iter().map(PauliString::adjoint).collect();
        let mut op = Self { n_sites: self.n_sites, terms };
        op.canonicalize();
        op
    }

    /// Merge identical strings, drop zero coefficients, sort canonically.
    fn canonicalize(&mut self) {
        self.terms.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        let mut merged: Vec<PauliString<T>> = Vec::with_capacity(self.terms.len());
        for term in self.terms.drain(..) {
            match merged.last_mut() {
                Some(last) if last.structure() == term.structure() => {
                    last.coefficient += term.coefficient;
                }
                _ => merged.push(term),
            }
        }
        merged.retain(|t| t.coefficient.re != T::zero() || t.coefficient.im != T::zero());
        self.terms = merged;
    }

    /// Visit every connected configuration of `s`: calls `visit(flips, v)`
    /// once per distinct target, where `flips` lists the sites on which the
    /// target differs from `s` (empty for the diagonal) and `v` = ⟨s|Ô|s′⟩.
    ///
    /// Grouping happens per flip mask, so targets are distinct and the
    /// number of visits is bounded by the term count + 1.
    pub fn visit_connected<F>(&self, s: &SpinConfiguration, mut visit: F) -> Result<()>
    where
        F: FnMut(&[usize], Cplx<T>),
    {
        if s.n_sites() != self.n_sites {
            return Err(Error::Domain(format!(
                "operator on {} sites applied to a {}-site configuration",
                self.n_sites,
                s.n_sites()
            )));
        }
        // Accumulate values per flip mask in first-seen order (deterministic).
        let mut groups: Vec<(usize, Cplx<T>)> = Vec::with_capacity(self.terms.len());
        for term in &self.terms {
            let (mask, value) = string_action(term, s);
            match groups.iter_mut().find(|(m, _)| *m == mask) {
                Some((_, acc)) => *acc += value,
                None => groups.push((mask, value)),
            }
        }
        debug_assert!(
            groups.len() <= self.terms.len() + 1,
            "connected count {} exceeds term count {} + 1",
            groups.len(),
            self.terms.len()
        );
        let mut flips: Vec<usize> = Vec::with_capacity(self.n_sites);
        for (mask, value) in groups {
            if value.re == T::zero() && value.im == T::zero() {
                continue;
            }
            flips.clear();
            let mut m = mask;
            while m != 0 {
                let site = m.trailing_zeros() as usize;
                flips.push(site);
                m &= m - 1;
            }
            visit(&flips, value);
        }
        Ok(())
    }

    /// All nonzero matrix elements ⟨s|Ô|s′⟩ for the given bra `s`, with
    /// distinct targets, in deterministic order.
    pub fn connected_elements(&self, s: &SpinConfiguration) -> Result<Vec<MatrixElement<T>>> {
        let mut out = Vec::new();
        self.visit_connected(s, |flips, value| {
            let target = s
                .flipped_many(flips)
                .expect("flip sites come from the operator and are in range");
            out.push(MatrixElement { target, value });
        })?;
        Ok(out)
    }

    /// Dense 2^N × 2^N matrix Σ_r a_r S_r assembled by Kronecker composition
    /// (site 0 is the fastest-varying index bit).
    pub fn dense_matrix(&self) -> Result<DMatrix<Cplx<T>>> {
        if self.n_sites > MAX_ENUMERATED_SITES {
            return Err(Error::Capacity(format!(
                "dense matrix is capped at {MAX_ENUMERATED_SITES} sites, got {}",
                self.n_sites
            )));
        }
        let dim = 1usize << self.n_sites;
        let zero = Cplx::new(T::zero(), T::zero());
        let mut total = DMatrix::from_element(dim, dim, zero);
        let eye2: DMatrix<Cplx<T>> = DMatrix::identity(2, 2);
        for term in &self.terms {
            // Fold sites from the most significant (N−1) down to 0 so that
            // bit b of the matrix index corresponds to site b.
            let mut acc = DMatrix::from_element(1, 1, term.coefficient);
            for site in (0..self.n_sites).rev() {
                let factor = match term.factors.get(&site) {
                    Some(&p) => p.matrix::<T>(),
                    None => eye2.clone(),
                };
                acc = acc.kronecker(&factor);
            }
            total += acc;
        }
        Ok(total)
    }

    /// Whether the canonical term list equals its adjoint, i.e. every merged
    /// coefficient is real (within a roundoff-scaled tolerance).
    pub fn hermitian_check(&self) -> bool {
        let tol_scale = real::<T>(1024.0) * T::epsilon();
        self.terms.iter().all(|t| {
            let tol = tol_scale * (T::one() + t.coefficient.norm());
            crate::scalar::abs(t.coefficient.im) <= tol
        })
    }

    /// Line-oriented text form: one term per line, `re im site:letter ...`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for term in &self.terms {
            let _ = write!(out, "{} {}", to_f64(term.coefficient.re), to_f64(term.coefficient.im));
            for (site, letter) in term.factors() {
                let _ = write!(out, " {}:{}", site, letter.letter());
            }
            out.push('\n');
        }
        out
    }

    /// Parse the text form produced by [`Self::to_text`].
    pub fn from_text(n_sites: usize, text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for (line_no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let re: f64 = fields
                .next()
                .ok_or_else(|| Error::Parse(format!("line {}: missing real part", line_no + 1)))?
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: bad real part: {e}", line_no + 1)))?;
            let im: f64 = fields
                .next()
                .ok_or_else(|| Error::Parse(format!("line {}: missing imaginary part", line_no + 1)))?
                .parse()
                .map_err(|e| {
                    Error::Parse(format!("line {}: bad imaginary part: {e}", line_no + 1))
                })?;
            let mut letters = Vec::new();
            for field in fields {
                let (site_str, letter_str) = field.split_once(':').ok_or_else(|| {
                    Error::Parse(format!(
                        "line {}: expected site:letter, got {field:?}",
                        line_no + 1
                    ))
                })?;
                let site: usize = site_str.parse().map_err(|e| {
                    Error::Parse(format!("line {}: bad site index: {e}", line_no + 1))
                })?;
                let mut chars = letter_str.chars();
                let (letter_char, extra) = (chars.next(), chars.next());
                let letter = match (letter_char, extra) {
                    (Some(c), None) => Pauli::from_letter(c)?,
                    _ => {
                        return Err(Error::Parse(format!(
                            "line {}: expected a single Pauli letter, got {letter_str:?}",
                            line_no + 1
                        )))
                    }
                };
                letters.push((site, letter));
            }
            terms.push(PauliString::new(Cplx::new(real(re), real(im)), &letters)?);
        }
        Self::from_terms(n_sites, terms)
    }
}

/// Transverse-field Ising chain, H = −J Σ σᶻⱼσᶻⱼ₊₁ + h Σ σˣⱼ; a periodic
/// chain adds the (N−1, 0) bond.
pub fn build_tfi<T: Real>(n_sites: usize, j: T, h: T, periodic: bool) -> Result<LocalOperator<T>> {
    if n_sites < 2 {
        return Err(Error::Domain(format!(
            "transverse-field Ising chain needs at least 2 sites, got {n_sites}"
        )));
    }
    let mut terms = Vec::new();
    let zero = T::zero();
    for site in 0..n_sites - 1 {
        terms.push(PauliString::new(
            Cplx::new(-j, zero),
            &[(site, Pauli::Z), (site + 1, Pauli::Z)],
        )?);
    }
    if periodic {
        terms.push(PauliString::new(
            Cplx::new(-j, zero),
            &[(n_sites - 1, Pauli::Z), (0, Pauli::Z)],
        )?);
    }
    for site in 0..n_sites {
        terms.push(PauliString::single(Cplx::new(h, zero), site, Pauli::X));
    }
    LocalOperator::from_terms(n_sites, terms)
}

/// Anisotropic Heisenberg chain with uniform fields on an open chain:
/// H = Σⱼ (J₁ σˣⱼσˣⱼ₊₁ + J₂ σʸⱼσʸⱼ₊₁ + J₃ σᶻⱼσᶻⱼ₊₁) + Σⱼ (h₁ σˣⱼ + h₂ σʸⱼ + h₃ σᶻⱼ).
pub fn build_heisenberg_benchmark<T: Real>(
    n_sites: usize,
    j: [T; 3],
    h: [T; 3],
) -> Result<LocalOperator<T>> {
    if n_sites < 2 {
        return Err(Error::Domain(format!(
            "Heisenberg chain needs at least 2 sites, got {n_sites}"
        )));
    }
    let zero = T::zero();
    let letters = [Pauli::X, Pauli::Y, Pauli::Z];
    let mut terms = Vec::new();
    for site in 0..n_sites - 1 {
        for (axis, &letter) in letters.iter().enumerate() {
            terms.push(PauliString::new(
                Cplx::new(j[axis], zero),
                &[(site, letter), (site + 1, letter)],
            )?);
        }
    }
    for site in 0..n_sites {
        for (axis, &letter) in letters.iter().enumerate() {
            terms.push(PauliString::single(Cplx::new(h[axis], zero), site, letter));
        }
    }
    LocalOperator::from_terms(n_sites, terms)
}

/// Free-fermion hopping chain mapped through Jordan–Wigner,
/// H = −½ Σⱼ (σ⁺ⱼσ⁻ⱼ₊₁ + σ⁺ⱼ₊₁σ⁻ⱼ), stored in its simplified 2-local form
/// −¼ Σⱼ (σˣⱼσˣⱼ₊₁ + σʸⱼσʸⱼ₊₁): the σᶻ strings cancel on adjacent bonds.
pub fn jordan_wigner_free_fermions<T: Real>(n_sites: usize) -> Result<LocalOperator<T>> {
    if n_sites < 2 {
        return Err(Error::Domain(format!(
            "free-fermion chain needs at least 2 sites, got {n_sites}"
        )));
    }
    let quarter = Cplx::new(-real::<T>(0.25), T::zero());
    let mut terms = Vec::new();
    for site in 0..n_sites - 1 {
        terms.push(PauliString::new(quarter, &[(site, Pauli::X), (site + 1, Pauli::X)])?);
        terms.push(PauliString::new(quarter, &[(site, Pauli::Y), (site + 1, Pauli::Y)])?);
    }
    LocalOperator::from_terms(n_sites, terms)
}

/// Site-averaged uniform one-body operator (1/N) Σᵢ σ^letter_i, used as a
/// time-series observable.
pub fn mean_field_observable<T: Real>(n_sites: usize, letter: Pauli) -> Result<LocalOperator<T>> {
    if n_sites == 0 {
        return Err(Error::Domain("operator needs at least one site".into()));
    }
    let coeff = Cplx::new(T::one() / real::<T>(n_sites as f64), T::zero());
    let terms = (0..n_sites)
        .map(|site| PauliString::single(coeff, site, letter))
        .collect();
    LocalOperator::from_terms(n_sites, terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::BasisIndex;

    type C = Cplx<f64>;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn tfi_classical_pair_diagonal() {
        // TFI(J=1, h=0, open, N=2) at all-up: single diagonal element −1.
        let op = build_tfi::<f64>(2, 1.0, 0.0, false).unwrap();
        let s = SpinConfiguration::all_up(2).unwrap();
        let elements = op.connected_elements(&s).unwrap();
        assert_eq!(elements.len(), 1);
        assert_eq!(elements[0].target, s);
        assert_eq!(elements[0].value, c(-1.0, 0.0));
    }

    #[test]
    fn tfi_with_field_has_three_elements() {
        // TFI(J=1, h=0.7, open, N=2) at all-up: diagonal −1 plus two
        // off-diagonal +0.7 at the single-flip targets.
        let op = build_tfi::<f64>(2, 1.0, 0.7, false).unwrap();
        let s = SpinConfiguration::all_up(2).unwrap();
        let elements = op.connected_elements(&s).unwrap();
        assert_eq!(elements.len(), 3);
        for el in &elements {
            if el.target == s {
                assert_eq!(el.value, c(-1.0, 0.0));
            } else {
                assert_eq!(el.value, c(0.7, 0.0));
                assert_eq!(el.target.total_magnetization(), 0);
            }
        }
        let targets: Vec<_> = elements.iter().map(|e| e.target.encode()).collect();
        assert!(targets.contains(&BasisIndex(1)));
        assert!(targets.contains(&BasisIndex(2)));
    }

    #[test]
    fn dense_single_site_paulis() {
        let z = LocalOperator::from_terms(1, vec![PauliString::single(c(1.0, 0.0), 0, Pauli::Z)])
            .unwrap()
            .dense_matrix()
            .unwrap();
        assert_eq!(z[(0, 0)], c(1.0, 0.0));
        assert_eq!(z[(1, 1)], c(-1.0, 0.0));
        assert_eq!(z[(0, 1)], c(0.0, 0.0));

        let x = LocalOperator::from_terms(1, vec![PauliString::single(c(1.0, 0.0), 0, Pauli::X)])
            .unwrap()
            .dense_matrix()
            .unwrap();
        assert_eq!(x[(0, 1)], c(1.0, 0.0));
        assert_eq!(x[(1, 0)], c(1.0, 0.0));
        assert_eq!(x[(0, 0)], c(0.0, 0.0));
    }

    #[test]
    fn y_matrix_element_signs() {
        // ⟨down|Y|up⟩ = i and ⟨up|Y|down⟩ = −i.
        let op = LocalOperator::from_terms(1, vec![PauliString::single(c(1.0, 0.0), 0, Pauli::Y)])
            .unwrap();
        let up = SpinConfiguration::all_up(1).unwrap();
        let down = SpinConfiguration::parse_token("d").unwrap();
        let from_up = op.connected_elements(&up).unwrap();
        assert_eq!(from_up.len(), 1);
        assert_eq!(from_up[0].target, down);
        assert_eq!(from_up[0].value, c(0.0, -1.0)); // ⟨up|Y|down⟩ = −i
        let from_down = op.connected_elements(&down).unwrap();
        assert_eq!(from_down[0].value, c(0.0, 1.0)); // ⟨down|Y|up⟩ = +i
        let dense = op.dense_matrix().unwrap();
        assert_eq!(dense[(0, 1)], from_up[0].value);
        assert_eq!(dense[(1, 0)], from_down[0].value);
    }

    #[test]
    fn canonical_form_merges_and_sorts() {
        let a = PauliString::single(c(0.5, 0.0), 1, Pauli::X);
        let b = PauliString::single(c(0.25, 0.0), 1, Pauli::X);
        let d = PauliString::single(c(1.0, 0.0), 0, Pauli::Z);
        let op = LocalOperator::from_terms(3, vec![a, d.clone(), b]).unwrap();
        assert_eq!(op.terms().len(), 2);
        // Site 0 term sorts first.
        assert_eq!(op.terms()[0], d);
        assert_eq!(op.terms()[1].coefficient(), c(0.75, 0.0));
    }

    #[test]
    fn zero_coefficients_are_dropped() {
        let a = PauliString::single(c(0.5, 0.25), 2, Pauli::Y);
        let b = PauliString::single(c(-0.5, -0.25), 2, Pauli::Y);
        let op = LocalOperator::from_terms(3, vec![a, b]).unwrap();
        assert!(op.terms().is_empty());
    }

    #[test]
    fn hermitian_check_cases() {
        let tfi = build_tfi::<f64>(4, 1.0, 0.5, true).unwrap();
        assert!(tfi.hermitian_check());

        let anti = LocalOperator::from_terms(
            2,
            vec![PauliString::single(c(0.0, 1.0), 0, Pauli::X)],
        )
        .unwrap();
        assert!(!anti.hermitian_check());

        // i·σ⁺₀ = (i X₀ − Y₀)/2; adding its adjoint leaves −Y₀, Hermitian.
        let i_sigma_plus = LocalOperator::from_terms(
            2,
            vec![
                PauliString::single(c(0.0, 0.5), 0, Pauli::X),
                PauliString::single(c(-0.5, 0.0), 0, Pauli::Y),
            ],
        )
        .unwrap();
        let sum = i_sigma_plus.add(&i_sigma_plus.adjoint()).unwrap();
        assert!(sum.hermitian_check());
        assert_eq!(sum.terms().len(), 1);
    }

    #[test]
    fn heisenberg_field_only_pair() {
        let op = build_heisenberg_benchmark::<f64>(2, [0.0, 0.0, 0.0], [0.0, 0.0, 1.0]).unwrap();
        // H = σᶻ₀ + σᶻ₁: diagonal, minimum at both spins down.
        let down = SpinConfiguration::parse_token("dd").unwrap();
        let elements = op.connected_elements(&down).unwrap();
        assert_eq!(elements.len(), 1);
        assert_eq!(elements[0].value, c(-2.0, 0.0));
    }

    #[test]
    fn jw_chain_hops_with_half_amplitude() {
        // ⟨ud|H|du⟩ = −½ for the two-site chain.
        let op = jordan_wigner_free_fermions::<f64>(2).unwrap();
        let ud = SpinConfiguration::parse_token("ud").unwrap();
        let du = SpinConfiguration::parse_token("du").unwrap();
        let elements = op.connected_elements(&ud).unwrap();
        let hop = elements.iter().find(|e| e.target == du).expect("hopping element");
        assert!((hop.value - c(-0.5, 0.0)).norm() < 1e-15);
        // No other off-diagonal connections out of the one-down sector state.
        for el in &elements {
            if el.target != du {
                assert_eq!(el.target, ud);
            }
        }
    }

    #[test]
    fn pauli_products_cover_the_algebra() {
        // XY = iZ, checked densely on one site.
        let x = PauliString::single(c(1.0, 0.0), 0, Pauli::X);
        let y = PauliString::single(c(1.0, 0.0), 0, Pauli::Y);
        let xy = x.multiply(&y);
        assert_eq!(xy.coefficient(), c(0.0, 1.0));
        assert_eq!(xy.factors().next(), Some((0, Pauli::Z)));
        // XX = identity.
        let xx = x.multiply(&x);
        assert_eq!(xx.locality(), 0);
        assert_eq!(xx.coefficient(), c(1.0, 0.0));
    }

    #[test]
    fn text_round_trip() {
        let op = build_heisenberg_benchmark::<f64>(3, [1.0, 0.5, -0.25], [0.1, 0.0, -2.0]).unwrap();
        let text = op.to_text();
        let parsed = LocalOperator::from_text(3, &text).unwrap();
        assert_eq!(op, parsed);
        // A second round trip is byte-stable.
        assert_eq!(text, parsed.to_text());
    }

    #[test]
    fn text_parse_errors() {
        assert!(matches!(
            LocalOperator::<f64>::from_text(2, "1.0\n"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            LocalOperator::<f64>::from_text(2, "1.0 0.0 0:Q\n"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            LocalOperator::<f64>::from_text(2, "1.0 0.0 5:X\n"),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn site_count_guards() {
        assert!(matches!(build_tfi::<f64>(1, 1.0, 0.0, false), Err(Error::Domain(_))));
        assert!(matches!(
            build_heisenberg_benchmark::<f64>(1, [0.0; 3], [0.0; 3]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(jordan_wigner_free_fermions::<f64>(1), Err(Error::Domain(_))));
        let big = build_tfi::<f64>(15, 1.0, 1.0, false).unwrap();
        assert!(matches!(big.dense_matrix(), Err(Error::Capacity(_))));
    }

    #[test]
    fn duplicate_site_in_string_rejected() {
        assert!(matches!(
            PauliString::<f64>::new(c(1.0, 0.0), &[(0, Pauli::X), (0, Pauli::Z)]),
            Err(Error::Domain(_))
        ));
    }
}
