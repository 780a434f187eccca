//! Species, reactions, reaction networks and the mass-action vector field.

use std::collections::{HashMap, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use thiserror::Error;

use crate::exact::is_positive_integer;
use crate::multipoly::MultiPoly;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("invalid species name {0:?}")]
    InvalidSpeciesName(String),
    #[error("duplicate species {0:?}")]
    DuplicateSpecies(String),
    #[error("unknown species {0:?}")]
    UnknownSpecies(String),
    #[error("rate constant must be positive, got {0}")]
    NonPositiveRate(String),
    #[error("reaction has no net effect")]
    NoOpReaction,
    #[error("reaction vectors have length {got}, network has {expected} species")]
    ReactionArity { expected: usize, got: usize },
    #[error("state has {got} entries, network has {expected} species")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("state entry {index} is negative or not finite")]
    InvalidConcentration { index: usize },
    #[error("species {0:?} occurs in both networks but is not declared shared")]
    UndeclaredCollision(String),
    #[error("shared species {0:?} is missing from one of the networks")]
    SharedSpeciesMissing(String),
}

/// A species name: ASCII alphanumerics and `_`, starting with a letter.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Species(String);

impl Species {
    pub fn new(name: impl Into<String>) -> Result<Self, ModelError> {
        let name = name.into();
        let mut chars = name.chars();
        let ok = chars.next().is_some_and(|c| c.is_ascii_alphabetic())
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
        if ok {
            Ok(Self(name))
        } else {
            Err(ModelError::InvalidSpeciesName(name))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Species {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// `(r, p, k)`: dense reactant and product stoichiometry over the network's species, and a rate constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reaction {
    reactants: Vec<u32>,
    products: Vec<u32>,
    rate: BigRational,
}

impl Reaction {
    pub fn new(reactants: Vec<u32>, products: Vec<u32>, rate: BigRational) -> Result<Self, ModelError> {
        if reactants.len() != products.len() {
            return Err(ModelError::ReactionArity {
                expected: reactants.len(),
                got: products.len(),
            });
        }
        if !rate.is_positive() {
            return Err(ModelError::NonPositiveRate(rate.to_string()));
        }
        if reactants == products {
            return Err(ModelError::NoOpReaction);
        }
        Ok(Self {
            reactants,
            products,
            rate,
        })
    }

    pub fn reactants(&self) -> &[u32] {
        &self.reactants
    }

    pub fn products(&self) -> &[u32] {
        &self.products
    }

    pub fn rate(&self) -> &BigRational {
        &self.rate
    }

    /// `Δ(Y) = p(Y) - r(Y)` for every species.
    pub fn net_effect(&self) -> Vec<i64> {
        self.reactants
            .iter()
            .zip(&self.products)
            .map(|(&r, &p)| i64::from(p) - i64::from(r))
            .collect()
    }

    /// `k · Π y^r(Y)`, with `0^0 = 1`.
    pub fn mass_action_rate<T: Scalar>(&self, state: &[T]) -> Result<T, ModelError> {
        if state.len() != self.reactants.len() {
            return Err(ModelError::DimensionMismatch {
                expected: self.reactants.len(),
                got: state.len(),
            });
        }
        Ok(self.rate_unchecked(T::from_rational(&self.rate), state))
    }

    #[inline]
    fn rate_unchecked<T: Scalar>(&self, k: T, state: &[T]) -> T {
        let mut rate = k;
        for (&r, &y) in self.reactants.iter().zip(state) {
            match r {
                0 => {}
                1 => rate = rate * y,
                _ => rate = rate * y.powi(r as i32),
            }
        }
        rate
    }

    /// Mass-action rate as a polynomial in the species concentrations.
    pub fn symbolic_rate(&self) -> MultiPoly {
        MultiPoly::monomial(self.reactants.len(), self.reactants.clone(), self.rate.clone())
    }

    pub(crate) fn with_rate(&self, rate: BigRational) -> Self {
        Self {
            reactants: self.reactants.clone(),
            products: self.products.clone(),
            rate,
        }
    }

    fn remapped(&self, map: &[usize], n: usize) -> Self {
        let mut reactants = vec![0; n];
        let mut products = vec![0; n];
        for (i, &j) in map.iter().enumerate() {
            reactants[j] = self.reactants[i];
            products[j] = self.products[i];
        }
        Self {
            reactants,
            products,
            rate: self.rate.clone(),
        }
    }
}

/// A nonnegative concentration vector in species order.
#[derive(Debug, Clone, PartialEq)]
pub struct State<T>(Vec<T>);

impl<T: Scalar> State<T> {
    pub fn new(values: Vec<T>) -> Result<Self, ModelError> {
        if let Some(index) = values.iter().position(|v| !v.is_finite() || *v < T::zero()) {
            return Err(ModelError::InvalidConcentration { index });
        }
        Ok(Self(values))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![T::zero(); n])
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<T> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<T> std::ops::Index<usize> for State<T> {
    type Output = T;

    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

/// Reactions whose rate constant is not a positive integer.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IntegralityReport {
    pub violations: Vec<(usize, BigRational)>,
}

impl IntegralityReport {
    pub fn is_integral(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A reaction network `(S, R)` with a fixed species order.
#[derive(Debug, Clone, PartialEq)]
pub struct Crn {
    species: Vec<Species>,
    reactions: Vec<Reaction>,
    // cached floating-point rate constants, parallel to `reactions`
    rates: Vec<f64>,
}

impl Crn {
    pub fn new(species: Vec<Species>, reactions: Vec<Reaction>) -> Result<Self, ModelError> {
        let mut seen = HashSet::new();
        for s in &species {
            if !seen.insert(s.as_str()) {
                return Err(ModelError::DuplicateSpecies(s.0.clone()));
            }
        }
        for r in &reactions {
            if r.reactants.len() != species.len() {
                return Err(ModelError::ReactionArity {
                    expected: species.len(),
                    got: r.reactants.len(),
                });
            }
        }
        let rates = reactions
            .iter()
            .map(|r| r.rate.to_f64().unwrap_or(f64::NAN))
            .collect();
        Ok(Self {
            species,
            reactions,
            rates,
        })
    }

    pub fn builder() -> CrnBuilder {
        CrnBuilder::default()
    }

    pub fn species(&self) -> &[Species] {
        &self.species
    }

    pub fn species_names(&self) -> Vec<&str> {
        self.species.iter().map(Species::as_str).collect()
    }

    pub fn num_species(&self) -> usize {
        self.species.len()
    }

    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.species.iter().position(|s| s.as_str() == name)
    }

    pub fn check_state<T: Scalar>(&self, state: &[T]) -> Result<(), ModelError> {
        if state.len() != self.species.len() {
            return Err(ModelError::DimensionMismatch {
                expected: self.species.len(),
                got: state.len(),
            });
        }
        Ok(())
    }

    /// `dy/dt = Σ_ρ Δρ(Y) · rate_ρ` for every species.
    pub fn vector_field<T: Scalar>(&self, state: &[T]) -> Result<Vec<T>, ModelError> {
        self.check_state(state)?;
        let mut out = vec![T::zero(); state.len()];
        self.vector_field_into(state, &mut out);
        Ok(out)
    }

    /// Unchecked variant writing into `out`; both slices must have one entry per species.
    pub fn vector_field_into<T: Scalar>(&self, state: &[T], out: &mut [T]) {
        debug_assert_eq!(state.len(), self.species.len());
        out.iter_mut().for_each(|v| *v = T::zero());
        for (reaction, &k) in self.reactions.iter().zip(&self.rates) {
            let rate = reaction.rate_unchecked(T::lit(k), state);
            for (i, (&r, &p)) in reaction.reactants.iter().zip(&reaction.products).enumerate() {
                if r != p {
                    let delta = T::lit(f64::from(p) - f64::from(r));
                    out[i] = out[i] + delta * rate;
                }
            }
        }
    }

    /// The vector field as exact polynomials, one per species.
    pub fn symbolic_vector_field(&self) -> Vec<MultiPoly> {
        let n = self.species.len();
        let mut field = vec![MultiPoly::zero(n); n];
        for reaction in &self.reactions {
            let rate = reaction.symbolic_rate();
            for (i, d) in reaction.net_effect().into_iter().enumerate() {
                if d != 0 {
                    field[i] = field[i].add(&rate.scale(&BigRational::from_integer(BigInt::from(d))));
                }
            }
        }
        field
    }

    /// Lists every reaction whose rate constant is not a positive integer.
    pub fn validate_integral(&self) -> IntegralityReport {
        IntegralityReport {
            violations: self
                .reactions
                .iter()
                .enumerate()
                .filter(|(_, r)| !is_positive_integer(&r.rate))
                .map(|(i, r)| (i, r.rate.clone()))
                .collect(),
        }
    }

    /// Merges two networks that overlap exactly on `shared`.
    ///
    /// Species keep `self`'s order, followed by the new species of `other`.
    pub fn disjoint_union(&self, other: &Crn, shared: &[&str]) -> Result<Crn, ModelError> {
        for name in shared {
            if self.index_of(name).is_none() || other.index_of(name).is_none() {
                return Err(ModelError::SharedSpeciesMissing((*name).to_string()));
            }
        }
        let mut species = self.species.clone();
        let mut map = Vec::with_capacity(other.species.len());
        for s in &other.species {
            match self.index_of(s.as_str()) {
                Some(i) if shared.contains(&s.as_str()) => map.push(i),
                Some(_) => return Err(ModelError::UndeclaredCollision(s.0.clone())),
                None => {
                    map.push(species.len());
                    species.push(s.clone());
                }
            }
        }
        let n = species.len();
        let mut reactions: Vec<Reaction> = self
            .reactions
            .iter()
            .map(|r| {
                let identity: Vec<usize> = (0..r.reactants.len()).collect();
                r.remapped(&identity, n)
            })
            .collect();
        reactions.extend(other.reactions.iter().map(|r| r.remapped(&map, n)));
        Crn::new(species, reactions)
    }

    /// Same network with species renamed position by position.
    pub fn renamed(&self, names: Vec<Species>) -> Result<Crn, ModelError> {
        if names.len() != self.species.len() {
            return Err(ModelError::DimensionMismatch {
                expected: self.species.len(),
                got: names.len(),
            });
        }
        Crn::new(names, self.reactions.clone())
    }

    /// Every rate constant multiplied by `factor`.
    pub fn with_scaled_rates(&self, factor: &BigRational) -> Crn {
        let reactions = self
            .reactions
            .iter()
            .map(|r| r.with_rate(&r.rate * factor))
            .collect();
        Crn::new(self.species.clone(), reactions).expect("same species")
    }

    /// Appends reactions given as `(reactants, products, rate)` over species names,
    /// adding any unknown species at the end.
    pub fn extended(&self, extra: CrnBuilder) -> Result<Crn, ModelError> {
        let mut builder = CrnBuilder {
            species: self.species.clone(),
            reactions: Vec::new(),
        };
        for r in &self.reactions {
            let reactants = named_side(&self.species, &r.reactants);
            let products = named_side(&self.species, &r.products);
            builder.reactions.push((reactants, products, r.rate.clone()));
        }
        for s in extra.species {
            if !builder.species.contains(&s) {
                builder.species.push(s);
            }
        }
        builder.reactions.extend(extra.reactions);
        builder.build()
    }
}

fn named_side(species: &[Species], counts: &[u32]) -> Vec<(String, u32)> {
    species
        .iter()
        .zip(counts)
        .filter(|(_, &c)| c > 0)
        .map(|(s, &c)| (s.0.clone(), c))
        .collect()
}

type NamedSide = Vec<(String, u32)>;

/// Incremental construction of a [`Crn`] by species name.
#[derive(Debug, Clone, Default)]
pub struct CrnBuilder {
    species: Vec<Species>,
    reactions: Vec<(NamedSide, NamedSide, BigRational)>,
}

impl CrnBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares a species; later declarations of the same name are ignored.
    pub fn species(mut self, name: &str) -> Result<Self, ModelError> {
        let s = Species::new(name)?;
        if !self.species.contains(&s) {
            self.species.push(s);
        }
        Ok(self)
    }

    /// Adds a reaction; species are declared on first mention (reactants, then products).
    pub fn reaction(
        mut self,
        reactants: &[(&str, u32)],
        products: &[(&str, u32)],
        rate: BigRational,
    ) -> Result<Self, ModelError> {
        for (name, _) in reactants.iter().chain(products) {
            self = self.species(name)?;
        }
        let own = |side: &[(&str, u32)]| side.iter().map(|(n, c)| ((*n).to_string(), *c)).collect();
        self.reactions.push((own(reactants), own(products), rate));
        Ok(self)
    }

    pub fn build(self) -> Result<Crn, ModelError> {
        let index: HashMap<&str, usize> = self
            .species
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        let n = self.species.len();
        let dense = |side: &[(String, u32)]| -> Result<Vec<u32>, ModelError> {
            let mut v = vec![0u32; n];
            for (name, c) in side {
                let i = *index
                    .get(name.as_str())
                    .ok_or_else(|| ModelError::UnknownSpecies(name.clone()))?;
                v[i] += c;
            }
            Ok(v)
        };
        let mut reactions = Vec::with_capacity(self.reactions.len());
        for (r, p, k) in &self.reactions {
            reactions.push(Reaction::new(dense(r)?, dense(p)?, k.clone())?);
        }
        Crn::new(self.species.clone(), reactions)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, ratio};

    fn catalytic() -> Crn {
        // X + Z -> 2Y + Z
        Crn::builder()
            .reaction(&[("X", 1), ("Z", 1)], &[("Y", 2), ("Z", 1)], int(3))
            .unwrap()
            .build()
            .unwrap()
    }

    #[test]
    fn species_names() {
        assert!(Species::new("X_1").is_ok());
        assert!(Species::new("1X").is_err());
        assert!(Species::new("").is_err());
        assert!(Species::new("a-b").is_err());
    }

    #[test]
    fn net_effects() {
        let crn = catalytic();
        assert_eq!(crn.species_names(), vec!["X", "Z", "Y"]);
        assert_eq!(crn.reactions()[0].net_effect(), vec![-1, 0, 2]);

        let birth = Reaction::new(vec![0], vec![1], int(1)).unwrap();
        assert_eq!(birth.net_effect(), vec![1]);
        let dimer = Reaction::new(vec![2], vec![1], int(2)).unwrap();
        assert_eq!(dimer.net_effect(), vec![-1]);
    }

    #[test]
    fn rates() {
        let r = Reaction::new(vec![1, 1], vec![0, 0], int(1)).unwrap();
        assert!((r.mass_action_rate(&[0.5f64, 0.4]).unwrap() - 0.2).abs() < 1e-15);
        let birth = Reaction::new(vec![0], vec![1], int(3)).unwrap();
        assert_eq!(birth.mass_action_rate(&[123.0f64]).unwrap(), 3.0);
        assert_eq!(birth.mass_action_rate(&[0.0f64]).unwrap(), 3.0);
        let dimer = Reaction::new(vec![2], vec![1], int(2)).unwrap();
        assert_eq!(dimer.mass_action_rate(&[0.5f64]).unwrap(), 0.5);
        assert!(matches!(
            dimer.mass_action_rate(&[0.5f64, 1.0]),
            Err(ModelError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn reaction_validation() {
        assert!(matches!(
            Reaction::new(vec![1], vec![1], int(1)),
            Err(ModelError::NoOpReaction)
        ));
        assert!(matches!(
            Reaction::new(vec![1], vec![0], int(0)),
            Err(ModelError::NonPositiveRate(_))
        ));
        assert!(matches!(
            Reaction::new(vec![1], vec![0], int(-2)),
            Err(ModelError::NonPositiveRate(_))
        ));
    }

    #[test]
    fn vector_fields() {
        // 0 -> aX, X -> 0 with a=3, b=2
        let crn = Crn::builder()
            .reaction(&[], &[("X", 1)], int(3))
            .unwrap()
            .reaction(&[("X", 1)], &[], int(2))
            .unwrap()
            .build()
            .unwrap();
        assert_eq!(crn.vector_field(&[0.5f64]).unwrap(), vec![2.0]);

        let crn = Crn::builder()
            .reaction(&[], &[("X", 1)], int(1))
            .unwrap()
            .reaction(&[("X", 2)], &[("X", 1)], int(2))
            .unwrap()
            .build()
            .unwrap();
        assert_eq!(crn.vector_field(&[0.5f64]).unwrap(), vec![0.5]);

        let empty = Crn::builder().species("X").unwrap().species("Y").unwrap().build().unwrap();
        assert_eq!(empty.vector_field(&[0.3f64, 7.0]).unwrap(), vec![0.0, 0.0]);
        assert!(empty.vector_field(&[0.3f64]).is_err());
    }

    #[test]
    fn symbolic_fields() {
        let crn = Crn::builder()
            .reaction(&[], &[("X", 1)], int(2))
            .unwrap()
            .reaction(&[("X", 2)], &[("X", 1)], int(1))
            .unwrap()
            .build()
            .unwrap();
        let f = crn.symbolic_vector_field();
        assert_eq!(f[0].format_with(&["x"]), "-x^2 + 2");
        assert!(f[0].is_kinetic_in(0));
    }

    #[test]
    fn integrality() {
        let ok = Crn::builder()
            .reaction(&[], &[("X", 1)], int(1))
            .unwrap()
            .reaction(&[("X", 1)], &[], int(3))
            .unwrap()
            .build()
            .unwrap();
        assert!(ok.validate_integral().is_integral());
        let bad = Crn::builder()
            .reaction(&[], &[("X", 1)], int(1))
            .unwrap()
            .reaction(&[("X", 1)], &[], ratio(3, 2))
            .unwrap()
            .build()
            .unwrap();
        let report = bad.validate_integral();
        assert_eq!(report.violations, vec![(1, ratio(3, 2))]);
    }

    #[test]
    fn unions() {
        let a = Crn::builder().species("X").unwrap().build().unwrap();
        let b = Crn::builder().species("Y").unwrap().build().unwrap();
        assert_eq!(a.disjoint_union(&b, &[]).unwrap().species_names(), vec!["X", "Y"]);
        let bx = Crn::builder()
            .species("X")
            .unwrap()
            .species("Y")
            .unwrap()
            .build()
            .unwrap();
        assert_eq!(a.disjoint_union(&bx, &["X"]).unwrap().species_names(), vec!["X", "Y"]);
        assert_eq!(
            a.disjoint_union(&a, &[]),
            Err(ModelError::UndeclaredCollision("X".into()))
        );
        assert_eq!(
            a.disjoint_union(&b, &["Z"]),
            Err(ModelError::SharedSpeciesMissing("Z".into()))
        );
    }

    #[test]
    fn union_preserves_restricted_field() {
        let a = catalytic();
        let b = Crn::builder()
            .reaction(&[("Y", 1)], &[("Y", 1), ("W", 1)], int(1))
            .unwrap()
            .reaction(&[("W", 1)], &[], int(1))
            .unwrap()
            .build()
            .unwrap();
        let merged = a.disjoint_union(&b, &["Y"]).unwrap();
        let state = [0.3f64, 0.7, 1.1, 0.0];
        let fa = a.vector_field(&state[..3]).unwrap();
        let fm = merged.vector_field(&state).unwrap();
        assert_eq!(&fm[..3], &fa[..]);
    }
}
