//! Seeded random chains and forms for tests, benches and the CLI.
//!
//! Every generator draws from a ChaCha8 stream, so a seed fixes the output on
//! every platform.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::chains::{DipoleChain, PointedChain, DEFAULT_R_MAX};
use crate::error::Result;
use crate::exterior::{binomial, KVector};
use crate::forms::{FormSpec, Phase, TrigKind};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_point(rng: &mut impl Rng, n: usize, half_width: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-half_width..half_width)).collect()
}

/// Uniform direction on the unit sphere (rejection from the cube).
pub fn random_unit_vector(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    loop {
        let v = random_point(rng, n, 1.0);
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len > 0.1 && len <= 1.0 {
            return v.iter().map(|x| x / len).collect();
        }
    }
}

/// k-vector with independent coefficients in [−1, 1).
pub fn random_kvector(rng: &mut impl Rng, n: usize, k: usize) -> KVector {
    let coeffs = (0..binomial(n, k)).map(|_| rng.gen_range(-1.0..1.0)).collect();
    KVector::new(n, k, coeffs).expect("k ≤ n")
}

/// Wedge of k random vectors, rescaled to the given mass.
pub fn random_simple_kvector(rng: &mut impl Rng, n: usize, k: usize, mass: f64) -> KVector {
    loop {
        let mut a = KVector::scalar(n, 1.0);
        for _ in 0..k {
            a = a.wedge(&KVector::vector(&random_point(rng, n, 1.0))).expect("same dimension");
        }
        let len = a.euclidean_norm();
        if len > 1e-3 {
            return a.scale(mass / len);
        }
    }
}

/// Sum of `atoms` trig atoms with frequencies in [−3, 3)ⁿ and random phases.
pub fn random_trig_form(rng: &mut impl Rng, n: usize, k: usize, atoms: usize) -> FormSpec {
    let mut w = FormSpec::new(n, k).expect("k ≤ n");
    let sets = crate::exterior::basis(n, k);
    for _ in 0..atoms {
        let kind = if rng.gen_bool(0.5) { TrigKind::Sin } else { TrigKind::Cos };
        let phase = Phase { kind, offset: rng.gen_range(-1.0..1.0) };
        let index = sets[rng.gen_range(0..sets.len())].clone();
        w.push_trig(rng.gen_range(-1.0..1.0), random_point(rng, n, 3.0), phase, index).expect("well formed atom");
    }
    w
}

/// Dipole chain whose terms have random orders in `0..=max_order`.
pub fn random_dipole_chain(rng: &mut impl Rng, n: usize, k: usize, terms: usize, max_order: usize) -> DipoleChain {
    let mut a = DipoleChain::new(n, k, DEFAULT_R_MAX.max(max_order + 1)).expect("k ≤ n");
    for _ in 0..terms {
        let order = rng.gen_range(0..=max_order);
        let dirs = (0..order).map(|_| random_point(rng, n, 1.0)).collect();
        let p = random_point(rng, n, 2.0);
        a.push(&p, random_kvector(rng, n, k), dirs).expect("consistent shapes");
    }
    a
}

/// One instance of the duality identity ⟨P_v A, ω⟩ = ⟨A, L_v ω⟩.
#[derive(Clone, Debug)]
pub struct DualityCase {
    pub chain: DipoleChain,
    pub direction: Vec<f64>,
    pub form: FormSpec,
}

/// Random cases in ℝ³ with dipole order ≤ 2 and grades 0..=3.
pub fn duality_cases(seed: u64, count: usize) -> Vec<DualityCase> {
    let mut rng = rng(seed);
    (0..count)
        .map(|_| {
            let k = rng.gen_range(0..=3);
            let terms = rng.gen_range(1..=4);
            let chain = random_dipole_chain(&mut rng, 3, k, terms, 2);
            let direction = random_point(&mut rng, 3, 1.0);
            let atoms = rng.gen_range(1..=3);
            let form = random_trig_form(&mut rng, 3, k, atoms);
            DualityCase { chain, direction, form }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorpusKind {
    /// A single pointed term.
    Point,
    /// Several pointed terms at random positions.
    Cloud,
    /// A first or second difference chain Δ_{t v}(p; α).
    Dipole,
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: String,
    pub kind: CorpusKind,
    pub chain: PointedChain,
}

fn difference(p: &[f64], alpha: &KVector, steps: &[Vec<f64>]) -> Result<PointedChain> {
    let mut a = PointedChain::point(p, alpha.clone())?;
    for s in steps {
        a = a.delta(s)?;
    }
    Ok(a)
}

/// Mixed corpus of 36 pointed chains in ℝ¹–ℝ³: single terms, random clouds,
/// and first and second differences with steps of length 0.05–0.3.
pub fn norm_corpus(seed: u64) -> Vec<CorpusEntry> {
    let mut rng = rng(seed);
    let mut out = Vec::new();
    let grade = |rng: &mut ChaCha8Rng, n: usize| rng.gen_range(0..=n.min(2));
    for i in 0..8 {
        let n = 1 + i % 3;
        let k = grade(&mut rng, n);
        let mass = if i < 4 { 1.0 } else { rng.gen_range(0.2..3.0) };
        let p = random_point(&mut rng, n, 1.0);
        let a = random_simple_kvector(&mut rng, n, k, mass);
        let chain = PointedChain::point(&p, a).expect("valid point");
        out.push(CorpusEntry { name: format!("point-{i}"), kind: CorpusKind::Point, chain });
    }
    for i in 0..14 {
        let n = 1 + i % 3;
        let k = grade(&mut rng, n);
        let terms = rng.gen_range(2..=8);
        let width = if i % 2 == 0 { 0.5 } else { 2.0 };
        let chain = PointedChain::from_terms(
            n,
            k,
            (0..terms).map(|_| (random_point(&mut rng, n, width), random_kvector(&mut rng, n, k))).collect::<Vec<_>>(),
        )
        .expect("consistent shapes");
        out.push(CorpusEntry { name: format!("cloud-{i}"), kind: CorpusKind::Cloud, chain });
    }
    for i in 0..14 {
        let n = 1 + i % 3;
        let k = grade(&mut rng, n);
        let order = if i < 9 { 1 } else { 2 };
        let steps: Vec<Vec<f64>> = (0..order)
            .map(|_| {
                let t = rng.gen_range(0.05..0.3);
                random_unit_vector(&mut rng, n).iter().map(|x| t * x).collect()
            })
            .collect();
        let p = random_point(&mut rng, n, 1.0);
        let alpha = random_simple_kvector(&mut rng, n, k, 1.0);
        let chain = difference(&p, &alpha, &steps).expect("valid steps");
        out.push(CorpusEntry { name: format!("dipole{order}-{i}"), kind: CorpusKind::Dipole, chain });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_reproducible() {
        let a = norm_corpus(7);
        let b = norm_corpus(7);
        assert_eq!(a.len(), 36);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.chain, y.chain);
        }
        assert_ne!(norm_corpus(8)[0].chain, a[0].chain);
        let c = duality_cases(1, 5);
        let d = duality_cases(1, 5);
        for (x, y) in c.iter().zip(&d) {
            assert_eq!(x.chain, y.chain);
            assert_eq!(x.form, y.form);
        }
    }

    #[test]
    fn simple_kvectors_have_requested_mass() {
        let mut r = rng(3);
        for k in 0..=3 {
            let a = random_simple_kvector(&mut r, 3, k, 2.5);
            let m = a.mass();
            assert!(m.exact && (m.value - 2.5).abs() < 1e-12);
        }
    }

    #[test]
    fn duality_cases_shape() {
        for c in duality_cases(11, 20) {
            assert_eq!(c.chain.dim(), 3);
            assert!(c.chain.order() <= 2);
            assert_eq!(c.form.grade(), c.chain.grade());
        }
    }
}
