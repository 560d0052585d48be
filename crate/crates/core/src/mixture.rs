//! Two-component mixtures sharing a common component:
//! `p1 = l1 pt1 + (1 - l1) q` and `p2 = l2 pt2 + (1 - l2) q`.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pmf::{blend, js_of, support, Alphabet, Pmf, Weight};

/// The distinguishing components `pt1`, `pt2`, the common component `q`, and
/// the two mixture proportions.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureScenario {
    p_tilde_1: Pmf,
    p_tilde_2: Pmf,
    q: Pmf,
    lambda_1: Weight,
    lambda_2: Weight,
}

impl MixtureScenario {
    pub fn new(
        p_tilde_1: Pmf,
        p_tilde_2: Pmf,
        q: Pmf,
        lambda_1: Weight,
        lambda_2: Weight,
    ) -> Result<Self> {
        p_tilde_1.check_alphabet(&p_tilde_2)?;
        p_tilde_1.check_alphabet(&q)?;
        Ok(Self {
            p_tilde_1,
            p_tilde_2,
            q,
            lambda_1,
            lambda_2,
        })
    }

    /// Same components, new proportions.
    pub fn with_lambdas(&self, lambda_1: Weight, lambda_2: Weight) -> Self {
        Self {
            lambda_1,
            lambda_2,
            ..self.clone()
        }
    }

    /// Exchanges `(pt1, l1)` with `(pt2, l2)`.
    pub fn swapped(&self) -> Self {
        Self {
            p_tilde_1: self.p_tilde_2.clone(),
            p_tilde_2: self.p_tilde_1.clone(),
            q: self.q.clone(),
            lambda_1: self.lambda_2,
            lambda_2: self.lambda_1,
        }
    }

    pub fn p_tilde_1(&self) -> &Pmf {
        &self.p_tilde_1
    }

    pub fn p_tilde_2(&self) -> &Pmf {
        &self.p_tilde_2
    }

    pub fn q(&self) -> &Pmf {
        &self.q
    }

    pub fn lambda_1(&self) -> Weight {
        self.lambda_1
    }

    pub fn lambda_2(&self) -> Weight {
        self.lambda_2
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        self.q.alphabet()
    }

    pub(crate) fn p1_mass(&self) -> Vec<f64> {
        blend(self.p_tilde_1.mass(), self.q.mass(), self.lambda_1.get())
    }

    pub(crate) fn p2_mass(&self) -> Vec<f64> {
        blend(self.p_tilde_2.mass(), self.q.mass(), self.lambda_2.get())
    }
}

pub fn build_p1(s: &MixtureScenario) -> Pmf {
    Pmf::from_parts_unchecked(s.alphabet().clone(), s.p1_mass())
}

pub fn build_p2(s: &MixtureScenario) -> Pmf {
    Pmf::from_parts_unchecked(s.alphabet().clone(), s.p2_mass())
}

/// Midpoint `p_M = (p1 + p2) / 2`.
pub fn build_pm(s: &MixtureScenario) -> Pmf {
    let mass = blend(&s.p1_mass(), &s.p2_mass(), 0.5);
    Pmf::from_parts_unchecked(s.alphabet().clone(), mass)
}

/// `p_M` in its expanded form `l1/2 pt1 + l2/2 pt2 + (2 - l1 - l2)/2 q`.
pub fn build_pm_expanded(s: &MixtureScenario) -> Pmf {
    let (l1, l2) = (s.lambda_1.get(), s.lambda_2.get());
    let wq = (2.0 - l1 - l2) / 2.0;
    let mass = s
        .p_tilde_1
        .mass()
        .iter()
        .zip(s.p_tilde_2.mass())
        .zip(s.q.mass())
        .map(|((&a, &b), &c)| l1 / 2.0 * a + l2 / 2.0 * b + wq * c)
        .collect();
    Pmf::from_parts_unchecked(s.alphabet().clone(), mass)
}

/// Symmetric JS divergence between the two mixtures.
pub fn scenario_sjsd(s: &MixtureScenario) -> f64 {
    js_of(&s.p1_mass(), &s.p2_mass(), Weight::HALF)
}

/// True iff neither distinguishing component shares a symbol with `q`.
pub fn supports_disjoint(s: &MixtureScenario) -> bool {
    let q = support(&s.q);
    support(&s.p_tilde_1).is_disjoint(&q) && support(&s.p_tilde_2).is_disjoint(&q)
}

/// Two-term split of the symmetric JS divergence under disjoint supports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DisjointDecomposition {
    /// Symmetric JS between the Bernoulli pairs `(l1, 1 - l1)` and `(l2, 1 - l2)`.
    pub proportion_term: f64,
    /// `(l1 + l2)/2 * JS(pt1, pt2; l1 / (l1 + l2))`.
    pub content_term: f64,
    pub total: f64,
}

/// Decomposes the symmetric JS divergence of a disjoint-support scenario.
///
/// At `l1 = l2 = 0` the content weight is `0/0`; the content term is 0 there.
pub fn disjoint_decomposition(s: &MixtureScenario) -> Result<DisjointDecomposition> {
    if !supports_disjoint(s) {
        return Err(Error::SupportsNotDisjoint);
    }
    let (l1, l2) = (s.lambda_1, s.lambda_2);
    let proportion_term = js_of(
        &[l1.get(), l1.complement()],
        &[l2.get(), l2.complement()],
        Weight::HALF,
    );
    let total_lambda = l1.get() + l2.get();
    let content_term = if total_lambda > 0.0 {
        let pi = Weight::new((l1.get() / total_lambda).min(1.0))?;
        total_lambda / 2.0 * js_of(s.p_tilde_1.mass(), s.p_tilde_2.mass(), pi)
    } else {
        0.0
    };
    Ok(DisjointDecomposition {
        proportion_term,
        content_term,
        total: proportion_term + content_term,
    })
}

/// The six-face running example: `pt1 = (1,0,0,0,0,0)`,
/// `pt2 = (1-e, e, 0,0,0,0)`, `q = (0.5, 0.4, 0.025 x 4)` on `{1..6}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonFamily {
    epsilon: f64,
}

impl EpsilonFamily {
    pub const DEFAULT_EPSILON: f64 = 0.3;

    pub fn new(epsilon: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&epsilon) {
            Ok(Self { epsilon })
        } else {
            Err(Error::InvalidArgument(format!(
                "epsilon {epsilon} outside [0, 1]"
            )))
        }
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    fn alphabet() -> Arc<Alphabet> {
        Arc::new(Alphabet::indexed(6).expect("six labels"))
    }

    fn distinguishing(&self, alphabet: &Arc<Alphabet>) -> (Pmf, Pmf) {
        let e = self.epsilon;
        (
            Pmf::from_parts_unchecked(alphabet.clone(), vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
            Pmf::from_parts_unchecked(alphabet.clone(), vec![1.0 - e, e, 0.0, 0.0, 0.0, 0.0]),
        )
    }

    /// `(pt1, pt2, q)`.
    pub fn triple(&self) -> (Pmf, Pmf, Pmf) {
        let ab = Self::alphabet();
        let (a, b) = self.distinguishing(&ab);
        let q = Pmf::from_parts_unchecked(ab, vec![0.5, 0.4, 0.025, 0.025, 0.025, 0.025]);
        (a, b, q)
    }

    /// Same distinguishing components, `q` uniform on `{3, 4, 5, 6}`.
    pub fn disjoint_triple(&self) -> (Pmf, Pmf, Pmf) {
        let ab = Self::alphabet();
        let (a, b) = self.distinguishing(&ab);
        let q = Pmf::from_parts_unchecked(ab, vec![0.0, 0.0, 0.25, 0.25, 0.25, 0.25]);
        (a, b, q)
    }

    pub fn scenario(&self, lambda_1: Weight, lambda_2: Weight) -> MixtureScenario {
        let (a, b, q) = self.triple();
        MixtureScenario {
            p_tilde_1: a,
            p_tilde_2: b,
            q,
            lambda_1,
            lambda_2,
        }
    }

    pub fn disjoint_scenario(&self, lambda_1: Weight, lambda_2: Weight) -> MixtureScenario {
        let (a, b, q) = self.disjoint_triple();
        MixtureScenario {
            p_tilde_1: a,
            p_tilde_2: b,
            q,
            lambda_1,
            lambda_2,
        }
    }
}

impl Default for EpsilonFamily {
    fn default() -> Self {
        Self {
            epsilon: Self::DEFAULT_EPSILON,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pmf::sym_js;
    use std::f64::consts::LN_2;

    fn w(x: f64) -> Weight {
        Weight::new(x).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn table1_values_are_exact() {
        let (a, b, q) = EpsilonFamily::new(0.3).unwrap().triple();
        assert_eq!(a.mass(), &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(b.mass(), &[0.7, 0.3, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(q.mass(), &[0.5, 0.4, 0.025, 0.025, 0.025, 0.025]);
        assert!(EpsilonFamily::new(1.5).is_err());
    }

    #[test]
    fn mixtures_at_the_extremes() {
        let fam = EpsilonFamily::default();
        let s0 = fam.scenario(w(0.0), w(1.0));
        assert_eq!(build_p1(&s0), *s0.q());
        assert_eq!(build_p2(&s0), *s0.p_tilde_2());
        let s1 = fam.scenario(w(1.0), w(0.0));
        assert_eq!(build_p1(&s1), *s1.p_tilde_1());
    }

    #[test]
    fn table1_p1_and_pm() {
        let s = EpsilonFamily::default().scenario(w(0.3), w(0.7));
        assert!(close(
            build_p1(&s).mass(),
            &[0.65, 0.28, 0.0175, 0.0175, 0.0175, 0.0175],
            1e-15
        ));
        // p2 = (0.64, 0.33, 0.0075 x 4) by hand; p_M is the average
        assert!(close(
            build_pm(&s).mass(),
            &[0.645, 0.305, 0.0125, 0.0125, 0.0125, 0.0125],
            1e-15
        ));
        assert!(close(
            build_pm(&s).mass(),
            build_pm_expanded(&s).mass(),
            1e-15
        ));
    }

    #[test]
    fn pm_degenerate_cases() {
        let fam = EpsilonFamily::default();
        let s = fam.scenario(w(0.0), w(0.0));
        assert_eq!(build_pm(&s), *s.q());
        let q = s.q().clone();
        let same = MixtureScenario::new(q.clone(), q.clone(), q.clone(), w(0.2), w(0.9)).unwrap();
        assert!(close(build_pm(&same).mass(), q.mass(), 1e-15));
    }

    #[test]
    fn sjsd_examples() {
        let fam = EpsilonFamily::default();
        assert_eq!(scenario_sjsd(&fam.scenario(w(0.0), w(0.0))), 0.0);
        let (a, _, q) = fam.triple();
        let s = MixtureScenario::new(a.clone(), a, q, w(0.4), w(0.4)).unwrap();
        assert_eq!(scenario_sjsd(&s), 0.0);
        // 40-digit entropy-form oracle
        let v = scenario_sjsd(&fam.scenario(w(0.3), w(0.7)));
        assert!((v - 0.005_159_264_528_737_035).abs() < 1e-15, "{v}");
    }

    #[test]
    fn disjointness() {
        let fam = EpsilonFamily::default();
        assert!(!supports_disjoint(&fam.scenario(w(0.5), w(0.5))));
        assert!(supports_disjoint(&fam.disjoint_scenario(w(0.5), w(0.5))));
        let (a, b, _) = fam.triple();
        let s = MixtureScenario::new(a.clone(), b, a, w(0.5), w(0.5)).unwrap();
        assert!(!supports_disjoint(&s));
        assert_eq!(disjoint_decomposition(&s), Err(Error::SupportsNotDisjoint));
    }

    #[test]
    fn decomposition_corner_cases() {
        let fam = EpsilonFamily::default();
        let d = disjoint_decomposition(&fam.disjoint_scenario(w(1.0), w(0.0))).unwrap();
        assert!((d.total - LN_2).abs() < 1e-12);

        let (a, b, _) = fam.disjoint_triple();
        let js = sym_js(&a, &b).unwrap();
        for l in [0.0, 0.1, 0.45, 1.0] {
            let s = fam.disjoint_scenario(w(l), w(l));
            let d = disjoint_decomposition(&s).unwrap();
            assert!((d.total - l * js).abs() < 1e-12);
            assert!((d.total - scenario_sjsd(&s)).abs() < 1e-12);
        }

        let d00 = disjoint_decomposition(&fam.disjoint_scenario(w(0.0), w(0.0))).unwrap();
        assert_eq!(
            (d00.proportion_term, d00.content_term, d00.total),
            (0.0, 0.0, 0.0)
        );

        let (a, _, q) = fam.disjoint_triple();
        let s = MixtureScenario::new(a.clone(), a, q, w(0.2), w(0.9)).unwrap();
        let d = disjoint_decomposition(&s).unwrap();
        assert_eq!(d.content_term, 0.0);
        assert_eq!(d.total, d.proportion_term);
        assert!((d.total - scenario_sjsd(&s)).abs() < 1e-12);
    }

    #[test]
    fn mixed_alphabets_rejected() {
        let a = Pmf::from_masses(vec![1.0, 0.0]).unwrap();
        let q = Pmf::from_masses(vec![0.2, 0.2, 0.6]).unwrap();
        assert_eq!(
            MixtureScenario::new(a.clone(), a, q, w(0.1), w(0.1)),
            Err(Error::AlphabetMismatch)
        );
    }
}
