//! A compact property suite over the whole library. Each check compares a
//! computed quantity against a threshold and reports the comparison.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dirichlet::{
    boundedness_ratio, operator_pairing, pairing_rule, sobolev_norm, AdjointGenerator, SymmetricGenerator,
};
use crate::error::Result;
use crate::fourier::{fourier_transform, plancherel_norm, BandLimitedFunction};
use crate::generators::{
    subordinated_symbol, BernsteinFunction, CourregeHuntCharacteristics, HaarJump, HuntCharacteristics, JumpIntensity,
    LevyMeasure, PseudoPoissonSpec, SDESpec, StateDependentShift,
};
use crate::group::{exp_map, GroupKind, LieAlgebraVector};
use crate::linalg::{mat_solve, ComplexMatrix};
use crate::quadrature::{haar_quadrature, QuadratureRule};
use crate::repr::{irreps_up_to, rep_derivative, IrrepId};
use crate::semigroup::{
    generator_from_semigroup, resolvent_symbol, semigroup_defect, ResolventQuadrature, Stencil, SymbolFamily,
};
use crate::simulate::{empirical_symbol, simulate, ProcessSpec};
use crate::symbol::{symbol_from_operator, Identity, LeftInvariantField, Symbol};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Below,
    #[serde(rename = ">")]
    Above,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Below => "<",
            Relation::Above => ">",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    pub fn below(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            relation: Relation::Below,
            threshold,
            pass: value < threshold,
        }
    }

    pub fn above(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            relation: Relation::Above,
            threshold,
            pass: value > threshold,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}: {:.3e} {} {:.3e}",
            if self.pass { "pass" } else { "FAIL" },
            self.name,
            self.value,
            self.relation,
            self.threshold
        )
    }
}

fn worst<I: IntoIterator<Item = Result<f64>>>(it: I) -> Result<f64> {
    it.into_iter().try_fold(0.0f64, |m, x| Ok(m.max(x?)))
}

fn roundtrip(kind: GroupKind, band: u32, rng: &mut ChaCha8Rng) -> Result<f64> {
    let f = BandLimitedFunction::random(kind, band, 0.9, false, rng);
    let q = haar_quadrature(kind, QuadratureRule::resolution_for_band(kind, 2 * band))?;
    let back = BandLimitedFunction::new(fourier_transform(|g| f.eval(g).expect("in band"), &q, band, Some(band))?);
    worst((0..50).map(|_| {
        let g = kind.random_haar(rng);
        Ok((back.eval(&g)? - f.eval(&g)?).norm())
    }))
}

fn plancherel_gap(kind: GroupKind, band: u32, rng: &mut ChaCha8Rng) -> Result<f64> {
    let f = BandLimitedFunction::random(kind, band, 0.9, false, rng);
    let q = haar_quadrature(kind, QuadratureRule::resolution_for_band(kind, 2 * band))?;
    let quad = q.integrate(|g| f.eval(g).map(|z| z.norm_sqr()).unwrap_or(f64::NAN)).sqrt();
    Ok((plancherel_norm(f.coeffs()) - quad).abs())
}

fn field_symbol_gap(kind: GroupKind, cutoff: u32) -> Result<f64> {
    let irreps = irreps_up_to(kind, cutoff);
    let grid: Vec<_> = haar_quadrature(kind, 3)?.nodes.into_iter().step_by(5).collect();
    let id = symbol_from_operator(&Identity(kind), &irreps, &grid)?;
    let mut gap = id.max_distance(&Symbol::identity(kind, cutoff), &grid)?;
    for k in 0..kind.dim() {
        let x = LieAlgebraVector::basis(kind.dim(), k);
        let op = LeftInvariantField { kind, x: x.clone() };
        let ex = symbol_from_operator(&op, &irreps, &grid)?;
        for p in &irreps {
            let exact = rep_derivative(p, &x)?;
            for g in &grid {
                gap = gap.max(ex.eval(g, p)?.frobenius_distance(&exact));
            }
        }
    }
    Ok(gap)
}

fn hunt_families() -> Result<Vec<SymbolFamily>> {
    let atoms = |kind| -> Result<LevyMeasure> {
        let x = LieAlgebraVector::basis(GroupKind::dim(kind), 0).scale(0.7);
        LevyMeasure::atomic(vec![(exp_map(kind, &x)?, 0.5), (exp_map(kind, &x.scale(-1.0))?, 0.5)])
    };
    let chars = [
        HuntCharacteristics::heat(GroupKind::Torus(1), 1.0)?,
        HuntCharacteristics::heat(GroupKind::SU2, 1.0)?,
        HuntCharacteristics::pure_jump(GroupKind::SU2, atoms(GroupKind::SU2)?)?,
        HuntCharacteristics::drift(GroupKind::SU2, vec![0.3, -0.2, 0.5])?,
    ];
    chars
        .iter()
        .map(|c| SymbolFamily::matrix_exp(c.generator()?.symbol(4)?))
        .collect()
}

fn shift_defect() -> Result<(f64, f64)> {
    let spec = PseudoPoissonSpec::new(2.0, std::sync::Arc::new(StateDependentShift::sine(1.0, 1.0)))?;
    let fam = SymbolFamily::pseudo_poisson(&spec, 3);
    let (s, t) = (0.3, 0.3);
    let mut defect = 0.0f64;
    let mut noise = 0.0f64;
    for p in fam.irreps() {
        defect = defect.max(semigroup_defect(&fam, s, t, &p)?);
        noise = noise.max(fam.noise_floor(s + t, &p)? + fam.noise_floor(s, &p)? + fam.noise_floor(t, &p)?);
    }
    Ok((defect, noise.max(f64::EPSILON)))
}

fn courrege_instance(kind: GroupKind) -> Result<CourregeHuntCharacteristics> {
    let n = kind.dim();
    let wave = crate::experiment::fundamental_wave(kind);
    let field = BandLimitedFunction::constant(kind, 1.0).add(&wave.scale(0.5));
    let zero = BandLimitedFunction::zero(kind);
    let a = (0..n)
        .map(|i| (0..n).map(|j| if i == j { field.clone() } else { zero.clone() }).collect())
        .collect();
    let b = (0..n).map(|i| field.derivative(i).real_part()).collect();
    let x = LieAlgebraVector::basis(n, 0).scale(0.7);
    let rho = LevyMeasure::atomic(vec![(exp_map(kind, &x)?, 0.4), (exp_map(kind, &x.scale(-1.0))?, 0.4)])?;
    CourregeHuntCharacteristics::new(kind, b, a, rho, JumpIntensity::constant(kind, 1.0))
}

/// Runs the suite with random inputs drawn from `seed`.
pub fn suite(seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t1 = GroupKind::Torus(1);
    let su2 = GroupKind::SU2;
    let mut out = Vec::new();

    out.push(Check::below(
        "fourier roundtrip",
        roundtrip(t1, 16, &mut rng)?.max(roundtrip(su2, 8, &mut rng)?),
        1e-9,
    ));
    out.push(Check::below(
        "plancherel vs quadrature",
        plancherel_gap(t1, 16, &mut rng)?.max(plancherel_gap(su2, 8, &mut rng)?),
        1e-9,
    ));
    out.push(Check::below(
        "identity and field symbols",
        field_symbol_gap(t1, 4)?.max(field_symbol_gap(su2, 4)?),
        1e-9,
    ));

    let fams = hunt_families()?;
    let mut law = 0.0f64;
    for fam in &fams {
        for p in fam.irreps() {
            for (s, t) in [(0.1, 0.1), (0.1, 0.3), (0.3, 0.1), (0.3, 0.3)] {
                law = law.max(semigroup_defect(fam, s, t, &p)?);
            }
        }
    }
    out.push(Check::below("semigroup law", law, 1e-10));

    let e = su2.identity();
    let heat = HuntCharacteristics::heat(su2, 1.0)?.generator()?;
    let rel = worst(irreps_up_to(su2, 4).into_iter().filter(|p| !p.is_trivial()).map(|p| {
        let est = generator_from_semigroup(&fams[1], &e, &p, 1e-3, Stencil::default())?;
        let j = heat.symbol_matrix(&p)?;
        Ok(est.j.frobenius_distance(&j) / j.frobenius_norm())
    }))?;
    out.push(Check::below("generator recovery", rel, 1e-5));

    let res = worst([0.5, 1.0, 2.0].into_iter().map(|lambda| {
        let r = resolvent_symbol(&fams[1], lambda, ResolventQuadrature::default())?;
        worst(irreps_up_to(su2, 4).into_iter().map(|p| {
            let j = heat.symbol_matrix(&p)?;
            let direct = mat_solve(&(&ComplexMatrix::identity(p.dim()).scale_real(lambda) - &j), &ComplexMatrix::identity(p.dim()))?.x;
            Ok(r.eval(&e, &p)?.frobenius_distance(&direct))
        }))
    }))?;
    out.push(Check::below("resolvent", res, 1e-6));

    let haar = PseudoPoissonSpec::new(1.5, std::sync::Arc::new(HaarJump::new(haar_quadrature(su2, 6)?)))?;
    let hfam = SymbolFamily::pseudo_poisson(&haar, 3);
    let hd = worst(hfam.irreps().into_iter().map(|p| semigroup_defect(&hfam, 0.3, 0.3, &p)))?;
    out.push(Check::below("haar pseudo-poisson defect", hd, 1e-9));
    let (defect, noise) = shift_defect()?;
    out.push(Check::above("state-dependent defect / noise", defect / noise, 10.0));

    let bm = ProcessSpec::LevyConvolution(HuntCharacteristics::heat(t1, 0.5)?);
    let ens = simulate(&bm, &t1.identity(), 0.5, 10_000, seed, Some(0.01))?;
    let z = worst((-4..=4).map(|n: i32| {
        let p = IrrepId::TorusChar(vec![n]);
        let s = empirical_symbol(&ens, &p)?;
        let exact = (-0.5 * 0.5 * f64::from(n * n)).exp();
        let d = (s.estimate[(0, 0)].re - exact).abs();
        let se = s.std_error[(0, 0)].re;
        Ok(if se > 0.0 { d / se } else if d < 1e-12 { 0.0 } else { f64::INFINITY })
    }))?;
    out.push(Check::below("monte carlo standard errors", z, 4.0));

    let ch = courrege_instance(t1)?;
    let cgen = ch.generator()?;
    let irreps = irreps_up_to(t1, 8);
    let grid: Vec<_> = haar_quadrature(t1, 6)?.nodes;
    let ex = symbol_from_operator(&cgen, &irreps, &grid)?;
    let mut gap = cgen.symbol(8).max_distance(&ex, &grid)?;
    let sde = SDESpec::left_invariant(t1, vec![0.2], vec![vec![0.7]], vec![(vec![0.5], 0.8)])?;
    let ex = symbol_from_operator(&sde, &irreps, &grid)?;
    gap = gap.max(sde.symbol(8).max_distance(&ex, &grid)?);
    out.push(Check::below("symbol extraction", gap, 1e-8));

    let adj = AdjointGenerator::new(&ch)?;
    let sym = SymmetricGenerator::new(&ch)?;
    let q = pairing_rule(&ch, 4, 4)?;
    let (mut dual, mut energy, mut min_e) = (0.0f64, 0.0f64, f64::INFINITY);
    for _ in 0..5 {
        let f = BandLimitedFunction::random(t1, 4, 0.7, true, &mut rng);
        let h = BandLimitedFunction::random(t1, 4, 0.7, true, &mut rng);
        let scale = sobolev_norm(&f).total * sobolev_norm(&h).total;
        dual = dual.max((operator_pairing(&cgen, &f, &h, &q)? - operator_pairing(&adj, &h, &f, &q)?).abs() / scale);
        let ef = sym.dirichlet_form_with(&f, &f, &q)?;
        energy = energy.max((ef + operator_pairing(&sym, &f, &f, &q)?).abs() / scale);
        min_e = min_e.min(ef);
    }
    out.push(Check::below("adjoint duality", dual, 1e-7));
    out.push(Check::below("dirichlet energy identity", energy, 1e-7));
    out.push(Check::above("dirichlet form positivity", min_e, -1e-10));

    let fam: Vec<_> = (0..10)
        .map(|_| BandLimitedFunction::random(su2, 4, 0.7, true, &mut rng))
        .collect();
    let rep = boundedness_ratio(&courrege_instance(su2)?, &fam)?;
    out.push(Check::below("sobolev norm ratio vs constant", rep.ratio, rep.bound.constant));

    let sub = subordinated_symbol(
        &HuntCharacteristics::heat(t1, 1.0)?.generator()?.symbol(8)?,
        &BernsteinFunction::stable(0.5)?,
    )?;
    let sgap = worst((-8..=8).map(|n: i32| {
        let p = IrrepId::TorusChar(vec![n]);
        Ok((sub.eval(&t1.identity(), &p)?[(0, 0)].re + f64::from(n.abs())).abs())
    }))?;
    out.push(Check::below("stable subordination", sgap, 1e-4));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes() {
        let checks = suite(7).unwrap();
        let failed: Vec<String> = checks.iter().filter(|c| !c.pass).map(|c| c.to_string()).collect();
        assert!(failed.is_empty(), "{failed:?}");
        assert!(checks.len() >= 12);
    }

    #[test]
    fn relation_semantics() {
        assert!(Check::below("x", 1.0, 2.0).pass);
        assert!(!Check::below("x", 2.0, 2.0).pass);
        assert!(Check::above("x", 3.0, 2.0).pass);
        assert_eq!(serde_json::to_value(Relation::Above).unwrap(), ">");
    }
}
