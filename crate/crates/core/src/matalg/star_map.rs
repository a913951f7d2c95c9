use serde::{Deserialize, Serialize};

use super::span::{span_closure, AlgebraSpan, ClosureRun, OrthoBasis};
use super::{Config, Mat, MatalgError, Witness};

/// What [`check_star_map`] established about an assignment on generators.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StarMapReport {
    pub domain_dim: usize,
    pub image_dim: usize,
    pub target_dim: Option<usize>,
    pub well_defined: bool,
    pub multiplicative: bool,
    pub star_preserving: bool,
    pub injective: bool,
    pub surjective: bool,
    pub max_error: f64,
    pub failures: Vec<Witness>,
}

impl StarMapReport {
    pub fn is_homomorphism(&self) -> bool {
        self.well_defined && self.multiplicative && self.star_preserving
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_homomorphism() && self.injective && self.surjective
    }
}

/// The linear extension of a generator assignment to the generated algebra.
#[derive(Clone, Debug)]
pub struct StarMap {
    domain: AlgebraSpan,
    images: Vec<Mat>,
    image_ambient: usize,
    report: StarMapReport,
}

impl StarMap {
    pub fn report(&self) -> &StarMapReport {
        &self.report
    }

    pub fn domain(&self) -> &AlgebraSpan {
        &self.domain
    }

    pub fn image_ambient(&self) -> usize {
        self.image_ambient
    }

    /// Evaluates the map on any element of the domain span.
    pub fn apply(&self, x: &Mat, tol: f64) -> Result<Mat, MatalgError> {
        let (coeffs, r) = self.domain.project(x);
        let residual = r.norm_fro();
        if residual > tol * x.norm_fro().max(1.0) {
            return Err(MatalgError::NotInSpan { residual });
        }
        Ok(Mat::lin_comb(self.image_ambient, coeffs.iter().map(|&(k, c)| (c, &self.images[k]))))
    }
}

/// Certifies the map induced by `domain_generators[i] ↦ images[i]`.
///
/// The closure of the domain generators is built while carrying images
/// along: a generator that depends linearly on earlier ones must carry the
/// same combination of images (otherwise `NotWellDefined`), and each
/// product that falls back into the span must match the product of images.
/// With `target`, surjectivity means onto `target`; otherwise onto the
/// algebra generated by the images.
pub fn check_star_map(
    domain_generators: &[Mat],
    images: &[Mat],
    target: Option<&AlgebraSpan>,
    cfg: &Config,
) -> Result<StarMap, MatalgError> {
    let mut run = ClosureRun::run(domain_generators, Some(images), cfg)?;
    let image_ambient = run.image_dim;
    let mut failures: Vec<Witness> = Vec::new();
    let multiplicative = run.mult_failures.is_empty();
    failures.append(&mut run.mult_failures);

    let mut star_ok = run.star_failures.is_empty();
    failures.append(&mut run.star_failures);
    let mut max_error = run.max_error;
    for k in 0..run.words.len() {
        let adj = run.words[k].adjoint();
        let pr = run.basis.project(&adj);
        let predicted = Mat::lin_comb(image_ambient, pr.coeffs.iter().map(|&(j, c)| (c, &run.basis_images[j])));
        let expected = run.word_images[k].adjoint();
        let outside = pr.residual_norm > cfg.closure_tol * adj.norm_fro().max(1.0);
        let err = if outside { f64::INFINITY } else { predicted.max_abs_diff(&expected) };
        if err.is_finite() {
            max_error = max_error.max(err);
        }
        if err > cfg.tol {
            if star_ok || failures.len() < 8 {
                failures.push(
                    Witness::new(format!("adjoint of basis word {k}"), err)
                        .with("image of adjoint", predicted)
                        .with("adjoint of image", expected),
                );
            }
            star_ok = false;
        }
    }

    let mut ob = OrthoBasis::new(image_ambient);
    for img in &run.basis_images {
        let pr = ob.project(img);
        if pr.residual_norm > cfg.closure_tol * img.norm_fro().max(1.0) {
            ob.push_normalized(&pr.residual, pr.residual_norm);
        }
    }
    let image_dim = ob.len();
    let domain_dim = run.words.len();
    let injective = image_dim == domain_dim;

    let (surjective, target_dim) = match target {
        Some(t) => {
            let inside = run.basis_images.iter().all(|img| t.contains(img, cfg.closure_tol));
            if !inside {
                failures.push(Witness::new("image leaves the declared target algebra", f64::NAN));
            }
            (inside && image_dim == t.dim(), Some(t.dim()))
        }
        None => {
            let generated = span_closure(images, cfg)?;
            (generated.dim() == image_dim, None)
        }
    };

    let report = StarMapReport {
        domain_dim,
        image_dim,
        target_dim,
        well_defined: true,
        multiplicative,
        star_preserving: star_ok,
        injective,
        surjective,
        max_error,
        failures,
    };
    let domain = run.basis.into_span(domain_generators.to_vec(), "domain");
    Ok(StarMap { domain, images: run.basis_images, image_ambient, report })
}

/// Composition check helper: `max |g(f(x)) - x|` over the given elements.
pub(crate) fn round_trip_error(f: &StarMap, g: &StarMap, xs: &[Mat], tol: f64) -> Result<f64, MatalgError> {
    let mut worst: f64 = 0.0;
    for x in xs {
        let y = f.apply(x, tol)?;
        let back = g.apply(&y, tol)?;
        worst = worst.max(back.max_abs_diff(x));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matalg::{C64, ONE, ZERO};

    fn cfg() -> Config {
        Config::default()
    }

    #[test]
    fn inner_automorphism_is_bijective() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let u = Mat::from_triplets(
            2,
            vec![
                (0, 0, C64::new(h, 0.0)),
                (0, 1, C64::new(0.0, h)),
                (1, 0, C64::new(0.0, h)),
                (1, 1, C64::new(h, 0.0)),
            ],
        );
        let gens = vec![Mat::unit(2, 0, 1), Mat::unit(2, 1, 0)];
        let imgs: Vec<Mat> = gens.iter().map(|g| u.matmul(g).matmul(&u.adjoint())).collect();
        let full = AlgebraSpan::full(2);
        let m = check_star_map(&gens, &imgs, Some(&full), &cfg()).unwrap();
        assert!(m.report().is_isomorphism(), "{:?}", m.report());
    }

    #[test]
    fn scaling_a_partial_isometry_breaks_multiplicativity() {
        // E1: basis {w, f}; s_f = e_{f,w}, p_v = e_{f,f}, p_w = e_{w,w} with f=1, w=0.
        let s = Mat::unit(2, 1, 0);
        let pv = Mat::unit(2, 1, 1);
        let pw = Mat::unit(2, 0, 0);
        let gens = vec![pv.clone(), pw.clone(), s.clone()];
        let imgs = vec![pv, pw, s.scale(C64::new(2.0, 0.0))];
        let m = check_star_map(&gens, &imgs, None, &cfg()).unwrap();
        assert!(!m.report().multiplicative);
        assert!(!m.report().is_homomorphism());
    }

    #[test]
    fn inconsistent_linear_relation_is_not_well_defined() {
        let a = Mat::unit(2, 0, 0);
        let b = Mat::unit(2, 1, 1);
        let sum = &a + &b;
        let gens = vec![a.clone(), b.clone(), sum];
        let imgs = vec![a.clone(), b.clone(), a.clone()];
        let e = check_star_map(&gens, &imgs, None, &cfg()).unwrap_err();
        assert!(matches!(e, MatalgError::NotWellDefined { .. }));
    }

    #[test]
    fn apply_extends_linearly() {
        let gens = vec![Mat::unit(2, 0, 1), Mat::unit(2, 1, 0)];
        let m = check_star_map(&gens, &gens, None, &cfg()).unwrap();
        let x = Mat::from_triplets(2, vec![(0, 0, C64::new(3.0, 1.0)), (1, 0, ONE)]);
        assert!(m.apply(&x, 1e-9).unwrap().approx_eq(&x, 1e-12));
        assert!(m.report().is_isomorphism());
        let _ = ZERO;
    }

    #[test]
    fn non_injective_homomorphism_detected() {
        // diag(a, b) ↦ a: a homomorphism C² → C with a kernel.
        let gens = vec![Mat::unit(2, 0, 0), Mat::unit(2, 1, 1)];
        let imgs = vec![Mat::identity(1), Mat::zeros(1)];
        let m = check_star_map(&gens, &imgs, None, &cfg()).unwrap();
        assert!(m.report().is_homomorphism());
        assert!(!m.report().injective);
    }
}
