//! Public-API round trip: the brute-force propagator, the transformation
//! chain, and the closed forms must tell one consistent story at every
//! ratio, with only the counter-rotating error separating the layers.

use std::f64::consts::PI;

use optomech::analytic::{beta_of, evolve_analytic, postselect_analytic, Outcome};
use optomech::entanglement::concurrence_pure;
use optomech::fock::HilbertSpec;
use optomech::model::ModelParams;
use optomech::oracle::{
    postselect_numeric, tau_grid, undisplace_and_project, ChainMode, OracleEngine,
};

#[test]
fn layers_agree_across_ratios() {
    let spec = HilbertSpec::new(10).unwrap();
    for ratio in [8.0, 25.0] {
        let p = ModelParams::from_ratio(ratio, 0.5, 0.0).unwrap();
        let engine = OracleEngine::new(&p, spec).unwrap();
        for report in engine.compare_grid(&tau_grid(2.0 * PI, 24)).unwrap() {
            let violations = report.layered_violations();
            assert!(violations.is_empty(), "ratio {ratio}: {violations:?}");
        }
    }
}

#[test]
fn numeric_postselection_reproduces_closed_forms() {
    let spec = HilbertSpec::new(12).unwrap();
    let p = ModelParams::from_ratio(20.0, 0.5, 0.0).unwrap();
    let engine = OracleEngine::new(&p, spec).unwrap();
    for tau in tau_grid(2.0 * PI, 30) {
        let psi = engine.propagate_chain(tau, ChainMode::RwaHii).unwrap();
        let analytic = evolve_analytic(&p, tau).unwrap();
        let beta = beta_of(&p, tau);
        let mut total = 0.0;
        for outcome in Outcome::both() {
            let sel = postselect_analytic(&analytic, outcome);
            match postselect_numeric(&psi, outcome) {
                Ok((mech, prob)) => {
                    total += prob;
                    assert!((prob - sel.prob).abs() < 1e-9, "tau {tau}: prob {prob}");
                    let (pair, leak) = undisplace_and_project(&mech, beta).unwrap();
                    assert!(leak < 1e-9, "tau {tau}: leakage {leak:.3e}");
                    if let Some(reference) = sel.state {
                        let c = concurrence_pure(&pair);
                        let c_ref = concurrence_pure(&reference);
                        assert!((c - c_ref).abs() < 1e-8, "tau {tau}: {c} vs {c_ref}");
                    }
                }
                Err(_) => total += sel.prob,
            }
        }
        assert!((total - 1.0).abs() < 1e-9, "tau {tau}: total probability {total}");
    }
}
