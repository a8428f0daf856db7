//! Cross-functional convergence: on a family with a well-defined mass, every
//! functional approaches the same limit.

use halfmass::harness::{rate_fit, Schedule};
use halfmass::mass::{
    adm_flux, adm_tensor, evaluate, flux_normalization, graph_mass, hawking_disk, hawking_general,
    iso_mass, Functional,
};
use halfmass::metric::{GraphSpec, MetricField, Profile};

#[test]
fn hawking_disk_tracks_the_flux_limit_on_conformal_fields() {
    // The flux limit is a/2; the disk Hawking mass converges to it and sits
    // within one percent at r = 1000.
    let a = 2.0;
    let field = MetricField::conformal_perturbation(3, a, 1.0).unwrap();
    let limit = a / 2.0;
    let disk = hawking_disk(&field, 1000.0, 24).unwrap().value;
    assert!(
        (disk - limit).abs() <= 0.01 * limit,
        "hawking-disk {disk} vs {limit}"
    );
    let flux = adm_flux(&field, 1000.0, 24).unwrap().value;
    assert!((flux - limit).abs() <= 1e-4);
}

#[test]
fn both_adm_forms_agree_on_graph_fields() {
    // Graph fields are the one family with a nonzero equator term in the
    // flux form (g_1a does not vanish on the boundary), so this pins that
    // term against an independent oracle: the one-line graph mass, scaled
    // into mass units by the ambient dimension's flux normalization.
    let a = -1.0 / (8.0 * std::f64::consts::PI);
    let spec = GraphSpec::new(3, Profile::SmoothedInverseRadius { amplitude: a }).unwrap();
    let field = MetricField::graph(spec.clone()).unwrap();
    let target = flux_normalization(4) * graph_mass(&spec, 4000.0, 16).unwrap();

    let rho = 200.0;
    let flux = adm_flux(&field, rho, 16).unwrap().value;
    let tensor = adm_tensor(&field, rho, 16).unwrap().value;
    assert!(
        (flux - target).abs() <= 0.01 * target.abs(),
        "flux {flux} vs {target}"
    );
    assert!(
        (tensor - target).abs() <= 0.01 * target.abs(),
        "tensor {tensor} vs {target}"
    );
}

#[test]
fn hawking_general_tracks_the_graph_mass_limit() {
    // The graph family is the only registry member whose edge terms are not
    // identically zero, so this pins the sign and magnitude of the contact
    // contribution against the boundary-localized oracle.
    let a = -1.0 / (8.0 * std::f64::consts::PI);
    let spec = GraphSpec::new(3, Profile::SmoothedInverseRadius { amplitude: a }).unwrap();
    let field = MetricField::graph(spec.clone()).unwrap();
    let target = flux_normalization(4) * graph_mass(&spec, 4000.0, 16).unwrap();
    let value = hawking_general(&field, 200.0, 16).unwrap().value;
    assert!(
        (value - target).abs() <= 1e-3 * target.abs(),
        "hawking-general {value} vs {target}"
    );
}

#[test]
fn iso_mass_tracks_the_flux_limit_on_conformal_fields() {
    let field = MetricField::conformal_perturbation(3, 2.0, 1.0).unwrap();
    let rows: Vec<(f64, f64)> = (0..5)
        .map(|k| {
            let r = 64.0 * 2f64.powi(k);
            (r, iso_mass(&field, r, 12).unwrap().value)
        })
        .collect();
    let fit = rate_fit(&rows).unwrap();
    assert!(
        (fit.limit - 1.0).abs() <= 1e-3,
        "limit {} rate {:?}",
        fit.limit,
        fit.rate
    );
}

#[test]
fn all_functionals_extrapolate_to_one_mass() {
    let field = MetricField::half_schwarzschild(3, 1.0).unwrap();
    let schedule = Schedule::new(40.0, 1280.0, 6).unwrap();
    for functional in [
        Functional::AdmFlux,
        Functional::AdmTensor,
        Functional::HawkingDisk,
        Functional::HawkingGeneral,
        Functional::IsoMass,
    ] {
        let order = if functional == Functional::IsoMass {
            12
        } else {
            16
        };
        let rows: Vec<(f64, f64)> = schedule
            .radii()
            .iter()
            .map(|&r| (r, evaluate(&field, functional, r, order).unwrap().value))
            .collect();
        let fit = rate_fit(&rows).unwrap();
        assert!(
            (fit.limit - 1.0).abs() <= 1e-2,
            "{functional}: limit {} (rows {:?})",
            fit.limit,
            fit.rows
        );
    }
}
