#![no_main]

use bargmann_retrieval::io::parse_samples;
use bargmann_retrieval::lattice_geometry::{canonical_progressions, ShiftedLattice};
use bargmann_retrieval::retrieval::reconstruct;
use bargmann_retrieval::Complex64;
use libfuzzer_sys::fuzz_target;

// Arbitrary samples on the unit lattice's progressions either reconstruct
// with a finite residual or fail with an error.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(samples) = parse_samples(text) else { return };
    let lattice = ShiftedLattice::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(1.0, 0.0))
        .expect("unit lattice");
    let set = canonical_progressions(&lattice, 5).expect("progressions");
    if let Ok(result) = reconstruct(&samples, &set, 4) {
        assert!(result.residual.is_finite());
        assert!(result.recovered.coeffs().iter().all(|c| c.re.is_finite() && c.im.is_finite()));
    }
});
