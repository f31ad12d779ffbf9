use nptspace::{BipartiteDims, ComplexMatrix, C64};
use nptspace_cli::MatrixFile;
use proptest::prelude::*;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        any::<f64>().prop_filter("finite", |x| x.is_finite()),
        Just(0.0),
        Just(-0.0),
        Just(f64::MIN_POSITIVE),
        Just(5e-324),
        Just(f64::MAX),
    ]
}

proptest! {
    #[test]
    fn operator_files_round_trip_bit_exactly(
        (m, n) in (1usize..=3, 1usize..=3),
        values in prop::collection::vec((finite(), finite()), 81),
    ) {
        let dims = BipartiteDims::new(m, n).unwrap();
        let d = m * n;
        let mat = ComplexMatrix::from_fn(d, d, |r, c| {
            let (re, im) = values[r * d + c];
            C64::new(re, im)
        });
        let mut file = MatrixFile::operator(dims, mat);
        file.set_meta("seed", 17u64);
        let text = file.to_json();
        let back = MatrixFile::from_json(&text).unwrap();
        for (a, b) in file.matrix.as_slice().iter().zip(back.matrix.as_slice()) {
            prop_assert_eq!(a.re.to_bits(), b.re.to_bits());
            prop_assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
        prop_assert_eq!(&back.metadata, &file.metadata);
        prop_assert_eq!(back.to_json(), text);
    }

    #[test]
    fn vector_files_round_trip(count in 0usize..4, seed in any::<u64>()) {
        let dims = BipartiteDims::new(2, 3).unwrap();
        let mut s = nptspace::sampling::Sampler::new(seed);
        let vectors: Vec<Vec<C64>> = (0..count).map(|_| s.complex_normal_vec(6)).collect();
        let file = MatrixFile::vectors(dims, &vectors);
        let back = MatrixFile::from_json(&file.to_json()).unwrap();
        prop_assert_eq!(back, file);
    }
}

#[test]
fn metadata_records_basis_ordering_and_version() {
    let dims = BipartiteDims::new(2, 2).unwrap();
    let file = MatrixFile::operator(dims, ComplexMatrix::identity(4));
    assert!(file.metadata["basis_ordering"].as_str().unwrap().contains("j*n + k"));
    assert_eq!(file.metadata["tool_version"], env!("CARGO_PKG_VERSION"));
}
