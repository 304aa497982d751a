use ksfluid::grid::{make_grid, ScalarField, VectorField};
use ksfluid::snapshot::{Snapshot, HEADER_LEN, MAGIC};
use ksfluid::state::FluidState;
use proptest::prelude::*;

#[test]
fn header_layout() {
    let grid = make_grid(1.25, 8).unwrap();
    let rho = ScalarField::from_fn(grid, |p| 1.0 + p[0]);
    let m = VectorField::from_components(grid, vec![2.0; 64], vec![-3.0; 64]).unwrap();
    let state = FluidState::new(rho, m, 0.5).unwrap();
    let mut buf = Vec::new();
    Snapshot::from_state(&state).write(&mut buf).unwrap();
    assert_eq!(HEADER_LEN, 32);
    assert_eq!(buf.len(), 32 + 3 * 64 * 8);
    assert_eq!(buf[0..4], MAGIC);
    assert_eq!(u32::from_le_bytes(buf[4..8].try_into().unwrap()), 8);
    assert_eq!(f64::from_le_bytes(buf[8..16].try_into().unwrap()), 1.25);
    assert_eq!(f64::from_le_bytes(buf[16..24].try_into().unwrap()), 0.5);
    assert_eq!(u32::from_le_bytes(buf[24..28].try_into().unwrap()), 3);
    assert_eq!(&buf[28..32], &[0; 4]);
    // x varies fastest: cell (1, 0) is the second value of the first plane
    let second = f64::from_le_bytes(buf[40..48].try_into().unwrap());
    assert_eq!(second, state.rho.at(1, 0));
    let m1_first = f64::from_le_bytes(buf[32 + 512..32 + 520].try_into().unwrap());
    assert_eq!(m1_first, 2.0);
}

#[test]
fn rejects_damaged_files() {
    let grid = make_grid(1.0, 8).unwrap();
    let snap = Snapshot { grid, t: 0.0, planes: vec![vec![1.0; 64]] };
    let mut buf = Vec::new();
    snap.write(&mut buf).unwrap();
    assert!(Snapshot::read(&buf[..buf.len() - 1]).is_err());
    assert!(Snapshot::read(&buf[..20]).is_err());
    let mut bad = buf.clone();
    bad[0] = b'X';
    assert!(Snapshot::read(&bad[..]).is_err());
    let mut bad = buf.clone();
    bad[30] = 1;
    assert!(Snapshot::read(&bad[..]).is_err());
    assert!(Snapshot::read(&buf[..]).unwrap().into_state().is_err());
}

proptest! {
    #[test]
    fn round_trip_is_bit_exact(
        k in 4usize..9,
        l in 0.01f64..100.0,
        t in 0.0f64..1e3,
        planes in 1usize..4,
        seed in prop::collection::vec(any::<f64>(), 3 * 256),
    ) {
        let n = 2 * k;
        let grid = make_grid(l, n).unwrap();
        let planes: Vec<Vec<f64>> = (0..planes).map(|p| seed[p * 256..p * 256 + n * n].to_vec()).collect();
        let snap = Snapshot { grid, t, planes };
        let mut buf = Vec::new();
        snap.write(&mut buf).unwrap();
        prop_assert_eq!(buf.len(), HEADER_LEN + 8 * n * n * snap.planes.len());
        let back = Snapshot::read(&buf[..]).unwrap();
        prop_assert_eq!(back.grid.n(), n);
        prop_assert_eq!(back.grid.half_width().to_bits(), l.to_bits());
        prop_assert_eq!(back.t.to_bits(), t.to_bits());
        for (a, b) in back.planes.iter().zip(&snap.planes) {
            prop_assert_eq!(
                a.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                b.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
            );
        }
    }
}
