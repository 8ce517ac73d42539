use std::collections::BTreeMap;

use gkp_concat::qudit::{qudit_round, sample, sweep, QuditError, QuditParams};

/// Two-qudit state as a map `|x, y> -> phase exponent` (amplitude
/// `ω^phase`, uniform magnitude). Enough for Pauli and CNOT evolution.
type State = BTreeMap<(i64, i64), i64>;

fn apply(state: &State, d: i64, f: impl Fn(i64, i64) -> (i64, i64, i64)) -> State {
    state
        .iter()
        .map(|(&(x, y), &ph)| {
            let (nx, ny, dph) = f(x, y);
            ((nx.rem_euclid(d), ny.rem_euclid(d)), (ph + dph).rem_euclid(d))
        })
        .collect()
}

struct Readout {
    data_x: i64,
    ancilla: Vec<(i64, i64)>,
}

/// Encodes `|j>` with a GKP ancilla `Σ_m |r m>`, applies CNOT, the error
/// `X^a Z^c` on each qudit and the inverse CNOT.
fn evolve(p: &QuditParams, e: &QuditError, j: i64) -> Readout {
    let (d, r) = (p.d(), p.r());
    let s: State = (0..d / r).map(|m| ((j, r * m), 0)).collect();
    let s = apply(&s, d, |x, y| (x, y + x, 0));
    let s = apply(&s, d, |x, y| (x, y, x * e.c1 + y * e.c2));
    let s = apply(&s, d, |x, y| (x + e.a1, y + e.a2, 0));
    let s = apply(&s, d, |x, y| (x, y - x, 0));
    let data_x = s.keys().next().unwrap().0;
    assert!(s.keys().all(|&(x, _)| x == data_x), "data left a basis state");
    Readout { data_x, ancilla: s.iter().map(|(&(_, y), &ph)| (y, ph)).collect() }
}

#[test]
fn state_evolution_oracle_d16_r4() {
    let p = QuditParams::new(16, 4).unwrap();
    let (d, r) = (16, 4);
    for a1 in 0..d {
        for a2 in 0..d {
            for c1 in 0..d {
                for c2 in 0..d {
                    let e = QuditError::new(&p, a1, c1, a2, c2);
                    let zero = evolve(&p, &e, 0);
                    let one = evolve(&p, &e, 1);
                    let (y0, ph0) = zero.ancilla[0];
                    let offset = y0.rem_euclid(r);
                    assert!(zero.ancilla.iter().all(|&(y, _)| y.rem_euclid(r) == offset));
                    // Ancilla phase advances by c2·r per lattice step.
                    let step = zero.ancilla.iter().find(|&&(y, _)| y == (y0 + r) % d).unwrap().1;
                    let slope = (step - ph0).rem_euclid(d);
                    assert_eq!(slope % r, 0);
                    let z_syndrome = p.syndrome(slope / r);
                    // Relative data phase between |1> and |0> at the same ancilla value.
                    let ph1 = one.ancilla.iter().find(|&&(y, _)| y == y0).unwrap().1;
                    let data_z = (ph1 - ph0).rem_euclid(d);
                    let x_syndrome = p.syndrome(offset);

                    let o = qudit_round(&p, &e);
                    assert_eq!(o.x_syndrome, x_syndrome);
                    assert_eq!(o.z_syndrome, z_syndrome);
                    assert_eq!(o.z_residual, p.center(data_z - z_syndrome));
                    assert_eq!(o.x_residual, p.center(zero.data_x + x_syndrome / 2));
                    if p.in_window(c2) {
                        assert_eq!(o.z_residual, p.center(c1));
                    }
                }
            }
        }
    }
}

#[test]
fn exhaustive_in_window_sweep_d16_r4() {
    let p = QuditParams::new(16, 4).unwrap();
    let summary = sweep(&p);
    // |a2 - a1| < 2 and |c2| < 2: 3 differences, 3 phases, 16 a1, 16 c1.
    assert_eq!(summary.cases, 3 * 3 * 16 * 16);
    assert_eq!(summary.recovered, summary.cases);
    assert_eq!(summary.z_leaks, 0);
    assert_eq!(summary.x_syndrome_mismatches, 0);
}

#[test]
fn small_example() {
    let p = QuditParams::new(16, 4).unwrap();
    let o = qudit_round(&p, &QuditError::new(&p, 1, 0, 1, 1));
    assert_eq!((o.x_syndrome, o.z_syndrome, o.z_residual), (0, 1, 0));
    assert!(o.recovered);
    let trivial = qudit_round(&p, &QuditError::new(&p, 0, 0, 0, 0));
    assert_eq!((trivial.x_residual, trivial.z_residual), (0, 0));
}

#[test]
fn out_of_window_errors_are_flagged() {
    let p = QuditParams::new(16, 4).unwrap();
    let o = qudit_round(&p, &QuditError::new(&p, 0, 0, 3, 0));
    assert!(!o.recovered);
    let o = qudit_round(&p, &QuditError::new(&p, 0, 0, 0, 3));
    assert!(!o.recovered);
    assert_ne!(o.z_leak, 0);
}

#[test]
fn x_variance_is_halved() {
    let p = QuditParams::new(1024, 32).unwrap();
    let s = sample(&p, 3.0, 1_000_000, 12).unwrap();
    assert!((s.ratio_continuum() - 0.5).abs() < 0.025, "{}", s.ratio_continuum());
    assert!(s.recovered as f64 > 0.999 * s.draws as f64);
}
