use num_complex::Complex64;
use superstar_core::grassmann::{eps, Grassmann, IndexSet};

fn mono(set: IndexSet) -> Grassmann<Complex64> {
    Grassmann::monomial(set.bits(), Complex64::new(1.0, 0.0))
}

fn sign(k: usize) -> i8 {
    if k.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

#[test]
fn eps_swap_law_exhaustive() {
    for n in 0..=6 {
        for i in IndexSet::all(n) {
            for j in IndexSet::all(n) {
                if i.bits() & j.bits() != 0 {
                    assert_eq!(eps(i, j).unwrap(), 0);
                    continue;
                }
                assert_eq!(eps(i, j).unwrap() * eps(j, i).unwrap(), sign(i.len() * j.len()), "{i:?} {j:?}");
            }
        }
    }
}

#[test]
fn eps_splits_over_unions_exhaustive() {
    for n in 0..=6 {
        for i in IndexSet::all(n) {
            for j in IndexSet::all(n) {
                if i.bits() & j.bits() != 0 {
                    continue;
                }
                for k in IndexSet::all(n) {
                    if k.bits() & (i.bits() | j.bits()) != 0 {
                        continue;
                    }
                    let jk = IndexSet::from_bits(n, j.bits() | k.bits()).unwrap();
                    assert_eq!(eps(i, jk).unwrap(), eps(i, j).unwrap() * eps(i, k).unwrap());
                }
            }
        }
    }
}

#[test]
fn wedge_associative_and_graded_commutative() {
    for n in 0..=5 {
        let sets: Vec<_> = IndexSet::all(n).collect();
        for &i in &sets {
            for &j in &sets {
                let ij = mono(i).mul(&mono(j));
                let ji = mono(j).mul(&mono(i));
                assert_eq!(ij, ji.scale(Complex64::new(f64::from(sign(i.len() * j.len())), 0.0)));
                for &k in &sets {
                    assert_eq!(ij.mul(&mono(k)), mono(i).mul(&mono(j).mul(&mono(k))));
                }
            }
        }
    }
}

#[test]
fn hodge_squares_to_graded_sign() {
    for n in 0..=5 {
        for i in IndexSet::all(n) {
            let twice = mono(i).hodge(n).hodge(n);
            let expected = mono(i).scale(Complex64::new(f64::from(sign((n + 1) * i.len())), 0.0));
            assert_eq!(twice, expected, "n={n} I={i:?}");
        }
    }
}
