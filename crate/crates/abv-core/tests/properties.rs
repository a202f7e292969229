//! Property tests for the algebraic invariants the engine relies on.

use std::collections::BTreeMap;

use abv_core::arith::{q, qr, Cyc8, Mat2};
use abv_core::cycles::Coeff;
use abv_core::flag_orbits::{induce_bundle, OrbitPoset, OrbitRecord};
use proptest::prelude::*;

fn cyc8() -> impl Strategy<Value = Cyc8> {
    proptest::array::uniform4((-6i64..7, 1i64..4)).prop_map(|c| Cyc8(c.map(|(n, d)| qr(n, d))))
}

fn mat2() -> impl Strategy<Value = Mat2> {
    proptest::array::uniform4(cyc8()).prop_map(|[a, b, c, d]| Mat2::new(a, b, c, d))
}

/// Components closed off by a unique top orbit, as orbit posets must be.
fn poset() -> impl Strategy<Value = OrbitPoset> {
    (1usize..8)
        .prop_flat_map(|n| {
            (
                proptest::collection::vec(0usize..4, n),
                proptest::collection::vec(0usize..2, n),
                proptest::collection::vec(any::<bool>(), n * n),
            )
        })
        .prop_map(|(dims, comp, bits)| {
            let n = dims.len();
            let mut orbits: Vec<OrbitRecord> =
                dims.iter().enumerate().map(|(i, &d)| OrbitRecord { id: format!("o{i}"), dim: d, attrs: BTreeMap::new() }).collect();
            let mut rel: Vec<(usize, usize)> = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .filter(|&(i, j)| comp[i] == comp[j] && dims[i] < dims[j] && bits[i * n + j])
                .collect();
            for c in 0..2 {
                let members: Vec<usize> = (0..n).filter(|&i| comp[i] == c).collect();
                if let Some(top) = members.iter().map(|&i| dims[i]).max() {
                    let t = orbits.len();
                    orbits.push(OrbitRecord { id: format!("top{c}"), dim: top + 1, attrs: BTreeMap::new() });
                    rel.extend(members.iter().map(|&i| (i, t)));
                }
            }
            OrbitPoset::new(orbits, &rel).unwrap()
        })
}

fn coeff() -> impl Strategy<Value = Coeff> {
    (-5i64..6, proptest::collection::btree_map("m\\[[a-c]\\]", -3i64..4, 0..3)).prop_map(|(c, u)| {
        let mut out = Coeff::int(c);
        for (name, k) in u {
            out = out.add(&Coeff::unknown(&name).scale(k));
        }
        out
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn induce_bundle_round_trip(p in poset(), shift in 0usize..5) {
        let b = induce_bundle(&p, shift);
        let map: Vec<usize> = p.orbits().iter().map(|o| b.result_poset.index(b.image(&o.id).unwrap()).unwrap()).collect();
        prop_assert!(p.is_isomorphism(&b.result_poset, &map));
        for (i, o) in p.orbits().iter().enumerate() {
            prop_assert_eq!(b.result_poset.orbit(map[i]).dim, o.dim + shift);
        }
        prop_assert_eq!(b.result_poset.shifted(0).covers(), p.covers());
    }

    #[test]
    fn closure_order_is_a_partial_order(p in poset()) {
        let n = p.len();
        for i in 0..n {
            prop_assert!(p.le(i, i));
            for j in 0..n {
                if i != j && p.le(i, j) {
                    prop_assert!(!p.le(j, i));
                    prop_assert!(p.orbit(i).dim < p.orbit(j).dim);
                }
                for k in 0..n {
                    if p.le(i, j) && p.le(j, k) {
                        prop_assert!(p.le(i, k));
                    }
                }
            }
        }
        for (a, b) in p.covers() {
            prop_assert!(p.le(a, b) && a != b);
        }
        // One top orbit per component.
        prop_assert_eq!(p.open_orbits().len(), p.components().len());
    }

    #[test]
    fn cyc8_is_a_field(a in cyc8(), b in cyc8(), c in cyc8()) {
        prop_assert_eq!(a.clone() * (b.clone() + c.clone()), a.clone() * b.clone() + a.clone() * c.clone());
        prop_assert_eq!((a.clone() * b.clone()) * c.clone(), a.clone() * (b.clone() * c.clone()));
        prop_assert_eq!(a.clone() * b.clone(), b.clone() * a.clone());
        if let Some(inv) = a.inv() {
            prop_assert!((a.clone() * inv).is_one());
        } else {
            prop_assert!(a.is_zero());
        }
        prop_assert_eq!(a.conj().conj(), a.clone());
    }

    #[test]
    fn mat2_det_is_multiplicative(a in mat2(), b in mat2()) {
        prop_assert_eq!((a.clone() * b.clone()).det(), a.det() * b.det());
        if let Some(ai) = a.inv() {
            prop_assert_eq!(a * ai, Mat2::identity());
        }
    }

    #[test]
    fn coeff_module_laws(a in coeff(), b in coeff(), k in -4i64..5) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.add(&b).scale(k), a.scale(k).add(&b.scale(k)));
        let values: BTreeMap<String, i64> = ["m[a]", "m[b]", "m[c]"].iter().map(|s| (s.to_string(), 2)).collect();
        let sa = a.substitute(&values);
        prop_assert!(sa.is_resolved());
        prop_assert_eq!(a.add(&b).substitute(&values).value(), Some(sa.value().unwrap() + b.substitute(&values).value().unwrap()));
    }

    #[test]
    fn zeta8_powers(k in -20i64..20) {
        prop_assert!((Cyc8::zeta_pow(k) * Cyc8::zeta_pow(-k)).is_one());
        prop_assert_eq!(Cyc8::zeta_pow(k).pow(8), Cyc8::one());
        prop_assert_eq!(Cyc8::exp_2pi_i(&qr(k, 8)), Some(Cyc8::zeta_pow(k)));
        prop_assert_eq!(Cyc8::from_q(q(k)).root_exponent().is_some(), k == 1 || k == -1);
    }
}
