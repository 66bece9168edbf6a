use super::corpus::{conjugate, random_module, representative_module, CORPUS_FIELDS};
use super::*;
use crate::eo_comb::{delta_from_nu, mu_from_nu, YoungDiagram};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn f3() -> FiniteField {
    make_field(3, 1).unwrap()
}

fn ft(v: &[u32]) -> FinalType {
    FinalType::new(v.to_vec()).unwrap()
}

fn example_phi(k: &FiniteField) -> Matrix {
    Matrix::from_ints(k, &[&[0, 0, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, 1], &[0, 0, 0, 0]])
}

#[test]
fn blocks_are_valid() {
    let k = f3();
    for l in 1..=4 {
        assert!(validate_module(&ordinary_module(&k, l)).is_empty());
    }
    assert!(validate_module(&supersingular_block(&k)).is_empty());
    assert!(validate_module(&supersingular_block(&make_field(5, 2).unwrap())).is_empty());
}

#[test]
fn violations_are_reported() {
    let k = f3();
    let z = Matrix::zeros(&k, 2, 2);
    let b = Matrix::from_ints(&k, &[&[0, 1], &[-1, 0]]);
    let d = DieudonneModule::new(z.clone(), z.clone(), b).unwrap();
    let v = validate_module(&d);
    assert!(v.contains(&Violation::KerFNotImV));
    assert!(v.contains(&Violation::KerVNotImF));

    let ord = ordinary_module(&k, 1);
    let d = DieudonneModule::new(ord.f_mat().clone(), ord.v_mat().clone(), Matrix::identity(&k, 2)).unwrap();
    assert!(validate_module(&d).contains(&Violation::NotAlternating));

    let d = DieudonneModule::new(ord.f_mat().clone(), ord.v_mat().clone(), z).unwrap();
    assert!(validate_module(&d).contains(&Violation::Degenerate));

    assert!(DieudonneModule::new(Matrix::zeros(&k, 3, 3), Matrix::zeros(&k, 3, 3), Matrix::zeros(&k, 3, 3)).is_err());
    assert!(matches!(final_type(&DieudonneModule::new(Matrix::zeros(&k, 2, 2), Matrix::zeros(&k, 2, 2), Matrix::from_ints(&k, &[&[0, 1], &[-1, 0]])).unwrap()), Err(ModuleError::InvalidModule(_))));
}

#[test]
fn direct_sum_examples() {
    let k = f3();
    let ss = supersingular_block(&k);
    assert_eq!(direct_sum(std::slice::from_ref(&ss)).unwrap(), ss);
    assert_eq!(direct_sum(&[]), Err(ModuleError::EmptySum));

    let two = direct_sum(&[ss.clone(), ss.clone()]).unwrap();
    assert_eq!(final_type(&two).unwrap(), ft(&[0, 0]));
    assert_eq!(mu_from_nu(&final_type(&two).unwrap()).parts(), &[2, 1]);
    assert_eq!(module_delta(&two).unwrap().parts(), &[2]);

    let mixed = direct_sum(&[ordinary_module(&k, 1), ss]).unwrap();
    let nu = final_type(&mixed).unwrap();
    let (delta, f) = delta_from_nu(&nu);
    assert_eq!((f, delta.a_number(), mixed.g()), (1, 1, 2));
    assert_eq!(mu_from_nu(&nu).parts(), &[1]);

    let other = supersingular_block(&make_field(3, 2).unwrap());
    assert!(matches!(direct_sum(&[ordinary_module(&k, 1), other]), Err(ModuleError::Field(_))));
}

#[test]
fn canonical_filtration_examples() {
    let k = f3();
    let ord = canonical_filtration(&ordinary_module(&k, 1)).unwrap();
    assert_eq!(ord.iter().map(Subspace::dim).collect::<Vec<_>>(), vec![0, 1, 2]);
    assert_eq!(ord[1], Subspace::span(&k, 2, &[vec![k.zero(), k.one()]]).unwrap());

    let ss = supersingular_block(&k);
    let chain = canonical_filtration(&ss).unwrap();
    assert_eq!(chain.len(), 3);
    assert_eq!(chain[1], ss.ker_f());
}

#[test]
fn canonical_filtration_is_closed() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (p, kdeg) in CORPUS_FIELDS {
        let k = make_field(p, kdeg).unwrap();
        for g in 1..=3 {
            let d = random_module(&k, g, &mut rng);
            let chain = canonical_filtration(&d).unwrap();
            for n in &chain {
                assert!(chain.contains(&d.image_under_v(n).unwrap()));
                assert!(chain.contains(&d.perp(n).unwrap()));
            }
            let r = chain.len() / 2;
            assert_eq!(chain[r], d.im_v());
            for i in 0..=r {
                assert_eq!(d.perp(&chain[r - i]).unwrap(), chain[r + i]);
            }
        }
    }
}

#[test]
fn final_type_examples() {
    let k = f3();
    assert_eq!(final_type(&ordinary_module(&k, 2)).unwrap(), ft(&[1, 2]));
    assert_eq!(final_type(&ordinary_module(&k, 1)).unwrap(), ft(&[1]));
    assert_eq!(final_type(&supersingular_block(&k)).unwrap(), ft(&[0]));
}

#[test]
fn refine_examples() {
    let k = f3();
    let ord = ordinary_module(&k, 1);
    let flag = final_flag_refine(&ord).unwrap();
    assert_eq!((flag.extension_degree, flag.p_rank, flag.module.is_none()), (1, 1, true));
    assert_eq!(flag.final_type().unwrap(), ft(&[1]));
    let mixed = final_flag_refine(&direct_sum(&[ord, supersingular_block(&k)]).unwrap()).unwrap();
    assert_eq!((mixed.p_rank, mixed.flag.len()), (1, 3));
    assert_eq!(mixed.final_type().unwrap(), ft(&[1, 1]));
    let ss = supersingular_block(&k);
    assert_eq!(final_flag_refine(&ss).unwrap().final_type().unwrap(), ft(&[0]));
}

#[test]
fn ordinary_part_splits_off() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for (p, kdeg) in CORPUS_FIELDS {
        let k = make_field(p, kdeg).unwrap();
        for _ in 0..10 {
            let g = rng.gen_range(1..=3);
            let d = random_module(&k, g, &mut rng);
            let nu = final_type(&d).unwrap();
            let (f, local) = split_ordinary_part(&d).unwrap();
            assert_eq!(f, module_delta(&d).unwrap().p_rank());
            match local {
                None => assert_eq!(nu, ft(&(1..=g as u32).collect::<Vec<_>>())),
                Some(l) => {
                    assert_eq!(l.g(), g - f as usize);
                    assert_eq!(module_delta(&l).unwrap().p_rank(), 0);
                    assert_eq!(final_type(&l).unwrap().shift(f), nu);
                }
            }
        }
    }
}

#[test]
fn refine_may_need_an_extension() {
    let ss = supersingular_block(&f3());
    let two = direct_sum(&[ss.clone(), ss]).unwrap();
    let flag = final_flag_refine(&two).unwrap();
    assert_eq!(flag.extension_degree, 2);
    assert_eq!(flag.final_type().unwrap(), ft(&[0, 0]));

    let ss5 = supersingular_block(&make_field(5, 1).unwrap());
    let flag = final_flag_refine(&direct_sum(&[ss5.clone(), ss5]).unwrap()).unwrap();
    assert_eq!(flag.extension_degree, 1);
}

#[test]
fn refine_agrees_with_interpolation() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for (p, kdeg) in CORPUS_FIELDS {
        let k = make_field(p, kdeg).unwrap();
        for g in 1..=3 {
            for _ in 0..3 {
                let d = random_module(&k, g, &mut rng);
                let refined = final_flag_refine(&d).unwrap();
                let h = g - refined.p_rank as usize;
                let Some(e) = &refined.module else {
                    assert_eq!(h, 0);
                    continue;
                };
                let flag = &refined.flag;
                assert_eq!((e.g(), flag.len()), (h, 2 * h + 1));
                for n in flag {
                    assert!(flag.contains(&e.image_under_v(n).unwrap()));
                    assert!(flag.contains(&e.perp(n).unwrap()));
                }
                assert_eq!(refined.final_type().unwrap(), final_type(&d).unwrap());
            }
        }
    }
}

#[test]
fn triple_examples() {
    let k = f3();
    let t = triple_from_module(&ordinary_module(&k, 1)).unwrap();
    assert_eq!(t.g(), 1);
    assert_eq!(t.phi().rank(), 1);
    assert_eq!(t.kernel_basis().rows(), 0);
    assert_eq!(t.psi().rows(), 0);

    let t = triple_from_module(&supersingular_block(&k)).unwrap();
    assert!(t.phi().is_zero());
    assert_eq!(t.psi().rank(), 1);
}

#[test]
fn module_from_triple_examples() {
    let k = f3();
    let t = HasseWittTriple::with_canonical_psi(Matrix::from_ints(&k, &[&[1]])).unwrap();
    assert_eq!(final_type(&module_from_triple(&t).unwrap()).unwrap(), ft(&[1]));

    let t = HasseWittTriple::new(
        Matrix::from_ints(&k, &[&[0]]),
        Matrix::from_ints(&k, &[&[1]]),
        Matrix::from_ints(&k, &[&[1]]),
    )
    .unwrap();
    let d = module_from_triple(&t).unwrap();
    assert_eq!(d, supersingular_block(&k));
    assert_eq!(mu_from_nu(&final_type(&d).unwrap()).parts(), &[1]);

    let t = HasseWittTriple::with_canonical_psi(Matrix::from_ints(&k, &[&[0, 0], &[1, 0]])).unwrap();
    let d = module_from_triple(&t).unwrap();
    assert_eq!(module_delta(&d).unwrap().parts(), &[1, 1]);
    assert_eq!(mu_from_nu(&final_type(&d).unwrap()).parts(), &[2]);
}

#[test]
fn example_curve_module() {
    for (p, kdeg) in [(3, 1), (3, 2)] {
        let k = make_field(p, kdeg).unwrap();
        let d = module_from_triple(&HasseWittTriple::with_canonical_psi(example_phi(&k)).unwrap()).unwrap();
        assert_eq!(module_delta(&d).unwrap().parts(), &[2, 2]);
        assert_eq!(final_type(&d).unwrap(), ft(&[0, 0, 1, 2]));
        assert_eq!(mu_from_nu(&final_type(&d).unwrap()).parts(), &[4, 3]);
    }
}

#[test]
fn invalid_triples() {
    let k = f3();
    let phi = Matrix::from_ints(&k, &[&[0, 0], &[1, 0]]);
    // Ψ value not annihilating im Φ = span(e_2)
    let bad = HasseWittTriple::new(phi.clone(), Matrix::from_ints(&k, &[&[0, 1]]), Matrix::from_ints(&k, &[&[0, 1]]));
    assert!(matches!(bad, Err(ModuleError::InvalidTriple(_))));
    let bad = HasseWittTriple::new(phi, Matrix::from_ints(&k, &[&[1, 0]]), Matrix::from_ints(&k, &[&[1, 0]]));
    assert!(matches!(bad, Err(ModuleError::InvalidTriple(_))));
}

#[test]
fn module_delta_examples() {
    let k = f3();
    assert!(module_delta(&ordinary_module(&k, 3)).unwrap().parts().is_empty());
    let ss = supersingular_block(&k);
    assert_eq!(module_delta(&direct_sum(&[ss.clone(), ss]).unwrap()).unwrap().parts(), &[2]);
}

#[test]
fn round_trip_and_delta_on_corpus() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (p, kdeg) in CORPUS_FIELDS {
        let k = make_field(p, kdeg).unwrap();
        for g in 1..=3 {
            for _ in 0..4 {
                let d = random_module(&k, g, &mut rng);
                assert!(validate_module(&d).is_empty());
                let nu = final_type(&d).unwrap();
                let t = triple_from_module(&d).unwrap();
                let back = module_from_triple(&t).unwrap();
                assert_eq!(final_type(&back).unwrap(), nu);
                assert_eq!(triple_from_module(&back).unwrap().phi(), t.phi());
                let delta = module_delta(&d).unwrap();
                assert_eq!(delta, delta_from_nu(&nu).0);
                let mu = mu_from_nu(&nu);
                assert_eq!(delta.a_number() as usize, mu.len());
                assert_eq!(delta.p_rank(), g as u32 - mu.largest());
            }
        }
    }
}

#[test]
fn perp_of_v_image_is_f_preimage_of_perp() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for (p, kdeg) in CORPUS_FIELDS {
        let k = make_field(p, kdeg).unwrap();
        let d = random_module(&k, 3, &mut rng);
        for r in 0..=6 {
            let n = Subspace::from_matrix(&Matrix::random(&k, r, 6, &mut rng));
            let lhs = d.perp(&d.image_under_v(&n).unwrap()).unwrap();
            let rhs = d.preimage_under_f(&d.perp(&n).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn ordinary_shift_law() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let k = make_field(3, 2).unwrap();
    for g in 1..=3 {
        let d = random_module(&k, g, &mut rng);
        let nu = final_type(&d).unwrap();
        for l in 1..=2 {
            let sum = direct_sum(&[ordinary_module(&k, l), d.clone()]).unwrap();
            assert_eq!(final_type(&sum).unwrap(), nu.shift(l as u32));
        }
    }
}

#[test]
fn complement_choice_does_not_change_type() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let k = make_field(5, 1).unwrap();
    let t = HasseWittTriple::with_canonical_psi(Matrix::from_ints(&k, &[&[0, 0, 0], &[1, 0, 0], &[0, 0, 1]])).unwrap();
    let nu = final_type(&module_from_triple(&t).unwrap()).unwrap();
    let l = Subspace::from_matrix(t.kernel_basis());
    for _ in 0..10 {
        let u = loop {
            let u = Matrix::random(&k, 2, 3, &mut rng);
            if l.sum(&Subspace::from_matrix(&u)).unwrap().is_full() {
                break u;
            }
        };
        let d = module_from_triple_with_complement(&t, &u.row_vecs()).unwrap();
        assert_eq!(final_type(&d).unwrap(), nu);
    }
}

#[test]
fn representatives_realize_delta() {
    let k = f3();
    for parts in [vec![], vec![1], vec![2, 1], vec![2, 2], vec![3, 1], vec![1, 1, 1]] {
        let delta = HWPartition::new(parts.clone(), 4).unwrap();
        let d = representative_module(&k, &delta);
        assert_eq!(module_delta(&d).unwrap(), delta);
    }
}

#[test]
fn base_change_preserves_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let k = make_field(3, 2).unwrap();
    let d = module_from_triple(&HasseWittTriple::with_canonical_psi(example_phi(&k)).unwrap()).unwrap();
    let c = conjugate(&d, &mut rng);
    assert_ne!(c.f_mat(), d.f_mat());
    assert!(validate_module(&c).is_empty());
    assert_eq!(final_type(&c).unwrap(), final_type(&d).unwrap());
    assert_eq!(mu_from_nu(&final_type(&c).unwrap()), YoungDiagram::new(vec![4, 3]).unwrap());
}

#[test]
fn json_round_trip() {
    let k = make_field(3, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let d = random_module(&k, 2, &mut rng);
    assert_eq!(DieudonneModule::from_json(&d.to_json()).unwrap(), d);
    let t = triple_from_module(&d).unwrap();
    assert_eq!(HasseWittTriple::from_json(&t.to_json()).unwrap(), t);
    let short = json!({"p": 3, "k": 1, "g": 4, "Phi": example_phi(&f3()).to_json()});
    assert_eq!(HasseWittTriple::from_json(&short).unwrap().phi(), &example_phi(&f3()));
    assert!(DieudonneModule::from_json(&json!({"p": 3, "g": 1, "F": [[0]]})).is_err());
}


#[test]
fn standard_modules_have_their_final_type() {
    use crate::eo_comb::enumerate_final_types;
    for (p, kdeg) in [(3, 1), (3, 2), (5, 1)] {
        let k = make_field(p, kdeg).unwrap();
        for g in 1..=4 {
            for nu in enumerate_final_types(g).unwrap() {
                let d = standard_module(&k, &nu).unwrap();
                assert_eq!(final_type(&d).unwrap(), nu);
                assert_eq!(module_delta(&d).unwrap(), delta_from_nu(&nu).0);
                let flag: Vec<Subspace> = (0..=2 * g as usize)
                    .map(|i| Subspace::from_matrix(&Matrix::identity(&k, 2 * g as usize).block(0, 0, i, 2 * g as usize)))
                    .collect();
                assert_eq!(final_type_from_flag(&d, &flag).unwrap(), nu);
            }
        }
    }
}
