//! A Dieudonne module from a Hasse-Witt triple: validation, canonical filtration,
//! final type by interpolation and by explicit flag refinement.

use ekedahl_oort::dieudonne::{
    canonical_filtration, final_flag_refine, final_type, module_delta, module_from_triple, triple_from_module,
    validate_module, HasseWittTriple,
};
use ekedahl_oort::eo_comb::mu_from_nu;
use ekedahl_oort::field::make_field;
use ekedahl_oort::semilinear::Matrix;

fn main() {
    let k = make_field(3, 1).expect("prime");
    let phi = Matrix::from_ints(&k, &[&[0, 0, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, 1], &[0, 0, 0, 0]]);
    let t = HasseWittTriple::with_canonical_psi(phi).expect("valid Phi");
    let d = module_from_triple(&t).expect("valid triple");
    println!("g = {}, violations: {}", d.g(), validate_module(&d).len());

    let dims: Vec<usize> = canonical_filtration(&d).expect("valid").iter().map(|n| n.dim()).collect();
    println!("canonical filtration dims {dims:?}");

    let nu = final_type(&d).expect("valid");
    println!("nu = {nu}, mu = {}, delta = {}", mu_from_nu(&nu), module_delta(&d).expect("valid"));

    let flag = final_flag_refine(&d).expect("refinable");
    println!(
        "refined over degree {} extension, p-rank {}, nu = {}",
        flag.extension_degree,
        flag.p_rank,
        flag.final_type().expect("flag")
    );

    let back = triple_from_module(&d).expect("valid");
    println!("round trip final type {}", final_type(&module_from_triple(&back).expect("valid")).expect("valid"));
}
