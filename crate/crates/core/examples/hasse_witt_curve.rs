//! Hasse-Witt matrix and rank invariants of a genus-4 hyperelliptic curve over F_3,
//! and the point-count congruence for an elliptic curve.

use ekedahl_oort::curves::{cartier_manin, hasse_witt_hyperelliptic, hw_partition, projective_point_count, HyperellipticCurve};
use ekedahl_oort::eo_comb::mu_candidates;
use ekedahl_oort::field::make_field;

fn main() {
    let k = make_field(3, 1).expect("prime");
    // y^2 = x^9 + x
    let c = HyperellipticCurve::from_ints(&k, &[0, 1, 0, 0, 0, 0, 0, 0, 0, 1]).expect("squarefree");
    let h = hasse_witt_hyperelliptic(&c);
    println!("genus {}", c.genus());
    println!("H = {}", h.to_json());
    println!("Cartier-Manin = {}", cartier_manin(&h).expect("square").to_json());

    let r = hw_partition(&h).expect("square");
    println!("rho = {:?}", r.rho);
    println!("delta = {}  p-rank = {}  a-number = {}", r.delta, r.p_rank, r.a_number);
    let mus = mu_candidates(&r.delta, c.genus()).expect("consistent");
    let mus: Vec<String> = mus.iter().map(|m| m.to_string()).collect();
    println!("mu candidates: {}", mus.join(", "));

    // genus 1: H = (a_{p-1}) and #E(F_p) = p + 1 - trace, so #E ≡ 1 - H (mod p)
    let k5 = make_field(5, 1).expect("prime");
    let e = HyperellipticCurve::from_ints(&k5, &[1, 1, 0, 1]).expect("squarefree");
    let he = hasse_witt_hyperelliptic(&e);
    println!("y^2 = x^3 + x + 1 over F_5: H = {}, points {}", he.to_json(), projective_point_count(&e).expect("genus 1"));
}
