//! Arithmetic in F_9 and the Frobenius twist of a matrix.

use ekedahl_oort::field::make_field;
use ekedahl_oort::semilinear::{sigma_power_product, twist, Matrix};

fn main() {
    let k = make_field(3, 2).expect("9 is a prime power");
    println!("field {k}, modulus {:?}", k.modulus());

    let a = k.generator();
    let b = k.add(a, k.one());
    println!("a = {:?}, a + 1 = {:?}", k.coeffs(a), k.coeffs(b));
    println!("a * (a + 1) = {:?}", k.coeffs(k.mul(a, b)));
    println!("a^-1 = {:?}", k.coeffs(k.inv(a).expect("nonzero")));
    println!("sigma(a) = a^3 = {:?}", k.coeffs(k.frobenius(a, 1)));

    let h = Matrix::from_rows(&k, 2, &[vec![k.zero(), a], vec![k.one(), k.zero()]]).expect("2 x 2");
    println!("H = {}", h.to_json());
    println!("twist(H, 1) = {}", twist(&h, 1).to_json());
    for m in 1..=3 {
        let prod = sigma_power_product(&h, m).expect("square");
        println!("rank of H twist(H,1) ... (length {m}) = {}", prod.rank());
    }
}
