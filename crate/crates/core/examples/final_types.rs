//! Final types, Young diagrams and the delta to mu table for small genus.

use ekedahl_oort::cli::{cmd_enumerate, cmd_table, format_enumerate, format_table};
use ekedahl_oort::eo_comb::{delta_from_nu, enumerate_final_types, mu_from_nu, nu_from_mu, YoungDiagram};

fn main() {
    for nu in enumerate_final_types(3).expect("small g") {
        let (delta, rest) = delta_from_nu(&nu);
        println!("nu = {nu:<10} mu = {:<10} delta = {delta} (+{rest})", mu_from_nu(&nu).to_string());
    }
    let mu = YoungDiagram::new(vec![4, 2]).expect("strict");
    println!("nu_from_mu({mu}, 4) = {}", nu_from_mu(&mu, 4).expect("fits"));

    print!("{}", format_table(&cmd_table(4).expect("g <= 10")));
    print!("{}", format_enumerate(&cmd_enumerate(4, Some(&[3, 1])).expect("valid delta")));
}
